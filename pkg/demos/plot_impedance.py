"""
Particle velocity, impedance and velocity nodes
===============================================

Freeze the trained pressure network, train a second network on the
momentum equation for the particle velocity, then form Z = psi / xi.
Samples where |xi| is tiny are flagged rather than divided.
"""

import numpy as np

from ductpinn import DuctProblem
from ductpinn.analysis import find_velocity_nodes
from ductpinn.solver import RunConfig, reduced_profile, solve

result = solve(reduced_profile(RunConfig(problem=DuctProblem(f=500.0, M=0.1))))
prof, truth = result.profile, result.truth

ok = prof.valid_Z & truth.valid_Z
err_re = np.linalg.norm(prof.Z.real[ok] - truth.Z.real[ok]) / np.linalg.norm(truth.Z.real[ok])
err_im = np.linalg.norm(prof.Z.imag[ok] - truth.Z.imag[ok]) / np.linalg.norm(truth.Z.imag[ok])
print(f"Re Z error {err_re:.3%}, Im Z error {err_im:.3%} on {ok.sum()} samples")

print("velocity nodes (network):", np.round(find_velocity_nodes(prof), 4))
print("velocity nodes (exact):  ", np.round(find_velocity_nodes(truth), 4))
print("Re Z(0):", prof.Z[0].real, "exact", truth.Z[0].real)
