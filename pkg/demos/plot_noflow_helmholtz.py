"""
Duct acoustics without mean flow
================================

Train the trial-solution network on psi'' + k^2 psi = 0 with psi(0) = 1,
psi(L) = -1 and compare it with the closed-form standing wave.
"""

import numpy as np

from ductpinn import DuctProblem, oracle
from ductpinn.analysis import relative_error
from ductpinn.solver import RunConfig, reduced_profile, solve

# the reduced profile trains in a minute or two on one core
problem = DuctProblem(f=500.0)
cfg = reduced_profile(RunConfig(problem=problem))
result = solve(cfg)

x = result.profile.x
psi = result.profile.psi.real
truth = oracle.pressure(problem, x).real
print("iterations:", result.pressure_result.iterations, result.pressure_result.termination.value)
print("relative error:", relative_error(psi, truth))

# the boundary values are exact by construction, whatever the weights
print("psi(0), psi(L):", psi[0], psi[-1])

# a few samples side by side
for i in np.linspace(0, x.size - 1, 6).astype(int):
    print(f"x = {x[i]:.3f}   network {psi[i]: .6f}   exact {truth[i]: .6f}")
