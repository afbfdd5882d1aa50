"""
Convected waves: pressure with mean flow
========================================

With a uniform mean flow of Mach M the field is complex. The network gets
two outputs (real and imaginary part) and the coupled residuals are
minimized together. Magnitude and phase are compared with the
two-wave closed form.
"""

from ductpinn import DuctProblem
from ductpinn.analysis import magnitude_phase_errors
from ductpinn.solver import RunConfig, reduced_profile, solve

cfg = reduced_profile(RunConfig(problem=DuctProblem(f=500.0, M=0.1)))
# pressure only here; the velocity step is shown in plot_impedance.py
cfg = cfg.replace(training={"train_velocity": False})
result = solve(cfg)

d_mag, d_phase = magnitude_phase_errors(result.profile.psi, result.truth.psi)
print(f"magnitude error {d_mag:.2e}, phase error {d_phase:.2e}")

# downstream and upstream wavenumbers of the two travelling waves
p = cfg.problem
print("k+ =", p.k / (1 + p.M), " k- =", p.k / (1 - p.M))
