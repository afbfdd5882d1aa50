"""
Where does Re Z(0) change sign?
===============================

For real boundary data the sign of Re Z(0) follows the sign of
psi0 * psiL * (cos k+L - cos k-L). Scanning the Mach number shows one
sign change at 500 Hz between M = 0.1 and 0.3; the exact location solves
1 - M^2 = kL / (pi m).
"""

import numpy as np

from ductpinn import DuctProblem, oracle

problem = DuctProblem(f=500.0, M=0.1)
print("indicator at M = 0.1:", oracle.sign_indicator(problem))

for M in (0.1, 0.2, 0.3):
    p = DuctProblem(f=500.0, M=M)
    print(f"M = {M}: Re Z(0) = {oracle.re_z0_closed_form(p): .4f}")

# closed-form roots, cross-checked against a dM = 1e-4 scan
for m, M_star in oracle.critical_mach(500.0, M_range=(0.1, 0.3)):
    print(f"sign change at M* = {M_star:.5f} (m = {m})")

# the same analysis at higher frequencies finds more crossings
for f in (1000.0, 1500.0, 2000.0):
    roots = oracle.critical_mach(f, M_range=(0.1, 0.3))
    print(f, "Hz:", [round(M, 4) for _, M in roots])

# the magnitude of the velocity is symmetric about the duct centre
x = np.linspace(0, 1, 5)
print(np.abs(oracle.velocity(problem, x)))
