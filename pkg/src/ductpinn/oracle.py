"""Closed-form duct fields and the impedance sign analysis.

Convention: time dependence ``exp(j omega t)``, so the momentum equation with
mean flow reads ``j k xi + M xi' = -psi' / (rho c)``.

No flow::

    psi(x) = psi_0 cos(kx) + (psi_L - psi_0 cos(kL)) / sin(kL) * sin(kx)

Mean flow, with ``k+ = k/(1+M)`` and ``k- = k/(1-M)``::

    psi(x) = A exp(-j k+ x) + B exp(j k- x)
    xi(x)  = (A exp(-j k+ x) - B exp(j k- x)) / (rho c)
    A = (psi_L - psi_0 exp(j k- L)) / (exp(-j k+ L) - exp(j k- L)),  B = psi_0 - A
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError, SingularConfigurationError, UnsupportedAnalysisError
from .physics import DuctProblem

__all__ = [
    "ConvectiveWavenumbers",
    "FlowModalConstants",
    "convective_wavenumbers",
    "pressure_noflow",
    "pressure_noflow_derivatives",
    "velocity_noflow",
    "flow_constants",
    "pressure_flow",
    "pressure_flow_derivatives",
    "velocity_flow",
    "velocity_flow_derivatives",
    "pressure",
    "velocity",
    "impedance",
    "sign_indicator",
    "sign_scan",
    "critical_mach",
    "re_z0_closed_form",
]

SINGULAR_TOL = 1e-9


@dataclass(frozen=True)
class ConvectiveWavenumbers:
    k_plus: float
    k_minus: float


@dataclass(frozen=True)
class FlowModalConstants:
    A_c: complex
    B_c: complex
    C_c: complex
    D_c: complex


def convective_wavenumbers(problem: DuctProblem) -> ConvectiveWavenumbers:
    k, M = problem.k, problem.M
    return ConvectiveWavenumbers(k / (1.0 + M), k / (1.0 - M))


def _noflow_coeffs(problem: DuctProblem):
    k, L = problem.k, problem.L
    s = np.sin(k * L)
    if abs(s) <= SINGULAR_TOL:
        raise SingularConfigurationError(f"resonant duct: sin(kL) = {s:.3e}")
    p0, pL = complex(problem.psi0), complex(problem.psiL)
    return p0, (pL - p0 * np.cos(k * L)) / s


def _maybe_real(problem, z):
    return z.real if problem.real_boundary else z


def pressure_noflow_derivatives(problem: DuctProblem, x):
    """``(psi, psi', psi'')`` of the no-flow solution."""
    x = np.asarray(x, dtype=np.float64)
    a, b = _noflow_coeffs(problem)
    k = problem.k
    c, s = np.cos(k * x), np.sin(k * x)
    psi = a * c + b * s
    d1 = k * (-a * s + b * c)
    d2 = -k * k * psi
    return tuple(_maybe_real(problem, v) for v in (psi, d1, d2))


def pressure_noflow(problem: DuctProblem, x):
    return pressure_noflow_derivatives(problem, x)[0]


def velocity_noflow(problem: DuctProblem, x):
    """``xi = -psi' / (j omega rho)`` of the no-flow solution (complex)."""
    d1 = pressure_noflow_derivatives(problem, x)[1]
    return -d1 / (1j * problem.omega * problem.rho)


def flow_constants(problem: DuctProblem) -> FlowModalConstants:
    kw = convective_wavenumbers(problem)
    L = problem.L
    p0, pL = complex(problem.psi0), complex(problem.psiL)
    e_plus = np.exp(-1j * kw.k_plus * L)
    e_minus = np.exp(1j * kw.k_minus * L)
    denom = e_plus - e_minus
    if abs(denom) <= SINGULAR_TOL:
        raise SingularConfigurationError(f"degenerate modal denominator |{denom:.3e}|")
    A = (pL - p0 * e_minus) / denom
    B = p0 - A
    rc = problem.rho_c
    return FlowModalConstants(complex(A), complex(B), complex(A / rc), complex(-B / rc))


def pressure_flow_derivatives(problem: DuctProblem, x):
    x = np.asarray(x, dtype=np.float64)
    kw = convective_wavenumbers(problem)
    mc = flow_constants(problem)
    fwd = mc.A_c * np.exp(-1j * kw.k_plus * x)
    bwd = mc.B_c * np.exp(1j * kw.k_minus * x)
    psi = fwd + bwd
    d1 = -1j * kw.k_plus * fwd + 1j * kw.k_minus * bwd
    d2 = -kw.k_plus**2 * fwd - kw.k_minus**2 * bwd
    return psi, d1, d2


def pressure_flow(problem: DuctProblem, x):
    return pressure_flow_derivatives(problem, x)[0]


def velocity_flow_derivatives(problem: DuctProblem, x):
    x = np.asarray(x, dtype=np.float64)
    kw = convective_wavenumbers(problem)
    mc = flow_constants(problem)
    fwd = mc.C_c * np.exp(-1j * kw.k_plus * x)
    bwd = mc.D_c * np.exp(1j * kw.k_minus * x)
    return fwd + bwd, -1j * kw.k_plus * fwd + 1j * kw.k_minus * bwd


def velocity_flow(problem: DuctProblem, x):
    return velocity_flow_derivatives(problem, x)[0]


def pressure(problem: DuctProblem, x):
    """Complex pressure; the no-flow closed form is used when ``M == 0``."""
    if problem.M == 0.0:
        return np.asarray(pressure_noflow(problem, x), dtype=complex)
    return pressure_flow(problem, x)


def velocity(problem: DuctProblem, x):
    if problem.M == 0.0:
        return velocity_noflow(problem, x)
    return velocity_flow(problem, x)


def impedance(problem: DuctProblem, x, node_threshold: float | None = None):
    """``Z = psi / xi``; entries with ``|xi| < node_threshold`` are NaN.

    The default threshold is ``1e-3 * max|xi|`` over the requested points.
    """
    psi = pressure(problem, x)
    xi = velocity(problem, x)
    if node_threshold is None:
        node_threshold = 1e-3 * float(np.max(np.abs(xi)))
    valid = np.abs(xi) >= node_threshold
    Z = np.full(np.shape(xi), np.nan + 1j * np.nan, dtype=complex)
    np.divide(psi, xi, out=Z, where=valid)
    return Z


def _real_boundary(problem):
    if not problem.real_boundary:
        raise UnsupportedAnalysisError("the sign analysis assumes real boundary pressures")
    return complex(problem.psi0).real, complex(problem.psiL).real


def sign_indicator(problem: DuctProblem) -> float:
    """``s = psi_0 psi_L (cos k+L - cos k-L)``; ``sign(s) == sign(Re Z)``."""
    p0, pL = _real_boundary(problem)
    kw = convective_wavenumbers(problem)
    L = problem.L
    return float(p0 * pL * (np.cos(kw.k_plus * L) - np.cos(kw.k_minus * L)))


def re_z0_closed_form(problem: DuctProblem) -> float:
    """Real part of the impedance at ``x = 0`` in closed form."""
    p0, pL = _real_boundary(problem)
    kw = convective_wavenumbers(problem)
    L = problem.L
    cp, cm = np.cos(kw.k_plus * L), np.cos(kw.k_minus * L)
    sp, sm = np.sin(kw.k_plus * L), np.sin(kw.k_minus * L)
    den = (2.0 * pL - p0 * (cp + cm)) ** 2 + (p0 * (sp - sm)) ** 2
    if den <= SINGULAR_TOL:
        raise SingularConfigurationError(f"closed-form denominator {den:.3e}")
    return float(2.0 * problem.rho_c * p0 * pL * (cp - cm) / den)


def _with_mach(problem: DuctProblem, M: float) -> DuctProblem:
    return DuctProblem(f=problem.f, M=M, L=problem.L, c=problem.c, rho=problem.rho,
                       psi0=problem.psi0, psiL=problem.psiL)


def sign_scan(problem: DuctProblem, M_range=(0.1, 0.3), dM: float = 1e-4):
    """Brackets ``(M_a, M_b)`` where ``sign_indicator`` changes sign on a
    uniform Mach grid of spacing ``dM``."""
    lo, hi = M_range
    n = int(round((hi - lo) / dM))
    grid = lo + dM * np.arange(n + 1)
    s = np.array([sign_indicator(_with_mach(problem, M)) for M in grid])
    sg = np.sign(s)
    idx = np.nonzero(sg[:-1] * sg[1:] < 0)[0]
    return [(float(grid[i]), float(grid[i + 1])) for i in idx]


def _analytic_roots(f, c, L, m_values, M_range):
    lo, hi = M_range
    k = 2.0 * np.pi * f / c
    roots = []
    for m in m_values:
        if m > 0:
            # k+ + k- = 2 pi m / L  <=>  1 - M^2 = k L / (pi m)
            r = 1.0 - k * L / (np.pi * m)
            if r >= 0.0:
                M = np.sqrt(r)
                if lo <= M <= hi and M < 1.0:
                    roots.append((m, float(M)))
        elif m < 0:
            # k+ - k- = 2 pi m / L  <=>  q M^2 + M - q = 0 with q = pi |m| / (k L)
            q = np.pi * abs(m) / (k * L)
            M = (-1.0 + np.sqrt(1.0 + 4.0 * q * q)) / (2.0 * q)
            if lo <= M <= hi and M < 1.0:
                roots.append((m, float(M)))
    return sorted(roots, key=lambda t: t[1])


def critical_mach(f: float, c: float = 340.0, m_range=range(-20, 21), M_range=(0.1, 0.3),
                  L: float = 1.0, dM: float = 1e-4, psi0: float = 1.0, psiL: float = -1.0):
    """Mach numbers in ``M_range`` where ``cos k+L = cos k-L``.

    Roots of ``k+ L = 2 pi m +- k- L`` solved analytically for each integer
    ``m`` in ``m_range``.  With ``m > 0`` only the minus branch has roots
    for ``M > 0``; the plus branch needs ``m < 0``.  The result is
    cross-checked against a brute-force sign scan of :func:`sign_indicator`
    and :class:`NumericError` is raised when the two disagree.
    """
    lo, hi = M_range
    if not 0.0 <= lo <= hi < 1.0:
        raise UnsupportedAnalysisError(f"Mach range must lie in [0, 1), got {M_range}")
    wanted = set(m_range)
    k = 2.0 * np.pi * f / c
    m_max = int(np.ceil(k * L / (np.pi * (1.0 - hi * hi)))) + 1
    roots = _analytic_roots(f, c, L, m_values=range(-m_max, m_max + 1), M_range=M_range)
    if psi0 * psiL == 0.0:
        return [r for r in roots if r[0] in wanted]
    base = DuctProblem(f=f, M=lo, L=L, c=c, psi0=psi0, psiL=psiL)
    brackets = sign_scan(base, M_range, dM)
    scanned = [r for r in roots if lo + dM < r[1] < hi - dM]
    inner = [b for b in brackets if lo + dM <= b[0] and b[1] <= hi - dM]
    ok = len(scanned) == len(inner) and all(
        a - dM <= M <= b + dM for (_, M), (a, b) in zip(scanned, inner)
    )
    if not ok:
        raise NumericError(f"analytic roots {roots} disagree with sign scan {brackets}")
    return [r for r in roots if r[0] in wanted]
