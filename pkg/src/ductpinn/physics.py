"""Duct problem definition, boundary-exact trial fields and PDE residuals.

Pressure trial field (applied to the real and imaginary channels separately)::

    psi_t(x) = phi_L psi_0 + phi_0 psi_L + phi_0 phi_L g(x)
    phi_L = (L - x) / L,  phi_0 = x / L

where ``g`` is the raw network output.  The particle-velocity field carries no
blend: ``xi(x) = g(x) / (rho c)``, i.e. the network predicts velocity in units
of the characteristic impedance so that its outputs are of order one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import autodiff
from .errors import DomainError, InputError
from .network import MlpParams

__all__ = [
    "DuctProblem",
    "FieldKind",
    "TrialField",
    "blend_functions",
    "trial_pressure",
    "trial_velocity",
    "residual_noflow",
    "residual_flow",
    "residual_velocity",
    "make_collocation",
]


@dataclass(frozen=True)
class DuctProblem:
    """Uniform duct with Dirichlet pressure data at both ends (SI units)."""

    f: float = 500.0
    M: float = 0.0
    L: float = 1.0
    c: float = 340.0
    rho: float = 1.225
    psi0: complex = 1.0
    psiL: complex = -1.0

    def __post_init__(self):
        for name in ("L", "c", "rho", "f", "M"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise InputError(f"{name} must be finite, got {v}")
        if self.L <= 0 or self.c <= 0 or self.rho <= 0 or self.f <= 0:
            raise InputError("L, c, rho and f must be positive")
        if not 0.0 <= self.M < 1.0:
            raise InputError(f"Mach number must satisfy 0 <= M < 1, got {self.M}")
        for name in ("psi0", "psiL"):
            if not np.isfinite(complex(getattr(self, name))):
                raise InputError(f"{name} must be finite")

    @property
    def k(self) -> float:
        return 2.0 * np.pi * self.f / self.c

    @property
    def omega(self) -> float:
        return 2.0 * np.pi * self.f

    @property
    def rho_c(self) -> float:
        return self.rho * self.c

    @property
    def real_boundary(self) -> bool:
        return complex(self.psi0).imag == 0.0 and complex(self.psiL).imag == 0.0


class FieldKind(str, Enum):
    PRESSURE_NOFLOW = "pressure_noflow"
    PRESSURE_FLOW = "pressure_flow"
    VELOCITY_FLOW = "velocity_flow"


def _check_domain(L, x):
    x = np.asarray(x, dtype=np.float64)
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > L):
        raise DomainError(f"positions must lie in [0, {L}]")
    return x


def blend_functions(L: float, x):
    """``(phi_L, phi_0) = ((L - x)/L, x/L)``."""
    x = _check_domain(L, x)
    return (L - x) / L, x / L


def _blend_product(L, x):
    """``phi_0 phi_L`` and its first two x-derivatives."""
    p = x * (L - x) / L**2
    p1 = (L - 2.0 * x) / L**2
    p2 = np.full_like(x, -2.0 / L**2)
    return p, p1, p2


def boundary_channels(problem: DuctProblem, n_out: int) -> list[tuple[float, float]]:
    a, b = complex(problem.psi0), complex(problem.psiL)
    if n_out == 1:
        if not problem.real_boundary:
            raise InputError("a single-output (no-flow) field needs real boundary pressures")
        return [(a.real, b.real)]
    return [(a.real, b.real), (a.imag, b.imag)]


def blend_network(problem: DuctProblem, x, raw):
    """Map the raw network triple ``raw`` (3, N, n_out) to the trial triple."""
    L = problem.L
    p, p1, p2 = _blend_product(L, x)
    out = np.empty_like(raw)
    for j, (b0, bL) in enumerate(boundary_channels(problem, raw.shape[2])):
        g, g1, g2 = raw[0, :, j], raw[1, :, j], raw[2, :, j]
        phi_L, phi_0 = (L - x) / L, x / L
        out[0, :, j] = phi_L * b0 + phi_0 * bL + p * g
        out[1, :, j] = (bL - b0) / L + p1 * g + p * g1
        out[2, :, j] = p2 * g + 2.0 * p1 * g1 + p * g2
    return out


def blend_network_adjoint(problem: DuctProblem, x, grad_trial):
    """Pull ``dL/d(trial triple)`` back to ``dL/d(raw triple)``."""
    p, p1, p2 = _blend_product(problem.L, x)
    h0, h1, h2 = grad_trial
    G = np.empty_like(grad_trial)
    G[0] = p[:, None] * h0 + p1[:, None] * h1 + p2[:, None] * h2
    G[1] = p[:, None] * h1 + 2.0 * p1[:, None] * h2
    G[2] = p[:, None] * h2
    return G


def _to_complex(triple):
    if triple.shape[2] == 1:
        return tuple(triple[c, :, 0].astype(complex) for c in range(3))
    return tuple(triple[c, :, 0] + 1j * triple[c, :, 1] for c in range(3))


@dataclass
class TrialField:
    """A network bundled with the problem and the way its output is interpreted."""

    params: MlpParams
    problem: DuctProblem
    kind: FieldKind
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.kind = FieldKind(self.kind)
        want = 1 if self.kind is FieldKind.PRESSURE_NOFLOW else 2
        if self.params.arch.output_width != want:
            raise InputError(f"{self.kind.value} needs output_width={want}")
        if self.kind is FieldKind.PRESSURE_NOFLOW:
            boundary_channels(self.problem, 1)

    def triple(self, x):
        """Real-valued ``(3, N, n_out)`` triple of the field at ``x``."""
        x = _check_domain(self.problem.L, np.atleast_1d(x))
        raw = autodiff.forward(self.params, x).out
        if self.kind is FieldKind.VELOCITY_FLOW:
            return raw / self.problem.rho_c
        return blend_network(self.problem, x, raw)

    def evaluate(self, x):
        """Complex ``(value, d/dx, d2/dx2)`` arrays at positions ``x``."""
        return _to_complex(self.triple(x))

    def __call__(self, x):
        return self.evaluate(x)[0]


def trial_pressure(field: TrialField, x):
    if field.kind is FieldKind.VELOCITY_FLOW:
        raise InputError("trial_pressure needs a pressure field")
    return field.evaluate(x)


def trial_velocity(field: TrialField, x):
    if field.kind is not FieldKind.VELOCITY_FLOW:
        raise InputError("trial_velocity needs a velocity field")
    return field.evaluate(x)


def residual_noflow(problem: DuctProblem, psi, d2psi):
    """Helmholtz residual ``psi'' + k^2 psi``."""
    return np.asarray(d2psi) + problem.k**2 * np.asarray(psi)


def residual_flow(problem: DuctProblem, psi, dpsi, d2psi):
    """Real and imaginary parts of the convected Helmholtz residual.

    ``(1 - M^2) psi'' - 2 j M k psi' + k^2 psi`` split into components.
    """
    psi, dpsi, d2psi = (np.asarray(a, dtype=complex) for a in (psi, dpsi, d2psi))
    a = 1.0 - problem.M**2
    b = 2.0 * problem.M * problem.k
    k2 = problem.k**2
    r_re = a * d2psi.real + b * dpsi.imag + k2 * psi.real
    r_im = a * d2psi.imag - b * dpsi.real + k2 * psi.imag
    return r_re, r_im


def residual_velocity(problem: DuctProblem, dpsi, xi, dxi):
    """Momentum residual ``j k xi + M xi' + psi'/(rho c)`` split into components."""
    dpsi, xi, dxi = (np.asarray(a, dtype=complex) for a in (dpsi, xi, dxi))
    k, M, rc = problem.k, problem.M, problem.rho_c
    r_re = M * dxi.real - k * xi.imag + dpsi.real / rc
    r_im = M * dxi.imag + k * xi.real + dpsi.imag / rc
    return r_re, r_im


def make_collocation(L: float, n: int, seed: int) -> np.ndarray:
    """``n`` sorted uniform points on ``[0, L]``; the smallest and largest
    draws are replaced by the exact endpoints."""
    if n < 2:
        raise InputError(f"need at least 2 collocation points, got {n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    x = np.sort(rng.uniform(0.0, L, size=n))
    x[0] = 0.0
    x[-1] = L
    return x
