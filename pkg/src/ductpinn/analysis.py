"""Error metrics and post-processing of predicted fields."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import oracle
from .errors import InputError
from .physics import DuctProblem, FieldKind, TrialField

__all__ = [
    "FieldSample",
    "FieldProfile",
    "ErrorReport",
    "relative_error",
    "magnitude_phase_errors",
    "error_report",
    "velocity_noflow",
    "impedance_profile",
    "oracle_profile",
    "find_velocity_nodes",
    "NODE_THRESHOLD",
    "NODE_DEPTH",
]

# |xi| below NODE_THRESHOLD * max|xi| makes Z invalid
NODE_THRESHOLD = 1e-3
# a local minimum of |xi| counts as a node when below NODE_DEPTH * max|xi|
NODE_DEPTH = 0.25


class FieldSample(NamedTuple):
    x: float
    psi: complex
    xi: complex
    Z: complex
    valid_Z: bool


@dataclass
class FieldProfile:
    """Columns of a sampled field; iterating yields :class:`FieldSample` rows."""

    x: np.ndarray
    psi: np.ndarray
    xi: np.ndarray
    Z: np.ndarray
    valid_Z: np.ndarray

    @classmethod
    def from_fields(cls, x, psi, xi, threshold=NODE_THRESHOLD):
        x = np.asarray(x, dtype=np.float64)
        psi = np.asarray(psi, dtype=complex)
        xi = np.asarray(xi, dtype=complex)
        mag = np.abs(xi)
        valid = mag >= threshold * mag.max() if mag.size else np.zeros(0, bool)
        Z = np.full(x.shape, np.nan + 1j * np.nan, dtype=complex)
        np.divide(psi, xi, out=Z, where=valid)
        return cls(x, psi, xi, Z, valid)

    def __len__(self):
        return self.x.size

    def __iter__(self):
        for row in zip(self.x, self.psi, self.xi, self.Z, self.valid_Z):
            yield FieldSample(float(row[0]), complex(row[1]), complex(row[2]),
                              complex(row[3]), bool(row[4]))

    def __getitem__(self, i):
        return FieldSample(float(self.x[i]), complex(self.psi[i]), complex(self.xi[i]),
                           complex(self.Z[i]), bool(self.valid_Z[i]))


@dataclass(frozen=True)
class ErrorReport:
    delta_psi: float
    delta_mag: float
    delta_phase: float
    N_t: int


def relative_error(predicted, truth) -> float:
    """``||predicted - truth||_2 / ||truth||_2`` over complex or real samples."""
    p = np.asarray(predicted)
    t = np.asarray(truth)
    if p.shape != t.shape or p.size == 0:
        raise InputError(f"need equal non-empty shapes, got {p.shape} and {t.shape}")
    scale = np.max(np.abs(t))
    if scale == 0.0:
        raise InputError("relative error undefined for an all-zero reference")
    # scaled to stay clear of under/overflow in the sums of squares
    num = np.sqrt(np.sum(np.abs((p - t) / scale) ** 2))
    den = np.sqrt(np.sum(np.abs(t / scale) ** 2))
    return float(num / den)


def magnitude_phase_errors(predicted, truth) -> tuple[float, float]:
    """Relative errors of ``|psi|`` and of the phase unwrapped along the grid.

    The predicted phase is the unwrapped reference phase plus the principal
    value of ``arg(predicted / truth)``, which keeps both curves on the same
    branch even where the field passes close to zero.
    """
    p = np.asarray(predicted, dtype=complex)
    t = np.asarray(truth, dtype=complex)
    d_mag = relative_error(np.abs(p), np.abs(t))
    phase_t = np.unwrap(np.angle(t))
    phase_p = phase_t + np.angle(p * np.conj(t))
    if not np.any(phase_t):
        # a reference with identically zero phase has no meaningful scale
        return d_mag, float(np.sqrt(np.sum((phase_p - phase_t) ** 2)))
    return d_mag, relative_error(phase_p, phase_t)


def error_report(predicted, truth) -> ErrorReport:
    d_mag, d_phase = magnitude_phase_errors(predicted, truth)
    return ErrorReport(relative_error(predicted, truth), d_mag, d_phase, int(np.size(truth)))


def velocity_noflow(pressure: TrialField, problem: DuctProblem, x):
    """``xi = -psi'/(j omega rho)`` from a no-flow pressure field."""
    dpsi = pressure.evaluate(x)[1]
    return -dpsi / (1j * problem.omega * problem.rho)


def impedance_profile(pressure: TrialField, velocity: TrialField | None,
                      problem: DuctProblem, N_t: int = 500) -> FieldProfile:
    """Sample pressure, velocity and impedance on ``N_t`` equispaced points.

    ``velocity`` may be ``None`` for a no-flow field, in which case the
    velocity follows algebraically from the pressure gradient.
    """
    if N_t < 2:
        raise InputError("N_t must be >= 2")
    x = np.linspace(0.0, problem.L, N_t)
    psi, dpsi, _ = pressure.evaluate(x)
    if velocity is None:
        if problem.M != 0.0:
            raise InputError("a velocity field is required when M > 0")
        xi = -dpsi / (1j * problem.omega * problem.rho)
    else:
        if velocity.kind is not FieldKind.VELOCITY_FLOW:
            raise InputError("velocity must be a velocity_flow field")
        xi = velocity.evaluate(x)[0]
    return FieldProfile.from_fields(x, psi, xi)


def oracle_profile(problem: DuctProblem, N_t: int = 500) -> FieldProfile:
    x = np.linspace(0.0, problem.L, N_t)
    return FieldProfile.from_fields(x, oracle.pressure(problem, x), oracle.velocity(problem, x))


def find_velocity_nodes(samples: FieldProfile, depth: float = NODE_DEPTH) -> np.ndarray:
    """Positions of interior local minima of ``|xi|`` deeper than ``depth * max|xi|``,
    refined by a parabola through ``|xi|^2`` at the minimum and its neighbours."""
    x = np.asarray(samples.x)
    m2 = np.abs(np.asarray(samples.xi)) ** 2
    if x.size < 3:
        return np.empty(0)
    limit = (depth * np.sqrt(m2.max())) ** 2
    c = m2[1:-1]
    idx = np.nonzero((c < m2[:-2]) & (c <= m2[2:]) & (c <= limit))[0] + 1
    nodes = []
    for i in idx:
        x0, x1, x2 = x[i - 1], x[i], x[i + 1]
        y0, y1, y2 = m2[i - 1], m2[i], m2[i + 1]
        den = (x0 - x1) * (x0 - x2) * (x1 - x2)
        a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den
        b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / den
        nodes.append(-b / (2.0 * a) if a > 0 else x1)
    return np.array(nodes)
