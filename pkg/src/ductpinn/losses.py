"""Residual losses and their exact parameter gradients.

Three kinds are supported:

``noflow``
    mean of ``(psi_t'' + k^2 psi_t)^2`` for a one-output pressure network.
``flow``
    sum of the means of the squared real and imaginary convected residuals
    for a two-output pressure network.
``velocity``
    sum of the means of the squared momentum residuals, scaled by
    ``rho c``, for a two-output velocity network trained against a frozen
    pressure field.  An optional anchor adds
    ``w * |rho c (xi(0) - xi_0)|^2``.
"""
from __future__ import annotations

from enum import Enum

import numpy as np

from . import autodiff
from .errors import InputError, NumericError
from .network import Architecture, MlpParams, unflatten
from .physics import (
    DuctProblem,
    FieldKind,
    TrialField,
    blend_network,
    blend_network_adjoint,
    _check_domain,
)

__all__ = ["LossKind", "PinnLoss", "loss_and_gradient"]


class LossKind(str, Enum):
    NOFLOW = "noflow"
    FLOW = "flow"
    VELOCITY = "velocity"


def _overflow_index(*residuals):
    acc = np.cumsum(sum(r * r for r in residuals))
    bad = ~np.isfinite(acc)
    return int(np.argmax(bad)) if bad.any() else None


def _first_bad(*arrays):
    bad = np.zeros(arrays[0].shape, dtype=bool)
    for a in arrays:
        bad |= ~np.isfinite(a)
    return int(np.argmax(bad)) if bad.any() else None


class PinnLoss:
    """Objective ``theta -> (loss, grad)`` on a fixed collocation set.

    Everything that does not depend on the parameters (blend terms, the
    frozen pressure derivatives) is computed once at construction.
    """

    def __init__(self, problem: DuctProblem, arch: Architecture, collocation, kind,
                 pressure: TrialField | None = None, anchor_weight: float = 0.0,
                 anchor_value: complex | None = None):
        self.problem = problem
        self.arch = arch
        self.kind = LossKind(kind)
        x = np.asarray(collocation, dtype=np.float64).reshape(-1)
        if x.size == 0:
            raise InputError("collocation set is empty")
        self.x = _check_domain(problem.L, x)
        want = 1 if self.kind is LossKind.NOFLOW else 2
        if arch.output_width != want:
            raise InputError(f"loss kind {self.kind.value} needs output_width={want}")
        self.anchor_weight = float(anchor_weight)
        self.anchor_value = anchor_value
        if self.kind is LossKind.VELOCITY:
            if pressure is None or pressure.kind is FieldKind.VELOCITY_FLOW:
                raise InputError("velocity loss needs a frozen pressure field")
            dpsi = pressure.evaluate(self.x)[1]
            self.dpsi_scaled = np.stack([dpsi.real, dpsi.imag], axis=1)
            if self.anchor_weight > 0.0:
                if anchor_value is None:
                    raise InputError("anchor_weight > 0 needs anchor_value")
                self.x_eval = np.append(self.x, 0.0)
            else:
                self.x_eval = self.x
        else:
            self.x_eval = self.x

    def __call__(self, theta):
        return self.evaluate(unflatten(self.arch, theta))

    def evaluate(self, params: MlpParams):
        # overflow is detected explicitly and raised as NumericError
        with np.errstate(over="ignore", invalid="ignore"):
            return self._evaluate(params)

    def _evaluate(self, params: MlpParams):
        tape = autodiff.forward(params, self.x_eval)
        n = self.x.size
        raw = tape.out[:, :n, :]
        p = self.problem
        k2 = p.k**2
        G = np.zeros_like(tape.out)

        if self.kind is LossKind.NOFLOW:
            T = blend_network(p, self.x, raw)
            r = T[2, :, 0] + k2 * T[0, :, 0]
            bad = _first_bad(r)
            if bad is not None:
                raise NumericError(f"non-finite residual at collocation point {bad}", bad)
            loss = float(np.dot(r, r) / n)
            res = (r,)
            dr = 2.0 * r / n
            H = np.zeros_like(T)
            H[0, :, 0] = k2 * dr
            H[2, :, 0] = dr
            G[:, :n, :] = blend_network_adjoint(p, self.x, H)

        elif self.kind is LossKind.FLOW:
            T = blend_network(p, self.x, raw)
            a = 1.0 - p.M**2
            b = 2.0 * p.M * p.k
            r_re = a * T[2, :, 0] + b * T[1, :, 1] + k2 * T[0, :, 0]
            r_im = a * T[2, :, 1] - b * T[1, :, 0] + k2 * T[0, :, 1]
            bad = _first_bad(r_re, r_im)
            if bad is not None:
                raise NumericError(f"non-finite residual at collocation point {bad}", bad)
            loss = float((np.dot(r_re, r_re) + np.dot(r_im, r_im)) / n)
            res = (r_re, r_im)
            d_re = 2.0 * r_re / n
            d_im = 2.0 * r_im / n
            H = np.empty_like(T)
            H[0, :, 0] = k2 * d_re
            H[1, :, 0] = -b * d_im
            H[2, :, 0] = a * d_re
            H[0, :, 1] = k2 * d_im
            H[1, :, 1] = b * d_re
            H[2, :, 1] = a * d_im
            G[:, :n, :] = blend_network_adjoint(p, self.x, H)

        else:
            # residuals multiplied by rho*c; the network output is rho*c*xi
            M, k = p.M, p.k
            u0, u1 = raw[0], raw[1]
            r_re = M * u1[:, 0] - k * u0[:, 1] + self.dpsi_scaled[:, 0]
            r_im = M * u1[:, 1] + k * u0[:, 0] + self.dpsi_scaled[:, 1]
            bad = _first_bad(r_re, r_im)
            if bad is not None:
                raise NumericError(f"non-finite residual at collocation point {bad}", bad)
            loss = float((np.dot(r_re, r_re) + np.dot(r_im, r_im)) / n)
            res = (r_re, r_im)
            d_re = 2.0 * r_re / n
            d_im = 2.0 * r_im / n
            G[1, :n, 0] = M * d_re
            G[0, :n, 1] = -k * d_re
            G[1, :n, 1] = M * d_im
            G[0, :n, 0] = k * d_im
            if self.anchor_weight > 0.0:
                target = p.rho_c * complex(self.anchor_value)
                e_re = tape.out[0, n, 0] - target.real
                e_im = tape.out[0, n, 1] - target.imag
                loss += self.anchor_weight * float(e_re**2 + e_im**2)
                G[0, n, 0] = 2.0 * self.anchor_weight * e_re
                G[0, n, 1] = 2.0 * self.anchor_weight * e_im

        if not np.isfinite(loss):
            idx = _overflow_index(*res)
            raise NumericError(f"loss overflows at collocation point {idx}", idx)
        return loss, autodiff.backward(tape, G)


def loss_and_gradient(problem: DuctProblem, params: MlpParams, collocation, loss_kind,
                      pressure: TrialField | None = None, anchor_weight: float = 0.0,
                      anchor_value: complex | None = None):
    """Loss of the chosen kind and its exact gradient in the flat layout."""
    obj = PinnLoss(problem, params.arch, collocation, loss_kind, pressure=pressure,
                   anchor_weight=anchor_weight, anchor_value=anchor_value)
    return obj.evaluate(params)
