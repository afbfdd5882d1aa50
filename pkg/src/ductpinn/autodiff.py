"""Exact input derivatives and parameter gradients for a scalar-input tanh MLP.

Every layer carries the triple ``(u, du/dx, d2u/dx2)`` forward.  For
``a = tanh(z)`` with ``s = 1 - a**2``::

    a'  = s z'
    a'' = s z'' - 2 a s z'**2

Parameter gradients are obtained by reverse accumulation over this extended
forward graph, so any loss built from the three output channels can be
differentiated exactly.  Collocation points are processed as a batch; the
three channels are stacked along a leading axis of length 3.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, StructuralError
from .network import MlpParams, flatten

__all__ = ["DiffOutput", "Tape", "forward", "backward", "eval_with_input_derivatives"]


@dataclass(frozen=True)
class DiffOutput:
    """Network output and its first two x-derivatives, one entry per output neuron."""

    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


@dataclass
class Tape:
    """Intermediates kept by :func:`forward` for :func:`backward`."""

    params: MlpParams
    inputs: list  # stacked (3, N, fan_in) input triple of each layer
    hidden: list  # (tanh(z), 1 - tanh(z)**2, z', z'') of each hidden layer
    out: np.ndarray  # (3, N, output_width)


def _check(params: MlpParams):
    for i, ((o, n), W, b) in enumerate(zip(params.arch.shapes, params.weights, params.biases)):
        if W.shape != (o, n) or b.shape != (o,):
            raise StructuralError(f"layer {i + 1} has shape W{W.shape} b{b.shape}, expected W{(o, n)}")
    params.check_finite()


def forward(params: MlpParams, x) -> Tape:
    """Batched forward pass. ``tape.out[c, i, j]`` is channel ``c`` (0 value,
    1 first derivative, 2 second derivative) of output ``j`` at ``x[i]``."""
    _check(params)
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    n_pts = x.size
    A = np.empty((3, n_pts, 1))
    A[0, :, 0] = x
    A[1] = 1.0
    A[2] = 0.0
    inputs, hidden = [], []
    last = len(params.weights) - 1
    for li, (W, b) in enumerate(zip(params.weights, params.biases)):
        inputs.append(A)
        Z = (A.reshape(3 * n_pts, -1) @ W.T).reshape(3, n_pts, -1)
        Z[0] += b
        if li == last:
            return Tape(params, inputs, hidden, Z)
        t = np.tanh(Z[0])
        s = 1.0 - t * t
        z1, z2 = Z[1], Z[2]
        A = np.empty_like(Z)
        A[0] = t
        A[1] = s * z1
        A[2] = s * (z2 - 2.0 * t * z1 * z1)
        hidden.append((t, s, z1, z2))
    raise AssertionError("unreachable")


def backward(tape: Tape, grad_out) -> np.ndarray:
    """Flat parameter gradient given ``dL/d(out)`` of shape ``(3, N, output_width)``."""
    params = tape.params
    G = np.asarray(grad_out, dtype=np.float64)
    if G.shape != tape.out.shape:
        raise StructuralError(f"grad_out shape {G.shape} != output shape {tape.out.shape}")
    n_pts = G.shape[1]
    gW = [None] * len(params.weights)
    gb = [None] * len(params.weights)
    for li in range(len(params.weights) - 1, -1, -1):
        A = tape.inputs[li]
        W = params.weights[li]
        gW[li] = G.reshape(3 * n_pts, -1).T @ A.reshape(3 * n_pts, -1)
        gb[li] = G[0].sum(axis=0)
        if li == 0:
            break
        gA = (G.reshape(3 * n_pts, -1) @ W).reshape(3, n_pts, -1)
        t, s, z1, z2 = tape.hidden[li - 1]
        g0, g1, g2 = gA
        ts = t * s
        G = np.empty_like(gA)
        G[2] = g2 * s
        G[1] = g1 * s - 4.0 * ts * z1 * g2
        G[0] = (g0 * s
                - 2.0 * ts * z1 * g1
                - 2.0 * (ts * z2 + s * (1.0 - 3.0 * t * t) * z1 * z1) * g2)
    return flatten(MlpParams(params.arch, gW, gb))


def eval_with_input_derivatives(params: MlpParams, x) -> DiffOutput:
    """Value, d/dx and d2/dx2 of the network at a scalar ``x``."""
    x = float(x)
    if not np.isfinite(x):
        raise InputError(f"non-finite input x={x}")
    out = forward(params, np.array([x])).out[:, 0, :]
    return DiffOutput(out[0].copy(), out[1].copy(), out[2].copy())
