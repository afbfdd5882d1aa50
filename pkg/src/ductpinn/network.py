"""Feed-forward tanh network: architecture, He initialization, flat layout.

Flat parameter layout (used by gradients, the optimizer and checkpoints) is
layer-major: for layer 1 .. n_layers-1, the weight matrix ``W`` of shape
``(fan_out, fan_in)`` in row-major order, followed by its bias ``b``.

Initialization draws from ``numpy.random.Generator(PCG64(seed))`` using
``standard_normal`` (numpy's ziggurat transform), layer by layer, each
weight matrix filled row-major. Biases start at zero.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, StructuralError

__all__ = [
    "Architecture",
    "MlpParams",
    "he_init",
    "flatten",
    "unflatten",
    "save_checkpoint",
    "load_checkpoint",
]


@dataclass(frozen=True)
class Architecture:
    """Network shape.

    ``n_layers`` counts the input and output layers, so ``n_layers=7`` means
    five hidden layers of ``hidden_width`` neurons each.
    """

    n_layers: int = 7
    hidden_width: int = 90
    output_width: int = 1

    def __post_init__(self):
        if self.n_layers < 3:
            raise StructuralError(f"n_layers must be >= 3, got {self.n_layers}")
        if self.hidden_width < 1:
            raise StructuralError(f"hidden_width must be >= 1, got {self.hidden_width}")
        if self.output_width not in (1, 2):
            raise StructuralError(f"output_width must be 1 or 2, got {self.output_width}")

    @property
    def layer_sizes(self) -> list[int]:
        return [1] + [self.hidden_width] * (self.n_layers - 2) + [self.output_width]

    @property
    def shapes(self) -> list[tuple[int, int]]:
        """``(fan_out, fan_in)`` for every weight layer."""
        s = self.layer_sizes
        return [(s[i + 1], s[i]) for i in range(len(s) - 1)]

    @property
    def n_params(self) -> int:
        return sum(o * i + o for o, i in self.shapes)


@dataclass
class MlpParams:
    arch: Architecture
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self):
        shapes = self.arch.shapes
        if len(self.weights) != len(shapes) or len(self.biases) != len(shapes):
            raise StructuralError(
                f"expected {len(shapes)} layers, got {len(self.weights)} weights "
                f"and {len(self.biases)} biases"
            )
        for i, ((o, n), W, b) in enumerate(zip(shapes, self.weights, self.biases)):
            if np.shape(W) != (o, n) or np.shape(b) != (o,):
                raise StructuralError(
                    f"layer {i + 1}: expected W{(o, n)} b({o},), "
                    f"got W{np.shape(W)} b{np.shape(b)}"
                )

    def check_finite(self):
        for i, (W, b) in enumerate(zip(self.weights, self.biases)):
            if not (np.all(np.isfinite(W)) and np.all(np.isfinite(b))):
                raise InputError(f"non-finite parameter in layer {i + 1}")

    def copy(self) -> "MlpParams":
        return MlpParams(self.arch, [W.copy() for W in self.weights], [b.copy() for b in self.biases])


def he_init(arch: Architecture, seed: int, gain: float = 2.0) -> MlpParams:
    """He-normal weights ``sqrt(gain / fan_in) * N(0, 1)`` and zero biases.

    ``gain`` is 2 for He initialization; other values exist only to inject
    faults into the validation suite.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    weights, biases = [], []
    for fan_out, fan_in in arch.shapes:
        weights.append(np.sqrt(gain / fan_in) * rng.standard_normal((fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpParams(arch, weights, biases)


def flatten(params: MlpParams) -> np.ndarray:
    parts = []
    for W, b in zip(params.weights, params.biases):
        parts.append(np.asarray(W, dtype=np.float64).ravel())
        parts.append(np.asarray(b, dtype=np.float64))
    return np.concatenate(parts)


def unflatten(arch: Architecture, theta) -> MlpParams:
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 1 or theta.size != arch.n_params:
        raise StructuralError(
            f"parameter vector of length {theta.size} does not match "
            f"architecture with {arch.n_params} parameters"
        )
    weights, biases = [], []
    pos = 0
    for o, n in arch.shapes:
        weights.append(theta[pos:pos + o * n].reshape(o, n).copy())
        pos += o * n
        biases.append(theta[pos:pos + o].copy())
        pos += o
    return MlpParams(arch, weights, biases)


def save_checkpoint(path, params: MlpParams, seed: int | None = None, **meta) -> Path:
    """Write ``.npz`` with a JSON header (architecture, seed) and the flat vector."""
    path = Path(path)
    header = {
        "n_layers": params.arch.n_layers,
        "hidden_width": params.arch.hidden_width,
        "output_width": params.arch.output_width,
        "seed": seed,
        "layout": "layer-major; W row-major (fan_out, fan_in) then b",
        **meta,
    }
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        np.savez(fh, header=np.array(json.dumps(header, sort_keys=True)), theta=flatten(params))
    tmp.replace(path)
    return path


def load_checkpoint(path) -> tuple[MlpParams, dict]:
    with np.load(path, allow_pickle=False) as data:
        header = json.loads(str(data["header"]))
        theta = data["theta"]
    arch = Architecture(header["n_layers"], header["hidden_width"], header["output_width"])
    return unflatten(arch, theta), header
