"""Flat ``block.key = value`` run configuration files.

Example::

    # 500 Hz with mean flow
    problem.f = 500
    problem.M = 0.1
    problem.psi0 = 1+0j
    network.seed = 3
    training.max_iterations = 3000
    output.directory = runs/m01

Blank lines and ``#`` comments are ignored.  Every key must name a field of
the ``problem``, ``network``, ``training`` or ``output`` block of
:class:`~ductpinn.solver.RunConfig`.
"""
from __future__ import annotations

import dataclasses
from pathlib import Path

from .errors import InputError
from .solver import RunConfig

__all__ = ["parse_config", "load_config", "dump_config"]

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _coerce(block, key, raw: str, current):
    try:
        if key in ("psi0", "psiL"):
            v = complex(raw.replace(" ", "").replace("i", "j"))
            return v.real if v.imag == 0.0 else v
        if isinstance(current, bool):
            low = raw.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(raw)
        if isinstance(current, int):
            return int(raw)
        if isinstance(current, float):
            return float(raw)
        return raw
    except ValueError as exc:
        raise InputError(f"{block}.{key}: cannot parse {raw!r}") from exc


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    cfg = base or RunConfig()
    changes: dict[str, dict] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"line {lineno}: expected 'block.key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key.count(".") != 1:
            raise InputError(f"line {lineno}: key {key!r} must look like block.key")
        block, name = key.split(".")
        if block not in ("problem", "network", "training", "output"):
            raise InputError(f"line {lineno}: unknown block {block!r}")
        fields = {f.name for f in dataclasses.fields(getattr(cfg, block))}
        if name not in fields:
            raise InputError(f"line {lineno}: unknown key {key!r}")
        current = getattr(getattr(cfg, block), name)
        changes.setdefault(block, {})[name] = _coerce(block, name, raw.strip("\"'"), current)
    return cfg.replace(**changes)


def load_config(path, base: RunConfig | None = None) -> RunConfig:
    return parse_config(Path(path).read_text(), base)


def dump_config(cfg: RunConfig) -> str:
    lines = []
    for block in ("problem", "network", "training", "output"):
        for f in dataclasses.fields(getattr(cfg, block)):
            v = getattr(getattr(cfg, block), f.name)
            if isinstance(v, complex):
                v = f"{v.real!r}{v.imag:+}j"
            lines.append(f"{block}.{f.name} = {v}")
    return "\n".join(lines) + "\n"
