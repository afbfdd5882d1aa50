"""Training runs: configuration, pressure/velocity training and reports."""
from __future__ import annotations

import dataclasses
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .analysis import FieldProfile, error_report, impedance_profile, oracle_profile, relative_error
from .errors import InputError
from .losses import LossKind, PinnLoss
from .network import Architecture, flatten, he_init, unflatten
from .optimizer import LbfgsOptions, OptimResult, minimize
from .physics import DuctProblem, FieldKind, TrialField, make_collocation

__all__ = [
    "NetworkConfig",
    "TrainingConfig",
    "OutputConfig",
    "RunConfig",
    "SolveResult",
    "train_pressure",
    "train_velocity",
    "solve",
    "reduced_profile",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NetworkConfig:
    n_layers: int = 7
    hidden_width: int = 90
    seed: int = 0

    def __post_init__(self):
        Architecture(self.n_layers, self.hidden_width)
        if self.seed < 0:
            raise InputError("network.seed must be non-negative")


@dataclass(frozen=True)
class TrainingConfig:
    n_collocation: int = 10000
    max_iterations: int = 14000
    tolerance: float = 1e-5
    memory: int = 100
    wolfe_c1: float = 1e-4
    wolfe_c2: float = 0.9
    max_line_search_steps: int = 40
    velocity_anchor: float = 0.0
    train_velocity: bool = True

    def __post_init__(self):
        if self.n_collocation < 3:
            raise InputError("training.n_collocation must be >= 3")
        if self.velocity_anchor < 0:
            raise InputError("training.velocity_anchor must be non-negative")
        self.lbfgs()

    def lbfgs(self) -> LbfgsOptions:
        return LbfgsOptions(self.max_iterations, self.tolerance, self.memory,
                            self.wolfe_c1, self.wolfe_c2, self.max_line_search_steps)


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "runs"
    N_t: int = 500

    def __post_init__(self):
        if self.N_t < 2:
            raise InputError("output.N_t must be >= 2")


@dataclass(frozen=True)
class RunConfig:
    problem: DuctProblem = field(default_factory=DuctProblem)
    network: NetworkConfig = field(default_factory=NetworkConfig)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def replace(self, **blocks) -> "RunConfig":
        """``cfg.replace(problem={"f": 1000}, network={"seed": 3})``."""
        kw = {}
        for name, changes in blocks.items():
            kw[name] = dataclasses.replace(getattr(self, name), **changes)
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        out = {}
        for block in ("problem", "network", "training", "output"):
            for k, v in dataclasses.asdict(getattr(self, block)).items():
                if isinstance(v, complex):
                    v = {"re": v.real, "im": v.imag}
                out[f"{block}.{k}"] = v
        return out


def reduced_profile(config: RunConfig | None = None) -> RunConfig:
    """Small network/collocation budget used for quick checks."""
    config = config or RunConfig()
    return config.replace(network={"hidden_width": 32},
                          training={"n_collocation": 2000, "max_iterations": 3000})


def _progress(tag):
    t0 = time.perf_counter()

    def cb(it, loss, gnorm):
        if it % 500 == 0:
            log.info("%s iter %d loss %.6e |g|inf %.3e (%.1fs)", tag, it, loss, gnorm,
                     time.perf_counter() - t0)
    return cb


def train_pressure(problem: DuctProblem, config: RunConfig, collocation=None,
                   callback=None) -> tuple[TrialField, OptimResult]:
    """Fit the boundary-exact pressure field (one output if ``M == 0`` else two)."""
    flow = problem.M > 0.0 or not problem.real_boundary
    net = config.network
    arch = Architecture(net.n_layers, net.hidden_width, 2 if flow else 1)
    if collocation is None:
        collocation = make_collocation(problem.L, config.training.n_collocation, net.seed)
    kind = LossKind.FLOW if flow else LossKind.NOFLOW
    objective = PinnLoss(problem, arch, collocation, kind)
    res = minimize(objective, flatten(he_init(arch, net.seed)), config.training.lbfgs(),
                   callback=callback or _progress(f"pressure f={problem.f:g} M={problem.M:g}"))
    fkind = FieldKind.PRESSURE_FLOW if flow else FieldKind.PRESSURE_NOFLOW
    return TrialField(unflatten(arch, res.x), problem, fkind), res


def train_velocity(problem: DuctProblem, pressure: TrialField, config: RunConfig,
                   collocation=None, callback=None) -> tuple[TrialField, OptimResult]:
    """Fit the particle velocity against the frozen pressure via the momentum equation.

    The network is seeded with ``network.seed + 1``.  With
    ``training.velocity_anchor > 0`` the value at ``x = 0`` is pulled towards
    the closed-form velocity there.
    """
    net = config.network
    arch = Architecture(net.n_layers, net.hidden_width, 2)
    if collocation is None:
        collocation = make_collocation(problem.L, config.training.n_collocation, net.seed)
    anchor = config.training.velocity_anchor
    anchor_value = None
    if anchor > 0.0:
        mc = oracle.flow_constants(problem)
        anchor_value = (mc.A_c - mc.B_c) / problem.rho_c
    objective = PinnLoss(problem, arch, collocation, LossKind.VELOCITY, pressure=pressure,
                         anchor_weight=anchor, anchor_value=anchor_value)
    res = minimize(objective, flatten(he_init(arch, net.seed + 1)), config.training.lbfgs(),
                   callback=callback or _progress(f"velocity f={problem.f:g} M={problem.M:g}"))
    return TrialField(unflatten(arch, res.x), problem, FieldKind.VELOCITY_FLOW), res


@dataclass
class SolveResult:
    config: RunConfig
    pressure: TrialField
    velocity: TrialField | None
    pressure_result: OptimResult
    velocity_result: OptimResult | None
    profile: FieldProfile
    truth: FieldProfile | None
    wall_time: float

    def report(self) -> dict:
        """Flat, JSON-serialisable summary with stable key names."""
        rep = {
            "config": self.config.to_dict(),
            "seed": self.config.network.seed,
            "pressure.iterations": self.pressure_result.iterations,
            "pressure.final_loss": self.pressure_result.loss,
            "pressure.termination": self.pressure_result.termination.value,
            "velocity.iterations": None,
            "velocity.final_loss": None,
            "velocity.termination": None,
            "wall_time_s": self.wall_time,
        }
        if self.velocity_result is not None:
            rep["velocity.iterations"] = self.velocity_result.iterations
            rep["velocity.final_loss"] = self.velocity_result.loss
            rep["velocity.termination"] = self.velocity_result.termination.value
        rep.update(self.errors())
        return rep

    def errors(self) -> dict:
        out = {"error.delta_psi": None, "error.delta_mag": None, "error.delta_phase": None,
               "error.N_t": len(self.profile), "error.delta_xi": None,
               "error.delta_Z_re": None, "error.delta_Z_im": None}
        if self.truth is None:
            return out
        er = error_report(self.profile.psi, self.truth.psi)
        out.update({"error.delta_psi": er.delta_psi, "error.delta_mag": er.delta_mag,
                    "error.delta_phase": er.delta_phase})
        out["error.delta_xi"] = relative_error(self.profile.xi, self.truth.xi)
        both = self.profile.valid_Z & self.truth.valid_Z
        if both.any():
            pz, tz = self.profile.Z[both], self.truth.Z[both]
            if np.any(tz.real):
                out["error.delta_Z_re"] = relative_error(pz.real, tz.real)
            if np.any(tz.imag):
                out["error.delta_Z_im"] = relative_error(pz.imag, tz.imag)
        return out


def solve(config: RunConfig, callback=None) -> SolveResult:
    """Train the pressure network and, with mean flow, the velocity network."""
    problem = config.problem
    if config.output.N_t < 2:
        raise InputError("output.N_t must be >= 2")
    t0 = time.perf_counter()
    colloc = make_collocation(problem.L, config.training.n_collocation, config.network.seed)
    pfield, pres = train_pressure(problem, config, colloc, callback)
    vfield, vres = None, None
    if problem.M > 0.0 and config.training.train_velocity:
        vfield, vres = train_velocity(problem, pfield, config, colloc, callback)
    if problem.M > 0.0 and vfield is None:
        x = np.linspace(0.0, problem.L, config.output.N_t)
        psi = pfield(x)
        profile = FieldProfile.from_fields(x, psi, np.full_like(psi, np.nan))
    else:
        profile = impedance_profile(pfield, vfield, problem, config.output.N_t)
    wall = time.perf_counter() - t0
    try:
        truth = oracle_profile(problem, config.output.N_t)
    except ArithmeticError:
        log.warning("no closed-form reference for this configuration")
        truth = None
    return SolveResult(config, pfield, vfield, pres, vres, profile, truth, wall)
