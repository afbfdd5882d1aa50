"""Self-check suite run by ``ductpinn validate``.

Each check returns a :class:`CheckResult`; :func:`run_validation` runs them
all.  ``faults`` injects known defects to confirm the checks can fail.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import oracle
from .losses import PinnLoss
from .network import Architecture, flatten, he_init, unflatten
from .optimizer import LbfgsOptions, minimize
from .physics import (
    DuctProblem,
    TrialField,
    make_collocation,
    residual_flow,
    residual_noflow,
    residual_velocity,
)

__all__ = ["CheckResult", "run_validation", "CHECKS", "FAULTS"]

FAULTS = ("he_variance",)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))


def _random_params(arch, seed, scale=0.2):
    theta = flatten(he_init(arch, seed))
    theta = theta + scale * np.random.default_rng(seed + 1000).standard_normal(theta.size)
    return unflatten(arch, theta)


def check_gradients(n_seeds=20, faults=()):
    worst = 0.0
    for kind, seed in itertools.product(("noflow", "flow", "velocity"), range(n_seeds)):
        rng = np.random.default_rng(seed)
        M = 0.0 if kind == "noflow" else float(rng.uniform(0.05, 0.4))
        prob = DuctProblem(f=float(rng.uniform(100, 400)), M=M)
        arch = Architecture(4, 6, 1 if kind == "noflow" else 2)
        pressure = None
        if kind == "velocity":
            pressure = TrialField(_random_params(Architecture(3, 5, 2), seed + 7), prob, "pressure_flow")
        obj = PinnLoss(prob, arch, make_collocation(1.0, 16, seed), kind, pressure=pressure)
        theta = flatten(_random_params(arch, seed))
        _, g = obj(theta)
        h = 1e-6
        fd = np.empty_like(theta)
        for i in range(theta.size):
            e = np.zeros_like(theta)
            e[i] = h
            fd[i] = (obj(theta + e)[0] - obj(theta - e)[0]) / (2 * h)
        worst = max(worst, float(np.linalg.norm(g - fd) / np.linalg.norm(fd)))
    return CheckResult("gradient_vs_finite_differences", worst < 1e-4,
                       f"worst relative error {worst:.2e} over {3 * n_seeds} networks (limit 1e-4)")


def check_boundary_exactness(n=100, faults=()):
    rng = np.random.default_rng(0)
    worst = 0.0
    for seed in range(n):
        flow = bool(seed % 2)
        psi0 = complex(*rng.uniform(-2, 2, 2)) if flow else float(rng.uniform(-2, 2))
        psiL = complex(*rng.uniform(-2, 2, 2)) if flow else float(rng.uniform(-2, 2))
        prob = DuctProblem(f=float(rng.uniform(100, 2000)), M=0.2 if flow else 0.0,
                           L=float(rng.uniform(0.2, 3.0)), psi0=psi0, psiL=psiL)
        arch = Architecture(4, 6, 2 if flow else 1)
        field = TrialField(_random_params(arch, seed, 1.0), prob,
                           "pressure_flow" if flow else "pressure_noflow")
        v = field([0.0, prob.L])
        worst = max(worst, abs(v[0] - psi0) / max(1, abs(psi0)), abs(v[1] - psiL) / max(1, abs(psiL)))
    return CheckResult("trial_boundary_exactness", worst <= 4 * np.finfo(float).eps,
                       f"worst boundary mismatch {worst:.1e} over {n} networks")


def check_oracle_annihilation(faults=()):
    x = np.random.default_rng(1).uniform(0, 1, 100)
    worst = 0.0
    for f in (500.0, 1000.0, 1500.0, 2000.0):
        prob = DuctProblem(f=f)
        psi, _, d2 = oracle.pressure_noflow_derivatives(prob, x)
        worst = max(worst, np.max(np.abs(residual_noflow(prob, psi, d2))) / (prob.k**2 * np.max(np.abs(psi))))
        for M in (0.1, 0.2, 0.3):
            prob = DuctProblem(f=f, M=M)
            psi, d1, d2 = oracle.pressure_flow_derivatives(prob, x)
            scale = prob.k**2 * np.max(np.abs(psi))
            worst = max(worst, *(np.max(np.abs(r)) / scale for r in residual_flow(prob, psi, d1, d2)))
            xi, dxi = oracle.velocity_flow_derivatives(prob, x)
            scale = np.max(np.abs(d1)) / prob.rho_c
            worst = max(worst, *(np.max(np.abs(r)) / scale for r in residual_velocity(prob, d1, xi, dxi)))
    return CheckResult("oracle_annihilates_residuals", worst < 1e-8, f"worst relative residual {worst:.1e}")


def check_re_z0(faults=()):
    worst = 0.0
    for f, M in itertools.product((300.0, 450.0, 700.0, 1100.0, 1700.0), (0.05, 0.12, 0.21, 0.33)):
        prob = DuctProblem(f=f, M=M)
        direct = oracle.impedance(prob, np.array([0.0]), node_threshold=0.0)[0].real
        worst = max(worst, abs(oracle.re_z0_closed_form(prob) - direct) / abs(direct))
    return CheckResult("closed_form_re_z0", worst < 1e-10, f"worst relative difference {worst:.1e} on 20 (f, M)")


def check_lbfgs(faults=()):
    from scipy.optimize import rosen, rosen_der

    res = minimize(lambda x: (float(rosen(x)), rosen_der(x)), np.array([-1.2, 1.0]),
                   LbfgsOptions(tolerance=1e-10))
    mono = bool(np.all(np.diff(res.loss_history) <= 0))
    ok_rosen = res.iterations < 200 and np.max(np.abs(res.x - 1.0)) < 1e-6
    a = np.arange(5.0)
    q = minimize(lambda x: (float(np.sum((x - a) ** 2)), 2 * (x - a)), np.zeros(5))
    ok_quad = q.iterations <= 3 and np.max(np.abs(q.x - a)) < 1e-5
    return CheckResult("lbfgs_descent_and_convergence", mono and ok_rosen and ok_quad,
                       f"monotone={mono} rosenbrock_iters={res.iterations} quadratic_iters={q.iterations}")


def check_he_variance(faults=()):
    gain = 2.5 if "he_variance" in faults else 2.0
    arch = Architecture(25002, 2, 2)
    p = he_init(arch, 7, gain=gain)
    w = np.concatenate([W.ravel() for W in p.weights[1:]])
    ratio = float(w.var() / 1.0)
    mean_ok = abs(w.mean()) < 3.0 / np.sqrt(w.size)
    return CheckResult("he_init_variance", abs(ratio - 1.0) < 0.02 and mean_ok,
                       f"variance/expected = {ratio:.4f} over {w.size} weights (fan_in 2)")


def check_critical_mach(faults=()):
    roots = oracle.critical_mach(500.0, 340.0, M_range=(0.1, 0.3))
    ok = len(roots) == 1 and abs(roots[0][1] - 0.14) <= 0.005
    return CheckResult("critical_mach_500hz", ok, f"roots in [0.1, 0.3]: {[(m, round(M, 5)) for m, M in roots]}")


def check_reproducibility(faults=()):
    prob = DuctProblem(f=500.0, M=0.1)
    arch = Architecture(4, 8, 2)
    x = make_collocation(1.0, 64, 0)
    runs = []
    for _ in range(2):
        obj = PinnLoss(prob, arch, x, "flow")
        runs.append(minimize(obj, flatten(he_init(arch, 0)), LbfgsOptions(max_iterations=25)).x)
    same = runs[0].tobytes() == runs[1].tobytes()
    return CheckResult("bitwise_reproducibility", same, "two seeded runs identical" if same else "runs differ")


CHECKS = (
    check_gradients,
    check_boundary_exactness,
    check_oracle_annihilation,
    check_re_z0,
    check_lbfgs,
    check_he_variance,
    check_critical_mach,
    check_reproducibility,
)


def run_validation(faults=()) -> list[CheckResult]:
    unknown = set(faults) - set(FAULTS)
    if unknown:
        raise ValueError(f"unknown faults {sorted(unknown)}; choose from {FAULTS}")
    return [check(faults=faults) for check in CHECKS]
