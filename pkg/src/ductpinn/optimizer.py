"""Limited-memory BFGS with a strong-Wolfe line search.

The search direction comes from the standard two-loop recursion with the
initial Hessian scaled by ``s.y / y.y`` of the newest curvature pair.  On the
first iteration (and after a memory reset) the steepest-descent direction is
normalised to unit length so that the unit trial step is meaningful for any
loss scale.  The line search is the bracketing/zoom scheme of Nocedal and
Wright with safeguarded cubic interpolation, starting from step 1.

Termination: ``max|grad| < tolerance``, or a loss decrease smaller than
``tolerance**2`` between consecutive iterations, or the iteration budget.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import InputError, NumericError

__all__ = ["LbfgsOptions", "OptimResult", "Termination", "minimize"]

log = logging.getLogger(__name__)


class Termination(str, Enum):
    TOLERANCE_MET = "tolerance_met"
    MAX_ITERATIONS = "max_iterations"
    LINE_SEARCH_FAILED = "line_search_failed"


@dataclass(frozen=True)
class LbfgsOptions:
    max_iterations: int = 14000
    tolerance: float = 1e-5
    memory: int = 10
    wolfe_c1: float = 1e-4
    wolfe_c2: float = 0.9
    max_line_search_steps: int = 40

    def __post_init__(self):
        if not 0.0 < self.wolfe_c1 < self.wolfe_c2 < 1.0:
            raise InputError("need 0 < wolfe_c1 < wolfe_c2 < 1")
        if self.memory < 1:
            raise InputError("memory must be >= 1")
        if not self.tolerance > 0.0:
            raise InputError("tolerance must be positive")
        if self.max_iterations < 0 or self.max_line_search_steps < 1:
            raise InputError("iteration budgets must be non-negative")


@dataclass
class OptimResult:
    x: np.ndarray
    loss: float
    iterations: int
    termination: Termination
    loss_history: list = field(default_factory=list)
    n_evaluations: int = 0
    grad_inf_norm: float = float("nan")


def _cubic_min(a, fa, da, b, fb, db):
    """Minimizer of the cubic interpolating (a, fa, da) and (b, fb, db), or None."""
    d1 = da + db - 3.0 * (fa - fb) / (a - b)
    disc = d1 * d1 - da * db
    if disc < 0.0:
        return None
    d2 = np.copysign(np.sqrt(disc), b - a)
    denom = db - da + 2.0 * d2
    if denom == 0.0:
        return None
    t = b - (b - a) * (db + d2 - d1) / denom
    return t if np.isfinite(t) else None


class _LineSearch:
    def __init__(self, fun, x, d, f0, g0, opts: LbfgsOptions):
        self.fun, self.x, self.d = fun, x, d
        self.f0, self.dphi0 = f0, float(g0 @ d)
        self.c1, self.c2 = opts.wolfe_c1, opts.wolfe_c2
        self.budget = opts.max_line_search_steps
        self.evals = 0
        self.best = None  # (f, step, g) of the lowest value seen
        self.blowup = None  # last NumericError raised by the objective

    def phi(self, a):
        self.evals += 1
        try:
            f, g = self.fun(self.x + a * self.d)
            f = float(f)
        except NumericError as exc:
            # treat as an infinitely bad trial step so the search backtracks
            self.blowup = exc
            return np.inf, None, np.nan
        if np.isfinite(f) and (self.best is None or f < self.best[0]):
            self.best = (f, a, g)
        return f, g, float(g @ self.d) if np.isfinite(f) else np.nan

    def armijo_fails(self, a, f):
        return not np.isfinite(f) or f > self.f0 + self.c1 * a * self.dphi0

    def curvature_ok(self, dphi):
        return abs(dphi) <= -self.c2 * self.dphi0

    def run(self, a1=1.0):
        a_prev, f_prev, dp_prev = 0.0, self.f0, self.dphi0
        a = a1
        first = True
        while self.evals < self.budget:
            f, g, dp = self.phi(a)
            if self.armijo_fails(a, f) or (not first and f >= f_prev):
                return self.zoom(a_prev, f_prev, dp_prev, a, f, dp)
            if self.curvature_ok(dp):
                return a, f, g
            if dp >= 0.0:
                return self.zoom(a, f, dp, a_prev, f_prev, dp_prev)
            t = _cubic_min(a_prev, f_prev, dp_prev, a, f, dp)
            a_next = 2.0 * a if t is None else min(max(t, 1.1 * a), 10.0 * a)
            a_prev, f_prev, dp_prev = a, f, dp
            a = a_next
            first = False
        return None

    def zoom(self, lo, f_lo, d_lo, hi, f_hi, d_hi):
        while self.evals < self.budget:
            width = hi - lo
            t = None
            if np.isfinite(f_hi) and np.isfinite(d_hi):
                t = _cubic_min(lo, f_lo, d_lo, hi, f_hi, d_hi)
            if t is None or not (min(lo, hi) + 0.1 * abs(width) <= t <= max(lo, hi) - 0.1 * abs(width)):
                # quadratic through f_lo, d_lo, f_hi; else bisection
                q = None
                if np.isfinite(f_hi):
                    denom = 2.0 * (f_hi - f_lo - d_lo * width)
                    if denom > 0.0:
                        q = lo - d_lo * width * width / denom
                if q is not None and min(lo, hi) + 0.01 * abs(width) <= q <= max(lo, hi) - 0.01 * abs(width):
                    t = q
                else:
                    t = lo + 0.5 * width
            f, g, dp = self.phi(t)
            if self.armijo_fails(t, f) or f >= f_lo:
                hi, f_hi, d_hi = t, f, dp
            else:
                if self.curvature_ok(dp):
                    return t, f, g
                if dp * (hi - lo) >= 0.0:
                    hi, f_hi, d_hi = lo, f_lo, d_lo
                lo, f_lo, d_lo = t, f, dp
            if abs(hi - lo) <= 1e-16 * max(1.0, abs(lo)):
                break
        return None


def _two_loop(g, S, Y, rhos):
    q = g.copy()
    alphas = []
    for s, y, r in zip(reversed(S), reversed(Y), reversed(rhos)):
        a = r * (s @ q)
        alphas.append(a)
        q -= a * y
    s, y = S[-1], Y[-1]
    q *= (s @ y) / (y @ y)
    for (s, y, r), a in zip(zip(S, Y, rhos), reversed(alphas)):
        b = r * (y @ q)
        q += (a - b) * s
    return -q


def minimize(objective: Callable, x0, opts: LbfgsOptions | None = None,
             callback: Callable | None = None) -> OptimResult:
    """Minimize ``objective(x) -> (loss, grad)`` starting from ``x0``.

    ``callback(iteration, loss, grad_inf_norm)`` is called after every
    accepted step; returning ``True`` stops the run.
    """
    opts = opts or LbfgsOptions()
    x = np.array(x0, dtype=np.float64).reshape(-1)
    f, g = objective(x)
    f = float(f)
    g = np.asarray(g, dtype=np.float64)
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        raise InputError("objective is not finite at the starting point")
    S, Y, rhos = deque(maxlen=opts.memory), deque(maxlen=opts.memory), deque(maxlen=opts.memory)
    history = [f]
    n_eval = 1
    termination = Termination.MAX_ITERATIONS
    it = 0
    gnorm = float(np.max(np.abs(g))) if g.size else 0.0
    while True:
        if gnorm < opts.tolerance:
            termination = Termination.TOLERANCE_MET
            break
        if it >= opts.max_iterations:
            break
        if S:
            d = _two_loop(g, S, Y, rhos)
            if not (g @ d < 0.0):
                S.clear(); Y.clear(); rhos.clear()
        if not S:
            d = -g / np.linalg.norm(g)
        ls = _LineSearch(objective, x, d, f, g, opts)
        found = ls.run(1.0)
        n_eval += ls.evals
        if found is None:
            if ls.best is not None and ls.best[0] < f:
                a, f_new, g_new = ls.best[1], ls.best[0], np.asarray(ls.best[2], dtype=np.float64)
                x = x + a * d
                f, g = f_new, g_new
                history.append(f)
                it += 1
            if ls.best is None and ls.blowup is not None:
                raise NumericError(f"objective blew up at iteration {it}: {ls.blowup}",
                                   index=ls.blowup.index, iteration=it) from ls.blowup
            termination = Termination.LINE_SEARCH_FAILED
            log.debug("line search failed at iteration %d", it)
            break
        a, f_new, g_new = found
        g_new = np.asarray(g_new, dtype=np.float64)
        s = a * d
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-12 * float(y @ y) and sy > 0.0:
            S.append(s); Y.append(y); rhos.append(1.0 / sy)
        decrease = f - f_new
        x = x + s
        f, g = f_new, g_new
        history.append(f)
        it += 1
        gnorm = float(np.max(np.abs(g)))
        if callback is not None and callback(it, f, gnorm):
            break
        if decrease < opts.tolerance**2:
            termination = Termination.TOLERANCE_MET
            break
    return OptimResult(x=x, loss=f, iterations=it, termination=termination,
                       loss_history=history, n_evaluations=n_eval,
                       grad_inf_norm=float(np.max(np.abs(g))) if g.size else 0.0)
