import numpy as np
import pytest
from scipy.optimize import rosen, rosen_der

from ductpinn import InputError, LbfgsOptions, NumericError, Termination, minimize


def quadratic(a):
    return lambda x: (float(np.sum((x - a) ** 2)), 2 * (x - a))


def rosenbrock(x):
    return float(rosen(x)), rosen_der(x)


def test_options_validation():
    for bad in (dict(wolfe_c1=0.9, wolfe_c2=0.1), dict(memory=0), dict(tolerance=0.0)):
        with pytest.raises(InputError):
            LbfgsOptions(**bad)
    assert LbfgsOptions().max_iterations == 14000 and LbfgsOptions().memory == 10


@pytest.mark.parametrize("seed", range(5))
def test_sphere_converges_in_three_iterations(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(6)
    res = minimize(quadratic(a), 10 * rng.standard_normal(6))
    assert res.termination is Termination.TOLERANCE_MET
    assert res.iterations <= 3
    assert np.max(np.abs(2 * (res.x - a))) < 1e-5


def test_rosenbrock():
    res = minimize(rosenbrock, np.array([-1.2, 1.0]), LbfgsOptions(tolerance=1e-10))
    assert res.iterations < 200
    np.testing.assert_allclose(res.x, [1.0, 1.0], atol=1e-6)


@pytest.mark.parametrize("dim", [5, 20])
def test_convex_quadratic_full_memory(dim):
    # near-exact line search: full-memory L-BFGS then behaves like conjugate gradients
    rng = np.random.default_rng(dim)
    Q = rng.standard_normal((dim, dim))
    A = Q @ Q.T + dim * np.eye(dim)
    b = rng.standard_normal(dim)

    def obj(x):
        return float(0.5 * x @ A @ x - b @ x), A @ x - b

    res = minimize(obj, np.zeros(dim), LbfgsOptions(memory=dim, tolerance=1e-8, wolfe_c1=1e-5, wolfe_c2=1e-3))
    assert res.iterations <= dim + 1
    np.testing.assert_allclose(res.x, np.linalg.solve(A, b), atol=1e-7)


@pytest.mark.parametrize("obj,x0", [(rosenbrock, [-1.2, 1.0]), (rosenbrock, [2.0, -1.5, 0.3, 1.1]),
                                    (quadratic(np.arange(4.0)), np.zeros(4))])
def test_monotone_descent(obj, x0):
    res = minimize(obj, np.array(x0, float), LbfgsOptions(tolerance=1e-9))
    h = np.array(res.loss_history)
    assert np.all(np.diff(h) <= 0)
    assert res.loss <= h[0]


def test_constant_shift_invariance():
    shifted = lambda x: (rosenbrock(x)[0] + 1.0, rosenbrock(x)[1])
    a = minimize(rosenbrock, np.array([-1.2, 1.0]), LbfgsOptions(tolerance=1e-8))
    b = minimize(shifted, np.array([-1.2, 1.0]), LbfgsOptions(tolerance=1e-8))
    assert a.iterations == b.iterations
    np.testing.assert_allclose(a.x, b.x, rtol=1e-8, atol=1e-10)


def test_nan_at_start():
    calls = []

    def obj(x):
        calls.append(1)
        return float("nan"), np.zeros_like(x)

    with pytest.raises(InputError):
        minimize(obj, np.zeros(3))
    assert len(calls) == 1


def test_iteration_cap_and_callback():
    seen = []
    res = minimize(rosenbrock, np.array([-1.2, 1.0]), LbfgsOptions(max_iterations=5),
                   callback=lambda it, f, g: seen.append(it))
    assert res.iterations == 5 and res.termination is Termination.MAX_ITERATIONS
    assert seen == [1, 2, 3, 4, 5]
    assert len(res.loss_history) == 6


def test_line_search_failure_returns_best_iterate():
    # gradient lies about the slope: no step can satisfy the Wolfe conditions
    def obj(x):
        return float(np.sum(x**2)), -2 * x

    res = minimize(obj, np.ones(3), LbfgsOptions(max_line_search_steps=5))
    assert res.termination is Termination.LINE_SEARCH_FAILED
    assert res.loss <= 3.0


def test_agrees_with_scipy_lbfgs_on_extended_rosenbrock():
    from scipy.optimize import minimize as sp_min
    x0 = np.array([-1.2, 1.0] * 5)
    ours = minimize(rosenbrock, x0, LbfgsOptions(tolerance=1e-9))
    ref = sp_min(rosen, x0, jac=rosen_der, method="L-BFGS-B", options=dict(gtol=1e-10, ftol=0))
    np.testing.assert_allclose(ours.x, ref.x, atol=1e-6)


def test_nonfinite_trial_step_backtracks():
    # objective undefined beyond |x| > 2: the first unit step overshoots into it
    def obj(x):
        if np.max(np.abs(x)) > 2.0:
            raise NumericError("outside domain", index=0)
        return float(np.sum((x - 1.5) ** 2)), 2 * (x - 1.5)

    res = minimize(obj, np.array([-1.9]), LbfgsOptions(tolerance=1e-10))
    assert res.termination is Termination.TOLERANCE_MET
    assert res.x[0] == pytest.approx(1.5, abs=1e-8)


def test_blowup_everywhere_reports_iteration():
    calls = {"n": 0}

    def obj(x):
        calls["n"] += 1
        if calls["n"] > 1:
            raise NumericError("overflow", index=5)
        return 1.0, np.ones_like(x)

    with pytest.raises(NumericError) as exc:
        minimize(obj, np.zeros(3))
    assert exc.value.iteration == 0 and exc.value.index == 5
