import math
import random

import pytest

from simpvex.errors import BudgetExhausted, NonFiniteIntegrand, QuadratureError
from simpvex.kernel import BREAKPOINTS, eval_m
from simpvex.quadrature import (
    DEFAULT_ABS_TOL,
    DEFAULT_MAX_EVALS,
    QuadratureResult,
    integrate,
    integrate_with_breakpoints,
)


def test_cubics_are_exact_up_to_rounding():
    rng = random.Random(20817)
    for _ in range(50):
        c = [rng.uniform(-2.0, 2.0) for _ in range(4)]
        lo = rng.uniform(-3.0, 0.0)
        hi = lo + rng.uniform(0.1, 3.0)
        g = lambda x: ((c[3] * x + c[2]) * x + c[1]) * x + c[0]
        exact = sum(c[k] * (hi ** (k + 1) - lo ** (k + 1)) / (k + 1) for k in range(4))
        qr = integrate(g, lo, hi, 1e-12)
        assert abs(qr.value - exact) <= 1e-12


def test_golden_integrals():
    assert integrate(math.exp, 0.0, 1.0).value == pytest.approx(math.e - 1.0, abs=1e-10)
    assert integrate(math.sin, 0.0, math.pi).value == pytest.approx(2.0, abs=1e-10)
    assert integrate(lambda x: 1.0 / (1.0 + x * x), 0.0, 1.0).value == pytest.approx(
        math.pi / 4.0, abs=1e-10)


def test_error_estimate_bounded_by_tolerance():
    for tol in (1e-5, 1e-8, 1e-11):
        qr = integrate(math.exp, 0.0, 1.0, tol)
        assert qr.error_estimate <= tol
        assert abs(qr.value - (math.e - 1.0)) <= 10.0 * tol


def test_tighter_tolerance_costs_more_and_converges():
    loose = integrate(math.exp, 0.0, 1.0, 1e-6)
    tight = integrate(math.exp, 0.0, 1.0, 1e-12)
    assert tight.evaluations > loose.evaluations
    assert abs(tight.value - (math.e - 1.0)) < abs(loose.value - (math.e - 1.0)) + 1e-12


def test_results_are_deterministic():
    a = integrate(lambda x: math.sin(3.0 * x) * math.exp(x), 0.0, 2.0, 1e-11)
    b = integrate(lambda x: math.sin(3.0 * x) * math.exp(x), 0.0, 2.0, 1e-11)
    assert a == b


def test_degenerate_interval():
    assert integrate(math.exp, 2.0, 2.0) == QuadratureResult(0.0, 0.0, 0)
    assert integrate_with_breakpoints(math.exp, 2.0, 2.0, []) == QuadratureResult(0.0, 0.0, 0)


def test_interval_validation():
    with pytest.raises(ValueError):
        integrate(math.exp, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate(math.exp, 0.0, math.inf)
    with pytest.raises(ValueError):
        integrate(math.exp, 0.0, 1.0, abs_tol=0.0)


def test_breakpoint_validation():
    with pytest.raises(ValueError):
        integrate_with_breakpoints(math.exp, 0.0, 1.0, [0.0])
    with pytest.raises(ValueError):
        integrate_with_breakpoints(math.exp, 0.0, 1.0, [0.7, 0.3])
    with pytest.raises(ValueError):
        integrate_with_breakpoints(math.exp, 0.0, 1.0, [1.5])
    with pytest.raises(ValueError):
        integrate_with_breakpoints(math.exp, 1.0, 1.0, [1.0])


def test_kinked_integrand_with_and_without_breakpoint():
    g = lambda t: abs(t - 0.3)
    want = 0.5 * (0.3 ** 2 + 0.7 ** 2)
    plain = integrate(g, 0.0, 1.0, 1e-11)
    split = integrate_with_breakpoints(g, 0.0, 1.0, [0.3], 1e-11)
    assert plain.value == pytest.approx(want, abs=1e-10)
    assert split.value == pytest.approx(want, abs=1e-10)
    # the declared kink spares the adaptive refinement around it
    assert split.evaluations < plain.evaluations


def test_half_moment_value():
    qr = integrate_with_breakpoints(
        lambda t: abs(t - 1.0 / 6.0), 0.0, 0.5, [1.0 / 6.0], 1e-11)
    assert qr.value == pytest.approx(5.0 / 72.0, abs=1e-12)


def test_abs_kernel_integral():
    qr = integrate_with_breakpoints(
        lambda t: abs(eval_m(t)), 0.0, 1.0, BREAKPOINTS, 1e-12)
    assert qr.value == pytest.approx(5.0 / 36.0, abs=1e-11)


def test_signed_kernel_halves_cancel():
    left = integrate(lambda t: t - 1.0 / 6.0, 0.0, 0.5, 1e-13)
    right = integrate(lambda t: t - 5.0 / 6.0, 0.5, 1.0, 1e-13)
    assert left.value == pytest.approx(1.0 / 24.0, abs=1e-14)
    assert right.value == pytest.approx(-1.0 / 24.0, abs=1e-14)
    assert left.value + right.value == pytest.approx(0.0, abs=1e-14)


def test_budget_exhaustion():
    with pytest.raises(BudgetExhausted) as info:
        integrate(math.exp, 0.0, 1.0, 1e-11, max_evals=4)
    assert info.value.evaluations == 4


def test_budget_respected_on_success():
    qr = integrate(math.exp, 0.0, 1.0, 1e-11, max_evals=DEFAULT_MAX_EVALS)
    assert qr.evaluations <= DEFAULT_MAX_EVALS
    assert qr.evaluations >= 5


def test_non_finite_integrand_reports_abscissa():
    def g(x):
        return float("nan") if x > 0.7 else 1.0
    with pytest.raises(NonFiniteIntegrand) as info:
        integrate(g, 0.0, 1.0)
    assert info.value.abscissa > 0.7
    assert math.isnan(info.value.value)


def test_endpoint_jump_is_unreachable():
    # eval_m takes the right-branch value at exactly 1/2, so integrating
    # the left piece up to 1/2 exposes an endpoint discontinuity
    with pytest.raises(QuadratureError) as info:
        integrate(eval_m, 1.0 / 6.0, 0.5, 1e-11)
    assert "tolerance unreachable" in str(info.value)


def test_interior_jump_is_unreachable():
    step = lambda x: 0.0 if x < 1.0 / 3.0 else 1.0
    with pytest.raises(QuadratureError):
        integrate(step, 0.0, 1.0, 1e-9)


def test_breakpoints_share_budget():
    g = lambda t: abs(t - 1.0 / 6.0)
    with pytest.raises(BudgetExhausted):
        integrate_with_breakpoints(g, 0.0, 0.5, [1.0 / 6.0], 1e-13, max_evals=5)


def test_default_tolerance_is_tight():
    assert DEFAULT_ABS_TOL <= 1e-10
