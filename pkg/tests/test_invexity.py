import math
from types import SimpleNamespace

import pytest

from simpvex.errors import DomainError, ParseError
from simpvex.expr import compile_expr, parse
from simpvex.invexity import (
    DEFAULT_GRID,
    Domain,
    EtaMap,
    EtaPath,
    SampleGrid,
    check_invex_set,
    check_preinvex,
    check_prequasiinvex,
    hypothesis_check,
    hypothesis_pair,
)
from simpvex.reports import VERIFIED, VIOLATED, PropertyReport


def fn(source):
    return compile_expr(parse(source, {"x"}), ("x",))


def test_domain_basics():
    d = Domain(-1.0, 2.0)
    assert d.contains(-1.0)
    assert d.contains(2.0 + 1e-13)
    assert not d.contains(2.1)
    assert d.grid(3) == [-1.0, 0.5, 2.0]
    with pytest.raises(ValueError):
        Domain(1.0, 1.0)
    with pytest.raises(ValueError):
        Domain(0.0, math.inf)
    with pytest.raises(ValueError):
        d.grid(1)


def test_default_grid_shape():
    assert DEFAULT_GRID == SampleGrid(41, 41, 21, 2000, 170167)


def test_eta_difference():
    eta = EtaMap.difference()
    assert eta(3.0, 1.0) == 2.0
    assert eta(-1.0, 4.0) == -5.0
    assert eta.kind == "difference"


def test_eta_abs_example_branches():
    eta = EtaMap.abs_example()
    # same sign: plain difference
    assert eta(-1.0, -2.0) == 1.0
    assert eta(2.0, 0.5) == 1.5
    # zero counts as both signs
    assert eta(0.0, -1.0) == 1.0
    assert eta(2.0, 0.0) == 2.0
    # mixed signs flip the direction
    assert eta(1.0, -2.0) == -3.0
    assert eta(-2.0, 1.0) == 3.0


def test_eta_expression():
    eta = EtaMap.from_expression("v - 2*u")
    assert eta(5.0, 1.0) == 3.0
    assert eta.source == "v - 2*u"
    with pytest.raises(ParseError):
        EtaMap.from_expression("v - w")


def test_eta_from_config_errors():
    with pytest.raises(ValueError):
        EtaMap.from_config({"kind": "nope"})
    with pytest.raises(ValueError):
        EtaMap.from_config({"kind": "expression"})
    assert EtaMap.from_config({"kind": "expression", "value": "v-u"})(3.0, 1.0) == 2.0


def test_eta_path_domain_guard():
    path = EtaPath(0.25, 0.5, Domain(0.0, 1.0))
    assert path.point(0.0) == 0.25
    assert path.point(1.0) == 0.75
    with pytest.raises(DomainError):
        EtaPath(0.5, 1.0, Domain(0.0, 1.0))
    with pytest.raises(DomainError):
        EtaPath(-0.1, 0.5, Domain(0.0, 1.0))


def test_invex_set_difference_always_holds():
    report = check_invex_set(Domain(-2.0, 3.0), EtaMap.difference())
    assert report.verdict == VERIFIED
    assert report.worst_violation <= 0.0
    assert report.witness is None


def test_invex_set_abs_example_fails_on_mixed_interval():
    report = check_invex_set(Domain(-1.0, 1.0), EtaMap.abs_example())
    assert report.verdict == VIOLATED
    assert report.worst_violation == 2.0
    assert report.witness == (-1.0, 1.0, 1.0)


def test_invex_set_abs_example_holds_on_negative_interval():
    report = check_invex_set(Domain(-1.0, 0.0), EtaMap.abs_example())
    assert report.verdict == VERIFIED
    assert report.worst_violation == 0.0


def test_cube_is_not_preinvex_for_difference():
    report = check_preinvex(fn("x^3"), EtaMap.difference(), Domain(-1.0, 1.0))
    assert report.verdict == VIOLATED
    assert report.worst_violation == 0.49907812500000004
    assert report.witness == (-1.0, 0.5, 0.35)
    assert report.samples == 41 * 41 * 21 + 2000


def test_cube_excess_at_named_point():
    g = fn("x^3")
    u, v, t = -1.0, 0.0, 0.5
    excess = g(u + t * (v - u)) - ((1.0 - t) * g(u) + t * g(v))
    assert excess == 0.375


def test_neg_square_is_not_prequasiinvex():
    report = check_prequasiinvex(fn("-(x^2)"), EtaMap.difference(), Domain(-1.0, 1.0))
    assert report.verdict == VIOLATED
    assert report.worst_violation == 1.0
    assert report.witness == (-1.0, 1.0, 0.5)


def test_sqrt_fails_preinvex_but_not_prequasiinvex():
    K = Domain(0.0, 1.0)
    pre = check_preinvex(fn("sqrt(x)"), EtaMap.difference(), K)
    assert pre.verdict == VIOLATED
    assert pre.worst_violation == 0.25
    assert pre.witness == (0.0, 1.0, 0.25)
    # monotone on the path, so the max-form inequality survives
    quasi = check_prequasiinvex(fn("sqrt(x)"), EtaMap.difference(), K)
    assert quasi.verdict == VERIFIED


def test_neg_abs_is_preinvex_for_abs_example():
    report = check_preinvex(fn("-abs(x)"), EtaMap.abs_example(), Domain(-1.0, 1.0))
    assert report.verdict == VERIFIED
    assert report.worst_violation <= 1e-12


def test_convex_square_passes_both_checks():
    pre = check_preinvex(fn("x^2"), EtaMap.difference(), Domain(-1.0, 1.0))
    quasi = check_prequasiinvex(fn("x^2"), EtaMap.difference(), Domain(-1.0, 1.0))
    assert pre.verdict == VERIFIED
    assert quasi.verdict == VERIFIED


def test_recheck_witness_keeps_coarse_grid_honest():
    # a narrow spike the 5x5x3 grid cannot see
    def spike(x):
        return max(0.0, 1.0 - 200.0 * abs(x - 0.123))

    coarse = SampleGrid(nu=5, nv=5, nt=3, random_triples=0)
    K = Domain(-1.0, 1.0)
    blind = check_preinvex(spike, EtaMap.difference(), K, coarse)
    assert blind.verdict == VERIFIED
    informed = check_preinvex(spike, EtaMap.difference(), K, coarse,
                              recheck=[(0.0, 0.246, 0.5)])
    assert informed.verdict == VIOLATED
    assert informed.worst_violation == 1.0
    assert informed.witness == (0.0, 0.246, 0.5)


def test_checks_are_deterministic():
    a = check_preinvex(fn("x^3"), EtaMap.difference(), Domain(-1.0, 1.0))
    b = check_preinvex(fn("x^3"), EtaMap.difference(), Domain(-1.0, 1.0))
    assert a == b


def test_hypothesis_check_uses_derivative_magnitude():
    model = SimpleNamespace(df_fn=lambda x: x)
    report = hypothesis_check(model, EtaMap.difference(), Domain(-1.0, 1.0), 2.0,
                              "preinvex")
    assert report.verdict == VERIFIED
    assert report.exponent_q == 2.0
    assert report.property == "preinvex"


def test_hypothesis_check_validates_arguments():
    model = SimpleNamespace(df_fn=lambda x: x)
    with pytest.raises(ValueError):
        hypothesis_check(model, EtaMap.difference(), Domain(-1.0, 1.0), 0.5, "preinvex")
    with pytest.raises(ValueError):
        hypothesis_check(model, EtaMap.difference(), Domain(-1.0, 1.0), 1.0, "convex")


def test_hypothesis_pair_matches_single_checks():
    model = SimpleNamespace(df_fn=fn("3*x^2"))
    K = Domain(-1.0, 1.0)
    pre, quasi = hypothesis_pair(model, EtaMap.difference(), K, 1.0)
    assert pre == hypothesis_check(model, EtaMap.difference(), K, 1.0, "preinvex")
    assert quasi == hypothesis_check(model, EtaMap.difference(), K, 1.0, "prequasiinvex")


def test_property_report_validation():
    with pytest.raises(ValueError):
        PropertyReport("preinvex", VIOLATED, 1.0, None, 10)
    with pytest.raises(ValueError):
        PropertyReport("preinvex", "maybe", 0.0, None, 10)
    ok = PropertyReport("preinvex", VERIFIED, 0.0, None, 10)
    assert not ok.violated
    assert ok.to_dict()["samples"] == 10
