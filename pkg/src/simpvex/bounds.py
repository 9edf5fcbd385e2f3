"""Simpson defect of a function along an eta step, and its upper bounds.

For a function f on [a, a + eta] the defect is

    (1/6) [f(a) + 4 f(a + eta/2) + f(a + eta)] - (1/eta) integral f,

i.e. the gap between the 1-4-1 Simpson combination and the mean of f.
An integration-by-parts identity expresses the defect as
eta * integral_0^1 m(t) f'(a + t*eta) dt with the piecewise kernel from
:mod:`simpvex.kernel`; ``lemma_rhs`` evaluates that side numerically.

The bound evaluators return the right-hand sides of closed-form
inequalities that dominate |defect| under sampled hypotheses on |f'|^q:

    T3.1           (5/72) eta (|f'(a)| + |f'(b)|)            preinvex, q = 1
    T3.2, T3.3     Hoelder splits with the p-th kernel moment preinvex, q > 1
    T3.4           power-mean form with weights 61,29/1296    preinvex, q >= 1
    T4.1 (C4.1)    (5/36) eta max(...)                        prequasiinvex, q >= 1
    T4.2, T4.3     Hoelder variants of T4.1                   prequasiinvex, q > 1
    C4.2           midpoint-vs-mean gap when f(a) = f(mid) = f(end)
    CLASSICAL      sup|f''''| eta^4 / 2880

Each BoundValue carries slack = rhs - |defect| - quadrature_error, so a
negative slack beyond tolerance is a genuine counterexample, never
quadrature noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from . import expr as expr_mod
from . import kernel, quadrature
from .errors import (
    CaseConfigError,
    DomainError,
    InvalidEta,
    MissingFourthDerivative,
    PreconditionUnmet,
)
from .invexity import Domain, EtaPath
from .quadrature import QuadratureResult

__all__ = [
    "FunctionModel",
    "SimpsonDefect",
    "BoundValue",
    "simpson_defect",
    "lemma_rhs",
    "midpoint_gap",
    "bound_T3_1",
    "bound_T3_2",
    "bound_T3_3",
    "bound_T3_4",
    "bound_T4_1",
    "bound_T4_2",
    "bound_T4_3",
    "bound_C4_2_midpoint",
    "bound_classical",
]

_LARGE_EXPONENT = 100.0


@dataclass
class FunctionModel:
    """A named function f with its derivative and optional extras.

    ``df`` must survive a central finite-difference cross-check and, when
    an antiderivative ``F`` is supplied, F must agree with quadrature;
    both gates run in :meth:`validate`, which case loading always calls.
    ``d4sup`` is a user-supplied sup of |f''''| on the case interval and
    unlocks the classical bound.
    """

    name: str
    f: expr_mod.Expr
    df: expr_mod.Expr
    domain: Domain
    F: Optional[expr_mod.Expr] = None
    d4sup: Optional[float] = None

    @cached_property
    def f_fn(self):
        return expr_mod.compile_expr(self.f, ("x",))

    @cached_property
    def df_fn(self):
        return expr_mod.compile_expr(self.df, ("x",))

    @cached_property
    def F_fn(self):
        if self.F is None:
            return None
        return expr_mod.compile_expr(self.F, ("x",))

    @classmethod
    def from_config(cls, cfg: dict) -> "FunctionModel":
        try:
            f = expr_mod.parse(cfg["f"], {"x"})
            df = expr_mod.parse(cfg["df"], {"x"})
            F = expr_mod.parse(cfg["F"], {"x"}) if cfg.get("F") is not None else None
        except expr_mod.ParseError as exc:
            raise CaseConfigError(f"bad expression in case {cfg.get('name')!r}: {exc}") from exc
        d4sup = cfg.get("d4sup")
        if d4sup is not None:
            d4sup = float(d4sup)
            if not (math.isfinite(d4sup) and d4sup >= 0.0):
                raise CaseConfigError(f"d4sup must be a finite value >= 0, got {d4sup!r}")
        lo, hi = cfg["K"]
        return cls(cfg["name"], f, df, Domain(float(lo), float(hi)), F, d4sup)

    def validate(self, interval=None, points: int = 33,
                 derivative_tol: float = 1e-4,
                 consistency_tol: float = 1e-9,
                 quad_tol: float = quadrature.DEFAULT_ABS_TOL) -> None:
        """Run the load-time gates; raises CaseConfigError on failure.

        The derivative gate always samples the whole domain; the
        antiderivative gate uses ``interval`` (the case interval) when
        given, the domain otherwise.
        """
        gate = expr_mod.check_derivative(
            self.f, self.df, (self.domain.lo, self.domain.hi), points, derivative_tol)
        if gate.violated:
            x, want, got = gate.witness
            raise CaseConfigError(
                f"model {self.name!r}: df disagrees with finite differences of f "
                f"at x={x!r} (df={want!r}, fd~{got!r}, mismatch {gate.worst_violation:.3e})"
            )
        if self.F_fn is not None:
            lo, hi = interval if interval is not None else (self.domain.lo, self.domain.hi)
            qr = quadrature.integrate(self.f_fn, lo, hi, quad_tol)
            direct = self.F_fn(hi) - self.F_fn(lo)
            if abs(direct - qr.value) > consistency_tol:
                raise CaseConfigError(
                    f"model {self.name!r}: antiderivative F disagrees with quadrature "
                    f"on [{lo!r}, {hi!r}]: {direct!r} vs {qr.value!r}"
                )


@dataclass(frozen=True)
class SimpsonDefect:
    """Signed Simpson-minus-mean gap with its quadrature error share."""

    simpson_value: float
    mean_integral: float
    defect: float
    quadrature_error: float
    evaluations: int


@dataclass(frozen=True)
class BoundValue:
    """One evaluated bound.  slack < 0 beyond tolerance means violation."""

    theorem: str
    q: Optional[float]
    p: Optional[float]
    rhs: float
    slack: Optional[float]

    def __post_init__(self):
        if not self.rhs >= 0.0:
            raise ValueError(f"bound {self.theorem} produced negative rhs {self.rhs!r}")

    def to_dict(self) -> dict:
        return {"theorem": self.theorem, "q": self.q, "p": self.p,
                "rhs": self.rhs, "slack": self.slack}


def _require_step(eta_val: float) -> float:
    eta_val = float(eta_val)
    if not (math.isfinite(eta_val) and eta_val > 0.0):
        raise InvalidEta(f"eta step must be positive, got {eta_val!r}")
    return eta_val


def simpson_defect(model: FunctionModel, a: float, eta_val: float,
                   abs_tol: float = quadrature.DEFAULT_ABS_TOL,
                   max_evals: int = quadrature.DEFAULT_MAX_EVALS) -> SimpsonDefect:
    """Compute the Simpson-vs-mean defect of ``model`` on [a, a + eta_val].

    Uses the supplied antiderivative for the mean when available (then
    quadrature_error is 0), numeric integration otherwise.
    """
    eta_val = _require_step(eta_val)
    EtaPath(a, eta_val, model.domain)
    f = model.f_fn
    end = a + eta_val
    mid = a + 0.5 * eta_val
    simpson_value = (f(a) + 4.0 * f(mid) + f(end)) / 6.0
    if model.F_fn is not None:
        mean = (model.F_fn(end) - model.F_fn(a)) / eta_val
        qerr = 0.0
        evals = 0
    else:
        qr = quadrature.integrate(f, a, end, abs_tol, max_evals)
        mean = qr.value / eta_val
        qerr = qr.error_estimate / eta_val
        evals = qr.evaluations
    return SimpsonDefect(simpson_value, mean, simpson_value - mean, qerr, evals)


def lemma_rhs(model: FunctionModel, a: float, eta_val: float,
              abs_tol: float = quadrature.DEFAULT_ABS_TOL,
              max_evals: int = quadrature.DEFAULT_MAX_EVALS) -> QuadratureResult:
    """Kernel-integral side of the defect identity, as a QuadratureResult.

    Evaluates eta * integral_0^1 m(t) f'(a + t*eta) dt.  The kernel
    jumps at t = 1/2, so the halves are integrated separately with the
    correct one-sided branch; sampling eval_m at the shared endpoint
    would feed the quadrature a spurious endpoint discontinuity.  The
    value equals the signed defect up to the reported error estimate.
    """
    eta_val = _require_step(eta_val)
    EtaPath(a, eta_val, model.domain)
    df = model.df_fn

    def left(t: float) -> float:
        return (t - 1.0 / 6.0) * df(a + t * eta_val)

    def right(t: float) -> float:
        return (t - 5.0 / 6.0) * df(a + t * eta_val)

    half_tol = 0.5 * abs_tol
    qa = quadrature.integrate(left, 0.0, 0.5, half_tol, max_evals)
    qb = quadrature.integrate(right, 0.5, 1.0, half_tol, max_evals - qa.evaluations)
    return QuadratureResult(
        eta_val * (qa.value + qb.value),
        eta_val * (qa.error_estimate + qb.error_estimate),
        qa.evaluations + qb.evaluations,
    )


def midpoint_gap(model: FunctionModel, a: float, eta_val: float,
                 abs_tol: float = quadrature.DEFAULT_ABS_TOL):
    """|f(a + eta/2) - mean of f| building block of the midpoint bound.

    Returns (gap, quadrature_error).
    """
    eta_val = _require_step(eta_val)
    EtaPath(a, eta_val, model.domain)
    end = a + eta_val
    f = model.f_fn
    if model.F_fn is not None:
        mean = (model.F_fn(end) - model.F_fn(a)) / eta_val
        qerr = 0.0
    else:
        qr = quadrature.integrate(f, a, end, abs_tol)
        mean = qr.value / eta_val
        qerr = qr.error_estimate / eta_val
    return f(a + 0.5 * eta_val) - mean, qerr


def _endpoint_magnitudes(model: FunctionModel, a: float, b: float):
    return abs(model.df_fn(a)), abs(model.df_fn(b))


def _conjugate(q: float) -> float:
    if not q > 1.0:
        raise ValueError(f"this bound needs q > 1, got {q!r}")
    return q / (q - 1.0)


def _moment_root(p: float) -> float:
    """moment_p(p)^(1/p), stable for the huge p that q near 1 produces."""
    if p > 50.0:
        return math.exp(kernel.log_moment_p(p) / p)
    return kernel.moment_p(p) ** (1.0 / p)


def _doubled_moment_root(p: float) -> float:
    """(2 moment_p(p))^(1/p) with the same large-p protection."""
    if p > 50.0:
        return math.exp((math.log(2.0) + kernel.log_moment_p(p)) / p)
    return (2.0 * kernel.moment_p(p)) ** (1.0 / p)


def _weighted_q_mean(w1: float, x1: float, w2: float, x2: float, q: float) -> float:
    """(w1 x1^q + w2 x2^q)^(1/q) over magnitudes x1, x2 >= 0.

    For q > 100 the powers are rescaled by max(x1, x2) so intermediate
    terms cannot overflow; the result is unchanged.
    """
    if q == 1.0:
        return w1 * x1 + w2 * x2
    if q <= _LARGE_EXPONENT:
        return (w1 * x1 ** q + w2 * x2 ** q) ** (1.0 / q)
    m = max(x1, x2)
    if m == 0.0:
        return 0.0
    return m * (w1 * (x1 / m) ** q + w2 * (x2 / m) ** q) ** (1.0 / q)


def _slack(rhs: float, defect: Optional[SimpsonDefect]) -> Optional[float]:
    if defect is None:
        return None
    return rhs - abs(defect.defect) - defect.quadrature_error


def bound_T3_1(model: FunctionModel, a: float, b: float, eta_val: float,
               defect: Optional[SimpsonDefect] = None) -> BoundValue:
    """Endpoint-mean bound (5/72) eta (|f'(a)| + |f'(b)|)."""
    eta_val = _require_step(eta_val)
    x1, x2 = _endpoint_magnitudes(model, a, b)
    rhs = float(kernel.moment_p_exact(1)) * eta_val * (x1 + x2)
    return BoundValue("T3.1", None, None, rhs, _slack(rhs, defect))


def bound_T3_2(model: FunctionModel, a: float, b: float, eta_val: float, q: float,
               defect: Optional[SimpsonDefect] = None) -> BoundValue:
    """Half-split Hoelder bound with weights 3/8 and 1/8, q > 1."""
    eta_val = _require_step(eta_val)
    p = _conjugate(q)
    x1, x2 = _endpoint_magnitudes(model, a, b)
    w_near, w_far = (float(w) for w in kernel.half_weights())
    rhs = eta_val * _moment_root(p) * (
        _weighted_q_mean(w_near, x1, w_far, x2, q)
        + _weighted_q_mean(w_far, x1, w_near, x2, q)
    )
    return BoundValue("T3.2", q, p, rhs, _slack(rhs, defect))


def bound_T3_3(model: FunctionModel, a: float, b: float, eta_val: float, q: float,
               defect: Optional[SimpsonDefect] = None) -> BoundValue:
    """Whole-interval Hoelder bound with the plain endpoint mean, q > 1."""
    eta_val = _require_step(eta_val)
    p = _conjugate(q)
    x1, x2 = _endpoint_magnitudes(model, a, b)
    rhs = eta_val * _doubled_moment_root(p) * _weighted_q_mean(0.5, x1, 0.5, x2, q)
    return BoundValue("T3.3", q, p, rhs, _slack(rhs, defect))


def bound_T3_4(model: FunctionModel, a: float, b: float, eta_val: float, q: float,
               defect: Optional[SimpsonDefect] = None) -> BoundValue:
    """Power-mean bound with the 61/1296, 29/1296 weights, q >= 1."""
    eta_val = _require_step(eta_val)
    if q < 1.0:
        raise ValueError(f"this bound needs q >= 1, got {q!r}")
    x1, x2 = _endpoint_magnitudes(model, a, b)
    w_end, w_far, _, _ = (float(w) for w in kernel.weighted_moments())
    m1 = float(kernel.moment_p_exact(1))
    rhs = eta_val * m1 ** (1.0 - 1.0 / q) * (
        _weighted_q_mean(w_end, x1, w_far, x2, q)
        + _weighted_q_mean(w_far, x1, w_end, x2, q)
    )
    return BoundValue("T3.4", q, None, rhs, _slack(rhs, defect))


def bound_T4_1(model: FunctionModel, a: float, b: float, eta_val: float, q: float,
               defect: Optional[SimpsonDefect] = None, theorem: str = "T4.1") -> BoundValue:
    """Max-endpoint bound (5/36) eta max(|f'(a)|^q, |f'(b)|^q)^(1/q).

    The q-th root of the max of q-th powers is the max of the
    magnitudes, so the rhs is computed that way; q = 1 is Corollary
    C4.1 and may be labelled as such via ``theorem``.
    """
    eta_val = _require_step(eta_val)
    if q < 1.0:
        raise ValueError(f"this bound needs q >= 1, got {q!r}")
    x1, x2 = _endpoint_magnitudes(model, a, b)
    rhs = 2.0 * float(kernel.moment_p_exact(1)) * eta_val * max(x1, x2)
    return BoundValue(theorem, q, None, rhs, _slack(rhs, defect))


def bound_T4_2(model: FunctionModel, a: float, b: float, eta_val: float, q: float,
               defect: Optional[SimpsonDefect] = None) -> BoundValue:
    """Hoelder variant 2 eta M_p^(1/p) (max/2)^(1/q), q > 1."""
    eta_val = _require_step(eta_val)
    p = _conjugate(q)
    x1, x2 = _endpoint_magnitudes(model, a, b)
    rhs = 2.0 * eta_val * _moment_root(p) * max(x1, x2) * 0.5 ** (1.0 / q)
    return BoundValue("T4.2", q, p, rhs, _slack(rhs, defect))


def bound_T4_3(model: FunctionModel, a: float, b: float, eta_val: float, q: float,
               defect: Optional[SimpsonDefect] = None) -> BoundValue:
    """Hoelder variant eta (2 M_p)^(1/p) (max/2)^(1/q), q > 1.

    Never exceeds the T4.2 value: the two differ by the factor
    2^(1/p + 1/q) / 2 = 1 in exact arithmetic with the split applied
    once instead of twice, and the single split is the sharper route.
    """
    eta_val = _require_step(eta_val)
    p = _conjugate(q)
    x1, x2 = _endpoint_magnitudes(model, a, b)
    rhs = eta_val * _doubled_moment_root(p) * max(x1, x2) * 0.5 ** (1.0 / q)
    return BoundValue("T4.3", q, p, rhs, _slack(rhs, defect))


def bound_C4_2_midpoint(model: FunctionModel, a: float, b: float, eta_val: float,
                        abs_tol: float = quadrature.DEFAULT_ABS_TOL,
                        precondition_tol: float = 1e-9) -> BoundValue:
    """Midpoint-vs-mean bound under f(a) = f(a + eta/2) = f(a + eta).

    Raises PreconditionUnmet unless the three values agree within
    ``precondition_tol``.  The slack uses the midpoint gap itself as the
    left-hand side.
    """
    eta_val = _require_step(eta_val)
    f = model.f_fn
    fa = f(a)
    fmid = f(a + 0.5 * eta_val)
    fend = f(a + eta_val)
    if abs(fa - fmid) > precondition_tol or abs(fmid - fend) > precondition_tol:
        raise PreconditionUnmet(
            f"midpoint bound needs f(a) = f(mid) = f(end); got "
            f"{fa!r}, {fmid!r}, {fend!r}"
        )
    x1, x2 = _endpoint_magnitudes(model, a, b)
    rhs = 2.0 * float(kernel.moment_p_exact(1)) * eta_val * max(x1, x2)
    gap, qerr = midpoint_gap(model, a, eta_val, abs_tol)
    return BoundValue("C4.2", None, None, rhs, rhs - abs(gap) - qerr)


def bound_classical(model: FunctionModel, a: float, eta_val: float,
                    defect: Optional[SimpsonDefect] = None) -> BoundValue:
    """Classical Simpson bound sup|f''''| eta^4 / 2880."""
    eta_val = _require_step(eta_val)
    if model.d4sup is None:
        raise MissingFourthDerivative(
            f"model {model.name!r} has no d4sup; the classical bound needs one")
    rhs = model.d4sup * eta_val ** 4 / 2880.0
    return BoundValue("CLASSICAL", None, None, rhs, _slack(rhs, defect))
