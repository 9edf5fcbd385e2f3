"""Sampled checks for invex sets and generalised convexity.

A direction map eta(v, u) generalises the straight-line displacement
v - u.  An interval K is invex for eta when u + t*eta(v, u) stays in K
for all u, v in K and t in [0, 1]; g is preinvex when

    g(u + t*eta(v, u)) <= (1 - t) g(u) + t g(v)

and prequasiinvex when the right side is replaced by max(g(u), g(v)).
With eta(v, u) = v - u these reduce to ordinary convexity and
quasiconvexity.

All checks here are sampling-based: a deterministic grid over K x K x
[0, 1] plus a fixed-seed uniform layer.  Verdicts are therefore
"verified_on_samples", never proofs.  The reported worst violation is
the exact maximum over the samples, with ties broken by lexicographic
(u, v, t) order, so re-running a check reproduces it bit for bit.
Explicit witnesses passed via ``recheck`` are evaluated before the grid,
which keeps verdicts monotone under grid refinement.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Tuple

from . import expr as expr_mod
from .errors import DomainError
from .reports import VERIFIED, VIOLATED, PropertyReport

__all__ = [
    "Domain",
    "SampleGrid",
    "DEFAULT_GRID",
    "DEFAULT_TOL",
    "EtaMap",
    "EtaPath",
    "check_invex_set",
    "check_preinvex",
    "check_prequasiinvex",
    "hypothesis_check",
    "hypothesis_pair",
]

DEFAULT_TOL = 1e-12
_RANDOM_SEED = 170167


@dataclass(frozen=True)
class Domain:
    """Closed interval [lo, hi] with lo < hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ValueError(f"domain needs lo < hi, got [{self.lo!r}, {self.hi!r}]")

    def contains(self, x: float, tol: float = DEFAULT_TOL) -> bool:
        return self.lo - tol <= x <= self.hi + tol

    def grid(self, n: int) -> List[float]:
        if n < 2:
            raise ValueError("grid needs at least 2 points")
        span = self.hi - self.lo
        return [self.lo + i * span / (n - 1) for i in range(n)]


@dataclass(frozen=True)
class SampleGrid:
    """Sampling plan: nu x nv x nt grid plus a seeded uniform layer."""

    nu: int = 41
    nv: int = 41
    nt: int = 21
    random_triples: int = 2000
    seed: int = _RANDOM_SEED


DEFAULT_GRID = SampleGrid()


class EtaMap:
    """Direction map eta(v, u), callable with signature (v, u) -> float.

    Built-in kinds:
      * "difference":  eta(v, u) = v - u
      * "abs_example": v - u when u, v share a sign (zero counts as
        both), u - v otherwise; the map under which -|u| is preinvex
      * "expression":  any parsed expression over the variables {v, u}
    """

    def __init__(self, kind: str, fn: Callable[[float, float], float],
                 name: str, source: Optional[str] = None):
        self.kind = kind
        self.name = name
        self.source = source
        self._fn = fn

    def __call__(self, v: float, u: float) -> float:
        return self._fn(v, u)

    def __repr__(self):
        return f"EtaMap({self.name!r})"

    @classmethod
    def difference(cls) -> "EtaMap":
        return cls("difference", lambda v, u: v - u, "difference")

    @classmethod
    def abs_example(cls) -> "EtaMap":
        def fn(v, u):
            if (v <= 0.0 and u <= 0.0) or (v >= 0.0 and u >= 0.0):
                return v - u
            return u - v
        return cls("abs_example", fn, "abs_example")

    @classmethod
    def from_expression(cls, source: str) -> "EtaMap":
        tree = expr_mod.parse(source, {"v", "u"})
        fn = expr_mod.compile_expr(tree, ("v", "u"))
        return cls("expression", fn, source, source=source)

    @classmethod
    def from_config(cls, cfg: dict) -> "EtaMap":
        kind = cfg.get("kind")
        if kind == "difference":
            return cls.difference()
        if kind == "abs_example":
            return cls.abs_example()
        if kind == "expression":
            value = cfg.get("value")
            if not isinstance(value, str):
                raise ValueError("expression eta needs a string 'value'")
            return cls.from_expression(value)
        raise ValueError(f"unknown eta kind {kind!r}")


@dataclass(frozen=True)
class EtaPath:
    """Segment t -> base + t*step, checked to stay inside ``domain``."""

    base: float
    step: float
    domain: Domain

    def __post_init__(self):
        for endpoint in (self.base, self.base + self.step):
            if not self.domain.contains(endpoint):
                raise DomainError(
                    f"path endpoint {endpoint!r} outside "
                    f"[{self.domain.lo!r}, {self.domain.hi!r}]"
                )

    def point(self, t: float) -> float:
        return self.base + t * self.step


class _Worst:
    """Running maximum with deterministic lexicographic tie-breaking."""

    __slots__ = ("excess", "witness")

    def __init__(self):
        self.excess = -math.inf
        self.witness = None

    def offer(self, excess: float, u: float, v: float, t: float):
        if excess > self.excess or (excess == self.excess
                                    and self.witness is not None
                                    and (u, v, t) < self.witness):
            self.excess = excess
            self.witness = (u, v, t)


def _triples(K: Domain, grid: SampleGrid, recheck: Iterable[Tuple[float, float, float]]):
    """Deterministic sample stream: recheck, grid, then seeded random."""
    for (u, v, t) in recheck:
        yield float(u), float(v), float(t)
    us = K.grid(grid.nu)
    vs = K.grid(grid.nv)
    ts = [i / (grid.nt - 1) for i in range(grid.nt)]
    for u in us:
        for v in vs:
            for t in ts:
                yield u, v, t
    rng = random.Random(grid.seed)
    span = K.hi - K.lo
    for _ in range(grid.random_triples):
        u = K.lo + span * rng.random()
        v = K.lo + span * rng.random()
        t = rng.random()
        yield u, v, t


def _report(prop: str, worst: _Worst, samples: int, tol: float,
            q: Optional[float] = None) -> PropertyReport:
    if worst.excess > tol:
        return PropertyReport(prop, VIOLATED, worst.excess, worst.witness, samples, q)
    return PropertyReport(prop, VERIFIED, worst.excess, None, samples, q)


def check_invex_set(K: Domain, eta: EtaMap, grid: SampleGrid = DEFAULT_GRID,
                    tol: float = DEFAULT_TOL,
                    recheck: Iterable[Tuple[float, float, float]] = ()) -> PropertyReport:
    """Check that u + t*eta(v, u) stays in K on all samples.

    The violation measure is the distance by which the path point leaves
    K (negative when inside).
    """
    worst = _Worst()
    samples = 0
    lo, hi = K.lo, K.hi
    for u, v, t in _triples(K, grid, recheck):
        x = u + t * eta(v, u)
        worst.offer(max(lo - x, x - hi), u, v, t)
        samples += 1
    return _report("invex_set", worst, samples, tol)


def _pair_sweep(g: Callable[[float], float], eta: EtaMap, K: Domain,
                grid: SampleGrid, recheck) -> Tuple[_Worst, _Worst, int]:
    """One sweep recording preinvex and prequasiinvex excesses together."""
    worst_pre = _Worst()
    worst_quasi = _Worst()
    samples = 0
    for (u, v, t) in recheck:
        u, v, t = float(u), float(v), float(t)
        gu = g(u)
        gv = g(v)
        gx = g(u + t * eta(v, u))
        worst_pre.offer(gx - ((1.0 - t) * gu + t * gv), u, v, t)
        worst_quasi.offer(gx - max(gu, gv), u, v, t)
        samples += 1
    us = K.grid(grid.nu)
    vs = K.grid(grid.nv)
    ts = [i / (grid.nt - 1) for i in range(grid.nt)]
    gus = [g(u) for u in us]
    gvs = [g(v) for v in vs]
    for u, gu in zip(us, gus):
        for v, gv in zip(vs, gvs):
            step = eta(v, u)
            hib = max(gu, gv)
            for t in ts:
                gx = g(u + t * step)
                worst_pre.offer(gx - ((1.0 - t) * gu + t * gv), u, v, t)
                worst_quasi.offer(gx - hib, u, v, t)
                samples += 1
    rng = random.Random(grid.seed)
    span = K.hi - K.lo
    for _ in range(grid.random_triples):
        u = K.lo + span * rng.random()
        v = K.lo + span * rng.random()
        t = rng.random()
        gu = g(u)
        gv = g(v)
        gx = g(u + t * eta(v, u))
        worst_pre.offer(gx - ((1.0 - t) * gu + t * gv), u, v, t)
        worst_quasi.offer(gx - max(gu, gv), u, v, t)
        samples += 1
    return worst_pre, worst_quasi, samples


def check_preinvex(g: Callable[[float], float], eta: EtaMap, K: Domain,
                   grid: SampleGrid = DEFAULT_GRID, tol: float = DEFAULT_TOL,
                   recheck: Iterable[Tuple[float, float, float]] = ()) -> PropertyReport:
    """Sampled preinvexity check of ``g`` on K.

    Assumes K is invex for ``eta`` (run check_invex_set first); ``g``
    must be defined wherever the sampled paths land.
    """
    worst_pre, _, samples = _pair_sweep(g, eta, K, grid, tuple(recheck))
    return _report("preinvex", worst_pre, samples, tol)


def check_prequasiinvex(g: Callable[[float], float], eta: EtaMap, K: Domain,
                        grid: SampleGrid = DEFAULT_GRID, tol: float = DEFAULT_TOL,
                        recheck: Iterable[Tuple[float, float, float]] = ()) -> PropertyReport:
    """Sampled prequasiinvexity check of ``g`` on K."""
    _, worst_quasi, samples = _pair_sweep(g, eta, K, grid, tuple(recheck))
    return _report("prequasiinvex", worst_quasi, samples, tol)


def _derivative_power(model, q: float) -> Callable[[float], float]:
    df_fn = model.df_fn
    if q == 1.0:
        return lambda x: abs(df_fn(x))
    return lambda x: abs(df_fn(x)) ** q


def hypothesis_check(model, eta: EtaMap, K: Domain, q: float, mode: str,
                     grid: SampleGrid = DEFAULT_GRID,
                     tol: float = DEFAULT_TOL) -> PropertyReport:
    """Check |f'|^q for the property named by ``mode`` on K.

    ``model`` is any object exposing a compiled derivative ``df_fn``;
    the absolute value is applied before the exponent.  ``mode`` is
    "preinvex" or "prequasiinvex".
    """
    if q < 1.0:
        raise ValueError("exponent q must be >= 1")
    g = _derivative_power(model, q)
    if mode == "preinvex":
        report = check_preinvex(g, eta, K, grid, tol)
    elif mode == "prequasiinvex":
        report = check_prequasiinvex(g, eta, K, grid, tol)
    else:
        raise ValueError(f"unknown hypothesis mode {mode!r}")
    return PropertyReport(report.property, report.verdict, report.worst_violation,
                          report.witness, report.samples, q)


def hypothesis_pair(model, eta: EtaMap, K: Domain, q: float,
                    grid: SampleGrid = DEFAULT_GRID,
                    tol: float = DEFAULT_TOL) -> Tuple[PropertyReport, PropertyReport]:
    """Both hypothesis checks for |f'|^q from a single sweep."""
    if q < 1.0:
        raise ValueError("exponent q must be >= 1")
    g = _derivative_power(model, q)
    worst_pre, worst_quasi, samples = _pair_sweep(g, eta, K, grid, ())
    return (
        _report("preinvex", worst_pre, samples, tol, q),
        _report("prequasiinvex", worst_quasi, samples, tol, q),
    )
