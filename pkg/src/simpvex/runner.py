"""Case pipeline, bundled corpus, tightness scans and report assembly.

A corpus case names a function model, a direction map eta, an interval
K, the exponents q and the bounds to evaluate.  ``run_case`` drives the
full pipeline:

    validate -> invex-set check -> per-(theorem, q) hypothesis checks ->
    defect + kernel-integral identity -> bound evaluation -> verdict

Verdicts: "pass" (all evaluated bounds dominate the defect),
"hypothesis_unmet" (at least one requested bound was skipped because a
sampled hypothesis failed), "violation" (a bound or the defect identity
failed beyond tolerance after quadrature-error correction) and
"input_error" (the case itself is unusable, e.g. a non-positive eta
step).  A violation always wins over other verdicts when aggregating
exit codes.

Reports serialize to JSON deterministically: fixed key order, no
timestamps and no wall-clock fields, so re-running identical inputs
yields identical bytes.  The document shape is pinned by
schemas/report_schema.json and re-validated on every serialization.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from importlib.resources import files as _resource_files
from typing import Dict, List, Optional, Sequence, Tuple

import jsonschema

from . import bounds as bounds_mod
from .errors import (
    CaseConfigError,
    DomainError,
    EvalDomainError,
    ParseError,
    PreconditionUnmet,
    QuadratureError,
)
from .invexity import (
    DEFAULT_GRID,
    Domain,
    EtaMap,
    SampleGrid,
    check_invex_set,
    hypothesis_pair,
)
from .quadrature import QuadratureResult
from .reports import PropertyReport

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "THEOREM_IDS",
    "CorpusCase",
    "CaseResult",
    "RunReport",
    "TightnessResult",
    "load_case",
    "load_corpus",
    "run_case",
    "run_corpus",
    "tightness_scan",
    "aggregate_exit_code",
    "case_schema",
    "report_schema",
]

VERDICT_PASS = "pass"
VERDICT_UNMET = "hypothesis_unmet"
VERDICT_VIOLATION = "violation"
VERDICT_INPUT_ERROR = "input_error"

# mode is the hypothesis property; policy picks which case exponents apply
_THEOREMS: Dict[str, Tuple[Optional[str], str]] = {
    "T3.1": ("preinvex", "fixed1"),
    "T3.2": ("preinvex", "gt1"),
    "T3.3": ("preinvex", "gt1"),
    "T3.4": ("preinvex", "ge1"),
    "T4.1": ("prequasiinvex", "ge1"),
    "T4.2": ("prequasiinvex", "gt1"),
    "T4.3": ("prequasiinvex", "gt1"),
    "C4.1": ("prequasiinvex", "fixed1"),
    "C4.2": ("prequasiinvex", "fixed1"),
    "CLASSICAL": (None, "none"),
}
THEOREM_IDS = tuple(_THEOREMS)


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances used across the pipeline.

    oracle: absolute tolerance handed to the quadrature oracle.
    slack: a bound counts as violated only below -slack.
    invexity: sampled property checks flag excesses above this.
    identity: defect-vs-kernel-integral budget before quadrature errors.
    derivative: relative mismatch allowed in the finite-difference gate.
    """

    oracle: float = 1e-11
    slack: float = 1e-12
    invexity: float = 1e-12
    identity: float = 1e-9
    derivative: float = 1e-4

    def merged(self, overrides: Optional[dict]) -> "Tolerances":
        if not overrides:
            return self
        return replace(self, **{k: float(v) for k, v in overrides.items() if v is not None})


DEFAULT_TOLERANCES = Tolerances()


def case_schema() -> dict:
    return json.loads(_resource_files("simpvex").joinpath(
        "schemas/case_schema.json").read_text(encoding="utf-8"))


def report_schema() -> dict:
    return json.loads(_resource_files("simpvex").joinpath(
        "schemas/report_schema.json").read_text(encoding="utf-8"))


@dataclass
class CorpusCase:
    """A validated corpus case ready to run."""

    name: str
    model: bounds_mod.FunctionModel
    eta: EtaMap
    a: float
    b: float
    q_list: Tuple[float, ...]
    theorems: Tuple[str, ...]
    tolerances: Tolerances
    expected: Dict[str, Tuple[float, float]] = field(default_factory=dict)


def load_case(config: dict, tolerances: Tolerances = DEFAULT_TOLERANCES) -> CorpusCase:
    """Validate a raw case dict and build a CorpusCase.

    Schema violations, unparsable expressions, a failing derivative
    gate, an inconsistent antiderivative, or a CLASSICAL request
    without d4sup all raise CaseConfigError here, at load time.
    """
    try:
        jsonschema.validate(config, case_schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise CaseConfigError(f"case config invalid at {path}: {exc.message}") from exc
    name = config["name"]
    model = bounds_mod.FunctionModel.from_config(config)
    try:
        eta = EtaMap.from_config(config["eta"])
    except (ValueError, ParseError) as exc:
        raise CaseConfigError(f"case {name!r}: bad eta: {exc}") from exc
    a = float(config["a"])
    b = float(config["b"])
    q_list = tuple(float(q) for q in config["q"])
    theorems = tuple(config["theorems"])
    if "CLASSICAL" in theorems and model.d4sup is None:
        raise CaseConfigError(f"case {name!r} requests CLASSICAL but has no d4sup")
    tol = tolerances.merged(config.get("tolerances"))
    expected = {}
    for key, entry in (config.get("expected") or {}).items():
        expected[key] = (float(entry["rhs"]), float(entry["tolerance"]))
    # the F gate uses the case interval when the step is usable
    f_interval = None
    try:
        step = eta(b, a)
        if step > 0.0 and model.domain.contains(a) and model.domain.contains(a + step):
            f_interval = (a, a + step)
    except EvalDomainError:
        pass
    model.validate(interval=f_interval, derivative_tol=tol.derivative,
                   quad_tol=tol.oracle)
    return CorpusCase(name, model, eta, a, b, q_list, theorems, tol, expected)


@dataclass
class CaseResult:
    name: str
    verdict: str
    eta_step: Optional[float] = None
    defect: Optional[bounds_mod.SimpsonDefect] = None
    lemma: Optional[QuadratureResult] = None
    identity_residual: Optional[float] = None
    bounds: List[bounds_mod.BoundValue] = field(default_factory=list)
    hypotheses: List[PropertyReport] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    golden_failures: List[str] = field(default_factory=list)
    error: Optional[str] = None

    def to_dict(self) -> dict:
        d = self.defect
        lem = self.lemma
        return {
            "case": self.name,
            "verdict": self.verdict,
            "eta_step": self.eta_step,
            "defect": d.defect if d else None,
            "simpson_value": d.simpson_value if d else None,
            "mean_integral": d.mean_integral if d else None,
            "quadrature_error": d.quadrature_error if d else None,
            "defect_evaluations": d.evaluations if d else None,
            "lemma_value": lem.value if lem else None,
            "lemma_error_estimate": lem.error_estimate if lem else None,
            "lemma_evaluations": lem.evaluations if lem else None,
            "identity_residual": self.identity_residual,
            "bounds": [bv.to_dict() for bv in self.bounds],
            "hypotheses": [h.to_dict() for h in self.hypotheses],
            "notes": list(self.notes),
            "golden_failures": list(self.golden_failures),
            "error": self.error,
        }


def _theorem_exponents(policy: str, q_list: Sequence[float]) -> List[Optional[float]]:
    if policy == "fixed1":
        return [1.0]
    if policy == "gt1":
        return [q for q in q_list if q > 1.0]
    if policy == "ge1":
        return list(q_list)
    return [None]


def _fmt(x: float) -> str:
    return repr(float(x))


def run_case(case: CorpusCase, grid: SampleGrid = DEFAULT_GRID) -> CaseResult:
    """Run the full pipeline for one loaded case."""
    tol = case.tolerances
    model = case.model
    K = model.domain
    result = CaseResult(case.name, VERDICT_PASS)

    # eta step and interval membership; failures here are input errors
    try:
        step = case.eta(case.b, case.a)
    except EvalDomainError as exc:
        result.verdict = VERDICT_INPUT_ERROR
        result.error = f"EvalDomainError: {exc}"
        return result
    if not step > 0.0:
        result.verdict = VERDICT_INPUT_ERROR
        result.error = (f"InvalidEta: eta(b, a) = {step!r} must be positive "
                        f"for a = {case.a!r}, b = {case.b!r}")
        return result
    result.eta_step = step
    for label, x in (("a", case.a), ("b", case.b), ("a + eta(b, a)", case.a + step)):
        if not K.contains(x):
            result.verdict = VERDICT_INPUT_ERROR
            result.error = f"DomainError: {label} = {x!r} outside K = [{K.lo!r}, {K.hi!r}]"
            return result

    invex_report = check_invex_set(K, case.eta, grid, tol.invexity)
    result.hypotheses.append(invex_report)
    if invex_report.violated:
        result.notes.append(
            f"K is not invex for eta on samples (worst excess "
            f"{_fmt(invex_report.worst_violation)} at {invex_report.witness!r})")

    hyp_cache: Dict[Tuple[str, float], PropertyReport] = {}

    def hypothesis(mode: str, q: float) -> PropertyReport:
        key = (mode, q)
        if key not in hyp_cache:
            pre, quasi = hypothesis_pair(model, case.eta, K, q, grid, tol.invexity)
            hyp_cache[("preinvex", q)] = pre
            hyp_cache[("prequasiinvex", q)] = quasi
            result.hypotheses.extend((pre, quasi))
        return hyp_cache[key]

    try:
        defect = bounds_mod.simpson_defect(model, case.a, step, tol.oracle)
        lemma = bounds_mod.lemma_rhs(model, case.a, step, tol.oracle)
    except (EvalDomainError, DomainError, QuadratureError) as exc:
        result.verdict = VERDICT_INPUT_ERROR
        result.error = f"{type(exc).__name__}: {exc}"
        return result
    result.defect = defect
    result.lemma = lemma
    result.identity_residual = abs(defect.defect - lemma.value)
    identity_budget = tol.identity + defect.quadrature_error + lemma.error_estimate
    identity_ok = result.identity_residual <= identity_budget
    if not identity_ok:
        result.notes.append(
            f"defect identity failed: residual {_fmt(result.identity_residual)} "
            f"exceeds budget {_fmt(identity_budget)}")

    skipped = False
    for theorem in case.theorems:
        mode, policy = _THEOREMS[theorem]
        if theorem == "CLASSICAL":
            result.bounds.append(bounds_mod.bound_classical(model, case.a, step, defect))
            continue
        if invex_report.violated:
            skipped = True
            result.notes.append(f"skipped {theorem}: K is not invex for eta")
            continue
        exponents = _theorem_exponents(policy, case.q_list)
        if not exponents:
            result.notes.append(f"{theorem} needs q > 1 but the case lists none")
            continue
        for q in exponents:
            report = hypothesis(mode, q)
            if report.violated:
                skipped = True
                result.notes.append(
                    f"skipped {theorem} at q={q:g}: |f'|^q is not {mode} on samples "
                    f"(worst excess {_fmt(report.worst_violation)})")
                if q > 1.0 and not hypothesis(mode, 1.0).violated:
                    result.notes.append(
                        f"note: |f'| is {mode} at q=1 but |f'|^q fails at q={q:g}")
                continue
            try:
                result.bounds.append(_evaluate_bound(theorem, case, model, step, q, defect, tol))
            except PreconditionUnmet as exc:
                skipped = True
                result.notes.append(f"skipped {theorem}: {exc}")

    _check_golden(case, result)
    slack_violation = any(
        bv.slack is not None and bv.slack < -tol.slack for bv in result.bounds)
    if slack_violation or not identity_ok:
        result.verdict = VERDICT_VIOLATION
    elif skipped:
        result.verdict = VERDICT_UNMET
    else:
        result.verdict = VERDICT_PASS
    return result


def _evaluate_bound(theorem: str, case: CorpusCase, model, step: float,
                    q: Optional[float], defect, tol: Tolerances) -> bounds_mod.BoundValue:
    a, b = case.a, case.b
    if theorem == "T3.1":
        return bounds_mod.bound_T3_1(model, a, b, step, defect)
    if theorem == "T3.2":
        return bounds_mod.bound_T3_2(model, a, b, step, q, defect)
    if theorem == "T3.3":
        return bounds_mod.bound_T3_3(model, a, b, step, q, defect)
    if theorem == "T3.4":
        return bounds_mod.bound_T3_4(model, a, b, step, q, defect)
    if theorem == "T4.1":
        return bounds_mod.bound_T4_1(model, a, b, step, q, defect)
    if theorem == "T4.2":
        return bounds_mod.bound_T4_2(model, a, b, step, q, defect)
    if theorem == "T4.3":
        return bounds_mod.bound_T4_3(model, a, b, step, q, defect)
    if theorem == "C4.1":
        return bounds_mod.bound_T4_1(model, a, b, step, 1.0, defect, theorem="C4.1")
    if theorem == "C4.2":
        return bounds_mod.bound_C4_2_midpoint(model, a, b, step, tol.oracle)
    raise ValueError(f"unknown theorem id {theorem!r}")


def _check_golden(case: CorpusCase, result: CaseResult) -> None:
    for key, (want, tolerance) in sorted(case.expected.items()):
        theorem, _, q_text = key.partition("@")
        q_want = float(q_text) if q_text else None
        match = None
        for bv in result.bounds:
            if bv.theorem == theorem and (q_want is None or bv.q == q_want):
                match = bv
                break
        if match is None:
            result.golden_failures.append(f"{key}: bound was not evaluated")
        elif abs(match.rhs - want) > tolerance:
            result.golden_failures.append(
                f"{key}: rhs {_fmt(match.rhs)} differs from expected "
                f"{_fmt(want)} by more than {_fmt(tolerance)}")


@dataclass
class RunReport:
    """Results of a corpus run.  wall_time never enters the JSON."""

    results: List[CaseResult]
    wall_time: float

    @property
    def counts(self) -> Dict[str, int]:
        c = {"cases": len(self.results), VERDICT_PASS: 0, VERDICT_UNMET: 0,
             VERDICT_VIOLATION: 0, VERDICT_INPUT_ERROR: 0}
        for r in self.results:
            c[r.verdict] += 1
        return c

    def to_dict(self) -> dict:
        return {
            "cases": [r.to_dict() for r in self.results],
            "counts": self.counts,
        }

    def to_json(self) -> str:
        doc = self.to_dict()
        jsonschema.validate(doc, report_schema())
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        lines = ["case,verdict,theorem,q,p,rhs,slack,defect,quadrature_error,identity_residual"]
        def cell(x):
            return "" if x is None else repr(x) if isinstance(x, float) else str(x)
        for r in self.results:
            d = r.defect
            common = [r.name, r.verdict]
            tail = [cell(d.defect if d else None),
                    cell(d.quadrature_error if d else None),
                    cell(r.identity_residual)]
            if r.bounds:
                for bv in r.bounds:
                    lines.append(",".join(common + [bv.theorem, cell(bv.q), cell(bv.p),
                                                    cell(bv.rhs), cell(bv.slack)] + tail))
            else:
                lines.append(",".join(common + ["", "", "", "", ""] + tail))
        return "\n".join(lines) + "\n"


def _corpus_dir():
    return _resource_files("simpvex").joinpath("corpus")


def load_corpus(name_filter: Optional[str] = None,
                tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[CorpusCase]:
    """Load the bundled cases, optionally keeping names containing ``name_filter``."""
    cases = []
    entries = sorted((e for e in _corpus_dir().iterdir() if e.name.endswith(".json")),
                     key=lambda e: e.name)
    for entry in entries:
        config = json.loads(entry.read_text(encoding="utf-8"))
        case = load_case(config, tolerances)
        if name_filter is None or name_filter in case.name:
            cases.append(case)
    return cases


def run_corpus(name_filter: Optional[str] = None,
               tolerances: Tolerances = DEFAULT_TOLERANCES,
               cases: Optional[Sequence[CorpusCase]] = None,
               grid: SampleGrid = DEFAULT_GRID) -> RunReport:
    """Run all (or filtered) corpus cases and assemble a report."""
    started = time.perf_counter()
    if cases is None:
        cases = load_corpus(name_filter, tolerances)
    results = [run_case(case, grid) for case in cases]
    results.sort(key=lambda r: r.name)
    return RunReport(results, time.perf_counter() - started)


@dataclass(frozen=True)
class TightnessResult:
    """Best |defect| / rhs ratio for one theorem over a scan grid."""

    theorem: str
    status: str  # "ok" or "all_skipped"
    ratio: Optional[float]
    at_a: Optional[float]
    at_b: Optional[float]
    at_q: Optional[float]
    cells: int
    skipped: int


def tightness_scan(model: bounds_mod.FunctionModel, eta: EtaMap, K: Domain,
                   a_range: Tuple[float, float], b_range: Tuple[float, float],
                   q_list: Sequence[float], steps: int,
                   theorems: Sequence[str] = THEOREM_IDS,
                   tolerances: Tolerances = DEFAULT_TOLERANCES,
                   grid: SampleGrid = DEFAULT_GRID) -> List[TightnessResult]:
    """Maximise |defect| / rhs per theorem over an (a, b, q) grid.

    Cells with a non-positive step, a path leaving K, a failed sampled
    hypothesis, or rhs == 0 are skipped; a theorem with no usable cell
    is reported with status "all_skipped".  Ties keep the first cell in
    (a, b, q) iteration order, so results are deterministic.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    tol = tolerances

    def axis(rng):
        lo, hi = float(rng[0]), float(rng[1])
        if lo == hi:
            return [lo] * steps
        return [lo + i * (hi - lo) / (steps - 1) for i in range(steps)]

    a_vals = axis(a_range)
    b_vals = axis(b_range)

    invex_report = check_invex_set(K, eta, grid, tol.invexity)
    hyp_cache: Dict[Tuple[str, float], PropertyReport] = {}

    def hypothesis_ok(mode: Optional[str], q: Optional[float]) -> bool:
        if mode is None:
            return True
        if invex_report.violated:
            return False
        key = (mode, q)
        if key not in hyp_cache:
            pre, quasi = hypothesis_pair(model, eta, K, q, grid, tol.invexity)
            hyp_cache[("preinvex", q)] = pre
            hyp_cache[("prequasiinvex", q)] = quasi
        return not hyp_cache[key].violated

    defect_cache: Dict[Tuple[float, float], Optional[bounds_mod.SimpsonDefect]] = {}

    def defect_at(a: float, step: float):
        key = (a, step)
        if key not in defect_cache:
            try:
                defect_cache[key] = bounds_mod.simpson_defect(model, a, step, tol.oracle)
            except (EvalDomainError, DomainError, QuadratureError):
                defect_cache[key] = None
        return defect_cache[key]

    out = []
    for theorem in theorems:
        mode, policy = _THEOREMS[theorem]
        exponents = _theorem_exponents(policy, q_list)
        best = None  # (ratio, a, b, q)
        cells = 0
        skipped = 0
        for q in exponents:
            if not hypothesis_ok(mode, q):
                skipped += steps * steps
                cells += steps * steps
                continue
            for a in a_vals:
                for b in b_vals:
                    cells += 1
                    try:
                        step = eta(b, a)
                    except EvalDomainError:
                        skipped += 1
                        continue
                    if not (step > 0.0 and K.contains(a) and K.contains(b)
                            and K.contains(a + step)):
                        skipped += 1
                        continue
                    if theorem == "CLASSICAL" and model.d4sup is None:
                        skipped += 1
                        continue
                    defect = defect_at(a, step)
                    if defect is None:
                        skipped += 1
                        continue
                    try:
                        if theorem == "C4.2":
                            bv = bounds_mod.bound_C4_2_midpoint(model, a, b, step, tol.oracle)
                            lhs_mag = abs(bounds_mod.midpoint_gap(model, a, step, tol.oracle)[0])
                        else:
                            bv = _scan_bound(theorem, model, a, b, step, q)
                            lhs_mag = abs(defect.defect)
                    except (PreconditionUnmet, EvalDomainError):
                        skipped += 1
                        continue
                    if bv.rhs == 0.0:
                        skipped += 1
                        continue
                    ratio = lhs_mag / bv.rhs
                    if best is None or ratio > best[0]:
                        best = (ratio, a, b, q)
        if best is None:
            out.append(TightnessResult(theorem, "all_skipped", None, None, None, None,
                                       cells, skipped))
        else:
            ratio, a, b, q = best
            out.append(TightnessResult(theorem, "ok", ratio, a, b, q, cells, skipped))
    return out


def _scan_bound(theorem: str, model, a: float, b: float, step: float,
                q: Optional[float]) -> bounds_mod.BoundValue:
    if theorem == "T3.1":
        return bounds_mod.bound_T3_1(model, a, b, step)
    if theorem == "T3.2":
        return bounds_mod.bound_T3_2(model, a, b, step, q)
    if theorem == "T3.3":
        return bounds_mod.bound_T3_3(model, a, b, step, q)
    if theorem == "T3.4":
        return bounds_mod.bound_T3_4(model, a, b, step, q)
    if theorem == "T4.1":
        return bounds_mod.bound_T4_1(model, a, b, step, q)
    if theorem == "T4.2":
        return bounds_mod.bound_T4_2(model, a, b, step, q)
    if theorem == "T4.3":
        return bounds_mod.bound_T4_3(model, a, b, step, q)
    if theorem == "C4.1":
        return bounds_mod.bound_T4_1(model, a, b, step, 1.0, theorem="C4.1")
    if theorem == "CLASSICAL":
        return bounds_mod.bound_classical(model, a, step)
    raise ValueError(f"unknown theorem id {theorem!r}")


def aggregate_exit_code(results: Sequence[CaseResult], strict: bool = False) -> int:
    """CLI exit code: violation > input_error > strict-unmet > pass."""
    verdicts = {r.verdict for r in results}
    if VERDICT_VIOLATION in verdicts:
        return 1
    if VERDICT_INPUT_ERROR in verdicts:
        return 3
    if strict and VERDICT_UNMET in verdicts:
        return 2
    return 0
