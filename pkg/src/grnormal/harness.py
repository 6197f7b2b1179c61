"""Cross-checks between the closed-form predictor, the proof replay and the engine.

A verification cell is one ``(a, b, d, p)``.  The engine samples curves, the
predictor classifies the cell, and the certificate supplies the guaranteed
conclusion; the verdict says whether the three agree.
"""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .cohomology import DEFAULT_PRIME, sample_normal_types
from .induction import ProofStepFailed, RecursionInvariantBroken, certify
from .predictor import Classification, char2_projective_type, degeneracy_decomposition, predict_report
from .splitcore import dominance_compare, Dominance, most_balanced

CONFIRMED = "Confirmed"
PROVEN_EXCEPTION_CONFIRMED = "ProvenExceptionConfirmed"
INCONCLUSIVE = "Inconclusive"
MISMATCH = "Mismatch"
VERDICTS = (CONFIRMED, PROVEN_EXCEPTION_CONFIRMED, INCONCLUSIVE, MISMATCH)


def default_samples(p: int) -> int:
    return 50 if p == 2 else 5


def resolve_seed(seed: int | None) -> int:
    """Explicit seed, else ``GB_SEED`` from the environment, else 0."""
    if seed is not None:
        return int(seed)
    env = os.environ.get("GB_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise ValueError(f"GB_SEED must be an integer, got {env!r}") from exc


def field_label(p: int) -> str:
    if p == 2:
        return "characteristic 2"
    return f"F_{p} as a proxy for characteristic 0"


@dataclass
class VerificationRecord:
    params: dict
    field: str
    classification: list
    predicted_type: list | None
    certificate: dict | None
    observed: list
    witnesses: list
    checks: dict
    verdict: str
    seeds: list
    samples: int
    rejected: int
    reasons: list = field(default_factory=list)
    timing: float | None = None

    @property
    def key(self) -> tuple:
        p = self.params
        return (p["a"], p["b"], p["d"], p["p"], p["n"])

    def to_dict(self, with_timing: bool = False) -> dict:
        out = {
            "params": self.params,
            "field": self.field,
            "classification": self.classification,
            "predicted_type": self.predicted_type,
            "certificate": self.certificate,
            "observed": self.observed,
            "witnesses": self.witnesses,
            "checks": self.checks,
            "verdict": self.verdict,
            "reasons": self.reasons,
            "samples": self.samples,
            "rejected": self.rejected,
            "seeds": self.seeds,
        }
        if with_timing:
            out["timing"] = self.timing
        return out


def _certificate_summary(a, b, d, n):
    """Certificate for the cell, oriented so that ``b >= 2``; ``None`` if no instance applies."""
    if b < 2:
        if n or a < 2:
            return None
        a, b = b, a
    cert = certify(a, b, d, n)
    return {"instance": [a, b, d, n], "regime": cert.regime.value, "conclusion": cert.conclusion.to_dict()}


def _type_counts(types) -> list:
    counts = {}
    for t in types:
        counts[t.degrees] = counts.get(t.degrees, 0) + 1
    return [{"type": list(k), "count": v} for k, v in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))]


def verify_cell(a: int, b: int, d: int, p: int = DEFAULT_PRIME, samples: int | None = None, seed: int = 0,
                mod_kinds=()) -> VerificationRecord:
    t0 = time.perf_counter()
    if samples is None:
        samples = default_samples(p)
    mod_kinds = tuple(mod_kinds)
    n = sum(1 for k in mod_kinds if k == "lower")
    n_upper = len(mod_kinds) - n
    report = predict_report(a, b, d, char=p)
    primary = report.primary
    cert = _certificate_summary(a, b, d, n) if not n_upper else None

    out = sample_normal_types(a, b, d, p, samples=samples, seed=seed, mod_kinds=mod_kinds)
    types = [bd.type for bd in out.bundles]
    witnesses = most_balanced(types)
    two_bal = [t for t in types if t.is_balanced(2)]
    balanced = [t for t in types if t.is_balanced(1)]
    checks = {
        "validated_samples": len(types),
        "riemann_roch": all(bd.rr_ok for bd in out.bundles),
        "two_balanced_witness": bool(two_bal),
        "balanced_witness": bool(balanced),
    }
    reasons = []
    mismatch = False

    if cert is not None and cert["conclusion"]["kind"] == "TwoBalanced" and two_bal:
        iv = cert["conclusion"]["interval"]
        inside = any(iv[0] <= t.bottom and t.top <= iv[1] for t in two_bal)
        checks["within_certificate_interval"] = inside
        if not inside:
            if cert["conclusion"].get("conditional"):
                # the interval only binds when neither specialization is 2-balanced outright
                reasons.append("2-balanced witness outside the conditional certificate interval")
            else:
                mismatch = True
                reasons.append("2-balanced witness outside the certificate interval")
    if cert is not None and cert["conclusion"]["kind"] == "BoundedAbove" and types:
        cap = cert["conclusion"]["cap"]
        checks["within_cap"] = any(t.top <= cap for t in types)

    if not mod_kinds:
        if primary is not Classification.BALANCED and balanced:
            if primary is not Classification.CHAR2 or p == 2:
                mismatch = True
                reasons.append(f"balanced witness in a proven {primary.value} cell")
        if p == 2 and report.params.a == 1 and types:
            parity = d % 2
            if any(x % 2 != parity for t in types for x in t):
                mismatch = True
                reasons.append("a summand has the wrong parity in characteristic 2")
        if primary is Classification.DEGENERACY and witnesses:
            checks["matches_degeneracy_decomposition"] = [w.to_list() for w in witnesses] == [
                degeneracy_decomposition(a, b, d).to_list()]
        if primary is Classification.CHAR2 and p == 2 and witnesses:
            expected = char2_projective_type(report.params.b, d)
            checks["matches_char2_formula"] = [w.to_list() for w in witnesses] == [expected.to_list()]
            if any(dominance_compare(w, expected) is Dominance.MORE_BALANCED for w in witnesses):
                mismatch = True
                reasons.append("a witness is more balanced than the characteristic-2 generic type")
        if primary is Classification.TANGENT_EXCEPTION and witnesses:
            from .predictor import satisfies_forced
            checks["forced_summands_present"] = all(satisfies_forced(w, report.forced) for w in witnesses)

    if mismatch:
        verdict = MISMATCH
    elif not two_bal:
        verdict = INCONCLUSIVE
        reasons.append("no 2-balanced witness within the sample budget")
    elif mod_kinds:
        verdict = CONFIRMED if cert is not None else INCONCLUSIVE
        if cert is None:
            reasons.append("no proven statement covers upper modifications")
    elif primary is Classification.BALANCED:
        verdict = CONFIRMED if balanced else INCONCLUSIVE
        if not balanced:
            reasons.append("conjecturally balanced but no balanced witness within the sample budget")
    elif primary is Classification.CHAR2:
        if p == 2:
            verdict = CONFIRMED if checks.get("matches_char2_formula") else INCONCLUSIVE
        else:
            verdict = CONFIRMED if balanced else INCONCLUSIVE
    else:
        verdict = PROVEN_EXCEPTION_CONFIRMED

    return VerificationRecord(
        params={"a": a, "b": b, "d": d, "p": p, "n": n, "upper": n_upper},
        field=field_label(p),
        classification=[c.value for c in report.classification],
        predicted_type=None if report.predicted_type is None else report.predicted_type.to_list(),
        certificate=cert,
        observed=_type_counts(types),
        witnesses=[w.to_list() for w in witnesses],
        checks=checks,
        verdict=verdict,
        seeds=list(out.seeds),
        samples=samples,
        rejected=out.rejected,
        reasons=reasons,
        timing=round(time.perf_counter() - t0, 4),
    )


def verify_box(a_max, b_max, d_max, p=DEFAULT_PRIME, samples=None, seed=0, jobs=1, sum_max=None,
               a_min=1, d_min=1) -> list:
    """Every cell with ``a_min <= a <= b``, ``b >= 2``; records sorted by ``(a, b, d, p)``."""
    cells = [(a, b, d) for a in range(a_min, a_max + 1) for b in range(max(a, 2), b_max + 1)
             for d in range(d_min, d_max + 1) if sum_max is None or a + b <= sum_max]
    args = [(a, b, d, p, samples, seed) for a, b, d in cells]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            records = list(ex.map(_verify_star, args))
    else:
        records = [_verify_star(x) for x in args]
    return sorted(records, key=lambda r: r.key)


def _verify_star(args):
    return verify_cell(*args)


def run_header(box: dict, seed: int, p: int, samples: int) -> dict:
    return {"record": "header", "version": __version__, "seed": seed, "p": p, "field": field_label(p),
            "samples": samples, "box": box}


def emit_records(records, path, header: dict, with_timing: bool = False) -> None:
    """Append a run header and one JSON line per record."""
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for r in sorted(records, key=lambda r: r.key):
            fh.write(json.dumps(r.to_dict(with_timing), sort_keys=True) + "\n")


def verdict_counts(records) -> dict:
    out = {v: 0 for v in VERDICTS}
    for r in records:
        out[r.verdict] += 1
    return out


def certify_or_error(a, b, d, n):
    try:
        return certify(a, b, d, n), None
    except (ProofStepFailed, RecursionInvariantBroken) as exc:
        return None, exc
