"""Differential testing of the pivot engine against the simplex referee."""

from __future__ import annotations

import csv
import io
import json
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Optional

from . import engine as eng
from .generators import GeneratorSpec, corpus, regenerate
from .model import Constraint, GeneralLp, canonicalize, emit_instance, format_rational
from .oracle import OPTIMAL, simplex_solve, verify_certificate
from .tableau import build_eq, verify_eq_solution

AGREE = "Agree"
DISAGREE = "Disagree"
INCONCLUSIVE = "EngineInconclusive"

WRONG_OPTIMUM = "WrongOptimum"
MISSED_SOLUTION = "MissedSolution"
SPURIOUS_SOLUTION = "SpuriousSolution"
UNVERIFIED_SOLUTION = "UnverifiedSolution"

CSV_COLUMNS = [
    "id",
    "m",
    "n",
    "engineStatus",
    "oracleStatus",
    "verdict",
    "majorCount",
    "minorCount",
    "boundHolds",
    "totalPivots",
    "mPlusN",
    "engineObjective",
    "oracleObjective",
    "falsifications",
    "traceRef",
]


class OracleCertificateError(RuntimeError):
    """The referee produced a certificate that does not check out."""


def _frac(v: Optional[Fraction]) -> str:
    return "" if v is None else format_rational(v)


@dataclass
class ComparisonRecord:
    instance_id: str
    m: int
    n: int
    engine_status: str
    engine_kind: Optional[str]
    major_count: int
    minor_count: int
    total_pivots: int
    oracle_status: str
    oracle_objective: Optional[Fraction]
    engine_objective: Optional[Fraction]
    verdict: str
    disagreement: Optional[str]
    falsifications: tuple[str, ...]
    engine_verified: Optional[bool]
    trace_ref: Optional[str] = None
    run: Optional[eng.RunResult] = field(default=None, repr=False, compare=False)

    @property
    def size(self) -> int:
        return self.m + self.n

    @property
    def bound_holds(self) -> bool:
        return self.major_count <= self.size

    @property
    def label(self) -> str:
        return f"{DISAGREE}({self.disagreement})" if self.verdict == DISAGREE else self.verdict

    @property
    def engine_label(self) -> str:
        return f"{self.engine_status}({self.engine_kind})" if self.engine_kind else self.engine_status

    @property
    def is_evidence(self) -> bool:
        return self.verdict == DISAGREE or bool(self.falsifications)

    @property
    def needs_persisting(self) -> bool:
        return self.is_evidence or self.verdict == INCONCLUSIVE

    def row(self) -> dict:
        return {
            "id": self.instance_id,
            "m": self.m,
            "n": self.n,
            "engineStatus": self.engine_label,
            "oracleStatus": self.oracle_status,
            "verdict": self.label,
            "majorCount": self.major_count,
            "minorCount": self.minor_count,
            "boundHolds": str(self.bound_holds).lower(),
            "totalPivots": self.total_pivots,
            "mPlusN": self.size,
            "engineObjective": _frac(self.engine_objective),
            "oracleObjective": _frac(self.oracle_objective),
            "falsifications": ";".join(self.falsifications),
            "traceRef": self.trace_ref or "",
        }

    def to_json(self) -> dict:
        out = self.row()
        out["boundHolds"] = self.bound_holds
        out["engineVerified"] = self.engine_verified
        return out


def differential_run(
    lp: GeneralLp,
    cfg: Optional[eng.EngineConfig] = None,
    instance_id: str = "adhoc",
    engine: Callable = eng.run,
    oracle: Callable = simplex_solve,
) -> ComparisonRecord:
    """Run both solvers on ``lp`` and classify the outcome. Engine events never raise."""
    clp = canonicalize(lp)
    ores = oracle(clp)
    if not verify_certificate(clp, ores):
        raise OracleCertificateError(f"{instance_id}: oracle certificate failed for status {ores.status}")
    eres = engine(clp, cfg or eng.EngineConfig())

    verified = None
    if eres.status == eng.SOLVED:
        verified = eres.z is not None and verify_eq_solution(build_eq(clp, 0), eres.z).ok

    disagreement = None
    if eres.status == eng.SOLVED:
        if ores.status != OPTIMAL:
            disagreement = SPURIOUS_SOLUTION
        elif eres.objective != ores.objective:
            disagreement = WRONG_OPTIMUM
        elif not verified:
            disagreement = UNVERIFIED_SOLUTION
        verdict = DISAGREE if disagreement else AGREE
    elif eres.status == eng.NO_SOLUTION:
        disagreement = MISSED_SOLUTION if ores.status == OPTIMAL else None
        verdict = DISAGREE if disagreement else AGREE
    else:
        verdict = INCONCLUSIVE

    return ComparisonRecord(
        instance_id=instance_id,
        m=clp.m,
        n=clp.n,
        engine_status=eres.status,
        engine_kind=eres.kind,
        major_count=eres.major_count,
        minor_count=eres.minor_count,
        total_pivots=eres.total_pivots,
        oracle_status=ores.status,
        oracle_objective=ores.objective,
        engine_objective=eres.objective,
        verdict=verdict,
        disagreement=disagreement,
        falsifications=tuple(eres.falsification_kinds),
        engine_verified=verified,
        run=eres,
    )


@dataclass
class CampaignReport:
    config: dict
    records: list[ComparisonRecord]
    runtime_seconds: float = 0.0
    artifacts: dict[str, str] = field(default_factory=dict)  # instance id -> directory

    @property
    def verdict_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.records:
            out[r.label] = out.get(r.label, 0) + 1
        return dict(sorted(out.items()))

    @property
    def bound_violations(self) -> int:
        return sum(not r.bound_holds for r in self.records)

    @property
    def falsification_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.records:
            for k in r.falsifications:
                out[k] = out.get(k, 0) + 1
        return dict(sorted(out.items()))

    @property
    def counterexamples(self) -> list[str]:
        return [r.instance_id for r in self.records if r.is_evidence]

    @property
    def inconclusive(self) -> list[str]:
        return [r.instance_id for r in self.records if r.verdict == INCONCLUSIVE]

    @property
    def exit_code(self) -> int:
        if self.counterexamples:
            return 2
        if self.inconclusive:
            return 3
        return 0

    def summary(self) -> dict:
        majors = [r.major_count for r in self.records]
        return {
            "config": self.config,
            "instances": len(self.records),
            "verdicts": self.verdict_counts,
            "oracleStatuses": _count(r.oracle_status for r in self.records),
            "engineStatuses": _count(r.engine_label for r in self.records),
            "boundHolds": len(self.records) - self.bound_violations,
            "boundViolations": self.bound_violations,
            "maxMajorCount": max(majors, default=0),
            "maxMajorOverSize": max((f"{r.major_count}/{r.size}" for r in self.records), key=_ratio, default="0/1"),
            "falsifications": self.falsification_counts,
            "counterexamples": self.counterexamples,
            "inconclusive": self.inconclusive,
        }

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.records:
            w.writerow(r.row())
        return buf.getvalue()

    def summary_text(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"


def _count(items: Iterable[str]) -> dict[str, int]:
    out: dict[str, int] = {}
    for it in items:
        out[it] = out.get(it, 0) + 1
    return dict(sorted(out.items()))


def _ratio(s: str) -> Fraction:
    a, b = s.split("/")
    return Fraction(int(a), max(int(b), 1))


def _slug(index: int, ident: str) -> str:
    return f"{index:05d}-" + re.sub(r"[^A-Za-z0-9]+", "_", ident).strip("_")


def _evaluate(job):
    index, ident, cfg = job
    rec = differential_run(regenerate(ident), cfg, ident)
    trace_text = rec.run.trace.dumps() if rec.needs_persisting else None
    rec.run = None
    return index, rec, trace_text


def fuzz(
    specs: Iterable[GeneratorSpec],
    count: int,
    seed_base: int = 0,
    cfg: Optional[eng.EngineConfig] = None,
    out_dir: Optional[Path] = None,
    workers: int = 1,
) -> CampaignReport:
    """Run a campaign. With ``out_dir``, write records.csv, summary.json and one
    directory per evidence or inconclusive record under counterexamples/."""
    specs = list(specs)
    cfg = cfg or eng.EngineConfig()
    ids = [ident for ident, _ in corpus(specs, count, seed_base)]
    jobs = [(i, ident, cfg) for i, ident in enumerate(ids)]
    start = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate, jobs, chunksize=16))
    else:
        results = [_evaluate(j) for j in jobs]
    results.sort(key=lambda r: r[0])
    config = {
        "specs": [asdict(s) for s in specs],
        "count": count,
        "seedBase": seed_base,
        "engine": cfg.to_json(),
    }
    report = CampaignReport(config, [rec for _, rec, _ in results])
    if out_dir is not None:
        out_dir = Path(out_dir)
        cdir = out_dir / "counterexamples"
        cdir.mkdir(parents=True, exist_ok=True)
        for index, rec, trace_text in results:
            if trace_text is None:
                continue
            slug = _slug(index, rec.instance_id)
            d = cdir / slug
            d.mkdir(exist_ok=True)
            (d / "instance.lp").write_text(emit_instance(regenerate(rec.instance_id)))
            (d / "trace.jsonl").write_text(trace_text)
            rec.trace_ref = f"counterexamples/{slug}/trace.jsonl"
            (d / "record.json").write_text(json.dumps(rec.to_json(), indent=2, sort_keys=True) + "\n")
            report.artifacts[rec.instance_id] = str(d)
        (out_dir / "records.csv").write_text(report.csv_text())
        (out_dir / "summary.json").write_text(report.summary_text())
    report.runtime_seconds = time.perf_counter() - start
    if out_dir is not None:
        (Path(out_dir) / "runtime.json").write_text(json.dumps({"seconds": round(report.runtime_seconds, 3)}) + "\n")
    return report


def klee_minty_table(report: CampaignReport) -> list[dict]:
    """Per-instance rows of a Klee-Minty campaign: d, m + n, engine counters, oracle optimum."""
    rows = []
    for r in report.records:
        spec = GeneratorSpec.from_id(r.instance_id)
        rows.append(
            {
                "d": spec.d,
                "mPlusN": r.size,
                "majorCount": r.major_count,
                "minorCount": r.minor_count,
                "boundHolds": r.bound_holds,
                "engineStatus": r.engine_label,
                "oracleObjective": _frac(r.oracle_objective),
                "verdict": r.label,
            }
        )
    return rows


def _without_constraint(lp: GeneralLp, k: int) -> GeneralLp:
    return GeneralLp(lp.sense, lp.c, lp.constraints[:k] + lp.constraints[k + 1:], lp.free)


def _without_variable(lp: GeneralLp, j: int) -> GeneralLp:
    cons = tuple(Constraint(con.coeffs[:j] + con.coeffs[j + 1:], con.relation, con.rhs) for con in lp.constraints)
    free = frozenset(i if i < j else i - 1 for i in lp.free if i != j)
    return GeneralLp(lp.sense, lp.c[:j] + lp.c[j + 1:], cons, free)


def _zeroings(lp: GeneralLp):
    for j, v in enumerate(lp.c):
        if v != 0:
            yield GeneralLp(lp.sense, lp.c[:j] + (Fraction(0),) + lp.c[j + 1:], lp.constraints, lp.free)
    for k, con in enumerate(lp.constraints):
        for j, v in enumerate(con.coeffs):
            if v != 0:
                coeffs = con.coeffs[:j] + (Fraction(0),) + con.coeffs[j + 1:]
                new = Constraint(coeffs, con.relation, con.rhs)
                yield GeneralLp(lp.sense, lp.c, lp.constraints[:k] + (new,) + lp.constraints[k + 1:], lp.free)
        if con.rhs != 0:
            new = Constraint(con.coeffs, con.relation, 0)
            yield GeneralLp(lp.sense, lp.c, lp.constraints[:k] + (new,) + lp.constraints[k + 1:], lp.free)


def _candidates(lp: GeneralLp):
    for k in range(lp.m):
        yield _without_constraint(lp, k)
    if lp.n > 1:
        for j in range(lp.n):
            yield _without_variable(lp, j)
    yield from _zeroings(lp)


def shrink(
    lp: GeneralLp,
    predicate: Callable[[ComparisonRecord], bool],
    cfg: Optional[eng.EngineConfig] = None,
) -> GeneralLp:
    """Greedily drop constraints, variables and coefficients while ``predicate`` keeps holding."""
    if not predicate(differential_run(lp, cfg)):
        raise ValueError("predicate does not hold on the starting instance")
    changed = True
    while changed:
        changed = False
        for cand in _candidates(lp):
            if predicate(differential_run(cand, cfg)):
                lp = cand
                changed = True
                break
    return lp
