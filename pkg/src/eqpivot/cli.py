"""Command-line entry point: ``eqpivot <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import engine as eng
from .generators import GeneratorSpec, beale, generate, worked_instance
from .harness import INCONCLUSIVE, differential_run, fuzz, klee_minty_table
from .model import LpSyntaxError, canonicalize, emit_instance, format_rational, parse_instance, parse_rational
from .oracle import INFEASIBLE, OPTIMAL, UNBOUNDED, simplex_solve, verify_certificate
from .tableau import EqTableau, HypothesisViolation, reduce_to_pr

log = logging.getLogger("eqpivot")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_EVIDENCE = 2
EXIT_INCONCLUSIVE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- formatting


def _q(v: Optional[Fraction]) -> Optional[str]:
    return None if v is None else format_rational(v)


def _human(v: Optional[Fraction]) -> str:
    if v is None:
        return "-"
    if v.denominator == 1:
        return str(v.numerator)
    return f"{format_rational(v)} (~{float(v):.6g})"


def _vec_h(vs) -> str:
    return "-" if vs is None else "(" + ", ".join(_human(v) for v in vs) + ")"


def _vec_q(vs):
    return None if vs is None else [format_rational(v) for v in vs]


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print("\n".join(lines))


# ---------------------------------------------------------------- inputs


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load_lp(path: str):
    text = _read(path)
    try:
        return parse_instance(text)
    except LpSyntaxError as exc:
        raise UsageError(f"{path}:{exc}") from None


def _theta(text: str) -> Fraction:
    try:
        v = parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--theta expects p/q, got {text!r}") from None
    if v < 0:
        raise UsageError("--theta must be nonnegative")
    return v


def _config(args) -> eng.EngineConfig:
    cap = args.pivot_cap
    if cap is not None and cap < 1:
        raise UsageError("--pivot-cap must be positive")
    return eng.EngineConfig(theta=_theta(args.theta), pivot_cap=cap)


def _write_trace(args, trace: eng.PivotTrace) -> None:
    if args.trace:
        try:
            Path(args.trace).write_text(trace.dumps())
        except OSError as exc:
            raise UsageError(f"cannot write {args.trace}: {exc.strerror or exc}") from None


# ---------------------------------------------------------------- subcommands


def cmd_solve(args) -> int:
    cfg = _config(args)
    clp = canonicalize(_load_lp(args.file))
    try:
        res = eng.run(clp, cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write_trace(args, res.trace)
    x = clp.original_x(res.x) if res.x is not None else None
    obj = clp.original_objective(res.x) if res.x is not None else None
    kinds = res.falsification_kinds
    payload = {
        "status": res.status,
        "kind": res.kind,
        "objective": _q(obj),
        "x": _vec_q(x),
        "y": _vec_q(res.y),
        "majorCount": res.major_count,
        "minorCount": res.minor_count,
        "totalPivots": res.total_pivots,
        "mPlusN": res.size,
        "boundHolds": res.bound_holds,
        "reductions": res.reductions,
        "events": [e.to_json() for e in res.events],
        "detail": res.detail,
    }
    lines = [
        f"status: {res.status}" + (f" ({res.kind})" if res.kind else ""),
        f"objective: {_human(obj)}",
        f"x: {_vec_h(x)}",
        f"y: {_vec_h(res.y)}",
        f"majorCount: {res.major_count}  minorCount: {res.minor_count}  totalPivots: {res.total_pivots}"
        f"  m+n: {res.size}  boundHolds: {str(res.bound_holds).lower()}",
    ]
    for e in res.events:
        lines.append(f"event: {e.kind} at step {e.step}: {e.detail}")
    if res.detail:
        lines.append(f"detail: {res.detail}")
    _emit(args, payload, lines)
    if kinds:
        return EXIT_EVIDENCE
    if res.status in (eng.REDUCED, eng.PIVOT_CAP):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_oracle(args) -> int:
    clp = canonicalize(_load_lp(args.file))
    res = simplex_solve(clp)
    ok = verify_certificate(clp, res)
    payload = {"status": res.status, "certificateVerified": ok, "pivots": res.pivots}
    lines = [f"status: {res.status}"]
    if res.status == OPTIMAL:
        x = clp.original_x(res.x)
        obj = clp.original_objective(res.x)
        payload.update(objective=_q(obj), x=_vec_q(x), y=_vec_q(res.y))
        lines += [f"objective: {_human(obj)}", f"x: {_vec_h(x)}", f"y: {_vec_h(res.y)}"]
    elif res.status == INFEASIBLE:
        payload["farkas"] = _vec_q(res.farkas)
        lines.append(f"farkas u: {_vec_h(res.farkas)}  (u >= 0, u A >= 0, u b < 0)")
    elif res.status == UNBOUNDED:
        payload.update(x=_vec_q(clp.original_x(res.x)), ray=_vec_q(clp.original_x(res.ray)))
        lines += [f"feasible x: {_vec_h(clp.original_x(res.x))}", f"ray: {_vec_h(clp.original_x(res.ray))}"]
    lines.append(f"certificate: {'verified' if ok else 'FAILED'}")
    _emit(args, payload, lines)
    if not ok:
        print("error: oracle certificate did not verify", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def cmd_diff(args) -> int:
    cfg = _config(args)
    lp = _load_lp(args.file)
    rec = differential_run(lp, cfg, instance_id=args.file)
    _write_trace(args, rec.run.trace)
    payload = rec.to_json()
    payload.pop("traceRef")
    if args.trace:
        payload["traceRef"] = args.trace
    lines = [
        f"verdict: {rec.label}",
        f"engine: {rec.engine_label}  objective {_human(rec.engine_objective)}",
        f"oracle: {rec.oracle_status}  objective {_human(rec.oracle_objective)}",
        f"majorCount: {rec.major_count}  minorCount: {rec.minor_count}  totalPivots: {rec.total_pivots}"
        f"  m+n: {rec.size}  boundHolds: {str(rec.bound_holds).lower()}",
    ]
    if rec.falsifications:
        lines.append("falsifications: " + ", ".join(rec.falsifications))
    _emit(args, payload, lines)
    if rec.is_evidence:
        return EXIT_EVIDENCE
    if rec.verdict == INCONCLUSIVE:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_fuzz(args) -> int:
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    if args.max_m < 1 or args.max_n < 1:
        raise UsageError("--max-m and --max-n must be >= 1")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    cfg = _config(args)
    if args.kind == "klee-minty":
        specs = [GeneratorSpec("klee-minty", d=d) for d in range(1, args.count + 1)]
    else:
        specs = [
            GeneratorSpec(args.kind, max_m=args.max_m, max_n=args.max_n, magnitude=args.magnitude, max_den=args.max_den)
        ]
    out = Path(args.out) if args.out else None
    log.info("campaign start: %d instances, kind %s", args.count, args.kind)
    try:
        report = fuzz(specs, args.count, args.seed, cfg, out, args.workers)
    except OSError as exc:
        raise UsageError(f"cannot write report: {exc}") from None
    log.info("campaign done in %.2fs", report.runtime_seconds)
    summary = report.summary()
    table = klee_minty_table(report) if args.kind == "klee-minty" else None
    if table is not None and out is not None:
        with open(out / "klee_minty.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(table[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(table)
    if args.json:
        payload = dict(summary)
        if table is not None:
            payload["kleeMinty"] = table
        print(json.dumps(payload, sort_keys=True))
    else:
        lines = [f"instances: {summary['instances']}"]
        lines += [f"  {k}: {v}" for k, v in summary["verdicts"].items()]
        lines.append(f"boundHolds: {summary['boundHolds']}  boundViolations: {summary['boundViolations']}")
        lines.append("falsifications: " + (", ".join(f"{k}={v}" for k, v in summary["falsifications"].items()) or "none"))
        if table is not None:
            lines.append("d  m+n  majorCount  minorCount  oracle  verdict")
            lines += [
                f"{r['d']:<2} {r['mPlusN']:<4} {r['majorCount']:<11} {r['minorCount']:<11} {r['oracleObjective']:<7} {r['verdict']}"
                for r in table
            ]
        if out is not None:
            lines.append(f"report: {out}")
        print("\n".join(lines))
    return report.exit_code


def cmd_gen(args) -> int:
    if args.family == "klee-minty":
        try:
            spec = GeneratorSpec("klee-minty", d=args.d, base=args.base, factor=args.factor)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        lp, ident = generate(spec), spec.instance_id()
    elif args.family == "beale":
        lp, ident = beale(), "beale"
    elif args.family == "paper":
        lp, ident = worked_instance(), "paper"
    else:
        kind = "degenerate" if args.degenerate else "random"
        try:
            spec = GeneratorSpec(kind, seed=args.seed, m=args.m, n=args.n, magnitude=args.magnitude, max_den=args.max_den)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        spec = spec.resolve(args.seed)
        lp, ident = generate(spec), spec.instance_id()
    text = emit_instance(lp)
    if args.json:
        print(json.dumps({"id": ident, "instance": text}, sort_keys=True))
    else:
        sys.stdout.write(f"# {ident}\n" + text)
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        trace = eng.PivotTrace.loads(_read(args.trace_file))
    except (ValueError, KeyError) as exc:
        raise UsageError(f"{args.trace_file}: not a trace file ({exc})") from None
    try:
        states = eng.replay(trace)
    except (eng.TraceMismatch, ValueError) as exc:
        payload = {"replayed": False, "error": str(exc)}
        _emit(args, payload, [f"replay FAILED: {exc}"])
        return EXIT_USAGE
    final = states[-1]
    payload = {"replayed": True, "steps": len(trace.steps), "final": final.to_json()}
    _emit(args, payload, [f"replayed {len(trace.steps)} steps, every snapshot matches"])
    return EXIT_OK


def _parse_solution(text: str) -> list[Fraction]:
    text = text.strip()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        tokens = text.replace(",", " ").replace("(", " ").replace(")", " ").split()
    else:
        if isinstance(data, dict):
            data = data.get("z")
        if not isinstance(data, list):
            raise UsageError("solution JSON must be a list or an object with key 'z'")
        tokens = [str(v) for v in data]
    try:
        return [parse_rational(t) for t in tokens]
    except (ValueError, ZeroDivisionError):
        raise UsageError("solution entries must be rationals p/q") from None


def _parse_pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--pair expects a,b got {text!r}") from None
    return a, b


def cmd_check_reduction(args) -> int:
    try:
        t = EqTableau.from_json(json.loads(_read(args.tableau)))
    except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"{args.tableau}: not a tableau file ({exc})") from None
    z = _parse_solution(_read(args.solution))
    a, b = _parse_pair(args.pair)
    if not (1 <= a <= t.ncols and 1 <= b <= t.ncols):
        raise UsageError(f"--pair columns must lie in 1..{t.ncols}")
    try:
        pr = reduce_to_pr(t, z, (a - 1, b - 1))
    except (HypothesisViolation, ValueError) as exc:
        raise UsageError(f"reduction hypothesis fails: {exc}") from None
    labels = [f"C{j + 1}" for j in pr.columns]
    payload = {
        "columns": labels,
        "P": [[format_rational(v) for v in row] for row in pr.P],
        "r": [format_rational(v) for v in pr.r],
        "moved": {f"C{j + 1}": format_rational(w) for j, w in pr.moved},
    }
    width = max(len(format_rational(v)) for row in pr.P for v in row)
    lines = ["P = [" + "|".join(labels) + "]"]
    lines += ["  " + " ".join(format_rational(v).rjust(width) for v in row) for row in pr.P]
    lines.append("r = (" + ", ".join(format_rational(v) for v in pr.r) + ")")
    lines.append("moved: " + ", ".join(f"z{j + 1}={format_rational(w)}" for j, w in pr.moved))
    _emit(args, payload, lines)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _globals(suppress: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--theta", default=d("1"), help="gap-row multiplier added to equality rows, p/q (default 1)")
    p.add_argument("--pivot-cap", type=int, default=d(None), help="engine step cap (default 4(m+n))")
    p.add_argument("--trace", default=d(None), metavar="PATH", help="write the pivot trace as JSONL")
    p.add_argument("--json", action="store_true", default=d(False), help="emit one JSON document")
    return p


def build_parser() -> argparse.ArgumentParser:
    sub_globals = _globals(True)
    parser = _Parser(prog="eqpivot", description=__doc__, parents=[_globals(False)])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, parents=[sub_globals])
        p.set_defaults(func=func)
        return p

    add("solve", cmd_solve, "run the pivot engine").add_argument("file")
    add("oracle", cmd_oracle, "run the simplex referee and check its certificate").add_argument("file")
    add("diff", cmd_diff, "compare engine and referee on one instance").add_argument("file")

    p = add("fuzz", cmd_fuzz, "differential campaign over generated instances")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-m", type=int, default=8)
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--out", default=None, metavar="DIR")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--kind", choices=("random", "degenerate", "klee-minty"), default="random",
                   help="klee-minty sweeps d = 1..count")
    p.add_argument("--magnitude", type=int, default=5)
    p.add_argument("--max-den", type=int, default=1)

    p = add("gen", cmd_gen, "write an instance file to standard output")
    fam = p.add_subparsers(dest="family", required=True, parser_class=_Parser)
    km = fam.add_parser("klee-minty", parents=[sub_globals])
    km.add_argument("--d", type=int, required=True)
    km.add_argument("--base", type=int, default=5)
    km.add_argument("--factor", type=int, default=2, help="coupling factor; 4 gives the classic worst case")
    fam.add_parser("beale", parents=[sub_globals])
    fam.add_parser("paper", parents=[sub_globals])
    rnd = fam.add_parser("random", parents=[sub_globals])
    rnd.add_argument("--seed", type=int, required=True)
    rnd.add_argument("--m", type=int, default=None)
    rnd.add_argument("--n", type=int, default=None)
    rnd.add_argument("--magnitude", type=int, default=5)
    rnd.add_argument("--max-den", type=int, default=1)
    rnd.add_argument("--degenerate", action="store_true")

    add("replay", cmd_replay, "re-apply a recorded trace and check every snapshot").add_argument(
        "trace_file", metavar="TRACE"
    )

    p = add("check-reduction", cmd_check_reduction, "fold a solution into the reduced system P z = r")
    p.add_argument("--tableau", required=True, metavar="FILE")
    p.add_argument("--solution", required=True, metavar="FILE")
    p.add_argument("--pair", required=True, metavar="a,b", help="1-based column numbers")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
