import dataclasses
import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqpivot import engine as eng
from eqpivot.generators import GeneratorSpec, generate, klee_minty, worked_instance
from eqpivot.model import CanonicalLp, canonicalize
from eqpivot.oracle import OPTIMAL, simplex_solve
from eqpivot.tableau import EqTableau, PivotError, build_eq, gj_pivot, same_row_space, verify_eq_solution
from helpers import canonical_lps, load_mq4, load_printed_mq1


def worked_lp():
    return canonicalize(worked_instance())


@pytest.fixture(scope="module")
def worked_run():
    return eng.run(worked_lp())


def test_worked_instance_solved(worked_run):
    r = worked_run
    assert r.status == eng.SOLVED
    assert r.objective == 7 and r.x == (2, 3) and r.y == (1, 1)
    assert r.major_count == 2 and r.minor_count == 2
    assert r.bound_holds and not r.falsification_kinds


def test_worked_instance_step_sequence(worked_run):
    ops = [(s.op, s.phase, s.row, s.col) for s in worked_run.trace.steps]
    assert ops == [
        ("pivot", eng.MINOR, 3, 3),
        ("pivot", eng.MAJOR, 0, 0),
        ("augment", eng.MINOR, None, None),
        ("pivot", eng.MINOR, 2, 2),
        ("pivot", eng.MAJOR, 1, 1),
    ]


def test_worked_instance_fourth_tableau_matches_fixture(worked_run):
    snap = worked_run.trace.steps[3].snapshot
    assert snap.rows == load_mq4().rows
    assert snap.basis == load_mq4().basis


def test_replay_and_roundtrip(worked_run):
    text = worked_run.trace.dumps()
    back = eng.PivotTrace.loads(text)
    assert back.dumps() == text
    states = eng.replay(back)
    assert states[-1] == worked_run.trace.steps[-1].snapshot
    header = json.loads(text.splitlines()[0])
    assert set(header) == {"instance", "config", "initial"}


def test_replay_detects_tampering(worked_run):
    lines = worked_run.trace.dumps().splitlines()
    step = json.loads(lines[2])
    step["snapshot"]["rows"][0][0] = "99"
    lines[2] = json.dumps(step)
    with pytest.raises(eng.TraceMismatch) as err:
        eng.replay(eng.PivotTrace.loads("\n".join(lines)))
    assert err.value.step == 1


def test_elided_snapshots_replay():
    r = eng.run(worked_lp(), eng.EngineConfig(snapshots="elided"))
    assert all(s.snapshot is None and s.gap_row is not None for s in r.trace.steps)
    eng.replay(eng.PivotTrace.loads(r.trace.dumps()))


def test_theta_zero_run_is_consistent():
    r = eng.run(worked_lp(), eng.EngineConfig(theta=0))
    assert r.status in (eng.SOLVED, eng.NO_SOLUTION, eng.FALSIFIED, eng.REDUCED, eng.PIVOT_CAP)
    if r.status == eng.SOLVED:
        assert r.objective == 7
    eng.replay(r.trace)


def test_config_validation():
    with pytest.raises(ValueError):
        eng.EngineConfig(theta=-1)
    with pytest.raises(ValueError):
        eng.EngineConfig(snapshots="some")
    with pytest.raises(ValueError):
        eng.EngineConfig(pivot_cap=2).cap_for(4)
    assert eng.EngineConfig().cap_for(4) == 16
    cfg = eng.EngineConfig(theta=F(1, 2), pivot_cap=9)
    assert eng.EngineConfig.from_json(cfg.to_json()) == cfg


def test_pivot_cap_reported():
    lp = canonicalize(generate(GeneratorSpec("random", seed=0, m=5, n=7)))
    r = eng.run(lp, eng.EngineConfig(pivot_cap=12))
    assert r.status == eng.PIVOT_CAP
    assert r.total_pivots == 12


def test_majorp_select_tie_breaks_low():
    t = load_mq4()
    # gap row (0 1 0 0 0 0 -1 1): columns 1 and 7 tie at 1
    assert eng.majorp_select(t) == 1


def test_majorp_select_needs_positive_rhs():
    t = build_eq(worked_lp(), 0)
    with pytest.raises(ValueError):
        eng.majorp_select(t)


def test_majorp_row_uses_complement():
    t = load_mq4()
    row, fallback = eng.majorp_row(t, 1)
    assert (row, fallback) == (1, False)  # complement 5 is basic in row 1
    after = eng.majorp_pivot(t, 1)
    assert after.basis[1] == 1


def test_classify_selection():
    h = eng.SelectionHistory(4)
    assert eng.classify_selection(h, 0) == eng.FRESH
    h.add(eng.Selection(eng.MAJOR, 0, 0, 0))
    assert eng.classify_selection(h, 0) == eng.REPEAT
    assert eng.classify_selection(h, 4) == eng.REVERSAL
    assert eng.classify_selection(h, 1) == eng.FRESH
    h.add(eng.Selection(eng.MINOR, 4, 0, 1))
    assert h.reversed_columns == [0]
    assert h.major_columns == [0]


def test_minorp_candidates_order():
    t = build_eq(worked_lp(), 1)
    assert eng.minorp_candidates(t) == [3, 2]  # q = (..., -2, -1): smaller magnitude first
    assert eng.minorp_select(t) == (3, 3)


def test_minorp_signals():
    t = build_eq(worked_lp(), 0)
    solved = EqTableau(t.m, t.n, tuple(r[:-1] + (abs(r[-1]),) for r in t.rows), t.basis)
    assert eng.minorp_select(solved) == eng.NO_NEGATIVE_Q
    # without theta the negative rows' complement entries are zero while the gap entries are not
    assert eng.minorp_select(t) == eng.BLOCKED
    assert eng.run(worked_lp(), eng.EngineConfig(theta=0)).kind == eng.STALLED


def _tab(rows, basis, m=1, n=1):
    return EqTableau(m, n, tuple(tuple(F(v) for v in r) for r in rows), basis)


def test_runner_gap_fix_branch():
    runner = eng._Runner(worked_lp(), eng.EngineConfig())
    # row 0 is negative and its complement column 0 has a zero gap entry
    runner.t = _tab([[1, 0, 1, 0, -1], [0, 1, 0, 1, 2], [0, 1, 0, 0, 0]], (2, 3))
    assert eng.minorp_select(runner.t) == eng.ALL_BOTTOM_ZERO
    assert runner.minor_step() is None
    step = runner.trace.steps[-1]
    assert (step.op, step.row, step.epsilon) == ("gap-fix", 1, 1)
    assert runner.t.rows[2] == (0, 2, 0, 1, 2)


def test_runner_reduce_branch():
    runner = eng._Runner(worked_lp(), eng.EngineConfig())
    runner.t = _tab([[1, 0, 1, 0, -1], [0, 1, 0, 1, 2], [0, 0, 0, 0, 0]], (2, 3))
    assert isinstance(eng.degenerate_fix(runner.t), eng.ReduceProblem)
    assert runner.minor_step() is None
    assert runner.reductions == 1 and runner.trace.steps[-1].op == "reduce"
    assert (runner.t.m, runner.t.n, runner.t.basis) == (0, 1, (1,))
    runner.max_reductions = 1
    runner.t = _tab([[1, 0, -1], [0, 0, 0]], (1,), m=0, n=1)
    out = runner.minor_step()
    assert out.status == eng.REDUCED and out.reduced is not None


def test_gap_fix_epsilon():
    assert eng.gap_fix_epsilon([F(2), F(0), F(3)], [F(-1), F(5), F(-6)]) == F(1, 4)
    assert eng.gap_fix_epsilon([F(1)], [F(2)]) == 1


def test_degenerate_fix_keeps_positive_entries_positive():
    t = build_eq(CanonicalLp([[1, 1], [1, -1]], [0, 2], [1, 1]), 0)
    out = eng.degenerate_fix(t)
    if isinstance(out, eng.ReduceProblem):
        assert out.columns == (out.row, out.row + t.size)
    else:
        new, r, eps = out
        assert eps > 0
        for old, nv in zip(t.rows[-1][:-1], new.rows[-1][:-1]):
            if old > 0:
                assert nv > 0


def test_drop_pair_shapes():
    t = build_eq(worked_lp(), 0)
    d = eng.drop_pair(t, 1)
    assert (d.m, d.n) == (1, 2) and d.ncols == 6 and len(d.rows) == 4
    assert d.basis == (3, 4, 5)
    with pytest.raises(ValueError):
        eng.drop_pair(gj_pivot(build_eq(worked_lp(), 1), 1, 0), 1)


def test_apply_step_rejects_unknown_op():
    with pytest.raises(ValueError):
        eng.apply_step(load_mq4(), eng.Step(0, "teleport", eng.MAJOR))


def test_events_serialize():
    r = eng.run(canonicalize(generate(GeneratorSpec("random", seed=0, m=5, n=7))))
    for e in r.events:
        assert set(e.to_json()) == {"kind", "step", "detail"}
    if r.status == eng.FALSIFIED:
        assert r.kind in r.falsification_kinds


@pytest.mark.parametrize("d", range(1, 7))
def test_klee_minty_solved(d):
    r = eng.run(canonicalize(klee_minty(d)))
    assert r.status == eng.SOLVED and r.objective == 5**d


@settings(max_examples=80, deadline=None)
@given(canonical_lps(max_m=4, max_n=4))
def test_soundness_gate(lp):
    r = eng.run(lp)
    assert r.total_pivots == r.major_count + r.minor_count
    assert r.total_pivots <= eng.EngineConfig().cap_for(lp.m + lp.n)
    if r.status == eng.SOLVED:
        assert verify_eq_solution(build_eq(lp, 0), r.z).ok
        ref = simplex_solve(lp)
        assert ref.status == OPTIMAL and ref.objective == r.objective
    eng.replay(eng.PivotTrace.loads(r.trace.dumps()))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_runs_are_deterministic(seed):
    lp = canonicalize(generate(GeneratorSpec("degenerate").resolve(seed)))
    a, b = eng.run(lp), eng.run(lp)
    assert a.trace.dumps() == b.trace.dumps()
    assert dataclasses.replace(a, trace=None) == dataclasses.replace(b, trace=None)


def test_majorp_on_printed_initial_gap_row():
    printed = load_printed_mq1()
    rows = [tuple(F(v) for v in r) for r in printed]
    rows[4] = rows[4][:-1] + (F(1),)  # give the gap row a positive rhs so MajorP applies
    t = EqTableau(2, 2, tuple(rows), (4, 5, 6, 7))
    assert eng.majorp_select(t) == 0


def test_majorp_pivot_on_initial_tableau():
    t = build_eq(worked_lp(), 1)
    after = eng.majorp_pivot(t, 0)
    assert after.rows[4] == (0, 0, -1, -1, -1, 0, 0, 0, -5)
    assert 0 in after.basis and 4 not in after.basis


def test_majorp_pivot_on_basic_column_is_identity():
    t = load_mq4()
    assert gj_pivot(t, 0, 0) == t


def test_minorp_ordering_example():
    rows = [
        [0, 0, 0, 0, 1, 0, 0, 0, 3],
        [0, 2, 0, 0, 0, 1, 0, 0, -1],
        [0, 0, 5, 0, 0, 0, 1, 0, -4],
        [0, 0, 0, 0, 0, 0, 0, 1, 0],
        [0, 1, 1, 0, 0, 0, 0, 0, 0],
    ]
    t = _tab(rows, (4, 5, 6, 7), m=2, n=2)
    assert eng.minorp_candidates(t) == [1, 2]
    assert eng.minorp_select(t) == (1, 1)


def test_gap_fix_unblocks_a_candidate_column():
    # row 0 is negative, its complement column 0 has gap entry 0; row 1 is eligible and touches column 0
    t = _tab([[1, 0, 1, 0, -1], [3, 1, 0, 1, 2], [0, 1, 0, 0, 0]], (2, 3))
    assert eng.minorp_select(t) == eng.ALL_BOTTOM_ZERO
    new, r, eps = eng.degenerate_fix(t)
    assert r == 1 and new.rows[2][0] != 0
    assert new.rows[2][1] > 0


def test_infeasible_example_gives_no_solution():
    lp = CanonicalLp([[1], [-1]], [1, -2], [1])
    assert eng.run(lp).status == eng.NO_SOLUTION


def test_unbounded_example_gives_no_solution():
    lp = CanonicalLp([[0]], [1], [1])
    assert eng.run(lp).status == eng.NO_SOLUTION


def test_truncated_trace_replays_prefix(worked_run):
    lines = worked_run.trace.dumps().splitlines()
    states = eng.replay(eng.PivotTrace.loads("\n".join(lines[:3])))
    assert len(states) == 3
    assert states[-1] == worked_run.trace.steps[1].snapshot


@given(canonical_lps(max_m=3, max_n=3), st.data())
def test_pivot_round_trip_preserves_row_space(lp, data):
    t = build_eq(lp, 1)
    cells = [(i, j) for i in range(t.size) for j in range(t.ncols) if t.rows[i][j] != 0 and j not in t.basis]
    if not cells:
        return
    i, j = data.draw(st.sampled_from(cells))
    try:
        p = gj_pivot(t, i, j)
    except PivotError:
        return  # the complement of j is basic elsewhere
    assert same_row_space(p.rows, t.rows)
    back = gj_pivot(p, i, t.basis[i])
    assert back.rows == t.rows
