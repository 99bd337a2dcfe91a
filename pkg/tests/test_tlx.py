import random

import pytest
from scipy import stats

from dream_teleop.errors import (
    ConfigurationError,
    DegenerateTestError,
    InsufficientDataError,
    UnpairedParticipantError,
)
from dream_teleop.tlx import (
    CRITERIA,
    CSV_HEADER,
    Decision,
    DegenerateResult,
    TestResult,
    TlxResponse,
    decide,
    format_hypothesis_table,
    hypotheses_to_dict,
    paired_t_test,
    read_responses_csv,
    rtlx_score,
    run_hypotheses,
    t_two_sided_p,
)


def response(pid, condition, **scores):
    base = dict(mental=50, physical=50, temporal=50, performance=50, effort=50, frustration=50)
    base.update(scores)
    return TlxResponse(pid, condition, **base)


# ---------------------------------------------------------------------------
# t distribution against an independent high-precision implementation


def test_t_two_sided_p_matches_scipy_over_grid():
    worst = 0.0
    for df in range(2, 51):
        for i in range(0, 101):
            t = i * 0.1
            mine = t_two_sided_p(t, df)
            ref = 2.0 * stats.t.sf(t, df)
            worst = max(worst, abs(mine - ref))
    assert worst < 1e-6


def test_t_two_sided_p_basics():
    assert t_two_sided_p(0.0, 5) == 1.0
    assert t_two_sided_p(1e9, 5) < 1e-12
    assert t_two_sided_p(-2.0, 7) == t_two_sided_p(2.0, 7)


def test_t_p_monotone_in_t():
    for df in (2, 5, 20, 50):
        prev = 1.0
        for i in range(1, 60):
            p = t_two_sided_p(i * 0.2, df)
            assert p < prev
            prev = p


# ---------------------------------------------------------------------------
# paired test


def test_paired_t_hand_computed_example():
    # d = [-1, 0, -2, 1]: mean -0.5, sd sqrt(5/3), t = -0.7746, df = 3.
    out = paired_t_test([1, 2, 3, 4], [2, 2, 5, 3])
    assert out.t == pytest.approx(-0.774596669, abs=1e-8)
    assert out.df == 3
    assert out.p == pytest.approx(2.0 * stats.t.sf(0.774596669, 3), abs=1e-9)
    assert out.p == pytest.approx(0.4950, abs=5e-4)


def test_paired_t_zero_variance_is_error_not_zero():
    with pytest.raises(DegenerateTestError):
        paired_t_test([1, 2, 3], [1, 2, 3])


def test_paired_t_insufficient_data():
    with pytest.raises(InsufficientDataError):
        paired_t_test([1.0], [2.0])
    with pytest.raises(InsufficientDataError):
        paired_t_test([1.0, 2.0], [1.0])


def test_paired_t_antisymmetry():
    rng = random.Random(7)
    for _ in range(50):
        xs = [rng.uniform(0, 100) for _ in range(6)]
        ys = [rng.uniform(0, 100) for _ in range(6)]
        try:
            ab = paired_t_test(xs, ys)
            ba = paired_t_test(ys, xs)
        except DegenerateTestError:
            continue
        assert ab.t == -ba.t
        assert ab.p == ba.p


def test_paired_t_shift_invariance():
    rng = random.Random(8)
    xs = [rng.uniform(0, 50) for _ in range(8)]
    ys = [rng.uniform(0, 50) for _ in range(8)]
    base = paired_t_test(xs, ys)
    shifted = paired_t_test([x + 17.3 for x in xs], [y + 17.3 for y in ys])
    assert shifted.t == pytest.approx(base.t, abs=1e-12)
    assert shifted.p == pytest.approx(base.p, abs=1e-12)


def test_paired_t_matches_scipy_on_random_data():
    rng = random.Random(9)
    for _ in range(30):
        n = rng.randint(3, 12)
        xs = [rng.uniform(0, 100) for _ in range(n)]
        ys = [rng.uniform(0, 100) for _ in range(n)]
        try:
            mine = paired_t_test(xs, ys)
        except DegenerateTestError:
            continue
        ref_t, ref_p = stats.ttest_rel(xs, ys)
        assert mine.t == pytest.approx(float(ref_t), abs=1e-9)
        assert mine.p == pytest.approx(float(ref_p), abs=1e-9)


# ---------------------------------------------------------------------------
# decide()


def test_decide_reference_rows():
    # The six reported values decide exactly as published at alpha = 0.05.
    table = [
        ("mental", 0.013, Decision.REJECTED),
        ("physical", 0.007, Decision.REJECTED),
        ("temporal", 0.269, Decision.NOT_REJECTED),
        ("performance", 0.003, Decision.REJECTED),
        ("effort", 0.022, Decision.REJECTED),
        ("frustration", 0.14, Decision.NOT_REJECTED),
    ]
    for _, p, expected in table:
        assert decide(p, 0.05) is expected


def test_decide_boundary_is_strict():
    assert decide(0.05, 0.05) is Decision.NOT_REJECTED
    assert decide(0.049999, 0.05) is Decision.REJECTED


def test_decide_rethresholding_flips_effort_row():
    assert decide(0.022, 0.05) is Decision.REJECTED
    assert decide(0.022, 0.01) is Decision.NOT_REJECTED


# ---------------------------------------------------------------------------
# run_hypotheses


def make_paired_responses(n=8, shift_criterion=None, shift=30.0, seed=5):
    rng = random.Random(seed)
    responses = []
    for i in range(n):
        base = {c: rng.uniform(30, 70) for c in CRITERIA}
        jitter = {c: min(100, max(0, base[c] + rng.uniform(-5, 5))) for c in CRITERIA}
        dream = dict(base)
        if shift_criterion:
            dream[shift_criterion] = min(100.0, base[shift_criterion] + shift)
        responses.append(response(f"p{i}", "dream", **{k: round(v, 3) for k, v in dream.items()}))
        responses.append(response(f"p{i}", "joystick", **{k: round(v, 3) for k, v in jitter.items()}))
    return responses


def test_run_hypotheses_detects_single_shift():
    rows = run_hypotheses(make_paired_responses(shift_criterion="mental"), alpha=0.05)
    by_name = {r.criterion: r for r in rows}
    assert isinstance(by_name["mental"], TestResult)
    assert by_name["mental"].decision is Decision.REJECTED
    for c in CRITERIA:
        if c != "mental":
            r = by_name[c]
            assert isinstance(r, TestResult)
            assert r.decision is Decision.NOT_REJECTED


def test_run_hypotheses_identical_conditions_degenerate():
    responses = []
    for i in range(4):
        responses.append(response(f"p{i}", "dream", mental=40 + i))
        responses.append(response(f"p{i}", "joystick", mental=40 + i))
    rows = run_hypotheses(responses, alpha=0.05)
    assert all(isinstance(r, DegenerateResult) for r in rows)


def test_run_hypotheses_decisions_consistent_with_decide():
    rows = run_hypotheses(make_paired_responses(shift_criterion="effort", shift=25), alpha=0.05)
    for r in rows:
        if isinstance(r, TestResult):
            assert r.decision is decide(r.p, 0.05)


def test_run_hypotheses_unpaired_participant_named():
    responses = make_paired_responses(n=4)
    responses.append(response("lonely", "dream"))
    with pytest.raises(UnpairedParticipantError) as err:
        run_hypotheses(responses)
    assert "lonely" in str(err.value)


def test_rtlx_score():
    assert rtlx_score(response("p", "dream", mental=0, physical=0, temporal=0,
                               performance=0, effort=0, frustration=0)) == 0.0
    assert rtlx_score(response("p", "dream", mental=100, physical=100, temporal=100,
                               performance=100, effort=100, frustration=100)) == 100.0
    assert rtlx_score(response("p", "dream", mental=10, physical=20, temporal=30,
                               performance=40, effort=50, frustration=60)) == pytest.approx(35.0)


def test_response_validation():
    with pytest.raises(ConfigurationError):
        response("p", "dream", mental=101)
    with pytest.raises(ConfigurationError):
        response("p", "gamepad")


# ---------------------------------------------------------------------------
# CSV and formatting


def write_csv(path, rows):
    path.write_text(",".join(CSV_HEADER) + "\n" + "\n".join(",".join(map(str, r)) for r in rows) + "\n")


def test_read_responses_csv(tmp_path):
    f = tmp_path / "tlx.csv"
    write_csv(f, [
        ["p1", "DrEAM", 10, 20, 30, 40, 50, 60],
        ["p1", "Joystick", 20, 30, 40, 50, 60, 70],
    ])
    rs = read_responses_csv(f)
    assert len(rs) == 2
    assert rs[0].condition == "dream"
    assert rs[1].condition == "joystick"
    assert rs[0].mental == 10.0


def test_read_responses_csv_rejects_bad_header(tmp_path):
    f = tmp_path / "tlx.csv"
    f.write_text("who,cond,a,b,c,d,e,f\np1,DrEAM,1,2,3,4,5,6\n")
    with pytest.raises(ConfigurationError):
        read_responses_csv(f)


def test_read_responses_csv_rejects_bad_condition(tmp_path):
    f = tmp_path / "tlx.csv"
    write_csv(f, [["p1", "keyboard", 1, 2, 3, 4, 5, 6]])
    with pytest.raises(ConfigurationError) as err:
        read_responses_csv(f)
    assert "line 2" in str(err.value)


def test_read_responses_csv_rejects_out_of_range(tmp_path):
    f = tmp_path / "tlx.csv"
    write_csv(f, [["p1", "DrEAM", 1, 2, 3, 4, 5, 600]])
    with pytest.raises(ConfigurationError):
        read_responses_csv(f)


def test_format_table_shape():
    rows = run_hypotheses(make_paired_responses(shift_criterion="mental"), alpha=0.05)
    text = format_hypothesis_table(rows, 0.05)
    for label in ("Mental Demand", "Physical Demand", "Temporal Demand",
                  "Performance", "Effort", "Frustration"):
        assert label in text
    assert "Rejected" in text
    d = hypotheses_to_dict(rows, 0.05)
    assert d["alpha"] == 0.05
    assert len(d["rows"]) == 6
