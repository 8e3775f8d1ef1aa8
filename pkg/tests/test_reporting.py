import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from star.metrics import load_lexicon
from star.reporting import (
    BoxplotSummary,
    EmptyInput,
    MixedParticipants,
    SuggestionRule,
    WeeklyReport,
    boxplot_summary,
    load_thresholds,
    week_of,
    weekly_report,
    weekly_reports,
)
from star.session_model import (
    EngagementSample,
    GazeSample,
    InteractionState,
    Phase,
    SessionEvent,
    SessionLog,
)

LEX = load_lexicon()


@pytest.mark.parametrize(
    "values, expected",
    [
        ([1, 2, 3, 4, 5], (1, 2, 3, 4, 5)),
        ([7], (7, 7, 7, 7, 7)),
        ([1, 2, 3, 4], (1, 1.75, 2.5, 3.25, 4)),
        ([4, 1, 3, 2], (1, 1.75, 2.5, 3.25, 4)),
    ],
)
def test_boxplot_examples(values, expected):
    assert boxplot_summary(values).as_tuple() == expected


def test_boxplot_empty():
    with pytest.raises(EmptyInput):
        boxplot_summary([])


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50))
def test_boxplot_ordering(values):
    b = boxplot_summary(values)
    assert b.min <= b.q1 <= b.median <= b.q3 <= b.max
    assert (b.min, b.max) == (min(values), max(values))


def test_boxplot_matches_numpy_linear():
    rng = np.random.default_rng(0)
    for _ in range(50):
        v = rng.uniform(0, 1, int(rng.integers(2, 40)))
        q = np.quantile(v, [0.25, 0.5, 0.75], method="linear")
        b = boxplot_summary(list(v))
        assert (b.q1, b.median, b.q3) == pytest.approx(tuple(q), abs=1e-12)


# --- weekly reports ----------------------------------------------------------------


def log(idx, engaged_ms, gaze_ms=0, pid=5, duration=10_000):
    events = [SessionEvent(0, InteractionState(True)), SessionEvent(0, EngagementSample(True))]
    events.append(SessionEvent(0, GazeSample(True)))
    events += [SessionEvent(gaze_ms, GazeSample(False)), SessionEvent(engaged_ms, EngagementSample(False))]
    events.sort(key=lambda e: e.timestamp_ms)
    return SessionLog(pid, idx, Phase.INTERVENTION, duration, tuple(events))


def test_week_of():
    assert [week_of(i) for i in range(1, 8)] == [1, 1, 1, 2, 2, 2, 3]


def test_three_session_mean_and_no_prior():
    rep = weekly_report([log(1, 2000), log(2, 4000), log(3, 6000)], None, LEX)
    assert rep.mean("engagement") == pytest.approx(0.4, abs=1e-15)
    assert all(s is None or s.trend == 0.0 for s in rep.metrics.values())
    assert (rep.participant_id, rep.week_index) == (5, 1)


def test_eye_contact_tip_fires():
    rules = [SuggestionRule("eye_contact", "<", 0.3, "eye-contact-practice")]
    rep = weekly_report([log(1, 5000, gaze_ms=1400)], None, LEX, rules)
    assert rep.mean("eye_contact") == 0.14
    assert rep.suggestions == ["eye-contact-practice"]
    assert weekly_report([log(1, 5000, gaze_ms=5000)], None, LEX, rules).suggestions == []


def test_bundled_thresholds_include_eye_contact_rule():
    assert SuggestionRule("eye_contact", "<", 0.3, "eye-contact-practice") in load_thresholds()


def test_trend_against_prior():
    week1 = weekly_report([log(1, 2000), log(2, 2000)], None, LEX)
    week2 = weekly_report([log(4, 7000)], week1, LEX)
    assert week2.metrics["engagement"].trend == pytest.approx(0.5)


def test_mixed_participants_and_weeks():
    with pytest.raises(MixedParticipants):
        weekly_report([log(1, 100), log(2, 100, pid=6)], None, LEX)
    with pytest.raises(ValueError):
        weekly_report([log(1, 100), log(4, 100)], None, LEX)
    with pytest.raises(EmptyInput):
        weekly_report([], None, LEX)


@settings(max_examples=50, deadline=None)
@given(st.permutations([log(4, 1234, 50), log(5, 9000, 3000), log(6, 77, 7000)]))
def test_permutation_invariance(order):
    base = weekly_report([log(4, 1234, 50), log(5, 9000, 3000), log(6, 77, 7000)], None, LEX, activities=["b", "a"])
    assert weekly_report(list(order), None, LEX, activities=["a", "b"]) == base


def test_report_json_round_trip():
    reps = weekly_reports([log(i, 1000 * i, 500 * i) for i in range(1, 8)], LEX,
                          activities={5: [(1, "talk-show"), (4, "riddle-time")]})
    assert [r.week_index for r in reps] == [1, 2, 3]
    assert reps[0].activities_completed == ["talk-show"]
    assert reps[1].metrics["engagement"].trend == pytest.approx(reps[1].mean("engagement") - reps[0].mean("engagement"))
    for r in reps:
        d = json.loads(json.dumps(r.to_dict()))
        assert d["schema"] == "star-report/1"
        assert WeeklyReport.from_dict(d) == r


def test_rule_validation():
    with pytest.raises(ValueError):
        SuggestionRule("mood", "<", 0.3, "x")
    with pytest.raises(ValueError):
        SuggestionRule("engagement", "~", 0.3, "x")
    assert not SuggestionRule("engagement", "<", 0.3, "x").fires(None)
    assert BoxplotSummary(1, 2, 3, 4, 5).as_tuple() == (1, 2, 3, 4, 5)
