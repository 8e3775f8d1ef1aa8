"""Random log generators and independent per-millisecond oracles."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from star.session_model import (
    CueingResponse,
    EngagementSample,
    ExpressionSample,
    GazeSample,
    InteractionState,
    Phase,
    Reward,
    SessionEvent,
    SessionLog,
    Speaker,
    SpeechTurn,
)

WORDS = ["my", "friend", "we", "us", "i", "happy", "sad", "mom", "the", "dog", "great", "mad", "ours", "me"]


def random_log(rng: np.random.Generator, max_duration: int = 120_000, max_events: int = 60) -> SessionLog:
    duration = int(rng.integers(1, max_duration + 1))
    n = int(rng.integers(0, max_events + 1))
    times = np.sort(rng.integers(0, duration + 1, size=n))
    events = []
    for t in times:
        t = int(t)
        kind = int(rng.integers(0, 7))
        if kind == 0:
            p = GazeSample(bool(rng.random() < 0.5))
        elif kind == 1:
            p = ExpressionSample(bool(rng.random() < 0.5))
        elif kind == 2:
            p = EngagementSample(bool(rng.random() < 0.5))
        elif kind == 3:
            p = InteractionState(bool(rng.random() < 0.6))
        elif kind == 4 and t < duration:
            end = int(rng.integers(t + 1, min(duration, t + 20_000) + 1))
            toks = tuple(WORDS[i] for i in rng.integers(0, len(WORDS), int(rng.integers(0, 6))))
            spk = Speaker.CHILD if rng.random() < 0.5 else Speaker.ROBOT
            p = SpeechTurn(spk, t, end, toks)
        elif kind == 5:
            p = CueingResponse(f"q{int(rng.integers(0, 5))}", bool(rng.random() < 0.5), int(rng.integers(0, 3)))
        else:
            p = Reward(f"q{int(rng.integers(0, 5))}")
        events.append(SessionEvent(t, p))
    phase = list(Phase)[int(rng.integers(0, 4))]
    return SessionLog(int(rng.integers(0, 10_000)), int(rng.integers(1, 40)), phase, duration, tuple(events))


@st.composite
def session_logs(draw, max_duration: int = 120_000, max_events: int = 40):
    """Hypothesis strategy: valid logs with every payload kind."""
    duration = draw(st.integers(1, max_duration))
    times = sorted(draw(st.lists(st.integers(0, duration), max_size=max_events)))
    events = []
    for t in times:
        kind = draw(st.integers(0, 6))
        if kind == 0:
            p = GazeSample(draw(st.booleans()))
        elif kind == 1:
            p = ExpressionSample(draw(st.booleans()))
        elif kind == 2:
            p = EngagementSample(draw(st.booleans()))
        elif kind == 3:
            p = InteractionState(draw(st.booleans()))
        elif kind == 4 and t < duration:
            end = draw(st.integers(t + 1, duration))
            toks = tuple(draw(st.lists(st.sampled_from(WORDS), max_size=5)))
            p = SpeechTurn(draw(st.sampled_from(list(Speaker))), t, end, toks)
        elif kind == 5:
            p = CueingResponse(draw(st.text(min_size=1, max_size=8)), draw(st.booleans()), draw(st.integers(0, 2)))
        else:
            p = Reward(draw(st.text(max_size=8)))
        events.append(SessionEvent(t, p))
    return SessionLog(
        draw(st.integers(0, 10**6)),
        draw(st.integers(1, 100)),
        draw(st.sampled_from(list(Phase))),
        duration,
        tuple(events),
    )


# --- per-millisecond oracle -------------------------------------------------


def _state_array(log: SessionLog, kind: type, attr: str) -> np.ndarray:
    arr = np.zeros(log.duration_ms, dtype=bool)
    for ev in log.events:
        if type(ev.payload) is kind:
            arr[ev.timestamp_ms:] = getattr(ev.payload, attr)
    return arr


def _speech_array(log: SessionLog) -> np.ndarray:
    arr = np.zeros(log.duration_ms, dtype=bool)
    for ev in log.events:
        if isinstance(ev.payload, SpeechTurn):
            arr[ev.payload.start_ms:ev.payload.end_ms] = True
    return arr


def brute_time_metrics(log: SessionLog) -> dict:
    engaged = _state_array(log, EngagementSample, "engaged")
    gaze = _state_array(log, GazeSample, "on_interlocutor")
    inter = _state_array(log, InteractionState, "interacting")
    smile = _state_array(log, ExpressionSample, "smiling")
    speech = _speech_array(log)

    def ratio(num, den):
        den = int(den.sum())
        return None if den == 0 else int(num.sum()) / den

    return {
        "engagement": int(engaged.sum()) / log.duration_ms,
        "eye_contact": ratio(gaze & inter, inter),
        "conversational_smiles": ratio(smile & speech, speech),
    }


# --- scheduler fixtures and brute-force scorer ---------------------------------


def make_activity(activity_id: str, skill: str):
    from star.session_model import ActivityDefinition, ContentArea, GoalLevel, Question

    q = Question(f"{activity_id}.q", "ask", "hint", "choice")
    return ActivityDefinition(activity_id, ContentArea.MISSIONS, skill, (GoalLevel(0),), ((q,),))


def random_scheduler_case(rng: np.random.Generator, n: int, now: int = 50, bounded: bool = False):
    """A random state + catalog where each activity trains its own skill.

    Returns (state, catalog, rows) with rows = [(id, variance, mean, pref, last)].
    With ``bounded`` the static part of the scores spans less than gamma / n, which
    is enough for a long rollout to reach every activity: a never-picked one can
    only lose to activities whose last pick is at least n sessions old.
    """
    from star.scheduler import SchedulerConfig, SchedulerState, SchedulerWeights, SkillEstimate

    alpha, beta, gamma = (float(x) for x in rng.uniform(0.1, 3.0, size=3))
    ids = [f"act-{int(k):04d}" for k in rng.choice(10_000, size=n, replace=False)]
    rows, estimates, prefs, history = [], {}, {}, []
    for aid in ids:
        var, mean = float(rng.uniform(0, 1 / 12)), float(rng.uniform(0, 1))
        pref = float(rng.uniform(0, 0.5)) if rng.random() < 0.5 else 0.0
        last = int(rng.integers(1, now)) if rng.random() < 0.6 else None
        rows.append([aid, var, mean, pref, last])
    if bounded:
        spread = 0.9 * gamma / n
        # shift preferences so static scores sit inside [top - spread, top]
        static = [alpha * v + beta * m * (1 - m) for _, v, m, _, _ in rows]
        top = max(static) + 0.5
        for r, s in zip(rows, static):
            r[3] = top - s - float(rng.uniform(0, spread))
    for aid, var, mean, pref, last in rows:
        estimates[f"skill:{aid}"] = SkillEstimate(f"skill:{aid}", mean, var, 3)
        if pref:
            prefs[aid] = pref
        if last is not None:
            history.append((last, aid))
    history.sort()
    config = SchedulerConfig(weights=SchedulerWeights(alpha, beta, gamma))
    state = SchedulerState(estimates, history, prefs, config)
    catalog = [make_activity(aid, f"skill:{aid}") for aid, *_ in rows]
    return state, catalog, [tuple(r) for r in rows]


def brute_force_choice(rows, alpha, beta, gamma, now):
    """Score every candidate from raw numbers; exact max, smallest id on ties."""
    best_id, best = None, None
    for aid, var, mean, pref, last in sorted(rows):
        rec = 0.0 if last is None else 1.0 / (1 + (now - last))
        s = alpha * var + beta * mean * (1 - mean) + pref - gamma * rec
        if best is None or s > best:
            best_id, best = aid, s
    return best_id


# --- Student t oracle ----------------------------------------------------------------


def t_density_p(t: float, df: int) -> float:
    """Two-tailed p by integrating the Student t density (normaliser from lgamma)."""
    import math

    from scipy import integrate

    logc = math.lgamma((df + 1) / 2) - math.lgamma(df / 2) - 0.5 * math.log(df * math.pi)

    def f(x):
        return math.exp(logc - (df + 1) / 2 * math.log1p(x * x / df))

    tail, _ = integrate.quad(f, abs(t), math.inf, epsabs=1e-14, epsrel=1e-12)
    return min(1.0, 2 * tail)
