"""Parametric simulated children and the six-week study protocol.

Behavior channels (engagement, gaze, smiling) are continuous-time two-state
Markov chains whose stationary on-fraction equals the child's propensity.
Speech is a sequence of turns where the next speaker switches with
probability ``turn_taking``. Cueing answers are correct with probability
``clamp(ability + prompt_benefit * prompt_level, 0, 1)``.

Everything is deterministic given ``ChildModel.rng_seed``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Sequence

import numpy as np

from .assessment import (
    MAX_SCORE,
    AssessmentItem,
    AssessmentRecord,
    AssessPhase,
    Category,
    apply_polarity,
    load_groupings,
    pair_records,
)
from .cueing import CueingOutcome, GoalProgress, record_outcome, run_question
from .metrics import METRIC_NAMES, LexiconSet, MetricVector, compute_all, load_lexicon, mean_vector
from .scheduler import SchedulerConfig, SchedulerState, select_next
from .session_model import (
    ActivityDefinition,
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

_PHASE_CODE = {Phase.BASELINE: 1, Phase.INTERVENTION: 2, Phase.EXIT: 3, Phase.FOLLOW_UP: 4}

FILLER_WORDS = (
    "the", "a", "and", "to", "went", "play", "park", "dog", "ball", "then", "it", "was",
    "like", "see", "draw", "blue", "big", "house", "game", "robot", "yes", "no", "because",
    "so", "look", "cat", "tree", "red", "book", "run",
)
ROBOT_WORDS = (
    "let's", "talk", "about", "your", "friend", "how", "do", "you", "feel", "today", "we",
    "can", "try", "together", "great", "job", "what", "happened", "next", "breathe",
)

# metric name -> BehaviorProfile field that drives it
METRIC_TO_PROFILE = {
    "engagement": "engagement",
    "eye_contact": "gaze",
    "turn_balance": "turn_taking",
    "conversational_smiles": "smile",
    "social_speech": "social_rate",
    "relational_speech": "plural_share",
    "sentiment": "positive_share",
}


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class BehaviorProfile:
    engagement: float = 0.5
    gaze: float = 0.5
    smile: float = 0.2
    turn_taking: float = 0.7
    social_rate: float = 0.2
    plural_share: float = 0.2
    positive_share: float = 0.5

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{f.name}={v} outside [0, 1]")

    def lerp(self, other: "BehaviorProfile", w: float) -> "BehaviorProfile":
        return BehaviorProfile(
            **{f.name: (1 - w) * getattr(self, f.name) + w * getattr(other, f.name) for f in fields(self)}
        )


@dataclass(frozen=True)
class ChildModel:
    participant_id: int
    abilities: dict = field(default_factory=dict)  # skill -> [0, 1]
    behavior: BehaviorProfile = BehaviorProfile()
    learning_rate: float = 0.0
    rng_seed: int = 0
    # profile reached by the end of the intervention; None means no behavior change
    exit_behavior: Optional[BehaviorProfile] = None

    def __post_init__(self):
        if not 0.0 <= self.learning_rate <= 1.0:
            raise ValueError("learning_rate must lie in [0, 1]")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be non-negative")
        for skill, a in self.abilities.items():
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"ability {skill}={a} outside [0, 1]")

    def ability(self, skill: str) -> float:
        return self.abilities.get(skill, 0.5)

    def grown(self) -> "ChildModel":
        lr = self.learning_rate
        return replace(self, abilities={s: a + lr * (1 - a) for s, a in self.abilities.items()})

    def to_dict(self) -> dict:
        d = {
            "participant_id": self.participant_id,
            "abilities": dict(self.abilities),
            "behavior": self.behavior.__dict__.copy(),
            "learning_rate": self.learning_rate,
            "rng_seed": self.rng_seed,
        }
        if self.exit_behavior is not None:
            d["exit_behavior"] = self.exit_behavior.__dict__.copy()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ChildModel":
        exit_b = d.get("exit_behavior")
        return cls(
            participant_id=int(d["participant_id"]),
            abilities={str(k): float(v) for k, v in d.get("abilities", {}).items()},
            behavior=BehaviorProfile(**d.get("behavior", {})),
            learning_rate=float(d.get("learning_rate", 0.0)),
            rng_seed=int(d.get("rng_seed", 0)),
            exit_behavior=None if exit_b is None else BehaviorProfile(**exit_b),
        )


@dataclass(frozen=True)
class CohortConfig:
    children: tuple
    sessions_per_week: int = 3
    weeks: int = 6
    session_minutes: int = 15
    baseline_sessions: int = 3
    exit_sessions: int = 3

    def __post_init__(self):
        for name in ("sessions_per_week", "weeks", "session_minutes", "baseline_sessions", "exit_sessions"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        ids = [c.participant_id for c in self.children]
        if len(set(ids)) != len(ids):
            raise ValueError("participant ids must be unique")

    @property
    def intervention_sessions(self) -> int:
        return self.sessions_per_week * self.weeks

    @property
    def duration_ms(self) -> int:
        return self.session_minutes * 60_000

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "children"}
        d["children"] = [c.to_dict() for c in self.children]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CohortConfig":
        kw = {f.name: int(d[f.name]) for f in fields(cls) if f.name != "children" and f.name in d}
        return cls(children=tuple(ChildModel.from_dict(c) for c in d["children"]), **kw)


@dataclass(frozen=True)
class SimulationSettings:
    mean_cycle_ms: float = 10_000.0  # mean on+off period of the Markov channels
    words_per_second: float = 2.0
    pronoun_rate: float = 0.15
    sentiment_rate: float = 0.12
    question_gap_ms: tuple = (20_000, 40_000)
    response_gap_ms: int = 4_000
    prompt_benefit: float = 0.15


# --- single session ---------------------------------------------------------


def _session_rng(child: ChildModel, phase: Phase, session_index: int) -> np.random.Generator:
    return np.random.default_rng([child.rng_seed, _PHASE_CODE[phase], session_index])


def markov_changes(rng: np.random.Generator, p: float, duration_ms: int, cycle_ms: float) -> list[tuple[int, bool]]:
    """State changes of a two-state chain with stationary on-fraction ``p``."""
    if p <= 0.0:
        return [(0, False)]
    if p >= 1.0:
        return [(0, True)]
    state = bool(rng.random() < p)
    out = [(0, state)]
    t = 0
    while True:
        mean = p * cycle_ms if state else (1 - p) * cycle_ms
        t += max(1, int(round(rng.exponential(mean))))
        if t >= duration_ms:
            return out
        state = not state
        out.append((t, state))


def _child_tokens(rng, n: int, profile: BehaviorProfile, lex: LexiconSet, settings: SimulationSettings):
    social = sorted(lex.social_words)
    singular = sorted(lex.first_person_singular)
    plural = sorted(lex.first_person_plural)
    positive = sorted(lex.positive_words)
    negative = sorted(lex.negative_words)
    lexical = lex.social_words | lex.first_person_singular | lex.first_person_plural
    lexical |= lex.positive_words | lex.negative_words
    filler = [w for w in FILLER_WORDS if w not in lexical]
    out = []
    for u1, u2, u3, u4, u5 in rng.random((n, 5)):
        if u1 < profile.social_rate:
            pool = social
        elif u2 < settings.pronoun_rate:
            pool = plural if u3 < profile.plural_share else singular
        elif u2 < settings.pronoun_rate + settings.sentiment_rate:
            pool = positive if u3 < profile.positive_share else negative
        else:
            pool = filler
        out.append(pool[int(u4 * len(pool)) % len(pool)])
    return tuple(out)


def _speech(rng, duration_ms: int, profile: BehaviorProfile, lex: LexiconSet, settings: SimulationSettings):
    out = []
    t = int(rng.integers(500, 2000))
    speaker = Speaker.ROBOT
    while True:
        lo, hi = (2000, 6000) if speaker == Speaker.ROBOT else (1000, 5000)
        length = int(rng.integers(lo, hi))
        if t + length > duration_ms:
            return out
        n_words = max(1, int(round(length / 1000 * settings.words_per_second)))
        if speaker == Speaker.CHILD:
            tokens = _child_tokens(rng, n_words, profile, lex, settings)
        else:
            tokens = tuple(ROBOT_WORDS[i] for i in rng.integers(0, len(ROBOT_WORDS), n_words))
        out.append((t, SpeechTurn(speaker, t, t + length, tokens)))
        if rng.random() < profile.turn_taking:
            speaker = Speaker.CHILD if speaker == Speaker.ROBOT else Speaker.ROBOT
        t += length + int(rng.integers(200, 1500))


def p_correct(ability: float, prompt_level: int, benefit: float = 0.15) -> float:
    return min(1.0, max(0.0, ability + benefit * prompt_level))


def _cueing(rng, duration_ms: int, ability: float, questions, settings: SimulationSettings, offset: int):
    out = []
    gap_lo, gap_hi = settings.question_gap_ms
    t = int(rng.integers(gap_lo // 4, gap_lo))
    k = offset
    step = settings.response_gap_ms
    while t + 2 * step <= duration_ms:
        q = questions[k % len(questions)]
        k += 1
        responses = []

        def respond(level: int) -> bool:
            ok = bool(rng.random() < p_correct(ability, level, settings.prompt_benefit))
            responses.append((t + level * step, CueingResponse(q.question_id, ok, level)))
            return ok

        outcome = run_question(q, respond)
        out.extend(responses)
        if outcome.succeeded:
            out.append((responses[-1][0], Reward(q.question_id)))
        t += 2 * step + int(rng.integers(gap_lo, gap_hi))
    return out


def simulate_session(
    child: ChildModel,
    activity: ActivityDefinition,
    duration_ms: int,
    *,
    session_index: int = 1,
    phase: Phase = Phase.INTERVENTION,
    level_index: int = 0,
    behavior: Optional[BehaviorProfile] = None,
    lexicon: Optional[LexiconSet] = None,
    settings: Optional[SimulationSettings] = None,
) -> SessionLog:
    """Generate one session. ``behavior`` overrides the child's baseline profile."""
    settings = settings or SimulationSettings()
    lex = lexicon or load_lexicon()
    profile = behavior or child.behavior
    rng = _session_rng(child, phase, session_index)
    cyc = settings.mean_cycle_ms

    streams: list[tuple[int, object]] = [(0, InteractionState(True))]
    streams += [(t, EngagementSample(s)) for t, s in markov_changes(rng, profile.engagement, duration_ms, cyc)]
    streams += [(t, GazeSample(s)) for t, s in markov_changes(rng, profile.gaze, duration_ms, cyc)]
    streams += [(t, ExpressionSample(s)) for t, s in markov_changes(rng, profile.smile, duration_ms, cyc)]
    streams += _speech(rng, duration_ms, profile, lex, settings)
    level = min(level_index, len(activity.goal_levels) - 1)
    streams += _cueing(
        rng, duration_ms, child.ability(activity.target_skill), activity.questions[level], settings, session_index
    )
    streams.sort(key=lambda e: e[0])  # stable: same-time events keep stream order
    events = tuple(SessionEvent(t, p) for t, p in streams)
    return SessionLog(child.participant_id, session_index, phase, duration_ms, events)


def outcomes_from_log(log: SessionLog) -> list[CueingOutcome]:
    """Rebuild per-question outcomes from the CueingResponse stream."""
    out = []
    for ev in log.events:
        p = ev.payload
        if isinstance(p, CueingResponse) and (p.correct or p.prompt_level == 2):
            out.append(CueingOutcome(p.question_id, p.prompt_level, p.correct))
    return out


# --- study protocol ---------------------------------------------------------


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def assessment_record(
    child: ChildModel, phase: AssessPhase, items: Sequence[AssessmentItem]
) -> AssessmentRecord:
    """Item score = round(3 * ability of the item's category), stored in raw (pre-polarity) form."""
    scores = {}
    for it in items:
        level = min(MAX_SCORE, max(0, round_half_up(MAX_SCORE * child.ability(it.category.value))))
        scores[it.key] = int(apply_polarity(level, it.polarity))
    return AssessmentRecord(child.participant_id, phase, scores)


def behavior_progress(learning_rate: float, k: int, n: int) -> float:
    """Fraction of the baseline-to-exit behavior shift reached after ``k`` of ``n`` sessions."""
    if learning_rate <= 0.0 or k <= 0:
        return 0.0
    keep = 1.0 - learning_rate
    return (1.0 - keep**k) / (1.0 - keep**n)


@dataclass
class StudyResult:
    baseline_logs: list
    intervention_logs: list
    exit_logs: list
    records: list
    scheduler_states: dict  # participant_id -> SchedulerState

    def record_pairs(self):
        return pair_records(self.records)

    def metric_pairs(self, lexicon: Optional[LexiconSet] = None) -> list[tuple[MetricVector, MetricVector]]:
        """Per-participant mean metrics: Baseline-phase sessions vs Exit-phase sessions."""
        lex = lexicon or load_lexicon()
        return phase_metric_pairs(self.baseline_logs, self.exit_logs, lex)


def phase_metric_pairs(baseline_logs, post_logs, lex: LexiconSet) -> list[tuple[MetricVector, MetricVector]]:
    pre: dict[int, list] = {}
    post: dict[int, list] = {}
    for log in baseline_logs:
        pre.setdefault(log.participant_id, []).append(compute_all(log, lex))
    for log in post_logs:
        post.setdefault(log.participant_id, []).append(compute_all(log, lex))
    return [(mean_vector(pre[pid]), mean_vector(post[pid])) for pid in sorted(pre) if pid in post]


def simulate_child(
    child: ChildModel,
    cohort: CohortConfig,
    catalog: Sequence[ActivityDefinition],
    config: SchedulerConfig,
    items: Sequence[AssessmentItem],
    lex: LexiconSet,
    settings: SimulationSettings,
):
    dur = cohort.duration_ms
    n = cohort.intervention_sessions
    baseline = [
        simulate_session(
            child, catalog[(k - 1) % len(catalog)], dur,
            session_index=k, phase=Phase.BASELINE, lexicon=lex, settings=settings,
        )
        for k in range(1, cohort.baseline_sessions + 1)
    ]
    records = [assessment_record(child, AssessPhase.BASELINE, items)]

    target = child.exit_behavior or child.behavior
    state = SchedulerState(config=config)
    progress: dict[str, GoalProgress] = {}
    by_id = {a.activity_id: a for a in catalog}
    intervention = []
    current = child
    for k in range(1, n + 1):
        act = by_id[select_next(state, list(catalog), k)]
        gp = progress.get(act.target_skill) or GoalProgress(act.target_skill, len(act.goal_levels))
        gp = replace(gp, n_levels=len(act.goal_levels), current_level=min(gp.current_level, len(act.goal_levels) - 1))
        profile = child.behavior.lerp(target, behavior_progress(child.learning_rate, k, n))
        log = simulate_session(
            current, act, dur, session_index=k, phase=Phase.INTERVENTION,
            level_index=gp.current_level, behavior=profile, lexicon=lex, settings=settings,
        )
        for outcome in outcomes_from_log(log):
            state.observe(act.target_skill, outcome)
            gp, _ = record_outcome(gp, outcome, act.goal_levels[gp.current_level])
        progress[act.target_skill] = gp
        intervention.append(log)
        current = current.grown()

    final_profile = child.behavior.lerp(target, behavior_progress(child.learning_rate, n, n))
    exit_logs = [
        simulate_session(
            current, catalog[(k - 1) % len(catalog)], dur, session_index=k, phase=Phase.EXIT,
            behavior=final_profile, lexicon=lex, settings=settings,
        )
        for k in range(1, cohort.exit_sessions + 1)
    ]
    records.append(assessment_record(current, AssessPhase.POST, items))
    return baseline, intervention, exit_logs, records, state


def simulate_study(
    cohort: CohortConfig,
    catalog: Sequence[ActivityDefinition],
    config: Optional[SchedulerConfig] = None,
    *,
    items: Optional[Sequence[AssessmentItem]] = None,
    lexicon: Optional[LexiconSet] = None,
    settings: Optional[SimulationSettings] = None,
) -> StudyResult:
    """Baseline probes, scheduled intervention with ability growth, exit probes and assessments."""
    if not cohort.children:
        raise ValueError("cohort has no children")
    if not catalog:
        raise ValueError("catalog is empty")
    config = config or SchedulerConfig()
    items = load_groupings() if items is None else items
    lex = lexicon or load_lexicon()
    settings = settings or SimulationSettings()
    result = StudyResult([], [], [], [], {})
    for child in cohort.children:
        b, i, e, r, s = simulate_child(child, cohort, catalog, config, items, lex, settings)
        result.baseline_logs += b
        result.intervention_logs += i
        result.exit_logs += e
        result.records += r
        result.scheduler_states[child.participant_id] = s
    return result


# --- calibration ------------------------------------------------------------

# group means and SDs reported for the six-week study: (pre M, pre SD, post M, post SD)
STUDY_METRIC_TARGETS = {
    "engagement": (0.01, 0.01, 0.52, 0.12),
    "eye_contact": (0.14, 0.11, 0.72, 0.11),
    "turn_balance": (0.63, 0.09, 0.81, 0.08),
    "conversational_smiles": (0.22, 0.26, 0.18, 0.12),
    "social_speech": (0.19, 0.11, 0.57, 0.18),
    "relational_speech": (0.09, 0.05, 0.24, 0.11),
    "sentiment": (0.02, 0.02, 0.12, 0.05),
}
# category means: (pre M, post M)
STUDY_CATEGORY_TARGETS = {
    "EmotionRegulation": (1.75, 2.51),
    "SelfEsteem": (1.42, 2.21),
    "Behavior": (1.98, 2.48),
    "ConversationSkills": (1.88, 2.29),
    "FriendshipSkills": (1.73, 2.20),
    "InterpersonalSkills": (1.82, 2.03),
}


def _standardized(z: np.ndarray) -> np.ndarray:
    return (z - z.mean()) / z.std(ddof=1)


def values_with_moments(z: np.ndarray, mean: float, sd: float, iters: int = 200) -> np.ndarray:
    """``mean + sd * z`` clipped to [0, 1], re-centred so the sample mean stays at ``mean``."""
    v = np.clip(mean + sd * _standardized(z), 0.0, 1.0)
    for _ in range(iters):
        gap = mean - v.mean()
        if abs(gap) < 1e-12:
            break
        v = np.clip(v + gap, 0.0, 1.0)
    return v


def integer_levels(target_mean: float, n: int) -> list[int]:
    """n integer scores in 0..3 whose mean is the closest achievable to ``target_mean``."""
    lo = int(math.floor(target_mean))
    k = round_half_up(n * (target_mean - lo))
    if lo >= MAX_SCORE:
        return [MAX_SCORE] * n
    return [lo] * (n - k) + [lo + 1] * k


def deficit_for(s_pre: int, s_post: int, keep: float) -> float:
    """Deficit ``3 - 3*a0`` so round(3*a0) == s_pre and, after shrinking by ``keep``, round lands on s_post."""
    lo = max(2.5 - s_pre, 0.0)
    hi = min(3.5 - s_pre, 3.0)
    if keep > 0:
        lo = max(lo, (2.5 - s_post) / keep)
        hi = min(hi, (3.5 - s_post) / keep)
    elif s_post != MAX_SCORE:
        hi = -1.0
    if hi <= lo:
        raise CalibrationError(f"cannot move score {s_pre} -> {s_post} with retained deficit {keep:.3f}")
    return (lo + hi) / 2


def calibrated_cohort(
    n: int = 12,
    seed: int = 0,
    *,
    metric_targets: Optional[dict] = None,
    category_targets: Optional[dict] = None,
    sessions_per_week: int = 3,
    weeks: int = 6,
    session_minutes: int = 15,
    retained_range: tuple = (0.42, 0.58),
    pre_post_correlation: float = 0.5,
    first_participant_id: int = 101,
) -> CohortConfig:
    """Build a cohort whose configured group means hit the given pre/post targets.

    Behavior propensities are drawn so each group's sample mean equals the
    target exactly. Abilities are set so ``round(3 * ability)`` reproduces
    integer score allocations with the target category means, given each
    child's learning rate over the intervention.
    """
    metric_targets = STUDY_METRIC_TARGETS if metric_targets is None else metric_targets
    category_targets = STUDY_CATEGORY_TARGETS if category_targets is None else category_targets
    rng = np.random.default_rng([seed, 7919])
    n_sessions = sessions_per_week * weeks
    rho = pre_post_correlation

    pre_vals, post_vals = {}, {}
    for metric in METRIC_NAMES:
        if metric not in metric_targets:
            continue
        m0, s0, m1, s1 = metric_targets[metric]
        z0 = rng.standard_normal(n)
        z1 = rho * _standardized(z0) + math.sqrt(1 - rho * rho) * rng.standard_normal(n)
        pre_vals[METRIC_TO_PROFILE[metric]] = values_with_moments(z0, m0, s0)
        post_vals[METRIC_TO_PROFILE[metric]] = values_with_moments(z1, m1, s1)

    keep = rng.uniform(*retained_range, size=n)
    learning_rates = 1.0 - keep ** (1.0 / n_sessions)

    abilities: list[dict] = [{} for _ in range(n)]
    for cat in Category:
        if cat.value not in category_targets:
            continue
        m0, m1 = category_targets[cat.value]
        order = rng.permutation(n)  # which children take which rank
        pre_levels = integer_levels(m0, n)
        post_levels = integer_levels(m1, n)
        for rank, i in enumerate(order):
            x = deficit_for(pre_levels[rank], post_levels[rank], float(keep[i]))
            abilities[i][cat.value] = min(1.0, max(0.0, 1.0 - x / MAX_SCORE))

    children = []
    for i in range(n):
        before = BehaviorProfile(**{k: float(v[i]) for k, v in pre_vals.items()})
        after = BehaviorProfile(**{k: float(v[i]) for k, v in post_vals.items()})
        children.append(
            ChildModel(
                participant_id=first_participant_id + i,
                abilities=abilities[i],
                behavior=before,
                learning_rate=float(learning_rates[i]),
                rng_seed=int(rng.integers(0, 2**31 - 1)),
                exit_behavior=after,
            )
        )
    return CohortConfig(
        children=tuple(children),
        sessions_per_week=sessions_per_week,
        weeks=weeks,
        session_minutes=session_minutes,
    )


def null_cohort(cohort: CohortConfig) -> CohortConfig:
    """Same children with no learning: abilities and behavior stay at baseline."""
    return replace(cohort, children=tuple(replace(c, learning_rate=0.0) for c in cohort.children))
