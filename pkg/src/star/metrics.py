"""Behavioral metrics over a session log.

Time-based metrics work on the edge-triggered state timeline: a sample's
state holds from its timestamp until the next sample of the same kind or
the end of the session. Every state defaults to False before its first
sample. Ratios are ``int / int`` over milliseconds, so they agree exactly
with a per-millisecond recount.

``None`` marks an undefined metric (zero denominator).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Union

from .session_model import (
    EngagementSample,
    ExpressionSample,
    GazeSample,
    InteractionState,
    SessionLog,
    Speaker,
    SpeechTurn,
)

Interval = tuple[int, int]

METRIC_NAMES = (
    "engagement",
    "eye_contact",
    "turn_balance",
    "conversational_smiles",
    "social_speech",
    "relational_speech",
    "sentiment",
)


@dataclass(frozen=True)
class MetricVector:
    engagement: Optional[float] = None
    eye_contact: Optional[float] = None
    turn_balance: Optional[float] = None
    conversational_smiles: Optional[float] = None
    social_speech: Optional[float] = None
    relational_speech: Optional[float] = None
    sentiment: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MetricVector":
        return cls(**{f.name: d.get(f.name) for f in fields(cls)})


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class LexiconSet:
    social_words: frozenset
    positive_words: frozenset
    negative_words: frozenset
    first_person_singular: frozenset = frozenset({"i", "me", "my", "mine", "myself"})
    first_person_plural: frozenset = frozenset({"we", "us", "our", "ours", "ourselves"})

    def __post_init__(self):
        if self.first_person_singular & self.first_person_plural:
            raise LexiconError("singular and plural pronoun sets overlap")
        if self.positive_words & self.negative_words:
            raise LexiconError("positive and negative word sets overlap")


def load_lexicon(path: Union[str, Path, None] = None) -> LexiconSet:
    """Load a lexicon JSON file with the five word arrays (bundled default when None)."""
    if path is None:
        text = resources.files("star.data").joinpath("lexicon.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    try:
        doc = json.loads(text)
        kwargs = {
            key: frozenset(w.lower() for w in doc[key])
            for key in ("social_words", "positive_words", "negative_words")
        }
        for key in ("first_person_singular", "first_person_plural"):
            if key in doc:
                kwargs[key] = frozenset(w.lower() for w in doc[key])
    except (json.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
        raise LexiconError(f"bad lexicon file: {exc}") from None
    return LexiconSet(**kwargs)


# --- interval helpers -------------------------------------------------------


def state_intervals(log: SessionLog, kind: type, attr: str) -> list[Interval]:
    """Disjoint sorted intervals during which the edge-triggered ``kind.attr`` is True."""
    out: list[Interval] = []
    on = False
    start = 0
    end_of_session = log.duration_ms
    for ev in log.events:
        p = ev.payload
        if type(p) is not kind:
            continue
        t = min(max(ev.timestamp_ms, 0), end_of_session)
        if on and t > start:
            out.append((start, t))
        on = bool(getattr(p, attr))
        start = t
    if on and end_of_session > start:
        out.append((start, end_of_session))
    return merge(out)


def merge(intervals: Iterable[Interval]) -> list[Interval]:
    out: list[Interval] = []
    for s, e in sorted(intervals):
        if e <= s:
            continue
        if out and s <= out[-1][1]:
            if e > out[-1][1]:
                out[-1] = (out[-1][0], e)
        else:
            out.append((s, e))
    return out


def total(intervals: list[Interval]) -> int:
    return sum(e - s for s, e in intervals)


def intersection_length(a: list[Interval], b: list[Interval]) -> int:
    """Overlap in ms of two disjoint sorted interval lists."""
    i = j = 0
    acc = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if hi > lo:
            acc += hi - lo
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return acc


def speech_intervals(log: SessionLog) -> list[Interval]:
    d = log.duration_ms
    return merge(
        (max(ev.payload.start_ms, 0), min(ev.payload.end_ms, d))
        for ev in log.events
        if isinstance(ev.payload, SpeechTurn)
    )


def _turns(log: SessionLog) -> list[SpeechTurn]:
    return [ev.payload for ev in log.events if isinstance(ev.payload, SpeechTurn)]


def child_tokens(log: SessionLog) -> list[str]:
    return [w for turn in _turns(log) if turn.speaker == Speaker.CHILD for w in turn.tokens]


def _share(num: int, den: int) -> Optional[float]:
    return None if den == 0 else num / den


# --- metrics ----------------------------------------------------------------


def engagement_ratio(log: SessionLog) -> float:
    return total(state_intervals(log, EngagementSample, "engaged")) / log.duration_ms


def eye_contact_ratio(log: SessionLog) -> Optional[float]:
    interacting = state_intervals(log, InteractionState, "interacting")
    gaze = state_intervals(log, GazeSample, "on_interlocutor")
    return _share(intersection_length(gaze, interacting), total(interacting))


def turn_balance(log: SessionLog) -> Optional[float]:
    """Fraction of adjacent speech-turn pairs whose speakers alternate."""
    speakers = [t.speaker for t in _turns(log)]
    pairs = len(speakers) - 1
    if pairs < 1:
        return None
    return sum(a != b for a, b in zip(speakers, speakers[1:])) / pairs


def conversational_smiles(log: SessionLog) -> Optional[float]:
    speech = speech_intervals(log)
    smiling = state_intervals(log, ExpressionSample, "smiling")
    return _share(intersection_length(smiling, speech), total(speech))


def social_speech(log: SessionLog, lex: LexiconSet) -> Optional[float]:
    toks = child_tokens(log)
    return _share(sum(w in lex.social_words for w in toks), len(toks))


def relational_speech(log: SessionLog, lex: LexiconSet) -> Optional[float]:
    """Plural share of first-person pronouns in child speech."""
    toks = child_tokens(log)
    plural = sum(w in lex.first_person_plural for w in toks)
    singular = sum(w in lex.first_person_singular for w in toks)
    return _share(plural, plural + singular)


def sentiment_ratio(log: SessionLog, lex: LexiconSet) -> Optional[float]:
    """Positive share of sentiment-bearing child tokens."""
    toks = child_tokens(log)
    pos = sum(w in lex.positive_words for w in toks)
    neg = sum(w in lex.negative_words for w in toks)
    return _share(pos, pos + neg)


def compute_all(log: SessionLog, lex: LexiconSet) -> MetricVector:
    return MetricVector(
        engagement=engagement_ratio(log),
        eye_contact=eye_contact_ratio(log),
        turn_balance=turn_balance(log),
        conversational_smiles=conversational_smiles(log),
        social_speech=social_speech(log, lex),
        relational_speech=relational_speech(log, lex),
        sentiment=sentiment_ratio(log, lex),
    )


def mean_vector(vectors: list[MetricVector]) -> MetricVector:
    """Fieldwise mean, skipping undefined entries."""
    out = {}
    for name in METRIC_NAMES:
        vals = [getattr(v, name) for v in vectors if getattr(v, name) is not None]
        out[name] = math.fsum(vals) / len(vals) if vals else None
    return MetricVector(**out)
