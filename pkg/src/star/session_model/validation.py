from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

from .types import (
    CueingResponse,
    EngagementSample,
    ExpressionSample,
    GazeSample,
    InteractionState,
    Phase,
    Reward,
    SessionLog,
    Speaker,
    SpeechTurn,
)

_STATE_FIELDS = {
    GazeSample: "on_interlocutor",
    ExpressionSample: "smiling",
    EngagementSample: "engaged",
    InteractionState: "interacting",
}


@dataclass(frozen=True)
class Violation:
    """One broken invariant. ``index`` is the event index, or None for header rules."""

    index: Optional[int]
    rule: str
    detail: str = ""


class InvalidLog(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        first = violations[0]
        where = "header" if first.index is None else f"event {first.index}"
        super().__init__(f"{len(violations)} violation(s); first: {first.rule} at {where}")


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _check_payload(i: int, t: Any, p: Any, duration: Any) -> list[Violation]:
    out: list[Violation] = []
    if type(p) in _STATE_FIELDS:
        if not isinstance(getattr(p, _STATE_FIELDS[type(p)], None), bool):
            out.append(Violation(i, "bad-field", f"{_STATE_FIELDS[type(p)]} must be bool"))
    elif isinstance(p, SpeechTurn):
        if not isinstance(p.speaker, Speaker):
            out.append(Violation(i, "bad-field", "speaker must be Child or Robot"))
        if not (_is_int(p.start_ms) and _is_int(p.end_ms)):
            out.append(Violation(i, "bad-field", "turn bounds must be integers"))
            return out
        if p.end_ms <= p.start_ms:
            out.append(Violation(i, "empty-turn", f"end_ms {p.end_ms} <= start_ms {p.start_ms}"))
        if p.start_ms != t:
            out.append(Violation(i, "turn-start-mismatch", f"start_ms {p.start_ms} != t {t}"))
        if _is_int(duration) and p.end_ms > duration:
            out.append(Violation(i, "turn-overrun", f"end_ms {p.end_ms} > duration {duration}"))
        if not isinstance(p.tokens, tuple) or not all(isinstance(w, str) for w in p.tokens):
            out.append(Violation(i, "bad-field", "tokens must be a tuple of str"))
        elif any(w != w.lower() or not w for w in p.tokens):
            out.append(Violation(i, "bad-token", "tokens must be non-empty lowercase words"))
    elif isinstance(p, CueingResponse):
        if not isinstance(p.question_id, str):
            out.append(Violation(i, "bad-field", "question_id must be str"))
        if not isinstance(p.correct, bool):
            out.append(Violation(i, "bad-field", "correct must be bool"))
        if not _is_int(p.prompt_level) or p.prompt_level not in (0, 1, 2):
            out.append(Violation(i, "prompt-level", f"prompt_level {p.prompt_level!r} not in 0..2"))
    elif isinstance(p, Reward):
        if not isinstance(p.question_id, str):
            out.append(Violation(i, "bad-field", "question_id must be str"))
    else:
        out.append(Violation(i, "unknown-payload", type(p).__name__))
    return out


def validate_log(log: SessionLog) -> list[Violation]:
    """Return every invariant violation in ``log``; never raises."""
    out: list[Violation] = []
    try:
        if not _is_int(log.participant_id) or log.participant_id < 0:
            out.append(Violation(None, "participant-id", "must be a non-negative integer"))
        if not _is_int(log.session_index) or log.session_index < 1:
            out.append(Violation(None, "session-index", "must be an integer >= 1"))
        if not isinstance(log.phase, Phase):
            out.append(Violation(None, "phase", repr(log.phase)))
        duration = log.duration_ms
        if not _is_int(duration) or duration <= 0:
            out.append(Violation(None, "duration", "must be a positive integer"))
            duration = None
        prev = None
        for i, ev in enumerate(log.events):
            t = getattr(ev, "timestamp_ms", None)
            if not _is_int(t):
                out.append(Violation(i, "bad-timestamp", repr(t)))
                continue
            if t < 0:
                out.append(Violation(i, "negative-timestamp", str(t)))
            if prev is not None and t < prev:
                out.append(Violation(i, "non-monotone", f"{t} < {prev}"))
            if duration is not None and t > duration:
                out.append(Violation(i, "after-duration", f"{t} > {duration}"))
            prev = t
            out.extend(_check_payload(i, t, getattr(ev, "payload", None), duration))
    except Exception as exc:  # validation is total
        out.append(Violation(None, "unreadable", f"{type(exc).__name__}: {exc}"))
    return out
