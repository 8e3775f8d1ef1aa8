"""JSONL log format (``star-log/1``).

One header object, then one object per event, each newline-terminated::

    {"schema":"star-log/1","participant_id":7,"session_index":1,"phase":"Baseline","duration_ms":900000}
    {"t":0,"kind":"gaze","on_interlocutor":true}
    {"t":1200,"kind":"speech","speaker":"Child","start_ms":1200,"end_ms":2600,"tokens":["my","friend"]}
"""

from __future__ import annotations

import json
from typing import Any

from .types import (
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
from .validation import InvalidLog, validate_log

SCHEMA = "star-log/1"

# kind -> (payload class, ordered field names)
KINDS: dict[str, tuple[type, tuple[str, ...]]] = {
    "gaze": (GazeSample, ("on_interlocutor",)),
    "expression": (ExpressionSample, ("smiling",)),
    "speech": (SpeechTurn, ("speaker", "start_ms", "end_ms", "tokens")),
    "engagement": (EngagementSample, ("engaged",)),
    "cueing": (CueingResponse, ("question_id", "correct", "prompt_level")),
    "interaction": (InteractionState, ("interacting",)),
    "reward": (Reward, ("question_id",)),
}
_KIND_OF = {cls: kind for kind, (cls, _) in KINDS.items()}

_FIELD_TYPES = {
    "on_interlocutor": bool,
    "smiling": bool,
    "engaged": bool,
    "interacting": bool,
    "correct": bool,
    "start_ms": int,
    "end_ms": int,
    "prompt_level": int,
    "question_id": str,
    "speaker": str,
    "tokens": list,
}


class MalformedRecord(ValueError):
    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {reason}")


class UnknownPayloadKind(ValueError):
    def __init__(self, line_number: int, kind: Any):
        self.line_number = line_number
        self.kind = kind
        super().__init__(f"line {line_number}: unknown payload kind {kind!r}")


def _dumps(obj: dict) -> bytes:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False).encode("utf-8") + b"\n"


def event_to_record(ev: SessionEvent) -> dict:
    kind = _KIND_OF[type(ev.payload)]
    rec: dict[str, Any] = {"t": ev.timestamp_ms, "kind": kind}
    for name in KINDS[kind][1]:
        value = getattr(ev.payload, name)
        if name == "speaker":
            value = value.value
        elif name == "tokens":
            value = list(value)
        rec[name] = value
    return rec


def serialize_log(log: SessionLog) -> bytes:
    violations = validate_log(log)
    if violations:
        raise InvalidLog(violations)
    parts = [
        _dumps(
            {
                "schema": SCHEMA,
                "participant_id": log.participant_id,
                "session_index": log.session_index,
                "phase": log.phase.value,
                "duration_ms": log.duration_ms,
            }
        )
    ]
    parts.extend(_dumps(event_to_record(ev)) for ev in log.events)
    return b"".join(parts)


def _typed(rec: dict, name: str, line_no: int):
    if name not in rec:
        raise MalformedRecord(line_no, f"missing field {name!r}")
    value = rec[name]
    want = _FIELD_TYPES.get(name, int)
    ok = isinstance(value, want) and not (want is int and isinstance(value, bool))
    if not ok:
        raise MalformedRecord(line_no, f"field {name!r} must be {want.__name__}")
    return value


def record_to_event(rec: Any, line_no: int) -> SessionEvent:
    if not isinstance(rec, dict):
        raise MalformedRecord(line_no, "record is not an object")
    kind = rec.get("kind")
    if kind not in KINDS:
        if "kind" not in rec:
            raise MalformedRecord(line_no, "missing field 'kind'")
        raise UnknownPayloadKind(line_no, kind)
    t = _typed(rec, "t", line_no)
    cls, names = KINDS[kind]
    values = {name: _typed(rec, name, line_no) for name in names}
    if "speaker" in values:
        try:
            values["speaker"] = Speaker(values["speaker"])
        except ValueError:
            raise MalformedRecord(line_no, f"bad speaker {values['speaker']!r}") from None
    if "tokens" in values:
        if not all(isinstance(w, str) for w in values["tokens"]):
            raise MalformedRecord(line_no, "tokens must be strings")
        values["tokens"] = tuple(values["tokens"])
    return SessionEvent(t, cls(**values))


def parse_log(data: bytes) -> SessionLog:
    """Inverse of :func:`serialize_log`. Every record must be newline-terminated."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedRecord(1, f"not UTF-8: {exc}") from None
    if not text:
        raise MalformedRecord(1, "empty input")
    lines = text.split("\n")
    if lines[-1] != "":
        raise MalformedRecord(len(lines), "truncated record (no terminating newline)")
    lines.pop()

    records = []
    for n, line in enumerate(lines, start=1):
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise MalformedRecord(n, f"invalid JSON: {exc.msg}") from None

    header = records[0]
    if not isinstance(header, dict) or header.get("schema") != SCHEMA:
        raise MalformedRecord(1, f"header must declare schema {SCHEMA!r}")
    pid = _typed(header, "participant_id", 1)
    idx = _typed(header, "session_index", 1)
    dur = _typed(header, "duration_ms", 1)
    try:
        phase = Phase(header.get("phase"))
    except ValueError:
        raise MalformedRecord(1, f"bad phase {header.get('phase')!r}") from None

    events = tuple(record_to_event(rec, n) for n, rec in enumerate(records[1:], start=2))
    return SessionLog(pid, idx, phase, dur, events)
