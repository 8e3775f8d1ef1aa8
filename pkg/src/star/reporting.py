"""Weekly progress reports and boxplot summaries."""

from __future__ import annotations

import json
import math
import operator
import statistics
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .metrics import METRIC_NAMES, LexiconSet, compute_all
from .session_model import SessionLog

REPORT_SCHEMA = "star-report/1"
SESSIONS_PER_WEEK = 3

_OPS = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge}


class EmptyInput(ValueError):
    pass


class MixedParticipants(ValueError):
    pass


@dataclass(frozen=True)
class BoxplotSummary:
    min: float
    q1: float
    median: float
    q3: float
    max: float

    def as_tuple(self) -> tuple:
        return (self.min, self.q1, self.median, self.q3, self.max)


def boxplot_summary(values: Sequence[float]) -> BoxplotSummary:
    """Five-number summary; quartiles interpolate linearly between closest ranks."""
    vals = sorted(values)
    if not vals:
        raise EmptyInput("boxplot needs at least one value")
    if len(vals) == 1:
        v = vals[0]
        return BoxplotSummary(v, v, v, v, v)
    q1, med, q3 = statistics.quantiles(vals, n=4, method="inclusive")
    # interpolation can drift an ulp outside its bracketing ranks
    q1 = min(max(q1, vals[0]), vals[-1])
    med = min(max(med, q1), vals[-1])
    q3 = min(max(q3, med), vals[-1])
    return BoxplotSummary(vals[0], q1, med, q3, vals[-1])


@dataclass(frozen=True)
class SuggestionRule:
    metric: str
    op: str
    value: float
    tip: str

    def __post_init__(self):
        if self.metric not in METRIC_NAMES:
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.op not in _OPS:
            raise ValueError(f"unknown comparison {self.op!r}")

    def fires(self, mean: Optional[float]) -> bool:
        return mean is not None and _OPS[self.op](mean, self.value)


def load_thresholds(path: Union[str, Path, None] = None) -> list[SuggestionRule]:
    if path is None:
        text = resources.files("star.data").joinpath("thresholds.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    doc = json.loads(text)
    return [SuggestionRule(r["metric"], r["op"], float(r["value"]), r["tip"]) for r in doc["rules"]]


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    trend: float


@dataclass
class WeeklyReport:
    participant_id: int
    week_index: int
    metrics: dict  # metric name -> MetricSummary or None
    activities_completed: list = field(default_factory=list)
    suggestions: list = field(default_factory=list)

    def mean(self, name: str) -> Optional[float]:
        s = self.metrics.get(name)
        return None if s is None else s.mean

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "participant_id": self.participant_id,
            "week_index": self.week_index,
            "metrics": {
                name: None if s is None else {"mean": s.mean, "trend": s.trend}
                for name, s in self.metrics.items()
            },
            "activities_completed": list(self.activities_completed),
            "suggestions": list(self.suggestions),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WeeklyReport":
        if d.get("schema") != REPORT_SCHEMA:
            raise ValueError(f"expected schema {REPORT_SCHEMA!r}")
        metrics = {
            name: None if s is None else MetricSummary(float(s["mean"]), float(s["trend"]))
            for name, s in d["metrics"].items()
        }
        return cls(int(d["participant_id"]), int(d["week_index"]), metrics,
                   list(d.get("activities_completed", [])), list(d.get("suggestions", [])))


def week_of(session_index: int, sessions_per_week: int = SESSIONS_PER_WEEK) -> int:
    return (session_index - 1) // sessions_per_week + 1


def weekly_report(
    logs: Sequence[SessionLog],
    prior: Optional[WeeklyReport],
    lex: LexiconSet,
    rules: Optional[Sequence[SuggestionRule]] = None,
    *,
    activities: Iterable[str] = (),
    sessions_per_week: int = SESSIONS_PER_WEEK,
) -> WeeklyReport:
    if not logs:
        raise EmptyInput("no sessions for this week")
    pids = {log.participant_id for log in logs}
    if len(pids) > 1:
        raise MixedParticipants(f"logs span participants {sorted(pids)}")
    weeks = {week_of(log.session_index, sessions_per_week) for log in logs}
    if len(weeks) > 1:
        raise ValueError(f"logs span weeks {sorted(weeks)}")
    rules = load_thresholds() if rules is None else rules

    vectors = [compute_all(log, lex) for log in logs]
    metrics = {}
    for name in METRIC_NAMES:
        vals = [getattr(v, name) for v in vectors if getattr(v, name) is not None]
        if not vals:
            metrics[name] = None
            continue
        mean = math.fsum(vals) / len(vals)
        before = prior.mean(name) if prior is not None else None
        metrics[name] = MetricSummary(mean, 0.0 if before is None else mean - before)

    suggestions = []
    for rule in rules:
        s = metrics.get(rule.metric)
        if rule.fires(None if s is None else s.mean) and rule.tip not in suggestions:
            suggestions.append(rule.tip)
    return WeeklyReport(pids.pop(), weeks.pop(), metrics, sorted(set(activities)), suggestions)


def weekly_reports(
    logs: Iterable[SessionLog],
    lex: LexiconSet,
    rules: Optional[Sequence[SuggestionRule]] = None,
    *,
    activities: Optional[dict] = None,
    sessions_per_week: int = SESSIONS_PER_WEEK,
) -> list[WeeklyReport]:
    """Reports for every participant and week, each chained to the previous week.

    ``activities`` optionally maps participant id to its (session_index, activity_id) history.
    """
    groups: dict[int, dict[int, list]] = {}
    for log in logs:
        groups.setdefault(log.participant_id, {}).setdefault(week_of(log.session_index, sessions_per_week), []).append(log)
    out = []
    for pid in sorted(groups):
        prior = None
        history = (activities or {}).get(pid, [])
        for week in sorted(groups[pid]):
            acts = [a for idx, a in history if week_of(idx, sessions_per_week) == week]
            prior = weekly_report(groups[pid][week], prior, lex, rules, activities=acts,
                                  sessions_per_week=sessions_per_week)
            out.append(prior)
    return out
