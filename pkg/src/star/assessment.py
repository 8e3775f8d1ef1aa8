"""Questionnaire scoring into skill categories and cohort-level paired tests."""

from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .metrics import METRIC_NAMES, MetricVector
from .stats import StatTestResult, ZeroVariance, paired_t_test

MAX_SCORE = 3


class Category(str, Enum):
    EMOTION_REGULATION = "EmotionRegulation"
    SELF_ESTEEM = "SelfEsteem"
    CONVERSATION_SKILLS = "ConversationSkills"
    FRIENDSHIP_SKILLS = "FriendshipSkills"
    BEHAVIOR = "Behavior"
    INTERPERSONAL_SKILLS = "InterpersonalSkills"


class Questionnaire(str, Enum):
    SRS = "SRS"
    SSIS = "SSIS"
    VINELAND = "Vineland"


class Polarity(str, Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"


class AssessPhase(str, Enum):
    BASELINE = "Baseline"
    POST = "Post"


class ParseError(ValueError):
    pass


class DuplicateItem(ValueError):
    pass


class MissingItem(KeyError):
    pass


class MissingPhase(ValueError):
    def __init__(self, participant_id: int, phase: AssessPhase):
        self.participant_id = participant_id
        self.phase = phase
        super().__init__(f"participant {participant_id} has no {phase.value} record")


class InsufficientPairs(ValueError):
    pass


@dataclass(frozen=True)
class AssessmentItem:
    key: str
    category: Category
    questionnaire: Questionnaire
    text: str
    polarity: Polarity = Polarity.POSITIVE


@dataclass
class AssessmentRecord:
    participant_id: int
    phase: AssessPhase
    item_scores: dict = field(default_factory=dict)  # item key -> int in 0..3

    def __post_init__(self):
        for key, score in self.item_scores.items():
            if isinstance(score, bool) or not isinstance(score, int) or not 0 <= score <= MAX_SCORE:
                raise ValueError(f"item {key}: score {score!r} outside 0..{MAX_SCORE}")


def apply_polarity(score: float, polarity: Polarity) -> float:
    """Reverse-score negatively worded items; applying it twice is the identity."""
    return MAX_SCORE - score if polarity is Polarity.NEGATIVE else score


def load_groupings(path: Union[str, Path, None] = None) -> list[AssessmentItem]:
    if path is None:
        text = resources.files("star.data").joinpath("groupings.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    try:
        doc = json.loads(text)
        rows = doc["items"] if isinstance(doc, dict) else doc
        items = [
            AssessmentItem(
                key=str(r.get("key") or f"{r['category']}/{r['questionnaire']}/{r['text']}"),
                category=Category(r["category"]),
                questionnaire=Questionnaire(r["questionnaire"]),
                text=str(r["text"]),
                polarity=Polarity(r.get("polarity", "Positive")),
            )
            for r in rows
        ]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad groupings file: {exc}") from None
    seen_triples = set()
    seen_keys = set()
    for it in items:
        triple = (it.category, it.questionnaire, it.text)
        if triple in seen_triples or it.key in seen_keys:
            raise DuplicateItem(f"{it.category.value} / {it.questionnaire.value}: {it.text!r}")
        seen_triples.add(triple)
        seen_keys.add(it.key)
    return items


def items_in(items: Iterable[AssessmentItem], category: Category) -> list[AssessmentItem]:
    return [it for it in items if it.category == category]


def category_score(record: AssessmentRecord, category: Category, items: Sequence[AssessmentItem]) -> float:
    """Mean of the category's item scores after reverse-scoring negative items."""
    group = items_in(items, category)
    if not group:
        raise MissingItem(f"no items for category {category.value}")
    vals = []
    for it in group:
        if it.key not in record.item_scores:
            raise MissingItem(it.key)
        vals.append(apply_polarity(record.item_scores[it.key], it.polarity))
    return sum(vals) / len(vals)


# --- records CSV ------------------------------------------------------------

CSV_COLUMNS = ("participant_id", "phase", "item_key", "score")


def write_records_csv(records: Iterable[AssessmentRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        for key in sorted(rec.item_scores):
            w.writerow([rec.participant_id, rec.phase.value, key, rec.item_scores[key]])
    return buf.getvalue()


def read_records_csv(text: str) -> list[AssessmentRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or set(CSV_COLUMNS) - set(reader.fieldnames):
        raise ParseError(f"records CSV needs columns {', '.join(CSV_COLUMNS)}")
    by_key: dict[tuple[int, AssessPhase], dict] = defaultdict(dict)
    for n, row in enumerate(reader, start=2):
        try:
            pid = int(row["participant_id"])
            phase = AssessPhase(row["phase"])
            score = int(row["score"])
        except (TypeError, ValueError) as exc:
            raise ParseError(f"line {n}: {exc}") from None
        scores = by_key[(pid, phase)]
        if row["item_key"] in scores:
            raise DuplicateItem(f"line {n}: participant {pid} {phase.value} item {row['item_key']} repeated")
        scores[row["item_key"]] = score
    try:
        return [AssessmentRecord(pid, phase, scores) for (pid, phase), scores in by_key.items()]
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def pair_records(records: Iterable[AssessmentRecord]) -> list[tuple[AssessmentRecord, AssessmentRecord]]:
    """Match each participant's Baseline and Post records, ordered by participant id."""
    by_pid: dict[int, dict] = defaultdict(dict)
    for rec in records:
        by_pid[rec.participant_id][rec.phase] = rec
    pairs = []
    for pid in sorted(by_pid):
        phases = by_pid[pid]
        for ph in AssessPhase:
            if ph not in phases:
                raise MissingPhase(pid, ph)
        pairs.append((phases[AssessPhase.BASELINE], phases[AssessPhase.POST]))
    return pairs


# --- cohort analysis --------------------------------------------------------


def _test(baseline: list[float], post: list[float], measure: str) -> StatTestResult:
    if len(baseline) < 2:
        raise InsufficientPairs(f"{measure}: {len(baseline)} usable pair(s), need 2")
    try:
        return paired_t_test(baseline, post, measure=measure)
    except ZeroVariance as exc:
        return exc.result


def analyze_cohort(
    record_pairs: Optional[Sequence[tuple[AssessmentRecord, AssessmentRecord]]],
    metric_pairs: Optional[Sequence[tuple[MetricVector, MetricVector]]],
    items: Optional[Sequence[AssessmentItem]] = None,
) -> list[StatTestResult]:
    """One paired test per category (6) and per metric (7).

    Pass ``None`` for either pair list to skip that family. Undefined
    metric values drop the pair for that metric only.
    """
    results = []
    if record_pairs is not None:
        items = load_groupings() if items is None else items
        for cat in Category:
            base = [category_score(b, cat, items) for b, _ in record_pairs]
            post = [category_score(p, cat, items) for _, p in record_pairs]
            results.append(_test(base, post, cat.value))
    if metric_pairs is not None:
        for name in METRIC_NAMES:
            usable = [
                (getattr(b, name), getattr(p, name))
                for b, p in metric_pairs
                if getattr(b, name) is not None and getattr(p, name) is not None
            ]
            results.append(_test([u[0] for u in usable], [u[1] for u in usable], name))
    return results
