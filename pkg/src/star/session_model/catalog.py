"""Activity catalog JSON.

Schema::

    {"activities": [
      {"activity_id": "breathing-1", "content_area": "Mindfulness",
       "target_skill": "EmotionRegulation",
       "goal_levels": [
         {"level_index": 0, "mastery_threshold": 0.8, "mastery_window": 10,
          "questions": [{"question_id": "...", "prompt_level_0_text": "...",
                         "prompt_level_1_text": "...", "prompt_level_2_text": "..."}]}
       ]}
    ]}
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Union

from .types import ActivityDefinition, ContentArea, GoalLevel, Question


class CatalogError(ValueError):
    pass


def check_activity(act: ActivityDefinition) -> None:
    if not act.goal_levels:
        raise CatalogError(f"{act.activity_id}: needs at least one goal level")
    if len(act.questions) != len(act.goal_levels):
        raise CatalogError(f"{act.activity_id}: one question list per goal level required")
    for i, (level, qs) in enumerate(zip(act.goal_levels, act.questions)):
        if level.level_index != i:
            raise CatalogError(f"{act.activity_id}: goal levels must be indexed 0..n-1 in order")
        if not 0.0 <= level.mastery_threshold <= 1.0:
            raise CatalogError(f"{act.activity_id}: mastery_threshold outside [0, 1]")
        if level.mastery_window < 1:
            raise CatalogError(f"{act.activity_id}: mastery_window must be positive")
        if not qs:
            raise CatalogError(f"{act.activity_id}: level {i} has no questions")
        for q in qs:
            if not (q.prompt_level_1_text and q.prompt_level_2_text):
                raise CatalogError(f"{q.question_id}: exactly two escalation prompts required")


def activity_from_dict(d: dict) -> ActivityDefinition:
    try:
        levels = []
        questions = []
        for lv in d["goal_levels"]:
            levels.append(
                GoalLevel(
                    int(lv["level_index"]),
                    float(lv.get("mastery_threshold", 0.8)),
                    int(lv.get("mastery_window", 10)),
                )
            )
            questions.append(tuple(Question(**q) for q in lv["questions"]))
        act = ActivityDefinition(
            activity_id=str(d["activity_id"]),
            content_area=ContentArea(d["content_area"]),
            target_skill=str(d["target_skill"]),
            goal_levels=tuple(levels),
            questions=tuple(questions),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogError(f"bad activity record: {exc}") from None
    check_activity(act)
    return act


def activity_to_dict(act: ActivityDefinition) -> dict:
    return {
        "activity_id": act.activity_id,
        "content_area": act.content_area.value,
        "target_skill": act.target_skill,
        "goal_levels": [
            {
                "level_index": lv.level_index,
                "mastery_threshold": lv.mastery_threshold,
                "mastery_window": lv.mastery_window,
                "questions": [q.__dict__.copy() for q in qs],
            }
            for lv, qs in zip(act.goal_levels, act.questions)
        ],
    }


def load_catalog(path: Union[str, Path, None] = None) -> list[ActivityDefinition]:
    """Load a catalog file; ``None`` loads the bundled default catalog."""
    if path is None:
        text = resources.files("star.data").joinpath("catalog.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"catalog is not valid JSON: {exc}") from None
    acts = [activity_from_dict(d) for d in doc.get("activities", [])]
    ids = [a.activity_id for a in acts]
    if len(set(ids)) != len(ids):
        raise CatalogError("duplicate activity_id in catalog")
    return acts
