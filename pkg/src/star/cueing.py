"""Graded cueing: one question, at most two escalation prompts.

The machine asks at prompt level 0. A wrong answer escalates to level 1,
then level 2. It halts on the first correct answer or after the level-2
response::

    L0 --correct--> success(0 prompts)
    L0 --wrong--> L1 --correct--> success(1 prompt)
                  L1 --wrong--> L2 --correct--> success(2 prompts)
                                L2 --wrong--> failure
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .session_model import GoalLevel, Question, Reward

MAX_PROMPTS = 2


class CallbackFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class CueingOutcome:
    question_id: str
    prompts_used: int
    succeeded: bool

    @property
    def independence_score(self) -> float:
        if not self.succeeded:
            return 0.0
        return 1.0 - self.prompts_used / 3

    @property
    def independent(self) -> bool:
        return self.succeeded and self.prompts_used == 0


def _check_question(question: Question) -> None:
    if not (question.prompt_level_1_text and question.prompt_level_2_text):
        raise ValueError(f"{question.question_id}: needs exactly two escalation prompts")


def run_question(question: Question, respond: Callable[[int], bool]) -> CueingOutcome:
    """Drive one question; ``respond(prompt_level)`` returns whether the answer was correct."""
    _check_question(question)
    for level in range(MAX_PROMPTS + 1):
        try:
            correct = respond(level)
        except Exception as exc:
            raise CallbackFailure(f"{question.question_id}: response callback failed at level {level}") from exc
        if correct:
            return CueingOutcome(question.question_id, level, True)
    return CueingOutcome(question.question_id, MAX_PROMPTS, False)


def enumerate_paths(question: Question) -> list[tuple[tuple[bool, ...], CueingOutcome]]:
    """Every reachable response path with its outcome, found by replaying all 2**3 scripts."""
    seen: dict[tuple[bool, ...], CueingOutcome] = {}
    for script in itertools.product((False, True), repeat=MAX_PROMPTS + 1):
        consumed: list[bool] = []

        def respond(level: int) -> bool:
            consumed.append(script[level])
            return script[level]

        outcome = run_question(question, respond)
        seen.setdefault(tuple(consumed), outcome)
    return sorted(seen.items(), key=lambda kv: len(kv[0]))


@dataclass(frozen=True)
class GoalProgress:
    skill: str
    n_levels: int
    current_level: int = 0
    recent_outcomes: tuple[CueingOutcome, ...] = field(default=())

    @property
    def at_top(self) -> bool:
        return self.current_level >= self.n_levels - 1


def record_outcome(
    progress: GoalProgress, outcome: CueingOutcome, level: GoalLevel
) -> tuple[GoalProgress, Optional[Reward]]:
    """Append ``outcome`` to the mastery window and advance at most one level.

    Returns the new progress and a reward marker when the question was
    answered correctly. The window resets after a level change.
    """
    window = deque(progress.recent_outcomes, maxlen=level.mastery_window)
    window.append(outcome)
    reward = Reward(outcome.question_id) if outcome.succeeded else None

    full = len(window) == level.mastery_window
    independent = sum(o.independent for o in window)
    if full and not progress.at_top and independent / len(window) >= level.mastery_threshold:
        return replace(progress, current_level=progress.current_level + 1, recent_outcomes=()), reward
    return replace(progress, recent_outcomes=tuple(window)), reward
