"""Event vocabulary and session containers.

All value objects are frozen. Constructors do not validate; use
:func:`star.session_model.validate_log` to check invariants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union


class Speaker(str, Enum):
    CHILD = "Child"
    ROBOT = "Robot"


class Phase(str, Enum):
    BASELINE = "Baseline"
    INTERVENTION = "Intervention"
    EXIT = "Exit"
    FOLLOW_UP = "FollowUp"


class ContentArea(str, Enum):
    STORIES = "Stories"
    MINDFULNESS = "Mindfulness"
    CREATIVE_PLAY = "CreativePlay"
    LIFE_SKILLS = "LifeSkills"
    MISSIONS = "Missions"
    DELIGHTERS = "Delighters"


# Edge-triggered state samples: each holds until the next sample of the
# same kind or the end of the session.


@dataclass(frozen=True)
class GazeSample:
    on_interlocutor: bool


@dataclass(frozen=True)
class ExpressionSample:
    smiling: bool


@dataclass(frozen=True)
class EngagementSample:
    engaged: bool


@dataclass(frozen=True)
class InteractionState:
    interacting: bool


@dataclass(frozen=True)
class SpeechTurn:
    speaker: Speaker
    start_ms: int
    end_ms: int
    tokens: tuple[str, ...] = ()


@dataclass(frozen=True)
class CueingResponse:
    question_id: str
    correct: bool
    prompt_level: int


@dataclass(frozen=True)
class Reward:
    question_id: str


Payload = Union[
    GazeSample,
    ExpressionSample,
    SpeechTurn,
    EngagementSample,
    CueingResponse,
    InteractionState,
    Reward,
]


@dataclass(frozen=True)
class SessionEvent:
    timestamp_ms: int
    payload: Payload


@dataclass(frozen=True)
class SessionLog:
    participant_id: int
    session_index: int
    phase: Phase
    duration_ms: int
    events: tuple[SessionEvent, ...] = ()


@dataclass(frozen=True)
class Question:
    question_id: str
    prompt_level_0_text: str
    prompt_level_1_text: str
    prompt_level_2_text: str

    def prompt(self, level: int) -> str:
        return (self.prompt_level_0_text, self.prompt_level_1_text, self.prompt_level_2_text)[level]


@dataclass(frozen=True)
class GoalLevel:
    level_index: int
    mastery_threshold: float = 0.8
    mastery_window: int = 10


@dataclass(frozen=True)
class ActivityDefinition:
    activity_id: str
    content_area: ContentArea
    target_skill: str
    goal_levels: tuple[GoalLevel, ...]
    # questions[i] belongs to goal_levels[i]
    questions: tuple[tuple[Question, ...], ...] = field(default=())
