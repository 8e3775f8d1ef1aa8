"""Adaptive activity scheduler.

Each skill carries a scalar Kalman-style ability estimate. Candidate
activities are scored by::

    alpha * variance(skill)                 # what we would learn
  + beta  * mean * (1 - mean)               # training headroom
  + preference(activity)
  - gamma * 1 / (1 + sessions since last scheduled)   # 0 if never scheduled

and the argmax is picked, ties broken by the smallest activity id.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .cueing import CueingOutcome
from .session_model import ActivityDefinition

# scores closer than this (relative) count as tied
TIE_RTOL = 1e-9


class EmptyCatalog(ValueError):
    pass


@dataclass(frozen=True)
class SkillEstimate:
    skill: str
    mean: float = 0.5
    variance: float = 1 / 12
    observation_count: int = 0


@dataclass(frozen=True)
class SchedulerWeights:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 0.5

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"weight {name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class SchedulerConfig:
    weights: SchedulerWeights = SchedulerWeights()
    noise: float = 0.05
    prior_mean: float = 0.5
    prior_variance: float = 1 / 12
    # optional population norming: skill -> offset added to the prior mean
    population_offset: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "SchedulerConfig":
        w = d.get("weights", {})
        return cls(
            weights=SchedulerWeights(**{k: float(w[k]) for k in ("alpha", "beta", "gamma") if k in w}),
            noise=float(d.get("noise", 0.05)),
            prior_mean=float(d.get("prior_mean", 0.5)),
            prior_variance=float(d.get("prior_variance", 1 / 12)),
            population_offset={str(k): float(v) for k, v in d.get("population_offset", {}).items()},
        )

    def to_dict(self) -> dict:
        return {
            "weights": {"alpha": self.weights.alpha, "beta": self.weights.beta, "gamma": self.weights.gamma},
            "noise": self.noise,
            "prior_mean": self.prior_mean,
            "prior_variance": self.prior_variance,
            "population_offset": dict(self.population_offset),
        }

    def prior(self, skill: str) -> SkillEstimate:
        mean = min(1.0, max(0.0, self.prior_mean + self.population_offset.get(skill, 0.0)))
        return SkillEstimate(skill, mean, self.prior_variance, 0)


@dataclass
class SchedulerState:
    estimates: dict = field(default_factory=dict)
    history: list = field(default_factory=list)  # (session_index, activity_id)
    preferences: dict = field(default_factory=dict)
    config: SchedulerConfig = field(default_factory=SchedulerConfig)

    @property
    def weights(self) -> SchedulerWeights:
        return self.config.weights

    def estimate(self, skill: str) -> SkillEstimate:
        return self.estimates.get(skill) or self.config.prior(skill)

    def last_scheduled(self, activity_id: str) -> Optional[int]:
        for idx, aid in reversed(self.history):
            if aid == activity_id:
                return idx
        return None

    def observe(self, skill: str, outcome: CueingOutcome) -> SkillEstimate:
        est = update_estimate(self.estimate(skill), outcome, self.config.noise)
        self.estimates[skill] = est
        return est

    def to_dict(self) -> dict:
        return {
            "estimates": {
                s: {"mean": e.mean, "variance": e.variance, "observation_count": e.observation_count}
                for s, e in sorted(self.estimates.items())
            },
            "history": [[i, a] for i, a in self.history],
            "preferences": dict(self.preferences),
            "config": self.config.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SchedulerState":
        estimates = {
            s: SkillEstimate(s, float(e["mean"]), float(e["variance"]), int(e.get("observation_count", 0)))
            for s, e in d.get("estimates", {}).items()
        }
        history = [(int(i), str(a)) for i, a in d.get("history", [])]
        if any(a[0] > b[0] for a, b in zip(history, history[1:])):
            raise ValueError("history must be ordered by session_index")
        prefs = {str(k): float(v) for k, v in d.get("preferences", {}).items()}
        if any(v < 0 or not math.isfinite(v) for v in prefs.values()):
            raise ValueError("preferences must be finite and >= 0")
        return cls(estimates, history, prefs, SchedulerConfig.from_dict(d.get("config", {})))

    @classmethod
    def load(cls, path) -> "SchedulerState":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def update_estimate(est: SkillEstimate, outcome: CueingOutcome, noise: float = 0.05) -> SkillEstimate:
    """Treat the independence score as a noisy reading of ability."""
    var = est.variance
    gain = var / (var + noise) if var > 0 else 0.0
    mean = est.mean + gain * (outcome.independence_score - est.mean)
    return SkillEstimate(est.skill, min(1.0, max(0.0, mean)), (1 - gain) * var, est.observation_count + 1)


def recency(state: SchedulerState, activity_id: str, now: int) -> float:
    last = state.last_scheduled(activity_id)
    if last is None:
        return 0.0
    return 1.0 / (1 + max(now - last, 0))


def score_activity(state: SchedulerState, activity: ActivityDefinition, now: int) -> float:
    w = state.weights
    est = state.estimate(activity.target_skill)
    return (
        w.alpha * est.variance
        + w.beta * est.mean * (1 - est.mean)
        + state.preferences.get(activity.activity_id, 0.0)
        - w.gamma * recency(state, activity.activity_id, now)
    )


def argmax_activity(scored: list[tuple[float, str]]) -> str:
    best = max(s for s, _ in scored)
    # purely relative so that rescaling every weight never changes the choice
    tol = TIE_RTOL * max(abs(s) for s, _ in scored)
    return min(aid for s, aid in scored if s >= best - tol)


def select_next(state: SchedulerState, catalog: list[ActivityDefinition], now: int) -> str:
    """Pick the best-scoring activity for session ``now`` and record it in the history."""
    if not catalog:
        raise EmptyCatalog("catalog is empty")
    choice = argmax_activity([(score_activity(state, a, now), a.activity_id) for a in catalog])
    state.history.append((now, choice))
    return choice


def next_session_index(state: SchedulerState) -> int:
    return state.history[-1][0] + 1 if state.history else 1


def personalize_plan(
    state: SchedulerState, catalog: list[ActivityDefinition], horizon: int, now: Optional[int] = None
) -> list[str]:
    """Greedy ``horizon``-step rollout with frozen estimates; ``state`` is left untouched."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if not catalog:
        raise EmptyCatalog("catalog is empty")
    sim = replace(state, history=list(state.history), estimates=copy.copy(state.estimates))
    start = next_session_index(state) if now is None else now
    return [select_next(sim, catalog, start + k) for k in range(horizon)]
