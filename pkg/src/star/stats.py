"""Paired t-test with p-values from the regularized incomplete beta function."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 500


class LengthMismatch(ValueError):
    pass


class ZeroVariance(ArithmeticError):
    """All paired differences are equal and nonzero; ``result`` holds the t -> +/-inf limit."""

    def __init__(self, result: "StatTestResult"):
        self.result = result
        super().__init__(f"all differences equal ({result.mean_baseline - result.mean_post:+g}); t is infinite")


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete-beta continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = _TINY if abs(d) < _TINY else d
        c = 1.0 + aa / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = _TINY if abs(d) < _TINY else d
        c = 1.0 + aa / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """I_x(a, b) for a, b > 0 and 0 <= x <= 1."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_tailed_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return min(1.0, max(0.0, regularized_incomplete_beta(x, df / 2.0, 0.5)))


@dataclass(frozen=True)
class StatTestResult:
    t: float
    df: int
    p: float
    mean_baseline: float
    sd_baseline: float
    mean_post: float
    sd_post: float
    n: int
    measure: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(self.t):
            d["t"] = "inf" if self.t > 0 else "-inf"
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StatTestResult":
        d = dict(d)
        d["t"] = float(d["t"])
        return cls(**d)


def _mean(xs: Sequence[float]) -> float:
    return math.fsum(xs) / len(xs)


def _sd(xs: Sequence[float]) -> float:
    m = _mean(xs)
    return math.sqrt(math.fsum((x - m) ** 2 for x in xs) / (len(xs) - 1))


def paired_t_test(baseline: Sequence[float], post: Sequence[float], measure: str = "") -> StatTestResult:
    """Two-tailed paired t-test on differences ``baseline - post``."""
    if len(baseline) != len(post):
        raise LengthMismatch(f"{len(baseline)} baseline values vs {len(post)} post values")
    n = len(baseline)
    if n < 2:
        raise ValueError("need at least two pairs")
    diffs = [b - p for b, p in zip(baseline, post)]
    mean_d = _mean(diffs)
    sd_d = _sd(diffs)
    common = dict(
        df=n - 1,
        mean_baseline=_mean(baseline),
        sd_baseline=_sd(baseline),
        mean_post=_mean(post),
        sd_post=_sd(post),
        n=n,
        measure=measure,
    )
    # identical differences can still leave a few ulps of spread after subtraction
    if sd_d <= 1e-12 * max(abs(d) for d in diffs):
        if mean_d == 0.0:
            return StatTestResult(t=0.0, p=1.0, **common)
        raise ZeroVariance(StatTestResult(t=math.copysign(math.inf, mean_d), p=0.0, **common))
    t = mean_d / (sd_d / math.sqrt(n))
    return StatTestResult(t=t, p=t_two_tailed_p(t, n - 1), **common)
