import math
from dataclasses import dataclass

import numpy as np

DEFAULT_RECOMMENDATION_RATE = 0.25


@dataclass(frozen=True)
class ProgressSnapshot:
    """
    The customer's current and previous bid on the same bundle, plus the
    shop's valuation of that bundle.
    """
    price: float
    previous_price: float
    shop_valuation: float


def predict_remaining_rounds(snap: ProgressSnapshot) -> float:
    """
    Rounds the customer still needs to reach the shop's valuation at her
    current pace: (v_s - p') / (p - p').

    Already at or above v_s -> 0. No progress (or backwards) -> +inf.
    """
    if snap.price >= snap.shop_valuation:
        return 0.0
    step = snap.price - snap.previous_price
    if step <= 0.0:
        return math.inf
    return (snap.shop_valuation - snap.previous_price) / step


def recommendation_probability(delta_t: float, rate: float = DEFAULT_RECOMMENDATION_RATE) -> float:
    """1 - exp(-rate * delta_t); 1 for an infinite horizon."""
    if delta_t < 0.0:
        raise ValueError(f"delta_t must be non-negative, got {delta_t}.")
    if math.isinf(delta_t):
        return 1.0
    return 1.0 - math.exp(-rate * delta_t)


def should_recommend(
    delta_t: float,
    rng: np.random.Generator,
    rate: float = DEFAULT_RECOMMENDATION_RATE,
) -> bool:
    """
    Bernoulli draw with recommendation_probability(delta_t). Consumes exactly
    one uniform from `rng` per call so trigger streams stay aligned.
    """
    u = rng.random()
    return bool(u < recommendation_probability(delta_t, rate))
