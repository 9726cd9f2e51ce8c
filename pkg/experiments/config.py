from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from data.preferences import MIN_MEAN_TO_SD, decaying_correlation
from strategy.presets import PRESETS, SHOP_RANGES, StrategyRanges

DEFAULT_THRESHOLDS: Tuple[float, ...] = tuple(round(0.05 * k, 2) for k in range(11))


@dataclass(frozen=True)
class PreferenceSettings:
    n_goods: int = 10
    mean_range: Tuple[float, float] = (40.0, 250.0)
    sd_floor_fraction: float = 0.05
    min_mean_to_sd: float = MIN_MEAN_TO_SD
    correlation_decay: float = 0.5
    corr: Optional[Tuple[Tuple[float, ...], ...]] = None

    def correlation(self) -> np.ndarray:
        if self.corr is not None:
            return np.asarray(self.corr, dtype=np.float64)
        return decaying_correlation(self.n_goods, self.correlation_decay)


@dataclass(frozen=True)
class PricingSettings:
    beta: float = 0.99
    gamma: float = 0.05
    floor_fraction: float = 0.05
    cost_spread: float = 0.3

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"pricing.beta must lie in (0, 1), got {self.beta}.")
        if self.gamma < 0.0:
            raise ValueError(f"pricing.gamma must be non-negative, got {self.gamma}.")
        if not 0.0 <= self.floor_fraction < self.beta:
            raise ValueError(f"pricing.floor_fraction must lie in [0, beta), got {self.floor_fraction}.")
        if not 0.0 <= self.cost_spread < 1.0:
            raise ValueError(f"pricing.cost_spread must lie in [0, 1), got {self.cost_spread}.")


@dataclass(frozen=True)
class SessionSettings:
    breakdown_probability: float = 0.01
    max_rounds: int = 500
    recommendation_rate: float = 0.25

    def __post_init__(self):
        if not 0.0 <= self.breakdown_probability <= 1.0:
            raise ValueError(f"session.breakdown_probability must lie in [0, 1], got {self.breakdown_probability}.")
        if self.max_rounds < 1:
            raise ValueError(f"session.max_rounds must be at least 1, got {self.max_rounds}.")
        if self.recommendation_rate <= 0.0:
            raise ValueError(f"session.recommendation_rate must be positive, got {self.recommendation_rate}.")


@dataclass(frozen=True)
class ExperimentConfig:
    num_distributions: int = 100
    customers_per_distribution: int = 100
    thresholds: Tuple[float, ...] = DEFAULT_THRESHOLDS
    master_seed: int = 0
    out_dir: Optional[str] = None
    workers: int = 1
    write_transcripts: bool = True
    preset: str = "tdf"
    customer: StrategyRanges = field(default_factory=lambda: PRESETS["tdf"])
    shop: StrategyRanges = SHOP_RANGES
    preferences: PreferenceSettings = field(default_factory=PreferenceSettings)
    pricing: PricingSettings = field(default_factory=PricingSettings)
    session: SessionSettings = field(default_factory=SessionSettings)

    def __post_init__(self):
        if self.num_distributions < 1 or self.customers_per_distribution < 1:
            raise ValueError("Need at least one distribution and one customer.")
        thresholds = tuple(float(x) for x in self.thresholds)
        if not thresholds:
            raise ValueError("At least one threshold is required.")
        if any(x < 0 for x in thresholds):
            raise ValueError(f"Thresholds must be non-negative, got {thresholds}.")
        if list(thresholds) != sorted(thresholds):
            raise ValueError(f"Thresholds must be sorted ascending, got {thresholds}.")
        object.__setattr__(self, "thresholds", thresholds)
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}.")
