from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from bundles.bundle import Originator
from strategy.bidding import (
    SHOP_DELTA,
    BiddingStrategy,
    StrategyKind,
    StrategyParams,
    TimeDependentFraction,
    TitForTatMonotoneFraction,
)


@dataclass(frozen=True)
class StrategyRanges:
    """
    How strategy parameters are drawn for one side.

    delta_fixed, when set, replaces the delta_range draw.
    """
    kind: StrategyKind = StrategyKind.TDF
    gap_init_range: Tuple[float, float] = (0.0, 0.5)
    delta_range: Tuple[float, float] = (0.1, 0.4)
    delta_fixed: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", StrategyKind(self.kind))
        lo, hi = self.gap_init_range
        if not 0.0 <= lo <= hi <= 0.5:
            raise ValueError(f"gap_init_range must lie within [0, 0.5], got {self.gap_init_range}.")
        lo, hi = self.delta_range
        if not 0.0 < lo <= hi:
            raise ValueError(f"delta_range must be positive and ordered, got {self.delta_range}.")
        if self.delta_fixed is not None and self.delta_fixed <= 0.0:
            raise ValueError(f"delta_fixed must be positive, got {self.delta_fixed}.")


SHOP_RANGES = StrategyRanges(kind=StrategyKind.TDF, delta_fixed=SHOP_DELTA)

# customer side of each result panel; the shop is always SHOP_RANGES
PRESETS: Dict[str, StrategyRanges] = {
    "tdf": StrategyRanges(kind=StrategyKind.TDF),
    "tftmf-random": StrategyRanges(kind=StrategyKind.TFTMF),
    "tftmf-1": StrategyRanges(kind=StrategyKind.TFTMF, delta_fixed=1.0),
}


def preset(name: str) -> StrategyRanges:
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise ValueError(
            f"Unknown preset '{name}'. Choose one of: {', '.join(PRESETS)}."
        ) from None


def draw_params(ranges: StrategyRanges, role: Originator, rng: np.random.Generator) -> StrategyParams:
    """gap_init and delta drawn uniformly from the configured ranges."""
    gap_init = float(rng.uniform(*ranges.gap_init_range))
    if ranges.delta_fixed is not None:
        delta = float(ranges.delta_fixed)
    else:
        delta = float(rng.uniform(*ranges.delta_range))
    return StrategyParams(kind=ranges.kind, role=role, gap_init=gap_init, delta=delta)


_STRATEGIES: Dict[StrategyKind, Callable[[StrategyParams], BiddingStrategy]] = {
    StrategyKind.TDF: TimeDependentFraction,
    StrategyKind.TFTMF: TitForTatMonotoneFraction,
}


def make_strategy(params: StrategyParams) -> BiddingStrategy:
    """
    Strategy dispatcher: builds the bidding strategy named by params.kind.
    """
    return _STRATEGIES[params.kind](params)
