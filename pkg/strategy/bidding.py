import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from bundles.bundle import Originator

SHOP_DELTA = 0.1


class StrategyKind(str, Enum):
    TDF = "tdf"        # time-dependent fraction
    TFTMF = "tftmf"    # tit-for-tat, monotone, fraction


@dataclass(frozen=True)
class StrategyParams:
    kind: StrategyKind
    role: Originator
    gap_init: float
    delta: float

    def __post_init__(self):
        if not 0.0 <= self.gap_init <= 0.5:
            raise ValueError(f"gap_init must lie in [0, 0.5], got {self.gap_init}.")
        if not self.delta > 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}.")


def own_net_value(role: Originator, valuation: float, price: float) -> float:
    """Customer: valuation - price. Shop: price - valuation."""
    if role == Originator.CUSTOMER:
        return valuation - price
    return price - valuation


def price_for_net_value(role: Originator, valuation: float, net_value: float) -> float:
    if role == Originator.CUSTOMER:
        return valuation - net_value
    return valuation + net_value


def gap(params: StrategyParams, t: int) -> float:
    """gap(t) = gap_init * exp(-delta * t), the same for every bundle."""
    if t < 0:
        raise ValueError(f"Round index must be non-negative, got {t}.")
    return params.gap_init * math.exp(-params.delta * t)


def tdf_bid(params: StrategyParams, valuation: float, t: int) -> float:
    """
    Customer bids valuation * (1 - gap(t)); the shop asks valuation * (1 + gap(t)).
    """
    g = gap(params, t)
    if params.role == Originator.CUSTOMER:
        return valuation * (1.0 - g)
    return valuation * (1.0 + g)


class BiddingStrategy(ABC):
    """
    One side's bidding behaviour within a session.

    The engine calls observe() for each opponent offer (as the offer's own net
    monetary value), plan() to see the next bid without committing, and
    commit() once the bid is actually made.
    """

    def __init__(self, params: StrategyParams):
        self.params = params
        self.bids_made = 0

    @property
    def role(self) -> Originator:
        return self.params.role

    def observe(self, opponent_net_value: float) -> None:
        """Default: ignore the opponent."""

    @abstractmethod
    def plan(self, valuation: float, t: int) -> float:
        ...

    def commit(self, valuation: float, price: float) -> None:
        self.bids_made += 1

    def would_accept(self, opponent_net_value: float, valuation: float, t: int) -> bool:
        """Accept when the standing offer is worth at least our own next bid."""
        planned = own_net_value(self.role, valuation, self.plan(valuation, t))
        return opponent_net_value >= planned


class TimeDependentFraction(BiddingStrategy):
    def plan(self, valuation: float, t: int) -> float:
        return tdf_bid(self.params, valuation, t)


class TitForTatMonotoneFraction(BiddingStrategy):
    """
    Opens like TDF, then concedes delta times the improvement in the
    opponent's offers (as perceived in own net monetary value). Improvements
    are measured against the best opponent offer seen before; no negative
    concessions. The concession level is tracked in own net monetary value,
    so it carries over unchanged when the bundle switches.
    """

    def __init__(self, params: StrategyParams):
        super().__init__(params)
        self.level: Optional[float] = None      # own net value of own last bid
        self.best_seen: Optional[float] = None  # best opponent offer so far, own net value
        self.pending = 0.0

    def observe(self, opponent_net_value: float) -> None:
        if self.best_seen is not None:
            improvement = opponent_net_value - self.best_seen
            self.pending += self.params.delta * max(0.0, improvement)
            self.best_seen = max(self.best_seen, opponent_net_value)
        else:
            self.best_seen = opponent_net_value

    def planned_level(self, valuation: float, t: int) -> float:
        if self.level is None:
            return own_net_value(self.role, valuation, tdf_bid(self.params, valuation, t))
        level = max(0.0, self.level - self.pending)
        if self.role == Originator.CUSTOMER:
            # a bid never goes below zero, even after switching to a cheaper bundle
            level = min(level, valuation)
        return level

    def plan(self, valuation: float, t: int) -> float:
        return price_for_net_value(self.role, valuation, self.planned_level(valuation, t))

    def commit(self, valuation: float, price: float) -> None:
        super().commit(valuation, price)
        self.level = own_net_value(self.role, valuation, price)
        self.pending = 0.0


def tftmf_bid(
    strategy: TitForTatMonotoneFraction,
    own_valuation: float,
    opponent_net_value: float,
    t: int = 0,
) -> float:
    """Feed one opponent offer to `strategy` and make its next bid."""
    strategy.observe(opponent_net_value)
    price = strategy.plan(own_valuation, t)
    strategy.commit(own_valuation, price)
    return price
