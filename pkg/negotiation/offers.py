from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from bundles.bundle import Bundle, Offer
from strategy.bidding import StrategyParams

DEFAULT_BREAKDOWN_PROBABILITY = 0.01
DEFAULT_MAX_ROUNDS = 500


class EndReason(str, Enum):
    DEAL = "deal"
    BREAKDOWN = "breakdown"
    ROUND_CAP = "round-cap"


class EventKind(str, Enum):
    OFFER = "offer"
    ACCEPT = "accept"
    RECOMMENDATION = "recommendation"
    RESPONSE = "response"        # shop's classification of a counter to a recommendation
    FALLBACK = "fallback"        # recommendation set exhausted, back to best bundle
    BREAKDOWN = "breakdown"
    ROUND_CAP = "round-cap"


class Actor(str, Enum):
    CUSTOMER = "customer"
    SHOP = "shop"
    NATURE = "nature"


@dataclass(frozen=True)
class SessionConfig:
    customer: StrategyParams
    shop: StrategyParams
    breakdown_probability: float = DEFAULT_BREAKDOWN_PROBABILITY
    max_rounds: int = DEFAULT_MAX_ROUNDS
    recommend: bool = True
    threshold: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.breakdown_probability <= 1.0:
            raise ValueError(f"breakdown_probability must lie in [0, 1], got {self.breakdown_probability}.")
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be at least 1, got {self.max_rounds}.")
        if self.threshold < 0:
            raise ValueError(f"threshold must be non-negative, got {self.threshold}.")


@dataclass
class TranscriptEvent:
    round: int
    actor: Actor
    kind: EventKind
    bundle: Optional[Bundle] = None
    price: Optional[float] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_record(self) -> Dict[str, Any]:
        record: Dict[str, Any] = {
            "round": self.round,
            "actor": self.actor.value,
            "event": self.kind.value,
            "bundle": self.bundle.bitstring() if self.bundle is not None else None,
            "price": self.price,
        }
        record.update(self.extra)
        return record


@dataclass
class NegotiationOutcome:
    """
    Result of one session. A deal always carries its bundle and price;
    `rounds` counts loop iterations, including the one that ended the session.
    """
    deal_reached: bool
    end_reason: EndReason
    rounds: int
    initial_bundle: Bundle
    final_bundle: Optional[Bundle] = None
    final_price: Optional[float] = None
    offers: List[Offer] = field(default_factory=list)
    transcript: List[TranscriptEvent] = field(default_factory=list)
    recommendations: int = 0
    interest_updates: int = 0

    def __post_init__(self):
        if self.deal_reached and (self.final_bundle is None or self.final_price is None):
            raise ValueError("A deal needs a final bundle and price.")
