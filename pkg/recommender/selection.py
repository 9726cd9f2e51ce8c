"""
What to recommend.

The shop keeps an interest bundle (its guess of what the customer is after),
a queue A of candidate bundles from the interest bundle's neighbourhood, and
the set of bundles it has already proposed. Candidates are ranked by
expected gains from trade given that the customer is willing to pay her
current bid for the interest bundle.
"""
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from app_logging.event_logger import get_logger
from bundles.bundle import Bundle, neighborhood
from bundles.valuation import BundleValuation
from data.moments import CustomerModel
from recommender.timing import DEFAULT_RECOMMENDATION_RATE

logger = get_logger(__name__)

BidAsk = Tuple[float, float]


class ResponseClass(IntEnum):
    NOT_PROMISING = 0
    CONTINUE = 1
    PROMISING = 2


class Action(str, Enum):
    CONTINUE_CURRENT = "continue-current"
    UPDATE_INTEREST = "update-interest"
    NEXT_RECOMMENDATION = "next-recommendation"
    FALLBACK_BEST = "fallback-best"


class Trigger(str, Enum):
    PROGRESS = "progress"    # slow progress on the current bundle
    REJECTION = "rejection"  # follow-up after a not-promising response


@dataclass(frozen=True)
class BidAskRecord:
    """Customer's highest bid on a bundle and the shop's ask standing at that bid."""
    bundle: Bundle
    bid: float
    ask: float

    @property
    def gap(self) -> float:
        return self.ask - self.bid

    @property
    def pair(self) -> BidAsk:
        return self.bid, self.ask


@dataclass
class RecommendationEvent:
    round: int
    bundle: Bundle
    score: Optional[float]
    trigger: Trigger
    classification: Optional[ResponseClass] = None


@dataclass
class RecommenderState:
    """
    Session-local recommendation bookkeeping.

    queue is the ordered recommendation set A; proposed is the set of
    bundles already put to the customer (the opening bundle included).
    """
    interest: Bundle
    initial: Bundle
    threshold: float
    rate: float = DEFAULT_RECOMMENDATION_RATE
    queue: List[Bundle] = field(default_factory=list)
    proposed: Set[Bundle] = field(default_factory=set)
    records: Dict[Bundle, BidAskRecord] = field(default_factory=dict)
    outstanding: Optional[Bundle] = None
    seeded: bool = False
    exhausted: bool = False
    interest_updates: int = 0
    log: List[RecommendationEvent] = field(default_factory=list)

    @classmethod
    def start(cls, initial: Bundle, threshold: float, rate: float = DEFAULT_RECOMMENDATION_RATE) -> "RecommenderState":
        if threshold < 0:
            raise ValueError(f"threshold must be non-negative, got {threshold}.")
        return cls(interest=initial, initial=initial, threshold=threshold, rate=rate, proposed={initial})

    def record(self, bundle: Bundle, bid: float, ask: float) -> None:
        """Keep, per bundle, the pair with the customer's highest bid."""
        current = self.records.get(bundle)
        if current is None or bid > current.bid:
            self.records[bundle] = BidAskRecord(bundle, bid, ask)

    def best_record(self, exclude: Optional[Bundle] = None) -> Optional[BidAskRecord]:
        """Record with the smallest bid-ask gap; canonical order breaks ties."""
        candidates = [r for b, r in self.records.items() if b != exclude]
        if not candidates:
            return None
        return min(candidates, key=lambda r: (r.gap, r.bundle))

    def merge_front(self, bundles: List[Bundle]) -> None:
        """Put `bundles` at the head of A, dropping duplicates and proposed ones."""
        merged: List[Bundle] = []
        seen: Set[Bundle] = set()
        for b in list(bundles) + self.queue:
            if b in seen or b in self.proposed:
                continue
            seen.add(b)
            merged.append(b)
        self.queue = merged


def score_bundle(
    candidate: Bundle,
    interest: Bundle,
    price: float,
    model: CustomerModel,
    shop: BundleValuation,
) -> float:
    """E[v_c(candidate) | v_c(interest) >= price] - v_s(candidate)."""
    return model.expected_valuation(candidate, interest, price) - shop.value(candidate)


def score_neighbors(
    interest: Bundle,
    price: float,
    model: CustomerModel,
    shop: BundleValuation,
    exclude: Set[Bundle],
) -> List[Tuple[Bundle, float]]:
    means = model.good_means(interest, price)
    scored = []
    for b in neighborhood(interest):
        if b in exclude:
            continue
        scored.append((b, float(means[list(b.goods)].sum()) - shop.value(b)))
    return scored


def build_recommendation_set(
    interest: Bundle,
    price: float,
    state: RecommenderState,
    model: CustomerModel,
    shop: BundleValuation,
) -> List[Bundle]:
    """
    Ng(interest) without already proposed bundles, best expected gains first;
    equal scores fall back to canonical order.
    """
    scored = score_neighbors(interest, price, model, shop, state.proposed)
    scored.sort(key=lambda item: (-item[1], item[0]))
    return [b for b, _ in scored]


def classify_response(current: BidAsk, best: BidAsk, threshold: float) -> ResponseClass:
    """
    Compare the bid-ask gap on the recommended bundle with the smallest gap
    seen on earlier bundles: r = best_gap / current_gap.

    r > 1 + threshold -> PROMISING, 1 <= r <= 1 + threshold -> CONTINUE,
    otherwise NOT_PROMISING. A current gap <= 0 (bid at or over the ask)
    is PROMISING outright.
    """
    bid, ask = current
    best_bid, best_ask = best
    current_gap = ask - bid
    if current_gap <= 0.0:
        return ResponseClass.PROMISING
    ratio = (best_ask - best_bid) / current_gap
    if ratio > 1.0 + threshold:
        return ResponseClass.PROMISING
    if ratio >= 1.0:
        return ResponseClass.CONTINUE
    return ResponseClass.NOT_PROMISING


def benchmark_recommend(state: RecommenderState, rng: np.random.Generator) -> Optional[Bundle]:
    """Uniform pick from Ng(interest) minus already proposed bundles."""
    candidates = sorted(b for b in neighborhood(state.interest) if b not in state.proposed)
    if not candidates:
        return None
    return candidates[int(rng.integers(len(candidates)))]


class Recommender:
    """
    Expected-gains recommender. Holds the shop's aggregate knowledge; all
    per-session state lives in RecommenderState.
    """

    name = "system"

    def __init__(self, model: CustomerModel, shop: BundleValuation, threshold: float,
                 rate: float = DEFAULT_RECOMMENDATION_RATE):
        if model.n != shop.n:
            raise ValueError(f"Model has n={model.n}, shop valuation n={shop.n}.")
        self.model = model
        self.shop = shop
        self.threshold = threshold
        self.rate = rate

    def start(self, initial: Bundle) -> RecommenderState:
        return RecommenderState.start(initial, self.threshold, self.rate)

    # ---- what to put into A ----

    def refill(self, state: RecommenderState, interest: Bundle, price: float) -> None:
        state.merge_front(build_recommendation_set(interest, price, state, self.model, self.shop))

    def pick(self, state: RecommenderState) -> Optional[Bundle]:
        return state.queue[0] if state.queue else None

    def score(self, state: RecommenderState, bundle: Bundle, price: float) -> Optional[float]:
        return score_bundle(bundle, state.interest, price, self.model, self.shop)

    # ---- protocol hooks used by the session ----

    def recommend(self, state: RecommenderState, interest_bid: float, t: int, trigger: Trigger) -> Optional[Bundle]:
        """
        Take the next bundle from A and mark it proposed and outstanding.
        `interest_bid` is the customer's latest bid on the interest bundle,
        used to seed A on the first call. Returns None once A is exhausted.
        """
        if state.exhausted:
            return None
        if not state.seeded:
            self.refill(state, state.interest, interest_bid)
            state.seeded = True
        bundle = self.pick(state)
        if bundle is None:
            state.exhausted = True
            logger.debug(f"Recommendation set exhausted at round {t}.")
            return None
        state.queue.remove(bundle)
        state.proposed.add(bundle)
        state.outstanding = bundle
        state.log.append(RecommendationEvent(t, bundle, self.score(state, bundle, interest_bid), trigger))
        return bundle

    def on_customer_counter(self, state: RecommenderState, bid: float, ask: float) -> Action:
        """
        Classify the customer's first bid on the outstanding recommendation
        and update A and the interest bundle accordingly.
        """
        bundle = state.outstanding
        if bundle is None:
            raise RuntimeError("No recommendation is outstanding.")
        best = state.best_record(exclude=bundle)
        if best is None:
            klass = ResponseClass.CONTINUE
        else:
            klass = classify_response((bid, ask), best.pair, state.threshold)
        state.record(bundle, bid, ask)
        state.outstanding = None
        if state.log and state.log[-1].bundle == bundle:
            state.log[-1].classification = klass

        if klass == ResponseClass.PROMISING:
            state.interest = bundle
            state.interest_updates += 1
            self.refill(state, bundle, bid)
            return Action.UPDATE_INTEREST
        if klass == ResponseClass.CONTINUE:
            return Action.CONTINUE_CURRENT
        if state.exhausted or not state.queue:
            state.exhausted = True
            return Action.FALLBACK_BEST
        return Action.NEXT_RECOMMENDATION


class BenchmarkRecommender(Recommender):
    """
    Same machinery as Recommender, but the next bundle is drawn uniformly
    from the interest bundle's unproposed neighbours instead of by score.
    Once those run out A counts as exhausted, even if it still holds bundles.
    """

    name = "benchmark"

    def __init__(self, model: CustomerModel, shop: BundleValuation, threshold: float,
                 rng: np.random.Generator, rate: float = DEFAULT_RECOMMENDATION_RATE):
        super().__init__(model, shop, threshold, rate)
        self.rng = rng

    def refill(self, state: RecommenderState, interest: Bundle, price: float) -> None:
        state.merge_front(sorted(b for b in neighborhood(interest) if b not in state.proposed))

    def pick(self, state: RecommenderState) -> Optional[Bundle]:
        return benchmark_recommend(state, self.rng)

    def score(self, state: RecommenderState, bundle: Bundle, price: float) -> Optional[float]:
        return None
