from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from app_logging.event_logger import get_logger
from bundles.bundle import Bundle, Offer, Originator
from bundles.valuation import BundleValuation, ValuationTable
from negotiation.offers import (
    Actor,
    EndReason,
    EventKind,
    NegotiationOutcome,
    SessionConfig,
    TranscriptEvent,
)
from recommender.selection import Action, Recommender, RecommenderState, Trigger
from recommender.timing import ProgressSnapshot, predict_remaining_rounds, should_recommend
from strategy.bidding import own_net_value
from strategy.presets import make_strategy
from utils.seeding import Stream, derive_rng

logger = get_logger(__name__)
session_log = get_logger("sessions", filename="sessions.log", console=False)


def opening_bundle(customer: ValuationTable) -> Bundle:
    """
    Goods the customer values strictly below her average valuation. When all
    values are equal that set is empty and the lowest-valued good (first
    index on ties) is used instead.
    """
    values = customer.per_good
    below = np.flatnonzero(values < values.mean())
    if below.size == 0:
        return Bundle.from_goods([int(np.argmin(values))], n=customer.n)
    return Bundle.from_goods((int(i) for i in below), n=customer.n)


@dataclass
class SessionStreams:
    """Random streams one session consumes: breakdown draws and recommendation triggers."""
    breakdown: np.random.Generator
    trigger: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "SessionStreams":
        return cls(
            breakdown=derive_rng(seed, Stream.BREAKDOWN),
            trigger=derive_rng(seed, Stream.TRIGGER),
        )


class _Session:
    """Mutable state of one running negotiation."""

    def __init__(self, cfg: SessionConfig, customer: ValuationTable, shop: BundleValuation,
                 recommender: Optional[Recommender], streams: SessionStreams):
        if customer.n != shop.n:
            raise ValueError(f"Customer has n={customer.n}, shop valuation n={shop.n}.")
        self.cfg = cfg
        self.customer = customer
        self.shop = shop
        self.recommender = recommender if cfg.recommend else None
        self.streams = streams

        self.initial = opening_bundle(customer)
        self.current = self.initial
        self.buyer = make_strategy(cfg.customer)
        self.seller = make_strategy(cfg.shop)
        self.state: Optional[RecommenderState] = (
            self.recommender.start(self.initial) if self.recommender is not None else None
        )

        self.shop_offer: Optional[Offer] = None
        self.bids: Dict[Bundle, List[float]] = defaultdict(list)
        self.offers: List[Offer] = []
        self.events: List[TranscriptEvent] = []

    # ---- helpers ----

    def _offer(self, originator: Originator, bundle: Bundle, price: float, t: int) -> Offer:
        offer = Offer(bundle, price, originator, round=len(self.offers))
        self.offers.append(offer)
        actor = Actor.CUSTOMER if originator == Originator.CUSTOMER else Actor.SHOP
        self.events.append(TranscriptEvent(t, actor, EventKind.OFFER, bundle, price))
        return offer

    def _finish(self, reason: EndReason, rounds: int, bundle: Optional[Bundle] = None,
                price: Optional[float] = None) -> NegotiationOutcome:
        state = self.state
        return NegotiationOutcome(
            deal_reached=reason == EndReason.DEAL,
            end_reason=reason,
            rounds=rounds,
            initial_bundle=self.initial,
            final_bundle=bundle,
            final_price=price,
            offers=self.offers,
            transcript=self.events,
            recommendations=len(state.log) if state is not None else 0,
            interest_updates=state.interest_updates if state is not None else 0,
        )

    def _log_recommendation(self, t: int, bundle: Bundle) -> None:
        event = self.state.log[-1]
        extra = {"trigger": event.trigger.value}
        if event.score is not None:
            extra["score"] = event.score
        self.events.append(TranscriptEvent(t, Actor.SHOP, EventKind.RECOMMENDATION, bundle, None, extra))

    def _fallback(self, t: int) -> Bundle:
        best = self.state.best_record()
        bundle = best.bundle if best is not None else self.current
        self.events.append(TranscriptEvent(t, Actor.SHOP, EventKind.FALLBACK, bundle))
        return bundle

    # ---- the shop's choice of bundle for its next offer ----

    def _next_bundle(self, bid: float, t: int) -> Bundle:
        state = self.state
        rec = self.recommender
        interest_bid = self.bids[state.interest][-1]

        if state.outstanding is not None and state.outstanding == self.current:
            action = rec.on_customer_counter(state, bid, self.shop_offer.price)
            self.events.append(TranscriptEvent(
                t, Actor.SHOP, EventKind.RESPONSE, self.current, None,
                {"classification": int(state.log[-1].classification), "action": action.value},
            ))
            if action == Action.NEXT_RECOMMENDATION:
                bundle = rec.recommend(state, interest_bid, t, Trigger.REJECTION)
                if bundle is not None:
                    self._log_recommendation(t, bundle)
                    return bundle
                return self._fallback(t)
            if action == Action.FALLBACK_BEST:
                return self._fallback(t)
            return self.current

        if self.shop_offer is not None and self.shop_offer.bundle == self.current:
            state.record(self.current, bid, self.shop_offer.price)

        history = self.bids[self.current]
        if state.exhausted or len(history) < 2:
            return self.current
        snap = ProgressSnapshot(history[-1], history[-2], self.shop.value(self.current))
        delta_t = predict_remaining_rounds(snap)
        if not should_recommend(delta_t, self.streams.trigger, state.rate):
            return self.current
        bundle = rec.recommend(state, interest_bid, t, Trigger.PROGRESS)
        if bundle is None:
            return self._fallback(t)
        self._log_recommendation(t, bundle)
        return bundle

    # ---- the loop ----

    def run(self) -> NegotiationOutcome:
        cfg = self.cfg
        for t in range(cfg.max_rounds):
            v_c = self.customer.value(self.current)

            # customer: accept the standing ask or bid
            if self.shop_offer is not None:
                standing = own_net_value(Originator.CUSTOMER, v_c, self.shop_offer.price)
                self.buyer.observe(standing)
                if self.buyer.would_accept(standing, v_c, t):
                    self.events.append(TranscriptEvent(
                        t, Actor.CUSTOMER, EventKind.ACCEPT, self.current, self.shop_offer.price))
                    return self._finish(EndReason.DEAL, t + 1, self.current, self.shop_offer.price)
            bid = self.buyer.plan(v_c, t)
            self.buyer.commit(v_c, bid)
            self._offer(Originator.CUSTOMER, self.current, bid, t)
            self.bids[self.current].append(bid)

            # shop: accept the bid
            v_s = self.shop.value(self.current)
            offered = own_net_value(Originator.SHOP, v_s, bid)
            self.seller.observe(offered)
            if self.seller.would_accept(offered, v_s, t):
                self.events.append(TranscriptEvent(t, Actor.SHOP, EventKind.ACCEPT, self.current, bid))
                return self._finish(EndReason.DEAL, t + 1, self.current, bid)

            # exogenous breakdown
            if self.streams.breakdown.random() < cfg.breakdown_probability:
                self.events.append(TranscriptEvent(t, Actor.NATURE, EventKind.BREAKDOWN, self.current))
                return self._finish(EndReason.BREAKDOWN, t + 1)

            # shop: maybe switch bundle, then ask
            if self.state is not None:
                self.current = self._next_bundle(bid, t)
            v_s = self.shop.value(self.current)
            ask = self.seller.plan(v_s, t)
            self.seller.commit(v_s, ask)
            self.shop_offer = self._offer(Originator.SHOP, self.current, ask, t)

        self.events.append(TranscriptEvent(cfg.max_rounds - 1, Actor.NATURE, EventKind.ROUND_CAP, self.current))
        logger.info(f"Session hit the round cap of {cfg.max_rounds}.")
        return self._finish(EndReason.ROUND_CAP, cfg.max_rounds)


def run_session(
    cfg: SessionConfig,
    customer: ValuationTable,
    shop: BundleValuation,
    recommender: Optional[Recommender] = None,
    streams: Optional[SessionStreams] = None,
) -> NegotiationOutcome:
    """
    Run one negotiation: the customer opens on her opening bundle, then the
    two sides alternate until one accepts, the exogenous breakdown hits, or
    max_rounds is reached. When a recommender is given (and cfg.recommend is
    set) the shop may switch the bundle in its counter-offers.
    """
    if streams is None:
        streams = SessionStreams.from_seed(cfg.seed)
    outcome = _Session(cfg, customer, shop, recommender, streams).run()

    session_log.info(
        f"end={outcome.end_reason.value} rounds={outcome.rounds} "
        f"initial={outcome.initial_bundle} final={outcome.final_bundle} "
        f"price={outcome.final_price} recommendations={outcome.recommendations} "
        f"interest_updates={outcome.interest_updates}"
    )
    return outcome
