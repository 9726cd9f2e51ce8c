import math

import numpy as np
import pytest

from bundles.bundle import Bundle, Originator
from bundles.valuation import TabulatedValuation, ValuationTable
from data.moments import CustomerModel
from data.preferences import sample_customer
from experiments.pricing import ShopPricing
from experiments.validation import strategy_violations
from negotiation.offers import EndReason, EventKind, SessionConfig
from negotiation.session import SessionStreams, opening_bundle, run_session
from recommender.selection import BenchmarkRecommender, Recommender
from strategy.presets import PRESETS, SHOP_RANGES, draw_params
from tests.conftest import make_params

CUSTOMER = Originator.CUSTOMER
SHOP = Originator.SHOP


def per_size_shop(n, per_good):
    return TabulatedValuation.from_function(n, lambda b: per_good * b.size)


def plain_config(gap_c=0.5, gap_s=0.5, delta=0.1, **kwargs):
    kwargs.setdefault("breakdown_probability", 0.0)
    return SessionConfig(
        customer=make_params(CUSTOMER, gap_c, delta),
        shop=make_params(SHOP, gap_s, delta),
        recommend=False,
        **kwargs,
    )


@pytest.mark.parametrize("values, goods", [
    ((10.0, 20.0, 30.0), (0,)),
    ((7.0, 7.0, 7.0), (0,)),
    ((5.0, 6.0, 100.0, 101.0), (0, 1)),
])
def test_opening_bundle(values, goods):
    assert opening_bundle(ValuationTable.of(values)) == Bundle.from_goods(goods, n=len(values))


def test_immediate_cross_closes_in_first_round():
    customer = ValuationTable.of([10.0, 20.0, 30.0])
    outcome = run_session(plain_config(gap_c=0.0, gap_s=0.0), customer, per_size_shop(3, 6.0))
    assert outcome.deal_reached and outcome.end_reason == EndReason.DEAL
    assert outcome.rounds == 1
    assert outcome.final_bundle == Bundle.from_goods([0], n=3)
    assert outcome.final_price == pytest.approx(10.0)


def test_certain_breakdown_ends_after_one_round():
    customer = ValuationTable.of([10.0, 20.0, 30.0])
    cfg = plain_config(breakdown_probability=1.0)
    outcome = run_session(cfg, customer, per_size_shop(3, 6.0))
    assert not outcome.deal_reached
    assert outcome.end_reason == EndReason.BREAKDOWN
    assert outcome.rounds == 1
    assert outcome.final_bundle is None


def test_tdf_pair_matches_hand_trace():
    v_c, v_s = 10.0, 6.0
    expected_rounds = expected_price = None
    for t in range(100):
        bid = v_c * (1 - 0.5 * math.exp(-0.1 * t))
        if t > 0 and v_s * (1 + 0.5 * math.exp(-0.1 * (t - 1))) <= bid:
            expected_rounds, expected_price = t + 1, v_s * (1 + 0.5 * math.exp(-0.1 * (t - 1)))
            break
        ask = v_s * (1 + 0.5 * math.exp(-0.1 * t))
        if bid >= ask:
            expected_rounds, expected_price = t + 1, bid
            break
    assert expected_rounds == 8

    customer = ValuationTable.of([v_c, 20.0, 30.0])
    outcome = run_session(plain_config(), customer, per_size_shop(3, v_s))
    assert outcome.deal_reached
    assert outcome.rounds == expected_rounds
    assert outcome.final_price == pytest.approx(expected_price)
    assert len(outcome.offers) == 2 * expected_rounds - 1


def test_round_cap_is_its_own_end_reason():
    customer = ValuationTable.of([10.0, 20.0, 30.0])
    outcome = run_session(plain_config(max_rounds=3), customer, per_size_shop(3, 20.0))
    assert outcome.end_reason == EndReason.ROUND_CAP
    assert outcome.rounds == 3 and not outcome.deal_reached
    assert outcome.transcript[-1].kind == EventKind.ROUND_CAP


def test_offer_rounds_count_plies():
    customer = ValuationTable.of([10.0, 20.0, 30.0])
    outcome = run_session(plain_config(max_rounds=4), customer, per_size_shop(3, 20.0))
    assert [o.round for o in outcome.offers] == list(range(8))
    assert [o.originator for o in outcome.offers[:2]] == [CUSTOMER, SHOP]


def test_session_config_validation():
    params = make_params(CUSTOMER)
    with pytest.raises(ValueError):
        SessionConfig(params, make_params(SHOP), breakdown_probability=1.5)
    with pytest.raises(ValueError):
        SessionConfig(params, make_params(SHOP), max_rounds=0)


def test_mismatched_goods_are_rejected():
    with pytest.raises(ValueError):
        run_session(plain_config(), ValuationTable.of([1.0, 2.0]), per_size_shop(3, 1.0))


# ---- sessions with recommendations ----

def _draw_session(dist, i, ranges=PRESETS["tdf"], threshold=0.0):
    rng = np.random.default_rng([99, i])
    customer = sample_customer(dist, rng)
    cfg = SessionConfig(
        customer=draw_params(ranges, CUSTOMER, rng),
        shop=draw_params(SHOP_RANGES, SHOP, rng),
        threshold=threshold,
        breakdown_probability=0.01,
    )
    return customer, cfg


def _streams(i):
    return SessionStreams(np.random.default_rng([7, i]), np.random.default_rng([8, i]))


def test_recommendations_never_repeat_a_bundle(dist10):
    shop = ShopPricing.for_distribution(dist10)
    model = CustomerModel(dist10)
    for i in range(15):
        customer, cfg = _draw_session(dist10, i)
        outcome = run_session(cfg, customer, shop, Recommender(model, shop, cfg.threshold), _streams(i))
        recommended = [e.bundle for e in outcome.transcript if e.kind == EventKind.RECOMMENDATION]
        assert len(recommended) == len(set(recommended)) == outcome.recommendations
        assert outcome.initial_bundle not in recommended


def test_progress_triggers_follow_two_bids_on_the_bundle(dist10):
    shop = ShopPricing.for_distribution(dist10)
    model = CustomerModel(dist10)
    for i in range(15):
        customer, cfg = _draw_session(dist10, i)
        outcome = run_session(cfg, customer, shop, Recommender(model, shop, cfg.threshold), _streams(i))
        bids = {}
        offers = iter(outcome.offers)
        for event in outcome.transcript:
            if event.kind == EventKind.OFFER:
                offer = next(offers)
                if offer.originator == CUSTOMER:
                    bids[offer.bundle] = bids.get(offer.bundle, 0) + 1
                    current = offer.bundle
            elif event.kind == EventKind.RECOMMENDATION and event.extra["trigger"] == "progress":
                assert bids[current] >= 2


def test_system_and_benchmark_share_the_first_trigger(dist10):
    shop = ShopPricing.for_distribution(dist10)
    model = CustomerModel(dist10)
    compared = 0
    for i in range(20):
        customer, cfg = _draw_session(dist10, i)
        system = run_session(cfg, customer, shop, Recommender(model, shop, 0.0), _streams(i))
        bench = run_session(cfg, customer, shop,
                            BenchmarkRecommender(model, shop, 0.0, np.random.default_rng(i)), _streams(i))
        first = [next((e.round for e in o.transcript if e.kind == EventKind.RECOMMENDATION), None)
                 for o in (system, bench)]
        assert first[0] == first[1]
        if first[0] is not None:
            compared += 1
            k = next(j for j, e in enumerate(system.transcript) if e.kind == EventKind.RECOMMENDATION)
            assert [(e.kind, e.price) for e in system.transcript[:k]] == \
                   [(e.kind, e.price) for e in bench.transcript[:k]]
    assert compared > 0


def test_sessions_are_reproducible(dist10):
    shop = ShopPricing.for_distribution(dist10)
    customer, cfg = _draw_session(dist10, 3)
    runs = [run_session(cfg, customer, shop, Recommender(CustomerModel(dist10), shop, 0.0), _streams(3))
            for _ in range(2)]
    assert runs[0].offers == runs[1].offers
    assert runs[0].end_reason == runs[1].end_reason


@pytest.mark.parametrize("preset_name", ["tdf", "tftmf-random", "tftmf-1"])
def test_strategy_invariants_hold_in_sessions(dist10, preset_name):
    shop = ShopPricing.for_distribution(dist10)
    model = CustomerModel(dist10)
    ranges = PRESETS[preset_name]
    for i in range(25):
        customer, cfg = _draw_session(dist10, i, ranges, threshold=0.1)
        outcome = run_session(cfg, customer, shop, Recommender(model, shop, 0.1), _streams(i))
        assert strategy_violations(outcome, customer, shop, ranges.kind) == []
        if outcome.deal_reached:
            assert customer.value(outcome.final_bundle) >= outcome.final_price - 1e-9
            assert outcome.final_price >= shop.value(outcome.final_bundle) - 1e-9


def test_infinite_threshold_never_updates_interest(dist10):
    shop = ShopPricing.for_distribution(dist10)
    model = CustomerModel(dist10)
    for i in range(15):
        customer, cfg = _draw_session(dist10, i, threshold=math.inf)
        outcome = run_session(cfg, customer, shop, Recommender(model, shop, math.inf), _streams(i))
        assert outcome.interest_updates == 0
        responses = [e.extra["classification"] for e in outcome.transcript if e.kind == EventKind.RESPONSE]
        assert 2 not in responses
