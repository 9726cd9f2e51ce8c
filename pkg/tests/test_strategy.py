import math

import numpy as np
import pytest

from bundles.bundle import Originator
from strategy.bidding import (
    StrategyKind,
    StrategyParams,
    TimeDependentFraction,
    TitForTatMonotoneFraction,
    gap,
    own_net_value,
    tdf_bid,
    tftmf_bid,
)
from strategy.presets import PRESETS, SHOP_RANGES, StrategyRanges, draw_params, make_strategy, preset
from tests.conftest import make_params

CUSTOMER = Originator.CUSTOMER
SHOP = Originator.SHOP


def test_tdf_opening_offers():
    assert tdf_bid(make_params(CUSTOMER, 0.5), 100.0, 0) == pytest.approx(50.0)
    assert tdf_bid(make_params(SHOP, 0.5), 100.0, 0) == pytest.approx(150.0)


def test_tdf_converges_to_valuation():
    assert tdf_bid(make_params(CUSTOMER, 0.5, 0.1), 100.0, 400) == pytest.approx(100.0, abs=1e-9)
    assert tdf_bid(make_params(SHOP, 0.5, 0.1), 80.0, 400) == pytest.approx(80.0, abs=1e-9)


def test_tdf_bids_rise_and_asks_fall_within_bounds():
    buyer = make_params(CUSTOMER, 0.4, 0.25)
    seller = make_params(SHOP, 0.4, 0.25)
    bids = [tdf_bid(buyer, 70.0, t) for t in range(30)]
    asks = [tdf_bid(seller, 50.0, t) for t in range(30)]
    assert all(b2 >= b1 for b1, b2 in zip(bids, bids[1:]))
    assert all(a2 <= a1 for a1, a2 in zip(asks, asks[1:]))
    assert max(bids) <= 70.0 and min(asks) >= 50.0


def test_gap_decays_exponentially():
    params = make_params(CUSTOMER, 0.3, 0.2)
    assert gap(params, 0) == pytest.approx(0.3)
    assert gap(params, 5) == pytest.approx(0.3 * math.exp(-1.0))
    with pytest.raises(ValueError):
        gap(params, -1)


@pytest.mark.parametrize("gap_init, delta", [(0.6, 0.1), (-0.1, 0.1), (0.2, 0.0)])
def test_invalid_params(gap_init, delta):
    with pytest.raises(ValueError):
        StrategyParams(StrategyKind.TDF, CUSTOMER, gap_init, delta)


def test_tftmf_scripted_concessions():
    strategy = TitForTatMonotoneFraction(make_params(CUSTOMER, 0.5, 0.5, StrategyKind.TFTMF))
    opening = strategy.plan(100.0, 0)
    strategy.commit(100.0, opening)
    assert opening == pytest.approx(50.0)

    # first opponent offer only sets the reference point
    assert tftmf_bid(strategy, 100.0, 10.0) == pytest.approx(50.0)
    # opponent improves from 10 to 20: concede 0.5 * 10
    assert tftmf_bid(strategy, 100.0, 20.0) == pytest.approx(55.0)
    # repeated offer: no concession
    assert tftmf_bid(strategy, 100.0, 20.0) == pytest.approx(55.0)
    # worse offer: no negative concession
    assert tftmf_bid(strategy, 100.0, 15.0) == pytest.approx(55.0)
    assert strategy.bids_made == 5


def test_tftmf_measures_improvement_against_best_seen():
    strategy = TitForTatMonotoneFraction(make_params(CUSTOMER, 0.5, 1.0, StrategyKind.TFTMF))
    strategy.commit(100.0, strategy.plan(100.0, 0))
    tftmf_bid(strategy, 100.0, 10.0)
    tftmf_bid(strategy, 100.0, 5.0)
    assert tftmf_bid(strategy, 100.0, 12.0) == pytest.approx(52.0)


def test_tftmf_shop_concedes_in_its_own_terms():
    strategy = TitForTatMonotoneFraction(make_params(SHOP, 0.5, 1.0, StrategyKind.TFTMF))
    ask = strategy.plan(100.0, 0)
    strategy.commit(100.0, ask)
    assert ask == pytest.approx(150.0)
    tftmf_bid(strategy, 100.0, -30.0)
    assert tftmf_bid(strategy, 100.0, -20.0) == pytest.approx(140.0)


def test_tftmf_level_never_goes_below_zero():
    strategy = TitForTatMonotoneFraction(make_params(CUSTOMER, 0.1, 1.0, StrategyKind.TFTMF))
    strategy.commit(100.0, strategy.plan(100.0, 0))
    tftmf_bid(strategy, 100.0, -50.0)
    assert tftmf_bid(strategy, 100.0, 50.0) == pytest.approx(100.0)
    assert strategy.level == 0.0


def test_tftmf_bid_stays_non_negative_after_bundle_switch():
    strategy = TitForTatMonotoneFraction(make_params(CUSTOMER, 0.5, 0.5, StrategyKind.TFTMF))
    strategy.commit(100.0, strategy.plan(100.0, 0))
    assert strategy.plan(30.0, 1) == pytest.approx(0.0)


def test_acceptance_compares_with_own_next_bid():
    buyer = TimeDependentFraction(make_params(CUSTOMER, 0.5, 0.1))
    # next bid at t=0 is 50, worth 50 to the customer
    assert buyer.would_accept(own_net_value(CUSTOMER, 100.0, 50.0), 100.0, 0)
    assert not buyer.would_accept(own_net_value(CUSTOMER, 100.0, 50.5), 100.0, 0)


def test_presets():
    assert preset("tdf").kind == StrategyKind.TDF
    assert preset("tftmf-random").kind == StrategyKind.TFTMF
    assert preset("TFTMF-1").delta_fixed == 1.0
    assert set(PRESETS) == {"tdf", "tftmf-random", "tftmf-1"}
    with pytest.raises(ValueError):
        preset("greedy")


def test_draw_params_respects_ranges():
    rng = np.random.default_rng(3)
    for _ in range(200):
        params = draw_params(PRESETS["tftmf-random"], CUSTOMER, rng)
        assert 0.0 <= params.gap_init <= 0.5
        assert 0.1 <= params.delta <= 0.4
    shop = draw_params(SHOP_RANGES, SHOP, rng)
    assert shop.kind == StrategyKind.TDF and shop.delta == 0.1 and shop.role == SHOP


def test_strategy_ranges_validation():
    with pytest.raises(ValueError):
        StrategyRanges(gap_init_range=(0.0, 0.7))
    with pytest.raises(ValueError):
        StrategyRanges(delta_range=(0.4, 0.1))
    assert StrategyRanges(kind="tftmf").kind == StrategyKind.TFTMF


def test_make_strategy_dispatches_on_kind():
    assert isinstance(make_strategy(make_params(CUSTOMER)), TimeDependentFraction)
    tft = make_strategy(make_params(CUSTOMER, kind=StrategyKind.TFTMF))
    assert isinstance(tft, TitForTatMonotoneFraction)
