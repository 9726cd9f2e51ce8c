import itertools

import numpy as np
import pytest

from bundles.bundle import (
    Bundle,
    BundleTransform,
    EnumerationLimitError,
    all_bundles,
    bundle_sizes,
    bundle_transform,
    check_enumerable,
    neighborhood,
    row_index,
)
from bundles.gains import (
    gains_from_trade,
    gft_extrema,
    gft_table,
    pareto_certificate,
    pareto_dominates,
    price_grid,
)
from bundles.valuation import TabulatedValuation, ValuationTable
from data.preferences import generate_distribution, sample_customer
from experiments.pricing import ShopPricing


def b(*goods, n):
    return Bundle.from_goods(goods, n=n)


# ---- bundles ----

def test_bundle_rejects_empty_and_out_of_range_masks():
    with pytest.raises(ValueError):
        Bundle(0, 3)
    with pytest.raises(ValueError):
        Bundle(0b1000, 3)
    with pytest.raises(ValueError):
        Bundle.from_goods([3], n=3)


def test_bundle_goods_and_bitstring():
    bundle = b(0, 2, n=4)
    assert bundle.goods == (0, 2)
    assert bundle.size == 2
    assert bundle.bitstring() == "1010"
    assert 2 in bundle and 1 not in bundle
    assert Bundle.from_bits([1, 0, 1, 0]) == bundle
    assert str(bundle) == "{0,2}"


def test_neighborhood_adds_and_removes_one_good():
    assert neighborhood(b(0, 2, n=3)) == {b(0, n=3), b(2, n=3), b(0, 1, 2, n=3)}


def test_neighborhood_of_singleton_skips_empty_bundle():
    assert neighborhood(b(1, n=3)) == {b(0, 1, n=3), b(1, 2, n=3)}


def test_neighborhood_has_n_members_for_inner_sizes():
    for size in range(2, 10):
        assert len(neighborhood(b(*range(size), n=10))) == 10


def test_all_bundles_canonical_order():
    bundles = list(all_bundles(4))
    assert len(bundles) == 15
    assert [x.mask for x in bundles] == list(range(1, 16))
    assert bundles == sorted(bundles)


def test_enumeration_limit():
    check_enumerable(24)
    with pytest.raises(EnumerationLimitError):
        check_enumerable(25)
    with pytest.raises(EnumerationLimitError):
        list(all_bundles(0))


def test_transform_rows_match_bundles():
    t = bundle_transform(3)
    assert t.shape == (7, 3)
    for bundle in all_bundles(3):
        np.testing.assert_array_equal(t[row_index(bundle)], bundle.bits())
        np.testing.assert_array_equal(BundleTransform(3).row(bundle), bundle.bits())
    np.testing.assert_array_equal(bundle_sizes(3), [1, 1, 2, 1, 2, 2, 3])
    with pytest.raises(ValueError):
        t[0, 0] = 5.0


# ---- valuations ----

def test_additive_values_match_per_bundle_sums():
    table = ValuationTable.of([3.0, 5.0, 11.0, 17.0])
    expected = [sum(table.per_good[g] for g in x.goods) for x in all_bundles(4)]
    np.testing.assert_allclose(table.values(), expected)
    assert table.value(b(1, 3, n=4)) == pytest.approx(22.0)


def test_tabulated_valuation_checks_shape():
    with pytest.raises(ValueError):
        TabulatedValuation(3, np.zeros(6))


# ---- gains from trade ----

def test_gains_from_trade_is_difference():
    customer = TabulatedValuation.from_function(1, lambda _: 100.0)
    shop = TabulatedValuation.from_function(1, lambda _: 60.0)
    assert gains_from_trade(Bundle(1, 1), customer, shop) == pytest.approx(40.0)
    assert gains_from_trade(Bundle(1, 1), customer, customer) == 0.0


def test_gft_extrema_two_goods():
    customer = ValuationTable.of([10.0, 20.0])
    shop = TabulatedValuation.from_function(2, lambda x: 5.0 * x.size)
    extrema = gft_extrema(customer, shop)
    assert extrema.max_gft == pytest.approx(20.0)
    assert extrema.min_gft == pytest.approx(5.0)
    assert extrema.argmax == {b(0, 1, n=2)}
    np.testing.assert_allclose(gft_table(customer, shop), [5.0, 15.0, 20.0])


def test_gft_extrema_when_values_coincide():
    customer = ValuationTable.of([4.0, 7.0, 9.0])
    shop = TabulatedValuation(3, customer.values())
    extrema = gft_extrema(customer, shop)
    assert extrema.max_gft == extrema.min_gft == 0.0
    assert extrema.argmax == set(all_bundles(3))


def test_gft_argmax_matches_independent_enumeration():
    dist = generate_distribution(21, n=6)
    customer = sample_customer(dist, 22)
    shop = ShopPricing.for_distribution(dist)

    best, best_set = -np.inf, set()
    for size in range(1, 7):
        for goods in itertools.combinations(range(6), size):
            bundle = Bundle.from_goods(goods, n=6)
            gft = sum(customer.per_good[g] for g in goods) - shop.value(bundle)
            if gft > best + 1e-9:
                best, best_set = gft, {bundle}
            elif abs(gft - best) <= 1e-9:
                best_set.add(bundle)

    extrema = gft_extrema(customer, shop)
    assert extrema.max_gft == pytest.approx(best)
    assert extrema.argmax == best_set


# ---- Pareto dominance ----

@pytest.fixture
def two_goods():
    customer = ValuationTable.of([10.0, 20.0])
    shop = TabulatedValuation.from_function(2, lambda x: 5.0 * x.size)
    return customer, shop


def test_lower_price_on_same_bundle_is_not_dominance(two_goods):
    customer, shop = two_goods
    bundle = b(1, n=2)
    assert not pareto_dominates((bundle, 8.0), (bundle, 9.0), customer, shop)


def test_deal_does_not_dominate_itself(two_goods):
    customer, shop = two_goods
    deal = (b(0, 1, n=2), 12.0)
    assert not pareto_dominates(deal, deal, customer, shop)


def test_shifted_price_on_best_bundle_dominates(two_goods):
    customer, shop = two_goods
    star, other, p = b(0, 1, n=2), b(0, n=2), 7.0
    shifted = p + shop.value(star) - shop.value(other)
    assert pareto_dominates((star, shifted), (other, p), customer, shop)
    assert not pareto_dominates((other, p), (star, shifted), customer, shop)


def test_pareto_certificate_holds_on_random_instance():
    dist = generate_distribution(31, n=4)
    customer = sample_customer(dist, 32)
    shop = ShopPricing.for_distribution(dist)
    grid = price_grid(customer, shop, points=40)
    assert pareto_certificate(customer, shop, grid) == ()


def test_price_grid_needs_two_points(two_goods):
    customer, shop = two_goods
    with pytest.raises(ValueError):
        price_grid(customer, shop, points=1)
    grid = price_grid(customer, shop, points=5)
    assert grid[0] == pytest.approx(5.0) and grid[-1] == pytest.approx(30.0)


def test_neighborhood_is_symmetric():
    for bundle in all_bundles(5):
        for other in neighborhood(bundle):
            assert bundle in neighborhood(other)


def test_sampled_deals_follow_best_bundle_dominance():
    dist = generate_distribution(41, n=5)
    customer = sample_customer(dist, 42)
    shop = ShopPricing.for_distribution(dist)
    extrema = gft_extrema(customer, shop)
    star = min(extrema.argmax)
    bundles = list(all_bundles(5))
    rng = np.random.default_rng(43)
    for _ in range(300):
        bundle = bundles[int(rng.integers(len(bundles)))]
        price = float(rng.uniform(0.0, 1.5 * customer.value(bundle)))
        if bundle in extrema.argmax:
            for _ in range(20):
                rival = bundles[int(rng.integers(len(bundles)))]
                rival_price = float(rng.uniform(0.0, 1.5 * customer.value(rival)))
                assert not pareto_dominates((rival, rival_price), (bundle, price), customer, shop)
        else:
            witness = price + shop.value(star) - shop.value(bundle)
            assert pareto_dominates((star, witness), (bundle, price), customer, shop)
