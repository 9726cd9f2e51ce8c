from dataclasses import dataclass
from typing import FrozenSet, Sequence, Tuple

import numpy as np

from bundles.bundle import Bundle, bundles_from_rows, check_enumerable
from bundles.valuation import BundleValuation

Deal = Tuple[Bundle, float]

# Absolute slack when comparing monetary values that went through different
# float summation paths.
MONEY_ATOL = 1e-9


def gains_from_trade(bundle: Bundle, customer: BundleValuation, shop: BundleValuation) -> float:
    return customer.value(bundle) - shop.value(bundle)


def gft_table(customer: BundleValuation, shop: BundleValuation) -> np.ndarray:
    """Gains from trade of every bundle, canonical order."""
    if customer.n != shop.n:
        raise ValueError(f"Valuations disagree on n: {customer.n} vs {shop.n}.")
    check_enumerable(customer.n)
    return customer.values() - shop.values()


@dataclass(frozen=True)
class GftExtrema:
    max_gft: float
    min_gft: float
    argmax: FrozenSet[Bundle]


def gft_extrema(customer: BundleValuation, shop: BundleValuation) -> GftExtrema:
    """
    Exhaustive scan of all bundles. `argmax` holds every bundle whose gains
    are within MONEY_ATOL of the maximum.
    """
    gft = gft_table(customer, shop)
    hi = float(gft.max())
    lo = float(gft.min())
    rows = np.flatnonzero(gft >= hi - MONEY_ATOL)
    return GftExtrema(hi, lo, frozenset(bundles_from_rows(rows, customer.n)))


def net_values(deal: Deal, customer: BundleValuation, shop: BundleValuation) -> Tuple[float, float]:
    """(customer net monetary value, shop net monetary value) of a deal."""
    bundle, price = deal
    return customer.value(bundle) - price, price - shop.value(bundle)


def pareto_dominates(
    deal: Deal,
    other: Deal,
    customer: BundleValuation,
    shop: BundleValuation,
    atol: float = MONEY_ATOL,
) -> bool:
    """
    True when `deal` leaves both agents at least as well off as `other`
    and one of them strictly better.
    """
    xc1, xs1 = net_values(deal, customer, shop)
    xc2, xs2 = net_values(other, customer, shop)
    weakly = xc1 >= xc2 - atol and xs1 >= xs2 - atol
    strictly = xc1 > xc2 + atol or xs1 > xs2 + atol
    return weakly and strictly


def price_grid(customer: BundleValuation, shop: BundleValuation, points: int = 200) -> np.ndarray:
    """Evenly spaced prices spanning [min shop value, max customer value]."""
    if points < 2:
        raise ValueError("A price grid needs at least 2 points.")
    return np.linspace(float(shop.values().min()), float(customer.values().max()), points)


@dataclass(frozen=True)
class ParetoViolation:
    deal: Deal
    reason: str


def pareto_certificate(
    customer: BundleValuation,
    shop: BundleValuation,
    grid: Sequence[float],
) -> Tuple[ParetoViolation, ...]:
    """
    Check on a price grid that deals on max-gains bundles are undominated and
    every other deal is dominated by a deal on a max-gains bundle.

    The dominating deal is searched on the grid plus, for each tested deal
    (b, p), the shifted price p + v_s(b*) - v_s(b), which keeps the shop
    indifferent and so dominates whenever b* has strictly higher gains.
    Vectorized over the grid; returns the violations found (empty on success).
    """
    n = customer.n
    check_enumerable(n)
    grid = np.asarray(grid, dtype=np.float64)
    vc = customer.values()
    vs = shop.values()
    best = gft_extrema(customer, shop)
    star_rows = sorted(b.mask - 1 for b in best.argmax)
    star_set = set(star_rows)
    xc_all = vc[:, None] - grid[None, :]
    xs_all = grid[None, :] - vs[:, None]

    violations = []
    for row in range(vc.size):
        bundle = Bundle(row + 1, n)
        # net values of (bundle, p) for every grid p
        xc = vc[row] - grid
        xs = grid - vs[row]
        if row in star_set:
            for k, p in enumerate(grid):
                weak = (xc_all >= xc[k] - MONEY_ATOL) & (xs_all >= xs[k] - MONEY_ATOL)
                strict = (xc_all > xc[k] + MONEY_ATOL) | (xs_all > xs[k] + MONEY_ATOL)
                if np.any(weak & strict):
                    violations.append(ParetoViolation((bundle, float(p)), "max-gains deal dominated"))
        else:
            for k, p in enumerate(grid):
                found = False
                for srow in star_rows:
                    candidates = np.append(grid, p + vs[srow] - vs[row])
                    cxc = vc[srow] - candidates
                    cxs = candidates - vs[srow]
                    weak = (cxc >= xc[k] - MONEY_ATOL) & (cxs >= xs[k] - MONEY_ATOL)
                    strict = (cxc > xc[k] + MONEY_ATOL) | (cxs > xs[k] + MONEY_ATOL)
                    if np.any(weak & strict):
                        found = True
                        break
                if not found:
                    violations.append(ParetoViolation((bundle, float(p)), "no dominating max-gains deal"))
    return tuple(violations)
