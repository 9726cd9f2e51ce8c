"""
Oracle suite behind the `validate` command.

Each check compares an implementation path with an independent one (brute
force, Monte Carlo, binomial frequency) and reports pass/fail with detail.
Sample sizes are parameters so the same checks run quickly in tests.
"""
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from app_logging.event_logger import get_logger
from bundles.bundle import Bundle, Originator, all_bundles
from bundles.gains import pareto_certificate, price_grid
from data.moments import CustomerModel, bundle_moments, conditional_expectation
from data.preferences import generate_distribution, sample_customer, sample_valuations
from experiments.pricing import ShopPricing
from negotiation.offers import SessionConfig
from negotiation.session import SessionStreams, run_session
from recommender.selection import Recommender
from recommender.timing import recommendation_probability, should_recommend
from strategy.bidding import StrategyKind, own_net_value
from strategy.presets import PRESETS, SHOP_RANGES, draw_params
from utils.seeding import derive_rng

logger = get_logger(__name__)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def check_pareto_certificate(instances: int = 50, n: int = 5, grid_points: int = 200, seed: int = 1) -> CheckResult:
    violations = 0
    for i in range(instances):
        dist = generate_distribution(derive_rng(seed, 0, i), n=n)
        customer = sample_customer(dist, derive_rng(seed, 1, i))
        shop = ShopPricing.for_distribution(dist)
        violations += len(pareto_certificate(customer, shop, price_grid(customer, shop, grid_points)))
    return CheckResult("pareto-certificate", violations == 0,
                       f"{instances} instances, n={n}, grid={grid_points}, violations={violations}")


def monte_carlo_conditional(dist, target: Bundle, given: Bundle, price: float, samples: int,
                            rng: np.random.Generator, chunk: int = 1_000_000) -> float:
    """E[v(target) | v(given) >= price] by rejection from the unrestricted normal."""
    t_idx = list(target.goods)
    g_idx = list(given.goods)
    total = 0.0
    kept = 0
    left = samples
    while left > 0:
        m = min(chunk, left)
        z = rng.standard_normal((m, dist.n)) @ dist.cholesky.T + dist.mu
        keep = z[:, g_idx].sum(axis=1) >= price
        total += float(z[keep][:, t_idx].sum())
        kept += int(keep.sum())
        left -= m
    return total / kept


def check_conditional_expectation(triples: int = 20, n: int = 4, samples: int = 10_000_000,
                                  tolerance: float = 0.005, seed: int = 2) -> CheckResult:
    rng = derive_rng(seed, 0)
    worst = 0.0
    for i in range(triples):
        dist = generate_distribution(derive_rng(seed, 1, i), n=n)
        target = Bundle(int(rng.integers(1, 1 << n)), n)
        given = Bundle(int(rng.integers(1, 1 << n)), n)
        moments = bundle_moments(dist)
        price = moments.mean(given) + float(rng.uniform(-1.0, 0.5)) * math.sqrt(moments.var(given))
        closed = conditional_expectation(dist, target, given, price)
        mc = monte_carlo_conditional(dist, target, given, price, samples, derive_rng(seed, 2, i))
        worst = max(worst, abs(closed - mc) / abs(mc))
    return CheckResult("conditional-expectation", worst <= tolerance,
                       f"{triples} triples, n={n}, samples={samples}, worst relative error={worst:.5f}")


def check_transform_moments(n: int = 3, samples: int = 1_000_000, mean_tol: float = 0.01,
                            cov_tol: float = 0.05, seed: int = 3) -> CheckResult:
    dist = generate_distribution(derive_rng(seed, 0), n=n)
    draws, _ = sample_valuations(dist, samples, derive_rng(seed, 1))
    means, cov = bundle_moments(dist).materialize()
    t = np.array([b.bits() for b in all_bundles(n)], dtype=np.float64)
    bundle_draws = draws @ t.T
    mean_err = float(np.max(np.abs(bundle_draws.mean(axis=0) - means) / means))
    cov_err = float(np.max(np.abs(np.cov(bundle_draws, rowvar=False) - cov) / np.abs(cov)))
    return CheckResult("transform-moments", mean_err <= mean_tol and cov_err <= cov_tol,
                       f"n={n}, samples={samples}, mean error={mean_err:.4f}, cov error={cov_err:.4f}")


def check_trigger_calibration(delta_ts=(1.0, 4.0, 10.0), trials: int = 100_000, tolerance: float = 0.01,
                              seed: int = 4) -> CheckResult:
    worst = 0.0
    for i, dt in enumerate(delta_ts):
        rng = derive_rng(seed, i)
        hits = sum(should_recommend(dt, rng) for _ in range(trials))
        worst = max(worst, abs(hits / trials - recommendation_probability(dt)))
    return CheckResult("trigger-calibration", worst <= tolerance,
                       f"delta_t={list(delta_ts)}, trials={trials}, worst deviation={worst:.4f}")


def strategy_violations(outcome, customer, shop, customer_kind: StrategyKind) -> List[str]:
    """Invariant breaches in one session's offers (empty when clean)."""
    problems = []
    last_bid: Dict[Bundle, float] = {}
    last_ask: Dict[Bundle, float] = {}
    customer_levels = []
    for offer in outcome.offers:
        if offer.originator == Originator.CUSTOMER:
            v = customer.value(offer.bundle)
            if offer.price > v + 1e-9:
                problems.append(f"bid {offer.price:.4f} above valuation {v:.4f}")
            if customer_kind == StrategyKind.TDF and offer.price < last_bid.get(offer.bundle, -math.inf) - 1e-9:
                problems.append("TDF bid decreased")
            last_bid[offer.bundle] = offer.price
            customer_levels.append(own_net_value(Originator.CUSTOMER, v, offer.price))
        else:
            v = shop.value(offer.bundle)
            if offer.price < v - 1e-9:
                problems.append(f"ask {offer.price:.4f} below valuation {v:.4f}")
            if offer.price > last_ask.get(offer.bundle, math.inf) + 1e-9:
                problems.append("TDF ask increased")
            last_ask[offer.bundle] = offer.price
    if customer_kind == StrategyKind.TFTMF:
        if any(b > a + 1e-9 for a, b in zip(customer_levels, customer_levels[1:])):
            problems.append("TFTMF net value increased")
    return problems


def check_strategy_invariants(sessions: int = 10_000, n: int = 10, seed: int = 5) -> CheckResult:
    dist = generate_distribution(derive_rng(seed, 0), n=n)
    shop = ShopPricing.for_distribution(dist)
    model = CustomerModel(dist)
    kinds = list(PRESETS.values())
    violations = 0
    first = ""
    for i in range(sessions):
        ranges = kinds[i % len(kinds)]
        rng = derive_rng(seed, 1, i)
        customer = sample_customer(dist, rng)
        cfg = SessionConfig(
            customer=draw_params(ranges, Originator.CUSTOMER, rng),
            shop=draw_params(SHOP_RANGES, Originator.SHOP, rng),
            threshold=float(rng.uniform(0.0, 0.5)),
        )
        recommender = Recommender(model, shop, cfg.threshold)
        streams = SessionStreams(derive_rng(seed, 2, i), derive_rng(seed, 3, i))
        outcome = run_session(cfg, customer, shop, recommender, streams)
        problems = strategy_violations(outcome, customer, shop, ranges.kind)
        if problems:
            violations += 1
            first = first or problems[0]
    detail = f"{sessions} sessions, violating sessions={violations}"
    if first:
        detail += f", first: {first}"
    return CheckResult("strategy-invariants", violations == 0, detail)


CHECKS: Dict[str, Callable[..., CheckResult]] = {
    "pareto-certificate": check_pareto_certificate,
    "conditional-expectation": check_conditional_expectation,
    "transform-moments": check_transform_moments,
    "trigger-calibration": check_trigger_calibration,
    "strategy-invariants": check_strategy_invariants,
}


def run_validation(names=None, quick: bool = False) -> List[CheckResult]:
    """
    Run the named checks (all by default). quick=True shrinks sample sizes
    and widens the Monte-Carlo tolerance accordingly.
    """
    quick_kwargs = {
        "pareto-certificate": {"instances": 10},
        "conditional-expectation": {"triples": 5, "samples": 400_000, "tolerance": 0.02},
        "transform-moments": {"samples": 200_000, "mean_tol": 0.01, "cov_tol": 0.05},
        "trigger-calibration": {"trials": 20_000, "tolerance": 0.02},
        "strategy-invariants": {"sessions": 300},
    }
    results = []
    for name in names or CHECKS:
        start = time.perf_counter()
        result = CHECKS[name](**(quick_kwargs[name] if quick else {}))
        result.seconds = time.perf_counter() - start
        level = "info" if result.passed else "warning"
        getattr(logger, level)(f"{name}: {'PASS' if result.passed else 'FAIL'} ({result.detail})")
        results.append(result)
    return results
