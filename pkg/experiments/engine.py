import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from app_logging.event_logger import get_logger
from bundles.bundle import Originator
from bundles.valuation import ValuationTable
from data.moments import CustomerModel
from data.preferences import PreferenceDistribution, generate_distribution, sample_customer
from experiments.config import ExperimentConfig
from experiments.metrics import (
    SessionMetrics,
    format_summary,
    metrics_frame,
    outcome_metrics,
    summarize,
    write_summary,
)
from experiments.pricing import ShopPricing, draw_cost_scales
from negotiation.offers import EndReason, NegotiationOutcome, SessionConfig
from negotiation.session import SessionStreams, run_session
from negotiation.transcript import write_transcript
from recommender.selection import BenchmarkRecommender, Recommender
from strategy.bidding import StrategyParams
from strategy.presets import PRESETS, draw_params
from utils.paths import ensure_dir
from utils.seeding import Stream, derive_rng, derive_seed

logger = get_logger(__name__)

VARIANTS = ("system", "benchmark")


# ----------------- Instances -----------------


@dataclass
class DistributionInstance:
    """One preference distribution with the shop's pricing and knowledge for it."""
    index: int
    dist: PreferenceDistribution
    pricing: ShopPricing
    model: CustomerModel
    cost_scales: Optional[np.ndarray] = None


@dataclass(frozen=True)
class CustomerInstance:
    index: int
    valuations: ValuationTable
    customer_params: StrategyParams
    shop_params: StrategyParams


def build_distribution(cfg: ExperimentConfig, d: int) -> DistributionInstance:
    prefs = cfg.preferences
    dist = generate_distribution(
        derive_seed(cfg.master_seed, Stream.DISTRIBUTION, d),
        n=prefs.n_goods,
        mean_range=prefs.mean_range,
        sd_floor_fraction=prefs.sd_floor_fraction,
        min_mean_to_sd=prefs.min_mean_to_sd,
        corr=prefs.correlation(),
    )
    scales = draw_cost_scales(
        prefs.n_goods, cfg.pricing.cost_spread, derive_rng(cfg.master_seed, Stream.SHOP_COSTS, d),
    )
    pricing = ShopPricing.for_distribution(
        dist, beta=cfg.pricing.beta, gamma=cfg.pricing.gamma, floor_fraction=cfg.pricing.floor_fraction,
        cost_scales=scales,
    )
    return DistributionInstance(d, dist, pricing, CustomerModel(dist), scales)


def build_customer(cfg: ExperimentConfig, inst: DistributionInstance, c: int) -> CustomerInstance:
    """Valuations and strategy parameters depend on (distribution, customer) only."""
    valuations = sample_customer(inst.dist, derive_rng(cfg.master_seed, Stream.CUSTOMER, inst.index, c))
    rng = derive_rng(cfg.master_seed, Stream.STRATEGY, inst.index, c)
    customer_params = draw_params(cfg.customer, Originator.CUSTOMER, rng)
    shop_params = draw_params(cfg.shop, Originator.SHOP, rng)
    return CustomerInstance(c, valuations, customer_params, shop_params)


def session_config(cfg: ExperimentConfig, cust: CustomerInstance, threshold: float) -> SessionConfig:
    return SessionConfig(
        customer=cust.customer_params,
        shop=cust.shop_params,
        breakdown_probability=cfg.session.breakdown_probability,
        max_rounds=cfg.session.max_rounds,
        recommend=True,
        threshold=threshold,
        seed=cfg.master_seed,
    )


def make_recommender(cfg: ExperimentConfig, inst: DistributionInstance, variant: str, threshold: float,
                     cell: Tuple[int, int, int]) -> Recommender:
    rate = cfg.session.recommendation_rate
    if variant == "system":
        return Recommender(inst.model, inst.pricing, threshold, rate)
    if variant == "benchmark":
        rng = derive_rng(cfg.master_seed, Stream.CHOICE, *cell)
        return BenchmarkRecommender(inst.model, inst.pricing, threshold, rng, rate)
    raise ValueError(f"Unknown variant '{variant}'.")


def run_cell(
    cfg: ExperimentConfig,
    inst: DistributionInstance,
    cust: CustomerInstance,
    k: int,
    threshold: float,
    variant: str,
) -> NegotiationOutcome:
    """
    One session. System and benchmark sessions of the same cell share the
    customer, the strategy parameters, and the breakdown and trigger streams.
    """
    cell = (inst.index, cust.index, k)
    streams = SessionStreams(
        breakdown=derive_rng(cfg.master_seed, Stream.BREAKDOWN, *cell),
        trigger=derive_rng(cfg.master_seed, Stream.TRIGGER, *cell),
    )
    recommender = make_recommender(cfg, inst, variant, threshold, cell)
    return run_session(session_config(cfg, cust, threshold), cust.valuations, inst.pricing, recommender, streams)


def transcript_header(cfg: ExperimentConfig, inst: DistributionInstance, cust: CustomerInstance,
                      threshold: float, variant: str) -> Dict:
    return {
        "distribution": inst.index,
        "distribution_file": f"distributions/d{inst.index:03d}.json",
        "customer": cust.index,
        "threshold": threshold,
        "variant": variant,
        "preset": cfg.preset,
        "valuations": cust.valuations.per_good.tolist(),
        "pricing": {**asdict(cfg.pricing), "cost_scales": inst.cost_scales.tolist()},
        "customer_params": {**asdict(cust.customer_params), "kind": cust.customer_params.kind.value,
                            "role": cust.customer_params.role.value},
        "shop_params": {**asdict(cust.shop_params), "kind": cust.shop_params.kind.value,
                        "role": cust.shop_params.role.value},
    }


def transcript_path(out_dir: Path, d: int, k: int, variant: str, c: int) -> Path:
    return out_dir / "transcripts" / f"d{d:03d}" / f"t{k:02d}" / f"{variant}_c{c:03d}.jsonl"


# ----------------- Sweep -----------------


def _run_distribution(cfg: ExperimentConfig, d: int, out_dir: Optional[str]) -> List[SessionMetrics]:
    inst = build_distribution(cfg, d)
    out = Path(out_dir) if out_dir else None
    if out is not None:
        inst.dist.dump(out / "distributions" / f"d{d:03d}.json")

    fragments: List[SessionMetrics] = []
    caps = 0
    for c in range(cfg.customers_per_distribution):
        cust = build_customer(cfg, inst, c)
        for k, threshold in enumerate(cfg.thresholds):
            for variant in VARIANTS:
                outcome = run_cell(cfg, inst, cust, k, threshold, variant)
                if outcome.end_reason == EndReason.ROUND_CAP:
                    caps += 1
                if out is not None and cfg.write_transcripts:
                    write_transcript(
                        transcript_path(out, d, k, variant, c),
                        transcript_header(cfg, inst, cust, threshold, variant),
                        outcome,
                    )
                fragments.append(outcome_metrics(
                    outcome, cust.valuations, inst.pricing,
                    distribution=d, customer_index=c, threshold=threshold, variant=variant,
                ))

    if caps:
        logger.warning(f"Distribution {d}: {caps} sessions hit the round cap.")
    if inst.model.vacuous_fallbacks:
        logger.warning(
            f"Distribution {d}: {inst.model.vacuous_fallbacks} vacuous conditions "
            "fell back to unconditional expectations."
        )
    logger.info(f"Distribution {d} finished ({len(fragments)} sessions).")
    return fragments


@dataclass
class SweepResult:
    sessions: pd.DataFrame
    summary: pd.DataFrame
    out_dir: Optional[Path]


def run_sweep(cfg: ExperimentConfig, out_dir: Optional[Path] = None) -> SweepResult:
    """
    Full factorial run: every distribution x customer x threshold, once with
    the expected-gains recommender and once with the random benchmark.

    Flow:
      1. Build each distribution, its shop pricing and customer model.
      2. Draw customers and strategy parameters per (distribution, customer).
      3. Run the paired sessions per threshold, writing transcripts.
      4. Aggregate per threshold and write summary.csv.
    """
    if out_dir is None and cfg.out_dir:
        out_dir = Path(cfg.out_dir)
    if out_dir is not None:
        ensure_dir(out_dir)
        (out_dir / "run.json").write_text(json.dumps(asdict(cfg), indent=2, default=str), encoding="utf-8")

    logger.info(
        f"Sweep started: preset={cfg.preset}, distributions={cfg.num_distributions}, "
        f"customers={cfg.customers_per_distribution}, thresholds={list(cfg.thresholds)}, "
        f"seed={cfg.master_seed}, workers={cfg.workers}"
    )
    out_arg = str(out_dir) if out_dir is not None else None
    fragments: List[SessionMetrics] = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(_run_distribution, cfg, d, out_arg) for d in range(cfg.num_distributions)]
            for future in futures:
                fragments.extend(future.result())
    else:
        for d in range(cfg.num_distributions):
            fragments.extend(_run_distribution(cfg, d, out_arg))

    sessions = metrics_frame(fragments)
    summary = summarize(sessions)
    if out_dir is not None:
        write_summary(summary, out_dir / "summary.csv")
        sessions.to_csv(out_dir / "sessions.csv", index=False, float_format="%.6f", na_rep="")

    print("\n=== Sweep Summary ===")
    for line in format_summary(summary):
        print(line)
    logger.info("Sweep finished.")
    return SweepResult(sessions, summary, out_dir)


def run_panels(cfg: ExperimentConfig, out_dir: Path, presets=tuple(PRESETS)) -> Dict[str, SweepResult]:
    """The sweep once per customer-strategy preset, each under out_dir/<preset>/."""
    results = {}
    for name in presets:
        panel_cfg = replace(cfg, preset=name, customer=PRESETS[name])
        results[name] = run_sweep(panel_cfg, out_dir / name)
    return results


# ----------------- Single session -----------------


def run_single(
    cfg: ExperimentConfig,
    threshold: Optional[float] = None,
    variant: str = "system",
    distribution: int = 0,
    customer: int = 0,
) -> Tuple[NegotiationOutcome, SessionMetrics, Dict]:
    """One session from the sweep grid, for inspection."""
    threshold = cfg.thresholds[0] if threshold is None else threshold
    if threshold in cfg.thresholds:
        k = cfg.thresholds.index(threshold)
    else:
        k = len(cfg.thresholds)
        logger.warning(f"Threshold {threshold} is not in the configured grid {list(cfg.thresholds)}; "
                       f"using stream index {k}.")
    inst = build_distribution(cfg, distribution)
    cust = build_customer(cfg, inst, customer)
    outcome = run_cell(cfg, inst, cust, k, threshold, variant)
    metrics = outcome_metrics(
        outcome, cust.valuations, inst.pricing,
        distribution=distribution, customer_index=customer, threshold=threshold, variant=variant,
    )
    return outcome, metrics, transcript_header(cfg, inst, cust, threshold, variant)
