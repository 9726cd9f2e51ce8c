from dataclasses import asdict, dataclass
from typing import Iterable, List, Optional

import numpy as np
import pandas as pd

from app_logging.event_logger import get_logger
from bundles.bundle import Bundle
from bundles.gains import gains_from_trade, gft_extrema
from bundles.valuation import BundleValuation

logger = get_logger(__name__)

SUMMARY_COLUMNS = [
    "threshold", "variant", "deals", "mean_rounds", "perc", "relP",
    "diff_deals", "diff_rounds", "diff_perc", "diff_relP",
]

# denominators closer to zero than this are treated as undefined
_DEGENERATE = 1e-9


@dataclass(frozen=True)
class SessionMetrics:
    """
    Per-session metrics fragment. perc and relP are None when no deal was
    reached or their denominator vanishes.
    """
    distribution: int
    customer: int
    threshold: float
    variant: str
    deal: bool
    rounds: int
    end_reason: str
    perc: Optional[float]
    relP: Optional[float]
    final_gft: Optional[float]
    initial_gft: float
    max_gft: float
    min_gft: float
    recommendations: int = 0
    interest_updates: int = 0


def _ratio(numerator: float, denominator: float) -> Optional[float]:
    if abs(denominator) < _DEGENERATE:
        return None
    return numerator / denominator


def compute_metrics(
    deal: bool,
    final_bundle: Optional[Bundle],
    initial_bundle: Bundle,
    rounds: int,
    customer: BundleValuation,
    shop: BundleValuation,
    *,
    end_reason: str = "deal",
    distribution: int = 0,
    customer_index: int = 0,
    threshold: float = 0.0,
    variant: str = "system",
    recommendations: int = 0,
    interest_updates: int = 0,
) -> SessionMetrics:
    """
    perc = (GFT(final) - min GFT) / (max GFT - min GFT)
    relP = (GFT(final) - GFT(initial)) / (max GFT - GFT(initial))
    """
    extrema = gft_extrema(customer, shop)
    initial_gft = gains_from_trade(initial_bundle, customer, shop)
    perc = rel = final_gft = None
    if deal:
        final_gft = gains_from_trade(final_bundle, customer, shop)
        perc = _ratio(final_gft - extrema.min_gft, extrema.max_gft - extrema.min_gft)
        rel = _ratio(final_gft - initial_gft, extrema.max_gft - initial_gft)
    return SessionMetrics(
        distribution=distribution,
        customer=customer_index,
        threshold=threshold,
        variant=variant,
        deal=deal,
        rounds=rounds,
        end_reason=end_reason,
        perc=perc,
        relP=rel,
        final_gft=final_gft,
        initial_gft=initial_gft,
        max_gft=extrema.max_gft,
        min_gft=extrema.min_gft,
        recommendations=recommendations,
        interest_updates=interest_updates,
    )


def metrics_frame(fragments: Iterable[SessionMetrics]) -> pd.DataFrame:
    """One row per session, sorted by cell key so row order never depends on run order."""
    frame = pd.DataFrame([asdict(f) for f in fragments])
    if frame.empty:
        return frame
    frame = frame.sort_values(["threshold", "variant", "distribution", "customer"], kind="mergesort")
    return frame.reset_index(drop=True)


def summarize(frame: pd.DataFrame) -> pd.DataFrame:
    """
    Aggregate per (threshold, variant): total deals, mean rounds over deals,
    mean perc and relP over the sessions where they are defined. The diff
    columns (system - benchmark) sit on the system rows.
    """
    rows = []
    for (threshold, variant), cell in frame.groupby(["threshold", "variant"], sort=True):
        deals = cell[cell["deal"]]
        rows.append({
            "threshold": threshold,
            "variant": variant,
            "deals": int(len(deals)),
            "mean_rounds": float(deals["rounds"].mean()) if len(deals) else np.nan,
            "perc": float(pd.to_numeric(deals["perc"]).mean()) if len(deals) else np.nan,
            "relP": float(pd.to_numeric(deals["relP"]).mean()) if len(deals) else np.nan,
        })
    summary = pd.DataFrame(rows)
    for col in ("deals", "rounds", "perc", "relP"):
        summary[f"diff_{col}"] = np.nan

    source = {"deals": "deals", "rounds": "mean_rounds", "perc": "perc", "relP": "relP"}
    for threshold, cell in summary.groupby("threshold", sort=True):
        sys_rows = cell[cell["variant"] == "system"]
        bench_rows = cell[cell["variant"] == "benchmark"]
        if sys_rows.empty or bench_rows.empty:
            continue
        i = sys_rows.index[0]
        for col, src in source.items():
            summary.loc[i, f"diff_{col}"] = float(sys_rows[src].iloc[0]) - float(bench_rows[src].iloc[0])

    variant_order = {"system": 0, "benchmark": 1}
    summary["_order"] = summary["variant"].map(variant_order).fillna(2)
    summary = summary.sort_values(["threshold", "_order"], kind="mergesort").drop(columns="_order")
    return summary[SUMMARY_COLUMNS].reset_index(drop=True)


def write_summary(summary: pd.DataFrame, path) -> None:
    summary.to_csv(path, index=False, float_format="%.6f", na_rep="")
    logger.info(f"Wrote summary with {len(summary)} rows to {path}")


def format_summary(summary: pd.DataFrame) -> List[str]:
    return summary.to_string(index=False, float_format=lambda x: f"{x:.4f}").splitlines()


def outcome_metrics(outcome, customer: BundleValuation, shop: BundleValuation, **cell) -> SessionMetrics:
    """compute_metrics for a NegotiationOutcome."""
    return compute_metrics(
        outcome.deal_reached,
        outcome.final_bundle,
        outcome.initial_bundle,
        outcome.rounds,
        customer,
        shop,
        end_reason=outcome.end_reason.value,
        recommendations=outcome.recommendations,
        interest_updates=outcome.interest_updates,
        **cell,
    )
