"""
Recompute session metrics from transcript files alone.

A sweep's output directory holds the dumped distributions and one JSON-lines
transcript per session; together they determine every metrics fragment.
"""
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Union

import pandas as pd

from app_logging.event_logger import get_logger
from bundles.bundle import Bundle
from bundles.valuation import ValuationTable
from data.preferences import PreferenceDistribution
from experiments.metrics import SessionMetrics, compute_metrics, metrics_frame
from experiments.pricing import ShopPricing
from negotiation.transcript import iter_transcripts, read_transcript

logger = get_logger(__name__)


def _bundle(bits) -> Union[Bundle, None]:
    if bits is None:
        return None
    return Bundle.from_bits(int(ch) for ch in bits)


class PricingCache:
    """Loads each dumped distribution once and builds its shop pricing."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self._cache: Dict[tuple, ShopPricing] = {}

    def get(self, header: dict) -> ShopPricing:
        pricing = header["pricing"]
        scales = pricing.get("cost_scales")
        key = (header["distribution_file"], pricing["beta"], pricing["gamma"], pricing["floor_fraction"],
               tuple(scales) if scales else None)
        if key not in self._cache:
            dist = PreferenceDistribution.load(self.root / header["distribution_file"])
            self._cache[key] = ShopPricing.for_distribution(
                dist, beta=pricing["beta"], gamma=pricing["gamma"], floor_fraction=pricing["floor_fraction"],
                cost_scales=scales,
            )
        return self._cache[key]


def replay_transcript(path: Path, pricing: PricingCache) -> SessionMetrics:
    header, events = read_transcript(path)
    outcome = events[-1]
    if outcome.get("event") != "outcome":
        raise ValueError(f"{path} has no outcome record.")
    customer = ValuationTable.of(header["valuations"])
    return compute_metrics(
        bool(outcome["deal"]),
        _bundle(outcome["bundle"]),
        _bundle(outcome["initial_bundle"]),
        int(outcome["rounds"]),
        customer,
        pricing.get(header),
        end_reason=outcome["end"],
        distribution=int(header["distribution"]),
        customer_index=int(header["customer"]),
        threshold=float(header["threshold"]),
        variant=header["variant"],
        recommendations=int(outcome["recommendations"]),
        interest_updates=int(outcome["interest_updates"]),
    )


def replay_sweep(
    out_dir: Union[str, Path],
    on_step: Callable[[SessionMetrics], None] = None,
) -> pd.DataFrame:
    """
    Metrics for every transcript under out_dir/transcripts, in the same
    layout as the sweep's sessions table. `on_step` sees each fragment.
    """
    root = Path(out_dir)
    pricing = PricingCache(root)
    fragments: List[SessionMetrics] = []
    for path in iter_transcripts(root / "transcripts"):
        fragment = replay_transcript(path, pricing)
        if on_step is not None:
            on_step(fragment)
        fragments.append(fragment)
    logger.info(f"Replayed {len(fragments)} transcripts from {root}.")
    return metrics_frame(fragments)


def transcript_lines(events: Iterable[dict]) -> List[str]:
    """Human-readable rendering of transcript events."""
    lines = []
    for e in events:
        kind = e.get("event")
        price = e.get("price")
        price_txt = f"{price:10.2f}" if isinstance(price, (int, float)) else " " * 10
        details = {k: v for k, v in e.items() if k not in ("round", "actor", "event", "bundle", "price")}
        extra = " ".join(f"{k}={v}" for k, v in sorted(details.items()))
        lines.append(
            f"r{e.get('round', 0):>4} {e.get('actor', ''):<8} {kind:<15} "
            f"{e.get('bundle') or '':<12} {price_txt} {extra}".rstrip()
        )
    return lines
