"""
JSON-lines transcripts.

Line 1 is a header record ({"event": "session", ...}) carrying the instance
data needed to recompute metrics; every following line is one event
{round, actor, bundle, price, event, ...}. Keys are sorted and floats use
repr, so identical sessions give identical bytes.
"""
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Tuple, Union

from negotiation.offers import NegotiationOutcome

PathLike = Union[str, Path]


def _dumps(record: Dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def outcome_records(outcome: NegotiationOutcome) -> List[Dict[str, Any]]:
    records = [event.to_record() for event in outcome.transcript]
    records.append({
        "event": "outcome",
        "round": outcome.rounds - 1,
        "actor": "nature",
        "end": outcome.end_reason.value,
        "deal": outcome.deal_reached,
        "rounds": outcome.rounds,
        "initial_bundle": outcome.initial_bundle.bitstring(),
        "bundle": outcome.final_bundle.bitstring() if outcome.final_bundle is not None else None,
        "price": outcome.final_price,
        "recommendations": outcome.recommendations,
        "interest_updates": outcome.interest_updates,
    })
    return records


def render_transcript(header: Dict[str, Any], outcome: NegotiationOutcome) -> str:
    lines = [_dumps({"event": "session", **header})]
    lines.extend(_dumps(r) for r in outcome_records(outcome))
    return "\n".join(lines) + "\n"


def write_transcript(path: PathLike, header: Dict[str, Any], outcome: NegotiationOutcome) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_transcript(header, outcome), encoding="utf-8")
    return path


def read_transcript(path: PathLike) -> Tuple[Dict[str, Any], List[Dict[str, Any]]]:
    """(header, events); the final event is the outcome record."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"Empty transcript: {path}")
    header = json.loads(lines[0])
    if header.get("event") != "session":
        raise ValueError(f"{path} does not start with a session header.")
    return header, [json.loads(ln) for ln in lines[1:]]


def iter_transcripts(root: PathLike) -> Iterable[Path]:
    return sorted(Path(root).rglob("*.jsonl"))
