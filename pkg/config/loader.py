import copy
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from app_logging.event_logger import get_logger
from experiments.config import ExperimentConfig, PreferenceSettings, PricingSettings, SessionSettings
from strategy.presets import StrategyRanges, preset

logger = get_logger(__name__)

DEFAULT_SETTINGS = Path(__file__).resolve().parent / "settings.yaml"

_SECTIONS = {
    "experiment", "preset", "customer_strategy", "shop_strategy",
    "preferences", "pricing", "session",
}


class ConfigError(ValueError):
    """Settings file unreadable or inconsistent."""


def _read(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"Cannot read settings from {path}: {exc}") from exc
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ConfigError(f"{path} must contain a mapping at the top level.")
    return doc


def merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursive dict merge; values in `override` win."""
    out = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _tuples(section: Dict[str, Any], *keys: str) -> Dict[str, Any]:
    out = dict(section)
    for key in keys:
        if out.get(key) is not None:
            value = out[key]
            out[key] = tuple(tuple(row) if isinstance(row, list) else row for row in value)
    return out


def _ranges(section: Optional[Dict[str, Any]]) -> Optional[StrategyRanges]:
    if section is None:
        return None
    return StrategyRanges(**_tuples(section, "gap_init_range", "delta_range"))


def build_config(doc: Dict[str, Any]) -> ExperimentConfig:
    unknown = set(doc) - _SECTIONS
    if unknown:
        raise ConfigError(f"Unknown settings sections: {', '.join(sorted(unknown))}.")
    try:
        experiment = _tuples(doc.get("experiment") or {}, "thresholds")
        preset_name = doc.get("preset") or "tdf"
        customer = _ranges(doc.get("customer_strategy")) or preset(preset_name)
        kwargs: Dict[str, Any] = dict(experiment, preset=preset_name, customer=customer)
        shop = _ranges(doc.get("shop_strategy"))
        if shop is not None:
            kwargs["shop"] = shop
        if doc.get("preferences"):
            kwargs["preferences"] = PreferenceSettings(**_tuples(doc["preferences"], "mean_range", "corr"))
        if doc.get("pricing"):
            kwargs["pricing"] = PricingSettings(**doc["pricing"])
        if doc.get("session"):
            kwargs["session"] = SessionSettings(**doc["session"])
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        # unexpected keyword inside a section
        raise ConfigError(f"Invalid settings: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"Invalid settings: {exc}") from exc


def load_settings(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Any]] = None,
    defaults: Union[str, Path] = DEFAULT_SETTINGS,
) -> ExperimentConfig:
    """
    defaults (config/settings.yaml) <- user file <- overrides, then validated
    into an ExperimentConfig. YAML is a JSON superset, so JSON files load too.
    """
    doc = _read(defaults) if defaults else {}
    if path is not None:
        doc = merge(doc, _read(path))
        logger.info(f"Loaded settings from {path}")
    doc = merge(doc, overrides or {})
    return build_config(doc)
