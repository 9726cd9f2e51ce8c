import argparse
from typing import Any, Dict, List, Optional

from strategy.presets import PRESETS

RUN_MODES = ("run", "sweep", "validate", "replay")
PRESET_CHOICES = tuple(PRESETS) + ("all",)


def _thresholds(raw: str) -> List[float]:
    try:
        return [float(x) for x in raw.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{raw}' is not a comma-separated list of numbers.") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bundleneg",
        description="Bundle price negotiation with shop recommendations.",
    )
    sub = parser.add_subparsers(dest="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML/JSON settings merged over config/settings.yaml")
    common.add_argument("--seed", type=int, help="master seed")

    sweep = sub.add_parser("sweep", parents=[common], help="full factorial experiment")
    sweep.add_argument("--distributions", type=int)
    sweep.add_argument("--customers", type=int, help="customers per distribution")
    sweep.add_argument("--thresholds", type=_thresholds, help="e.g. 0,0.25,0.5")
    sweep.add_argument("--out", help="output directory")
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--no-transcripts", action="store_true")
    sweep.add_argument("--preset", choices=PRESET_CHOICES, help="customer strategy preset, or all")

    run = sub.add_parser("run", parents=[common], help="one session, printed as a transcript")
    run.add_argument("--preset", choices=tuple(PRESETS), help="customer strategy preset")
    run.add_argument("--threshold", type=float)
    run.add_argument("--variant", choices=("system", "benchmark"), default="system")
    run.add_argument("--distribution", type=int, default=0)
    run.add_argument("--customer", type=int, default=0)

    validate = sub.add_parser("validate", help="oracle checks")
    validate.add_argument("--quick", action="store_true", help="reduced sample sizes")
    validate.add_argument("--check", action="append", dest="checks", help="run only this check (repeatable)")

    replay = sub.add_parser("replay", help="recompute metrics from a sweep's transcripts")
    replay.add_argument("--out", required=True, help="sweep output directory")
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """Settings overrides from parsed flags, in the settings file layout."""
    experiment: Dict[str, Any] = {}
    for flag, key in (
        ("seed", "master_seed"),
        ("distributions", "num_distributions"),
        ("customers", "customers_per_distribution"),
        ("thresholds", "thresholds"),
        ("out", "out_dir"),
        ("workers", "workers"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            experiment[key] = value
    if getattr(args, "no_transcripts", False):
        experiment["write_transcripts"] = False

    overrides: Dict[str, Any] = {}
    if experiment:
        overrides["experiment"] = experiment
    preset = getattr(args, "preset", None)
    if preset and preset != "all":
        overrides["preset"] = preset
        # a preset on the command line wins over a customer_strategy block
        overrides["customer_strategy"] = None
    return overrides


# ----------------- Interactive fallback -----------------


def get_run_mode() -> str:
    default = "sweep"
    prompt = f"Run mode [{'/'.join(RUN_MODES)}] [{default}]: "

    while True:
        raw = input(prompt).strip().lower()
        if raw == "":
            return default
        if raw in RUN_MODES:
            return raw
        print(f"Please type one of: {', '.join(RUN_MODES)}.")


def _prompt_int(label: str, default: int) -> int:
    while True:
        raw = input(f"{label} [{default}]: ").strip()
        if raw == "":
            return default
        try:
            value = int(raw)
        except ValueError:
            value = 0
        if value > 0:
            return value
        print(f"'{raw}' is not a positive whole number.")


def _prompt_preset(default: str = "tdf") -> str:
    allowed = ", ".join(PRESET_CHOICES)
    while True:
        raw = input(f"Customer strategy (one of: {allowed}) [{default}]: ").strip().lower()
        if raw == "":
            return default
        if raw in PRESET_CHOICES:
            return raw
        print(f"'{raw}' is not a preset. Please type one of: {allowed}")


def get_user_args(mode: Optional[str] = None) -> List[str]:
    """Prompt for the key settings and return them as command-line arguments."""
    print("=== Bundle Negotiation ===")
    mode = mode or get_run_mode()
    argv = [mode]

    if mode == "sweep":
        argv += ["--distributions", str(_prompt_int("Distributions", 20))]
        argv += ["--customers", str(_prompt_int("Customers per distribution", 50))]
        argv += ["--preset", _prompt_preset()]
    elif mode == "run":
        argv += ["--distribution", str(_prompt_int("Distribution index (from 1)", 1) - 1)]
        argv += ["--customer", str(_prompt_int("Customer index (from 1)", 1) - 1)]
        variant = input("Variant [system/benchmark] [system]: ").strip().lower()
        argv += ["--variant", variant if variant in ("system", "benchmark") else "system"]
    elif mode == "validate":
        quick = input("Quick run with reduced samples? [Y/n]: ").strip().lower()
        if quick != "n":
            argv.append("--quick")
    elif mode == "replay":
        out = input("Sweep output directory: ").strip()
        argv += ["--out", out]
    return argv
