import sys
from pathlib import Path
from typing import List, Optional

from app_logging.event_logger import get_logger
from config.loader import ConfigError, load_settings
from experiments.engine import run_panels, run_single, run_sweep
from experiments.metrics import format_summary, summarize
from experiments.replay import replay_sweep, transcript_lines
from experiments.validation import CHECKS, run_validation
from negotiation.transcript import outcome_records
from strategy.presets import PRESETS
from ui.cli import build_parser, get_user_args, overrides_from_args
from utils.paths import default_out_dir

logger = get_logger(__name__)


def run_sweep_mode(args) -> int:
    cfg = load_settings(args.config, overrides_from_args(args))
    out_dir = Path(cfg.out_dir) if cfg.out_dir else default_out_dir()
    if args.preset == "all":
        run_panels(cfg, out_dir, tuple(PRESETS))
    else:
        run_sweep(cfg, out_dir)
    print(f"\nResults written to {out_dir}")
    return 0


def run_session_mode(args) -> int:
    cfg = load_settings(args.config, overrides_from_args(args))
    outcome, metrics, header = run_single(
        cfg, args.threshold, args.variant, args.distribution, args.customer,
    )
    print(f"=== Session d{args.distribution} c{args.customer} "
          f"threshold={header['threshold']} variant={args.variant} ===")
    for line in transcript_lines(outcome_records(outcome)):
        print(line)
    print(f"\nEnd: {outcome.end_reason.value} after {outcome.rounds} rounds")
    if outcome.deal_reached:
        print(f"Deal: {outcome.final_bundle} at {outcome.final_price:.2f} "
              f"(perc={metrics.perc}, relP={metrics.relP})")
    return 0


def run_validate_mode(args) -> int:
    names = args.checks or None
    unknown = [n for n in names or () if n not in CHECKS]
    if unknown:
        raise ValueError(f"Unknown checks: {', '.join(unknown)}. Available: {', '.join(CHECKS)}.")
    results = run_validation(names, quick=args.quick)
    print("\n=== Validation ===")
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status:<5} {result.name:<24} {result.seconds:7.1f}s  {result.detail}")
    return 0 if all(r.passed for r in results) else 1


def run_replay_mode(args) -> int:
    sessions = replay_sweep(args.out)
    print("\n=== Replayed Summary ===")
    for line in format_summary(summarize(sessions)):
        print(line)
    return 0


MODES = {
    "sweep": run_sweep_mode,
    "run": run_session_mode,
    "validate": run_validate_mode,
    "replay": run_replay_mode,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point. Without a subcommand the user is prompted for the
    mode and the key settings.
    """
    if argv is None:
        argv = sys.argv[1:]
    if not argv:
        argv = get_user_args()
    args = build_parser().parse_args(argv)
    if args.command is None:
        args = build_parser().parse_args(get_user_args())

    logger.info(f"Starting {args.command} with {vars(args)}")
    try:
        return MODES[args.command](args)
    except (ConfigError, ValueError) as exc:
        logger.error(f"{args.command} failed: {exc}")
        return 2


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("Shutting down due to keyboard interrupt.")
        sys.exit(0)
