import json

import pytest

from config.loader import ConfigError, load_settings, merge
from strategy.bidding import StrategyKind
from ui.cli import build_parser, overrides_from_args
import main


def test_default_settings_file():
    cfg = load_settings()
    assert cfg.num_distributions == 20
    assert cfg.customers_per_distribution == 50
    assert cfg.thresholds == (0.0, 0.25, 0.5)
    assert cfg.preset == "tdf" and cfg.customer.kind == StrategyKind.TDF
    assert cfg.shop.delta_fixed == 0.1
    assert cfg.preferences.n_goods == 10
    assert cfg.pricing.beta == 0.99 and cfg.pricing.cost_spread == 0.3


def test_merge_is_recursive():
    merged = merge({"a": {"x": 1, "y": 2}, "b": 3}, {"a": {"y": 5}})
    assert merged == {"a": {"x": 1, "y": 5}, "b": 3}


def test_user_json_file_and_overrides(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"experiment": {"customers_per_distribution": 3}, "pricing": {"gamma": 0.1}}))
    cfg = load_settings(path, {"experiment": {"master_seed": 9}, "preset": "tftmf-1"})
    assert cfg.customers_per_distribution == 3
    assert cfg.num_distributions == 20
    assert cfg.pricing.gamma == 0.1
    assert cfg.master_seed == 9
    assert cfg.customer.kind == StrategyKind.TFTMF and cfg.customer.delta_fixed == 1.0


def test_explicit_customer_strategy_block():
    cfg = load_settings(overrides={"customer_strategy": {"kind": "tftmf", "delta_range": [0.2, 0.3]}})
    assert cfg.customer.kind == StrategyKind.TFTMF
    assert cfg.customer.delta_range == (0.2, 0.3)


@pytest.mark.parametrize("overrides", [
    {"plotting": {"dpi": 300}},
    {"experiment": {"num_distribution": 3}},
    {"experiment": {"workers": 0}},
    {"preset": "greedy"},
    {"pricing": {"beta": 1.5}},
])
def test_bad_settings_raise_config_error(overrides):
    with pytest.raises(ConfigError):
        load_settings(overrides=overrides)


def test_unreadable_file_raises_config_error(tmp_path):
    with pytest.raises(ConfigError):
        load_settings(tmp_path / "missing.yaml")
    bad = tmp_path / "list.yaml"
    bad.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_settings(bad)


def test_cli_flags_become_overrides():
    args = build_parser().parse_args([
        "sweep", "--seed", "5", "--distributions", "2", "--customers", "3",
        "--thresholds", "0,0.1", "--preset", "tftmf-random", "--no-transcripts", "--workers", "2",
    ])
    overrides = overrides_from_args(args)
    assert overrides["experiment"] == {
        "master_seed": 5, "num_distributions": 2, "customers_per_distribution": 3,
        "thresholds": [0.0, 0.1], "workers": 2, "write_transcripts": False,
    }
    assert overrides["preset"] == "tftmf-random"
    cfg = load_settings(overrides=overrides)
    assert cfg.thresholds == (0.0, 0.1) and not cfg.write_transcripts


def test_all_preset_is_not_a_settings_override():
    args = build_parser().parse_args(["sweep", "--preset", "all"])
    assert "preset" not in overrides_from_args(args)


def test_main_sweep_writes_summary(tmp_path):
    code = main.main([
        "sweep", "--distributions", "1", "--customers", "1", "--thresholds", "0",
        "--out", str(tmp_path), "--no-transcripts",
    ])
    assert code == 0
    assert (tmp_path / "summary.csv").exists()


def test_main_run_prints_transcript(capsys):
    assert main.main(["run", "--threshold", "0.25", "--distribution", "1"]) == 0
    out = capsys.readouterr().out
    assert "End:" in out and "customer" in out


def test_main_reports_config_errors(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("unknown_section: 1\n")
    assert main.main(["sweep", "--config", str(bad)]) == 2


def test_main_validate_single_check():
    assert main.main(["validate", "--quick", "--check", "trigger-calibration"]) == 0
    assert main.main(["validate", "--check", "no-such-check"]) == 2


def test_run_takes_a_single_preset(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["run", "--preset", "all"])
    assert "invalid choice" in capsys.readouterr().err
    args = build_parser().parse_args(["run", "--preset", "tftmf-1"])
    assert overrides_from_args(args)["preset"] == "tftmf-1"
