"""Tests for CSV/JSON/SVG reporting and the command-line interface."""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from duelsim import (
    ConfigMismatch,
    EmptyInput,
    ExperimentConfig,
    ParseError,
    SyntheticEnvironment,
    generate_report,
    read_condition_csv,
    run_condition,
    write_condition_csv,
    write_manifest,
    write_summary_json,
)
from duelsim.cli import main
from duelsim.ltr import bundled_matrix_path
from duelsim.report import (
    SCHEMA_COLUMNS,
    condition_rows,
    config_digest,
    config_to_dict,
    parse_condition_rows,
    summarize_report,
    write_rows,
)


def _config(**overrides) -> ExperimentConfig:
    defaults = dict(
        policy="uniform",
        environment=SyntheticEnvironment(k=3, effect_w=0.5),
        horizon=120,
        replications=6,
        checkpoints=(30, 60, 90, 120),
    )
    defaults.update(overrides)
    return ExperimentConfig(**defaults)


@pytest.fixture(scope="module")
def effect_reports():  # noqa: ANN201
    return {
        policy: run_condition(_config(policy=policy)) for policy in ("uniform", "dts")
    }


@pytest.fixture(scope="module")
def zero_report():  # noqa: ANN201
    cfg = _config(
        environment=SyntheticEnvironment(k=3, effect_w=0.0),
        replications=10,
        horizon=60,
        checkpoints=(20, 40, 60),
    )
    return run_condition(cfg)


class TestConditionRows:
    def test_schema_columns(self) -> None:
        assert SCHEMA_COLUMNS == (
            "condition_id",
            "policy",
            "k",
            "effect_w",
            "checkpoint_t",
            "mean_power",
            "pair_id",
            "pair_power",
            "mean_cum_regret",
            "condorcet_prop",
            "per_pair_fpr",
            "family_fpr",
        )

    def test_row_layout(self, effect_reports) -> None:  # noqa: ANN001
        report = effect_reports["uniform"]
        rows = condition_rows(report)
        n_pairs = len(report.pairs)
        assert len(rows) == len(report.checkpoints) * (1 + n_pairs)
        for c_idx in range(len(report.checkpoints)):
            block = rows[c_idx * (1 + n_pairs) : (c_idx + 1) * (1 + n_pairs)]
            aggregate, pair_rows = block[0], block[1:]
            assert aggregate["pair_id"] == ""
            assert aggregate["mean_power"] != ""
            assert 0.0 <= float(aggregate["mean_power"]) <= 1.0
            assert 0.0 <= float(aggregate["condorcet_prop"]) <= 1.0
            # Effect conditions never carry false-positive columns.
            assert aggregate["per_pair_fpr"] == ""
            assert aggregate["family_fpr"] == ""
            assert [row["pair_id"] for row in pair_rows] == [
                f"{i}-{j}" for i, j in report.pairs
            ]
            for row in pair_rows:
                assert row["mean_power"] == ""
                assert 0.0 <= float(row["pair_power"]) <= 1.0

    def test_zero_effect_fpr_on_final_aggregate_row(
        self, zero_report
    ) -> None:  # noqa: ANN001
        rows = condition_rows(zero_report)
        fpr_rows = [row for row in rows if row["per_pair_fpr"] != ""]
        assert len(fpr_rows) == 1
        assert fpr_rows[0]["pair_id"] == ""
        assert fpr_rows[0]["checkpoint_t"] == str(zero_report.horizon)
        assert float(fpr_rows[0]["per_pair_fpr"]) == zero_report.per_pair_fpr
        # Winner share is undefined without a Condorcet winner.
        assert all(row["condorcet_prop"] == "" for row in rows)


class TestCsvRoundTrip:
    def test_write_read_write_is_identity(
        self, effect_reports, tmp_path: Path
    ) -> None:  # noqa: ANN001
        report = effect_reports["dts"]
        first = tmp_path / "first.csv"
        second = tmp_path / "second.csv"
        write_condition_csv(report, first)
        rows = read_condition_csv(first)
        write_rows(rows, second)
        assert first.read_bytes() == second.read_bytes()

    def test_unexpected_header_rejected(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ParseError):
            read_condition_csv(path)

    def test_parse_condition_rows(
        self, effect_reports, tmp_path: Path
    ) -> None:  # noqa: ANN001
        report = effect_reports["uniform"]
        path = tmp_path / "cond.csv"
        write_condition_csv(report, path)
        series = parse_condition_rows(read_condition_csv(path))
        assert series.condition_id == "uniform-k3-w0.5"
        assert series.env_key == "k3-w0.5"
        assert series.policy == "uniform"
        assert series.k == 3
        assert [t for t, _ in series.power] == list(report.checkpoints)
        assert [t for t, _ in series.regret] == list(report.checkpoints)
        assert set(series.final_pair_power) == {"0-1", "0-2", "1-2"}
        assert series.per_pair_fpr is None

    def test_parse_requires_rows(self) -> None:
        with pytest.raises(EmptyInput):
            parse_condition_rows([])


class TestSummaryJson:
    def test_schema_and_content(
        self, effect_reports, zero_report, tmp_path: Path
    ) -> None:  # noqa: ANN001
        path = tmp_path / "summary.json"
        write_summary_json(
            [effect_reports["uniform"], zero_report], path
        )
        text = path.read_text()
        assert text.endswith("\n")
        payload = json.loads(text)
        assert payload["schema"] == "duelsim-summary-v1"
        effect_entry, zero_entry = payload["conditions"]
        assert effect_entry["condition_id"] == "uniform-k3-w0.5"
        assert effect_entry["per_pair_fpr"] is None
        assert set(effect_entry["final_pair_power"]) == {"0-1", "0-2", "1-2"}
        assert zero_entry["condorcet_prop_final_mean"] is None
        assert zero_entry["per_pair_fpr"] is not None

    def test_summarize_fields(self, effect_reports) -> None:  # noqa: ANN001
        summary = summarize_report(effect_reports["dts"])
        assert summary["policy"] == "dts"
        assert summary["horizon"] == 120
        assert summary["replications"] == 6
        crossing = summary["power_crossing_t"]
        assert crossing is None or crossing in (30, 60, 90, 120)


class TestManifest:
    def test_digest_stable_and_sensitive(self) -> None:
        base = [_config(), _config(policy="dts")]
        again = [_config(), _config(policy="dts")]
        assert config_digest(base) == config_digest(again)
        changed = {
            "replications": 7,
            "base_seed": 1,
            "alpha_explore": 0.7,
            "horizon_multiplier": 3,
            "significance_alpha": 0.01,
        }
        for field, value in changed.items():
            other = [_config(**{field: value}), _config(policy="dts")]
            assert config_digest(other) != config_digest(base), field

    def test_config_to_dict_covers_every_field(self) -> None:
        data = config_to_dict(_config())
        assert data["policy"] == "uniform"
        assert data["environment"]["type"] == "synthetic"
        assert data["horizon_multiplier"] == 10
        assert data["checkpoints"] == [30, 60, 90, 120]

    def test_manifest_layout(self, tmp_path: Path) -> None:
        configs = [_config(), _config(policy="dts")]
        path = tmp_path / "manifest.json"
        write_manifest(
            configs,
            ["a.csv", "b.csv"],
            "2026-01-01T00:00:00+00:00",
            "2026-01-01T00:05:00+00:00",
            path,
        )
        payload = json.loads(path.read_text())
        assert payload["tool"] == "duelsim"
        assert payload["config_digest"] == config_digest(configs)
        assert payload["conditions"] == [
            {"condition_id": "uniform-k3-w0.5", "file": "a.csv"},
            {"condition_id": "dts-k3-w0.5", "file": "b.csv"},
        ]
        assert len(payload["configs"]) == 2


@pytest.fixture()
def metrics_dir(effect_reports, zero_report, tmp_path: Path) -> Path:  # noqa: ANN001
    for report in (*effect_reports.values(), zero_report):
        write_condition_csv(report, tmp_path / f"{report.condition_id}.csv")
    return tmp_path


class TestGenerateReport:
    def test_csv_series(self, metrics_dir: Path) -> None:
        written = generate_report(metrics_dir, "csv")
        names = {path.name for path in written}
        assert "power_k3-w0.5.csv" in names
        assert "regret_k3-w0.5.csv" in names
        assert "condorcet_k3-w0.5.csv" in names
        assert "fpr.csv" in names
        power = (metrics_dir / "report" / "power_k3-w0.5.csv").read_text()
        lines = power.splitlines()
        assert lines[0] == "checkpoint_t,dts,uniform"
        assert len(lines) == 5  # header + one row per checkpoint
        fpr = (metrics_dir / "report" / "fpr.csv").read_text().splitlines()
        assert fpr[0] == "env,policy,per_pair_fpr,family_fpr"
        assert len(fpr) == 2  # only the zero-effect uniform condition

    def test_json_document(self, metrics_dir: Path) -> None:
        (path,) = generate_report(metrics_dir, "json")
        payload = json.loads(path.read_text())
        assert set(payload) == {"groups", "fpr"}
        group = payload["groups"]["k3-w0.5"]
        assert set(group["power"]) == {"uniform", "dts"}
        assert len(group["power"]["uniform"]) == 4
        assert payload["fpr"][0]["policy"] == "uniform"

    def test_svg_charts(self, metrics_dir: Path) -> None:
        written = generate_report(metrics_dir, "svg")
        names = {path.name for path in written}
        assert {"power_k3-w0.5.svg", "regret_k3-w0.5.svg", "fpr.svg"} <= names

        def polylines(path: Path) -> list[list[tuple[float, float]]]:
            root = ET.fromstring(path.read_text())
            out = []
            for node in root.iter():
                if node.tag.endswith("polyline"):
                    pts = [
                        tuple(float(c) for c in token.split(","))
                        for token in node.attrib["points"].split()
                    ]
                    out.append(pts)
            return out

        power_path = metrics_dir / "report" / "power_k3-w0.5.svg"
        power_lines = polylines(power_path)
        assert len(power_lines) == 2
        for pts in power_lines:
            xs = [x for x, _ in pts]
            assert xs == sorted(xs)
        # The power chart carries the 0.8 target as a dashed rule.
        assert 'stroke-dasharray' in power_path.read_text()

        # Regret accumulates, so pixel y (growing downward) cannot rise.
        for pts in polylines(metrics_dir / "report" / "regret_k3-w0.5.svg"):
            ys = [y for _, y in pts]
            assert all(a >= b - 0.11 for a, b in zip(ys, ys[1:]))

    def test_axis_labels_present(self, metrics_dir: Path) -> None:
        generate_report(metrics_dir, "svg")
        text = (metrics_dir / "report" / "power_k3-w0.5.svg").read_text()
        assert "completed duels" in text

    def test_empty_directory_rejected(self, tmp_path: Path) -> None:
        with pytest.raises(EmptyInput):
            generate_report(tmp_path, "svg")

    def test_unknown_format_rejected(self, metrics_dir: Path) -> None:
        with pytest.raises(ConfigMismatch):
            generate_report(metrics_dir, "pdf")

    def test_checkpoint_mismatch_rejected(
        self, effect_reports, tmp_path: Path
    ) -> None:  # noqa: ANN001
        report = effect_reports["uniform"]
        write_condition_csv(report, tmp_path / "uniform-k3-w0.5.csv")
        doctored = []
        for row in condition_rows(report):
            row = dict(row)
            row["policy"] = "dts"
            row["condition_id"] = "dts-k3-w0.5"
            row["checkpoint_t"] = str(int(row["checkpoint_t"]) * 2)
            doctored.append(row)
        write_rows(doctored, tmp_path / "dts-k3-w0.5.csv")
        with pytest.raises(ConfigMismatch):
            generate_report(tmp_path, "csv")


SMALL_CONFIG = {
    "arms": [3],
    "effects_w": [0.0, 0.5],
    "replications": 4,
    "horizon_multiplier": 2,
    "checkpoint_count": 4,
    "ltr": [
        {"size": 3, "mode": "condorcet", "indices": [3, 5, 8], "multiplier": 1}
    ],
}


def _write_config(tmp_path: Path, payload: dict) -> Path:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload))
    return path


class TestCliPower:
    def test_reference_effect(self, capsys) -> None:  # noqa: ANN001
        assert main(["power", "--effect-w", "0.3"]) == 0
        out = capsys.readouterr().out
        assert "required duels per pair: m = 88" in out
        assert "grid horizon for k=3 at multiplier 10: s = 2640" in out
        assert "grid horizon for k=5 at multiplier 10: s = 8800" in out

    def test_large_effect(self, capsys) -> None:  # noqa: ANN001
        assert main(["power", "--effect-w", "0.5"]) == 0
        assert "m = 32" in capsys.readouterr().out

    def test_zero_effect_is_config_error(self, capsys) -> None:  # noqa: ANN001
        assert main(["power", "--effect-w", "0"]) == 2
        err = capsys.readouterr().err
        assert "effect_w" in err


class TestCliSimulate:
    def test_small_grid(self, tmp_path: Path, capsys) -> None:  # noqa: ANN001
        config = _write_config(tmp_path, SMALL_CONFIG)
        out_dir = tmp_path / "out"
        assert main(
            ["simulate", "--config", str(config), "--out", str(out_dir)]
        ) == 0
        csvs = sorted(path.name for path in out_dir.glob("*.csv"))
        assert csvs == [
            "dts-k3-w0.5.csv",
            "dts-k3-w0.csv",
            "dts-ltr3-condorcet-i3.5.8-x1.csv",
            "uniform-k3-w0.5.csv",
            "uniform-k3-w0.csv",
            "uniform-ltr3-condorcet-i3.5.8-x1.csv",
        ]
        assert (out_dir / "summary.json").exists()
        assert (out_dir / "manifest.json").exists()
        out = capsys.readouterr().out
        assert "wrote summary.json and manifest.json" in out
        summary = json.loads((out_dir / "summary.json").read_text())
        assert len(summary["conditions"]) == 6
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert len(manifest["conditions"]) == 6

    def test_rerun_is_byte_identical(self, tmp_path: Path, capsys) -> None:  # noqa: ANN001
        config = _write_config(tmp_path, SMALL_CONFIG)
        dirs = (tmp_path / "a", tmp_path / "b")
        for out_dir in dirs:
            assert main(
                ["simulate", "--config", str(config), "--out", str(out_dir)]
            ) == 0
        capsys.readouterr()
        for path_a in dirs[0].glob("*.csv"):
            path_b = dirs[1] / path_a.name
            assert path_a.read_bytes() == path_b.read_bytes()
        assert (dirs[0] / "summary.json").read_bytes() == (
            dirs[1] / "summary.json"
        ).read_bytes()
        digests = [
            json.loads((d / "manifest.json").read_text())["config_digest"]
            for d in dirs
        ]
        assert digests[0] == digests[1]

    def test_missing_config_file(self, tmp_path: Path, capsys) -> None:  # noqa: ANN001
        rc = main(
            [
                "simulate",
                "--config",
                str(tmp_path / "nope.json"),
                "--out",
                str(tmp_path / "out"),
            ]
        )
        assert rc == 2
        assert "config file not found" in capsys.readouterr().err

    def test_unknown_field_named(self, tmp_path: Path, capsys) -> None:  # noqa: ANN001
        config = _write_config(tmp_path, {"fraction": 0.5})
        rc = main(
            ["simulate", "--config", str(config), "--out", str(tmp_path / "o")]
        )
        assert rc == 2
        assert "fraction" in capsys.readouterr().err

    def test_invalid_field_value_named(self, tmp_path: Path, capsys) -> None:  # noqa: ANN001
        config = _write_config(tmp_path, {"replications": "many"})
        rc = main(
            ["simulate", "--config", str(config), "--out", str(tmp_path / "o")]
        )
        assert rc == 2
        assert "replications" in capsys.readouterr().err

    def test_invalid_json(self, tmp_path: Path, capsys) -> None:  # noqa: ANN001
        config = tmp_path / "config.json"
        config.write_text("{not json")
        rc = main(
            ["simulate", "--config", str(config), "--out", str(tmp_path / "o")]
        )
        assert rc == 2
        assert "JSON" in capsys.readouterr().err

    def test_no_conditions(self, tmp_path: Path, capsys) -> None:  # noqa: ANN001
        config = _write_config(tmp_path, {"arms": []})
        rc = main(
            ["simulate", "--config", str(config), "--out", str(tmp_path / "o")]
        )
        assert rc == 2
        assert "no conditions" in capsys.readouterr().err


class TestCliLtrSample:
    def test_condorcet_sample(self, capsys) -> None:  # noqa: ANN001
        rc = main(
            [
                "ltr-sample",
                "--matrix",
                str(bundled_matrix_path()),
                "--size",
                "3",
                "--mode",
                "condorcet",
            ]
        )
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["mode"] == "condorcet"
        assert payload["has_condorcet"] is True
        assert payload["participants_per_pair"] == 785
        assert payload["horizon_at_multiplier_1"] == 2355
        assert payload["reference_ranker"] in payload["indices"]

    def test_hyphenated_mode_finds_the_cycle(self, capsys) -> None:  # noqa: ANN001
        rc = main(
            [
                "ltr-sample",
                "--matrix",
                str(bundled_matrix_path()),
                "--size",
                "3",
                "--mode",
                "non-condorcet",
                "--seed",
                "7",
            ]
        )
        assert rc == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["mode"] == "non_condorcet"
        assert payload["has_condorcet"] is False
        # Only one ranker triple lacks a Condorcet winner.
        assert payload["indices"] == [0, 1, 2]
        assert payload["min_effect_w"] == pytest.approx(0.4)

    def test_missing_matrix_file(self, tmp_path: Path, capsys) -> None:  # noqa: ANN001
        rc = main(
            [
                "ltr-sample",
                "--matrix",
                str(tmp_path / "absent.csv"),
                "--size",
                "3",
            ]
        )
        assert rc == 2
        assert capsys.readouterr().err != ""


class TestCliReport:
    def test_empty_metrics_dir(self, tmp_path: Path, capsys) -> None:  # noqa: ANN001
        rc = main(["report", "--in", str(tmp_path), "--format", "svg"])
        assert rc == 2
        assert capsys.readouterr().err != ""

    def test_full_chain(self, tmp_path: Path, capsys) -> None:  # noqa: ANN001
        config = _write_config(tmp_path, SMALL_CONFIG)
        out_dir = tmp_path / "out"
        assert main(
            ["simulate", "--config", str(config), "--out", str(out_dir)]
        ) == 0
        for fmt in ("csv", "json", "svg"):
            assert main(["report", "--in", str(out_dir), "--format", fmt]) == 0
            out = capsys.readouterr().out
            assert "wrote" in out
        report_dir = out_dir / "report"
        assert (report_dir / "report.json").exists()
        assert list(report_dir.glob("power_*.svg"))
        assert (report_dir / "fpr.svg").exists()

    def test_format_is_validated_by_the_parser(self, tmp_path: Path) -> None:
        with pytest.raises(SystemExit) as exc:
            main(["report", "--in", str(tmp_path), "--format", "pdf"])
        assert exc.value.code == 2
