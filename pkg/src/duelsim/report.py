"""Result serialization: per-condition CSV, summary and manifest JSON,
and the figure generator behind the ``report`` command.

The condition CSV interleaves one aggregate row per checkpoint with one
row per pair, sharing a single fixed column set; cells that do not apply
to a row kind stay empty.  Values are written with shortest round-trip
float formatting and read back as strings, so a read/write cycle
reproduces the file byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .engine import AggregateReport, ExperimentConfig, LtrEnvironment, SyntheticEnvironment
from .errors import ConfigMismatch, EmptyInput, ParseError

SCHEMA_COLUMNS = (
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

POWER_THRESHOLD = 0.8

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")


def _write_text_atomic(path: Path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a
    half-written file."""
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _fmt(value: float | int | None) -> str:
    """Shortest round-trip cell text; None and NaN become empty cells."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return ""
    return repr(value)


def condition_rows(report: AggregateReport) -> list[dict[str, str]]:
    """Flatten an aggregate report into schema rows.

    Per checkpoint: one aggregate row (empty ``pair_id``) carrying mean
    power, mean regret, winner share, and, on the final checkpoint of
    zero-effect conditions, the false-positive rates; then one row per
    pair carrying only that pair's detection rate.
    """
    rows = []
    final_idx = len(report.checkpoints) - 1
    for idx, t in enumerate(report.checkpoints):
        base = {
            "condition_id": report.condition_id,
            "policy": report.policy,
            "k": str(report.k),
            "effect_w": _fmt(report.effect_w),
            "checkpoint_t": str(t),
        }
        is_final = idx == final_idx
        rows.append(
            base
            | {
                "mean_power": _fmt(float(report.mean_power[idx])),
                "pair_id": "",
                "pair_power": "",
                "mean_cum_regret": _fmt(float(report.mean_cum_regret[idx])),
                "condorcet_prop": _fmt(float(report.condorcet_prop_mean[idx])),
                "per_pair_fpr": _fmt(report.per_pair_fpr) if is_final else "",
                "family_fpr": _fmt(report.family_fpr) if is_final else "",
            }
        )
        for pidx, (i, j) in enumerate(report.pairs):
            rows.append(
                base
                | {
                    "mean_power": "",
                    "pair_id": f"{i}-{j}",
                    "pair_power": _fmt(float(report.pair_power[idx, pidx])),
                    "mean_cum_regret": "",
                    "condorcet_prop": "",
                    "per_pair_fpr": "",
                    "family_fpr": "",
                }
            )
    return rows


def write_rows(rows: Sequence[dict[str, str]], path: Path) -> None:
    """Write schema rows as CSV with a fixed header and LF line ends."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=SCHEMA_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _write_text_atomic(path, buffer.getvalue())


def write_condition_csv(report: AggregateReport, path: Path) -> None:
    """Serialize one condition's aggregate report to ``path``."""
    write_rows(condition_rows(report), Path(path))


def read_condition_csv(path: Path) -> list[dict[str, str]]:
    """Read schema rows back, values untouched as strings.

    Raises:
        ParseError: If the header is not exactly the schema columns.
    """
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != list(SCHEMA_COLUMNS):
            raise ParseError(f"{path}: unexpected columns {reader.fieldnames}")
        return list(reader)


def summarize_report(report: AggregateReport) -> dict:
    """Final-checkpoint summary of one condition, JSON-ready."""
    final_prop = report.condorcet_prop[:, -1]
    defined = final_prop[~np.isnan(final_prop)]
    return {
        "condition_id": report.condition_id,
        "policy": report.policy,
        "k": report.k,
        "effect_w": report.effect_w,
        "horizon": report.horizon,
        "replications": report.replications,
        "final_mean_power": float(report.mean_power[-1]),
        "final_pair_power": {
            f"{i}-{j}": float(report.pair_power[-1, idx])
            for idx, (i, j) in enumerate(report.pairs)
        },
        "power_crossing_t": report.first_checkpoint_at_power(POWER_THRESHOLD),
        "final_mean_cum_regret": float(report.mean_cum_regret[-1]),
        "condorcet_prop_final_mean": (
            float(defined.mean()) if defined.size else None
        ),
        "condorcet_prop_final_median": (
            float(np.median(defined)) if defined.size else None
        ),
        "per_pair_fpr": report.per_pair_fpr,
        "family_fpr": report.family_fpr,
    }


def write_summary_json(reports: Sequence[AggregateReport], path: Path) -> None:
    """Write the cross-condition summary; deterministic key order."""
    payload = {
        "schema": "duelsim-summary-v1",
        "conditions": [summarize_report(report) for report in reports],
    }
    _write_text_atomic(Path(path), json.dumps(payload, indent=2, sort_keys=True) + "\n")


def config_to_dict(config: ExperimentConfig) -> dict:
    """Plain-data form of a config, stable across processes."""
    env = config.environment
    if isinstance(env, SyntheticEnvironment):
        env_dict = {"type": "synthetic"} | asdict(env)
    else:
        env_dict = {"type": "ltr"} | asdict(env)
        if env_dict["indices"] is not None:
            env_dict["indices"] = list(env_dict["indices"])
    return {
        "policy": config.policy,
        "environment": env_dict,
        "horizon": config.horizon,
        "replications": config.replications,
        "checkpoints": list(config.checkpoints),
        "base_seed": config.base_seed,
        "alpha_explore": config.alpha_explore,
        "significance_alpha": config.significance_alpha,
        "horizon_multiplier": config.horizon_multiplier,
    }


def config_digest(configs: Sequence[ExperimentConfig]) -> str:
    """Hex digest identifying a resolved set of conditions.

    Depends only on the configs themselves, so reruns of the same
    experiment produce the same digest regardless of when or where.
    """
    canonical = json.dumps(
        [config_to_dict(config) for config in configs],
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_manifest(
    configs: Sequence[ExperimentConfig],
    files: Sequence[str],
    started: str,
    finished: str,
    path: Path,
) -> None:
    """Record what was run, when, and where the outputs live."""
    from . import __version__

    payload = {
        "tool": "duelsim",
        "version": __version__,
        "config_digest": config_digest(configs),
        "started": started,
        "finished": finished,
        "conditions": [
            {"condition_id": config.condition_id, "file": name}
            for config, name in zip(configs, files)
        ],
        "configs": [config_to_dict(config) for config in configs],
    }
    _write_text_atomic(Path(path), json.dumps(payload, indent=2, sort_keys=True) + "\n")


@dataclass(frozen=True)
class ConditionSeries:
    """Checkpoint series parsed back from one condition CSV."""

    condition_id: str
    policy: str
    env_key: str
    k: int
    effect_w: str
    power: list[tuple[int, float]]
    regret: list[tuple[int, float]]
    condorcet: list[tuple[int, float]]
    final_pair_power: dict[str, float]
    per_pair_fpr: float | None
    family_fpr: float | None


def parse_condition_rows(rows: Sequence[dict[str, str]]) -> ConditionSeries:
    """Rebuild checkpoint series from schema rows.

    Raises:
        EmptyInput: If there are no rows.
    """
    if not rows:
        raise EmptyInput("condition file has no rows")
    head = rows[0]
    condition_id = head["condition_id"]
    policy = head["policy"]
    env_key = condition_id.removeprefix(policy + "-")
    power: list[tuple[int, float]] = []
    regret: list[tuple[int, float]] = []
    condorcet: list[tuple[int, float]] = []
    final_pair_power: dict[str, float] = {}
    per_pair_fpr = None
    family_fpr = None
    last_t = max(int(row["checkpoint_t"]) for row in rows)
    for row in rows:
        t = int(row["checkpoint_t"])
        if row["pair_id"]:
            if t == last_t and row["pair_power"]:
                final_pair_power[row["pair_id"]] = float(row["pair_power"])
            continue
        if row["mean_power"]:
            power.append((t, float(row["mean_power"])))
        if row["mean_cum_regret"]:
            regret.append((t, float(row["mean_cum_regret"])))
        if row["condorcet_prop"]:
            condorcet.append((t, float(row["condorcet_prop"])))
        if row["per_pair_fpr"]:
            per_pair_fpr = float(row["per_pair_fpr"])
        if row["family_fpr"]:
            family_fpr = float(row["family_fpr"])
    return ConditionSeries(
        condition_id=condition_id,
        policy=policy,
        env_key=env_key,
        k=int(head["k"]),
        effect_w=head["effect_w"],
        power=power,
        regret=regret,
        condorcet=condorcet,
        final_pair_power=final_pair_power,
        per_pair_fpr=per_pair_fpr,
        family_fpr=family_fpr,
    )


def _scale(points: list[tuple[float, float]], x0, x1, y0, y1, box) -> list[tuple[float, float]]:
    left, top, width, height = box
    span_x = (x1 - x0) or 1.0
    span_y = (y1 - y0) or 1.0
    return [
        (
            left + (x - x0) / span_x * width,
            top + height - (y - y0) / span_y * height,
        )
        for x, y in points
    ]


def _svg_header(width: int, height: int, title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}" '
        f'font-family="sans-serif">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" '
        f'font-size="15">{escape(title)}</text>',
    ]


def _svg_axes(
    box, x0, x1, y0, y1, xlabel: str, ylabel: str, parts: list[str]
) -> None:
    left, top, width, height = box
    bottom = top + height
    right = left + width
    parts.append(
        f'<path d="M {left} {top} L {left} {bottom} L {right} {bottom}" '
        f'fill="none" stroke="black"/>'
    )
    for i in range(6):
        frac = i / 5
        x = left + frac * width
        y = bottom - frac * height
        xv = x0 + frac * (x1 - x0)
        yv = y0 + frac * (y1 - y0)
        parts.append(
            f'<line x1="{x:.1f}" y1="{bottom}" x2="{x:.1f}" y2="{bottom + 4}" '
            f'stroke="black"/>'
        )
        parts.append(
            f'<text x="{x:.1f}" y="{bottom + 17}" text-anchor="middle" '
            f'font-size="10">{xv:g}</text>'
        )
        parts.append(
            f'<line x1="{left - 4}" y1="{y:.1f}" x2="{left}" y2="{y:.1f}" '
            f'stroke="black"/>'
        )
        parts.append(
            f'<text x="{left - 7}" y="{y + 3:.1f}" text-anchor="end" '
            f'font-size="10">{yv:g}</text>'
        )
    parts.append(
        f'<text x="{left + width / 2:.1f}" y="{bottom + 34}" '
        f'text-anchor="middle" font-size="12">{escape(xlabel)}</text>'
    )
    parts.append(
        f'<text x="16" y="{top + height / 2:.1f}" text-anchor="middle" '
        f'font-size="12" transform="rotate(-90 16 {top + height / 2:.1f})">'
        f"{escape(ylabel)}</text>"
    )


def svg_line_chart(
    title: str,
    xlabel: str,
    ylabel: str,
    series: dict[str, list[tuple[float, float]]],
    width: int = 640,
    height: int = 400,
    y_top: float | None = None,
    hline: tuple[float, str] | None = None,
) -> str:
    """Render line series as a standalone SVG string."""
    box = (70.0, 40.0, width - 95.0, height - 95.0)
    xs = [x for pts in series.values() for x, _ in pts] or [0.0, 1.0]
    ys = [y for pts in series.values() for _, y in pts] or [0.0, 1.0]
    x0, x1 = 0.0, max(xs)
    y0 = min(0.0, min(ys))
    y1 = y_top if y_top is not None else max(max(ys), hline[0] if hline else 0.0)
    if y1 <= y0:
        y1 = y0 + 1.0
    parts = _svg_header(width, height, title)
    _svg_axes(box, x0, x1, y0, y1, xlabel, ylabel, parts)
    if hline is not None:
        (pt,) = _scale([(x0, hline[0])], x0, x1, y0, y1, box)
        parts.append(
            f'<line x1="{box[0]}" y1="{pt[1]:.1f}" x2="{box[0] + box[2]}" '
            f'y2="{pt[1]:.1f}" stroke="#888" stroke-dasharray="5,4"/>'
        )
        parts.append(
            f'<text x="{box[0] + box[2]:.1f}" y="{pt[1] - 4:.1f}" '
            f'text-anchor="end" font-size="10" fill="#555">'
            f"{escape(hline[1])}</text>"
        )
    for idx, (label, points) in enumerate(series.items()):
        color = _COLORS[idx % len(_COLORS)]
        scaled = _scale(points, x0, x1, y0, y1, box)
        path = " ".join(f"{x:.1f},{y:.1f}" for x, y in scaled)
        parts.append(
            f'<polyline points="{path}" fill="none" stroke="{color}" '
            f'stroke-width="1.8"/>'
        )
        ly = 40 + 16 * idx
        lx = box[0] + box[2] - 110
        parts.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" '
            f'stroke="{color}" stroke-width="1.8"/>'
        )
        parts.append(
            f'<text x="{lx + 27}" y="{ly + 4}" font-size="11">'
            f"{escape(label)}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_bar_chart(
    title: str,
    ylabel: str,
    groups: list[str],
    series: dict[str, list[float]],
    width: int = 640,
    height: int = 400,
    hline: tuple[float, str] | None = None,
) -> str:
    """Render grouped bars as a standalone SVG string."""
    box = (70.0, 40.0, width - 95.0, height - 95.0)
    values = [v for vals in series.values() for v in vals] or [1.0]
    y0 = 0.0
    y1 = max(max(values), hline[0] if hline else 0.0) * 1.15 or 1.0
    parts = _svg_header(width, height, title)
    _svg_axes(box, 0.0, 1.0, y0, y1, "", ylabel, parts)
    left, top, bwidth, bheight = box
    bottom = top + bheight
    n_groups = len(groups)
    n_series = max(len(series), 1)
    slot = bwidth / max(n_groups, 1)
    bar = slot * 0.7 / n_series
    for g_idx, group in enumerate(groups):
        for s_idx, (label, vals) in enumerate(series.items()):
            value = vals[g_idx]
            h = (value - y0) / (y1 - y0) * bheight
            x = left + g_idx * slot + slot * 0.15 + s_idx * bar
            color = _COLORS[s_idx % len(_COLORS)]
            parts.append(
                f'<rect x="{x:.1f}" y="{bottom - h:.1f}" width="{bar:.1f}" '
                f'height="{h:.1f}" fill="{color}"/>'
            )
        parts.append(
            f'<text x="{left + g_idx * slot + slot / 2:.1f}" '
            f'y="{bottom + 17}" text-anchor="middle" font-size="10">'
            f"{escape(group)}</text>"
        )
    if hline is not None:
        y = bottom - (hline[0] - y0) / (y1 - y0) * bheight
        parts.append(
            f'<line x1="{left}" y1="{y:.1f}" x2="{left + bwidth}" '
            f'y2="{y:.1f}" stroke="#888" stroke-dasharray="5,4"/>'
        )
        parts.append(
            f'<text x="{left + bwidth:.1f}" y="{y - 4:.1f}" text-anchor="end" '
            f'font-size="10" fill="#555">{escape(hline[1])}</text>'
        )
    for s_idx, label in enumerate(series):
        color = _COLORS[s_idx % len(_COLORS)]
        ly = 40 + 16 * s_idx
        lx = left + bwidth - 110
        parts.append(
            f'<rect x="{lx}" y="{ly - 8}" width="12" height="10" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{lx + 17}" y="{ly + 1}" font-size="11">'
            f"{escape(label)}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


_FIGURE_METRICS = (
    ("power", "mean detection rate", "power"),
    ("regret", "mean cumulative strong regret", "regret"),
    ("condorcet", "mean share of duels with the winner", "condorcet"),
)


def generate_report(in_dir: Path, fmt: str) -> list[Path]:
    """Build figure files from the condition CSVs in ``in_dir``.

    Conditions sharing an environment are grouped so each figure
    overlays the policies.  Output lands in ``in_dir / "report"``:
    per-group series files (``csv``), one combined document (``json``),
    or one chart per group and metric plus a false-positive bar chart
    (``svg``).

    Returns:
        The written paths.

    Raises:
        EmptyInput: If ``in_dir`` holds no condition CSVs.
        ConfigMismatch: If grouped conditions disagree on checkpoints.
    """
    in_dir = Path(in_dir)
    files = sorted(
        path
        for path in in_dir.glob("*.csv")
        if path.name not in ("summary.csv",)
    )
    conditions = [parse_condition_rows(read_condition_csv(path)) for path in files]
    if not conditions:
        raise EmptyInput(f"no condition CSV files in {in_dir}")
    out_dir = in_dir / "report"
    out_dir.mkdir(exist_ok=True)
    groups: dict[str, list[ConditionSeries]] = {}
    for condition in conditions:
        groups.setdefault(condition.env_key, []).append(condition)
    for members in groups.values():
        members.sort(key=lambda c: c.policy)
    written: list[Path] = []

    def series_for(members: list[ConditionSeries], attr: str):
        data = {m.policy: getattr(m, attr) for m in members}
        return {k: v for k, v in data.items() if v}

    fpr_rows = [
        (m.env_key, m.policy, m.per_pair_fpr, m.family_fpr)
        for members in groups.values()
        for m in members
        if m.per_pair_fpr is not None
    ]

    if fmt == "csv":
        for env_key, members in sorted(groups.items()):
            for attr, _, stem in _FIGURE_METRICS:
                data = series_for(members, attr)
                if not data:
                    continue
                ts = [pt[0] for pt in next(iter(data.values()))]
                for pts in data.values():
                    if [pt[0] for pt in pts] != ts:
                        raise ConfigMismatch(
                            f"checkpoint mismatch in group {env_key}"
                        )
                path = out_dir / f"{stem}_{env_key}.csv"
                buffer = io.StringIO()
                writer = csv.writer(buffer, lineterminator="\n")
                writer.writerow(["checkpoint_t", *data.keys()])
                for row_idx, t in enumerate(ts):
                    writer.writerow(
                        [t, *(repr(pts[row_idx][1]) for pts in data.values())]
                    )
                _write_text_atomic(path, buffer.getvalue())
                written.append(path)
        if fpr_rows:
            path = out_dir / "fpr.csv"
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(["env", "policy", "per_pair_fpr", "family_fpr"])
            for row in sorted(fpr_rows):
                writer.writerow(row)
            _write_text_atomic(path, buffer.getvalue())
            written.append(path)
        return written

    if fmt == "json":
        payload = {
            "groups": {
                env_key: {
                    attr: series_for(members, attr)
                    for attr, _, _ in _FIGURE_METRICS
                }
                | {
                    "final_pair_power": {
                        m.policy: m.final_pair_power for m in members
                    }
                }
                for env_key, members in sorted(groups.items())
            },
            "fpr": [
                {
                    "env": env,
                    "policy": policy,
                    "per_pair_fpr": per_pair,
                    "family_fpr": family,
                }
                for env, policy, per_pair, family in sorted(fpr_rows)
            ],
        }
        path = out_dir / "report.json"
        _write_text_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return [path]

    if fmt == "svg":
        for env_key, members in sorted(groups.items()):
            for attr, ylabel, stem in _FIGURE_METRICS:
                data = series_for(members, attr)
                if not data:
                    continue
                y_top = 1.0 if attr in ("power", "condorcet") else None
                hline = (
                    (POWER_THRESHOLD, f"target {POWER_THRESHOLD:g}")
                    if attr == "power"
                    else None
                )
                path = out_dir / f"{stem}_{env_key}.svg"
                _write_text_atomic(
                    path,
                    svg_line_chart(
                        f"{stem} over time ({env_key})",
                        "completed duels",
                        ylabel,
                        data,
                        y_top=y_top,
                        hline=hline,
                    ),
                )
                written.append(path)
        if fpr_rows:
            envs = sorted({env for env, _, _, _ in fpr_rows})
            policies = sorted({policy for _, policy, _, _ in fpr_rows})
            series = {
                policy: [
                    next(
                        pp
                        for env2, pol2, pp, _ in fpr_rows
                        if env2 == env and pol2 == policy
                    )
                    for env in envs
                ]
                for policy in policies
            }
            path = out_dir / "fpr.svg"
            _write_text_atomic(
                path,
                svg_bar_chart(
                    "per-pair false-positive rate",
                    "rate",
                    envs,
                    series,
                    hline=(0.05, "level 0.05"),
                ),
            )
            written.append(path)
        return written

    raise ConfigMismatch(f"unknown report format {fmt!r}")
