"""Command-line entry points.

Exit codes: 0 on success, 2 for configuration problems (bad flags,
malformed or contradictory config, missing input files), 3 for failures
at run time.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .engine import (
    DEFAULT_ARMS,
    DEFAULT_BASE_SEED,
    DEFAULT_CHECKPOINT_COUNT,
    DEFAULT_EFFECTS_W,
    DEFAULT_HORIZON_MULTIPLIER,
    DEFAULT_REPLICATIONS,
    LtrEnvironment,
    POLICIES,
    build_condition_grid,
    build_ltr_config,
    run_condition,
)
from .errors import (
    AttemptsExhausted,
    ComplementViolation,
    ConfigMismatch,
    DomainError,
    DuelSimError,
    EmptyInput,
    ModeMismatch,
    ParseError,
    RangeError,
    ShapeError,
    SizeMismatch,
)
from .ltr import (
    MODE_ANY,
    MODES,
    SubmatrixSpec,
    bundled_matrix_path,
    load_matrix,
    ltr_condition,
    sample_submatrix,
)
from .policies import ALPHA_EXPLORE
from .report import (
    generate_report,
    write_condition_csv,
    write_manifest,
    write_summary_json,
)
from .stats import PowerSpec, horizon_for_condition, required_sample_size

_CONFIG_ERRORS = (
    RangeError,
    DomainError,
    ConfigMismatch,
    ParseError,
    SizeMismatch,
    ModeMismatch,
    ShapeError,
    ComplementViolation,
    EmptyInput,
)

_GRID_KEYS = {
    "base_seed",
    "replications",
    "arms",
    "effects_w",
    "policies",
    "horizon_multiplier",
    "checkpoint_count",
    "alpha_explore",
    "significance_alpha",
    "ltr",
}
_LTR_KEYS = {"matrix", "size", "mode", "indices", "multiplier"}


def _normalize_mode(value: str) -> str:
    """Map the hyphenated command-line spelling to the internal token."""
    return str(value).replace("-", "_")


def _field(raw: dict, key: str, default, conv):
    """Fetch and convert one config field, naming it on failure."""
    if key not in raw or raw[key] is None:
        return default
    try:
        return conv(raw[key])
    except (TypeError, ValueError) as exc:
        raise ConfigMismatch(f"invalid value for {key!r}: {raw[key]!r}") from exc


def _load_simulate_configs(
    config_path: str, seed_override: int | None, replications_override: int | None
):
    try:
        raw = json.loads(Path(config_path).read_text())
    except FileNotFoundError:
        raise ParseError(f"config file not found: {config_path}")
    except json.JSONDecodeError as exc:
        raise ParseError(f"config is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ParseError("config must be a JSON object")
    unknown = set(raw) - _GRID_KEYS
    if unknown:
        raise ConfigMismatch(f"unknown config field(s): {sorted(unknown)}")
    base_seed = (
        seed_override
        if seed_override is not None
        else _field(raw, "base_seed", DEFAULT_BASE_SEED, int)
    )
    replications = (
        replications_override
        if replications_override is not None
        else _field(raw, "replications", DEFAULT_REPLICATIONS, int)
    )
    arms = _field(raw, "arms", DEFAULT_ARMS, lambda v: tuple(int(x) for x in v))
    effects_w = _field(
        raw, "effects_w", DEFAULT_EFFECTS_W, lambda v: tuple(float(x) for x in v)
    )
    policies = _field(
        raw, "policies", POLICIES, lambda v: tuple(str(x) for x in v)
    )
    horizon_multiplier = _field(
        raw, "horizon_multiplier", DEFAULT_HORIZON_MULTIPLIER, int
    )
    checkpoint_count = _field(
        raw, "checkpoint_count", DEFAULT_CHECKPOINT_COUNT, int
    )
    alpha_explore = _field(raw, "alpha_explore", ALPHA_EXPLORE, float)
    significance_alpha = _field(raw, "significance_alpha", 0.05, float)
    configs = []
    if arms and effects_w and policies:
        configs.extend(
            build_condition_grid(
                base_seed=base_seed,
                replications=replications,
                arms=arms,
                effects_w=effects_w,
                policies=policies,
                horizon_multiplier=horizon_multiplier,
                checkpoint_count=checkpoint_count,
                alpha_explore=alpha_explore,
                significance_alpha=significance_alpha,
            )
        )
    for block_idx, block in enumerate(_field(raw, "ltr", [], list)):
        if not isinstance(block, dict):
            raise ConfigMismatch(f"ltr entry {block_idx} must be an object")
        unknown = set(block) - _LTR_KEYS
        if unknown:
            raise ConfigMismatch(
                f"unknown field(s) in ltr entry {block_idx}: {sorted(unknown)}"
            )
        if "size" not in block:
            raise ConfigMismatch(f"ltr entry {block_idx} needs 'size'")
        matrix = block.get("matrix") or "bundled"
        matrix_path = (
            str(bundled_matrix_path()) if matrix == "bundled" else str(matrix)
        )
        indices = block.get("indices")
        for policy in policies:
            configs.append(
                build_ltr_config(
                    matrix_path=matrix_path,
                    size=_field(block, "size", None, int),
                    policy=policy,
                    mode=_field(block, "mode", MODE_ANY, _normalize_mode),
                    indices=tuple(int(i) for i in indices) if indices else None,
                    multiplier=_field(block, "multiplier", 1, int),
                    base_seed=base_seed,
                    replications=replications,
                    checkpoint_count=checkpoint_count,
                    alpha_explore=alpha_explore,
                    significance_alpha=significance_alpha,
                )
            )
    if not configs:
        raise EmptyInput("config produces no conditions")
    return configs


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _cmd_simulate(args: argparse.Namespace) -> int:
    configs = _load_simulate_configs(args.config, args.seed, args.replications)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = _utc_now()
    base_cache: dict[str, object] = {}
    reports = []
    files = []
    for config in configs:
        env = config.environment
        base = None
        if isinstance(env, LtrEnvironment):
            if env.matrix_path not in base_cache:
                base_cache[env.matrix_path] = load_matrix(env.matrix_path)
            base = base_cache[env.matrix_path]
        report = run_condition(config, base_matrix=base, workers=args.workers)
        name = f"{config.condition_id}.csv"
        write_condition_csv(report, out_dir / name)
        reports.append(report)
        files.append(name)
        print(
            f"{config.condition_id}: R={report.replications} "
            f"horizon={report.horizon} -> {name}"
        )
    write_summary_json(reports, out_dir / "summary.json")
    write_manifest(configs, files, started, _utc_now(), out_dir / "manifest.json")
    print(f"wrote summary.json and manifest.json in {out_dir}")
    return 0


def _cmd_power(args: argparse.Namespace) -> int:
    spec = PowerSpec(
        effect_w=args.effect_w, target_power=args.power, alpha=args.alpha
    )
    m = required_sample_size(spec)
    print(
        f"effect_w={spec.effect_w:g} target_power={spec.target_power:g} "
        f"alpha={spec.alpha:g}"
    )
    print(f"required duels per pair: m = {m}")
    for k in (3, 5):
        n_pairs = k * (k - 1) // 2
        horizon = horizon_for_condition(m, n_pairs, DEFAULT_HORIZON_MULTIPLIER)
        print(
            f"grid horizon for k={k} at multiplier "
            f"{DEFAULT_HORIZON_MULTIPLIER}: s = {horizon}"
        )
    return 0


def _cmd_ltr_sample(args: argparse.Namespace) -> int:
    matrix = load_matrix(args.matrix)
    mode = _normalize_mode(args.mode)
    spec = SubmatrixSpec(size=args.size, mode=mode)
    rng = np.random.default_rng(args.seed)
    indices, sub = sample_submatrix(matrix, spec, rng)
    plan = ltr_condition(sub, multiplier=1)
    payload = {
        "indices": list(indices),
        "mode": mode,
        "has_condorcet": plan.has_condorcet,
        "reference_ranker": indices[plan.reference_arm],
        "pair_effects_w": {
            f"{indices[i]}-{indices[j]}": round(w, 6)
            for (i, j), w in sorted(plan.pair_effects.items())
        },
        "min_effect_w": round(plan.min_effect_w, 6),
        "participants_per_pair": plan.participants_per_pair,
        "horizon_at_multiplier_1": plan.horizon,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    written = generate_report(Path(args.in_dir), args.format)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="duelsim",
        description=(
            "Simulate adaptive and uniform duel assignment and report "
            "power, false-positive, and regret metrics."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run conditions from a JSON config")
    sim.add_argument("--config", required=True, help="JSON config file")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--seed", type=int, default=None, help="override base_seed")
    sim.add_argument(
        "--replications", type=int, default=None, help="override replications"
    )
    sim.add_argument(
        "--workers",
        type=int,
        default=None,
        help="worker processes (default: DUELSIM_WORKERS or 1)",
    )
    sim.set_defaults(func=_cmd_simulate)

    power = sub.add_parser(
        "power", help="per-pair sample size for a target power"
    )
    power.add_argument("--effect-w", dest="effect_w", type=float, required=True)
    power.add_argument("--power", type=float, default=0.8)
    power.add_argument("--alpha", type=float, default=0.05)
    power.set_defaults(func=_cmd_power)

    ltr = sub.add_parser(
        "ltr-sample", help="sample an arm subset from a ranker matrix"
    )
    ltr.add_argument("--matrix", required=True, help="ranker matrix CSV")
    ltr.add_argument("--size", type=int, choices=(3, 5), required=True)
    ltr.add_argument(
        "--mode",
        choices=tuple(mode.replace("_", "-") for mode in MODES),
        default=MODE_ANY,
    )
    ltr.add_argument("--seed", type=int, default=0)
    ltr.set_defaults(func=_cmd_ltr_sample)

    rep = sub.add_parser("report", help="build figures from simulate output")
    rep.add_argument("--in", dest="in_dir", required=True)
    rep.add_argument("--format", choices=("csv", "json", "svg"), required=True)
    rep.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc}", file=sys.stderr)
        return 2
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AttemptsExhausted, DuelSimError, OSError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
