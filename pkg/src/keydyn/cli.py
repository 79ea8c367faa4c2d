"""Command-line pipeline driver.

An experiment lives in one directory: config.json at the root, raw
session CSVs under data/, per-session feature CSVs under features/, and
matrices plus the summary under reports/. Subcommands advance the
pipeline one stage at a time; report re-runs the analysis stages it
needs. Every output is a pure function of the config file and the seed.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dataset, features, stats, verify
from .config import CONFIG_NAME, ExperimentConfig
from .keyboard import KEYBOARD_KINDS
from .profiles import instantiate_profiles


def _experiment_dirs(out):
    out = Path(out)
    return out, out / "data", out / "features", out / "reports"


def _load_config(args) -> ExperimentConfig:
    out = Path(args.out)
    if getattr(args, "config", None):
        cfg = ExperimentConfig.load(args.config)
    elif (out / CONFIG_NAME).exists():
        cfg = ExperimentConfig.load(out / CONFIG_NAME)
    else:
        cfg = ExperimentConfig()
    overrides = {}
    for name in ("seed", "n_chars", "sessions_per_keyboard", "nu", "threshold"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "transform", None) is not None:
        overrides["ocsvm_transform"] = args.transform
    if getattr(args, "cv", None) is not None:
        overrides["rf_cv"] = args.cv
    return cfg.replace(**overrides) if overrides else cfg


def cmd_init(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = ExperimentConfig()
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    path = cfg.save(out / CONFIG_NAME)
    print(path)
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    _, data_dir, _, _ = _experiment_dirs(args.out)
    ranges = cfg.ranges
    if args.users is not None:
        if not 1 <= args.users <= len(ranges):
            raise ValueError(f"--users must be in 1..{len(ranges)}")
        ranges = ranges[: args.users]
    profiles = instantiate_profiles(ranges, cfg.seed)
    manifest = dataset.generate_grid(
        profiles, data_dir,
        sessions_per_keyboard=cfg.sessions_per_keyboard,
        n_chars=cfg.n_chars,
        seed=cfg.seed,
    )
    print(data_dir / dataset.MANIFEST_NAME)
    print(f"{len(manifest['sessions'])} session files")
    return 0


def cmd_extract(args) -> int:
    _, data_dir, feat_dir, _ = _experiment_dirs(args.out)
    manifest = dataset.load_manifest(data_dir)
    feat_dir.mkdir(parents=True, exist_ok=True)
    for entry in manifest["sessions"]:
        session = dataset.read_session(data_dir / entry["path"])
        strokes = features.pair_events(session.events)
        windows = features.extract_windows(strokes)
        name = features.feature_filename(
            entry["agent_id"], entry["keyboard"], entry["session"]
        )
        features.write_features(feat_dir / name, windows)
    print(f"{len(manifest['sessions'])} feature files in {feat_dir}")
    return 0


def _load_grid(args):
    _, data_dir, feat_dir, reports_dir = _experiment_dirs(args.out)
    manifest = dataset.load_manifest(data_dir)
    grid = features.load_grid_features(manifest, feat_dir)
    reports_dir.mkdir(parents=True, exist_ok=True)
    return manifest, grid, reports_dir


def _keyboards(args, manifest):
    if getattr(args, "keyboard", None):
        return [args.keyboard]
    return list(manifest["keyboards"])


def run_ks(cfg, manifest, grid, reports_dir, keyboards) -> dict:
    summary = {}
    for kind in keyboards:
        matrix = stats.ks_matrix(grid, kind)
        stats.write_ks_matrix_csv(reports_dir / f"ks_{kind}.csv", matrix)
        stats.write_ks_matrix_json(reports_dir / f"ks_{kind}.json", matrix)
        n = len(matrix.agent_ids)
        diag_ok = sum(
            1 for i in range(n)
            if int(np.sum(matrix.p_values[i, i] > 0.05)) >= 3
        )
        cross = [
            int(np.sum(matrix.p_values[i, j] < 0.05)) >= 3
            for i in range(n) for j in range(n) if i != j
        ]
        summary[kind] = {
            "diagonal_agents_matching": diag_ok,
            "cross_cells_separated": int(sum(cross)),
            "cross_cells_total": len(cross),
        }
    if len(keyboards) == 2:
        cross_kb = stats.cross_keyboard_ks(grid, keyboards=tuple(keyboards))
        stats.write_cross_keyboard_csv(reports_dir / "ks_cross_keyboard.csv", cross_kb)
        summary["cross_keyboard_dwell_separated"] = int(np.sum(
            (cross_kb.p_values[:, 0] < 0.05) & (cross_kb.p_values[:, 1] < 0.05)
        ))
    return summary


def run_ocsvm(cfg, manifest, grid, reports_dir) -> dict:
    summary = {}
    for pairing in verify.OCSVM_PAIRINGS:
        matrix = verify.ocsvm_matrix(
            grid, pairing, nu=cfg.nu, gamma=cfg.gamma,
            transform_mode=cfg.ocsvm_transform,
        )
        verify.write_ocsvm_csv(reports_dir / f"ocsvm_{pairing}.csv", matrix)
        verify.write_ocsvm_json(reports_dir / f"ocsvm_{pairing}.json", matrix)
        n = len(matrix.agent_ids)
        off = [matrix.rates[i, j] for i in range(n) for j in range(n) if i != j]
        diag = [matrix.rates[i, i] for i in range(n)]
        summary[pairing] = {
            "mean_same_user_rate": round(float(np.mean(diag)), 2),
            "mean_cross_user_rate": round(float(np.mean(off)), 2),
        }
    return summary


def run_rf(cfg, manifest, grid, reports_dir, keyboards) -> dict:
    summary = {}
    for kind in keyboards:
        matrix = verify.rf_matrix(
            grid, kind, params=cfg.forest, seed=cfg.seed,
            threshold=cfg.threshold, cv=cfg.rf_cv,
        )
        verify.write_rf_matrix_csv(reports_dir / f"rf_{kind}.csv", matrix)
        verify.write_rf_matrix_json(reports_dir / f"rf_{kind}.json", matrix)
        verify.write_importances_csv(reports_dir / f"importances_{kind}.csv", matrix)
        summary[kind] = {
            "same_user_cells": sum(
                1 for c in matrix.cells if c.verdict.decision == verify.SAME_USER
            ),
            "different_user_cells": sum(
                1 for c in matrix.cells if c.verdict.decision == verify.DIFFERENT_USER
            ),
            "misclassified_cells": sum(1 for c in matrix.cells if c.misclassified),
            "total_cells": len(matrix.cells),
        }
    if len(keyboards) == 2:
        cross = verify.rf_cross_keyboard(
            grid, params=cfg.forest, seed=cfg.seed,
            threshold=cfg.threshold, cv=cfg.rf_cv, keyboards=tuple(keyboards),
        )
        verify.write_rf_cross_keyboard_csv(reports_dir / "rf_cross_keyboard.csv", cross)
        summary["cross_keyboard_min_accuracy"] = round(
            min(v.accuracy for v in cross.cells.values()), 4
        )
    return summary


def cmd_ks(args) -> int:
    cfg = _load_config(args)
    manifest, grid, reports_dir = _load_grid(args)
    summary = run_ks(cfg, manifest, grid, reports_dir, _keyboards(args, manifest))
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_ocsvm(args) -> int:
    cfg = _load_config(args)
    manifest, grid, reports_dir = _load_grid(args)
    summary = run_ocsvm(cfg, manifest, grid, reports_dir)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_rf(args) -> int:
    cfg = _load_config(args)
    manifest, grid, reports_dir = _load_grid(args)
    summary = run_rf(cfg, manifest, grid, reports_dir, _keyboards(args, manifest))
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_report(args) -> int:
    cfg = _load_config(args)
    manifest, grid, reports_dir = _load_grid(args)
    keyboards = _keyboards(args, manifest)
    summary = {}
    if args.which in ("ks", "all"):
        summary["ks"] = run_ks(cfg, manifest, grid, reports_dir, keyboards)
    if args.which in ("ocsvm", "all"):
        summary["ocsvm"] = run_ocsvm(cfg, manifest, grid, reports_dir)
    if args.which in ("rf", "all"):
        summary["rf"] = run_rf(cfg, manifest, grid, reports_dir, keyboards)
    with open(reports_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="keydyn",
        description="Simulate keystroke dynamics and run the verification pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", default=".", help="experiment directory")
        p.set_defaults(fn=fn)
        return p

    p = add("init", cmd_init, "write a config.json with full defaults")
    p.add_argument("--seed", type=int, default=None)

    p = add("simulate", cmd_simulate, "generate the session grid")
    p.add_argument("--config", default=None, help="config file to read")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--users", type=int, default=None,
                   help="use only the first N profile ranges")
    p.add_argument("--chars", dest="n_chars", type=int, default=None)
    p.add_argument("--sessions", dest="sessions_per_keyboard", type=int, default=None)

    add("extract", cmd_extract, "window features for every session")

    p = add("ks", cmd_ks, "pairwise distribution tests")
    p.add_argument("--config", default=None)
    p.add_argument("--keyboard", choices=KEYBOARD_KINDS, default=None)

    p = add("ocsvm", cmd_ocsvm, "one-class inlier-rate matrices")
    p.add_argument("--config", default=None)
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--transform", choices=verify.OCSVM_TRANSFORM_MODES, default=None)

    p = add("rf", cmd_rf, "random-forest pairwise verdicts")
    p.add_argument("--config", default=None)
    p.add_argument("--keyboard", choices=KEYBOARD_KINDS, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--cv", choices=("stratified", "blocked"), default=None)

    p = add("report", cmd_report, "run analyses and write a summary")
    p.add_argument("--config", default=None)
    p.add_argument("--keyboard", choices=KEYBOARD_KINDS, default=None)
    p.add_argument("--which", choices=("ks", "ocsvm", "rf", "all"), default="all")
    p.add_argument("--nu", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
