"""Command-line surface: extract, train, predict, evaluate, rank-features, config.

Feature extraction is decoupled from training through a CSV intermediate, so
re-training never re-decodes video. Every command that takes a seed produces
byte-identical outputs across runs; floats are written as shortest
round-trip decimals.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import evaluate as ev
from .errors import ConfigError, FeatureNameMismatch, FvqError
from .fr import FrFeatureConfig, extract_fr, fr_feature_names
from .metrics import pcc, srcc
from .model_io import TrainedModel, model_load, model_predict, model_save
from .nn import NnHyper, nn_train
from .normalize import normalize_apply, normalize_fit
from .nr import NR_FEATURE_NAMES, NrFeatureConfig, extract_nr
from .svr import SvrGrid, SvrParams, svr_grid_search, svr_train
from .yuv import read_raw_yuv, read_y4m


@dataclass
class RunConfig:
    """Flat, self-describing run configuration with explicit defaults."""

    mode: str = "fr"
    include_dm_l2: bool = True
    nr_blur_sigma: float = 1.0
    mscn_sigma: float = 7.0 / 6.0
    mscn_radius: int = 3
    regressor: str = "svr"
    svr_c: float = 10.0
    svr_gamma: float = 0.1
    svr_epsilon: float = 0.1
    svr_grid: bool = False
    grid_c: list = field(default_factory=lambda: [1.0, 10.0, 100.0])
    grid_gamma: list = field(default_factory=lambda: [0.01, 0.1, 1.0])
    grid_epsilon: list = field(default_factory=lambda: [0.1])
    grid_folds: int = 5
    nn_hidden: list = field(default_factory=lambda: [120, 64, 16])
    nn_lr: float = 1e-3
    nn_batch_size: int = 16
    nn_epochs: int = 2000
    split_ratio: float = 0.8
    sims: int = 100
    seed: int = 0
    # geometry for headerless .yuv inputs (10-bit raw is little-endian,
    # 2 bytes/sample, values in the low 10 bits)
    raw_width: int = 0
    raw_height: int = 0
    raw_bit_depth: int = 8
    raw_chroma: str = "420"
    frame_rate: float = 25.0

    def validate(self) -> "RunConfig":
        if self.mode not in ("fr", "nr"):
            raise ConfigError(f"mode must be fr or nr, got {self.mode!r}")
        if self.regressor not in ("svr", "nn"):
            raise ConfigError(f"regressor must be svr or nn, got {self.regressor!r}")
        if not 0.0 < self.split_ratio < 1.0:
            raise ConfigError(f"split_ratio must be in (0, 1), got {self.split_ratio}")
        if self.sims < 1:
            raise ConfigError(f"sims must be >= 1, got {self.sims}")
        if self.nr_blur_sigma <= 0 or self.mscn_sigma <= 0:
            raise ConfigError("blur/mscn sigmas must be > 0")
        return self


def load_config(path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    known = {f.name for f in fields(RunConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
    return RunConfig(**doc).validate()


def _fmt(v: float) -> str:
    return repr(float(v))


def _read_video(path: str, config: RunConfig):
    p = Path(path)
    if p.suffix.lower() == ".y4m":
        return read_y4m(p)
    if config.raw_width < 1 or config.raw_height < 1:
        raise ConfigError(
            f"{path}: raw input needs raw_width/raw_height in the config"
        )
    return read_raw_yuv(p, config.raw_width, config.raw_height,
                        bit_depth=config.raw_bit_depth, chroma=config.raw_chroma,
                        frame_rate=config.frame_rate)


def _feature_names(config: RunConfig) -> list[str]:
    if config.mode == "fr":
        return fr_feature_names(FrFeatureConfig(include_dm_l2=config.include_dm_l2))
    return list(NR_FEATURE_NAMES)


def _write_feature_csv(path, names, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _read_feature_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            names = next(reader)
        except StopIteration:
            raise ConfigError(f"{path}: empty feature CSV") from None
        rows = [[float(v) for v in row] for row in reader]
    matrix = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(names))
    return names, matrix


def cmd_extract(args) -> int:
    config = _load_effective_config(args)
    manifest = ev.read_manifest(args.manifest, config.mode)
    names = _feature_names(config)
    nr_config = NrFeatureConfig(blur_sigma=config.nr_blur_sigma,
                                mscn_sigma=config.mscn_sigma,
                                mscn_radius=config.mscn_radius)
    fr_config = FrFeatureConfig(include_dm_l2=config.include_dm_l2)
    rows = []
    for num, entry in enumerate(manifest.entries, start=2):
        try:
            processed = _read_video(entry.processed, config)
            if config.mode == "fr":
                original = _read_video(entry.reference, config)
                feats = extract_fr(original, processed, fr_config)
            else:
                feats = extract_nr(processed, nr_config)
        except FvqError as exc:
            raise FvqError(
                f"{args.manifest} line {num} ({entry.processed}): {exc}"
            ) from exc
        rows.append(list(feats.values()))
    _write_feature_csv(args.features, names, rows)
    print(f"wrote {len(rows)} x {len(names)} features to {args.features}")
    return 0


def _train_model(config: RunConfig, names, matrix, mos) -> tuple[TrainedModel, dict]:
    stats = normalize_fit(matrix)
    x = normalize_apply(stats, matrix)
    info: dict = {"regressor": config.regressor, "rows": int(matrix.shape[0])}
    if config.regressor == "svr":
        params = SvrParams(C=config.svr_c, gamma=config.svr_gamma,
                           epsilon=config.svr_epsilon)
        if config.svr_grid:
            grid = SvrGrid(C_values=tuple(config.grid_c),
                           gamma_values=tuple(config.grid_gamma),
                           epsilon_values=tuple(config.grid_epsilon))
            params, cv_score, _ = svr_grid_search(
                x, mos, grid, folds=config.grid_folds, seed=config.seed,
                base=params)
            info["cv_srcc"] = cv_score
        payload = svr_train(x, mos, params)
        info["params"] = {"C": params.C, "gamma": params.gamma,
                          "epsilon": params.epsilon}
        kind = "svr"
    else:
        arch = [matrix.shape[1], *config.nn_hidden, 1]
        hyper = NnHyper(seed=config.seed, lr=config.nn_lr,
                        batch_size=config.nn_batch_size, epochs=config.nn_epochs)
        payload = nn_train(x, mos, arch, hyper)
        info["params"] = {"layers": arch, "lr": config.nn_lr,
                          "batch_size": config.nn_batch_size,
                          "epochs": config.nn_epochs, "seed": config.seed}
        payload.loss_history = None     # keep the model file about the weights
        kind = "nn"
    model = TrainedModel(kind=kind, normalization=stats, payload=payload,
                         feature_names=list(names))
    preds = model_predict(model, matrix)
    info["in_sample_pcc"] = pcc(preds, mos)
    info["in_sample_srcc"] = srcc(preds, mos)
    info["in_sample_predictions"] = preds.tolist()
    return model, info


def cmd_train(args) -> int:
    config = _load_effective_config(args)
    manifest = ev.read_manifest(args.manifest, config.mode)
    names, matrix = _read_feature_csv(args.features)
    if matrix.shape[0] != len(manifest.entries):
        raise ConfigError(
            f"{args.features} has {matrix.shape[0]} rows but "
            f"{args.manifest} has {len(manifest.entries)} entries"
        )
    model, info = _train_model(config, names, matrix, manifest.mos)
    model_save(model, args.model)
    report_path = args.report or args.model + ".report.json"
    Path(report_path).write_text(json.dumps(info, indent=2))
    print(f"wrote model to {args.model} "
          f"(in-sample SRCC {info['in_sample_srcc']:.4f})")
    return 0


def cmd_predict(args) -> int:
    model = model_load(args.model)
    with open(args.features, newline="") as src, \
            open(args.scores, "w", newline="") as dst:
        reader = csv.reader(src)
        writer = csv.writer(dst)
        try:
            names = next(reader)
        except StopIteration:
            raise ConfigError(f"{args.features}: empty feature CSV") from None
        if names != model.feature_names:
            raise FeatureNameMismatch(
                f"feature columns {names} do not match model features "
                f"{model.feature_names}"
            )
        writer.writerow(["score"])
        count = 0
        for row in reader:
            score = model_predict(model, np.array([float(v) for v in row]))[0]
            writer.writerow([_fmt(score)])
            count += 1
    print(f"wrote {count} scores to {args.scores}")
    return 0


def cmd_evaluate(args) -> int:
    config = _load_effective_config(args)
    manifest = ev.read_manifest(args.manifest, config.mode)
    _, matrix = _read_feature_csv(args.features)
    spec = ev.RegressorSpec(
        kind=config.regressor,
        svr_params=SvrParams(C=config.svr_c, gamma=config.svr_gamma,
                             epsilon=config.svr_epsilon),
        nn_layers=None, nn_lr=config.nn_lr,
        nn_batch_size=config.nn_batch_size, nn_epochs=config.nn_epochs,
    )
    report = ev.run_splits(manifest, matrix, spec,
                           split_ratio=config.split_ratio, sims=config.sims,
                           seed=config.seed)
    ev.write_report_json(report, args.report)
    if args.table:
        Path(args.table).write_text(report.text_table() + "\n")
    print(f"median PCC {report.median_pcc:.4f}  "
          f"median SRCC {report.median_srcc:.4f}  ({report.sim_count} sims)")
    return 0


def cmd_rank_features(args) -> int:
    manifest = ev.read_manifest(args.manifest, args.mode)
    names, matrix = _read_feature_csv(args.features)
    ranking = ev.feature_correlation_report(matrix, manifest.mos, names)
    header = f"{'feature':<14} {'pcc':>9} {'srcc':>9} {'mean':>9}"
    print(header)
    for row in ranking:
        flag = "  (zero variance)" if row["degenerate"] else ""
        print(f"{row['feature']:<14} {row['pcc']:>9.4f} {row['srcc']:>9.4f} "
              f"{row['mean_abs']:>9.4f}{flag}")
    if args.ranking_csv:
        with open(args.ranking_csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature", "pcc", "srcc", "mean_abs", "degenerate"])
            for row in ranking:
                writer.writerow([row["feature"], _fmt(row["pcc"]),
                                 _fmt(row["srcc"]), _fmt(row["mean_abs"]),
                                 str(row["degenerate"]).lower()])
    if args.top:
        keep = [row["feature"] for row in ranking[:args.top]]
        idx = [names.index(k) for k in keep]
        _write_feature_csv(args.output or "features_top.csv", keep,
                           matrix[:, idx])
        print(f"wrote top-{len(keep)} feature subset to "
              f"{args.output or 'features_top.csv'}")
    return 0


def cmd_config(args) -> int:
    if args.action == "init":
        Path(args.output).write_text(json.dumps(asdict(RunConfig()), indent=2))
        print(f"wrote default config to {args.output}")
    else:
        config = load_config(args.config) if args.config else RunConfig()
        print(json.dumps(asdict(config), indent=2))
    return 0


def _load_effective_config(args) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    for attr in ("mode", "seed", "sims", "split_ratio", "regressor"):
        value = getattr(args, attr, None)
        if value is not None:
            setattr(config, attr, value)
    return config.validate()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fvq",
        description="Video quality features + trainable score regression "
                    "(full-reference and no-reference).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config=True):
        if config:
            p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--mode", choices=["fr", "nr"], default=None)
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("extract", help="decode videos and write a feature CSV")
    add_common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--features", required=True, help="output CSV path")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="fit a regressor on a feature CSV")
    add_common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True, help="output model JSON path")
    p.add_argument("--report", help="training report path")
    p.add_argument("--regressor", choices=["svr", "nn"], default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score feature rows with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--scores", required=True, help="output CSV path")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="repeated random-split simulations")
    add_common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--report", required=True, help="output report JSON path")
    p.add_argument("--table", help="optional plain-text table path")
    p.add_argument("--sims", type=int, default=None)
    p.add_argument("--split", dest="split_ratio", type=float, default=None)
    p.add_argument("--regressor", choices=["svr", "nn"], default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("rank-features", help="per-feature correlation ranking")
    p.add_argument("--manifest", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--mode", choices=["fr", "nr"], default="fr")
    p.add_argument("--top", type=int, help="write a top-N feature subset CSV")
    p.add_argument("--output", help="path of the subset CSV")
    p.add_argument("--ranking-csv", help="write the ranking itself as CSV")
    p.set_defaults(func=cmd_rank_features)

    p = sub.add_parser("config", help="write or show run configuration")
    p.add_argument("action", choices=["init", "show"])
    p.add_argument("--output", default="fvq-config.json")
    p.add_argument("--config", help="config to show")
    p.set_defaults(func=cmd_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "sims", None) is not None and args.sims < 1:
        parser.error(f"--sims must be >= 1, got {args.sims}")
    try:
        return args.func(args)
    except FvqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
