"""Repeated random-split evaluation and per-feature correlation ranking.

Each simulation draws its own PCG64 stream seeded by (seed, sim index), so a
multi-sim report equals the multiset of independent single-sim runs and is
reproducible regardless of scheduling.

Splits are at the video level only: if a manifest pairs several processed
versions of one source, content leaks between train and test. Encode such
structure upstream if that matters for your protocol.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (ConfigError, DimensionMismatch, LengthMismatch,
                     TooFewEntries, ZeroVariance)
from .metrics import pcc, srcc
from .nn import NnHyper, default_architecture, nn_predict, nn_train
from .normalize import normalize_apply, normalize_fit
from .svr import SvrParams, svr_predict, svr_train

MIN_SPLIT_ENTRIES = 10
MIN_TEST_ROWS = 3


@dataclass(frozen=True)
class ManifestEntry:
    processed: str
    mos: float
    reference: str | None = None


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]
    mode: str                          # "fr" or "nr"

    def __post_init__(self):
        if self.mode not in ("fr", "nr"):
            raise ConfigError(f"mode must be 'fr' or 'nr', got {self.mode!r}")
        object.__setattr__(self, "entries", tuple(self.entries))
        for num, e in enumerate(self.entries, start=1):
            if not np.isfinite(e.mos):
                raise ConfigError(f"manifest entry {num}: MOS {e.mos} is not finite")
            if self.mode == "fr" and not e.reference:
                raise ConfigError(f"manifest entry {num}: fr mode requires a reference")
            if self.mode == "nr" and e.reference:
                raise ConfigError(
                    f"manifest entry {num}: nr mode forbids a reference "
                    f"({e.reference!r})"
                )

    @property
    def mos(self) -> np.ndarray:
        return np.array([e.mos for e in self.entries])


def read_manifest(path, mode: str) -> DatasetManifest:
    """Parse a `reference,processed,mos` CSV (reference empty in nr mode)."""
    entries = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        expected = {"reference", "processed", "mos"}
        if reader.fieldnames is None or set(reader.fieldnames) != expected:
            raise ConfigError(
                f"{path}: manifest header must be reference,processed,mos, "
                f"got {reader.fieldnames}"
            )
        for num, row in enumerate(reader, start=2):
            try:
                mos = float(row["mos"])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{path}:{num}: bad mos value {row['mos']!r}") from exc
            entries.append(ManifestEntry(
                processed=row["processed"].strip(),
                mos=mos,
                reference=row["reference"].strip() or None,
            ))
    return DatasetManifest(entries=tuple(entries), mode=mode)


@dataclass(frozen=True)
class RegressorSpec:
    """Which regressor run_splits trains per simulation."""

    kind: str = "svr"
    svr_params: SvrParams = field(default_factory=SvrParams)
    nn_layers: tuple | None = None     # None -> default architecture
    nn_lr: float = 1e-3
    nn_batch_size: int = 16
    nn_epochs: int = 2000


@dataclass(frozen=True)
class EvaluationReport:
    pcc_per_sim: np.ndarray
    srcc_per_sim: np.ndarray
    sim_count: int
    split_ratio: float
    seed: int

    @property
    def median_pcc(self) -> float:
        return float(np.median(self.pcc_per_sim))

    @property
    def median_srcc(self) -> float:
        return float(np.median(self.srcc_per_sim))

    @property
    def mean_pcc(self) -> float:
        return float(np.mean(self.pcc_per_sim))

    @property
    def mean_srcc(self) -> float:
        return float(np.mean(self.srcc_per_sim))

    def to_dict(self) -> dict:
        return {
            "sim_count": self.sim_count,
            "split_ratio": self.split_ratio,
            "seed": self.seed,
            "median_pcc": self.median_pcc,
            "median_srcc": self.median_srcc,
            "mean_pcc": self.mean_pcc,
            "mean_srcc": self.mean_srcc,
            "pcc_per_sim": self.pcc_per_sim.tolist(),
            "srcc_per_sim": self.srcc_per_sim.tolist(),
        }

    def text_table(self) -> str:
        rows = [
            ("sims", str(self.sim_count)),
            ("split ratio", repr(self.split_ratio)),
            ("seed", str(self.seed)),
            ("median PCC", f"{self.median_pcc:.6f}"),
            ("median SRCC", f"{self.median_srcc:.6f}"),
            ("mean PCC", f"{self.mean_pcc:.6f}"),
            ("mean SRCC", f"{self.mean_srcc:.6f}"),
        ]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _sim_rng(seed: int, sim_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence((int(seed), int(sim_index)))))


def _fit_and_score(features, mos, train_idx, test_idx, regressor: RegressorSpec,
                   rng: np.random.Generator):
    stats = normalize_fit(features[train_idx])
    x_train = normalize_apply(stats, features[train_idx])
    x_test = normalize_apply(stats, features[test_idx])
    if regressor.kind == "svr":
        model = svr_train(x_train, mos[train_idx], regressor.svr_params)
        preds = np.atleast_1d(svr_predict(model, x_test))
    elif regressor.kind == "nn":
        layers = (list(regressor.nn_layers) if regressor.nn_layers
                  else default_architecture(features.shape[1]))
        hyper = NnHyper(seed=int(rng.integers(2 ** 63)), lr=regressor.nn_lr,
                        batch_size=regressor.nn_batch_size,
                        epochs=regressor.nn_epochs)
        model = nn_train(x_train, mos[train_idx], layers, hyper)
        preds = np.atleast_1d(nn_predict(model, x_test))
    else:
        raise ConfigError(f"unknown regressor kind {regressor.kind!r}")
    try:
        return pcc(preds, mos[test_idx]), srcc(preds, mos[test_idx])
    except ZeroVariance:
        # constant predictions carry no rank information
        return 0.0, 0.0


def run_single_split(manifest: DatasetManifest, features, sim_index: int,
                     regressor: RegressorSpec = RegressorSpec(),
                     split_ratio: float = 0.8, seed: int = 0):
    """One seeded shuffle/split/train/test; returns (pcc, srcc)."""
    feats, n_train = _check_split_inputs(manifest, features, split_ratio)
    rng = _sim_rng(seed, sim_index)
    perm = rng.permutation(len(manifest.entries))
    return _fit_and_score(feats, manifest.mos, perm[:n_train], perm[n_train:],
                          regressor, rng)


def run_splits(manifest: DatasetManifest, features,
               regressor: RegressorSpec = RegressorSpec(),
               split_ratio: float = 0.8, sims: int = 100,
               seed: int = 0) -> EvaluationReport:
    """Repeated random train/test simulations over precomputed features."""
    if sims < 1:
        raise ConfigError(f"sims must be >= 1, got {sims}")
    feats, n_train = _check_split_inputs(manifest, features, split_ratio)
    mos = manifest.mos
    pccs = np.empty(sims)
    srccs = np.empty(sims)
    for sim in range(sims):
        rng = _sim_rng(seed, sim)
        perm = rng.permutation(len(manifest.entries))
        pccs[sim], srccs[sim] = _fit_and_score(
            feats, mos, perm[:n_train], perm[n_train:], regressor, rng)
    return EvaluationReport(pcc_per_sim=pccs, srcc_per_sim=srccs,
                            sim_count=sims, split_ratio=split_ratio, seed=seed)


def _check_split_inputs(manifest: DatasetManifest, features, split_ratio: float):
    feats = np.asarray(features, dtype=np.float64)
    n = len(manifest.entries)
    if feats.ndim != 2 or feats.shape[0] != n:
        raise DimensionMismatch(
            f"feature matrix has {feats.shape[0] if feats.ndim == 2 else '?'} rows, "
            f"manifest has {n} entries"
        )
    if not 0.0 < split_ratio < 1.0:
        raise ConfigError(f"split ratio must be in (0, 1), got {split_ratio}")
    if n < MIN_SPLIT_ENTRIES:
        raise TooFewEntries(f"split protocol needs >= {MIN_SPLIT_ENTRIES} entries, got {n}")
    n_train = int(np.floor(split_ratio * n + 0.5))
    n_test = n - n_train
    if n_test < MIN_TEST_ROWS:
        raise TooFewEntries(
            f"test split would have {n_test} rows; need >= {MIN_TEST_ROWS}"
        )
    return feats, n_train


def feature_correlation_report(features, mos, names=None) -> list[dict]:
    """Per-feature correlation against MOS, strongest first.

    Zero-variance feature columns are kept, scored 0 and flagged. Sorting is
    by the mean of |PCC| and |SRCC|, descending, stable in column order.
    """
    feats = np.asarray(features, dtype=np.float64)
    mos = np.asarray(mos, dtype=np.float64).ravel()
    if feats.ndim != 2 or feats.shape[0] != mos.size:
        raise DimensionMismatch("feature rows and MOS values must align")
    if feats.shape[0] < 3:
        raise LengthMismatch(f"need at least 3 rows, got {feats.shape[0]}")
    if np.ptp(mos) == 0.0:
        raise ZeroVariance("MOS values are constant; ranking undefined")
    if names is None:
        names = [f"f{j}" for j in range(feats.shape[1])]
    if len(names) != feats.shape[1]:
        raise DimensionMismatch(f"{len(names)} names for {feats.shape[1]} columns")

    rows = []
    for j, name in enumerate(names):
        try:
            p = pcc(feats[:, j], mos)
            s = srcc(feats[:, j], mos)
            degenerate = False
        except ZeroVariance:
            p = s = 0.0
            degenerate = True
        rows.append({
            "feature": name, "pcc": p, "srcc": s,
            "mean_abs": (abs(p) + abs(s)) / 2.0, "degenerate": degenerate,
        })
    return sorted(rows, key=lambda r: -r["mean_abs"])


def write_report_json(report: EvaluationReport, path) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=2))
