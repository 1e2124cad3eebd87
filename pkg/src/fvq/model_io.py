"""Versioned JSON persistence for trained models.

Floats are serialized as Python's shortest round-trip decimals, so a
save/load cycle predicts bit-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CorruptModel, DimensionMismatch, VersionMismatch
from .nn import NnModel, nn_predict
from .normalize import NormalizationStats, normalize_apply
from .svr import SvrModel, svr_predict

FORMAT_VERSION = 1


@dataclass
class TrainedModel:
    kind: str                          # "svr" or "nn"
    normalization: NormalizationStats
    payload: SvrModel | NnModel
    feature_names: list[str]
    version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.kind not in ("svr", "nn"):
            raise CorruptModel(f"unknown model kind {self.kind!r}")
        dim = (self.payload.layer_sizes[0] if self.kind == "nn"
               else self.normalization.mins.size)
        if len(self.feature_names) != dim or \
                len(self.feature_names) != self.normalization.mins.size:
            raise DimensionMismatch(
                f"{len(self.feature_names)} feature names vs input dim {dim}"
            )


def model_predict(model: TrainedModel, rows) -> np.ndarray:
    """Normalize raw feature rows and run the wrapped regressor."""
    x = normalize_apply(model.normalization, np.atleast_2d(np.asarray(rows, float)))
    if model.kind == "svr":
        return np.atleast_1d(svr_predict(model.payload, x))
    return np.atleast_1d(nn_predict(model.payload, x))


def _payload_dict(model: TrainedModel) -> dict:
    p = model.payload
    if model.kind == "svr":
        return {
            "support_vectors": p.support_vectors.tolist(),
            "dual_coefs": p.dual_coefs.tolist(),
            "bias": p.bias, "gamma": p.gamma, "C": p.C, "epsilon": p.epsilon,
        }
    return {
        "layer_sizes": list(p.layer_sizes),
        "weights": [w.tolist() for w in p.weights],
        "biases": [b.tolist() for b in p.biases],
    }


def model_save(model: TrainedModel, sink) -> None:
    doc = {
        "format_version": model.version,
        "kind": model.kind,
        "feature_names": list(model.feature_names),
        "normalization": {
            "min": model.normalization.mins.tolist(),
            "max": model.normalization.maxs.tolist(),
        },
        "payload": _payload_dict(model),
    }
    text = json.dumps(doc, indent=2)
    if isinstance(sink, (str, Path)):
        Path(sink).write_text(text)
    else:
        sink.write(text)


def model_load(source) -> TrainedModel:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptModel(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise CorruptModel("model document must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatch(
            f"model format {version!r} not supported (expected {FORMAT_VERSION})"
        )
    try:
        kind = doc["kind"]
        names = [str(n) for n in doc["feature_names"]]
        stats = NormalizationStats(
            mins=np.asarray(doc["normalization"]["min"], dtype=np.float64),
            maxs=np.asarray(doc["normalization"]["max"], dtype=np.float64),
        )
        pay = doc["payload"]
        if kind == "svr":
            n_feat = stats.mins.size
            sv = np.asarray(pay["support_vectors"], dtype=np.float64)
            payload = SvrModel(
                support_vectors=sv.reshape(-1, n_feat),
                dual_coefs=np.asarray(pay["dual_coefs"], dtype=np.float64),
                bias=float(pay["bias"]), gamma=float(pay["gamma"]),
                C=float(pay["C"]), epsilon=float(pay["epsilon"]),
            )
        elif kind == "nn":
            payload = NnModel(
                layer_sizes=[int(s) for s in pay["layer_sizes"]],
                weights=[np.asarray(w, dtype=np.float64) for w in pay["weights"]],
                biases=[np.asarray(b, dtype=np.float64) for b in pay["biases"]],
            )
        else:
            raise CorruptModel(f"unknown model kind {kind!r}")
        return TrainedModel(kind=kind, normalization=stats, payload=payload,
                            feature_names=names, version=version)
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"model document malformed: {exc}") from exc
