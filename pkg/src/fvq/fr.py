"""Full-reference feature extraction.

The feature vector fuses per-scale fidelity and detail-loss values with
temporal features: the mean co-located pixel difference of the original
sequence (plain and min-rule variants) and the differential-motion feature,
the per-pixel norm of the difference between original and processed
frame-difference signals.

All frame norms are normalized per pixel before temporal averaging so the
features are resolution-independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .dlm import dlm_aggregate, dlm_frame_pair, dlm_scales
from .errors import DimensionMismatch, TooFewFrames
from .video import VideoSequence, as_frame, check_aligned, check_same_shape
from .vif import vif_frame_pair, vif_scales

DM_NORMS = ("l1", "l2")


@dataclass(frozen=True)
class FrFeatureConfig:
    """Feature-set options: the L2 differential-motion variant is optional."""

    include_dm_l2: bool = True


def fr_feature_names(config: FrFeatureConfig = FrFeatureConfig()) -> list[str]:
    """Fixed column order of the full-reference feature vector (12 or 13)."""
    names = ["vif0", "vif1", "vif2", "vif3",
             "dlm0", "dlm1", "dlm2", "dlm3", "dlm",
             "motion", "motion_min", "dm_l1"]
    if config.include_dm_l2:
        names.append("dm_l2")
    return names


def sad(block_ref, block_coded) -> float:
    """Sum of absolute differences between two equally sized blocks."""
    a = as_frame(block_ref)
    b = as_frame(block_coded)
    check_same_shape(a, b)
    return float(np.abs(a - b).sum())


def motion_features(original: VideoSequence) -> tuple[float, float]:
    """(plain, min-rule) mean co-located pixel difference of a sequence.

    Per frame pair the L1 norm is divided by the pixel count; the min rule
    replaces each term with the smaller of the two adjacent frame-difference
    norms, so it needs at least 3 frames.
    """
    k = original.frame_count
    if k < 3:
        raise TooFewFrames(f"motion features need at least 3 frames, got {k}")
    diffs = np.abs(np.diff(original.data, axis=0)).mean(axis=(1, 2))
    plain = float(diffs.mean())
    min_rule = float(np.minimum(diffs[:-1], diffs[1:]).mean())
    return plain, min_rule


def dm_feature(original: VideoSequence, processed: VideoSequence,
               norm: str = "l1") -> float:
    """Differential motion: per-pixel norm of the frame-difference residual.

    ``norm`` selects L1 (mean absolute) or L2 (root mean square) pooling of
    each residual frame; frames are then averaged over time.
    """
    if norm not in DM_NORMS:
        raise ValueError(f"norm must be one of {DM_NORMS}, got {norm!r}")
    check_aligned(original, processed)
    if original.frame_count < 2:
        raise TooFewFrames("differential motion needs at least 2 frames")
    residual = np.diff(original.data, axis=0) - np.diff(processed.data, axis=0)
    if norm == "l1":
        per_frame = np.abs(residual).mean(axis=(1, 2))
    else:
        per_frame = np.sqrt((residual * residual).mean(axis=(1, 2)))
    return float(per_frame.mean())


def extract_fr(original: VideoSequence, processed: VideoSequence,
               config: FrFeatureConfig = FrFeatureConfig()) -> dict[str, float]:
    """Full-reference feature vector as an ordered name -> value mapping."""
    check_aligned(original, processed)
    vif = vif_scales(original, processed)
    dlm_acc = np.zeros(4)
    num_acc = np.zeros(4)
    den_acc = np.zeros(4)
    agg_acc = 0.0
    for k in range(original.frame_count):
        per_level, num, den = dlm_frame_pair(original.frame(k), processed.frame(k))
        dlm_acc += per_level
        num_acc, den_acc = num_acc + num, den_acc + den
        agg_acc += dlm_aggregate(num, den)
    nframes = original.frame_count
    motion, motion_min = motion_features(original)

    features = {f"vif{i}": float(vif[i]) for i in range(4)}
    features.update({f"dlm{i}": float(dlm_acc[i] / nframes) for i in range(4)})
    features["dlm"] = agg_acc / nframes
    features["motion"] = motion
    features["motion_min"] = motion_min
    features["dm_l1"] = dm_feature(original, processed, "l1")
    if config.include_dm_l2:
        features["dm_l2"] = dm_feature(original, processed, "l2")
    return features


class FullReferenceFeatures(BaseEstimator, TransformerMixin):
    """Transformer over (original, processed) sequence pairs.

    ``transform`` maps an iterable of pairs to a feature matrix whose columns
    follow :func:`fr_feature_names`. Stateless: ``fit`` only validates.
    """

    def __init__(self, include_dm_l2: bool = True):
        self.include_dm_l2 = include_dm_l2

    def _config(self) -> FrFeatureConfig:
        return FrFeatureConfig(include_dm_l2=self.include_dm_l2)

    def fit(self, X=None, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        rows = []
        for pair in X:
            if len(pair) != 2:
                raise DimensionMismatch("each item must be a (original, processed) pair")
            rows.append(list(extract_fr(pair[0], pair[1], self._config()).values()))
        return np.asarray(rows, dtype=np.float64)

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        return np.asarray(fr_feature_names(self._config()), dtype=object)


__all__ = [
    "DM_NORMS", "FrFeatureConfig", "FullReferenceFeatures", "dm_feature",
    "extract_fr", "fr_feature_names", "motion_features", "sad",
    "vif_scales", "dlm_scales", "vif_frame_pair", "dlm_frame_pair",
]
