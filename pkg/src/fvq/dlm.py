"""Wavelet detail-loss measure with contrast masking.

Each frame pair is decomposed with a 4-level separable biorthogonal (CDF 9/7
analysis) wavelet. Per level, distorted detail coefficients are decoupled
into a restored part (gain in [0, 1] times the original coefficient) and an
additive impairment; the additive part drives a local masking threshold that
is subtracted from the restored magnitudes before cube pooling. The per-level
value is (pooled restored / pooled original) detail energy, so it lies in
[0, 1] and equals exactly 1.0 for identical inputs.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import FrameTooSmall
from .video import VideoSequence, check_aligned

N_LEVELS = 4
MIN_FRAME_DIM = 32

# CDF 9/7 analysis filters, DC gain 1 lowpass / zero-sum highpass.
_LOWPASS = np.array([
    0.026748757410810898, -0.016864118442875895, -0.078223266528988498,
    0.266864118442872340, 0.602949018236357900, 0.266864118442872340,
    -0.078223266528988498, -0.016864118442875895, 0.026748757410810898,
])
_HIGHPASS = np.array([
    0.091271763114249480, -0.057543526228499570, -0.591271763114246990,
    1.115087052456994000, -0.591271763114246990, -0.057543526228499570,
    0.091271763114249480,
])

# 3x3 smoothing of the additive-impairment magnitude -> masking threshold
_MASK_KERNEL = np.array([[1.0, 1.0, 1.0],
                         [1.0, 2.0, 1.0],
                         [1.0, 1.0, 1.0]]) / 10.0

_COEF_FLOOR = 1e-12


def _dwt_level(a: np.ndarray):
    """One separable analysis step: returns (approx, detail_h, detail_v, detail_d)."""
    lo = ndimage.correlate1d(a, _LOWPASS, axis=0, mode="reflect")[::2, :]
    hi = ndimage.correlate1d(a, _HIGHPASS, axis=0, mode="reflect")[::2, :]
    ll = ndimage.correlate1d(lo, _LOWPASS, axis=1, mode="reflect")[:, ::2]
    lh = ndimage.correlate1d(lo, _HIGHPASS, axis=1, mode="reflect")[:, ::2]
    hl = ndimage.correlate1d(hi, _LOWPASS, axis=1, mode="reflect")[:, ::2]
    hh = ndimage.correlate1d(hi, _HIGHPASS, axis=1, mode="reflect")[:, ::2]
    return ll, lh, hl, hh


def dlm_frame_pair(reference: np.ndarray, distorted: np.ndarray):
    """Detail-loss for one frame pair.

    Returns ``(per_level, pooled_num, pooled_den)`` where ``per_level`` holds
    the 4 level ratios and the pooled sums support the cross-level aggregate.
    """
    if min(reference.shape) < MIN_FRAME_DIM:
        raise FrameTooSmall(
            f"detail-loss features need frames of at least "
            f"{MIN_FRAME_DIM}x{MIN_FRAME_DIM}, got {reference.shape}"
        )
    ref = reference * 255.0
    dst = distorted * 255.0
    per_level = np.empty(N_LEVELS)
    pooled_num = np.empty(N_LEVELS)
    pooled_den = np.empty(N_LEVELS)
    for level in range(N_LEVELS):
        ref, *orig_details = _dwt_level(ref)
        dst, *dist_details = _dwt_level(dst)

        restored = []
        additive = []
        for o, t in zip(orig_details, dist_details):
            valid = np.abs(o) > _COEF_FLOOR
            gain = np.zeros_like(o)
            np.divide(t, o, out=gain, where=valid)
            gain = np.clip(gain, 0.0, 1.0)
            r = gain * o
            restored.append(r)
            additive.append(t - r)

        impairment = (np.abs(additive[0]) + np.abs(additive[1])
                      + np.abs(additive[2])) / 3.0
        threshold = ndimage.correlate(impairment, _MASK_KERNEL, mode="reflect")

        num = 0.0
        den = 0.0
        for o, r in zip(orig_details, restored):
            valid = np.abs(o) > _COEF_FLOOR
            kept = np.maximum(np.abs(r) - threshold, 0.0)
            num += float((kept[valid] ** 3).sum())
            den += float((np.abs(o[valid]) ** 3).sum())
        per_level[level] = ((num + 1e-12) / (den + 1e-12)) ** (1.0 / 3.0)
        pooled_num[level] = num ** (1.0 / 3.0)
        pooled_den[level] = den ** (1.0 / 3.0)
    return per_level, pooled_num, pooled_den


def dlm_aggregate(pooled_num: np.ndarray, pooled_den: np.ndarray) -> float:
    """Cross-level detail-loss ratio from cube-rooted level pools."""
    return float((pooled_num.sum() + 1e-12) / (pooled_den.sum() + 1e-12))


def dlm_scales(original: VideoSequence, processed: VideoSequence) -> np.ndarray:
    """Mean over frames of the per-level detail-loss values."""
    check_aligned(original, processed)
    acc = np.zeros(N_LEVELS)
    for k in range(original.frame_count):
        per_level, _, _ = dlm_frame_pair(original.frame(k), processed.frame(k))
        acc += per_level
    return acc / original.frame_count
