"""Multi-scale visual-information fidelity over a Gaussian scale mixture.

Pixel-domain formulation: local Gaussian-weighted first/second moments feed a
signal-gain + additive-noise model per scale. Per-scale values are averaged
over frames and clipped to [0, 1]; identical inputs score exactly 1.0 at
every scale.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import FrameTooSmall
from .video import VideoSequence, check_aligned

N_SCALES = 4
MIN_FRAME_DIM = 32

# Additive noise variance of the observation model, on the [0, 255] sample
# scale. Inputs in [0, 1] are rescaled by 255 before the local statistics.
SIGMA_NSQ = 2.0

_VAR_FLOOR = 1e-8


def _scale_kernel(scale: int) -> np.ndarray:
    """1-D taps of the Gaussian window used at ``scale`` (size 2^(4-s)+1)."""
    size = 2 ** (N_SCALES - scale) + 1
    sigma = size / 5.0
    x = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def _smooth(f: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    out = ndimage.correlate1d(f, kernel, axis=0, mode="reflect")
    return ndimage.correlate1d(out, kernel, axis=1, mode="reflect")


def vif_frame_pair(reference: np.ndarray, distorted: np.ndarray,
                   n_scales: int = N_SCALES) -> np.ndarray:
    """Per-scale fidelity values for one frame pair, in [0, 1] each.

    Division is fully masked (no stabilizing epsilon inside the model), so a
    bitwise-identical pair yields exactly 1.0 per scale.
    """
    if min(reference.shape) < MIN_FRAME_DIM:
        raise FrameTooSmall(
            f"fidelity features need frames of at least "
            f"{MIN_FRAME_DIM}x{MIN_FRAME_DIM}, got {reference.shape}"
        )
    ref = reference * 255.0
    dst = distorted * 255.0
    values = np.empty(n_scales)
    for scale in range(n_scales):
        kernel = _scale_kernel(scale)
        if scale > 0:
            ref = _smooth(ref, kernel)[::2, ::2]
            dst = _smooth(dst, kernel)[::2, ::2]
        mu_r = _smooth(ref, kernel)
        mu_d = _smooth(dst, kernel)
        var_r = np.maximum(_smooth(ref * ref, kernel) - mu_r * mu_r, 0.0)
        var_d = np.maximum(_smooth(dst * dst, kernel) - mu_d * mu_d, 0.0)
        cov = _smooth(ref * dst, kernel) - mu_r * mu_d

        valid = var_r > _VAR_FLOOR
        gain = np.zeros_like(cov)
        np.divide(cov, var_r, out=gain, where=valid)
        noise = var_d - gain * cov
        # negative gain means anti-correlated content: all energy is noise
        noise = np.where(gain < 0.0, var_d, noise)
        gain = np.maximum(gain, 0.0)
        noise = np.maximum(noise, 0.0)

        num_terms = np.log2(1.0 + gain * gain * var_r / (noise + SIGMA_NSQ))
        den_terms = np.log2(1.0 + var_r / SIGMA_NSQ)
        num = float(num_terms[valid].sum())
        den = float(den_terms[valid].sum())
        values[scale] = min(max((num + 1e-10) / (den + 1e-10), 0.0), 1.0)
    return values


def vif_scales(original: VideoSequence, processed: VideoSequence) -> np.ndarray:
    """Mean over frames of the per-scale fidelity values."""
    check_aligned(original, processed)
    acc = np.zeros(N_SCALES)
    for k in range(original.frame_count):
        acc += vif_frame_pair(original.frame(k), processed.frame(k))
    return acc / original.frame_count
