"""No-reference feature extraction.

Without an original to compare against, the processed video is compared to a
Gaussian-blurred copy of itself, and natural-scene statistics are measured on
locally normalized (MSCN) coefficients: a generalized Gaussian fit to the
spatial coefficients, the same fit on frame-difference coefficients for the
temporal axis, plus self-similarity terms reusing the full-reference fidelity
and detail-loss machinery with the blurred video standing in as reference.

The result is a fixed-order 10-dim vector; flat (zero-variance) content maps
to sentinel fits (shape 2, scale 0) rather than failing the extraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from sklearn.base import BaseEstimator, TransformerMixin

from .dlm import dlm_frame_pair
from .errors import DegenerateSamples, NonPositiveSigma, TooFewFrames
from .video import VideoSequence, as_frame, gaussian_blur, separable_filter
from .vif import vif_frame_pair

NR_FEATURE_NAMES = [
    "ggd_s_shape", "ggd_s_scale", "ggd_t_shape", "ggd_t_scale",
    "selfsim_vif", "selfsim_dlm", "mscn_var", "fdiff_energy",
    "blur_dvif", "blur_ddlm",
]

# Sentinel fit for zero-variance sample sets: Gaussian shape, zero spread.
SENTINEL_SHAPE = 2.0
SENTINEL_SCALE = 0.0

_MIN_GGD_SAMPLES = 64
_SHAPE_LO, _SHAPE_HI = 0.05, 10.0


@dataclass(frozen=True)
class NrFeatureConfig:
    blur_sigma: float = 1.0      # self-reference blur strength
    mscn_sigma: float = 7.0 / 6.0
    mscn_radius: int = 3


@dataclass(frozen=True)
class GgdFit:
    """Generalized Gaussian parameters: shape (exponent) and scale (spread)."""

    shape: float
    scale: float


def mscn_transform(f: np.ndarray, window_sigma: float = 7.0 / 6.0,
                   radius: int = 3) -> np.ndarray:
    """Mean-subtracted contrast-normalized coefficients of a frame.

    Local mean and standard deviation are Gaussian-weighted over a
    ``(2*radius+1)`` square window; the divisor is stabilized by 1/255.
    """
    f = as_frame(f)
    if window_sigma <= 0:
        raise NonPositiveSigma(f"window sigma must be > 0, got {window_sigma}")
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (x / window_sigma) ** 2)
    kernel /= kernel.sum()
    mu = separable_filter(f, kernel)
    var = np.maximum(separable_filter(f * f, kernel) - mu * mu, 0.0)
    return (f - mu) / (np.sqrt(var) + 1.0 / 255.0)


def _shape_table():
    """(shape grid, matching moment-ratio values), ratio decreasing in shape."""
    shapes = np.geomspace(_SHAPE_LO, _SHAPE_HI, 4096)
    ratio = np.exp(gammaln(1.0 / shapes) + gammaln(3.0 / shapes)
                   - 2.0 * gammaln(2.0 / shapes))
    return shapes, ratio


_SHAPES, _RATIOS = _shape_table()


def fit_ggd(samples) -> GgdFit:
    """Moment-matching generalized Gaussian fit.

    Solves Gamma(1/b)*Gamma(3/b)/Gamma(2/b)^2 = E[x^2]/E[|x|]^2 for the shape
    b by binary search over a precomputed monotone table on [0.05, 10], then
    recovers the scale from the second moment. Samples are assumed centered.
    """
    s = np.asarray(samples, dtype=np.float64).ravel()
    if s.size < _MIN_GGD_SAMPLES:
        raise DegenerateSamples(f"need at least {_MIN_GGD_SAMPLES} samples, got {s.size}")
    if np.ptp(s) == 0.0:
        raise DegenerateSamples("samples have zero variance")
    m_abs = np.abs(s).mean()
    m_sq = (s * s).mean()
    target = m_sq / (m_abs * m_abs)

    # table is decreasing in shape: search on the reversed axis
    rev = _RATIOS[::-1]
    idx = int(np.searchsorted(rev, target))
    if idx <= 0:
        shape = _SHAPE_HI
    elif idx >= rev.size:
        shape = _SHAPE_LO
    else:
        lo, hi = rev[idx - 1], rev[idx]
        t = 0.0 if hi == lo else (target - lo) / (hi - lo)
        s_rev = _SHAPES[::-1]
        shape = float(s_rev[idx - 1] + t * (s_rev[idx] - s_rev[idx - 1]))
    scale = float(np.sqrt(m_sq * np.exp(gammaln(1.0 / shape) - gammaln(3.0 / shape))))
    return GgdFit(shape=shape, scale=scale)


def self_reference(processed: VideoSequence, sigma: float) -> VideoSequence:
    """Gaussian-blurred copy of every frame; geometry and count preserved."""
    if sigma <= 0:
        raise NonPositiveSigma(f"sigma must be > 0, got {sigma}")
    return processed.map_frames(lambda f: gaussian_blur(f, sigma))


def _fit_or_sentinel(values: np.ndarray) -> GgdFit:
    try:
        return fit_ggd(values)
    except DegenerateSamples:
        return GgdFit(SENTINEL_SHAPE, SENTINEL_SCALE)


def extract_nr(processed: VideoSequence,
               config: NrFeatureConfig = NrFeatureConfig()) -> dict[str, float]:
    """No-reference feature vector as an ordered name -> value mapping.

    Never consults any original video: the only second input is the blurred
    self-reference built here.
    """
    if processed.frame_count < 2:
        raise TooFewFrames("no-reference features need at least 2 frames")
    blurred = self_reference(processed, config.blur_sigma)

    s_shapes, s_scales, variances = [], [], []
    vif0, dlm0 = [], []
    for k in range(processed.frame_count):
        frame = processed.frame(k)
        coeffs = mscn_transform(frame, config.mscn_sigma, config.mscn_radius)
        fit = _fit_or_sentinel(coeffs)
        s_shapes.append(fit.shape)
        s_scales.append(fit.scale)
        variances.append(float(coeffs.var()))
        vif0.append(vif_frame_pair(blurred.frame(k), frame, n_scales=1)[0])
        per_level, _, _ = dlm_frame_pair(blurred.frame(k), frame)
        dlm0.append(per_level[0])

    t_shapes, t_scales, energies = [], [], []
    for k in range(1, processed.frame_count):
        diff = processed.frame(k) - processed.frame(k - 1)
        coeffs = mscn_transform(diff, config.mscn_sigma, config.mscn_radius)
        fit = _fit_or_sentinel(coeffs)
        t_shapes.append(fit.shape)
        t_scales.append(fit.scale)
        energies.append(float((diff * diff).mean()))

    selfsim_vif = float(np.mean(vif0))
    selfsim_dlm = float(np.mean(dlm0))
    return {
        "ggd_s_shape": float(np.mean(s_shapes)),
        "ggd_s_scale": float(np.mean(s_scales)),
        "ggd_t_shape": float(np.mean(t_shapes)),
        "ggd_t_scale": float(np.mean(t_scales)),
        "selfsim_vif": selfsim_vif,
        "selfsim_dlm": selfsim_dlm,
        "mscn_var": float(np.mean(variances)),
        "fdiff_energy": float(np.mean(energies)),
        "blur_dvif": 1.0 - selfsim_vif,
        "blur_ddlm": 1.0 - selfsim_dlm,
    }


class NoReferenceFeatures(BaseEstimator, TransformerMixin):
    """Transformer from processed sequences to the 10-dim feature matrix."""

    def __init__(self, blur_sigma: float = 1.0, mscn_sigma: float = 7.0 / 6.0,
                 mscn_radius: int = 3):
        self.blur_sigma = blur_sigma
        self.mscn_sigma = mscn_sigma
        self.mscn_radius = mscn_radius

    def _config(self) -> NrFeatureConfig:
        return NrFeatureConfig(blur_sigma=self.blur_sigma,
                               mscn_sigma=self.mscn_sigma,
                               mscn_radius=self.mscn_radius)

    def fit(self, X=None, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        config = self._config()
        return np.asarray(
            [list(extract_nr(seq, config).values()) for seq in X],
            dtype=np.float64,
        )

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        return np.asarray(NR_FEATURE_NAMES, dtype=object)
