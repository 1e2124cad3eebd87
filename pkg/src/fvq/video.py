"""Frame sequences and pixel-level primitives.

A frame is a 2-D ``float64`` array of luma samples, row-major, normally in
``[0, 1]`` (difference frames may be signed). A :class:`VideoSequence` packs
frames into one read-only ``(K, H, W)`` array plus stream metadata; all types
are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatch, FrameTooSmall, NonPositiveSigma

# 5-tap binomial low-pass used by the fixed 2x pyramid step.
_PYRAMID_KERNEL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


def as_frame(obj) -> np.ndarray:
    """Validate and coerce ``obj`` into a 2-D float64 frame array."""
    f = np.asarray(obj, dtype=np.float64)
    if f.ndim != 2:
        raise DimensionMismatch(f"frame must be 2-D, got shape {f.shape}")
    if not np.all(np.isfinite(f)):
        raise DimensionMismatch("frame contains non-finite samples")
    return f


def check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"frame shapes differ: {a.shape} vs {b.shape}")


@dataclass(frozen=True)
class VideoSequence:
    """Ordered luma frames with stream metadata.

    ``data`` has shape ``(frame_count, height, width)``; samples are
    normalized to ``[0, 1]`` at ingest regardless of source bit depth.
    The array is frozen (non-writeable) after construction.
    """

    data: np.ndarray
    frame_rate: float = 25.0
    bit_depth: int = 8

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3:
            raise DimensionMismatch(
                f"sequence data must be (frames, height, width), got {arr.shape}"
            )
        if arr.shape[0] < 1:
            raise DimensionMismatch("sequence needs at least one frame")
        if not np.all(np.isfinite(arr)):
            raise DimensionMismatch("sequence contains non-finite samples")
        arr = arr.copy() if arr is self.data else arr
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def frame_count(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    def frame(self, k: int) -> np.ndarray:
        """Frame ``k`` as a read-only 2-D view."""
        return self.data[k]

    def map_frames(self, fn) -> "VideoSequence":
        """New sequence with ``fn`` applied to every frame."""
        return VideoSequence(
            data=np.stack([fn(self.data[k]) for k in range(self.frame_count)]),
            frame_rate=self.frame_rate,
            bit_depth=self.bit_depth,
        )


def check_aligned(a: VideoSequence, b: VideoSequence) -> None:
    """Require equal geometry and frame count."""
    if a.data.shape != b.data.shape:
        raise DimensionMismatch(
            f"sequences not aligned: {a.data.shape} vs {b.data.shape}"
        )


def frame_diff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Element-wise ``a - b``. Output is signed; the [0,1] range is waived."""
    a = as_frame(a)
    b = as_frame(b)
    check_same_shape(a, b)
    return a - b


def gaussian_kernel_1d(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian taps with radius ``ceil(3*sigma)``."""
    if sigma <= 0:
        raise NonPositiveSigma(f"sigma must be > 0, got {sigma}")
    radius = int(np.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def separable_filter(f: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Apply a symmetric 1-D kernel along both axes, reflect boundaries."""
    out = ndimage.correlate1d(f, kernel, axis=0, mode="reflect")
    return ndimage.correlate1d(out, kernel, axis=1, mode="reflect")


def gaussian_blur(f: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur with reflect boundary handling."""
    f = as_frame(f)
    return separable_filter(f, gaussian_kernel_1d(sigma))


def downsample_2x(f: np.ndarray) -> np.ndarray:
    """Binomial low-pass then decimate by 2; output dims are floor(dim/2)."""
    f = as_frame(f)
    if f.shape[0] < 2 or f.shape[1] < 2:
        raise FrameTooSmall(f"cannot halve a {f.shape} frame")
    low = separable_filter(f, _PYRAMID_KERNEL)
    # Odd decimation phase yields exactly floor(n/2) samples per axis.
    return low[1::2, 1::2]
