"""Y4M and raw planar YUV ingest.

Only the luma plane is kept; chroma planes are skipped at read time and never
stored. Samples are divided by ``2**bit_depth - 1`` so downstream math is
depth-agnostic. 10-bit input is assumed little-endian, 2 bytes per sample,
values in the low 10 bits.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .errors import MalformedHeader, SizeMismatch, TruncatedFrame, UnsupportedFormat
from .video import VideoSequence

# Accepted Y4M colorspace tags -> (chroma mode, bit depth)
_COLORSPACES = {
    "420": ("420", 8),
    "420mpeg2": ("420", 8),
    "420p10": ("420", 10),
    "mono": ("mono", 8),
}

_MAGIC = b"YUV4MPEG2"


def _open_source(source):
    """Normalize bytes / path / file-like into a binary reader."""
    if isinstance(source, (bytes, bytearray)):
        return io.BytesIO(bytes(source)), False
    if isinstance(source, (str, Path)):
        return open(source, "rb"), True
    return source, False


def _read_line(stream, limit=4096) -> bytes:
    out = bytearray()
    while len(out) < limit:
        c = stream.read(1)
        if not c:
            raise MalformedHeader("stream ended inside a header line")
        if c == b"\n":
            return bytes(out)
        out += c
    raise MalformedHeader("header line longer than 4096 bytes")


def _plane_samples(width: int, height: int, chroma: str) -> tuple[int, int]:
    """(luma samples, chroma samples per plane) for one frame."""
    if chroma == "mono":
        return width * height, 0
    return width * height, ((width + 1) // 2) * ((height + 1) // 2)


def _decode_frames(stream, width, height, chroma, bit_depth, framed: bool,
                   frame_rate: float) -> VideoSequence:
    """Shared payload loop for Y4M (framed) and raw (unframed) streams."""
    bps = 2 if bit_depth == 10 else 1
    maxval = float(2 ** bit_depth - 1)
    luma_n, chroma_n = _plane_samples(width, height, chroma)
    frame_bytes = (luma_n + 2 * chroma_n) * bps
    dtype = "<u2" if bps == 2 else np.uint8

    frames = []
    while True:
        if framed:
            marker = stream.read(5)
            if marker == b"":
                break
            if marker != b"FRAME":
                raise MalformedHeader(f"expected FRAME marker, got {marker!r}")
            params = bytearray()
            while True:
                c = stream.read(1)
                if not c:
                    raise TruncatedFrame("stream ended inside a FRAME line")
                if c == b"\n":
                    break
                params += c
        payload = stream.read(frame_bytes)
        if not framed and payload == b"":
            break
        if len(payload) < frame_bytes:
            raise TruncatedFrame(
                f"frame {len(frames)}: got {len(payload)} of {frame_bytes} bytes"
            )
        luma = np.frombuffer(payload, dtype=dtype, count=luma_n)
        plane = luma.astype(np.float64).reshape(height, width) / maxval
        frames.append(plane)

    if not frames:
        raise TruncatedFrame("stream contains no frames")
    return VideoSequence(np.stack(frames), frame_rate=frame_rate, bit_depth=bit_depth)


def read_y4m(source) -> VideoSequence:
    """Decode a YUV4MPEG2 stream into a luma-only :class:`VideoSequence`.

    ``source`` may be a path, bytes, or a binary file-like object. Supported
    colorspace tags: C420, C420mpeg2, C420p10, Cmono (default C420).
    """
    stream, owned = _open_source(source)
    try:
        magic = stream.read(len(_MAGIC))
        if magic != _MAGIC:
            raise MalformedHeader(f"bad magic {magic!r}")
        header = _read_line(stream)
        width = height = None
        fps = None
        colorspace = "420"
        for tag in header.split(b" "):
            if not tag:
                continue
            key, val = chr(tag[0]), tag[1:].decode("ascii", "replace")
            if key == "W":
                width = int(val)
            elif key == "H":
                height = int(val)
            elif key == "F":
                num, _, den = val.partition(":")
                try:
                    fps = int(num) / int(den or "1")
                except (ValueError, ZeroDivisionError) as exc:
                    raise MalformedHeader(f"bad frame rate tag F{val}") from exc
            elif key == "C":
                if val not in _COLORSPACES:
                    raise UnsupportedFormat(f"colorspace C{val} not supported")
                colorspace = val
            # I, A, X tags carry no information we use
        if width is None or height is None or width < 1 or height < 1:
            raise MalformedHeader("header missing W or H")
        if fps is None:
            raise MalformedHeader("header missing F tag")
        chroma, bit_depth = _COLORSPACES[colorspace]
        return _decode_frames(stream, width, height, chroma, bit_depth,
                              framed=True, frame_rate=fps)
    finally:
        if owned:
            stream.close()


def read_raw_yuv(source, width: int, height: int, bit_depth: int = 8,
                 chroma: str = "420", frame_rate: float = 25.0) -> VideoSequence:
    """Decode headerless planar YUV with caller-supplied geometry.

    ``chroma`` is ``"420"`` or ``"mono"``; the stream length must be an exact
    multiple of the implied frame size.
    """
    if chroma not in ("420", "mono"):
        raise UnsupportedFormat(f"chroma {chroma!r} not supported")
    if bit_depth not in (8, 10):
        raise UnsupportedFormat(f"bit depth {bit_depth} not supported")
    stream, owned = _open_source(source)
    try:
        data = stream.read()
        bps = 2 if bit_depth == 10 else 1
        luma_n, chroma_n = _plane_samples(width, height, chroma)
        frame_bytes = (luma_n + 2 * chroma_n) * bps
        if len(data) == 0 or len(data) % frame_bytes != 0:
            raise SizeMismatch(
                f"{len(data)} bytes is not a positive multiple of the "
                f"{frame_bytes}-byte frame size"
            )
        return _decode_frames(io.BytesIO(data), width, height, chroma, bit_depth,
                              framed=False, frame_rate=frame_rate)
    finally:
        if owned:
            stream.close()


def write_raw_yuv(seq: VideoSequence, sink, chroma: str = "mono") -> None:
    """Re-encode a sequence as headerless planar YUV.

    Luma samples are re-quantized with round-to-nearest at the sequence's bit
    depth. Since chroma is discarded at ingest, ``"420"`` output gets neutral
    (mid-range) chroma planes; byte-exact round trips hold for ``"mono"``.
    """
    if chroma not in ("420", "mono"):
        raise UnsupportedFormat(f"chroma {chroma!r} not supported")
    maxval = 2 ** seq.bit_depth - 1
    dtype = "<u2" if seq.bit_depth == 10 else np.uint8
    _, chroma_n = _plane_samples(seq.width, seq.height, chroma)
    neutral = np.full(chroma_n, (maxval + 1) // 2, dtype=dtype)

    own = isinstance(sink, (str, Path))
    out = open(sink, "wb") if own else sink
    try:
        for k in range(seq.frame_count):
            luma = np.clip(np.rint(seq.frame(k) * maxval), 0, maxval).astype(dtype)
            out.write(luma.tobytes())
            if chroma_n:
                out.write(neutral.tobytes())
                out.write(neutral.tobytes())
    finally:
        if own:
            out.close()
