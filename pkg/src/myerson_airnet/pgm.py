"""Portable graymap ingestion (plain P2 and raw P5).

Pixels are scaled by the file's maxval, so an 8-bit image arrives as
floats in [0, 1] ready for the valuation model.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import InputError


def _header_tokens(data: bytes):
    """Yield whitespace-separated header tokens, skipping '#' comments."""
    pos = 0
    while True:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            return
        yield data[start:pos].decode("ascii", "replace"), pos


def read_pgm(path) -> np.ndarray:
    """Read a P2 or P5 graymap into a float image in [0, 1]."""
    data = Path(path).read_bytes()
    tokens = _header_tokens(data)
    try:
        magic, _ = next(tokens)
        (width_tok, _), (height_tok, _), (maxval_tok, end) = next(tokens), next(tokens), next(tokens)
    except StopIteration:
        raise InputError(f"{path}: truncated PGM header") from None
    if magic not in ("P2", "P5"):
        raise InputError(f"{path}: not a PGM file (magic {magic!r})")
    try:
        width, height, maxval = int(width_tok), int(height_tok), int(maxval_tok)
    except ValueError:
        raise InputError(f"{path}: non-numeric PGM header") from None
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise InputError(f"{path}: bad PGM dimensions or maxval")

    count = width * height
    if magic == "P2":
        try:
            flat = np.array(data[end:].split(), dtype=float)
        except ValueError:
            raise InputError(f"{path}: non-numeric P2 pixel data") from None
    else:
        raster = data[end + 1:]  # single whitespace byte separates header and raster
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        expected = count * dtype.itemsize
        if len(raster) < expected:
            raise InputError(f"{path}: P5 raster truncated")
        flat = np.frombuffer(raster[:expected], dtype=dtype).astype(float)
    if flat.size != count:
        raise InputError(f"{path}: expected {count} pixels, found {flat.size}")
    if flat.min() < 0 or flat.max() > maxval:
        raise InputError(f"{path}: pixel values exceed maxval")
    return flat.reshape(height, width) / float(maxval)


def write_pgm(path, image, maxval: int = 255, raw: bool = True) -> None:
    """Write a [0, 1] float image as a P5 (or P2) graymap."""
    img = np.asarray(image, dtype=float)
    if img.ndim != 2 or img.size == 0:
        raise InputError("image must be a non-empty matrix")
    if not np.all(np.isfinite(img)) or img.min() < 0.0 or img.max() > 1.0:
        raise InputError("pixels must lie in [0, 1]")
    if not 0 < maxval < 65536:
        raise InputError("maxval must be in [1, 65535]")
    q = np.rint(img * maxval).astype(np.uint16)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n{maxval}\n"
    if raw:
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        Path(path).write_bytes(header.encode("ascii") + q.astype(dtype).tobytes())
    else:
        body = "\n".join(" ".join(str(v) for v in row) for row in q)
        Path(path).write_text(f"P2\n{img.shape[1]} {img.shape[0]}\n{maxval}\n{body}\n",
                              encoding="ascii")
