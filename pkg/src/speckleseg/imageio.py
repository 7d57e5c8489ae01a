"""Image file I/O: PGM (P2/P5) read/write, grayscale PNG read, overlay PNG write."""

from __future__ import annotations

import numpy as np
from PIL import Image

from .errors import InvalidInputError


def quantize_u8(field, lo: int = 0) -> np.ndarray:
    """Round and clip a real field into [lo, 255] as uint8."""
    return np.clip(np.rint(np.asarray(field, dtype=np.float64)), lo, 255).astype(np.uint8)


def phi_to_u8(phi) -> np.ndarray:
    """Min-max rescale a level set to the 0-255 range (constant fields -> 0)."""
    phi = np.asarray(phi, dtype=np.float64)
    lo, hi = float(phi.min()), float(phi.max())
    if hi <= lo:
        return np.zeros(phi.shape, dtype=np.uint8)
    return np.rint((phi - lo) / (hi - lo) * 255.0).astype(np.uint8)


def write_pgm(path, image, plain: bool = False) -> None:
    """Write an 8-bit grayscale PGM; binary P5 by default, ASCII P2 if plain."""
    img = np.asarray(image)
    if img.ndim != 2:
        raise InvalidInputError("PGM image must be 2-D")
    if img.dtype != np.uint8:
        if img.min() < 0 or img.max() > 255:
            raise InvalidInputError("PGM values must fit in 0..255")
        img = img.astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as fh:
        if plain:
            fh.write(f"P2\n{w} {h}\n255\n".encode("ascii"))
            for row in img:
                fh.write((" ".join(str(int(v)) for v in row) + "\n").encode("ascii"))
        else:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(img.tobytes())


def _read_pgm_tokens(data: bytes, count: int):
    """Yield the first ``count`` whitespace-separated header tokens, skipping
    '#' comments; returns (tokens, offset past the final separator)."""
    tokens = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i : i + 1] == b"#":
            while i < n and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        start = i
        while i < n and not data[i : i + 1].isspace() and data[i : i + 1] != b"#":
            i += 1
        if start == i:
            raise InvalidInputError("truncated PGM header")
        tokens.append(data[start:i])
    return tokens, i + 1  # single whitespace after maxval


def read_pgm(path) -> np.ndarray:
    """Read a P2 or P5 PGM with maxval <= 255 into a uint8 array."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:2] not in (b"P2", b"P5"):
        raise InvalidInputError(f"{path}: not a P2/P5 PGM file")
    magic = data[:2]
    tokens, offset = _read_pgm_tokens(data[2:], 3)
    w, h, maxval = (int(t) for t in tokens)
    if w < 1 or h < 1:
        raise InvalidInputError(f"{path}: bad PGM dimensions {w}x{h}")
    if not 0 < maxval <= 255:
        raise InvalidInputError(f"{path}: unsupported PGM maxval {maxval}")
    if magic == b"P5":
        raster = data[2 + offset :]
        if len(raster) < w * h:
            raise InvalidInputError(f"{path}: truncated PGM raster")
        return np.frombuffer(raster[: w * h], dtype=np.uint8).reshape(h, w).copy()
    values = data[2 + offset - 1 :].split()
    if len(values) < w * h:
        raise InvalidInputError(f"{path}: truncated PGM raster")
    arr = np.array([int(v) for v in values[: w * h]], dtype=np.int64)
    if arr.min() < 0 or arr.max() > maxval:
        raise InvalidInputError(f"{path}: PGM sample out of range")
    return arr.astype(np.uint8).reshape(h, w)


def read_image(path) -> np.ndarray:
    """Read a grayscale image (PGM P2/P5 or 8-bit PNG) as a uint8 array."""
    p = str(path)
    if p.lower().endswith((".pgm", ".pnm")):
        return read_pgm(p)
    with Image.open(p) as im:
        if im.mode != "L":
            im = im.convert("L")
        return np.asarray(im, dtype=np.uint8)


def mask_boundary(mask) -> np.ndarray:
    """Mask pixels with a 4-neighbor outside the mask (the drawn contour)."""
    m = np.asarray(mask).astype(bool)
    inner = np.pad(m, 1, mode="edge")
    surrounded = (
        inner[:-2, 1:-1] & inner[2:, 1:-1] & inner[1:-1, :-2] & inner[1:-1, 2:]
    )
    return m & ~surrounded


def write_overlay_png(path, base, mask, color=(255, 0, 0)) -> None:
    """Write the grayscale base as RGB with the mask contour drawn in color."""
    base_u8 = np.asarray(base)
    if base_u8.dtype != np.uint8:
        base_u8 = quantize_u8(base_u8)
    rgb = np.stack([base_u8] * 3, axis=-1)
    contour = mask_boundary(mask)
    rgb[contour] = np.array(color, dtype=np.uint8)
    Image.fromarray(rgb, mode="RGB").save(path, format="PNG")
