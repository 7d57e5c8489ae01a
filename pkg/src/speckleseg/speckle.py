"""Multiplicative Gamma speckle and synthetic two-phase phantoms.

Speckle with L looks is Gamma(L, 1/L): mean 1, variance 1/L. Phantoms are
piecewise-constant two-value images with a known ground-truth mask, so
segmentation quality can be scored exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

GEOMETRIES = ("disk", "two_disks", "annulus", "rectangle")


@dataclass(frozen=True)
class SpeckleSpec:
    """Number of looks L (integer >= 1) and RNG seed."""

    looks: int
    seed: int = 0

    def __post_init__(self):
        if int(self.looks) != self.looks or self.looks < 1:
            raise InvalidInputError(f"looks must be a positive integer, got {self.looks}")


@dataclass(frozen=True)
class Phantom:
    """Piecewise-constant test image: clean, ground-truth mask, and noisy = clean * speckle."""

    clean: np.ndarray
    mask: np.ndarray
    noisy: np.ndarray


def gamma_speckle(shape, spec: SpeckleSpec) -> np.ndarray:
    """I.i.d. Gamma(L, 1/L) field of the given shape; deterministic for a fixed seed."""
    if not isinstance(spec, SpeckleSpec):
        spec = SpeckleSpec(*spec)
    rng = np.random.default_rng(spec.seed)
    return rng.gamma(shape=float(spec.looks), scale=1.0 / spec.looks, size=shape)


def _geometry_mask(shape, geometry: str) -> np.ndarray:
    h, w = shape
    m = min(h, w)
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    if geometry == "disk":
        r = 0.3 * m
        return (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
    if geometry == "two_disks":
        r = 0.18 * m
        c1x, c2x = 0.28 * (w - 1), 0.72 * (w - 1)
        d1 = (yy - cy) ** 2 + (xx - c1x) ** 2 <= r * r
        d2 = (yy - cy) ** 2 + (xx - c2x) ** 2 <= r * r
        return d1 | d2
    if geometry == "annulus":
        r_out, r_in = 0.36 * m, 0.17 * m
        rho2 = (yy - cy) ** 2 + (xx - cx) ** 2
        return (rho2 <= r_out * r_out) & (rho2 >= r_in * r_in)
    if geometry == "rectangle":
        hy, hx = 0.22 * m, 0.3 * m
        return (np.abs(yy - cy) <= hy) & (np.abs(xx - cx) <= hx)
    raise InvalidInputError(f"unknown geometry {geometry!r}; expected one of {GEOMETRIES}")


def make_phantom(shape, c1: float, c2: float, geometry: str, spec: SpeckleSpec | None) -> Phantom:
    """Two-value phantom: c1 inside the geometry, c2 outside; ``spec=None`` skips the noise.

    Raises on degenerate geometry (either region empty) and on non-positive
    or equal intensities.
    """
    if c1 <= 0 or c2 <= 0:
        raise InvalidInputError("phantom intensities must be > 0")
    if c1 == c2:
        raise InvalidInputError("phantom intensities must differ")
    mask = _geometry_mask(shape, geometry)
    n_in = int(mask.sum())
    if n_in == 0 or n_in == mask.size:
        raise InvalidInputError(f"geometry {geometry!r} degenerates on shape {shape}")
    clean = np.where(mask, float(c1), float(c2))
    if spec is None:
        noisy = clean.copy()
    else:
        noisy = clean * gamma_speckle(shape, spec)
    return Phantom(clean=clean, mask=mask.astype(np.uint8), noisy=noisy)
