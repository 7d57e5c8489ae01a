"""Segmentation quality scores: region-uniformity pp and Dice overlap."""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .grid_ops import _as_field


def pp_uniformity(f, labels) -> float:
    """Uniformity score 1 - (within-region scatter) / (total scatter).

    ``labels`` assigns each pixel to a region (0 = background, 1 =
    foreground); every region present must be nonempty. Equals 1 when each
    region is internally constant, 0 when the partition explains none of
    the intensity scatter. Constant images score 1 by convention.
    """
    f = _as_field(f, "f")
    lab = np.asarray(labels)
    if lab.shape != f.shape:
        raise InvalidInputError("labels must match the image shape")
    total = float(np.sum((f - f.mean()) ** 2))
    if total == 0.0:
        return 1.0
    within = 0.0
    for value in np.unique(lab):
        region = f[lab == value]
        if region.size == 0:
            raise InvalidInputError(f"region {value} is empty")
        within += float(np.sum((region - region.mean()) ** 2))
    return 1.0 - within / total


def dice(mask, truth) -> float:
    """Dice overlap 2|A&B| / (|A|+|B|); 1 by convention when both are empty."""
    a = np.asarray(mask).astype(bool)
    b = np.asarray(truth).astype(bool)
    if a.shape != b.shape:
        raise InvalidInputError("mask and truth must share a shape")
    sa, sb = int(a.sum()), int(b.sum())
    if sa + sb == 0:
        return 1.0
    return 2.0 * int((a & b).sum()) / (sa + sb)
