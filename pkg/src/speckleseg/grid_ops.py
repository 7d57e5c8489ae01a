"""Discrete differential and filtering operators on 2-D scalar fields.

A scalar field is a 2-D float array (rows = y, columns = x). Gradients use
forward differences with a homogeneous Neumann boundary (last difference
along the axis is zero); ``div_adjoint`` is the exact discrete adjoint of
``grad_forward`` under the standard inner product. Convolution and the
Laplacian reflect at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .errors import InvalidInputError

#: numpy axis for differences "along x" (columns) and "along y" (rows).
_NP_AXIS = {"x": 1, "y": 0}


def _as_field(u, name: str = "field") -> np.ndarray:
    """Validate and return ``u`` as a finite 2-D float64 array."""
    a = np.asarray(u, dtype=np.float64)
    if a.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return a


def _np_axis(axis: str) -> int:
    if axis not in _NP_AXIS:
        raise InvalidInputError(f"axis must be 'x' or 'y', got {axis!r}")
    return _NP_AXIS[axis]


@dataclass(frozen=True)
class KernelSpec:
    """Separable smoothing kernel: ``gaussian`` or ``isef``, scale sigma, half-width radius."""

    kind: str
    sigma: float
    radius: int

    def __post_init__(self):
        if self.kind not in ("gaussian", "isef"):
            raise InvalidInputError(f"unknown kernel kind {self.kind!r}")
        if self.sigma <= 0:
            raise InvalidInputError("kernel sigma must be > 0")
        if self.radius < 0:
            raise InvalidInputError("kernel radius must be >= 0")

    def weights(self) -> np.ndarray:
        """Normalized 1-D weights on offsets -radius..radius (sum exactly 1)."""
        x = np.arange(-self.radius, self.radius + 1, dtype=np.float64)
        if self.kind == "gaussian":
            w = np.exp(-(x * x) / (2.0 * self.sigma**2))
        else:
            w = np.exp(-np.abs(x) / self.sigma)
        return w / w.sum()


def grad_forward(u, axis: str) -> np.ndarray:
    """Forward difference u[i+1]-u[i] along ``axis``; last sample along the axis is 0."""
    u = _as_field(u)
    ax = _np_axis(axis)
    if u.shape[ax] < 2:
        raise InvalidInputError(f"need >= 2 samples along axis {axis}")
    g = np.zeros_like(u)
    if ax == 1:
        g[:, :-1] = u[:, 1:] - u[:, :-1]
    else:
        g[:-1, :] = u[1:, :] - u[:-1, :]
    return g


def div_adjoint(p, axis: str) -> np.ndarray:
    """Exact adjoint of :func:`grad_forward`: <grad u, p> == <u, div_adjoint(p)>.

    Interior: p[i-1]-p[i] along the axis; first sample -p[0], last +p[n-2]
    (the last component of p never enters the pairing and is dropped).
    """
    p = _as_field(p)
    ax = _np_axis(axis)
    if p.shape[ax] < 2:
        raise InvalidInputError(f"need >= 2 samples along axis {axis}")
    d = np.empty_like(p)
    if ax == 1:
        d[:, 0] = -p[:, 0]
        d[:, 1:-1] = p[:, :-2] - p[:, 1:-1]
        d[:, -1] = p[:, -2]
    else:
        d[0, :] = -p[0, :]
        d[1:-1, :] = p[:-2, :] - p[1:-1, :]
        d[-1, :] = p[-2, :]
    return d


def laplacian(u) -> np.ndarray:
    """5-point Laplacian with reflective (Neumann) boundary handling."""
    u = _as_field(u)
    if u.shape[0] < 3 or u.shape[1] < 3:
        raise InvalidInputError("laplacian needs a field of at least 3x3")
    up = np.pad(u, 1, mode="edge")
    return (
        up[:-2, 1:-1] + up[2:, 1:-1] + up[1:-1, :-2] + up[1:-1, 2:] - 4.0 * u
    )


def convolve(u, k: KernelSpec) -> np.ndarray:
    """Separable 2-D convolution with the normalized kernel; boundaries reflect."""
    u = _as_field(u)
    if k.radius >= min(u.shape):
        raise InvalidInputError(
            f"kernel radius {k.radius} too large for shape {u.shape}"
        )
    if k.radius == 0:
        return u.copy()
    w = k.weights()
    # Symmetric weights: correlation equals convolution.
    out = correlate1d(u, w, axis=0, mode="reflect")
    return correlate1d(out, w, axis=1, mode="reflect")


def isef_smooth(u, sigma: float) -> np.ndarray:
    """Smooth with the 15x15 infinite symmetric exponential filter of scale sigma."""
    if sigma <= 0:
        raise InvalidInputError("sigma must be > 0")
    return convolve(u, KernelSpec("isef", sigma, radius=7))
