"""Building blocks of the locally statistical active-contour model.

Smoothed Heaviside/delta pair, edge-stopping function, kernel-weighted
region means, the data-force field, and edge-weighted curvature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .grid_ops import (
    KernelSpec,
    _as_field,
    convolve,
    div_adjoint,
    grad_forward,
    isef_smooth,
)

#: regularization added under |grad phi| to keep curvature total
EPS_CURV = 1e-8

#: a smoothing window is considered empty below this total weight
DENOM_CLAMP = 1e-8

DATA_TERMS = ("log", "linear")


@dataclass(frozen=True)
class ModelParams:
    """Model weights: data term mu, edge detail beta, Heaviside width eps,
    ISEF scale sigma, local-statistics kernel scale, and data-term flavor."""

    mu: float
    beta: float = 20.0
    eps: float = 1.0
    sigma: float = 15.0
    kernel_sigma: float = 3.0
    data_term: str = "log"

    def __post_init__(self):
        for name in ("mu", "beta", "eps", "sigma", "kernel_sigma"):
            if getattr(self, name) <= 0:
                raise InvalidInputError(f"{name} must be > 0")
        if self.data_term not in DATA_TERMS:
            raise InvalidInputError(f"data_term must be one of {DATA_TERMS}")


@dataclass(frozen=True)
class LocalMeans:
    """Kernel-weighted intensity means of the two regions."""

    c1: np.ndarray
    c2: np.ndarray


def stats_kernel(kernel_sigma: float) -> KernelSpec:
    """Gaussian kernel used for the local statistics, truncated at 2 sigma."""
    if kernel_sigma <= 0:
        raise InvalidInputError("kernel_sigma must be > 0")
    return KernelSpec("gaussian", kernel_sigma, int(np.ceil(2.0 * kernel_sigma)))


def heaviside_eps(phi, eps: float) -> np.ndarray:
    """Smoothed step 0.5*(1 + (2/pi)*arctan(phi/eps)); values strictly in (0, 1)."""
    if eps <= 0:
        raise InvalidInputError("eps must be > 0")
    phi = _as_field(phi, "phi")
    return 0.5 * (1.0 + (2.0 / np.pi) * np.arctan(phi / eps))


def delta_eps(phi, eps: float) -> np.ndarray:
    """Derivative of :func:`heaviside_eps`: (1/pi) * eps / (eps^2 + phi^2)."""
    if eps <= 0:
        raise InvalidInputError("eps must be > 0")
    phi = _as_field(phi, "phi")
    return (eps / np.pi) / (eps * eps + phi * phi)


def edge_detector(f, beta: float, sigma: float) -> np.ndarray:
    """Edge-stopping weight g = 1 / (1 + beta * |grad(ISEF * f)|^2), in (0, 1]."""
    if beta <= 0:
        raise InvalidInputError("beta must be > 0")
    fs = isef_smooth(f, sigma)
    gx = grad_forward(fs, "x")
    gy = grad_forward(fs, "y")
    return 1.0 / (1.0 + beta * (gx * gx + gy * gy))


def local_means(f, h_eps, kernel_sigma: float) -> LocalMeans:
    """Kernel-weighted means of f over the soft regions h and 1-h.

    Windows whose region weight is numerically empty carry no local
    information; they fall back to the region's global mean (and to the
    image mean if the region is empty everywhere) so both outputs stay
    positive and the solvers remain total.
    """
    f = _as_field(f, "f")
    h = _as_field(h_eps, "h_eps")
    if f.shape != h.shape:
        raise InvalidInputError("f and h_eps must share a shape")
    if h.min() < 0 or h.max() > 1:
        raise InvalidInputError("h_eps must lie in [0, 1]")
    k = stats_kernel(kernel_sigma)
    image_mean = float(f.mean())

    def region_mean(weight):
        num = convolve(weight * f, k)
        den = convolve(weight, k)
        total = float(weight.sum())
        fallback = float((weight * f).sum() / total) if total > 0 else image_mean
        c = num / np.maximum(den, DENOM_CLAMP)
        return np.where(den < DENOM_CLAMP, fallback, c)

    return LocalMeans(c1=region_mean(h), c2=region_mean(1.0 - h))


def region_means(f, h) -> tuple[float, float]:
    """Whole-image weighted means of f over the regions h and 1-h.

    The scalar analogue of :func:`local_means`: an empty region falls back
    to the image mean. Feeding these as constant fields into
    :func:`data_force` is exact, since normalized kernels pass constants
    through unchanged.
    """
    f = _as_field(f, "f")
    h = _as_field(h, "h")
    if f.shape != h.shape:
        raise InvalidInputError("f and h must share a shape")
    if h.min() < 0 or h.max() > 1:
        raise InvalidInputError("h must lie in [0, 1]")
    image_mean = float(f.mean())

    def mean_of(weight):
        total = float(weight.sum())
        return float((weight * f).sum() / total) if total > 0 else image_mean

    return mean_of(h), mean_of(1.0 - h)


def scalar_force(f, c1: float, c2: float, data_term: str = "log") -> np.ndarray:
    """Data force for constant region means; identical to :func:`data_force`
    on constant fields but without the (identity) convolutions."""
    f = _as_field(f, "f")
    if data_term not in DATA_TERMS:
        raise InvalidInputError(f"data_term must be one of {DATA_TERMS}")
    diff = c1 - c2
    if data_term == "log":
        if c1 <= 0 or c2 <= 0:
            raise InvalidInputError("log data term requires strictly positive means")
        return diff - f * (np.log(c1) - np.log(c2))
    return diff - f * diff


def data_force(f, means: LocalMeans, kernel_sigma: float, data_term: str = "log") -> np.ndarray:
    """Region-competition force field driving the contour.

    log variant (default): eta = K*(c1 - c2) - f * K*(log c1 - log c2),
    the force consistent with the u - f*log(u) fidelity. linear variant:
    eta = K*(c1 - c2) - f * K*(c1 - c2).
    """
    f = _as_field(f, "f")
    if data_term not in DATA_TERMS:
        raise InvalidInputError(f"data_term must be one of {DATA_TERMS}")
    k = stats_kernel(kernel_sigma)
    diff = convolve(means.c1 - means.c2, k)
    if data_term == "log":
        if np.min(means.c1) <= 0 or np.min(means.c2) <= 0:
            raise InvalidInputError("log data term requires strictly positive means")
        log_diff = convolve(np.log(means.c1) - np.log(means.c2), k)
        return diff - f * log_diff
    return diff - f * diff


def weighted_curvature(phi, g) -> np.ndarray:
    """div(g * grad(phi) / sqrt(|grad phi|^2 + EPS_CURV^2))."""
    phi = _as_field(phi, "phi")
    g = _as_field(g, "g")
    if np.min(g) <= 0:
        raise InvalidInputError("g must be strictly positive")
    gx = grad_forward(phi, "x")
    gy = grad_forward(phi, "y")
    mag = np.sqrt(gx * gx + gy * gy + EPS_CURV * EPS_CURV)
    # div is minus the adjoint of the forward gradient
    return -(div_adjoint(g * gx / mag, "x") + div_adjoint(g * gy / mag, "y"))
