import numpy as np
import pytest

from speckleseg.errors import InvalidInputError
from speckleseg.grid_ops import (
    KernelSpec,
    convolve,
    div_adjoint,
    grad_forward,
    isef_smooth,
    laplacian,
)


# ---------------------------------------------------------------------------
# Independent oracles: plain double loops, no shared code with the operators.
# ---------------------------------------------------------------------------

def forward_diff_loop(u, axis):
    h, w = u.shape
    out = np.zeros_like(u)
    for i in range(h):
        for j in range(w):
            if axis == "x" and j < w - 1:
                out[i, j] = u[i, j + 1] - u[i, j]
            elif axis == "y" and i < h - 1:
                out[i, j] = u[i + 1, j] - u[i, j]
    return out


def inner_loop(a, b):
    s = 0.0
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            s += a[i, j] * b[i, j]
    return s


def laplacian_loop(u):
    h, w = u.shape
    out = np.zeros_like(u)
    for i in range(h):
        for j in range(w):
            im = max(i - 1, 0)
            ip = min(i + 1, h - 1)
            jm = max(j - 1, 0)
            jp = min(j + 1, w - 1)
            out[i, j] = u[im, j] + u[ip, j] + u[i, jm] + u[i, jp] - 4 * u[i, j]
    return out


def convolve_loop(u, weights):
    # Dense 2-D summation with reflected indexing ("edge of the mirror").
    h, w = u.shape
    r = (len(weights) - 1) // 2
    k2 = np.outer(weights, weights)
    out = np.zeros_like(u)
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for di in range(-r, r + 1):
                for dj in range(-r, r + 1):
                    # 'reflect' mirrors about the edge: index -1 -> 0,
                    # -2 -> 1, h -> h-1, h+1 -> h-2.
                    ii = i + di
                    if ii < 0:
                        ii = -ii - 1
                    if ii > h - 1:
                        ii = 2 * h - 1 - ii
                    jj = j + dj
                    if jj < 0:
                        jj = -jj - 1
                    if jj > w - 1:
                        jj = 2 * w - 1 - jj
                    acc += k2[di + r, dj + r] * u[ii, jj]
            out[i, j] = acc
    return out


# ---------------------------------------------------------------------------
# grad_forward
# ---------------------------------------------------------------------------

def test_grad_constant_is_zero():
    u = np.full((5, 4), 3.7)
    for axis in ("x", "y"):
        assert np.all(grad_forward(u, axis) == 0.0)


def test_grad_ramp_x():
    u = np.tile(np.arange(6.0), (4, 1))
    g = grad_forward(u, "x")
    assert np.all(g[:, :-1] == 1.0)
    assert np.all(g[:, -1] == 0.0)


def test_grad_matches_loop_oracle():
    rng = np.random.default_rng(0)
    u = rng.normal(size=(3, 3))
    for axis in ("x", "y"):
        np.testing.assert_allclose(grad_forward(u, axis), forward_diff_loop(u, axis))


def test_grad_rejects_thin_axis():
    u = np.ones((1, 5))
    with pytest.raises(InvalidInputError):
        grad_forward(u, "y")
    with pytest.raises(InvalidInputError):
        grad_forward(np.ones((5, 1)), "x")


# ---------------------------------------------------------------------------
# div_adjoint
# ---------------------------------------------------------------------------

def test_adjoint_zero_field():
    z = np.zeros((4, 4))
    for axis in ("x", "y"):
        assert np.all(div_adjoint(z, axis) == 0.0)


def test_adjoint_identity_random_4x4():
    rng = np.random.default_rng(1)
    u = rng.normal(size=(4, 4))
    p = rng.normal(size=(4, 4))
    for axis in ("x", "y"):
        lhs = inner_loop(grad_forward(u, axis), p)
        rhs = inner_loop(u, div_adjoint(p, axis))
        assert abs(lhs - rhs) <= 1e-12


def test_adjoint_of_constant_one():
    # Hand-derived adjoint of the Neumann forward difference: interior 0,
    # first column -1, last column +1.
    p = np.ones((4, 4))
    d = div_adjoint(p, "x")
    assert np.all(d[:, 0] == -1.0)
    assert np.all(d[:, 1:-1] == 0.0)
    assert np.all(d[:, -1] == 1.0)


def test_adjoint_identity_many_shapes():
    rng = np.random.default_rng(2)
    for shape in [(4, 4), (7, 5), (16, 16)]:
        for _ in range(200):
            u = rng.normal(size=shape)
            p = rng.normal(size=shape)
            for axis in ("x", "y"):
                lhs = float(np.sum(grad_forward(u, axis) * p))
                rhs = float(np.sum(u * div_adjoint(p, axis)))
                assert abs(lhs - rhs) <= 1e-10


# ---------------------------------------------------------------------------
# laplacian
# ---------------------------------------------------------------------------

def test_laplacian_constant():
    assert np.all(laplacian(np.full((5, 5), 2.5)) == 0.0)


def test_laplacian_quadratic_interior():
    i = np.arange(7.0)
    u = np.tile((i**2)[:, None], (1, 7))
    lap = laplacian(u)
    assert np.allclose(lap[1:-1, 1:-1], 2.0)


def test_laplacian_matches_stencil_loop():
    rng = np.random.default_rng(3)
    u = rng.normal(size=(3, 3))
    np.testing.assert_allclose(laplacian(u), laplacian_loop(u))


def test_laplacian_rejects_small():
    with pytest.raises(InvalidInputError):
        laplacian(np.ones((2, 5)))


# ---------------------------------------------------------------------------
# convolve / kernels
# ---------------------------------------------------------------------------

def test_kernel_weights_sum_to_one():
    for kind in ("gaussian", "isef"):
        for sigma, radius in [(0.5, 2), (1.0, 3), (3.0, 6), (15.0, 7)]:
            w = KernelSpec(kind, sigma, radius).weights()
            assert np.all(w >= 0)
            assert abs(w.sum() - 1.0) <= 1e-12


def test_convolve_constant_preserved():
    u = np.full((8, 8), 4.2)
    out = convolve(u, KernelSpec("gaussian", 1.0, 2))
    np.testing.assert_allclose(out, u, atol=1e-12)


def test_convolve_radius_zero_identity():
    rng = np.random.default_rng(4)
    u = rng.normal(size=(5, 6))
    np.testing.assert_allclose(convolve(u, KernelSpec("gaussian", 1.0, 0)), u)


def test_convolve_impulse_matches_dense_oracle():
    u = np.zeros((5, 5))
    u[2, 2] = 1.0
    k = KernelSpec("gaussian", 1.0, 2)
    out = convolve(u, k)
    w = k.weights()
    np.testing.assert_allclose(out, np.outer(w, w), atol=1e-14)
    np.testing.assert_allclose(out, convolve_loop(u, w), atol=1e-14)


def test_convolve_random_matches_dense_oracle():
    rng = np.random.default_rng(5)
    u = rng.normal(size=(7, 6))
    k = KernelSpec("isef", 2.0, 3)
    np.testing.assert_allclose(convolve(u, k), convolve_loop(u, k.weights()), atol=1e-12)


def test_convolve_linear():
    rng = np.random.default_rng(6)
    u = rng.normal(size=(9, 9))
    v = rng.normal(size=(9, 9))
    k = KernelSpec("gaussian", 2.0, 4)
    lhs = convolve(2.0 * u - 3.0 * v, k)
    rhs = 2.0 * convolve(u, k) - 3.0 * convolve(v, k)
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_convolve_rejects_oversized_kernel():
    with pytest.raises(InvalidInputError):
        convolve(np.ones((4, 4)), KernelSpec("gaussian", 2.0, 4))


# ---------------------------------------------------------------------------
# isef_smooth
# ---------------------------------------------------------------------------

def test_isef_constant_preserved():
    u = np.full((16, 16), 7.0)
    np.testing.assert_allclose(isef_smooth(u, 15.0), u, atol=1e-12)


def test_isef_weights_symmetric():
    w = KernelSpec("isef", 15.0, 7).weights()
    np.testing.assert_allclose(w, w[::-1])


def test_isef_center_to_neighbor_ratio():
    # Analytic profile before normalization: w(0)/w(1) = e^{1/sigma}.
    sigma = 3.0
    w = KernelSpec("isef", sigma, 7).weights()
    assert abs(w[7] / w[8] - np.exp(1.0 / sigma)) <= 1e-12


def test_operators_reject_nonfinite():
    u = np.ones((4, 4))
    u[1, 1] = np.nan
    with pytest.raises(InvalidInputError):
        grad_forward(u, "x")
