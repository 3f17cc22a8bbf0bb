"""Barrier oracles for the exponential cone, vectorized over blocks.

The primal exponential cone is ``cl{(u, v, w) : v exp(u/v) <= w, v > 0}``
and its dual is ``cl{(u, v, w) : u < 0, -u exp(v/u) <= e w}``.  The
logarithmically homogeneous barrier used on the primal side is

    F(u, v, w) = -log(v log(w/v) - u) - log(v) - log(w)

with parameter 3.  All functions take arrays of shape (k, 3).
"""

from __future__ import annotations

import numpy as np

# analytic center of the primal cone: x = -grad F(x)
CENTRAL_POINT = np.array([-0.8278383990656786, 0.8051020015847954, 1.290927709856958])
BARRIER_PARAMETER = 3


def primal_interior(X: np.ndarray) -> np.ndarray:
    u, v, w = X[:, 0], X[:, 1], X[:, 2]
    ok = (v > 0) & (w > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        psi = v * np.log(w / v) - u
    return ok & (psi > 0) & np.isfinite(psi)


def dual_interior(Z: np.ndarray) -> np.ndarray:
    u, v, w = Z[:, 0], Z[:, 1], Z[:, 2]
    ok = (u < 0) & (w > 0)
    r = -u
    with np.errstate(divide="ignore", invalid="ignore"):
        gap = v / r + 1.0 + np.log(w / r)
    return ok & (gap > 0) & np.isfinite(gap)


def primal_membership_violation(X: np.ndarray) -> np.ndarray:
    """Violation of ``v exp(u/v) <= w`` relative to ``max(1, |w|)``.

    Blocks with ``v <= 0`` use the closure convention ``v = 0, u <= 0, w >= 0``.
    """
    u, v, w = X[:, 0], X[:, 1], X[:, 2]
    out = np.maximum.reduce([np.maximum(u, 0.0), np.maximum(-w, 0.0), np.maximum(-v, 0.0)])
    pos = v > 0
    with np.errstate(over="ignore"):
        lhs = v[pos] * np.exp(u[pos] / v[pos])
    out[pos] = np.maximum(lhs - w[pos], 0.0) / np.maximum(1.0, np.abs(w[pos]))
    return out


def _psi_parts(X):
    u, v, w = X[:, 0], X[:, 1], X[:, 2]
    lwv = np.log(w / v)
    psi = v * lwv - u
    dpsi = np.stack([-np.ones_like(u), lwv - 1.0, v / w], axis=1)
    return u, v, w, psi, dpsi


def gradient(X: np.ndarray) -> np.ndarray:
    _, v, w, psi, dpsi = _psi_parts(X)
    g = -dpsi / psi[:, None]
    g[:, 1] -= 1.0 / v
    g[:, 2] -= 1.0 / w
    return g


def hessian(X: np.ndarray) -> np.ndarray:
    _, v, w, psi, dpsi = _psi_parts(X)
    H = dpsi[:, :, None] * dpsi[:, None, :] / (psi**2)[:, None, None]
    # minus the Hessian of psi, divided by psi
    H[:, 1, 1] += 1.0 / (v * psi) + 1.0 / v**2
    H[:, 1, 2] -= 1.0 / (w * psi)
    H[:, 2, 1] -= 1.0 / (w * psi)
    H[:, 2, 2] += v / (w**2 * psi) + 1.0 / w**2
    return H


def hessian_split(X: np.ndarray):
    """Split ``hess F = G + g g^T / psi^2`` with ``g = grad psi``.

    Returns
    -------
    G : (k, 3, 3) array, zero in the first row and column
    g : (k, 3) array
    psi : (k,) array
    """
    _, v, w, psi, dpsi = _psi_parts(X)
    G = np.zeros((X.shape[0], 3, 3))
    G[:, 1, 1] = 1.0 / (v * psi) + 1.0 / v**2
    G[:, 1, 2] = G[:, 2, 1] = -1.0 / (w * psi)
    G[:, 2, 2] = v / (w**2 * psi) + 1.0 / w**2
    return G, dpsi, psi


def hessian_solve(X: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Solve ``hess F(x) s = r`` blockwise without forming the Hessian.

    The Hessian is ``g g^T / psi^2 + G`` with ``G`` zero in the first
    coordinate, so the first row fixes ``g.s`` and the rest is a 2x2 system
    whose determinant has a cancellation-free closed form.  This stays
    accurate when ``psi`` is tiny and the Hessian has condition ~1e17.
    """
    _, v, w, psi, dpsi = _psi_parts(X)
    ru, rv, rw = R[:, 0], R[:, 1], R[:, 2]
    g11 = 1.0 / (v * psi) + 1.0 / v**2
    g12 = -1.0 / (w * psi)
    g22 = v / (w**2 * psi) + 1.0 / w**2
    det = 2.0 / (v * w**2 * psi) + 1.0 / (v**2 * w**2)
    b1 = rv + dpsi[:, 1] * ru
    b2 = rw + dpsi[:, 2] * ru
    sv = (g22 * b1 - g12 * b2) / det
    sw = (g11 * b2 - g12 * b1) / det
    su = dpsi[:, 1] * sv + dpsi[:, 2] * sw + psi**2 * ru
    return np.stack([su, sv, sw], axis=1)


def third_order(X: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Directional third derivative ``F'''(x)[d, d]`` for each block."""
    _, v, w, psi, dpsi = _psi_parts(X)
    dv, dw = d[:, 1], d[:, 2]
    # second derivative of psi applied to d, and d^T psi'' d
    hd = np.stack([np.zeros_like(v), -dv / v + dw / w, dv / w - v * dw / w**2], axis=1)
    dhd = -dv**2 / v + 2 * dv * dw / w - v * dw**2 / w**2
    # third derivative of psi contracted twice with d
    t3 = np.stack(
        [
            np.zeros_like(v),
            dv**2 / v**2 - dw**2 / w**2,
            -2 * dv * dw / w**2 + 2 * v * dw**2 / w**3,
        ],
        axis=1,
    )
    gd = np.sum(dpsi * d, axis=1)
    out = (
        -2 * gd[:, None] ** 2 * dpsi / psi[:, None] ** 3
        + (2 * gd[:, None] * hd + dhd[:, None] * dpsi) / psi[:, None] ** 2
        - t3 / psi[:, None]
    )
    out[:, 1] += -2 * dv**2 / v**3
    out[:, 2] += -2 * dw**2 / w**3
    return out
