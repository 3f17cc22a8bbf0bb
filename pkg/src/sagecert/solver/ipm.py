"""Primal-dual interior-point method on the homogeneous self-dual embedding.

The iterate ``(x, y, z, tau, kappa)`` tracks the central path of

    A x - b tau = 0,   c tau - A^T y - z = 0,   b^T y - c^T x - kappa = 0,
    x in K,  z in K*,  tau, kappa >= 0,

so that optimality (``tau > 0``) and infeasibility certificates
(``kappa > 0``) emerge from the same iteration.  Each iteration factors one
quasi-definite KKT matrix, computes a predictor and a centering direction
and line-searches along their combination while keeping every cone inside a
proximity neighborhood of the central path.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import cones
from .program import ConeProgram

log = logging.getLogger(__name__)

OPTIMAL = "Optimal"
PRIMAL_INFEASIBLE = "PrimalInfeasible"
DUAL_INFEASIBLE = "DualInfeasible"
ILL_POSED = "IllPosed"
ITER_LIMIT = "IterLimit"

_STEPS = (1.0, 0.99, 0.97, 0.95, 0.9, 0.85, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.02)
_SIGMAS = (0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9)


@dataclass
class SolverOptions:
    """Tolerances and limits for :func:`solve`.

    ``feastol``, ``abstol`` and ``reltol`` define an optimal solution.  When
    ``target_tol`` is set the method keeps iterating until all three
    measures fall below it, and falls back to the best iterate meeting the
    regular tolerances if progress stalls first.
    """

    feastol: float = 1e-8
    abstol: float = 1e-8
    reltol: float = 1e-8
    infeastol: float = 1e-9
    max_iter: int = 200
    regularization: float = 1e-10
    refine_steps: int = 2
    ruiz_passes: int = 3
    neighborhood: float = 0.99
    target_tol: float | None = None
    stall_iters: int = 8
    verbose: bool = False


@dataclass
class Solution:
    """Result of :func:`solve`.

    For ``Optimal`` the points satisfy ``A x = b``, ``c - A^T y = z``.  For
    ``PrimalInfeasible``, ``(y, z)`` is a Farkas ray normalized to
    ``b^T y = 1`` with ``A^T y + z = 0`` and ``z in K*``.  For
    ``DualInfeasible``, ``x`` is a ray in ``K`` with ``A x = 0`` and
    ``c^T x = -1``.
    """

    status: str
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    primal_objective: float = np.nan
    dual_objective: float = np.nan
    primal_residual: float = np.nan
    dual_residual: float = np.nan
    gap: float = np.nan
    iterations: int = 0
    solve_time: float = 0.0
    info: dict = field(default_factory=dict)


class _Cone:
    """Index bookkeeping and barrier evaluations for a cone product."""

    def __init__(self, prog: ConeProgram):
        self.free, self.lp, self.exp = prog.index_sets()
        self.n = prog.n
        self.nu = self.lp.size + cones.BARRIER_PARAMETER * len(self.exp)
        mask = np.ones(self.n, dtype=bool)
        mask[self.free] = False
        self.conic = mask

    def initial(self):
        x = np.zeros(self.n)
        x[self.lp] = 1.0
        x[self.exp] = cones.CENTRAL_POINT
        return x, x.copy()

    def interior(self, x, z):
        if np.any(x[self.lp] <= 0) or np.any(z[self.lp] <= 0):
            return False
        if len(self.exp):
            X, Z = x[self.exp], z[self.exp]
            if not (cones.primal_interior(X).all() and cones.dual_interior(Z).all()):
                return False
        return True

    def gradient(self, x):
        g = np.zeros(self.n)
        g[self.lp] = -1.0 / x[self.lp]
        if len(self.exp):
            g[self.exp] = cones.gradient(x[self.exp])
        return g

    def proximity(self, x, z, mu, tau_kappa=None):
        """Local norm of ``z / mu + grad F(x)`` summed over all cones.

        This is the Newton decrement of the centering problem; the tau-kappa
        pair enters like an orthant coordinate when given.
        """
        total = 0.0
        if self.lp.size:
            total += float(np.sum((x[self.lp] * z[self.lp] / mu - 1.0) ** 2))
        if tau_kappa is not None:
            total += (tau_kappa / mu - 1.0) ** 2
        if len(self.exp):
            X = x[self.exp]
            r = z[self.exp] / mu + cones.gradient(X)
            q = np.einsum("ij,ij->i", r, cones.hessian_solve(X, r))
            if np.any(~np.isfinite(q)):
                return np.inf
            total += float(np.sum(np.abs(q)))
        return float(np.sqrt(total))

    def scaling(self, x, z, mu):
        """Pieces of the block diagonal scaling ``M``.

        ``M`` is ``z/x`` on the orthant and ``mu * hess F(x)`` on exp blocks.
        The exp part is kept as ``mu G + g g^T mu / psi^2``; the rank-one
        term is lifted into an extra variable per block so the KKT matrix
        never holds entries of size ``1/psi^2``.
        """
        rows, cols, vals = [self.lp], [self.lp], [z[self.lp] / x[self.lp]]
        lift = None
        if len(self.exp):
            G, g, psi = cones.hessian_split(x[self.exp])
            E = self.exp
            rows.append(np.repeat(E, 3, axis=1).ravel())
            cols.append(np.tile(E, (1, 3)).ravel())
            vals.append((mu * G).ravel())
            lift = (g, psi**2 / mu, mu * G)
        return (np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)), lift

    def apply_scaling(self, x, z, lift, d, sigma):
        """``M d`` given the lifted multipliers ``sigma = mu g^T d / psi^2``."""
        out = np.zeros(self.n)
        out[self.lp] = z[self.lp] / x[self.lp] * d[self.lp]
        if len(self.exp):
            g, _, muG = lift
            out[self.exp] = np.einsum("kij,kj->ki", muG, d[self.exp]) + g * sigma[:, None]
        return out


def _ruiz(A, cone: _Cone, passes: int):
    """Row and column equilibration respecting the cone blocks."""
    p, n = A.shape
    row = np.ones(p)
    col = np.ones(n)
    S = A.copy().tocsc()
    if p == 0 or n == 0 or S.nnz == 0:
        return S.tocsr(), row, col
    group = np.arange(n)
    for blk in cone.exp:
        group[blk] = blk[0]
    for _ in range(passes):
        absS = abs(S)
        cn = np.asarray(absS.max(axis=0).todense()).ravel()
        # one factor per exponential block keeps the cone invariant
        gmax = np.zeros(n)
        np.maximum.at(gmax, group, cn)
        cn = gmax[group]
        rn = np.asarray(absS.max(axis=1).todense()).ravel()
        cs = 1.0 / np.sqrt(np.where(cn > 0, cn, 1.0))
        rs = 1.0 / np.sqrt(np.where(rn > 0, rn, 1.0))
        S = sp.diags(rs) @ S @ sp.diags(cs)
        row *= rs
        col *= cs
    return S.tocsr(), row, col


def _kkt_solver(A, M, lift, exp_idx, n, p, reg, refine):
    """Factor the lifted KKT matrix.

    Unknowns are ``(dx, sigma, dy)`` with rows
    ``M0 dx + B^T sigma + A^T dy``, ``B dx - D sigma`` and ``A dx`` where
    ``B`` stacks the vectors ``g`` of the exp blocks and ``D = psi^2/mu``.
    """
    Mrows, Mcols, Mvals = M
    k = len(exp_idx)
    M0 = sp.coo_matrix((Mvals, (Mrows, Mcols)), shape=(n, n)).tocsr()
    if k:
        g, dvals, _ = lift
        B = sp.coo_matrix(
            (g.ravel(), (np.repeat(np.arange(k), 3), exp_idx.ravel())), shape=(k, n)
        ).tocsr()
        K = sp.bmat([[M0, B.T, A.T], [B, -sp.diags(dvals), None], [A, None, None]], format="csc")
    else:
        K = sp.bmat([[M0, A.T], [A, None]], format="csc")
    D = sp.diags(np.concatenate([np.full(n, reg), np.full(k + p, -reg)]))
    lu = spla.splu((K + D).tocsc(), permc_spec="COLAMD", diag_pivot_thresh=0.1)

    def solve(r1, r2):
        rhs = np.concatenate([r1, np.zeros(k), r2])
        sol = lu.solve(rhs)
        for _ in range(refine):
            sol = sol + lu.solve(rhs - K @ sol)
        return sol[:n], sol[n : n + k], sol[n + k :]

    return solve


def solve(prog: ConeProgram, options: SolverOptions | None = None) -> Solution:
    """Solve a :class:`ConeProgram` with the homogeneous self-dual method.

    Parameters
    ----------
    prog : ConeProgram
    options : SolverOptions, optional

    Returns
    -------
    Solution
        Never raises for numerical trouble; inspect ``status`` instead.
    """
    opts = options or SolverOptions()
    t0 = time.perf_counter()
    prog.check()
    cone = _Cone(prog)
    n = prog.n

    # presolve: drop empty rows, detect trivially inconsistent ones
    A0 = prog.A.tocsr()
    b0 = prog.b
    row_nnz = np.diff(A0.indptr)
    empty = row_nnz == 0
    bscale = max(1.0, np.max(np.abs(b0), initial=0.0))
    bad = empty & (np.abs(b0) > opts.feastol * bscale)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        y = np.zeros(b0.size)
        y[i] = 1.0 / b0[i]
        sol = Solution(PRIMAL_INFEASIBLE, np.zeros(n), y, np.zeros(n), iterations=0)
        sol.info["reason"] = f"empty row {i} with nonzero right-hand side"
        sol.solve_time = time.perf_counter() - t0
        return sol
    keep = np.flatnonzero(~empty)
    A = A0[keep]
    b = b0[keep]
    c = prog.c
    p = b.size

    As, rs, cs = _ruiz(A, cone, opts.ruiz_passes)
    bs = rs * b
    csc = cs * c
    AsT = As.T.tocsr()
    A0T = A.T.tocsr()

    cnorm = max(1.0, np.max(np.abs(c), initial=0.0))
    bnorm = max(1.0, np.max(np.abs(b), initial=0.0))

    x, z = cone.initial()
    y = np.zeros(p)
    tau = kappa = 1.0
    nu1 = cone.nu + 1

    def unscale(x, y, z):
        return cs * x, rs * y, z / cs

    status = ITER_LIMIT
    it = 0
    info = {}
    best = None
    best_met = None
    anchor = (np.inf, 0)  # last iteration with a twofold improvement
    for it in range(opts.max_iter + 1):
        mu = (x @ z + tau * kappa) / nu1
        # convergence checks on the unscaled problem
        xu, yu, zu = unscale(x, y, z)
        xh, yh, zh = xu / tau, yu / tau, zu / tau
        pres = np.max(np.abs(A @ xh - b), initial=0.0) / bnorm
        dres_vec = c - A0T @ yh - zh
        dres = np.max(np.abs(dres_vec), initial=0.0) / cnorm
        pobj = c @ xh
        dobj = b @ yh
        gap = abs(pobj - dobj)
        if opts.verbose:
            log.info(
                "it %3d pobj %+.9e dobj %+.9e pres %.2e dres %.2e gap %.2e tau %.2e kap %.2e mu %.2e",
                it, pobj, dobj, pres, dres, gap, tau, kappa, mu,
            )
        scale = max(1.0, min(abs(pobj), abs(dobj)))
        met = pres <= opts.feastol and dres <= opts.feastol and (
            gap <= opts.abstol or gap <= opts.reltol * min(abs(pobj), abs(dobj))
        )
        tight = opts.target_tol is None or (
            pres <= opts.target_tol and dres <= opts.target_tol and gap <= opts.target_tol * scale
        )
        score = max(pres, dres, gap / scale)
        if met and (best_met is None or score < best_met[0]):
            best_met = (score, x.copy(), y.copy(), z.copy(), tau, kappa, it)
        if met and tight:
            status = OPTIMAL
            break
        if score < 0.5 * anchor[0]:
            anchor = (score, it)
        if best_met is not None and it - anchor[1] >= opts.stall_iters:
            info["reduced_accuracy"] = True
            break
        # certificates of infeasibility
        by = b @ yu
        if by > 0 and tau < kappa:
            r = np.max(np.abs(A0T @ yu + zu), initial=0.0) / by
            if r <= opts.infeastol * cnorm:
                status = PRIMAL_INFEASIBLE
                break
        cx = c @ xu
        if cx < 0 and tau < kappa:
            r = np.max(np.abs(A @ xu), initial=0.0) / (-cx)
            if r <= opts.infeastol * bnorm:
                status = DUAL_INFEASIBLE
                break
        if best is None or score < best[0]:
            best = (score, x.copy(), y.copy(), z.copy(), tau, kappa)
        if it == opts.max_iter:
            break

        # residuals of the scaled embedding
        rp = As @ x - bs * tau
        rd = csc * tau - AsT @ y - z
        rg = bs @ y - csc @ x - kappa

        try:
            M, lift = cone.scaling(x, z, mu)
            kkt = _kkt_solver(As, M, lift, cone.exp, n, p, opts.regularization, opts.refine_steps)
        except (RuntimeError, ValueError, FloatingPointError) as exc:
            info["failure"] = f"factorization failed: {exc}"
            status = ILL_POSED
            break

        g = cone.gradient(x)
        p1, s1, q1 = kkt(-csc, bs)
        denom = kappa / tau - bs @ q1 - csc @ p1

        def direction(eta, zeta, zeta_tau):
            zeta = zeta.copy()
            zeta[cone.free] = 0.0
            r1 = -eta * rd - zeta
            r2 = -eta * rp
            r3 = -eta * rg - zeta_tau / tau
            p2, s2, q2 = kkt(r1, r2)
            dtau = (r3 + bs @ q2 + csc @ p2) / denom
            dx = p2 + dtau * p1
            dy = -(q2 + dtau * q1)
            dz = -zeta - cone.apply_scaling(x, z, lift, dx, s2 + dtau * s1)
            dz[cone.free] = 0.0
            dkap = (-zeta_tau - kappa * dtau) / tau
            return dx, dy, dz, dtau, dkap

        pred = direction(1.0, z, tau * kappa)
        cent = direction(0.0, z + mu * g, tau * kappa - mu)

        state = (x, y, z, tau, kappa)

        def along(d, a):
            return tuple(v + a * dv for v, dv in zip(state, d))

        def blend(sigma):
            return tuple((1.0 - sigma) * dp + sigma * dc for dp, dc in zip(pred, cent))

        # affine step length sets the first centering weight
        a_aff = 0.0
        for a in _STEPS:
            if _acceptable(cone, along(pred, a), nu1, np.inf):
                a_aff = a
                break
        sigmas = sorted({min(1.0, max(0.01, (1.0 - a_aff) ** 3)), *_SIGMAS})
        accepted, reduction, alpha = None, 0.0, 0.0
        for sigma in sigmas:
            d = blend(sigma)
            for a in _STEPS:
                if a * (1.0 - sigma) <= reduction:
                    break
                cand = along(d, a)
                if _acceptable(cone, cand, nu1, opts.neighborhood):
                    accepted, reduction, alpha = cand, a * (1.0 - sigma), a * (1.0 - sigma)
                    break
        if accepted is None:
            # shortened pure centering steps
            for t in (1.0, 0.5, 0.25, 0.1, 0.05, 0.01):
                cand = along(cent, t)
                if _acceptable(cone, cand, nu1, max(1.0, opts.neighborhood)):
                    accepted = cand
                    alpha = 0.0
                    break
        if accepted is None:
            info["failure"] = "line search failed"
            status = ILL_POSED if tau < 1e-8 * max(1.0, kappa) else ITER_LIMIT
            break
        x, y, z, tau, kappa = accepted
        info["last_alpha"] = alpha

    if status not in (OPTIMAL, PRIMAL_INFEASIBLE, DUAL_INFEASIBLE):
        if best_met is not None:
            # tolerances were met earlier; report that iterate
            _, x, y, z, tau, kappa, _ = best_met
            if it != best_met[6]:
                it = best_met[6]
            info["reduced_accuracy"] = opts.target_tol is not None
            status = OPTIMAL
        elif best is not None:
            _, x, y, z, tau, kappa = best

    xu, yu, zu = unscale(x, y, z)
    sol = _package(status, prog, keep, xu, yu, zu, tau, kappa)
    sol.iterations = it
    sol.solve_time = time.perf_counter() - t0
    sol.info.update(info)
    sol.info["tau"] = tau
    sol.info["kappa"] = kappa
    return sol


def _acceptable(cone: _Cone, cand, nu1, beta):
    x, y, z, tau, kappa = cand
    if not (tau > 0 and kappa > 0):
        return False
    if not cone.interior(x, z):
        return False
    mu = (x @ z + tau * kappa) / nu1
    if not (mu > 0 and np.isfinite(mu)):
        return False
    prox = cone.proximity(x, z, mu, tau * kappa)
    return prox <= beta


def _package(status, prog, keep, xu, yu, zu, tau, kappa):
    p_full = prog.b.size
    y_full = np.zeros(p_full)
    if status == PRIMAL_INFEASIBLE:
        by = prog.b[keep] @ yu
        y_full[keep] = yu / by
        z = zu / by
        x = xu / max(tau, 1e-300)
        sol = Solution(status, x, y_full, z)
    elif status == DUAL_INFEASIBLE:
        cx = prog.c @ xu
        x = xu / (-cx)
        y_full[keep] = yu / tau
        sol = Solution(status, x, y_full, zu / tau)
    else:
        y_full[keep] = yu / tau
        sol = Solution(status, xu / tau, y_full, zu / tau)
    rep = residuals(prog, sol)
    sol.primal_objective = rep["primal_objective"]
    sol.dual_objective = rep["dual_objective"]
    sol.primal_residual = rep["primal_residual"]
    sol.dual_residual = rep["dual_residual"]
    sol.gap = rep["gap"]
    return sol


def residuals(prog: ConeProgram, sol: Solution) -> dict:
    """Recompute feasibility residuals and duality gap of a solution.

    Residuals are infinity norms of ``A x - b`` and ``c - A^T y - z`` (for
    infeasibility certificates, of the ray conditions instead), together
    with cone violations of ``x`` and ``z``.
    """
    x, y, z = sol.x, sol.y, sol.z
    if x.size != prog.n or z.size != prog.n or y.size != prog.b.size:
        raise ValueError("solution dimensions do not match the program")
    A = prog.A
    free, lp, expo = prog.index_sets()
    out = {}
    if sol.status == PRIMAL_INFEASIBLE:
        out["primal_residual"] = float(np.max(np.abs(A.T @ y + z), initial=0.0))
        out["dual_residual"] = out["primal_residual"]
        out["certificate_value"] = float(prog.b @ y)
    elif sol.status == DUAL_INFEASIBLE:
        out["primal_residual"] = float(np.max(np.abs(A @ x), initial=0.0))
        out["dual_residual"] = out["primal_residual"]
        out["certificate_value"] = float(prog.c @ x)
    else:
        out["primal_residual"] = float(np.max(np.abs(A @ x - prog.b), initial=0.0))
        out["dual_residual"] = float(np.max(np.abs(prog.c - A.T @ y - z), initial=0.0))
    out["primal_objective"] = float(prog.c @ x)
    out["dual_objective"] = float(prog.b @ y)
    out["gap"] = abs(out["primal_objective"] - out["dual_objective"])
    out["free_dual_violation"] = float(np.max(np.abs(z[free]), initial=0.0))
    viol = max(
        float(np.max(-x[lp], initial=0.0)),
        float(np.max(cones.primal_membership_violation(x[expo]), initial=0.0)) if len(expo) else 0.0,
    )
    out["primal_cone_violation"] = viol
    zviol = float(np.max(-z[lp], initial=0.0))
    if len(expo):
        Z = z[expo]
        # dual cone: (u, v, w) with u <= 0 and -u exp(v/u) <= e w
        u, v, w = Z[:, 0], Z[:, 1], Z[:, 2]
        neg = u < 0
        with np.errstate(over="ignore"):
            lhs = -u[neg] * np.exp(v[neg] / u[neg])
        dv = np.maximum(lhs - np.e * w[neg], 0.0) / np.maximum(1.0, np.abs(w[neg]))
        zero = ~neg
        zv = np.maximum.reduce([u[zero], -v[zero], -w[zero]]) if zero.any() else np.zeros(0)
        zviol = max(zviol, float(np.max(dv, initial=0.0)), float(np.max(zv, initial=0.0)))
    out["dual_cone_violation"] = zviol
    return out
