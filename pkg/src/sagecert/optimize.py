"""SAGE lower bounds, the multiplier hierarchy, exactness checks and a reference minimizer."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog, minimize

from . import geometry
from .algebra import ExponentMatrix, Signomial, align, evaluate, make_signomial, multiply, power
from .sage import (
    DualVector,
    SageCertificate,
    SageStructure,
    add_dual,
    add_primal,
    dual_from_primal,
    dual_point,
    extract_certificate,
)
from .solver import (
    DUAL_INFEASIBLE,
    OPTIMAL,
    PRIMAL_INFEASIBLE,
    Model,
    SolverOptions,
    solve,
)

__all__ = [
    "BoundResult",
    "ExactnessReport",
    "hierarchy_target",
    "sage_bound",
    "sage_bound_dual",
    "constrained_bound",
    "exactness_report",
    "verify_farkas",
    "reference_minimize",
    "OracleResult",
]

STATUS_OPTIMAL = "Optimal"
STATUS_INFEASIBLE = "Infeasible"
STATUS_UNBOUNDED = "Unbounded"
STATUS_FAILED = "SolverFailure"

# hierarchy levels are compared at the 1e-7 scale, so bounds are solved
# past the default 1e-8 stopping rule when the solver can get there
BOUND_OPTIONS = SolverOptions(target_tol=1e-10)


@dataclass
class BoundResult:
    """Outcome of a bound computation.

    ``value`` is ``-inf`` when the relaxation is infeasible and ``+inf``
    when the dual program is infeasible (empty constraint set).
    """

    value: float
    status: str
    level: int = 0
    certificate: SageCertificate | None = None
    dual: DualVector | None = None
    dual_value: float = np.nan
    solver_status: str = ""
    iterations: int = 0
    solve_time: float = 0.0
    exponents: ExponentMatrix | None = None
    target: np.ndarray | None = None
    farkas: DualVector | None = None
    num_exp: int = 0
    info: dict = field(default_factory=dict)

    def to_dict(self, with_certificate: bool = True) -> dict:
        def num(x):
            if x is None or (isinstance(x, float) and np.isnan(x)):
                return None
            if x == -np.inf:
                return "-inf"
            if x == np.inf:
                return "inf"
            return float(x)

        out = {
            "value": num(self.value),
            "status": self.status,
            "level": int(self.level),
            "dual_value": num(self.dual_value),
            "solver_iters": int(self.iterations),
            "solver_status": self.solver_status,
        }
        if with_certificate:
            out["certificate"] = self.certificate.to_dict() if self.certificate is not None else None
            if self.exponents is not None:
                out["exponents"] = self.exponents.to_strings()
            if self.target is not None:
                out["target"] = [float(v) for v in self.target]
        return out


def _as_signomial(f) -> Signomial:
    if isinstance(f, Signomial):
        return f
    raise TypeError("expected a Signomial")


def hierarchy_target(f: Signomial, level: int):
    """Coefficients of ``Sig(A,1)^level * (f - gamma)`` as ``p - gamma q``.

    Returns
    -------
    exponents : ExponentMatrix
    p, q : ndarray
        ``q >= 0`` holds the coefficients of the multiplier itself.
    """
    f = _as_signomial(f).with_zero()
    ones = make_signomial(f.exponents.columns, np.ones(f.m))
    mult = power(ones, level)
    P = multiply(mult, f)
    A, (p, q) = align(P, mult)
    return A, p, q


def _upper_estimate(f: Signomial, seed: int = 0) -> float:
    """Smallest value of ``f`` over a fixed sample; an upper bound on any lower bound."""
    n = f.n
    rng = np.random.default_rng(seed)
    if n <= 3:
        axis = np.linspace(-3.0, 3.0, 13 if n <= 2 else 7)
        pts = np.array(list(itertools.product(axis, repeat=n)))
    else:
        pts = rng.uniform(-3.0, 3.0, size=(2000, n))
    pts = np.vstack([np.zeros((1, n)), pts])
    vals = evaluate(f, pts)
    best = float(np.min(vals[np.isfinite(vals)]))
    return best + 1e-9 * (1.0 + abs(best))


def _status(sol) -> str:
    if sol.status == OPTIMAL:
        return STATUS_OPTIMAL
    if sol.status == PRIMAL_INFEASIBLE:
        return STATUS_INFEASIBLE
    if sol.status == DUAL_INFEASIBLE:
        return STATUS_UNBOUNDED
    return STATUS_FAILED


def _hierarchy_structure(f, level):
    f = _as_signomial(f).with_zero()
    A, p, q = hierarchy_target(f, level)
    gamma_ub = _upper_estimate(f)
    can_pos = (q > 0) | (p > 0)
    always_neg = (q == 0) & (p < 0)
    can_neg = p - gamma_ub * q < 0
    st = SageStructure(A, can_pos, can_neg, always_neg)
    return f, A, p, q, st


def sage_bound(f: Signomial, level: int = 0, options: SolverOptions | None = None) -> BoundResult:
    """Level-``level`` SAGE bound ``sup{gamma : Sig(A,1)^level (f - gamma) is SAGE}``.

    Level 0 is the plain SAGE relaxation ``sup{gamma : f - gamma is SAGE}``.
    A zero exponent is added to ``f`` when missing.

    Parameters
    ----------
    f : Signomial
    level : int
        Number of multiplications by ``Sig(A, 1)`` (all-ones coefficients
        on the exponents of ``f``).

    Returns
    -------
    BoundResult
        ``status`` is ``"Infeasible"`` with ``value = -inf`` when no
        ``gamma`` works; the solver's Farkas ray is then in ``farkas``.
    """
    if level < 0:
        raise ValueError("level must be nonnegative")
    t0 = time.perf_counter()
    f, A, p, q, st = _hierarchy_structure(f, level)
    model = Model()
    gamma = model.add_free(1)[0]
    lin = [(j, gamma, -q[j]) for j in np.flatnonzero(q)]
    h = add_primal(model, st, p, lin)
    model.add_objective(gamma, -1.0)
    sol = solve(model.compile(), options or BOUND_OPTIONS)
    status = _status(sol)
    res = BoundResult(
        value=np.nan,
        status=status,
        level=level,
        solver_status=sol.status,
        iterations=sol.iterations,
        exponents=A,
        num_exp=st.num_exp,
    )
    if status == STATUS_OPTIMAL:
        g = float(sol.x[gamma])
        res.value = g
        res.dual_value = -float(sol.dual_objective)
        res.target = p - g * q
        res.certificate = extract_certificate(st, h, sol.x, res.target, restricted=False)
        res.dual = dual_from_primal(st, h, sol.y)
    elif status == STATUS_INFEASIBLE:
        res.value = -np.inf
        res.dual_value = -np.inf
        res.farkas = dual_from_primal(st, h, sol.y)
    elif status == STATUS_UNBOUNDED:
        res.value = np.inf
        res.dual_value = np.inf
    res.solve_time = time.perf_counter() - t0
    return res


def sage_bound_dual(f: Signomial, level: int = 0, options: SolverOptions | None = None) -> BoundResult:
    """Dual form ``inf{p^T v : q^T v = 1, v in dual cone}`` of :func:`sage_bound`.

    The dual cone is the dual of the same support-restricted cone used by
    the primal, so the two optimal values coincide by strong duality.
    """
    if level < 0:
        raise ValueError("level must be nonnegative")
    t0 = time.perf_counter()
    f, A, p, q, st = _hierarchy_structure(f, level)
    model = Model()
    keep = (p != 0) | (q != 0)
    h = add_dual(model, st, keep)
    row = model.add_rows(1)[0]
    nz = np.flatnonzero((q != 0) & (h.v >= 0))
    model.add_terms(row, h.v[nz], q[nz])
    model.set_rhs(row, 1.0)
    used = np.flatnonzero((p != 0) & (h.v >= 0))
    model.add_objective(h.v[used], p[used])
    sol = solve(model.compile(), options or BOUND_OPTIONS)
    res = BoundResult(np.nan, STATUS_FAILED, level, solver_status=sol.status,
                      iterations=sol.iterations, exponents=A, num_exp=st.num_exp)
    if sol.status == OPTIMAL:
        res.status = STATUS_OPTIMAL
        res.value = float(sol.primal_objective)
        res.dual_value = float(sol.dual_objective)
        res.dual = dual_point(h, sol.x)
    elif sol.status == DUAL_INFEASIBLE:
        # dual unbounded below: the primal relaxation is infeasible
        res.status = STATUS_INFEASIBLE
        res.value = res.dual_value = -np.inf
    elif sol.status == PRIMAL_INFEASIBLE:
        res.status = STATUS_UNBOUNDED
        res.value = res.dual_value = np.inf
    res.solve_time = time.perf_counter() - t0
    return res


def _dual_witness_exists(A, v, k, tol):
    """LP check for ``mu`` with ``v_k log(v_k/v_i) <= (a_k - a_i) . mu`` for all i."""
    others = [i for i in range(v.size) if i != k]
    if v[k] <= 0 or not others:
        return True
    if np.any(v[others] <= 0):
        return False
    D = (A[:, [k]] - A[:, others]).T  # rows (a_k - a_i)
    need = v[k] * np.log(v[k] / v[others])
    # maximize the smallest slack s: need - D mu + s <= 0, s <= 1
    n = A.shape[0]
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    A_ub = np.hstack([-D, np.ones((len(others), 1))])
    bounds = [(None, None)] * n + [(None, 1.0)]
    lp = linprog(cost, A_ub=A_ub, b_ub=-need, bounds=bounds, method="highs")
    if lp.status != 0:
        return False
    return -lp.fun >= -tol * (1.0 + np.max(np.abs(need)))


def verify_farkas(f: Signomial, level: int, ray, tol: float = 1e-6) -> dict:
    """Check an infeasibility ray of :func:`sage_bound` independently.

    ``ray`` (a :class:`DualVector` or array) must be a nonnegative vector
    of the full dual SAGE cone of the level-``level`` exponents with
    ``q . v ~ 0`` and ``p . v < 0``, where ``f - gamma`` lifts to
    ``p - gamma q``.  The dual-cone witnesses are recomputed by linear
    programming rather than taken from the solver.

    Returns
    -------
    dict
        ``ok``, ``messages`` and ``implied_bound``, the largest ``gamma``
        compatible with the ray (``-inf`` when ``q . v = 0`` exactly).
    """
    f = _as_signomial(f).with_zero()
    E_, p, q = hierarchy_target(f, level)
    A = E_.array
    v = np.nan_to_num(np.asarray(getattr(ray, "v", ray), dtype=float))
    msgs = []
    scale = float(np.max(np.abs(v), initial=0.0))
    if scale == 0:
        return {"ok": False, "messages": ["zero ray"], "implied_bound": np.inf}
    v = v / scale
    if v.min() < -tol:
        msgs.append(f"ray has negative entry {v.min():.3e}")
    v = np.maximum(v, 0.0)
    pv, qv = float(p @ v), float(q @ v)
    if abs(qv) > tol:
        msgs.append(f"q . v = {qv:.3e} is not zero")
    if not pv < -tol * (1.0 + np.sum(np.abs(p))):
        msgs.append(f"p . v = {pv:.3e} is not negative")
    for k in range(v.size):
        if not _dual_witness_exists(A, v, k, tol):
            msgs.append(f"no dual-cone witness for index {k}")
            break
    implied = pv / qv if qv > 0 else -np.inf
    return {"ok": not msgs, "messages": msgs, "implied_bound": implied}


# ---------------------------------------------------------------------------
# constrained bounds


def _constraint_products(gs, q: int):
    """All products of between 1 and ``q`` factors drawn from ``gs`` (with repetition)."""
    out = []
    for r in range(1, q + 1):
        for combo in itertools.combinations_with_replacement(range(len(gs)), r):
            prod = gs[combo[0]]
            for t in combo[1:]:
                prod = multiply(prod, gs[t])
            out.append(prod)
    return out


def constrained_bound(f: Signomial, gs=(), q: int = 1, options: SolverOptions | None = None) -> BoundResult:
    """Lower bound on ``inf{f(x) : g(x) >= 0}`` from the dual SAGE relaxation.

    Solves ``inf{c^T v : v in C_SAGE(A)^dagger, v_0 = 1, G^T v >= 0}`` where
    the columns of ``G`` are the constraint coefficient vectors on the common
    exponent set ``A``.  With ``q > 1`` the constraint list is augmented by
    all products of up to ``q`` constraints.  The equivalent primal
    ``sup{gamma : c - gamma e_0 - G lam in C_SAGE(A), lam >= 0}`` is solved
    as well; it supplies the certificate and ``dual_value``.

    Parameters
    ----------
    f : Signomial
    gs : sequence of Signomial
    q : int
        Product level, at least 1 when constraints are present.
    """
    f = _as_signomial(f)
    gs = [_as_signomial(g) for g in gs]
    if gs and q < 1:
        raise ValueError("product level must be at least 1")
    if any(g.n != f.n for g in gs):
        raise ValueError("dimension mismatch")
    t0 = time.perf_counter()
    f = f.with_zero()
    H = _constraint_products(gs, q) if gs else []
    A, vecs = align(f, *H)
    c = vecs[0]
    G = np.column_stack(vecs[1:]) if H else np.zeros((A.m, 0))
    zi = A.zero_index()
    m = A.m
    is_zero = np.arange(m) == zi
    G_pos = np.any(G > 0, axis=1)
    G_neg = np.any(G < 0, axis=1)
    can_neg = (c < 0) | is_zero | G_pos
    can_pos = (c > 0) | is_zero | G_neg
    always_neg = (c < 0) & ~is_zero & ~G_neg
    st = SageStructure(A, can_pos, can_neg, always_neg)
    opts = options or BOUND_OPTIONS

    # dual form
    model = Model()
    keep = (c != 0) | is_zero | np.any(G != 0, axis=1)
    h = add_dual(model, st, keep)
    row = model.add_rows(1)[0]
    model.add_terms(row, h.v[zi], 1.0)
    model.set_rhs(row, 1.0)
    for col in range(G.shape[1]):
        nz = np.flatnonzero((G[:, col] != 0) & (h.v >= 0))
        r = model.add_rows(1)[0]
        s = model.add_nonneg(1)[0]
        model.add_terms(r, h.v[nz], G[nz, col])
        model.add_terms(r, s, -1.0)
    used = np.flatnonzero((c != 0) & (h.v >= 0))
    model.add_objective(h.v[used], c[used])
    sol = solve(model.compile(), opts)
    res = BoundResult(np.nan, STATUS_FAILED, 0, solver_status=sol.status,
                      iterations=sol.iterations, exponents=A, num_exp=st.num_exp)
    if sol.status == OPTIMAL:
        res.status = STATUS_OPTIMAL
        res.value = float(sol.primal_objective)
        res.dual = dual_point(h, sol.x)
    elif sol.status == DUAL_INFEASIBLE:
        res.status = STATUS_INFEASIBLE
        res.value = -np.inf
    elif sol.status == PRIMAL_INFEASIBLE:
        res.status = STATUS_UNBOUNDED
        res.value = np.inf

    # primal form: certificate and the second value for the duality check
    pm = Model()
    gamma = pm.add_free(1)[0]
    lam = pm.add_nonneg(G.shape[1]) if G.shape[1] else np.zeros(0, dtype=int)
    lin = [(zi, gamma, -1.0)]
    for col in range(G.shape[1]):
        lin += [(j, lam[col], -G[j, col]) for j in np.flatnonzero(G[:, col])]
    ph = add_primal(pm, st, c, lin)
    pm.add_objective(gamma, -1.0)
    psol = solve(pm.compile(), opts)
    res.info["multipliers"] = None
    if psol.status == OPTIMAL:
        g = float(psol.x[gamma])
        res.dual_value = g
        mult = psol.x[lam] if lam.size else np.zeros(0)
        res.info["multipliers"] = [float(v) for v in mult]
        res.target = c - g * is_zero - G @ mult
        res.certificate = extract_certificate(st, ph, psol.x, res.target, restricted=False)
        if res.status == STATUS_FAILED:
            res.status, res.value = STATUS_OPTIMAL, g
    elif psol.status == PRIMAL_INFEASIBLE:
        res.dual_value = -np.inf
    elif psol.status == DUAL_INFEASIBLE:
        res.dual_value = np.inf
    res.iterations += psol.iterations
    res.solve_time = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------------------
# exactness and boundedness checks


@dataclass
class ExactnessReport:
    """Which structural guarantees hold for a signomial ``Sig(A, c)``.

    Attributes
    ----------
    simplicial_exact : bool
        The extreme exponents are affinely independent and every nonextremal
        coefficient is ``<= 0``; SAGE membership then equals nonnegativity and
        the level-0 bound equals the infimum.
    partition_exact : bool
        The finest face partition has simplicial blocks with at most two
        nonextremal exponents and other blocks with at most one; the SAGE and
        nonnegativity cones of ``A`` then coincide for every ``c``.
    window_applies : bool
        Simplicial hull, zero exponent present and ``c_i <= 0`` at nonzero
        nonextremal exponents.  Then either the bound is exact or the
        infimum lies in ``window = (f_SAGE, c_0)``.
    window : tuple or None
        ``(f_SAGE, c_0)`` when ``window_applies`` and the bound was computed.
    bounded_iff_finite : bool
        The zero vector is in the Newton polytope and each nonextremal
        exponent can be dilated by ``1 + eps`` inside it; then ``f`` is
        bounded below iff the level-0 bound is finite.
    constrained_exact : bool or None
        For constrained data: simplicial hull with vertex zero and the
        literal sign conditions ``c_i <= 0`` and ``G_ij >= 0`` at every
        nonextremal index.  ``None`` when no constraints were given.
    witnesses : dict
        Extreme indices, the face partition and the dilation margins.
    """

    simplicial_exact: bool
    partition_exact: bool
    window_applies: bool
    bounded_iff_finite: bool
    window: tuple | None = None
    constrained_exact: bool | None = None
    witnesses: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "simplicial_exact": self.simplicial_exact,
            "partition_exact": self.partition_exact,
            "window_applies": self.window_applies,
            "window": None if self.window is None else [float(v) for v in self.window],
            "bounded_iff_finite": self.bounded_iff_finite,
            "constrained_exact": self.constrained_exact,
            "witnesses": self.witnesses,
        }


def exactness_report(A, c, gs=None, compute_window: bool = True) -> ExactnessReport:
    """Evaluate the hypotheses of the exactness and boundedness results.

    Every flag is decided with exact rational geometry on the exponents.

    Parameters
    ----------
    A : ExponentMatrix or column list
    c : array of length m
    gs : sequence of arrays of length m, optional
        Constraint coefficient vectors on the same exponents.
    compute_window : bool
        Solve the level-0 bound to report the window interval.
    """
    cols = geometry._cols(A)
    c = np.asarray(c, dtype=float)
    m = len(cols)
    if c.size != m:
        raise ValueError("coefficient vector length differs from the column count")
    rep = geometry.extreme_indices(cols)
    non = rep.nonextreme_indices
    simplicial = rep.is_simplicial_hull
    simplicial_exact = simplicial and all(c[i] <= 0 for i in non)

    part = geometry.find_face_partition(cols)
    partition_exact = True
    block_info = []
    non_set = set(non)
    for blk in part.blocks:
        inner = [j for j in blk if j in non_set]
        verts = [cols[j] for j in blk if j not in non_set]
        simp = geometry.is_simplicial(verts)
        block_info.append({"block": blk, "nonextreme": inner, "simplicial": simp})
        if len(inner) > (2 if simp else 1):
            partition_exact = False

    n = len(cols[0])
    zero = tuple(Fraction(0) for _ in range(n))
    zi = cols.index(zero) if zero in cols else None
    window_applies = simplicial and zi is not None and all(
        c[i] <= 0 for i in non if i != zi
    )
    window = None
    if window_applies and compute_window:
        f = make_signomial(cols, c)
        res = sage_bound(f, 0)
        if res.status in (STATUS_OPTIMAL, STATUS_INFEASIBLE):
            window = (res.value, float(c[zi]))

    margins = {int(j): geometry.dilation_margin(cols, j) for j in non}
    bounded_iff_finite = rep.contains_origin and all(v > 0 for v in margins.values())

    constrained_exact = None
    if gs is not None:
        G = np.column_stack([np.asarray(g, dtype=float) for g in gs]) if len(gs) else np.zeros((m, 0))
        zero_vertex = zi is not None and zi in rep.extreme_indices
        constrained_exact = bool(
            simplicial and zero_vertex
            and all(c[i] <= 0 and np.all(G[i] >= 0) for i in non)
        )

    witnesses = {
        "extreme_indices": rep.extreme_indices,
        "nonextreme_indices": non,
        "partition": part.to_dict(),
        "blocks": block_info,
        "dilation_margins": {str(k): str(v) for k, v in margins.items()},
    }
    return ExactnessReport(
        simplicial_exact=bool(simplicial_exact),
        partition_exact=bool(partition_exact),
        window_applies=bool(window_applies),
        bounded_iff_finite=bool(bounded_iff_finite),
        window=window,
        constrained_exact=constrained_exact,
        witnesses=witnesses,
    )


# ---------------------------------------------------------------------------
# independent minimization oracle


@dataclass
class OracleResult:
    """Best value found by :func:`reference_minimize`.

    ``at_infinity`` flags that the best value was approached along a
    diverging path (the infimum is not attained at a finite point);
    ``unbounded`` flags values below ``-1e10``.
    """

    value: float
    x: np.ndarray
    at_infinity: bool = False
    unbounded: bool = False
    feasible: bool = True


_UNBOUNDED_LEVEL = -1e10


def _sig_fun(f: Signomial):
    A = f.A
    c = np.asarray(f.coeffs)

    def fun(x):
        # shift by the largest exponent so huge terms cancel before overflow
        T = x @ A
        top = np.max(T)
        scaled = float(np.exp(T - top) @ c)
        if top > 700.0:
            return np.inf if scaled > 0 else (-np.inf if scaled < 0 else 0.0)
        return scaled * float(np.exp(top))

    def grad(x):
        with np.errstate(over="ignore", invalid="ignore"):
            return A @ (c * np.exp(np.minimum(x @ A, 700.0)))

    return fun, grad


def _directions(n: int) -> np.ndarray:
    dirs = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=n)))
    return dirs[np.any(dirs != 0, axis=1)]


def reference_minimize(f: Signomial, gs=(), starts_per_dim: int = 5, box: float = 10.0,
                       max_iter: int = 10_000) -> OracleResult:
    """Brute-force estimate of ``inf f`` (optionally subject to ``g >= 0``).

    Deterministic multistart descent: quasi-Newton descent with a
    line search from every point of a ``5^n`` grid on ``[-10, 10]^n``, plus
    probes ``x = t d`` for ``t`` in ``{10, 20, 40}`` along coordinate and
    diagonal directions ``d`` to expose infima at infinity.  Constraints are
    handled by a quadratic penalty sweep followed by a local polish.

    Intended as a test oracle at desk scale (``n <= 4``).
    """
    f = _as_signomial(f)
    gs = [_as_signomial(g) for g in gs]
    n = f.n
    if n > 4:
        raise ValueError("the reference oracle supports at most 4 variables")
    fun, grad = _sig_fun(f)
    cons = [_sig_fun(g) for g in gs]
    axis = np.linspace(-box, box, starts_per_dim)
    starts = np.array(list(itertools.product(axis, repeat=n)))

    def violation(x):
        return max((max(0.0, -gf(x)) for gf, _ in cons), default=0.0)

    best_val, best_x = np.inf, starts[0]
    unbounded = False
    for x0 in starts:
        if not cons:
            r = minimize(fun, x0, jac=grad, method="BFGS",
                         options={"gtol": 1e-11, "maxiter": max_iter})
            x, val = r.x, fun(r.x)
        else:
            x = x0
            for rho in (1e1, 1e3, 1e5, 1e7):
                def pen(z, rho=rho):
                    v = fun(z)
                    for gf, _ in cons:
                        v += rho * min(0.0, gf(z)) ** 2
                    return v

                def pen_grad(z, rho=rho):
                    d = grad(z)
                    for gf, gg in cons:
                        gv = gf(z)
                        if gv < 0:
                            d = d + 2 * rho * gv * gg(z)
                    return d

                x = minimize(pen, x, jac=pen_grad, method="BFGS",
                             options={"gtol": 1e-10, "maxiter": max_iter}).x
            r = minimize(fun, x, jac=grad, method="SLSQP",
                         constraints=[{"type": "ineq", "fun": gf, "jac": gg} for gf, gg in cons],
                         options={"ftol": 1e-14, "maxiter": 1000})
            if violation(r.x) <= 1e-9 and (violation(x) > 1e-9 or fun(r.x) <= fun(x)):
                x = r.x
            if violation(x) > 1e-9:
                continue
            val = fun(x)
        if np.isnan(val):
            continue
        if val == -np.inf:
            unbounded = True
            break
        if val < best_val:
            best_val, best_x = val, x
        if best_val < _UNBOUNDED_LEVEL:
            unbounded = True
            break

    at_inf = bool(np.linalg.norm(best_x, np.inf) > 3 * box)
    for d in _directions(n):
        vals = []
        for t in (10.0, 20.0, 40.0):
            x = t * d
            if violation(x) > 1e-9:
                vals = []
                break
            vals.append(fun(x))
        if not vals:
            continue
        if vals[-1] < best_val - 1e-12 * (1 + abs(best_val)):
            best_val, best_x = vals[-1], 40.0 * d
            at_inf = True
        if vals[-1] < _UNBOUNDED_LEVEL:
            unbounded = True
    if unbounded:
        best_val = -np.inf
    return OracleResult(float(best_val), np.asarray(best_x, dtype=float), at_inf, unbounded,
                        feasible=bool(np.isfinite(best_val) or unbounded))
