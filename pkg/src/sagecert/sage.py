"""AGE and SAGE cones: membership programs, certificates and validation.

A coefficient vector ``c`` is AGE for index ``k`` when ``c_j >= 0`` for
``j != k`` and some ``nu >= 0`` with ``sum_j nu_j (a_j - a_k) = 0`` has
relative entropy ``D(nu, e c_{-k}) <= c_k``.  A SAGE vector is a sum of AGE
vectors.  Programs are compiled for the exponential-cone solver with one
cone per (part, term) pair, encoded as ``(-t, nu_j, e c_j) in K_exp``.

Support restriction: only indices whose coefficient can be negative get an
AGE part, and indices that are negative no matter what carry no mass in
other parts.  Inside a part ``k``, terms that cannot lie on the smallest
face of their hull containing ``a_k`` are removed; they would be forced to
``nu_j = 0`` anyway and only hurt conditioning.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np
from scipy.optimize import linprog

from . import geometry
from .algebra import ExponentMatrix, Signomial
from .rational import nullspace, rationalize
from .solver import (
    DUAL_INFEASIBLE,
    OPTIMAL,
    PRIMAL_INFEASIBLE,
    Model,
    SolverOptions,
    solve,
)

__all__ = [
    "AgeCertificate",
    "SageCertificate",
    "DualVector",
    "Refusal",
    "relative_entropy",
    "age_membership",
    "sage_membership",
    "dual_feasibility",
    "validate_certificate",
    "SageStructure",
]

E = np.e
MEMBERSHIP_TOL = 1e-8
# boundary members need the margin resolved well below MEMBERSHIP_TOL
MEMBERSHIP_OPTIONS = SolverOptions(target_tol=1e-10)


def relative_entropy(nu, lam) -> float:
    """``sum_j nu_j log(nu_j / lam_j)`` with ``0 log(0/x) = 0``.

    Returns ``inf`` if some ``nu_j > 0`` meets ``lam_j <= 0``.
    """
    nu = np.asarray(nu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    pos = nu > 0
    if np.any(lam[pos] <= 0):
        return np.inf
    return float(np.sum(nu[pos] * np.log(nu[pos] / lam[pos])))


# ---------------------------------------------------------------------------
# certificate types


@dataclass
class AgeCertificate:
    """One AGE vector ``cvec`` for index ``k`` with entropy witness ``nu``.

    ``nu`` is indexed by the columns other than ``k`` in their original order.
    """

    k: int
    nu: np.ndarray
    cvec: np.ndarray

    def __post_init__(self):
        self.nu = np.asarray(self.nu, dtype=float)
        self.cvec = np.asarray(self.cvec, dtype=float)

    def nu_full(self) -> np.ndarray:
        return np.insert(self.nu, self.k, 0.0)

    def entropy(self) -> float:
        others = np.delete(self.cvec, self.k)
        return relative_entropy(self.nu, E * others)

    def to_dict(self):
        return {"k": int(self.k), "nu": [float(v) for v in self.nu], "c": [float(v) for v in self.cvec]}

    @classmethod
    def from_dict(cls, d):
        nu = [float(Fraction(v)) if isinstance(v, str) else float(v) for v in d["nu"]]
        return cls(int(d["k"]), np.array(nu), np.array(d["c"], dtype=float))


@dataclass
class SageCertificate:
    """A list of AGE parts plus a nonnegative residual summing to a target."""

    parts: list
    residual: np.ndarray
    restricted: bool = True

    def __post_init__(self):
        self.residual = np.asarray(self.residual, dtype=float)

    def total(self) -> np.ndarray:
        out = self.residual.copy()
        for p in self.parts:
            out = out + p.cvec
        return out

    def to_dict(self):
        return {
            "parts": [p.to_dict() for p in self.parts],
            "residual": [float(v) for v in self.residual],
            "restricted": bool(self.restricted),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            [AgeCertificate.from_dict(p) for p in d["parts"]],
            np.array(d["residual"], dtype=float),
            bool(d.get("restricted", True)),
        )


@dataclass
class DualVector:
    """Point ``v`` of a dual SAGE cone with witnesses ``mus[k]`` per active index."""

    v: np.ndarray
    mus: dict = field(default_factory=dict)

    def violation(self, A: np.ndarray) -> float:
        """Largest violation of ``v_k log(v_k/v_i) <= (a_k - a_i) . mu_k``."""
        worst = 0.0
        v = self.v
        for k, mu in self.mus.items():
            for i in range(v.size):
                if i == k or not np.isfinite(v[i]):
                    continue
                rhs = (A[:, k] - A[:, i]) @ mu
                if v[k] <= 0:
                    lhs = 0.0
                elif v[i] <= 0:
                    lhs = np.inf
                else:
                    lhs = v[k] * np.log(v[k] / v[i])
                worst = max(worst, lhs - rhs)
        return worst

    def to_dict(self):
        return {
            "v": [None if not np.isfinite(t) else float(t) for t in self.v],
            "mus": {str(k): [float(t) for t in mu] for k, mu in self.mus.items()},
        }


@dataclass
class Refusal:
    """Negative membership answer.

    ``margin`` is the smallest relative inflation of the positive
    coefficients that would make the vector certifiable (``inf`` when none
    does); ``evidence`` is a separating dual vector when one was computed.
    """

    reason: str
    margin: float = np.inf
    evidence: DualVector | None = None
    status: str = ""

    def __bool__(self):
        return False


# ---------------------------------------------------------------------------
# program structure


def _exact_columns(A):
    if isinstance(A, ExponentMatrix):
        return list(A.columns), A.array
    if isinstance(A, Signomial):
        return list(A.exponents.columns), A.A
    em = ExponentMatrix(A)
    return list(em.columns), em.array


def _face_support(D: np.ndarray) -> np.ndarray:
    """Columns of ``D`` that carry weight in some ``nu >= 0`` with ``D nu = 0``.

    Solved as ``max sum s`` over ``0 <= s_j <= min(nu_j, 1)``.  The optimum
    is 0/1 valued, so a threshold of 1/2 is exact up to solver accuracy.
    """
    n, k = D.shape
    if k == 0:
        return np.zeros(0, dtype=bool)
    if not np.any(D):
        return np.ones(k, dtype=bool)
    cost = np.concatenate([np.zeros(k), -np.ones(k)])
    A_eq = np.hstack([D, np.zeros((n, k))])
    A_ub = np.hstack([-np.eye(k), np.eye(k)])
    bounds = [(0, None)] * k + [(0, 1)] * k
    res = linprog(cost, A_ub=A_ub, b_ub=np.zeros(k), A_eq=A_eq, b_eq=np.zeros(n),
                  bounds=bounds, method="highs")
    if res.status != 0:
        return np.zeros(k, dtype=bool)
    return res.x[k:] > 0.5


def _row_basis(D: np.ndarray, tol: float = 1e-12):
    """Orthonormal basis of the row space of ``D`` as ``(V_r^T, U_r Sigma^{-1})``."""
    if D.size == 0:
        return np.zeros((0, D.shape[1])), np.zeros((D.shape[0], 0))
    U, s, Vt = np.linalg.svd(D, full_matrices=False)
    r = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    return Vt[:r], U[:, :r] / s[:r]


class SageStructure:
    """Which AGE parts exist and which terms each part may use.

    Parameters
    ----------
    A : ExponentMatrix or column list
    can_pos, can_neg, always_neg : boolean arrays of length m
        Sign information about the (possibly variable) coefficient vector.
        ``always_neg`` marks indices that are negative for every admissible
        value; those receive zero mass in all other parts.
    extreme : list of int, optional
        Precomputed extreme indices.
    parts : iterable of int, optional
        Restrict the AGE parts to this index set (default: every nonextremal
        index that can be negative).
    """

    def __init__(self, A, can_pos, can_neg, always_neg, extreme=None, parts=None):
        self.cols, self.Af = _exact_columns(A)
        m = len(self.cols)
        self.m = m
        self.n = self.Af.shape[0]
        self.can_pos = np.asarray(can_pos, dtype=bool)
        self.can_neg = np.asarray(can_neg, dtype=bool)
        self.always_neg = np.asarray(always_neg, dtype=bool)
        if extreme is None:
            extreme = geometry.extreme_indices(self.cols).extreme_indices
        self.extreme = set(int(k) for k in extreme)
        self.pos_ok = self.can_pos & ~self.always_neg
        candidates = [k for k in range(m) if self.can_neg[k] and k not in self.extreme]
        if parts is not None:
            allowed = set(int(k) for k in parts)
            candidates = [k for k in candidates if k in allowed]
        self.parts = []  # list of (k, J, rows Vt, back map)
        for k in candidates:
            J = np.array([j for j in range(m) if j != k and self.pos_ok[j]], dtype=int)
            if J.size == 0:
                continue
            D = self.Af[:, J] - self.Af[:, [k]]
            keep = _face_support(D)
            J = J[keep]
            if J.size == 0:
                continue
            Vt, back = _row_basis(self.Af[:, J] - self.Af[:, [k]])
            self.parts.append((k, J, Vt, back))
        self.part_index = {k: t for t, (k, *_) in enumerate(self.parts)}
        self.residual_idx = np.array(
            [j for j in range(m) if self.pos_ok[j] and j not in self.part_index], dtype=int
        )

    @property
    def num_exp(self) -> int:
        return int(sum(len(J) for _, J, _, _ in self.parts))

    def used(self) -> np.ndarray:
        """Indices touched by some variable of the primal program."""
        mask = np.zeros(self.m, dtype=bool)
        mask[self.residual_idx] = True
        for k, J, _, _ in self.parts:
            mask[k] = True
            mask[J] = True
        return mask


@dataclass
class PrimalHandles:
    rows: np.ndarray  # coefficient row per index (-1 when absent)
    parts: list  # (k, J, exp block indices (|J|,3), s index, kernel rows, back)
    residual: np.ndarray  # variable index per entry of structure.residual_idx


def add_primal(model: Model, st: SageStructure, const, lin=()) -> PrimalHandles:
    """Add ``c(z) in C`` where ``C`` is the restricted SAGE cone of ``st``.

    Parameters
    ----------
    const : array of length m
        Constant part of the coefficient vector.
    lin : iterable of (index, variable, weight)
        Linear terms: coefficient ``index`` gains ``weight * z[variable]``.
    """
    m = st.m
    const = np.asarray(const, dtype=float)
    lin = list(lin)
    has_lin = np.zeros(m, dtype=bool)
    for j, _, _ in lin:
        has_lin[j] = True
    need = st.used() | has_lin | (const != 0)
    rows = np.full(m, -1, dtype=int)
    idx = np.flatnonzero(need)
    rows[idx] = model.add_rows(idx.size)
    for j in idx:
        model.set_rhs(rows[j], const[j])
    for j, var, w in lin:
        model.add_terms(rows[j], var, -w)
    parts = []
    for k, J, Vt, back in st.parts:
        blocks = model.add_exp(J.size)
        s = model.add_nonneg(1)[0]
        # coefficient c^(k)_k = s - sum u
        model.add_terms(rows[k], s, 1.0)
        model.add_terms(np.full(J.size, rows[k]), blocks[:, 0], -1.0)
        # c^(k)_j = w_j / e
        model.add_terms(rows[J], blocks[:, 2], 1.0 / E)
        krows = model.add_rows(Vt.shape[0])
        if Vt.shape[0]:
            rr = np.repeat(krows, J.size)
            cc = np.tile(blocks[:, 1], Vt.shape[0])
            model.add_terms(rr, cc, Vt.ravel())
        parts.append((k, J, blocks, s, krows, back))
    res = model.add_nonneg(st.residual_idx.size) if st.residual_idx.size else np.zeros(0, dtype=int)
    if st.residual_idx.size:
        model.add_terms(rows[st.residual_idx], res, 1.0)
    return PrimalHandles(rows, parts, res)


def _project_kernel(nu, D):
    """Nearest point to ``nu`` with ``D nu = 0`` (least squares)."""
    if D.size == 0 or not np.any(nu):
        return nu
    corr = np.linalg.lstsq(D, D @ nu, rcond=None)[0]
    return nu - corr


def extract_certificate(st: SageStructure, h: PrimalHandles, x, target, restricted=True) -> SageCertificate:
    """Turn a primal solution into a :class:`SageCertificate` for ``target``."""
    m = st.m
    parts = []
    for k, J, blocks, s, _, _ in h.parts:
        nu_J = np.maximum(x[blocks[:, 1]], 0.0)
        cJ = np.maximum(x[blocks[:, 2]] / E, 0.0)
        D = st.Af[:, J] - st.Af[:, [k]]
        nu_J = _project_kernel(nu_J, D)
        nu_J = np.where(nu_J < 0, 0.0, nu_J)
        cvec = np.zeros(m)
        cvec[J] = cJ
        ck = x[s] - np.sum(x[blocks[:, 0]])
        cvec[k] = ck
        if ck >= 0:
            # a nonnegative part adds nothing beyond the residual
            continue
        nu = np.zeros(m)
        nu[J] = nu_J
        parts.append(AgeCertificate(k, np.delete(nu, k), cvec))
    total = np.zeros(m)
    for p in parts:
        total += p.cvec
    residual = np.asarray(target, dtype=float) - total
    return SageCertificate(parts, residual, restricted)


@dataclass
class DualHandles:
    v: np.ndarray  # variable index per coefficient (-1 when unconstrained)
    mus: list  # (k, xi variable indices, back map)


def add_dual(model: Model, st: SageStructure, keep=None) -> DualHandles:
    """Add variables ``v`` constrained to the dual of the restricted SAGE cone.

    Each part ``k`` and term ``j`` contributes the cone constraint
    ``(-(a_k - a_j) . mu_k, v_k, v_j) in K_exp``, that is
    ``v_k log(v_k / v_j) <= (a_k - a_j) . mu_k``.  Residual terms add
    ``v_j >= 0``.  Indices that no constraint touches get a free variable
    only if ``keep`` marks them.
    """
    m = st.m
    used = st.used()
    if keep is None:
        keep = np.zeros(m, dtype=bool)
    v = np.full(m, -1, dtype=int)
    for j in range(m):
        if used[j]:
            v[j] = model.add_nonneg(1)[0]
        elif keep[j]:
            v[j] = model.add_free(1)[0]
    mus = []
    for k, J, Vt, back in st.parts:
        r = Vt.shape[0]
        xi = model.add_free(r) if r else np.zeros(0, dtype=int)
        blocks = model.add_exp(J.size)
        rows = model.add_rows(3 * J.size).reshape(J.size, 3)
        # first coordinate: -(a_k - a_j) . mu = (a_j - a_k) . U Sigma^{-1} xi = Vt[:, j] . xi
        model.add_terms(rows[:, 0], blocks[:, 0], 1.0)
        if r:
            model.add_terms(np.repeat(rows[:, 0], r), np.tile(xi, J.size), -Vt.T.ravel())
        model.add_terms(rows[:, 1], blocks[:, 1], 1.0)
        model.add_terms(rows[:, 1], v[k], -1.0)
        model.add_terms(rows[:, 2], blocks[:, 2], 1.0)
        model.add_terms(rows[:, 2], v[J], -1.0)
        mus.append((k, xi, back))
    return DualHandles(v, mus)


def dual_point(h: DualHandles, x) -> DualVector:
    v = np.array([x[i] if i >= 0 else np.nan for i in h.v])
    mus = {}
    for k, xi, back in h.mus:
        mus[int(k)] = back @ x[xi] if xi.size else np.zeros(back.shape[0])
    return DualVector(v, mus)


def dual_from_primal(st: SageStructure, h: PrimalHandles, y) -> DualVector:
    """Recover ``(v, mu)`` from the multipliers of a primal SAGE program."""
    v = np.array([-y[r] if r >= 0 else np.nan for r in h.rows])
    mus = {}
    for k, J, blocks, s, krows, back in h.parts:
        mus[int(k)] = back @ y[krows] if krows.size else np.zeros(st.n)
    return DualVector(v, mus)


# ---------------------------------------------------------------------------
# membership


def _margin_program(A, c, parts_allowed=None, extreme=None):
    """Program ``min t`` with ``c + t d`` in the restricted cone, ``d = c_+``.

    Inflating only the positive coefficients keeps the negative entries
    fixed, so the support restriction with zero cross-support on the
    negative indices is exact.  ``c`` is a member iff ``t* <= 0``.
    """
    c = np.asarray(c, dtype=float)
    neg = c < 0
    pos = c > 0
    st = SageStructure(A, pos, neg, neg, extreme=extreme, parts=parts_allowed)
    model = Model()
    t = model.add_free(1)[0]
    d = np.where(pos, np.abs(c), 0.0)
    lin = [(j, t, d[j]) for j in np.flatnonzero(pos)]
    h = add_primal(model, st, c, lin)
    model.add_objective(t, 1.0)
    return st, model, h, t, d


def _tighten(cert: SageCertificate, c, rel_margin: float = 1e-10) -> SageCertificate:
    """Remove solver round-off at the negative indices when there is room.

    Each part's designated entry is set so that the parts sum to ``c``
    exactly there, and the entropy inequality is restored with a small
    margin by inflating the positive entries.  Strictly interior members
    absorb the inflation in the residual; otherwise ``cert`` is returned
    unchanged.
    """
    c = np.asarray(c, dtype=float)
    if not cert.parts:
        return cert
    sums = {}
    for p in cert.parts:
        sums[p.k] = sums.get(p.k, 0.0) + p.cvec[p.k]
    parts = []
    for p in cert.parts:
        k = p.k
        if sums[k] >= 0 or c[k] >= 0:
            return cert
        vec = p.cvec.copy()
        vec[k] = c[k] * (p.cvec[k] / sums[k])
        others = np.delete(vec, k)
        need = relative_entropy(p.nu, E * others) - vec[k] + rel_margin * (1.0 + abs(vec[k]))
        mass = float(np.sum(p.nu))
        if need > 0:
            if mass <= 0:
                return cert
            others = np.where(p.nu > 0, others * np.exp(need / mass), others)
            vec = np.insert(others, k, vec[k])
        parts.append(AgeCertificate(k, p.nu.copy(), vec))
    total = np.zeros(c.size)
    for p in parts:
        total += p.cvec
    residual = c - total
    if residual.min(initial=0.0) < 0:
        return cert
    return SageCertificate(parts, residual, cert.restricted)


def _membership(A, c, parts_allowed, options, extreme=None):
    c = np.asarray(c, dtype=float)
    if np.all(c >= 0):
        return SageCertificate([], c.copy())
    if not np.any(c > 0):
        return Refusal("negative coefficients with no positive term to offset them", status="trivial")
    st, model, h, t, d = _margin_program(A, c, parts_allowed, extreme)
    neg = np.flatnonzero(c < 0)
    if any(k not in st.part_index for k in neg):
        bad = [int(k) for k in neg if k not in st.part_index]
        return Refusal(
            f"negative coefficient at index {bad[0]} is not in the relative interior "
            "reachable from positive terms",
            status="structural",
        )
    sol = solve(model.compile(), options or MEMBERSHIP_OPTIONS)
    if sol.status == PRIMAL_INFEASIBLE:
        ev = dual_from_primal(st, h, sol.y)
        return Refusal("no SAGE decomposition exists (Farkas certificate)", np.inf, ev, sol.status)
    if sol.status != OPTIMAL:
        if sol.status == DUAL_INFEASIBLE:
            # t unbounded below cannot happen with a positive extreme term;
            # treat as a solver anomaly
            return Refusal("membership program unbounded", status=sol.status)
        tval = sol.x[t]
        if not (np.isfinite(tval) and tval <= MEMBERSHIP_TOL and sol.primal_residual <= 1e-6 * (1 + np.abs(c).max())):
            return Refusal(f"solver stopped with status {sol.status}", tval, None, sol.status)
    tval = float(sol.x[t])
    if tval > MEMBERSHIP_TOL:
        ev = dual_from_primal(st, h, sol.y)
        return Refusal("coefficient vector lies outside the cone", tval, ev, sol.status)
    cert = _tighten(extract_certificate(st, h, sol.x, c), c)
    cert.info = {"margin": tval, "iterations": sol.iterations, "solve_time": sol.solve_time}
    return cert


def age_membership(A, k: int, c, mode: str = "certify", options: SolverOptions | None = None):
    """Decide whether ``c`` is an AGE vector for index ``k``.

    Parameters
    ----------
    A : ExponentMatrix, Signomial or column list
    k : int
        Index allowed to be negative.
    c : array of length m with ``c_j >= 0`` for ``j != k``
    mode : {"certify", "decide"}
        ``"decide"`` returns a bool.

    Returns
    -------
    AgeCertificate or Refusal (or bool in decide mode)
    """
    cols, Af = _exact_columns(A)
    c = np.asarray(c, dtype=float)
    m = len(cols)
    if c.size != m:
        raise ValueError("coefficient vector length differs from the column count")
    if not 0 <= k < m:
        raise IndexError("index out of range")
    if np.any(np.delete(c, k) < 0):
        raise ValueError("only the designated coefficient may be negative")
    out = None
    if c[k] >= 0:
        out = AgeCertificate(k, np.zeros(m - 1), c.copy())
    else:
        others = cols[:k] + cols[k + 1 :]
        if not others or not geometry.in_hull(cols[k], others):
            out = Refusal("extreme exponent with negative coefficient", status="extreme")
        else:
            res = _membership(cols, c, [k], options)
            if isinstance(res, Refusal):
                out = res
            else:
                part = res.parts[0] if res.parts else AgeCertificate(k, np.zeros(m - 1), np.zeros(m))
                cvec = part.cvec + res.residual
                out = AgeCertificate(k, part.nu, cvec)
    if mode == "decide":
        return not isinstance(out, Refusal)
    return out


def sage_membership(A, c, options: SolverOptions | None = None, extreme=None):
    """Decide membership of ``c`` in the SAGE cone of ``A`` with a certificate.

    Only indices with ``c_i < 0`` receive AGE parts and those parts vanish
    on the other negative indices.  The decision solves ``min t`` such that
    inflating the positive coefficients by the factor ``1 + t`` gives a
    certifiable vector; ``c`` is accepted when ``t* <= 1e-8``.

    Returns
    -------
    SageCertificate or Refusal
    """
    cols, _ = _exact_columns(A)
    c = np.asarray(c, dtype=float)
    if c.size != len(cols):
        raise ValueError("coefficient vector length differs from the column count")
    return _membership(cols, c, None, options, extreme)


def dual_feasibility(A, active, model: Model | None = None):
    """Program fragment for ``v`` in the intersection of dual AGE cones.

    Parameters
    ----------
    A : exponent data
    active : iterable of int
        Indices ``k`` whose dual AGE constraints are imposed; every other
        index contributes ``v_j >= 0``.

    Returns
    -------
    model : Model
    handles : DualHandles
    structure : SageStructure
        Each active ``k`` gets one exponential block per column on the
        smallest face of Newt(A) containing ``a_k``; off-face constraints
        hold automatically after shifting ``mu_k`` along the face normal.
    """
    cols, _ = _exact_columns(A)
    m = len(cols)
    active = set(int(k) for k in active)
    mask = np.array([j in active for j in range(m)])
    st = SageStructure(cols, np.ones(m, bool), mask, np.zeros(m, bool), parts=active)
    model = model or Model()
    return model, add_dual(model, st), st


# ---------------------------------------------------------------------------
# validation


@dataclass
class Verdict:
    ok: bool
    messages: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def validate_certificate(A, target, cert: SageCertificate, mode: str = "float", tol: float = 1e-7) -> Verdict:
    """Independently re-check a SAGE certificate against ``target``.

    Float mode checks every condition with tolerance ``tol`` relative to the
    coefficient scale.  Exact mode rebuilds each ``nu`` as an exact point of
    the kernel (rational projection onto an exact kernel basis), requires
    exact nonnegativity, and evaluates the entropy inequality with 256-bit
    arithmetic.
    """
    cols, Af = _exact_columns(A)
    target = np.asarray(target, dtype=float)
    m = len(cols)
    msgs = []
    if target.size != m or cert.residual.size != m:
        raise ValueError("certificate dimensions do not match the exponent data")
    scale = 1.0 + np.max(np.abs(target), initial=0.0)
    ks = [p.k for p in cert.parts]
    if len(set(ks)) != len(ks):
        msgs.append("parts share an index")
    total = cert.total()
    if np.max(np.abs(total - target)) > 1e-9 * scale:
        msgs.append(f"parts and residual miss the target by {np.max(np.abs(total - target)):.3e}")
    rmin = cert.residual.min(initial=0.0)
    if (mode == "exact" and rmin < 0) or rmin < -tol * scale:
        msgs.append(f"residual has negative entry {rmin:.3e}")
    if cert.restricted:
        neg = set(np.flatnonzero(target < -tol * scale).tolist())
        zi = ExponentMatrix(cols).zero_index()
        for p in cert.parts:
            if p.k not in neg and p.k != zi and target[p.k] > tol * scale:
                msgs.append(f"part {p.k} sits at a nonnegative target coefficient")
            cross = [j for j in neg if j != p.k and abs(p.cvec[j]) > 0]
            if cross:
                msgs.append(f"part {p.k} has mass on negative index {cross[0]}")
    for p in cert.parts:
        if not 0 <= p.k < m or p.nu.size != m - 1 or p.cvec.size != m:
            msgs.append("malformed part")
            continue
        msgs.extend(_check_part(cols, Af, p, mode, tol, scale))
    return Verdict(not msgs, msgs)


def _check_part(cols, Af, p: AgeCertificate, mode, tol, scale):
    msgs = []
    k = p.k
    others = np.delete(p.cvec, k)
    if mode == "float":
        if others.min(initial=0.0) < -tol * scale:
            msgs.append(f"part {k}: negative entry off the designated index")
        if p.nu.min(initial=0.0) < -tol * max(1.0, p.nu.max(initial=0.0)):
            msgs.append(f"part {k}: negative nu")
        D = np.delete(Af, k, axis=1) - Af[:, [k]]
        kres = np.max(np.abs(D @ p.nu), initial=0.0)
        if kres > tol * max(1.0, np.sum(np.abs(p.nu))):
            msgs.append(f"part {k}: nu misses the kernel by {kres:.3e}")
        ent = relative_entropy(np.maximum(p.nu, 0), E * np.maximum(others, 0))
        if ent > p.cvec[k] + tol * scale:
            msgs.append(f"part {k}: entropy {ent:.9g} exceeds coefficient {p.cvec[k]:.9g}")
        return msgs
    # exact mode
    if others.min(initial=0.0) < 0:
        msgs.append(f"part {k}: negative entry off the designated index")
    nu_exact = exact_kernel_point(cols, k, p.nu)
    if nu_exact is None:
        msgs.append(f"part {k}: nu is not close to a nonnegative kernel point")
        return msgs
    ent = exact_entropy(nu_exact, [Fraction(float(v)) for v in others])
    ck = mpmath.mpf(Fraction(float(p.cvec[k])).numerator) / Fraction(float(p.cvec[k])).denominator
    with mpmath.workprec(256):
        slack = mpmath.mpf(2) ** -200 * (1 + abs(ck) + sum(float(v) for v in nu_exact))
        if not ent <= ck + slack:
            msgs.append(f"part {k}: entropy {mpmath.nstr(ent, 12)} exceeds coefficient {float(ck)!r}")
    return msgs


def exact_kernel_point(cols, k, nu, rel_tol=1e-6):
    """Rational point of the kernel near ``nu`` with ``nu >= 0``, or ``None``.

    The support is taken from the entries of ``nu`` that are not negligible;
    ``nu`` is projected (least squares on an exact kernel basis, coefficients
    rationalized) so that the kernel equation holds exactly.
    """
    nu = np.asarray(nu, dtype=float)
    m = len(cols)
    idx = [j for j in range(m) if j != k]
    big = max(1.0, float(np.max(np.abs(nu), initial=0.0)))
    supp = [t for t in range(nu.size) if nu[t] > 1e-12 * big]
    out = [Fraction(0)] * nu.size
    if not supp:
        return out
    ak = cols[k]
    M = [[cols[idx[t]][i] - ak[i] for t in supp] for i in range(len(ak))]
    basis = nullspace(M, len(supp))
    if not basis:
        return None
    Bf = np.array([[float(v) for v in b] for b in basis]).T  # (|supp|, dim)
    w = np.linalg.lstsq(Bf, nu[supp], rcond=None)[0]
    wq = [rationalize(v) for v in w]
    vals = [sum(wq[d] * basis[d][t] for d in range(len(basis))) for t in range(len(supp))]
    if any(v < 0 for v in vals):
        return None
    approx = np.array([float(v) for v in vals])
    if np.max(np.abs(approx - nu[supp])) > rel_tol * (1.0 + np.sum(np.abs(nu))):
        return None
    for t, v in zip(supp, vals):
        out[t] = v
    return out


def exact_entropy(nu, c_others):
    """``D(nu, e c)`` in 256-bit arithmetic for rational inputs."""
    with mpmath.workprec(256):
        total = mpmath.mpf(0)
        for v, c in zip(nu, c_others):
            if v == 0:
                continue
            if c <= 0:
                return mpmath.inf
            vm = mpmath.mpf(v.numerator) / v.denominator
            cm = mpmath.mpf(c.numerator) / c.denominator
            total += vm * (mpmath.log(vm / cm) - 1)
        return total
