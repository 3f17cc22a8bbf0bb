"""Polynomial nonnegativity through signomial representatives.

A polynomial ``p = sum_i c_i x^{a_i}`` is certified through the signomial
with coefficients ``c_i`` on even exponents and ``-|c_i|`` elsewhere.  The
cone of SAGE polynomials is represented as
``{c : some chat in C_SAGE(A) has chat <= c and chat_i <= -c_i at non-even a_i}``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import geometry
from .algebra import ExponentMatrix, Signomial, SparsePolynomial, align, make_polynomial, multiply, power
from .optimize import (
    BOUND_OPTIONS,
    STATUS_FAILED,
    STATUS_INFEASIBLE,
    STATUS_OPTIMAL,
    STATUS_UNBOUNDED,
    BoundResult,
    _constraint_products,
)
from .rational import to_fraction
from .sage import (
    Refusal,
    SageCertificate,
    SageStructure,
    Verdict,
    _membership,
    add_primal,
    extract_certificate,
    validate_certificate,
)
from .solver import DUAL_INFEASIBLE, OPTIMAL, PRIMAL_INFEASIBLE, Model, SolverOptions, solve

__all__ = [
    "PolySageCertificate",
    "OrthantWitness",
    "signomial_representative",
    "orthant_dominated",
    "poly_sage_membership",
    "validate_poly_certificate",
    "circuit_nonneg_oracle",
    "poly_bound",
    "gf2_solve",
]


def _as_polynomial(p) -> SparsePolynomial:
    if isinstance(p, SparsePolynomial):
        return p
    raise TypeError("expected a SparsePolynomial")


def signomial_representative(p: SparsePolynomial) -> Signomial:
    """Signomial with ``c_i`` on even exponents and ``-|c_i|`` on the others.

    Examples
    --------
    >>> from sagecert.algebra import make_polynomial
    >>> p = make_polynomial([[0], [1], [3], [4]], [1, 1, -1, 1])
    >>> signomial_representative(p).coeffs.tolist()
    [1.0, -1.0, -1.0, 1.0]
    """
    p = _as_polynomial(p)
    even = p.exponents.is_even()
    chat = np.where(even, p.coeffs, -np.abs(p.coeffs))
    return Signomial(p.exponents, chat)


# ---------------------------------------------------------------------------
# orthant dominance


@dataclass
class OrthantWitness:
    """Sign vector ``s`` with ``A^T s = b (mod 2)``.

    At ``x0 = (-1)^s`` every non-even term ``c_i x0^{a_i}`` is ``<= 0``.
    """

    s: list
    b: list

    @property
    def x0(self) -> np.ndarray:
        return np.array([(-1.0) ** v for v in self.s])

    def to_dict(self):
        return {"s": [int(v) for v in self.s], "b": [int(v) for v in self.b]}


def gf2_solve(rows, rhs, n: int):
    """Solve ``rows s = rhs`` over GF(2).

    Parameters
    ----------
    rows : list of int
        Bit masks of length ``n`` (bit ``t`` is the coefficient of ``s_t``).
    rhs : list of int (0 or 1)

    Returns
    -------
    (solution, None) or (None, proof)
        ``proof`` lists equation indices whose sum reads ``0 = 1``.
    """
    eqs = [[int(r), int(b) & 1, 1 << idx] for idx, (r, b) in enumerate(zip(rows, rhs))]
    pivots = []
    r = 0
    for col in range(n):
        bit = 1 << col
        piv = next((t for t in range(r, len(eqs)) if eqs[t][0] & bit), None)
        if piv is None:
            continue
        eqs[r], eqs[piv] = eqs[piv], eqs[r]
        for t in range(len(eqs)):
            if t != r and eqs[t][0] & bit:
                eqs[t] = [eqs[t][0] ^ eqs[r][0], eqs[t][1] ^ eqs[r][1], eqs[t][2] ^ eqs[r][2]]
        pivots.append(col)
        r += 1
    for mask, b, combo in eqs[r:]:
        if mask == 0 and b:
            return None, [t for t in range(len(rows)) if combo >> t & 1]
    s = [0] * n
    for t, col in enumerate(pivots):
        s[col] = eqs[t][1]
    return s, None


def orthant_dominated(p: SparsePolynomial):
    """Find an orthant where every non-even term of ``p`` is nonpositive.

    ``b_i = 1`` exactly when ``c_i > 0`` and ``a_i`` is not even (zero
    coefficients impose nothing).  The system ``A^T s = b (mod 2)`` is
    solved by Gaussian elimination over GF(2).

    Returns
    -------
    OrthantWitness or Refusal
        The refusal's ``evidence`` lists terms whose equations sum to ``0 = 1``.
    """
    p = _as_polynomial(p)
    even = p.exponents.is_even()
    b = [int(c > 0 and not e) for c, e in zip(p.coeffs, even)]
    rows = []
    for col in p.exponents:
        mask = 0
        for t, v in enumerate(col):
            if v.numerator % 2:
                mask |= 1 << t
        rows.append(mask)
    s, proof = gf2_solve(rows, b, p.n)
    if s is None:
        return Refusal("not orthant-dominated: the parity system is inconsistent",
                       evidence={"terms": proof, "b": b}, status="inconsistent")
    return OrthantWitness(s, b)


# ---------------------------------------------------------------------------
# membership


@dataclass
class PolySageCertificate:
    """Certificate that ``p`` is a SAGE polynomial.

    ``chat`` is a SAGE vector with ``chat <= c`` and ``chat_i <= -c_i`` at
    non-even exponents; ``inner`` certifies ``chat``.
    """

    chat: np.ndarray
    inner: SageCertificate
    orthant_witness: OrthantWitness | None = None
    info: dict = field(default_factory=dict)

    def to_dict(self):
        d = self.inner.to_dict()
        d["chat"] = [float(v) for v in self.chat]
        d["orthant_witness"] = None if self.orthant_witness is None else self.orthant_witness.to_dict()
        return d

    @classmethod
    def from_dict(cls, d):
        ow = d.get("orthant_witness")
        return cls(np.array(d["chat"], dtype=float), SageCertificate.from_dict(d),
                   None if ow is None else OrthantWitness(ow["s"], ow["b"]))


def poly_sage_membership(p: SparsePolynomial, options: SolverOptions | None = None):
    """Decide whether ``p`` is a SAGE polynomial.

    The largest admissible ``chat`` is the signomial representative, and the
    SAGE cone is closed under adding nonnegative vectors, so ``p`` is a SAGE
    polynomial iff its representative is a SAGE signomial.

    Returns
    -------
    PolySageCertificate or Refusal
        A refusal never claims that ``p`` takes negative values; it only
        states that no SAGE certificate exists.
    """
    p = _as_polynomial(p)
    rep = signomial_representative(p)
    res = _membership(p.exponents, rep.coeffs, None, options)
    witness = orthant_dominated(p)
    if isinstance(res, Refusal):
        res.reason = "no SAGE certificate for the signomial representative: " + res.reason
        return res
    cert = PolySageCertificate(rep.coeffs.copy(), res, witness or None)
    cert.info = getattr(res, "info", {})
    return cert


def validate_poly_certificate(p: SparsePolynomial, cert: PolySageCertificate, mode: str = "float",
                              tol: float = 1e-7) -> Verdict:
    """Check the domination conditions on ``chat`` and the inner certificate."""
    p = _as_polynomial(p)
    c = p.coeffs
    scale = 1.0 + np.max(np.abs(c), initial=0.0)
    msgs = []
    slack = 0.0 if mode == "exact" else 1e-9 * scale
    if cert.chat.size != c.size:
        raise ValueError("certificate dimensions do not match the polynomial")
    if np.any(cert.chat > c + slack):
        msgs.append("chat exceeds c")
    odd = ~p.exponents.is_even()
    if np.any(cert.chat[odd] > -c[odd] + slack):
        msgs.append("chat exceeds -c at a non-even exponent")
    if cert.orthant_witness is not None:
        ow = cert.orthant_witness
        x0 = ow.x0
        for i in np.flatnonzero(odd):
            sign = np.prod(x0 ** p.A[:, i].astype(int))
            if c[i] * sign > 0:
                msgs.append(f"orthant witness fails at term {i}")
                break
    inner = validate_certificate(p.exponents, cert.chat, cert.inner, mode, tol)
    msgs.extend(inner.messages)
    return Verdict(not msgs, msgs)


def circuit_nonneg_oracle(Aouter, beta, c, b) -> bool:
    """Nonnegativity of a circuit polynomial ``sum_i c_i x^{a_i} + b x^beta``.

    Parameters
    ----------
    Aouter : list of even, affinely independent exponent vectors
    beta : exponent in their convex hull
    c : positive coefficients of the outer terms
    b : coefficient of the inner term

    Returns
    -------
    bool
        ``|b| <= Theta`` for non-even ``beta`` and ``-b <= Theta`` for even
        ``beta``, with ``Theta = prod (c_i / lam_i)^lam_i`` over the
        barycentric coordinates ``lam`` of ``beta`` (terms with ``lam_i = 0``
        are skipped, so a vertex gives ``Theta = c_i``).
    """
    pts = [[to_fraction(v) for v in a] for a in Aouter]
    beta = [to_fraction(v) for v in beta]
    c = np.asarray(c, dtype=float)
    if len(c) != len(pts):
        raise ValueError("one coefficient per outer exponent is required")
    if np.any(c <= 0):
        raise ValueError("outer coefficients must be positive")
    if any(v.denominator != 1 or v.numerator % 2 or v < 0 for a in pts for v in a):
        raise ValueError("outer exponents must be even nonnegative integers")
    if not geometry.is_simplicial(pts):
        raise ValueError("outer exponents must be affinely independent")
    lam = geometry.barycentric(beta, pts)
    if any(v < 0 for v in lam):
        raise ValueError("beta lies outside the simplex")
    beta_even = all(v.denominator == 1 and v.numerator % 2 == 0 for v in beta)
    bound = -float(b) if beta_even else abs(float(b))
    # 200-bit evaluation; the exact boundary Theta = bound counts as nonnegative
    with mpmath.workprec(200):
        log_theta = mpmath.fsum(
            mpmath.mpf(l.numerator) / l.denominator
            * (mpmath.log(mpmath.mpf(float(ci))) - mpmath.log(mpmath.mpf(l.numerator) / l.denominator))
            for l, ci in zip(lam, c) if l > 0
        )
        theta = mpmath.exp(log_theta)
        return bool(mpmath.mpf(bound) <= theta * (1 + mpmath.mpf(2) ** -150))


# ---------------------------------------------------------------------------
# polynomial hierarchy


def _add_poly_sage(model: Model, exps: ExponentMatrix, st: SageStructure):
    """Variables ``coef`` (free) with ``coef`` in the SAGE polynomial cone of ``exps``.

    Returns the coefficient variables, the representative variables and the
    primal handles of the SAGE decomposition.
    """
    m = exps.m
    coef = model.add_free(m)
    chat = model.add_free(m)
    h = add_primal(model, st, np.zeros(m), [(j, chat[j], 1.0) for j in range(m)])
    odd = ~exps.is_even()
    # chat <= coef everywhere and chat <= -coef at non-even exponents
    rows = model.add_rows(m)
    slack = model.add_nonneg(m)
    model.add_terms(rows, coef, 1.0)
    model.add_terms(rows, chat, -1.0)
    model.add_terms(rows, slack, -1.0)
    oi = np.flatnonzero(odd)
    if oi.size:
        rows2 = model.add_rows(oi.size)
        slack2 = model.add_nonneg(oi.size)
        model.add_terms(rows2, coef[oi], -1.0)
        model.add_terms(rows2, chat[oi], -1.0)
        model.add_terms(rows2, slack2, -1.0)
    return coef, chat, h


def poly_bound(p: SparsePolynomial, gs=(), pmult: int = 0, q: int = 1,
               options: SolverOptions | None = None) -> BoundResult:
    """SAGE-polynomial lower bound on ``inf{p(x) : g(x) >= 0}``.

    Maximizes ``gamma`` such that ``p - gamma - sum_h s_h h`` is a SAGE
    polynomial, where ``h`` ranges over the products of up to ``q``
    constraints.  With ``pmult = 0`` the multipliers ``s_h`` are scalars
    ``>= 0``; otherwise they are SAGE polynomials supported on the exponents
    of ``Poly(A, 1)^pmult``, ``A`` being the support of ``p`` together with
    the zero exponent.  Everything is one exponential-cone program.
    """
    p = _as_polynomial(p).with_zero()
    gs = [_as_polynomial(g) for g in gs]
    if pmult < 0:
        raise ValueError("multiplier level must be nonnegative")
    if gs and q < 1:
        raise ValueError("product level must be at least 1")
    if any(g.n != p.n for g in gs):
        raise ValueError("dimension mismatch")
    t0 = time.perf_counter()
    H = _constraint_products(gs, q) if gs else []
    if pmult > 0:
        Aprime = power(make_polynomial(list(p.exponents), np.ones(p.m)), pmult).exponents
        ones = make_polynomial(list(Aprime), np.ones(Aprime.m))
        # absolute values keep every product exponent visible (no accidental cancellation)
        supports = [multiply(ones, make_polynomial(list(h.exponents), np.abs(h.coeffs))) for h in H]
    else:
        Aprime = None
        supports = list(H)
    App, vecs = align(p, *supports)
    m = App.m
    pc = vecs[0]
    zi = App.zero_index()
    odd = ~App.is_even()
    is_zero = np.arange(m) == zi
    Hmat = np.column_stack(vecs[1:]) if H else np.zeros((m, 0))
    touched = np.any(Hmat != 0, axis=1)

    # even coefficients of the Lagrangian need a part when they can be
    # negative, non-even ones whenever they can be nonzero
    if pmult > 0:
        may_neg = (pc < 0) | is_zero | touched
    else:
        may_neg = (pc < 0) | is_zero | np.any(Hmat > 0, axis=1)
    may_nz = (pc != 0) | is_zero | touched
    can_neg = np.where(odd, may_nz, may_neg)
    fixed = ~is_zero & ~touched
    always_neg = fixed & np.where(odd, pc != 0, pc < 0)
    st = SageStructure(App, ~odd, can_neg, always_neg)
    num_exp = st.num_exp

    model = Model()
    gamma = model.add_free(1)[0]
    L, Lhat, h = _add_poly_sage(model, App, st)
    # L_j + gamma [j = 0] + sum_h (multiplier * h)_j = p_j
    rows = model.add_rows(m)
    model.add_terms(rows, L, 1.0)
    for j in range(m):
        model.set_rhs(rows[j], pc[j])
    model.add_terms(rows[zi], gamma, 1.0)
    multipliers = []
    if pmult == 0:
        lam = model.add_nonneg(len(H)) if H else np.zeros(0, dtype=int)
        for t in range(len(H)):
            nz = np.flatnonzero(Hmat[:, t])
            model.add_terms(rows[nz], lam[t], Hmat[nz, t])
        multipliers.append(lam)
    else:
        # representative entries at non-even exponents are never positive
        mst = SageStructure(Aprime, Aprime.is_even(), np.ones(Aprime.m, bool), np.zeros(Aprime.m, bool))
        index = {col: i for i, col in enumerate(App.columns)}
        for hpoly in H:
            sig, _, _ = _add_poly_sage(model, Aprime, mst)
            num_exp += mst.num_exp
            for a_idx, acol in enumerate(Aprime.columns):
                for hcol, hc in zip(hpoly.exponents, hpoly.coeffs):
                    if hc != 0:
                        j = index[tuple(x + y for x, y in zip(acol, hcol))]
                        model.add_terms(rows[j], sig[a_idx], hc)
            multipliers.append(sig)
    model.add_objective(gamma, -1.0)
    sol = solve(model.compile(), options or BOUND_OPTIONS)
    res = BoundResult(np.nan, STATUS_FAILED, pmult, solver_status=sol.status, iterations=sol.iterations,
                      exponents=App, num_exp=num_exp)
    if sol.status == OPTIMAL:
        g = float(sol.x[gamma])
        res.status = STATUS_OPTIMAL
        res.value = g
        res.dual_value = -float(sol.dual_objective)
        chat = sol.x[Lhat]
        res.target = sol.x[L]
        inner = extract_certificate(st, h, sol.x, chat, restricted=False)
        res.certificate = inner
        res.info["chat"] = chat
        res.info["multipliers"] = [[float(v) for v in sol.x[idx]] for idx in multipliers]
    elif sol.status == PRIMAL_INFEASIBLE:
        res.status = STATUS_INFEASIBLE
        res.value = res.dual_value = -np.inf
    elif sol.status == DUAL_INFEASIBLE:
        res.status = STATUS_UNBOUNDED
        res.value = res.dual_value = np.inf
    res.solve_time = time.perf_counter() - t0
    return res

