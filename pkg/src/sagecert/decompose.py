"""Structural post-processing of SAGE certificates.

* :func:`cancellation_free` rewrites an arbitrary AGE decomposition into
  one part per negative coefficient with zero cross-support on the negative
  indices, using pairwise row-sum preserving conic combinations.
* :func:`circuit_decompose` splits one AGE certificate into AGE vectors
  whose supports are simplicial circuits.
* :func:`poly_age_decompose` turns a cancellation-free certificate of a
  polynomial's signomial representative into AGE polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import geometry
from .rational import rationalize, to_fraction
from .sage import (
    AgeCertificate,
    Refusal,
    SageCertificate,
    _exact_columns,
    age_membership,
    exact_kernel_point,
    validate_certificate,
)

__all__ = [
    "CircuitAgeCertificate",
    "transfer_pair",
    "transfer_weights",
    "cancellation_free",
    "is_cancellation_free",
    "circuit_decompose",
    "classify_support",
    "poly_age_decompose",
]

REMAINDER_TOL = 1e-9


# ---------------------------------------------------------------------------
# pairwise transfer


def _fractions(x):
    """Exact fractions; floats keep their exact binary value."""
    out = []
    for v in x:
        if isinstance(v, (Fraction, str, int, np.integer)):
            out.append(to_fraction(v))
        else:
            out.append(Fraction(float(v)))
    return out


def transfer_weights(w, v, i: int, j: int):
    """Conic weights ``(alpha, beta), (gamma, delta)`` of :func:`transfer_pair`.

    ``w_hat = alpha w + beta v`` and ``v_hat = gamma w + delta v`` with
    ``alpha + gamma = beta + delta = 1``.
    """
    w = _fractions(w)
    v = _fractions(v)
    if i == j:
        raise ValueError("the two distinguished indices must differ")
    if len(w) != len(v):
        raise ValueError("vectors have different lengths")
    if any(w[t] < 0 for t in range(len(w)) if t != i) or any(v[t] < 0 for t in range(len(v)) if t != j):
        raise ValueError("w may be negative only at i and v only at j")
    if not (w[i] + v[i] < 0 and w[j] + v[j] < 0):
        raise ValueError("need w_i + v_i < 0 and w_j + v_j < 0")
    det = w[i] * v[j] - v[i] * w[j]
    # closed-form solution of the 4x4 system; all four weights are >= 0
    lam1 = -(w[j] + v[j]) * v[i] / det
    lam2 = (w[i] + v[i]) * v[j] / det
    lam3 = w[i] * (w[j] + v[j]) / det
    lam4 = -(w[i] + v[i]) * w[j] / det
    return (lam2, lam4), (lam1, lam3)


def transfer_pair(w, v, i: int, j: int):
    """Rebalance two vectors so that their cross entries vanish.

    Parameters
    ----------
    w, v : sequences of length m
        ``w`` may be negative only at ``i`` and ``v`` only at ``j``, and
        ``w_k + v_k < 0`` for ``k`` in ``{i, j}``.
    i, j : int
        Distinct indices (0-based).

    Returns
    -------
    w_hat, v_hat : list of Fraction
        Conic combinations of ``w`` and ``v`` with ``w_hat + v_hat = w + v``
        and ``w_hat[j] = v_hat[i] = 0``.  Arithmetic is exact; float inputs
        are converted to their exact binary values.

    Examples
    --------
    >>> w_hat, v_hat = transfer_pair([-2, 3], [1, -4], 0, 1)
    >>> [str(x) for x in w_hat], [str(x) for x in v_hat]
    (['-1', '0'], ['0', '-1'])
    """
    (a, b), (g, d) = transfer_weights(w, v, i, j)
    w = _fractions(w)
    v = _fractions(v)
    w_hat = [a * x + b * y for x, y in zip(w, v)]
    v_hat = [g * x + d * y for x, y in zip(w, v)]
    # the weights are exact, so these entries are exactly zero already
    assert w_hat[j] == 0 and v_hat[i] == 0
    return w_hat, v_hat


# ---------------------------------------------------------------------------
# cancellation-free decompositions


def is_cancellation_free(c, cert: SageCertificate, tol: float = 0.0) -> bool:
    """True iff parts are indexed exactly by ``{i : c_i < 0}`` with zero cross-support there."""
    c = np.asarray(c, dtype=float)
    neg = set(np.flatnonzero(c < 0).tolist())
    ks = [p.k for p in cert.parts]
    if sorted(ks) != sorted(neg) or len(set(ks)) != len(ks):
        return False
    for p in cert.parts:
        if any(abs(p.cvec[j]) > tol for j in neg if j != p.k):
            return False
        if any(p.cvec[j] < -tol for j in range(c.size) if j != p.k):
            return False
    return True


def _as_parts(parts):
    if isinstance(parts, SageCertificate):
        return list(parts.parts), parts.residual.copy()
    parts = list(parts)
    m = parts[0].cvec.size if parts else 0
    return parts, np.zeros(m)


def cancellation_free(A, c, parts, options=None) -> SageCertificate:
    """Rewrite an AGE decomposition of ``c`` into a cancellation-free one.

    Parameters
    ----------
    A : exponent data
    c : array of length m
    parts : SageCertificate or list of AgeCertificate
        Any decomposition of ``c`` into AGE vectors (plus a nonnegative
        residual).

    Returns
    -------
    SageCertificate
        One part per index ``i`` with ``c_i < 0``; part ``i`` is zero on the
        other negative indices and nonnegative off ``i``.  Each part is
        re-certified by an AGE membership solve.

    Notes
    -----
    Part vectors are rationalized (denominators up to ``1e12``) and every
    row operation is exact.  Parts indexed outside the negative set are
    absorbed first, then rows are processed in the order ``(1,2), (1,3),
    ..., (2,3), ...`` followed by back-substitution ``(k,k-1), ..., (k,1),
    (k-1,k-2), ...``.
    """
    cols, _ = _exact_columns(A)
    c = np.asarray(c, dtype=float)
    m = len(cols)
    plist, residual = _as_parts(parts)
    if residual.size == 0:
        residual = np.zeros(m)
    total = residual + sum((p.cvec for p in plist), np.zeros(m))
    scale = 1.0 + np.max(np.abs(c), initial=0.0)
    if np.max(np.abs(total - c), initial=0.0) > 1e-7 * scale:
        raise ValueError("parts do not sum to the coefficient vector")
    for p in plist:
        if np.any(np.delete(p.cvec, p.k) < -1e-9 * scale):
            raise ValueError(f"part {p.k} is negative off its index")
    if isinstance(parts, SageCertificate) and is_cancellation_free(c, parts) \
            and np.all(parts.residual >= -1e-12 * scale):
        return parts
    N = np.flatnonzero(c < 0).tolist()
    if not N:
        return SageCertificate([], c.copy())

    # exact rows, one per part index; residual spread over the rows
    rows: dict[int, list[Fraction]] = {}
    for p in plist:
        # float noise below zero off the part index would break the transfer hypotheses
        vec = [rationalize(v if j == p.k else max(v, 0.0)) for j, v in enumerate(p.cvec)]
        if p.k in rows:
            rows[p.k] = [a + b for a, b in zip(rows[p.k], vec)]
        else:
            rows[p.k] = vec
    res_q = [rationalize(max(v, 0.0)) for v in residual]
    # a row that is nonnegative is a residual contribution
    for k in list(rows):
        if rows[k][k] >= 0:
            res_q = [a + b for a, b in zip(res_q, rows.pop(k))]
    if not rows:
        raise ValueError("no AGE part carries a negative coefficient")
    share = Fraction(1, len(rows))
    for k in rows:
        rows[k] = [a + share * b for a, b in zip(rows[k], res_q)]

    # absorb parts whose index is not negative in c
    for k in sorted(rows):
        if k in N or k not in rows:
            continue
        row_k = rows.pop(k)
        if row_k[k] >= 0:
            share = Fraction(1, len(rows))
            for i in rows:
                rows[i] = [a + share * b for a, b in zip(rows[i], row_k)]
            continue
        pos = {i: rows[i][k] for i in rows if rows[i][k] > 0}
        tot = sum(pos.values())
        if tot <= 0:
            raise ValueError("decomposition does not sum to a vector with c_k >= 0")
        for i, val in pos.items():
            lam = val / tot
            rows[i] = [a + lam * b for a, b in zip(rows[i], row_k)]
    if sorted(rows) != N:
        raise ValueError("decomposition lacks a part for some negative coefficient")

    order = N
    for t in range(len(order)):
        for r in range(t + 1, len(order)):
            _pair(rows, order[t], order[r])
    for t in range(len(order) - 1, 0, -1):
        for r in range(t - 1, -1, -1):
            _pair(rows, order[t], order[r])

    out = []
    acc = np.zeros(m)
    for k in order:
        vec = np.array([float(v) for v in rows[k]])
        for j in order:
            if j != k and rows[k][j] != 0:
                raise AssertionError("elimination left a cross entry")
        cert = age_membership(cols, k, np.where(np.arange(m) == k, vec, np.maximum(vec, 0.0)),
                              options=options)
        if isinstance(cert, Refusal):
            raise ValueError(f"row {k} could not be re-certified as AGE: {cert.reason}")
        cert.cvec = vec
        out.append(cert)
        acc += vec
    return SageCertificate(out, c - acc, restricted=True)


def _pair(rows, i, j):
    w, v = rows[i], rows[j]
    if w[j] == 0 and v[i] == 0:
        return
    rows[i], rows[j] = transfer_pair(w, v, i, j)


# ---------------------------------------------------------------------------
# simplicial circuits


@dataclass
class CircuitAgeCertificate(AgeCertificate):
    """AGE certificate whose support is a singleton or a simplicial circuit.

    ``nu`` and ``cvec`` describe the unscaled circuit vector; the
    decomposition uses ``theta * cvec``.  ``nu_exact`` holds ``nu`` as exact
    fractions (indexed like ``nu``).
    """

    theta: Fraction = Fraction(1)
    nu_exact: list = field(default_factory=list)
    kind: str = ""

    def scaled(self) -> AgeCertificate:
        th = float(self.theta)
        return AgeCertificate(self.k, th * self.nu, th * self.cvec)

    def to_dict(self):
        d = super().to_dict()
        d.update({"circuit": True, "theta": str(self.theta), "kind": self.kind,
                  "nu_exact": [str(v) for v in self.nu_exact]})
        return d


def classify_support(cols, idx) -> str:
    """``"singleton"``, ``"simplicial_circuit"`` or ``"other"`` for a column subset."""
    pts = [cols[j] for j in idx]
    if len(pts) == 1:
        return "singleton"
    if geometry.is_simplicial(pts):
        return "other"
    for t in range(len(pts)):
        if not geometry.is_simplicial(pts[:t] + pts[t + 1 :]):
            return "other"
    rep = geometry.extreme_indices(pts)
    if len(rep.extreme_indices) == len(pts) - 1:
        return "simplicial_circuit"
    return "other"


def circuit_decompose(A, cert: AgeCertificate, tol: float = 1e-7):
    """Split an AGE certificate into circuit-supported AGE vectors.

    Returns
    -------
    parts : list of CircuitAgeCertificate
        With ``sum theta_i nu_i = nu`` exactly (rational arithmetic).
    remainder : ndarray
        ``cvec - sum theta_i cvec_i``, nonnegative up to ``-1e-9``.

    Raises
    ------
    ValueError
        If the certificate does not validate.
    """
    cols, Af = _exact_columns(A)
    m = len(cols)
    k = cert.k
    verdict = validate_certificate(cols, cert.cvec, SageCertificate([cert], np.zeros(m), restricted=False),
                                   tol=tol)
    if not verdict:
        raise ValueError("certificate fails validation: " + "; ".join(verdict.messages))
    if not np.any(cert.nu > 0):
        return [], cert.cvec.copy()
    nu_q = exact_kernel_point(cols, k, cert.nu)
    if nu_q is None:
        raise ValueError("nu is not close to an exact kernel point")
    total = sum(nu_q)
    others = [j for j in range(m) if j != k]
    lam = [v / total for v in nu_q]
    mix = geometry.decompose_mixture([cols[j] for j in others], cols[k], lam)
    c_oth = np.delete(cert.cvec, k)
    logs = np.zeros(m - 1)
    pos = np.array([v > 0 for v in nu_q])
    logs[pos] = np.log(np.array([float(v) for v in nu_q])[pos] / c_oth[pos]) - 1.0
    parts = []
    used = np.zeros(m)
    for li, theta in mix.parts:
        nu_i = [v * total for v in li]
        nu_f = np.array([float(v) for v in nu_i])
        ci = np.zeros(m - 1)
        ci[pos] = c_oth[pos] * nu_f[pos] / np.array([float(v) for v in nu_q])[pos]
        # linear in nu_i because c_i / nu_i is fixed at c / nu on the support
        ck = float(np.sum(nu_f[pos] * logs[pos]))
        cvec = np.insert(ci, k, ck)
        supp = [others[t] for t in range(m - 1) if nu_i[t] != 0] + [k]
        kind = classify_support(cols, sorted(supp))
        parts.append(CircuitAgeCertificate(k, nu_f, cvec, theta=theta, nu_exact=nu_i, kind=kind))
        used += float(theta) * cvec
    remainder = cert.cvec - used
    if remainder.min(initial=0.0) < -REMAINDER_TOL * (1.0 + np.abs(cert.cvec).max()):
        raise ValueError("circuit parts exceed the certificate")
    return parts, remainder


# ---------------------------------------------------------------------------
# AGE polynomials


def poly_age_decompose(A, c, cert: SageCertificate, tol: float = 1e-7):
    """Split a SAGE polynomial into AGE polynomials without cancellation.

    Parameters
    ----------
    A : exponent data with nonnegative integer entries
    c : polynomial coefficients
    cert : SageCertificate
        Cancellation-free certificate for a vector ``chat`` with
        ``chat <= c`` and ``chat_i <= -|c_i|`` at non-even exponents (for
        instance the signomial representative).

    tol : float
        Relative slack for solver round-off in ``cert``; leftover entries
        below ``tol * (1 + max|c|)`` in magnitude are dropped.

    Returns
    -------
    list of ndarray
        Coefficient vectors of AGE polynomials summing to ``c``.  Each has at
        most one entry outside ``{c_j >= 0, a_j even}`` and all parts agree
        in sign at every index.
    """
    cols, _ = _exact_columns(A)
    c = np.asarray(c, dtype=float)
    m = len(cols)
    even = np.array([all(v.denominator == 1 and v.numerator % 2 == 0 for v in col) for col in cols])
    chat = cert.total()
    scale = 1.0 + np.max(np.abs(c), initial=0.0)
    slack = tol * scale
    if np.any(chat > c + slack) or np.any((chat > -np.abs(c) + slack) & ~even):
        raise ValueError("certificate target is not dominated by the polynomial coefficients")
    if not is_cancellation_free(chat, cert, tol=slack):
        raise ValueError("certificate is not cancellation-free")
    out = []
    acc = np.zeros(m)
    for p in cert.parts:
        i = p.k
        vec = np.maximum(p.cvec, 0.0)
        vec[~even] = 0.0
        vec[i] = c[i]
        out.append(vec)
        acc += vec
    left = c - acc
    left[np.abs(left) <= slack] = 0.0
    if np.any(left[~even] != 0) or np.any(left < 0):
        raise ValueError("leftover coefficients are not an even posynomial")
    if np.any(left > 0):
        out.append(left)
    return out
