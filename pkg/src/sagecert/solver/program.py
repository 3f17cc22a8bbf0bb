"""Conic programs in standard form over free, orthant and exponential-cone blocks.

A program reads::

    minimize    c^T x
    subject to  A x = b
                x in K = K_1 x K_2 x ... x K_r

where each block ``K_i`` is either a run of free variables, a run of
nonnegative variables, or a single three dimensional exponential cone
``cl{(u, v, w) : v * exp(u / v) <= w, v > 0}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

FREE = "free"
NONNEG = "nonneg"
EXP = "exp"

_KINDS = (FREE, NONNEG, EXP)


class ProgramError(ValueError):
    """Raised for malformed cone programs."""


@dataclass
class ConeProgram:
    """Linear objective, sparse equality constraints and an ordered cone product.

    Parameters
    ----------
    c : ndarray, shape (n,)
        Objective vector.
    A : sparse matrix, shape (p, n)
        Equality constraint matrix.
    b : ndarray, shape (p,)
        Right-hand side.
    blocks : list of (kind, size)
        Ordered cone blocks; ``kind`` is ``"free"``, ``"nonneg"`` or ``"exp"``
        and exponential blocks always have size 3.
    """

    c: np.ndarray
    A: sp.csr_matrix
    b: np.ndarray
    blocks: list = field(default_factory=list)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.A = sp.csr_matrix(self.A, dtype=float)
        self.A.sum_duplicates()
        self.A.eliminate_zeros()
        self.blocks = [(str(k), int(s)) for k, s in self.blocks]
        self.check()

    @property
    def n(self) -> int:
        return self.c.size

    @property
    def num_exp(self) -> int:
        return sum(1 for k, _ in self.blocks if k == EXP)

    def check(self):
        n = self.c.size
        if self.A.shape != (self.b.size, n):
            raise ProgramError(
                f"constraint matrix has shape {self.A.shape}, expected {(self.b.size, n)}"
            )
        total = 0
        for kind, size in self.blocks:
            if kind not in _KINDS:
                raise ProgramError(f"unknown cone kind {kind!r}")
            if size < 1:
                raise ProgramError("cone blocks must be nonempty")
            if kind == EXP and size != 3:
                raise ProgramError("exponential cone blocks have size 3")
            total += size
        if total != n:
            raise ProgramError(f"cone blocks cover {total} variables, program has {n}")
        if not (np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.b))):
            raise ProgramError("non-finite program data")
        if self.A.nnz and not np.all(np.isfinite(self.A.data)):
            raise ProgramError("non-finite program data")

    def index_sets(self):
        """Return ``(free, nonneg, exp)`` index arrays; ``exp`` has shape (k, 3)."""
        free, nonneg, expo = [], [], []
        pos = 0
        for kind, size in self.blocks:
            idx = range(pos, pos + size)
            if kind == FREE:
                free.extend(idx)
            elif kind == NONNEG:
                nonneg.extend(idx)
            else:
                expo.append(list(idx))
            pos += size
        return (
            np.array(free, dtype=int),
            np.array(nonneg, dtype=int),
            np.array(expo, dtype=int).reshape(-1, 3),
        )

    # text format ---------------------------------------------------------

    def dumps(self) -> str:
        """Serialize to the line-based text format read by :func:`loads`."""
        lines = [f"coneprog 1 {self.n} {self.b.size}"]
        lines.append("cones " + " ".join(f"{k}:{s}" for k, s in self.blocks))
        nz = np.flatnonzero(self.c)
        lines.append(f"objective {nz.size}")
        lines.extend(f"{j} {float(self.c[j])!r}" for j in nz)
        coo = self.A.tocoo()
        order = np.lexsort((coo.col, coo.row))
        lines.append(f"matrix {coo.nnz}")
        lines.extend(
            f"{coo.row[t]} {coo.col[t]} {float(coo.data[t])!r}" for t in order
        )
        nz = np.flatnonzero(self.b)
        lines.append(f"rhs {nz.size}")
        lines.extend(f"{i} {float(self.b[i])!r}" for i in nz)
        lines.append("end")
        return "\n".join(lines) + "\n"


def loads(text: str) -> ConeProgram:
    """Parse the text produced by :meth:`ConeProgram.dumps`."""
    lines = [ln.strip() for ln in text.strip().splitlines()]
    it = iter(lines)
    try:
        head = next(it).split()
        if head[:2] != ["coneprog", "1"]:
            raise ProgramError("not a cone program dump")
        n, p = int(head[2]), int(head[3])
        cones = next(it).split()
        if cones[0] != "cones":
            raise ProgramError("missing cone list")
        blocks = [(tok.split(":")[0], int(tok.split(":")[1])) for tok in cones[1:]]

        def section(name):
            tag, count = next(it).split()
            if tag != name:
                raise ProgramError(f"expected section {name!r}, got {tag!r}")
            return [next(it).split() for _ in range(int(count))]

        c = np.zeros(n)
        for j, val in section("objective"):
            c[int(j)] = float(val)
        rows, cols, vals = [], [], []
        for i, j, val in section("matrix"):
            rows.append(int(i))
            cols.append(int(j))
            vals.append(float(val))
        b = np.zeros(p)
        for i, val in section("rhs"):
            b[int(i)] = float(val)
        if next(it) != "end":
            raise ProgramError("missing end marker")
    except (StopIteration, IndexError, ValueError) as exc:
        if isinstance(exc, ProgramError):
            raise
        raise ProgramError(f"malformed program text: {exc}") from exc
    A = sp.csr_matrix((vals, (rows, cols)), shape=(p, n))
    return ConeProgram(c, A, b, blocks)
