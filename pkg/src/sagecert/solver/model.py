"""Incremental assembly of :class:`ConeProgram` instances from triplets."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .program import EXP, FREE, NONNEG, ConeProgram


class Model:
    """Collects variables, equality rows and objective terms.

    Variables are created in cone blocks and referenced by integer index.
    Rows are created empty and filled with :meth:`add_terms`; repeated
    entries are summed when the program is compiled.
    """

    def __init__(self):
        self.blocks = []
        self.nvar = 0
        self.nrow = 0
        self._ri, self._ci, self._vi = [], [], []
        self._rhs = {}
        self._obj = {}

    def _new(self, kind, size):
        idx = np.arange(self.nvar, self.nvar + size)
        if self.blocks and self.blocks[-1][0] == kind and kind != EXP:
            self.blocks[-1][1] += size
        else:
            self.blocks.append([kind, size])
        self.nvar += size
        return idx

    def add_free(self, size: int = 1) -> np.ndarray:
        return self._new(FREE, size)

    def add_nonneg(self, size: int = 1) -> np.ndarray:
        return self._new(NONNEG, size)

    def add_exp(self, count: int = 1) -> np.ndarray:
        """Create ``count`` exponential cone blocks; returns indices of shape (count, 3)."""
        out = np.empty((count, 3), dtype=int)
        for t in range(count):
            out[t] = np.arange(self.nvar, self.nvar + 3)
            self.blocks.append([EXP, 3])
            self.nvar += 3
        return out

    def add_rows(self, count: int = 1) -> np.ndarray:
        idx = np.arange(self.nrow, self.nrow + count)
        self.nrow += count
        return idx

    def add_terms(self, rows, cols, vals):
        rows, cols, vals = np.broadcast_arrays(
            np.asarray(rows, dtype=int), np.asarray(cols, dtype=int), np.asarray(vals, dtype=float)
        )
        self._ri.append(rows.ravel())
        self._ci.append(cols.ravel())
        self._vi.append(vals.ravel())

    def set_rhs(self, row: int, value: float):
        self._rhs[int(row)] = self._rhs.get(int(row), 0.0) + float(value)

    def add_objective(self, cols, vals):
        cols, vals = np.broadcast_arrays(np.asarray(cols, dtype=int), np.asarray(vals, dtype=float))
        for j, v in zip(cols.ravel(), vals.ravel()):
            self._obj[int(j)] = self._obj.get(int(j), 0.0) + float(v)

    def compile(self) -> ConeProgram:
        c = np.zeros(self.nvar)
        for j, v in self._obj.items():
            c[j] = v
        b = np.zeros(self.nrow)
        for i, v in self._rhs.items():
            b[i] = v
        if self._ri:
            ri = np.concatenate(self._ri)
            ci = np.concatenate(self._ci)
            vi = np.concatenate(self._vi)
        else:
            ri = ci = np.zeros(0, dtype=int)
            vi = np.zeros(0)
        A = sp.csr_matrix((vi, (ri, ci)), shape=(self.nrow, self.nvar))
        return ConeProgram(c, A, b, [tuple(bk) for bk in self.blocks])
