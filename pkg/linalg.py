"""
Exact integer linear algebra for the cohomology engine

Matrices are numpy arrays of dtype=object holding Python ints, so nothing
overflows. The Smith form A = S @ D @ T is computed by alternately clearing
rows and columns with 2x2 unimodular operations, then fixing the diagonal
into a divisibility chain.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from errors import InternalError

logger = logging.getLogger(__name__)


def as_integer_matrix(rows, n_cols: Optional[int] = None) -> np.ndarray:
    """Object-dtype copy of an integer matrix (keeps the shape of empty inputs)"""
    A = np.array(rows, dtype=object)
    if A.ndim == 1:
        if A.size == 0 and n_cols is not None:
            return np.zeros((0, n_cols), dtype=object)
        A = A.reshape(1, -1) if A.size else A.reshape(0, 0)
    return np.array([[int(a) for a in row] for row in A], dtype=object).reshape(A.shape)


def exgcd(a: int, b: int) -> np.ndarray:
    """
    2x2 determinant-one matrix M with M @ [a, b] = [gcd(a, b), 0]

    When a divides b the top-right entry is 0, so an already reduced pivot is
    left untouched.
    """
    a_sign = -1 if a < 0 else 1
    b_sign = -1 if b < 0 else 1
    a, b = a * a_sign, b * b_sign

    M = np.array([[b, 0, 1],
                  [a, 1, 0]], dtype=object)
    while M[1, 0] != 0:
        q = M[0, 0] // M[1, 0]
        M[0] -= q * M[1]
        M = M[::-1]

    g = M[0, 0]
    M = M[:, 1:].copy()
    M *= [a_sign, b_sign]
    if g != 0:
        M[1] = [-b_sign * b // g, a_sign * a // g]
    return M


def inverse_unimodular_2x2(M: np.ndarray) -> np.ndarray:
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if det not in (1, -1):
        raise InternalError(f"2x2 operation with determinant {det}")
    return np.array([[M[1, 1] * det, -M[0, 1] * det],
                     [-M[1, 0] * det, M[0, 0] * det]], dtype=object)


@dataclass
class SmithForm:
    """A == S @ D @ T with S, T unimodular and D diagonal in divisibility order"""
    S: np.ndarray
    D: np.ndarray
    T: np.ndarray
    S_inv: np.ndarray
    T_inv: np.ndarray

    @property
    def diagonal(self) -> List[int]:
        return [int(self.D[k, k]) for k in range(min(self.D.shape))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


class _Reducer:
    """Row/column operations on D that keep S, T and their inverses in sync"""

    def __init__(self, A: np.ndarray):
        m, n = A.shape
        self.D = A.copy()
        self.S = np.eye(m, dtype=object)
        self.S_inv = np.eye(m, dtype=object)
        self.T = np.eye(n, dtype=object)
        self.T_inv = np.eye(n, dtype=object)

    def rows(self, i: int, j: int, M: np.ndarray):
        M_inv = inverse_unimodular_2x2(M)
        self.D[[i, j]] = M @ self.D[[i, j]]
        self.S[:, [i, j]] = self.S[:, [i, j]] @ M_inv
        self.S_inv[[i, j]] = M @ self.S_inv[[i, j]]

    def cols(self, i: int, j: int, N: np.ndarray):
        N_inv = inverse_unimodular_2x2(N)
        self.D[:, [i, j]] = self.D[:, [i, j]] @ N
        self.T[[i, j]] = N_inv @ self.T[[i, j]]
        self.T_inv[:, [i, j]] = self.T_inv[:, [i, j]] @ N

    def negate_row(self, i: int):
        self.D[i] = -self.D[i]
        self.S[:, i] = -self.S[:, i]
        self.S_inv[i] = -self.S_inv[i]

    def clear_col(self, i: int) -> bool:
        if all(self.D[r, i] == 0 for r in range(i + 1, self.D.shape[0])):
            return False
        for r in range(i + 1, self.D.shape[0]):
            if self.D[r, i] != 0:
                self.rows(i, r, exgcd(self.D[i, i], self.D[r, i]))
        return True

    def clear_row(self, i: int) -> bool:
        if all(self.D[i, c] == 0 for c in range(i + 1, self.D.shape[1])):
            return False
        for c in range(i + 1, self.D.shape[1]):
            if self.D[i, c] != 0:
                self.cols(i, c, exgcd(self.D[i, i], self.D[i, c]).T)
        return True

    def clear(self, i: int):
        self.clear_col(i)
        while self.clear_row(i) and self.clear_col(i):
            pass

    def fix_divisibility(self):
        """Turn a diagonal matrix into d1 | d2 | ... with zeros last"""
        k = min(self.D.shape)
        swap = np.array([[0, 1], [1, 0]], dtype=object)
        changed = True
        while changed:
            changed = False
            for i in range(k):
                for j in range(i + 1, k):
                    di, dj = self.D[i, i], self.D[j, j]
                    if di == 0 and dj != 0:
                        self.rows(i, j, swap)
                        self.cols(i, j, swap)
                        changed = True
                    elif di != 0 and dj % di != 0:
                        self.cols(i, j, np.array([[1, 0], [1, 1]], dtype=object))
                        self.clear(i)
                        changed = True
        for i in range(k):
            if self.D[i, i] < 0:
                self.negate_row(i)


def smith_normal_form(A) -> SmithForm:
    """
    Smith normal form of an integer matrix

    Returns S, D, T with A == S @ D @ T, S and T unimodular (inverses
    included), D diagonal with nonnegative entries d1 | d2 | ... and the zero
    entries last.
    """
    A = as_integer_matrix(A) if not isinstance(A, np.ndarray) else A.astype(object)
    r = _Reducer(A)
    for i in range(min(A.shape)):
        r.clear(i)
    r.fix_divisibility()
    return SmithForm(r.S, r.D, r.T, r.S_inv, r.T_inv)


def solve(A: np.ndarray, v: Sequence[int]) -> Optional[np.ndarray]:
    """An integer x with A @ x == v, or None when there is none"""
    m, n = A.shape
    v = np.array([int(x) for x in v], dtype=object)
    if m == 0:
        return np.zeros(n, dtype=object)
    if n == 0:
        return np.zeros(0, dtype=object) if all(x == 0 for x in v) else None
    form = smith_normal_form(A)
    w = form.S_inv @ v
    y = np.zeros(n, dtype=object)
    k = min(m, n)
    for i in range(k):
        d = form.D[i, i]
        if d == 0:
            if w[i] != 0:
                return None
        elif w[i] % d != 0:
            return None
        else:
            y[i] = w[i] // d
    if any(w[i] != 0 for i in range(k, m)):
        return None
    x = form.T_inv @ y if n else y
    if not (A @ x == v).all():
        raise InternalError("Smith form solution does not satisfy the system")
    return x


def kernel_basis(A: np.ndarray) -> np.ndarray:
    """Columns spanning the integer kernel of A"""
    m, n = A.shape
    if m == 0:
        return np.eye(n, dtype=object)
    form = smith_normal_form(A)
    diagonal = form.diagonal + [0] * (n - min(m, n))
    keep = [c for c in range(n) if diagonal[c] == 0]
    return form.T_inv[:, keep]


def lattice_basis(generators: np.ndarray) -> np.ndarray:
    """A basis (as columns) of the sublattice spanned by the given columns"""
    a, g = generators.shape
    if g == 0:
        return np.zeros((a, 0), dtype=object)
    form = smith_normal_form(generators)
    cols = [form.S[:, i] * d for i, d in enumerate(form.diagonal) if d != 0]
    if not cols:
        return np.zeros((a, 0), dtype=object)
    return np.stack(cols, axis=1)


@dataclass
class LatticeQuotient:
    """
    A finite abelian group L / I presented in invariant-factor form

    basis holds a basis of L as columns; generator i corresponds to the
    lattice vector representatives[i] and has order factors[i].
    """
    basis: np.ndarray
    factors: Tuple[int, ...]
    representatives: List[np.ndarray]
    _coordinate_rows: np.ndarray

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    def coordinates(self, v: Sequence[int]) -> Tuple[int, ...]:
        c = solve(self.basis, v)
        if c is None:
            raise InternalError("vector does not lie in the lattice")
        if not self.factors:
            return ()
        coords = self._coordinate_rows @ c
        return tuple(int(x) % d for x, d in zip(coords, self.factors))


def lattice_quotient(lattice_generators: np.ndarray, sub_generators: np.ndarray) -> LatticeQuotient:
    """Quotient of the span of lattice_generators by the span of sub_generators"""
    K = lattice_basis(lattice_generators)
    s = K.shape[1]
    relations = []
    for col in range(sub_generators.shape[1]):
        c = solve(K, sub_generators[:, col])
        if c is None:
            raise InternalError("sublattice generator outside the lattice")
        relations.append(c)
    if s == 0:
        return LatticeQuotient(K, (), [], np.zeros((0, 0), dtype=object))
    R = np.stack(relations, axis=1) if relations else np.zeros((s, 0), dtype=object)
    form = smith_normal_form(R)
    diagonal = form.diagonal + [0] * (s - min(R.shape))
    if any(d == 0 for d in diagonal):
        raise InternalError("lattice quotient is infinite")
    keep = [i for i, d in enumerate(diagonal) if d != 1]
    factors = tuple(diagonal[i] for i in keep)
    representatives = [K @ form.S[:, i] for i in keep]
    rows = form.S_inv[keep] if keep else np.zeros((0, s), dtype=object)
    logger.debug(f"Lattice quotient of rank {s} has invariant factors {list(factors)}")
    return LatticeQuotient(K, factors, representatives, rows)
