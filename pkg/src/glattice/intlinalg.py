"""Exact integer matrix algebra: normal forms, kernels, solving, quotients.

All matrices carry arbitrary-precision Python integers (numpy ``object``
dtype), so nothing here can silently overflow.  Every routine is a pure
function of its inputs and is deterministic: normal forms use a fixed
pivot rule (smallest nonzero absolute value, ties broken row-major).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np


def _as_object_array(rows: int, cols: int, data) -> np.ndarray:
    a = np.empty((rows, cols), dtype=object)
    for i in range(rows):
        row = data[i]
        for j in range(cols):
            a[i, j] = int(row[j])
    return a


class IntMatrix:
    """An immutable-by-convention integer matrix.

    >>> m = IntMatrix.from_rows([[1, 2], [3, 4]])
    >>> m.rows, m.cols
    (2, 2)
    >>> print(m @ IntMatrix.identity(2))
    [1 2]
    [3 4]
    """

    __slots__ = ("a",)

    def __init__(self, array: np.ndarray):
        if array.dtype != object:
            array = _as_object_array(array.shape[0], array.shape[1], array.tolist())
        self.a = array

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        nrows = len(rows)
        if nrows == 0:
            if cols is None:
                cols = 0
            return cls(np.empty((0, cols), dtype=object))
        ncols = len(rows[0]) if cols is None else cols
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
        return cls(_as_object_array(nrows, ncols, rows))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: Optional[int] = None) -> "IntMatrix":
        if len(columns) == 0:
            return cls(np.empty((rows or 0, 0), dtype=object))
        return cls.from_rows(list(map(list, zip(*columns)))) if columns else cls.zeros(rows or 0, 0)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        a = np.zeros((n, n), dtype=object)
        for i in range(n):
            a[i, i] = 1
        return cls(a)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(np.zeros((rows, cols), dtype=object))

    @classmethod
    def column(cls, entries: Sequence[int]) -> "IntMatrix":
        return cls.from_rows([[int(x)] for x in entries], cols=1)

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> "IntMatrix":
        n = len(entries)
        a = np.zeros((n, n), dtype=object)
        for i, d in enumerate(entries):
            a[i, i] = int(d)
        return cls(a)

    # -- shape & access ----------------------------------------------------

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def entries(self) -> tuple:
        """Row-major tuple of all entries."""
        return tuple(int(x) for x in self.a.reshape(-1))

    def __getitem__(self, ij):
        return self.a[ij]

    def row_list(self, i: int) -> list:
        return [int(x) for x in self.a[i, :]]

    def col_list(self, j: int) -> list:
        return [int(x) for x in self.a[:, j]]

    def to_lists(self) -> list:
        return [[int(x) for x in row] for row in self.a]

    def column_tuples(self) -> list:
        return [tuple(int(x) for x in self.a[:, j]) for j in range(self.cols)]

    # -- algebra -----------------------------------------------------------

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.shape} @ {other.shape}")
        if self.cols == 0:
            return IntMatrix.zeros(self.rows, other.cols)
        return IntMatrix(np.dot(self.a, other.a))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(self.a + other.a)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(self.a - other.a)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(-self.a)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.a * int(k))

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.a.T.copy())

    @property
    def T(self) -> "IntMatrix":
        return self.transpose()

    @property
    def shape(self):
        return self.a.shape

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.a, other.a))

    def __hash__(self):
        return hash((self.shape, self.entries))

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.a.reshape(-1))

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == IntMatrix.identity(self.rows)

    def copy(self) -> "IntMatrix":
        return IntMatrix(self.a.copy())

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch in hstack")
        return IntMatrix(np.hstack([self.a, other.a]))

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("column mismatch in vstack")
        return IntMatrix(np.vstack([self.a, other.a]))

    def take_columns(self, js: Iterable[int]) -> "IntMatrix":
        js = list(js)
        if not js:
            return IntMatrix.zeros(self.rows, 0)
        return IntMatrix(self.a[:, js].copy())

    def take_rows(self, idx: Iterable[int]) -> "IntMatrix":
        idx = list(idx)
        if not idx:
            return IntMatrix.zeros(0, self.cols)
        return IntMatrix(self.a[idx, :].copy())

    def mul_vector(self, v: Sequence[int]) -> list:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        if self.cols == 0:
            return [0] * self.rows
        arr = np.empty(self.cols, dtype=object)
        for j, x in enumerate(v):
            arr[j] = int(x)
        return [int(x) for x in np.dot(self.a, arr)]

    def kron(self, other: "IntMatrix") -> "IntMatrix":
        """Kronecker product, row-major block convention."""
        a = np.kron(self.a, other.a) if self.a.size and other.a.size else np.zeros(
            (self.rows * other.rows, self.cols * other.cols), dtype=object)
        return IntMatrix(np.array(a, dtype=object))

    def __str__(self) -> str:
        return "\n".join("[" + " ".join(str(x) for x in row) + "]" for row in self.a) or "[]"

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}x{self.cols})"

    def det(self) -> int:
        """Exact determinant via fraction-free (Bareiss) elimination."""
        n = self.rows
        if n != self.cols:
            raise ValueError("determinant of non-square matrix")
        if n == 0:
            return 1
        m = [self.row_list(i) for i in range(n)]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            pk = m[k][k]
            for i in range(k + 1, n):
                mik = m[i][k]
                for j in range(k + 1, n):
                    m[i][j] = (pk * m[i][j] - mik * m[k][j]) // prev
                m[i][k] = 0
            prev = pk
        return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SmithDecomposition:
    """Invertible U, V and diagonal S with U @ A @ V == S.

    Diagonal entries are nonnegative and divisibility-chained
    (d_i | d_{i+1}); U and V have determinant +-1.
    """

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix

    def diagonal(self) -> list:
        n = min(self.S.rows, self.S.cols)
        return [int(self.S[i, i]) for i in range(n)]

    def invariant_factors(self) -> list:
        """Diagonal entries > 1 (the finite cokernel data)."""
        return [d for d in self.diagonal() if d > 1]

    def rank(self) -> int:
        return sum(1 for d in self.diagonal() if d != 0)


def _find_pivot(a, t: int, rows: int, cols: int):
    """Smallest |nonzero| entry of the trailing block, ties row-major."""
    best = None
    for i in range(t, rows):
        for j in range(t, cols):
            x = a[i][j]
            if x != 0:
                v = -x if x < 0 else x
                if best is None or v < best[0]:
                    best = (v, i, j)
                    if v == 1:
                        return best
    return best


def smith(A: IntMatrix) -> SmithDecomposition:
    """Smith normal form with transforms.

    >>> d = smith(IntMatrix.from_rows([[2, 4], [6, 8]]))
    >>> d.diagonal()
    [2, 4]
    >>> d.U @ IntMatrix.from_rows([[2, 4], [6, 8]]) @ d.V == d.S
    True
    """
    rows, cols = A.rows, A.cols
    s = [A.row_list(i) for i in range(rows)]
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]

    def row_op(i, k, q):  # row_i -= q * row_k
        si, sk = s[i], s[k]
        for j in range(cols):
            si[j] -= q * sk[j]
        ui, uk = u[i], u[k]
        for j in range(rows):
            ui[j] -= q * uk[j]

    def col_op(j, k, q):  # col_j -= q * col_k
        for i in range(rows):
            s[i][j] -= q * s[i][k]
        for i in range(cols):
            v[i][j] -= q * v[i][k]

    def swap_rows(i, k):
        if i != k:
            s[i], s[k] = s[k], s[i]
            u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        if j != k:
            for row in s:
                row[j], row[k] = row[k], row[j]
            for row in v:
                row[j], row[k] = row[k], row[j]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        piv = _find_pivot(s, t, rows, cols)
        if piv is None:
            break
        _, pi, pj = piv
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            # clear column t
            restart = False
            for i in range(rows):
                if i != t and s[i][t] != 0:
                    q = s[i][t] // s[t][t]
                    row_op(i, t, q)
                    if s[i][t] != 0:
                        swap_rows(t, i)
                        restart = True
                        break
            if restart:
                continue
            # clear row t
            for j in range(cols):
                if j != t and s[t][j] != 0:
                    q = s[t][j] // s[t][t]
                    col_op(j, t, q)
                    if s[t][j] != 0:
                        swap_cols(t, j)
                        restart = True
                        break
            if restart:
                continue
            if all(s[i][t] == 0 for i in range(rows) if i != t):
                break
        # enforce that the pivot divides every remaining entry
        d = s[t][t]
        fixed = True
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if s[i][j] % d != 0:
                    row_op(t, i, -1)  # add row i to row t, then re-reduce
                    fixed = False
                    break
            if not fixed:
                break
        if not fixed:
            continue
        t += 1

    # normalize signs on the diagonal
    for i in range(limit):
        if s[i][i] < 0:
            for j in range(cols):
                s[i][j] = -s[i][j]
            for j in range(rows):
                u[i][j] = -u[i][j]
    return SmithDecomposition(
        U=IntMatrix.from_rows(u, cols=rows),
        S=IntMatrix.from_rows(s, cols=cols),
        V=IntMatrix.from_rows(v, cols=cols),
    )


def row_hermite(A: IntMatrix, transform: bool = False):
    """Canonical row Hermite form (pivots positive, entries above reduced).

    With ``transform=True`` also returns unimodular U with U @ A == H.
    """
    rows, cols = A.rows, A.cols
    h = [A.row_list(i) for i in range(rows)]
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)] if transform else None

    def row_sub(i, k, q):
        hi, hk = h[i], h[k]
        for j in range(cols):
            hi[j] -= q * hk[j]
        if u is not None:
            ui, uk = u[i], u[k]
            for j in range(rows):
                ui[j] -= q * uk[j]

    def swap(i, k):
        if i != k:
            h[i], h[k] = h[k], h[i]
            if u is not None:
                u[i], u[k] = u[k], u[i]

    def negate(i):
        h[i] = [-x for x in h[i]]
        if u is not None:
            u[i] = [-x for x in u[i]]

    p = 0
    for col in range(cols):
        while True:
            nz = [i for i in range(p, rows) if h[i][col] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: (abs(h[i][col]), i))
            swap(p, i0)
            done = True
            for i in range(p + 1, rows):
                if h[i][col] != 0:
                    q = h[i][col] // h[p][col]
                    row_sub(i, p, q)
                    if h[i][col] != 0:
                        done = False
            if done:
                break
        if p < rows and h[p][col] != 0:
            if h[p][col] < 0:
                negate(p)
            for i in range(p):
                q = h[i][col] // h[p][col]
                if q != 0:
                    row_sub(i, p, q)
            p += 1
            if p == rows:
                break
    H = IntMatrix.from_rows(h, cols=cols)
    if transform:
        return H, IntMatrix.from_rows(u, cols=rows)
    return H


def col_hermite(A: IntMatrix, transform: bool = False):
    """Canonical column Hermite form; with transform, A @ V == H."""
    if transform:
        H, U = row_hermite(A.T, transform=True)
        return H.T, U.T
    return row_hermite(A.T).T


def drop_zero_columns(A: IntMatrix) -> IntMatrix:
    keep = [j for j in range(A.cols) if any(A[i, j] != 0 for i in range(A.rows))]
    return A.take_columns(keep)


def column_span_canonical(A: IntMatrix) -> IntMatrix:
    """Canonical basis matrix of the column span (zero columns dropped)."""
    return drop_zero_columns(col_hermite(A))


def same_column_span(A: IntMatrix, B: IntMatrix) -> bool:
    """Exact equality of integer column spans via canonical forms."""
    if A.rows != B.rows:
        return False
    return column_span_canonical(A) == column_span_canonical(B)


def kernel_basis(A: IntMatrix) -> IntMatrix:
    """Saturated basis of {x : A @ x == 0}, in column Hermite form.

    >>> kernel_basis(IntMatrix.from_rows([[1, 1, 1]])).cols
    2
    """
    if A.cols == 0:
        return IntMatrix.zeros(0, 0)
    if A.rows == 0:
        return IntMatrix.identity(A.cols)
    dec = smith(A)
    diag = dec.diagonal()
    ker_cols = [j for j in range(A.cols) if j >= len(diag) or diag[j] == 0]
    basis = dec.V.take_columns(ker_cols)
    return col_hermite(basis)


def cokernel_invariants(A: IntMatrix):
    """Invariant factors (> 1) and free rank of Z^rows / colspan(A).

    >>> cokernel_invariants(IntMatrix.diagonal([2, 3]))
    ([6], 0)
    """
    if A.rows == 0:
        return [], 0
    if A.cols == 0:
        return [], A.rows
    dec = smith(A)
    return dec.invariant_factors(), A.rows - dec.rank()


def solve(A: IntMatrix, b: Sequence[int]) -> Optional[list]:
    """Some integer x with A @ x == b, or None when unsolvable."""
    if len(b) != A.rows:
        raise ValueError(f"rhs length {len(b)} != rows {A.rows}")
    X = solve_matrix(A, IntMatrix.column(b))
    return X.col_list(0) if X is not None else None


def solve_matrix(A: IntMatrix, B: IntMatrix) -> Optional[IntMatrix]:
    """Integer X with A @ X == B (columnwise solve), or None."""
    if B.rows != A.rows:
        raise ValueError("rhs row mismatch")
    dec = smith(A)
    diag = dec.diagonal()
    C = dec.U @ B
    Y = IntMatrix.zeros(A.cols, B.cols)
    for k in range(B.cols):
        for i in range(A.rows):
            c = int(C[i, k])
            d = diag[i] if i < len(diag) else 0
            if d == 0:
                if c != 0:
                    return None
            else:
                if c % d != 0:
                    return None
                Y.a[i, k] = c // d
    return dec.V @ Y


def solvable(A: IntMatrix, b: Sequence[int]) -> bool:
    return solve(A, b) is not None


class BasisSolver:
    """Repeated coordinate extraction against a fixed column basis.

    Precomputes a Hermite transform of the basis so that expressing many
    vectors costs one triangular back-substitution each.
    """

    def __init__(self, basis: IntMatrix):
        self.basis = basis
        self.H, self.V = col_hermite(basis, transform=True)
        # pivot row of each nonzero column of H
        self.pivots = []
        for j in range(self.H.cols):
            piv = None
            for i in range(self.H.rows):
                if self.H[i, j] != 0:
                    piv = i
                    break
            self.pivots.append(piv)

    def _express_h(self, vec: Sequence[int]) -> Optional[list]:
        """Back-substitution against the Hermite form (coordinates before V)."""
        r = list(map(int, vec))
        n = self.H.rows
        if len(r) != n:
            raise ValueError("vector length mismatch")
        y = [0] * self.H.cols
        for j in range(self.H.cols):
            piv = self.pivots[j]
            if piv is None:
                continue
            c = r[piv]
            d = int(self.H[piv, j])
            if c % d != 0:
                return None
            q = c // d
            y[j] = q
            if q != 0:
                for i in range(n):
                    hij = self.H[i, j]
                    if hij != 0:
                        r[i] -= q * int(hij)
        if any(x != 0 for x in r):
            return None
        return y

    def express(self, vec: Sequence[int]) -> Optional[list]:
        """Coordinates of vec in the basis columns, or None if outside."""
        y = self._express_h(vec)
        if y is None:
            return None
        return self.V.mul_vector(y)

    def express_matrix(self, M: IntMatrix) -> Optional[IntMatrix]:
        ys = []
        for j in range(M.cols):
            y = self._express_h(M.col_list(j))
            if y is None:
                return None
            ys.append(y)
        return self.V @ IntMatrix.from_columns(ys, rows=self.basis.cols)

    def contains(self, vec: Sequence[int]) -> bool:
        return self.express(vec) is not None


def saturation(A: IntMatrix) -> IntMatrix:
    """Canonical basis of the saturation of the column span of A."""
    left = kernel_basis(A.T)  # columns span the rational left-kernel
    return kernel_basis(left.T)


def is_saturated_basis(A: IntMatrix) -> bool:
    """True when the columns span a saturated sublattice (all factors 1)."""
    if A.cols == 0:
        return True
    dec = smith(A)
    diag = dec.diagonal()
    return dec.rank() == A.cols and all(d == 1 for d in diag[: A.cols])


def xgcd(a: int, b: int):
    """(g, x, y) with g = gcd(a, b) >= 0 and a*x + b*y == g.

    >>> xgcd(2, 3)
    (1, -1, 1)
    """
    x0, x1, y0, y1 = 1, 0, 0, 1
    g, r = a, b
    while r:
        q = g // r
        g, r = r, g - q * r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if g < 0:
        g, x0, y0 = -g, -x0, -y0
    return g, x0, y0


def bezout_coefficients(values: Sequence[int]) -> list:
    """Deterministic a_i with sum(a_i * values_i) == gcd(values)."""
    if not values:
        raise ValueError("no values")
    coeffs = [1]
    g = int(values[0])
    for v in values[1:]:
        g2, x, y = xgcd(g, int(v))
        coeffs = [c * x for c in coeffs] + [y]
        g = g2
    if g < 0:
        coeffs = [-c for c in coeffs]
    return coeffs
