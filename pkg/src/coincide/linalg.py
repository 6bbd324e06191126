"""Exact rational linear algebra.

Everything here works over :class:`fractions.Fraction`; no floating point is
ever introduced.  Matrices are stored sparsely (row -> {col: value}) and are
treated as immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


class LinAlgError(ValueError):
    """Raised on malformed input to a linear algebra routine."""


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise LinAlgError("floating point values are not accepted; use int, str or Fraction")
    return Fraction(x)


class Matrix:
    """Immutable sparse matrix with exact rational entries."""

    __slots__ = ("rows", "cols", "_data", "_hash")

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise LinAlgError("negative matrix shape")
        self.rows = rows
        self.cols = cols
        data: dict[int, dict[int, Fraction]] = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for (i, j), v in items:
                if not (0 <= i < rows and 0 <= j < cols):
                    raise LinAlgError(f"entry ({i}, {j}) outside {rows}x{cols}")
                v = as_rational(v)
                if v:
                    data.setdefault(i, {})[j] = v
                else:
                    row = data.get(i)
                    if row is not None:
                        row.pop(j, None)
        self._data = {i: r for i, r in data.items() if r}
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise LinAlgError("ragged rows")
        entries = {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v}
        return cls(len(rows), cols, entries)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "Matrix":
        entries = {}
        for j, c in enumerate(columns):
            if len(c) != rows:
                raise LinAlgError("column length does not match row count")
            for i, v in enumerate(c):
                if v:
                    entries[(i, j)] = v
        return cls(rows, len(columns), entries)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    # -- access -----------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, key) -> Fraction:
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(key)
        return self._data.get(i, {}).get(j, Fraction(0))

    def row(self, i: int) -> list[Fraction]:
        r = self._data.get(i, {})
        return [r.get(j, Fraction(0)) for j in range(self.cols)]

    def column(self, j: int) -> list[Fraction]:
        return [self._data.get(i, {}).get(j, Fraction(0)) for i in range(self.rows)]

    def to_rows(self) -> list[list[Fraction]]:
        return [self.row(i) for i in range(self.rows)]

    def columns(self) -> list[list[Fraction]]:
        return [self.column(j) for j in range(self.cols)]

    def items(self):
        for i in sorted(self._data):
            r = self._data[i]
            for j in sorted(r):
                yield (i, j), r[j]

    def nnz(self) -> int:
        return sum(len(r) for r in self._data.values())

    def is_zero(self) -> bool:
        return not self._data

    def is_square(self) -> bool:
        return self.rows == self.cols

    # -- arithmetic -------------------------------------------------------
    @property
    def T(self) -> "Matrix":
        return Matrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.items()})

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise LinAlgError(f"cannot multiply {self.shape} by {other.shape}")
            out: dict[tuple[int, int], Fraction] = {}
            for i, r in self._data.items():
                acc: dict[int, Fraction] = {}
                for k, a in r.items():
                    orow = other._data.get(k)
                    if orow:
                        for j, b in orow.items():
                            acc[j] = acc.get(j, 0) + a * b
                for j, v in acc.items():
                    if v:
                        out[(i, j)] = v
            return Matrix(self.rows, other.cols, out)
        vec = list(other)
        if len(vec) != self.cols:
            raise LinAlgError(f"cannot apply {self.shape} matrix to vector of length {len(vec)}")
        res = [Fraction(0)] * self.rows
        for i, r in self._data.items():
            res[i] = sum((a * vec[k] for k, a in r.items()), Fraction(0))
        return res

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise LinAlgError("shape mismatch in addition")
        acc = dict(self.items())
        for k, v in other.items():
            acc[k] = acc.get(k, 0) + v
        return Matrix(self.rows, self.cols, acc)

    def __neg__(self) -> "Matrix":
        return self.scale(-1)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        c = as_rational(c)
        return Matrix(self.rows, self.cols, {k: c * v for k, v in self.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, tuple(self.items())))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(v) for v in r) for r in self.to_rows())
        return f"Matrix({self.rows}x{self.cols}: [{body}])"

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise LinAlgError("row count mismatch in hstack")
        entries = dict(self.items())
        entries.update({(i, j + self.cols): v for (i, j), v in other.items()})
        return Matrix(self.rows, self.cols + other.cols, entries)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        cpos = {c: k for k, c in enumerate(cols)}
        entries = {}
        for a, i in enumerate(rows):
            for j, v in self._data.get(i, {}).items():
                if j in cpos:
                    entries[(a, cpos[j])] = v
        return Matrix(len(rows), len(cols), entries)


@dataclass(frozen=True)
class SubspaceBasis:
    """Linearly independent column vectors spanning a subspace of Q^ambient_dim."""

    ambient_dim: int
    vectors: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        for v in self.vectors:
            if len(v) != self.ambient_dim:
                raise LinAlgError("basis vector has wrong length")

    @classmethod
    def of(cls, ambient_dim: int, vectors: Iterable[Sequence]) -> "SubspaceBasis":
        return cls(ambient_dim, tuple(tuple(as_rational(x) for x in v) for v in vectors))

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    def as_matrix(self) -> Matrix:
        """Vectors as the columns of an ambient_dim x dim matrix."""
        return Matrix.from_columns(self.vectors, self.ambient_dim)


def _rref_rows(rows: list[dict[int, Fraction]], ncols: int, stop_col: int | None = None):
    """In-place reduction of sparse rows; returns the pivot column list.

    Pivot search is leftmost column first, then topmost eligible row.  Columns
    at or beyond ``stop_col`` are never used as pivots.
    """
    pivots: list[int] = []
    limit = ncols if stop_col is None else stop_col
    r = 0
    for c in range(limit):
        if r >= len(rows):
            break
        p = next((i for i in range(r, len(rows)) if c in rows[i]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        prow = rows[r]
        inv = 1 / prow[c]
        if inv != 1:
            for k in prow:
                prow[k] *= inv
        for i in range(len(rows)):
            if i != r and c in rows[i]:
                row = rows[i]
                factor = row[c]
                for k, v in prow.items():
                    nv = row.get(k, 0) - factor * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
        pivots.append(c)
        r += 1
    return pivots


def _sparse_rows(m: Matrix) -> list[dict[int, Fraction]]:
    return [dict(m._data.get(i, {})) for i in range(m.rows)]


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and ascending pivot columns."""
    rows = _sparse_rows(m)
    pivots = _rref_rows(rows, m.cols)
    entries = {(i, j): v for i, r in enumerate(rows) for j, v in r.items()}
    return Matrix(m.rows, m.cols, entries), pivots


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def solve(m: Matrix, b: Sequence) -> list[Fraction] | None:
    """A solution of ``m x = b`` with free variables set to zero, or None."""
    b = [as_rational(x) for x in b]
    if len(b) != m.rows:
        raise LinAlgError(f"right-hand side has length {len(b)}, expected {m.rows}")
    sol = solve_many(m, Matrix.from_columns([b], m.rows))
    return None if sol is None else sol.column(0)


def solve_many(m: Matrix, rhs: Matrix) -> Matrix | None:
    """Solve ``m X = rhs`` column by column; None if any column is inconsistent."""
    if rhs.rows != m.rows:
        raise LinAlgError("right-hand side row count mismatch")
    rows = _sparse_rows(m.hstack(rhs))
    pivots = _rref_rows(rows, m.cols + rhs.cols, stop_col=m.cols)
    for i in range(len(pivots), len(rows)):
        if rows[i]:
            return None
    entries = {}
    for i, c in enumerate(pivots):
        for k, v in rows[i].items():
            if k >= m.cols:
                entries[(c, k - m.cols)] = v
    return Matrix(m.cols, rhs.cols, entries)


def inverse(m: Matrix) -> Matrix:
    if not m.is_square():
        raise LinAlgError("only square matrices are invertible")
    sol = solve_many(m, Matrix.identity(m.rows))
    if sol is None or rank(m) != m.rows:
        raise LinAlgError("matrix is singular")
    return sol


def is_invertible(m: Matrix) -> bool:
    return m.is_square() and rank(m) == m.rows


def kernel_basis(m: Matrix) -> SubspaceBasis:
    """Basis of the null space, one vector per free column.

    Each vector has a 1 in its free column; vectors are then sign-normalized so
    the first nonzero entry is positive.
    """
    red, pivots = rref(m)
    pset = set(pivots)
    vectors = []
    for f in range(m.cols):
        if f in pset:
            continue
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -red[i, f]
        lead = next(x for x in v if x)
        if lead < 0:
            v = [-x for x in v]
        vectors.append(tuple(v))
    return SubspaceBasis(m.cols, tuple(vectors))


def image_basis(m: Matrix) -> SubspaceBasis:
    """The pivot columns of ``m`` (a basis of its column space)."""
    _, pivots = rref(m)
    return SubspaceBasis(m.rows, tuple(tuple(m.column(c)) for c in pivots))


def quotient_representatives(big: SubspaceBasis, small: SubspaceBasis) -> SubspaceBasis:
    """Vectors of ``big`` completing ``small`` to a basis of span(big)."""
    if big.ambient_dim != small.ambient_dim:
        raise LinAlgError("ambient dimensions differ")
    n = big.ambient_dim
    combined = Matrix.from_columns(list(small.vectors) + list(big.vectors), n)
    _, pivots = rref(combined)
    if rank(big.as_matrix()) != len(pivots):
        raise LinAlgError("small subspace is not contained in big subspace")
    k = small.dim
    chosen = tuple(big.vectors[c - k] for c in pivots if c >= k)
    return SubspaceBasis(n, chosen)


def trace(m: Matrix) -> Fraction:
    if not m.is_square():
        raise LinAlgError(f"trace of non-square {m.shape} matrix")
    return sum((m[i, i] for i in range(m.rows)), Fraction(0))


def dot(u: Sequence, v: Sequence) -> Fraction:
    if len(u) != len(v):
        raise LinAlgError("vector length mismatch")
    return sum((a * b for a, b in zip(u, v) if a and b), Fraction(0))


def format_rational(x: Fraction) -> str:
    """Decimal-free text form: ``p`` for integers, ``p/q`` otherwise."""
    x = as_rational(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
