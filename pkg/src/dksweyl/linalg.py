"""Dense matrices over the rationals.

Everything here is exact: entries are :class:`fractions.Fraction` and no
routine ever rounds.  Matrices are immutable and hashable, so they can be
compared byte-for-byte and used as dictionary keys.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

Scalar = Fraction
ScalarLike = Union[int, Fraction, str]


class LinalgError(ValueError):
    """Base class for exact linear algebra failures."""


class ShapeError(LinalgError):
    pass


class InconsistentSystem(LinalgError):
    """Raised by :func:`solve` when ``a @ x = b`` has no solution."""


def to_scalar(value: ScalarLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        # decimal strings are not exact in general; only integers and p/q
        if any(c in text for c in ".eE"):
            raise ValueError(f"expected a fraction string, got {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot interpret {value!r} as an exact scalar")


def scalar_str(value: Fraction) -> str:
    return str(value)


class Matrix:
    """An immutable ``rows x cols`` matrix of :class:`Fraction` entries."""

    __slots__ = ("_rows", "_shape", "_hash")

    def __init__(self, rows: Iterable[Iterable[ScalarLike]], shape: tuple[int, int] | None = None):
        data = tuple(tuple(to_scalar(x) for x in row) for row in rows)
        if shape is None:
            if not data:
                raise ShapeError("shape is required for a matrix without rows")
            shape = (len(data), len(data[0]))
        r, c = shape
        if len(data) != r or any(len(row) != c for row in data):
            raise ShapeError(f"entries do not match shape {shape}")
        self._rows = data
        self._shape = (r, c)
        self._hash = None

    @classmethod
    def _raw(cls, rows: tuple[tuple[Fraction, ...], ...], shape: tuple[int, int]) -> "Matrix":
        m = object.__new__(cls)
        m._rows = rows
        m._shape = shape
        m._hash = None
        return m

    # -- constructors -------------------------------------------------
    @classmethod
    def zeros(cls, r: int, c: int) -> "Matrix":
        z = Fraction(0)
        return cls._raw(tuple((z,) * c for _ in range(r)), (r, c))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        one, z = Fraction(1), Fraction(0)
        return cls._raw(tuple(tuple(one if i == j else z for j in range(n)) for i in range(n)), (n, n))

    @classmethod
    def diag(cls, entries: Sequence[ScalarLike]) -> "Matrix":
        vals = [to_scalar(x) for x in entries]
        n = len(vals)
        z = Fraction(0)
        return cls._raw(tuple(tuple(vals[i] if i == j else z for j in range(n)) for i in range(n)), (n, n))

    @classmethod
    def column(cls, entries: Sequence[ScalarLike]) -> "Matrix":
        return cls([[x] for x in entries], (len(entries), 1))

    @classmethod
    def row(cls, entries: Sequence[ScalarLike]) -> "Matrix":
        return cls([list(entries)], (1, len(entries)))

    @classmethod
    def from_columns(cls, columns: Sequence["Matrix"], rows: int) -> "Matrix":
        if not columns:
            return cls.zeros(rows, 0)
        return hstack(columns)

    # -- basic protocol -----------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self._shape

    @property
    def rows(self) -> int:
        return self._shape[0]

    @property
    def cols(self) -> int:
        return self._shape[1]

    def tolist(self) -> list[list[Fraction]]:
        return [list(row) for row in self._rows]

    def row_tuple(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        i, j = idx
        return self._rows[i][j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._shape == other._shape and self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._shape, self._rows))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self._rows)
        return f"Matrix([{body}], shape={self._shape})"

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other: "Matrix") -> "Matrix":
        if self._shape != other._shape:
            raise ShapeError(f"cannot add {self._shape} and {other._shape}")
        return Matrix._raw(
            tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self._rows, other._rows)),
            self._shape,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self._shape != other._shape:
            raise ShapeError(f"cannot subtract {other._shape} from {self._shape}")
        return Matrix._raw(
            tuple(tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(self._rows, other._rows)),
            self._shape,
        )

    def __neg__(self) -> "Matrix":
        return Matrix._raw(tuple(tuple(-a for a in row) for row in self._rows), self._shape)

    def scale(self, c: ScalarLike) -> "Matrix":
        c = to_scalar(c)
        return Matrix._raw(tuple(tuple(c * a for a in row) for row in self._rows), self._shape)

    def __mul__(self, c: ScalarLike) -> "Matrix":
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "Matrix") -> "Matrix":
        r, k = self._shape
        k2, c = other._shape
        if k != k2:
            raise ShapeError(f"cannot multiply {self._shape} by {other._shape}")
        cols = list(zip(*other._rows)) if c and k else [()] * c
        z = Fraction(0)
        out = []
        for row in self._rows:
            out.append(tuple(sum((a * b for a, b in zip(row, col) if a and b), z) for col in cols))
        return Matrix._raw(tuple(out), (r, c))

    @property
    def T(self) -> "Matrix":
        r, c = self._shape
        return Matrix._raw(tuple(tuple(self._rows[i][j] for i in range(r)) for j in range(c)), (c, r))

    def trace(self) -> Fraction:
        self._require_square("trace")
        return sum((self._rows[i][i] for i in range(self.rows)), Fraction(0))

    def is_zero(self) -> bool:
        return all(not a for row in self._rows for a in row)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def _require_square(self, what: str) -> None:
        if not self.is_square():
            raise ShapeError(f"{what} needs a square matrix, got {self._shape}")

    # -- slicing ----------------------------------------------------------
    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "Matrix":
        return Matrix._raw(tuple(row[c0:c1] for row in self._rows[r0:r1]), (r1 - r0, c1 - c0))

    def col(self, j: int) -> "Matrix":
        return self.submatrix(0, self.rows, j, j + 1)

    def columns(self) -> list["Matrix"]:
        return [self.col(j) for j in range(self.cols)]

    def with_column_scaled(self, j: int, c: ScalarLike) -> "Matrix":
        c = to_scalar(c)
        return Matrix._raw(
            tuple(row[:j] + (row[j] * c,) + row[j + 1:] for row in self._rows), self._shape
        )

    def diagonal(self) -> tuple[Fraction, ...]:
        return tuple(self._rows[i][i] for i in range(min(self._shape)))

    # -- elimination ------------------------------------------------------
    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        """Reduced row echelon form and the pivot columns."""
        r, c = self._shape
        m = [list(row) for row in self._rows]
        pivots: list[int] = []
        pr = 0
        for j in range(c):
            if pr == r:
                break
            p = next((i for i in range(pr, r) if m[i][j]), None)
            if p is None:
                continue
            m[pr], m[p] = m[p], m[pr]
            inv = 1 / m[pr][j]
            m[pr] = [x * inv for x in m[pr]]
            for i in range(r):
                if i != pr and m[i][j]:
                    f = m[i][j]
                    m[i] = [a - f * b for a, b in zip(m[i], m[pr])]
            pivots.append(j)
            pr += 1
        return Matrix._raw(tuple(tuple(row) for row in m), (r, c)), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def det(self) -> Fraction:
        return det(self)

    def inv(self) -> "Matrix":
        return inverse(self)

    # -- predicates ---------------------------------------------------------
    def is_upper_triangular(self) -> bool:
        return all(not self._rows[i][j] for i in range(self.rows) for j in range(min(i, self.cols)))

    def is_lower_triangular(self) -> bool:
        return all(not self._rows[i][j] for i in range(self.rows) for j in range(i + 1, self.cols))

    def is_diagonal(self) -> bool:
        return self.is_upper_triangular() and self.is_lower_triangular()

    def is_unipotent_upper(self) -> bool:
        return self.is_upper_triangular() and all(d == 1 for d in self.diagonal())

    def is_scalar(self) -> bool:
        if not self.is_diagonal() or not self.is_square():
            return False
        d = self.diagonal()
        return all(x == d[0] for x in d)

    # -- serialization -------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [scalar_str(a) for row in self._rows for a in row],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Matrix":
        r, c = int(data["rows"]), int(data["cols"])
        entries = data["entries"]
        if len(entries) != r * c:
            raise ShapeError(f"expected {r * c} entries, got {len(entries)}")
        vals = [to_scalar(e) for e in entries]
        return cls._raw(tuple(tuple(vals[i * c:(i + 1) * c]) for i in range(r)), (r, c))


def hstack(blocks: Sequence[Matrix]) -> Matrix:
    if not blocks:
        raise ShapeError("hstack of nothing")
    r = blocks[0].rows
    if any(b.rows != r for b in blocks):
        raise ShapeError("hstack row mismatch: " + str([b.shape for b in blocks]))
    rows = tuple(sum((b.row_tuple(i) for b in blocks), ()) for i in range(r))
    return Matrix._raw(rows, (r, sum(b.cols for b in blocks)))


def vstack(blocks: Sequence[Matrix]) -> Matrix:
    if not blocks:
        raise ShapeError("vstack of nothing")
    c = blocks[0].cols
    if any(b.cols != c for b in blocks):
        raise ShapeError("vstack column mismatch: " + str([b.shape for b in blocks]))
    rows = sum((b._rows for b in blocks), ())
    return Matrix._raw(rows, (sum(b.rows for b in blocks), c))


def block(grid: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble a block matrix from a grid of compatible blocks."""
    return vstack([hstack(list(row)) for row in grid])


def block_diag(blocks: Sequence[Matrix]) -> Matrix:
    total_c = sum(b.cols for b in blocks)
    rows = []
    offset = 0
    for b in blocks:
        row = []
        if offset:
            row.append(Matrix.zeros(b.rows, offset))
        row.append(b)
        rest = total_c - offset - b.cols
        if rest:
            row.append(Matrix.zeros(b.rows, rest))
        rows.append(hstack(row) if len(row) > 1 else row[0])
        offset += b.cols
    if not rows:
        return Matrix.zeros(0, 0)
    return vstack(rows)


def embed(n: int, i0: int, small: Matrix) -> Matrix:
    """Identity of size ``n`` with ``small`` placed on the diagonal at ``i0``."""
    k = small.rows
    rows = Matrix.identity(n).tolist()
    for a in range(k):
        for b in range(k):
            rows[i0 + a][i0 + b] = small[a, b]
    return Matrix(rows, (n, n))


def det(m: Matrix) -> Fraction:
    if not m.is_square():
        raise ShapeError(f"determinant of non-square {m.shape} matrix")
    n = m.rows
    a = m.tolist()
    result = Fraction(1)
    for j in range(n):
        p = next((i for i in range(j, n) if a[i][j]), None)
        if p is None:
            return Fraction(0)
        if p != j:
            a[j], a[p] = a[p], a[j]
            result = -result
        piv = a[j][j]
        result *= piv
        for i in range(j + 1, n):
            if a[i][j]:
                f = a[i][j] / piv
                a[i] = [x - f * y for x, y in zip(a[i], a[j])]
    return result


def rank(m: Matrix) -> int:
    return m.rank()


def kernel_basis(m: Matrix) -> list[Matrix]:
    """Null-space basis as column vectors.

    One vector per free column of the reduced echelon form, in increasing
    column order; the free variable is set to 1, the other free ones to 0.
    """
    red, pivots = m.rref()
    c = m.cols
    free = [j for j in range(c) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * c
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -red[i, f]
        basis.append(Matrix.column(v))
    return basis


def kernel_matrix(m: Matrix) -> Matrix:
    return Matrix.from_columns(kernel_basis(m), m.cols)


def solve(a: Matrix, b: Matrix) -> Matrix:
    """A solution ``x`` of ``a @ x = b`` (free variables set to zero).

    Raises :class:`InconsistentSystem` when no solution exists.
    """
    if a.rows != b.rows:
        raise ShapeError(f"solve: {a.shape} vs right-hand side {b.shape}")
    n = a.cols
    aug = hstack([a, b]) if b.cols else a
    red, pivots = aug.rref()
    if any(p >= n for p in pivots):
        raise InconsistentSystem("linear system has no solution")
    x = [[Fraction(0)] * b.cols for _ in range(n)]
    for i, p in enumerate(pivots):
        for j in range(b.cols):
            x[p][j] = red[i, n + j]
    return Matrix(x, (n, b.cols))


def inverse(m: Matrix) -> Matrix:
    if not m.is_square():
        raise ShapeError("inverse of non-square matrix")
    n = m.rows
    if n == 0:
        return m
    red, pivots = hstack([m, Matrix.identity(n)]).rref()
    if pivots[:n] != tuple(range(n)) or len(pivots) < n or pivots[n - 1] != n - 1:
        raise LinalgError("matrix is singular")
    return red.submatrix(0, n, n, 2 * n)


def is_invertible(m: Matrix) -> bool:
    return m.is_square() and det(m) != 0


def matrix_power(m: Matrix, e: int) -> Matrix:
    out = Matrix.identity(m.rows)
    for _ in range(e):
        out = out @ m
    return out


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return a @ b - b @ a


def conj(g: Matrix, x: Matrix) -> Matrix:
    """``Ad_g x = g x g^{-1}``."""
    return g @ x @ inverse(g)
