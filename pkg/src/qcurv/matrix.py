"""Small dense matrices over an exact ring (RatFn or CycloRatFn entries)."""

from __future__ import annotations

from itertools import permutations

from .errors import DimensionMismatch, NotInvertible


def _is_zero(a) -> bool:
    return a.is_zero()


class Matrix:
    """Immutable dense matrix.  Entries must support + - * and is_zero()."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = tuple(tuple(r) for r in rows)
        if self.rows and any(len(r) != len(self.rows[0]) for r in self.rows):
            raise DimensionMismatch("ragged matrix")

    @classmethod
    def identity(cls, n: int, one, zero) -> "Matrix":
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, entries, zero) -> "Matrix":
        n = len(entries)
        return cls([[entries[i] if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def block(cls, blocks) -> "Matrix":
        rows = []
        for brow in blocks:
            for i in range(brow[0].nrows):
                rows.append([e for b in brow for e in b.rows[i]])
        return cls(rows)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def shape(self):
        return self.nrows, self.ncols

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __iter__(self):
        return iter(self.rows)

    def entries(self):
        for r in self.rows:
            yield from r

    def map(self, f) -> "Matrix":
        return Matrix([[f(a) for a in r] for r in self.rows])

    @property
    def T(self) -> "Matrix":
        return Matrix(list(zip(*self.rows))) if self.rows else self

    def _check_same(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "Matrix":
        return self.map(lambda a: -a)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.T.rows
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = None
                for a, b in zip(r, c):
                    if a.is_zero() or b.is_zero():
                        continue
                    acc = a * b if acc is None else acc + a * b
                row.append(acc if acc is not None else r[0] * 0)
            out.append(row)
        return Matrix(out)

    def scale(self, c) -> "Matrix":
        return self.map(lambda a: c * a)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        return all(a == b for a, b in zip(self.entries(), other.entries()))

    __hash__ = None

    def is_zero(self) -> bool:
        return all(_is_zero(a) for a in self.entries())

    def is_identity(self) -> bool:
        n = self.nrows
        return self.is_square() and all(
            (self.rows[i][j].is_one() if i == j else self.rows[i][j].is_zero())
            for i in range(n)
            for j in range(n)
        )

    def is_diagonal(self) -> bool:
        return self.is_square() and all(
            self.rows[i][j].is_zero()
            for i in range(self.nrows)
            for j in range(self.ncols)
            if i != j
        )

    def __pow__(self, k: int) -> "Matrix":
        if k < 0:
            return self.inverse() ** (-k)
        one = self.rows[0][0] * 0 + 1
        result = Matrix.identity(self.nrows, one, one * 0)
        base = self
        while k:
            if k & 1:
                result = result @ base
            k >>= 1
            if k:
                base = base @ base
        return result

    def kron(self, other: "Matrix") -> "Matrix":
        rows = []
        for r in self.rows:
            for s in other.rows:
                rows.append([a * b for a in r for b in s])
        return Matrix(rows)

    def submatrix(self, rows, cols) -> "Matrix":
        return Matrix([[self.rows[i][j] for j in cols] for i in rows])

    def det(self):
        if not self.is_square():
            raise DimensionMismatch("determinant of a non-square matrix")
        n = self.nrows
        if n == 0:
            raise DimensionMismatch("empty matrix")
        if n <= 3:
            return _leibniz(self)
        m = [list(r) for r in self.rows]
        sign = 1
        det = None
        for c in range(n):
            piv = next((r for r in range(c, n) if not m[r][c].is_zero()), None)
            if piv is None:
                return m[0][0] * 0
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                sign = -sign
            p = m[c][c]
            det = p if det is None else det * p
            inv = 1 / p
            for r in range(c + 1, n):
                if m[r][c].is_zero():
                    continue
                f = m[r][c] * inv
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
        return det if sign == 1 else -det

    def inverse(self) -> "Matrix":
        """Gauss-Jordan inverse over a field."""
        if not self.is_square():
            raise DimensionMismatch("inverse of a non-square matrix")
        n = self.nrows
        one = self.rows[0][0] * 0 + 1
        zero = one * 0
        m = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            piv = next((r for r in range(c, n) if not m[r][c].is_zero()), None)
            if piv is None:
                raise NotInvertible("singular matrix")
            m[c], m[piv] = m[piv], m[c]
            inv = 1 / m[c][c]
            m[c] = [a * inv for a in m[c]]
            for r in range(n):
                if r != c and not m[r][c].is_zero():
                    f = m[r][c]
                    m[r] = [a - f * b for a, b in zip(m[r], m[c])]
        return Matrix([r[n:] for r in m])

    def rank(self) -> int:
        m = [list(r) for r in self.rows]
        rank = 0
        for c in range(self.ncols):
            piv = next((r for r in range(rank, self.nrows) if not m[r][c].is_zero()), None)
            if piv is None:
                continue
            m[rank], m[piv] = m[piv], m[rank]
            inv = 1 / m[rank][c]
            for r in range(self.nrows):
                if r != rank and not m[r][c].is_zero():
                    f = m[r][c] * inv
                    m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
            rank += 1
        return rank

    def kernel(self) -> list:
        """Basis of the right kernel, as a list of column vectors (lists)."""
        m = [list(r) for r in self.rows]
        ncols = self.ncols
        pivots = []
        rank = 0
        for c in range(ncols):
            piv = next((r for r in range(rank, self.nrows) if not m[r][c].is_zero()), None)
            if piv is None:
                continue
            m[rank], m[piv] = m[piv], m[rank]
            inv = 1 / m[rank][c]
            m[rank] = [a * inv for a in m[rank]]
            for r in range(self.nrows):
                if r != rank and not m[r][c].is_zero():
                    f = m[r][c]
                    m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
            pivots.append(c)
            rank += 1
        some = self.rows[0][0]
        zero, one = some * 0, some * 0 + 1
        basis = []
        for free in (c for c in range(ncols) if c not in pivots):
            vec = [zero] * ncols
            vec[free] = one
            for r, pc in enumerate(pivots):
                vec[pc] = -m[r][free]
            basis.append(vec)
        return basis

    def __str__(self):
        return "[" + ", ".join("[" + ", ".join(str(a) for a in r) + "]" for r in self.rows) + "]"

    def __repr__(self):
        return f"Matrix({self})"

    def to_strings(self) -> list:
        return [[str(a) for a in r] for r in self.rows]


def _leibniz(m: Matrix):
    n = m.nrows
    total = None
    for perm in permutations(range(n)):
        term = None
        for i, j in enumerate(perm):
            a = m.rows[i][j]
            term = a if term is None else term * a
        inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        if inversions % 2:
            term = -term
        total = term if total is None else total + term
    return total
