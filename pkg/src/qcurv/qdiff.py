"""Linear q-difference systems Y(qx) = A(x) Y(x) over k(q)(x).

Orientation: ``A`` is the matrix with Y(qx) = A(x) Y(x).  A module whose
basis matrix is B (Sigma_q e = e B) has system matrix A = B^{-1}.

The derivation used by the prolongation functor is theta = x d/dx.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement

from .errors import DimensionMismatch, IndexOutOfRange, NotInvertible, SingularGauge, SingularSystem
from .matrix import Matrix
from .tower import QQ, Field, RatFn


def identity(n: int, fld: Field = QQ) -> Matrix:
    return Matrix.identity(n, fld.one, fld.zero)


def zeros(n: int, m: int, fld: Field = QQ) -> Matrix:
    return Matrix([[fld.zero] * m for _ in range(n)])


def sigma_q(f: RatFn, k: int = 1) -> RatFn:
    """f(x) -> f(q^k x)."""
    return f.sigma(k)


def sigma_matrix(M: Matrix, k: int = 1) -> Matrix:
    return M.map(lambda a: a.sigma(k))


def theta_matrix(M: Matrix) -> Matrix:
    """Entrywise x d/dx."""
    return M.map(lambda a: a.theta())


def dq_matrix(M: Matrix) -> Matrix:
    """Entrywise q-derivative (f(qx) - f(x)) / ((q-1) x)."""
    fld = M[0, 0].field
    c = 1 / ((fld.q - 1) * fld.x)
    return (sigma_matrix(M) - M).scale(c)


class QDiffSystem:
    """The system Y(qx) = A(x) Y(x) with A in GL_nu(k(q)(x))."""

    __slots__ = ("A", "field", "_inv")

    def __init__(self, A):
        if not isinstance(A, Matrix):
            A = Matrix(A)
        if not A.is_square() or A.nrows == 0:
            raise DimensionMismatch(f"system matrix must be square, got {A.shape}")
        fld = A[0, 0].field
        if any(a.field is not fld for a in A.entries()):
            raise DimensionMismatch("entries from different fields")
        if A.det().is_zero():
            raise SingularSystem("system matrix is not invertible")
        self.A = A
        self.field = fld
        self._inv = None

    @classmethod
    def scalar(cls, a: RatFn) -> "QDiffSystem":
        return cls(Matrix([[a]]))

    @classmethod
    def diagonal(cls, entries) -> "QDiffSystem":
        fld = entries[0].field
        return cls(Matrix.diag(list(entries), fld.zero))

    @property
    def dim(self) -> int:
        return self.A.nrows

    @property
    def char(self) -> int:
        return self.field.char

    def inverse_matrix(self) -> Matrix:
        if self._inv is None:
            self._inv = self.A.inverse()
        return self._inv

    def identity(self) -> Matrix:
        return identity(self.dim, self.field)

    def is_x_free(self) -> bool:
        return all(a.is_x_free() for a in self.A.entries())

    def __eq__(self, other):
        if not isinstance(other, QDiffSystem):
            return NotImplemented
        return self.A == other.A

    __hash__ = None

    def __repr__(self):
        return f"QDiffSystem({self.A})"


def iterate(sys: QDiffSystem, n: int) -> Matrix:
    """A_n with Y(q^n x) = A_n(x) Y(x); A_0 = Id."""
    if n == 0:
        return sys.identity()
    if n > 0:
        out = sys.A
        for k in range(1, n):
            out = sigma_matrix(sys.A, k) @ out
        return out
    inv = sys.inverse_matrix()
    out = sigma_matrix(inv, -1)
    for k in range(2, -n + 1):
        out = sigma_matrix(inv, -k) @ out
    return out


@dataclass(frozen=True)
class QMatrixSeq:
    """Matrices indexed 0..len-1; role is 'iterates', 'twisted' or 'normalized'."""

    role: str
    matrices: tuple

    def __getitem__(self, n):
        return self.matrices[n]

    def __len__(self):
        return len(self.matrices)

    def normalized(self) -> "QMatrixSeq":
        """G_[n] = G_n / [n]_q!."""
        if self.role != "twisted":
            raise ValueError("only twisted sequences can be normalized")
        fld = self.matrices[0][0, 0].field
        out = [self.matrices[0]]
        for n in range(1, len(self.matrices)):
            out.append(self.matrices[n].scale(1 / q_factorial(n, fld)))
        return QMatrixSeq("normalized", tuple(out))


def g_matrices(sys: QDiffSystem, m: int) -> QMatrixSeq:
    """G_0 = Id, G_1, ..., G_m with d_q^n Y = G_n Y."""
    fld = sys.field
    g1 = (sys.A - sys.identity()).scale(1 / ((fld.q - 1) * fld.x))
    out = [sys.identity()]
    if m >= 1:
        out.append(g1)
    for _ in range(1, m):
        gn = out[-1]
        out.append(sigma_matrix(gn) @ g1 + dq_matrix(gn))
    return QMatrixSeq("twisted", tuple(out))


def iterates(sys: QDiffSystem, m: int) -> QMatrixSeq:
    out = [sys.identity()]
    for k in range(m):
        out.append(sigma_matrix(sys.A, k) @ out[-1])
    return QMatrixSeq("iterates", tuple(out))


def q_number(n: int, fld: Field = QQ) -> RatFn:
    """[n]_q = (q^n - 1)/(q - 1)."""
    q = fld.q
    return (q**n - 1) / (q - 1)


def q_factorial(n: int, fld: Field = QQ) -> RatFn:
    if n < 0:
        raise IndexOutOfRange(f"q-factorial of {n}")
    out = fld.one
    for k in range(1, n + 1):
        out = out * q_number(k, fld)
    return out


def q_binomial(n: int, i: int, fld: Field = QQ) -> RatFn:
    if not 0 <= i <= n:
        raise IndexOutOfRange(f"q-binomial ({n} choose {i})")
    return q_factorial(n, fld) / (q_factorial(i, fld) * q_factorial(n - i, fld))


def gauge_transform(sys: QDiffSystem, T: Matrix) -> QDiffSystem:
    """A' = T(qx)^{-1} A(x) T(x); if Y solves sys then T^{-1} Y solves the result."""
    if T.shape != sys.A.shape:
        raise DimensionMismatch(f"gauge of shape {T.shape} for a rank {sys.dim} system")
    try:
        t_inv = sigma_matrix(T).inverse()
    except NotInvertible:
        raise SingularGauge("gauge matrix is singular") from None
    return QDiffSystem(t_inv @ sys.A @ T)


def _check_char(*systems):
    chars = {s.field.char for s in systems}
    if len(chars) > 1:
        raise DimensionMismatch("systems over different characteristics")


def dual(sys: QDiffSystem) -> QDiffSystem:
    return QDiffSystem(sys.inverse_matrix().T)


def tensor(s1: QDiffSystem, s2: QDiffSystem) -> QDiffSystem:
    _check_char(s1, s2)
    return QDiffSystem(s1.A.kron(s2.A))


def direct_sum(s1: QDiffSystem, s2: QDiffSystem) -> QDiffSystem:
    _check_char(s1, s2)
    fld = s1.field
    return QDiffSystem(
        Matrix.block([[s1.A, zeros(s1.dim, s2.dim, fld)], [zeros(s2.dim, s1.dim, fld), s2.A]])
    )


def sym_power_matrix(M: Matrix, r: int) -> Matrix:
    """Action of M on degree-r monomials in the standard basis."""
    n = M.nrows
    basis = list(combinations_with_replacement(range(n), r))
    zero = M[0, 0] * 0
    cols = []
    for alpha in basis:
        image = {(): zero + 1}
        for j in alpha:
            nxt = {}
            for mono, c in image.items():
                for i in range(n):
                    a = M[i, j]
                    if a.is_zero():
                        continue
                    key = tuple(sorted(mono + (i,)))
                    nxt[key] = nxt[key] + c * a if key in nxt else c * a
            image = nxt
        cols.append([image.get(beta, zero) for beta in basis])
    return Matrix(cols).T if basis else Matrix([])


def ext_power_matrix(M: Matrix, r: int) -> Matrix:
    """r-th exterior power: minors on increasing index sets."""
    subsets = list(combinations(range(M.nrows), r))
    return Matrix([[M.submatrix(I, J).det() for J in subsets] for I in subsets])


def sym_power(sys: QDiffSystem, r: int) -> QDiffSystem:
    if r < 1:
        raise IndexOutOfRange(f"symmetric power {r}")
    return QDiffSystem(sym_power_matrix(sys.A, r))


def ext_power(sys: QDiffSystem, r: int) -> QDiffSystem:
    if not 1 <= r <= sys.dim:
        raise IndexOutOfRange(f"exterior power {r} of a rank {sys.dim} system")
    return QDiffSystem(ext_power_matrix(sys.A, r))


def prolong(sys: QDiffSystem) -> QDiffSystem:
    """Block system [[A, theta A], [0, A]] solved by the stack (theta Y; Y)."""
    z = zeros(sys.dim, sys.dim, sys.field)
    return QDiffSystem(Matrix.block([[sys.A, theta_matrix(sys.A)], [z, sys.A]]))


def integrability_check(sys: QDiffSystem, B: Matrix) -> bool:
    """Compatibility of Y(qx) = A Y with theta Y = B Y: B(qx) A = theta A + A B."""
    if B.shape != sys.A.shape:
        raise DimensionMismatch(f"B has shape {B.shape}, system has rank {sys.dim}")
    A = sys.A
    return sigma_matrix(B) @ A == theta_matrix(A) + A @ B
