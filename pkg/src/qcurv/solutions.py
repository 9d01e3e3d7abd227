"""Formal solutions at x = 0 and their rational reconstruction.

Pipeline used to certify triviality:
shear_normalize (A(0) invertible) -> frobenius_to_identity (A(0) = Id)
-> series_solution -> pade_reconstruct -> exact verification.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import (
    EigenUnresolved,
    IndexOutOfRange,
    InvariantViolation,
    NoMatch,
    NotInvertible,
    NotRegularSingularAtZero,
    Resonant,
    ShearingUnresolved,
)
from .matrix import Matrix
from .qdiff import QDiffSystem, gauge_transform, identity, sigma_matrix
from .tower import Field, RatFn, format_poly


# ---------------------------------------------------------------------------
# Truncated series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncatedSeriesMatrix:
    """sum_{n=0}^{N} Y_n x^n with x-free matrix coefficients Y_n.

    ``system`` is the system the series is meant to solve, if any; it is
    used to verify rational reconstructions.
    """

    coeffs: tuple
    system: QDiffSystem | None = None

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def shape(self):
        return self.coeffs[0].shape

    @property
    def constant_term(self) -> Matrix:
        return self.coeffs[0]

    def __getitem__(self, n) -> Matrix:
        return self.coeffs[n]

    def entry_series(self, i: int, j: int) -> list:
        return [c[i, j] for c in self.coeffs]

    def sigma(self) -> "TruncatedSeriesMatrix":
        """Y(qx)."""
        q = self.coeffs[0][0, 0].field.q if self.coeffs[0].ncols else None
        return TruncatedSeriesMatrix(
            tuple(c.scale(q**n) for n, c in enumerate(self.coeffs)), self.system
        )

    def theta(self) -> "TruncatedSeriesMatrix":
        """x d/dx, termwise."""
        return TruncatedSeriesMatrix(
            tuple(c.scale(c[0, 0].field(n)) if c.ncols else c for n, c in enumerate(self.coeffs)),
            self.system,
        )

    def polynomial(self) -> Matrix:
        """The truncation as a matrix of polynomials in x."""
        fld = self.coeffs[0][0, 0].field
        nr, nc = self.shape
        rows = []
        for i in range(nr):
            rows.append([
                sum((c[i, j] * fld.x**n for n, c in enumerate(self.coeffs)), fld.zero)
                for j in range(nc)
            ])
        return Matrix(rows)

    def to_json(self):
        return [c.to_strings() for c in self.coeffs]


def matrix_taylor(M: Matrix, N: int) -> list:
    """Taylor coefficients M_0..M_N of a matrix without pole at 0."""
    cols = [[a.taylor(N) for a in row] for row in M.rows]
    return [Matrix([[t[n] for t in row] for row in cols]) for n in range(N + 1)]


def series_product(A: list, Y: list) -> list:
    """Coefficients of (sum A_k x^k)(sum Y_k x^k), truncated to len(Y)."""
    out = []
    for n in range(len(Y)):
        acc = None
        for k in range(n + 1):
            if A[k].is_zero():
                continue
            term = A[k] @ Y[n - k]
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else A[0].scale(0) @ Y[0])
    return out


def series_residual(sys: QDiffSystem, Y: TruncatedSeriesMatrix) -> list:
    """Coefficients of Y(qx) - A(x) Y(x) through order N."""
    A = matrix_taylor(sys.A, Y.order)
    rhs = series_product(A, list(Y.coeffs))
    return [l - r for l, r in zip(Y.sigma().coeffs, rhs)]


def series_solution(sys: QDiffSystem, N: int) -> TruncatedSeriesMatrix:
    """Formal solution of Y(qx) = A(x) Y(x) in K[[x]], truncated at x^N.

    Solves (q^n Id - A_0) Y_n = sum_{k>=1} A_k Y_{n-k}.  When A(0) = Id the
    constant term is Id; otherwise its columns are a basis of ker(A(0) - Id).
    """
    if N < 0:
        raise IndexOutOfRange(f"truncation order must be >= 0, got {N}")
    fld = sys.field
    A = matrix_taylor(sys.A, N)
    Id = identity(sys.dim, fld)
    A0 = A[0]
    if A0 == Id:
        Y0 = Id
    else:
        ker = (A0 - Id).kernel()
        Y0 = Matrix([[v[i] for v in ker] for i in range(sys.dim)])
    Y = [Y0]
    for n in range(1, N + 1):
        try:
            inv = (Id.scale(fld.q**n) - A0).inverse()
        except NotInvertible:
            raise Resonant(n) from None
        acc = None
        for k in range(1, n + 1):
            if A[k].is_zero():
                continue
            term = A[k] @ Y[n - k]
            acc = term if acc is None else acc + term
        Y.append(inv @ acc if acc is not None else Y0.scale(fld.zero))
    return TruncatedSeriesMatrix(tuple(Y), sys)


# ---------------------------------------------------------------------------
# Pade reconstruction over k(q)
# ---------------------------------------------------------------------------


def _trim(a):
    a = list(a)
    while a and a[-1].is_zero():
        a.pop()
    return a


def _sub(a, b):
    n = max(len(a), len(b))
    z = (a or b)[0] * 0
    return _trim([(a[i] if i < len(a) else z) - (b[i] if i < len(b) else z) for i in range(n)])


def _mul(a, b):
    if not a or not b:
        return []
    out = [a[0] * 0] * (len(a) + len(b) - 1)
    for i, s in enumerate(a):
        if s.is_zero():
            continue
        for j, t in enumerate(b):
            out[i + j] = out[i + j] + s * t
    return _trim(out)


def _divmod(a, b):
    a = list(a)
    inv = 1 / b[-1]
    z = b[-1] * 0
    qt = [z] * max(len(a) - len(b) + 1, 0)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] * inv
        qt[k] = c
        if not c.is_zero():
            for i, t in enumerate(b):
                a[k + i] = a[k + i] - c * t
    return _trim(qt), _trim(a[: len(b) - 1])


def _to_ratfn(fld: Field, coeffs) -> RatFn:
    out = fld.zero
    for c in reversed(coeffs):
        out = out * fld.x + c
    return out


def rational_reconstruct(coeffs: list, num_deg: int, den_deg: int, fld: Field):
    """P/Q with deg P <= num_deg, deg Q <= den_deg, Q(0) != 0 and
    P/Q = sum c_n x^n mod x^(N+1), or None."""
    N = len(coeffs) - 1
    s = _trim(coeffs)
    if not s:
        return fld.zero
    one = fld.one
    r0 = [fld.zero] * (N + 1) + [one]
    r1 = s
    t0, t1 = [], [one]
    while len(r1) - 1 > num_deg:
        qt, r = _divmod(r0, r1)
        r0, r1 = r1, r
        t0, t1 = t1, _sub(t0, _mul(qt, t1))
        if not r1:
            return None
    if len(t1) - 1 > den_deg or t1[0].is_zero():
        return None
    return _to_ratfn(fld, r1) / _to_ratfn(fld, t1)


def verify_solution(sys: QDiffSystem, Y: Matrix) -> bool:
    """Exact check of Y(qx) = A(x) Y(x) with Y of full column rank."""
    if Y.nrows != sys.dim or Y.ncols == 0:
        return False
    if sigma_matrix(Y) != sys.A @ Y:
        return False
    return Y.rank() == Y.ncols


def pade_reconstruct(series: TruncatedSeriesMatrix, D: int, den_degree: int | None = None) -> Matrix:
    """Entrywise rational reconstruction, verified before it is returned.

    The default bounds are (D, D); ``den_degree`` allows asymmetric ones.
    """
    E = D if den_degree is None else den_degree
    N = series.order
    if N < D + E + 1:
        raise IndexOutOfRange(f"truncation order {N} is too small for degree bounds ({D}, {E})")
    nr, nc = series.shape
    if nc == 0:
        raise NoMatch("empty series")
    fld = series.coeffs[0][0, 0].field
    rows = []
    for i in range(nr):
        row = []
        for j in range(nc):
            f = rational_reconstruct(series.entry_series(i, j), D, E, fld)
            if f is None:
                raise NoMatch(f"no rational function of degrees ({D}, {E}) matches entry ({i}, {j})")
            row.append(f)
        rows.append(row)
    Y = Matrix(rows)
    if series.system is not None:
        if not verify_solution(series.system, Y):
            raise NoMatch("reconstructed candidate does not solve the system")
    else:
        expansion = matrix_taylor(Y, N)
        if any(a != b for a, b in zip(expansion, series.coeffs)):
            raise NoMatch("reconstructed candidate does not match the series")
    return Y


# ---------------------------------------------------------------------------
# Shearing
# ---------------------------------------------------------------------------


def _pole_order(A: Matrix) -> int:
    vals = [a.x_valuation() for a in A.entries() if not a.is_zero()]
    return max(0, -min(vals)) if vals else 0


def _leading(A: Matrix, p: int) -> Matrix:
    xp = A[0, 0].field.x ** p
    return A.map(lambda a: (a * xp).value_at_zero())


def _measure(A: Matrix):
    p = _pole_order(A)
    L = _leading(A, p)
    return p, L.ncols - L.rank(), L


def _shear(A: Matrix, e) -> Matrix:
    """gauge by diag(x^e): entry (i,j) becomes q^(-e_i) x^(e_j - e_i) a_ij."""
    fld = A[0, 0].field
    return Matrix([
        [A[i, j] * fld.q ** (-e[i]) * fld.x ** (e[j] - e[i]) for j in range(A.ncols)]
        for i in range(A.nrows)
    ])


def _complete_basis(vectors, n, fld):
    """Extend linearly independent vectors to a basis with unit vectors."""
    basis = [list(v) for v in vectors]
    for i in range(n):
        if len(basis) == n:
            break
        e = [fld.one if k == i else fld.zero for k in range(n)]
        trial = basis + [e]
        if Matrix(trial).rank() == len(trial):
            basis = trial
    return Matrix(basis).T


def _constant_gauges(L: Matrix, fld):
    n = L.nrows
    out = [identity(n, fld)]
    ker = L.kernel()
    if ker and len(ker) < n:
        out.append(_complete_basis(ker, n, fld))
    left = L.T.kernel()
    if left and len(left) < n:
        out.append(_complete_basis(left, n, fld).T.inverse())
    return out


def _triangular_certificate(A: Matrix):
    n = A.nrows
    upper = all(A[i, j].is_zero() for i in range(n) for j in range(i))
    lower = all(A[i, j].is_zero() for i in range(n) for j in range(i + 1, n))
    if upper or lower:
        for i in range(n):
            if A[i, i].x_valuation() != 0:
                return i
    return None


def shear_normalize(sys: QDiffSystem, max_iter: int | None = None):
    """Find T in GL(k(q)[x, 1/x]) such that gauge(sys, T) has A(0) invertible.

    Returns (T, sys').  Raises NotRegularSingularAtZero when the system is
    certified irregular (the x-valuation of det A, a gauge invariant, is not
    zero, or a triangular diagonal entry has non-zero valuation) and
    ShearingUnresolved when the greedy search stalls.
    """
    A = sys.A
    fld = sys.field
    nu = sys.dim
    v = A.det().x_valuation()
    if v != 0:
        raise NotRegularSingularAtZero(f"certified irregular: det A has x-valuation {v}")
    i = _triangular_certificate(A)
    if i is not None:
        raise NotRegularSingularAtZero(
            f"certified irregular: diagonal entry {i} of a triangular system has x-valuation "
            f"{A[i, i].x_valuation()}"
        )
    if max_iter is None:
        maxdeg = max(a.degree_x() for a in A.entries())
        max_iter = max(1, nu * maxdeg) + nu
    T = identity(nu, fld)
    shifts = [e for e in product((0, 1), repeat=nu) if any(e)]
    shifts += [tuple(-c for c in e) for e in shifts]
    cur = A
    p, null, L = _measure(cur)
    for _ in range(max_iter):
        if p == 0 and null == 0:
            break
        best = None
        for P in _constant_gauges(L, fld):
            B = P.inverse() @ cur @ P
            for e in shifts:
                C = _shear(B, e)
                mp, mn, ml = _measure(C)
                if best is None or (mp, mn) < best[0]:
                    best = ((mp, mn), P, e, C, ml)
        if best is None or best[0] >= (p, null):
            break
        (p, null), P, e, cur, L = best
        T = T @ P @ Matrix.diag([fld.x**k for k in e], fld.zero)
    if not (p == 0 and null == 0):
        raise ShearingUnresolved(
            f"shearing did not reach an invertible A(0) (pole order {p}, nullity {null})"
        )
    out = gauge_transform(sys, T)
    if out.A != cur:
        raise InvariantViolation("shearing gauge does not reproduce the sheared matrix")
    return T, out


# ---------------------------------------------------------------------------
# Exponents and eigen-structure of A(0)
# ---------------------------------------------------------------------------


def q_power_exponent(f: RatFn):
    """d if f == q^d exactly, else None."""
    if f.is_zero() or not f.is_x_free():
        return None
    n, d = f.num.to_dict(), f.den.to_dict()
    if len(n) != 1 or len(d) != 1:
        return None
    (ni, nj), nc = next(iter(n.items()))
    (di, dj), dc = next(iter(d.items()))
    if nc != 1 or dc != 1 or nj or dj:
        return None
    return int(ni) - int(di)


def char_poly(M: Matrix) -> RatFn:
    """det(t Id - M) for x-free M, with x standing for t."""
    fld = M[0, 0].field
    t = identity(M.nrows, fld).scale(fld.x)
    return (t - M).det()


def eigen_roots(M: Matrix):
    """Roots in k(q) of the char poly of an x-free matrix.

    Returns (roots, unresolved) where roots is a list of (root, multiplicity)
    and unresolved lists the irreducible factors of degree >= 2 (as strings
    in the variable t).
    """
    fld = M[0, 0].field
    P = char_poly(M)
    _, factors = P.num.factor()
    roots, unresolved = [], []
    for f, mult in factors:
        deg = int(f.degrees()[1])
        if deg <= 0:
            continue
        if deg == 1:
            c = fld.x_coeffs(f)
            root = -RatFn.from_polys(fld, fld.upoly_to_mpoly(c[0]), fld.upoly_to_mpoly(c[1]))
            roots.append((root, mult))
        else:
            unresolved.append((format_poly(f).replace("x", "t"), mult))
    roots.sort(key=lambda r: str(r[0]))
    unresolved.sort()
    return roots, unresolved


@dataclass
class ExponentData:
    char_poly: str
    roots: list
    unresolved: list

    def to_json(self):
        return {
            "char_poly": self.char_poly,
            "roots": [
                {"root": str(r), "multiplicity": m, "class": c} for r, m, c in self.roots
            ],
            "unresolved": [{"factor": f, "multiplicity": m} for f, m in self.unresolved],
        }


def exponents_at_zero(sys: QDiffSystem) -> ExponentData:
    """Eigenvalues of A(0) after shearing, each tested for membership in q^Z."""
    from .galois import Monomial, admissible_primes, monomial_dynamics_test

    _, s = shear_normalize(sys)
    A0 = s.A.map(lambda a: a.value_at_zero())
    roots, unresolved = eigen_roots(A0)
    classified = []
    for r, m in roots:
        D = int(max(r.num.degrees()[0], r.den.degrees()[0], 0))
        res = monomial_dynamics_test(r, admissible_primes(D))
        if isinstance(res, Monomial):
            cls = {"kind": "q-power", "exponent": res.d}
        else:
            cls = {"kind": "not-q-power", "witness": res.ell}
        classified.append((r, m, cls))
    cp = format_poly(char_poly(A0).num).replace("x", "t")
    return ExponentData(cp, classified, unresolved)


def _check_nonresonant(A0: Matrix):
    roots, _ = eigen_roots(A0)
    for i, (a, _) in enumerate(roots):
        for b, _ in roots[i + 1:]:
            d = q_power_exponent(a / b)
            if d is not None and d != 0:
                raise Resonant((a, b) if d > 0 else (b, a))


def gauge_to_constant(sys: QDiffSystem, N: int):
    """Formal F = sum F_n x^n with F_0 = Id and F(x)^-1 A(x) F(qx) = A_0.

    Coefficients solve q^n A_0 F_n - F_n A_0 = -sum_{j<n} A_{n-j} q^j F_j.
    Returns (F, A_0).
    """
    fld = sys.field
    nu = sys.dim
    A = matrix_taylor(sys.A, N)
    A0 = A[0]
    if A0.det().is_zero():
        raise NotInvertible("A(0) is singular; shear the system first")
    _check_nonresonant(A0)
    Id = identity(nu, fld)
    left = A0.kron(Id)
    right = Id.kron(A0.T)
    F = [Id]
    for n in range(1, N + 1):
        rhs = None
        for j in range(n):
            if A[n - j].is_zero():
                continue
            term = (A[n - j] @ F[j]).scale(fld.q**j)
            rhs = term if rhs is None else rhs + term
        if rhs is None:
            F.append(Id.scale(fld.zero))
            continue
        K = left.scale(fld.q**n) - right
        try:
            Kinv = K.inverse()
        except NotInvertible:
            raise Resonant(n) from None
        vec = Matrix([[-a] for a in rhs.entries()])
        sol = list((Kinv @ vec).entries())
        F.append(Matrix([sol[i * nu:(i + 1) * nu] for i in range(nu)]))
    return TruncatedSeriesMatrix(tuple(F)), A0


# ---------------------------------------------------------------------------
# Reduction to A(0) = Id and rational solutions
# ---------------------------------------------------------------------------


def _generalized_eigenbasis(A0: Matrix, roots):
    nu = A0.nrows
    fld = A0[0, 0].field
    Id = identity(nu, fld)
    cols, blocks = [], []
    for lam, mult in roots:
        K = (A0 - Id.scale(lam)) ** nu
        ker = K.kernel()
        if len(ker) != mult:
            raise EigenUnresolved("generalized eigenspace of unexpected dimension")
        blocks.append((lam, list(range(len(cols), len(cols) + len(ker)))))
        cols.extend(ker)
    return Matrix(cols).T, blocks


def frobenius_to_identity(sys: QDiffSystem, max_steps: int = 200):
    """Gauge a system with invertible A(0) to one with A(0) = Id.

    Works when every exponent is a power of q: the generalized eigenspace
    with the largest exponent is sheared by x until all exponents agree,
    then a scalar x^d gauge removes the common q^d.  Returns (T, sys').
    """
    fld = sys.field
    nu = sys.dim
    T = identity(nu, fld)
    cur = sys
    for _ in range(max_steps):
        A0 = cur.A.map(lambda a: a.value_at_zero())
        if A0.det().is_zero():
            raise EigenUnresolved("A(0) became singular")
        roots, unresolved = eigen_roots(A0)
        if unresolved:
            raise EigenUnresolved(f"exponents not in k(q): {unresolved[0][0]}")
        exps = []
        for lam, _ in roots:
            d = q_power_exponent(lam)
            if d is None:
                raise EigenUnresolved(f"exponent {lam} is not a power of q")
            exps.append(d)
        if len(set(exps)) == 1:
            d = exps[0]
            S = identity(nu, fld).scale(fld.x**d)
            T = T @ S
            cur = gauge_transform(cur, S)
            if not cur.A.map(lambda a: a.value_at_zero()).is_identity():
                raise EigenUnresolved("A(0) is not semisimple")
            return T, cur
        P, blocks = _generalized_eigenbasis(A0, roots)
        top = max(range(len(roots)), key=lambda k: exps[k])
        e = [0] * nu
        for i in blocks[top][1]:
            e[i] = 1
        S = P @ Matrix.diag([fld.x**k for k in e], fld.zero)
        T = T @ S
        cur = gauge_transform(cur, S)
    raise EigenUnresolved("exponent reduction did not terminate")


def rational_solution(sys: QDiffSystem, trunc: int = 40, degbound: int = 10) -> Matrix:
    """A verified fundamental solution matrix with entries in k(q)(x).

    Raises NotRegularSingularAtZero, EigenUnresolved, Resonant or NoMatch
    when one of the steps fails.
    """
    T1, s1 = shear_normalize(sys)
    T2, s2 = frobenius_to_identity(s1)
    Y2 = pade_reconstruct(series_solution(s2, trunc), degbound)
    Y = T1 @ T2 @ Y2
    if not verify_solution(sys, Y):
        raise NoMatch("solution does not survive the gauge back to the input system")
    return Y

