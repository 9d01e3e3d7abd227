"""Generic Galois groups of rank-1, diagonal and constant systems, read off
from curvatures.

Only what curvatures can decide in these shapes is attempted; the general
rank case is rejected with UnsupportedShape.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product

import flint

from .curvature import curvature, reduce_matrix
from .errors import (
    BadReduction,
    InputError,
    InvariantViolation,
    NotConstant,
    NotInvertible,
    OrderDivisibleByChar,
    PrimeTooSmall,
    QCurvError,
    UnsupportedShape,
    ZeroInput,
)
from .matrix import Matrix
from .qdiff import QDiffSystem, iterates
from .tower import RatFn, _is_prime, place, reduce_mod_place


# ---------------------------------------------------------------------------
# Root-of-unity dynamics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Monomial:
    d: int

    def to_json(self):
        return {"result": "Monomial", "exponent": self.d}


@dataclass(frozen=True)
class NotMonomial:
    ell: int

    def to_json(self):
        return {"result": "NotMonomial", "witness": self.ell}


def admissible_primes(D: int, count: int = 5, char: int = 0) -> list:
    """The smallest `count` primes l with 2D < l - 1 (and l != char)."""
    out = []
    ell = 2
    while len(out) < count:
        if _is_prime(ell) and 2 * D < ell - 1 and ell != char:
            out.append(ell)
        ell += 1
    return out


def q_degree(f: RatFn) -> int:
    return int(max(f.num.degrees()[0], f.den.degrees()[0], 0))


def monomial_dynamics_test(f: RatFn, primes) -> Monomial | NotMonomial:
    """Decide whether f in k(q) is a power of q from its values at roots of unity.

    At each prime l the reduction of f must be an l-th root of unity, hence
    congruent to some q^kappa.  Primes with 2D < l - 1 (D the q-degree of f)
    pin the exponent down; smaller primes act as extra filters.  At least
    one prime must satisfy the degree condition, and the answer is checked
    by exact equality.
    """
    from .solutions import q_power_exponent

    if f.is_zero():
        raise ZeroInput("dynamics test of zero")
    if not f.is_x_free():
        raise InputError(f"{f} depends on x")
    primes = list(primes)
    if not primes:
        raise InputError("empty prime list")
    D = q_degree(f)
    for ell in primes:
        if not _is_prime(ell):
            raise InputError(f"{ell} is not prime")
    if not any(2 * D < ell - 1 for ell in primes):
        raise PrimeTooSmall(min(primes), D)
    residues = []
    for ell in primes:
        v = place(ell, f.field.char)
        try:
            r = reduce_mod_place(f, v)
        except BadReduction:
            return NotMonomial(ell)
        if not (r**ell).is_one():
            return NotMonomial(ell)
        qv = v.q
        power = qv**0
        kappa = None
        for k in range(ell):
            if power == r:
                kappa = k
                break
            power = power * qv
        if kappa is None:
            return NotMonomial(ell)
        residues.append((ell, kappa))
    # primes with 2D < l - 1 determine the exponent; the others only filter
    d = None
    for ell, kappa in residues:
        if 2 * D < ell - 1:
            cand = kappa if kappa <= D else kappa - ell
            if d is None:
                d = cand
            elif cand != d:
                return NotMonomial(ell)
    for ell, kappa in residues:
        if (d - kappa) % ell:
            return NotMonomial(ell)
    if q_power_exponent(f) == d:
        return Monomial(d)
    return NotMonomial(primes[-1])


# ---------------------------------------------------------------------------
# Group descriptors
# ---------------------------------------------------------------------------


@dataclass
class GroupDescriptor:
    """kind is 'Trivial', 'FiniteCyclic', 'FullGm', 'SubTorus' or 'Inconclusive'."""

    kind: str
    order: int | None = None
    basis: list | None = None
    certified: list | bool | None = None
    solution: Matrix | None = None
    bound: int | None = None
    note: str = ""

    def to_json(self):
        out = {"group": self.kind}
        if self.order is not None:
            out["order"] = self.order
        if self.basis is not None:
            out["relations"] = self.basis
        if self.certified is not None:
            out["certified"] = self.certified
        if self.solution is not None:
            out["solution"] = self.solution.to_strings()
        if self.bound is not None:
            out["bound"] = self.bound
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class DiffGroupDescriptor:
    """kind is 'Trivial', 'MultiplicativeFlat', 'FullGmDiff' or 'Inconclusive'."""

    kind: str
    exact: bool | None = None
    bound: int | None = None
    counts: dict = dc_field(default_factory=dict)

    def to_json(self):
        out = {"diff_group": self.kind}
        if self.exact is not None:
            out["exact"] = self.exact
        if self.bound is not None:
            out["bound"] = self.bound
        if self.counts:
            out["counts"] = dict(self.counts)
        return out


def _as_system(a) -> QDiffSystem:
    if isinstance(a, QDiffSystem):
        if a.dim != 1:
            raise UnsupportedShape("expected a rank-1 system")
        return a
    return QDiffSystem.scalar(a)


def rank1_curvatures(a, N: int = 30) -> dict:
    """order n -> curvature scalar mod Phi_n (None at bad places)."""
    sys = _as_system(a)
    seq = iterates(sys, N)
    out = {}
    for n in range(2, N + 1):
        try:
            out[n] = curvature(sys, place(n, sys.field.char), _An=seq[n])[0, 0]
        except (BadReduction, OrderDivisibleByChar):
            out[n] = None
    return out


def _finite_order(curv: dict, R: int):
    good = [c for c in curv.values() if c is not None]
    for r in range(2, R + 1):
        if all((c**r).is_one() for c in good):
            return r
    return None


def _certify_rank1(sys: QDiffSystem):
    from .solutions import rational_solution

    try:
        return rational_solution(sys)
    except QCurvError:
        return None


def rank1_generic_group(a, N: int = 30, R: int = 12, certify: bool = True) -> GroupDescriptor:
    sys = _as_system(a)
    curv = rank1_curvatures(sys, N)
    good = [c for c in curv.values() if c is not None]
    if not good:
        return GroupDescriptor("Inconclusive", bound=N, note="no place of good reduction")
    if all(c.is_one() for c in good):
        Y = _certify_rank1(sys) if certify else None
        return GroupDescriptor("Trivial", certified=Y is not None, solution=Y, bound=N)
    r = _finite_order(curv, R)
    if r is not None:
        return GroupDescriptor("FiniteCyclic", order=r, bound=N)
    return GroupDescriptor("FullGm", bound=N)


def _monomial_kind(c):
    try:
        return "monomial" if c.as_monomial() is not None else "other"
    except NotInvertible:
        return "undecided"


def rank1_differential_class(a, N: int = 30, R: int = 12) -> DiffGroupDescriptor:
    """Containment of the differential group in {d(dy/y) = 0}, from curvatures.

    Flat when every good curvature is c*x^m; full when most good curvatures
    are not of that form; otherwise inconclusive.
    """
    sys = _as_system(a)
    curv = rank1_curvatures(sys, N)
    good = [c for c in curv.values() if c is not None]
    counts = {"good": len(good), "bad": len(curv) - len(good)}
    if not good or 2 * len(good) < len(curv):
        return DiffGroupDescriptor("Inconclusive", bound=N, counts=counts)
    if all(c.is_one() for c in good):
        return DiffGroupDescriptor("Trivial", bound=N, counts=counts)
    kinds = [_monomial_kind(c) for c in good]
    for k in ("monomial", "other", "undecided"):
        counts[k] = kinds.count(k)
    if counts["monomial"] == len(good):
        exact = _finite_order(curv, R) is None
        return DiffGroupDescriptor("MultiplicativeFlat", exact=exact, bound=N, counts=counts)
    if 2 * counts["other"] > len(good):
        return DiffGroupDescriptor("FullGmDiff", bound=N, counts=counts)
    return DiffGroupDescriptor("Inconclusive", bound=N, counts=counts)


def _hnf_basis(vectors, nu):
    if not vectors:
        return []
    H = flint.fmpz_mat([list(v) for v in vectors]).hnf()
    rows = [[int(H[i, j]) for j in range(nu)] for i in range(H.nrows())]
    return [r for r in rows if any(r)]


def relation_lattice(curvs: list, H: int) -> list:
    """All m with |m|_inf <= H and prod c_i^m_i = 1 at every listed place.

    ``curvs`` is a list of tuples (c_1, ..., c_nu), one per place.
    """
    nu = len(curvs[0]) if curvs else 0
    powers = []
    for cs in curvs:
        table = []
        for c in cs:
            row = {}
            for k in range(-H, H + 1):
                try:
                    row[k] = c**k
                except NotInvertible:
                    row[k] = None
            table.append(row)
        powers.append(table)
    out = []
    for m in product(range(-H, H + 1), repeat=nu):
        if not any(m):
            continue
        first = next(k for k in m if k)
        if first < 0:
            continue
        ok = True
        for table in powers:
            acc = None
            for i, k in enumerate(m):
                if k == 0:
                    continue
                p = table[i][k]
                if p is None:
                    ok = False
                    break
                acc = p if acc is None else acc * p
            if not ok or not acc.is_one():
                ok = False
                break
        if ok:
            out.append(m)
            out.append(tuple(-k for k in m))
    return sorted(out)


def diagonal_group(entries, N: int = 30, H: int = 3, certify: bool = True) -> GroupDescriptor:
    """Group of a diagonal system diag(a_1, ..., a_nu) as a relation lattice.

    SubTorus(B) means the group is {t : prod t_i^m_i = 1 for m in span(B)};
    an empty lattice is reported as FullGm (the whole torus).
    """
    entries = list(entries)
    if not entries or any(a.is_zero() for a in entries):
        raise ZeroInput("diagonal entries must be non-zero")
    per_entry = [rank1_curvatures(a, N) for a in entries]
    orders = [n for n in range(2, N + 1) if all(pe[n] is not None for pe in per_entry)]
    if not orders:
        return GroupDescriptor("Inconclusive", bound=N, note="no place of good reduction")
    curvs = [tuple(pe[n] for pe in per_entry) for n in orders]
    rel = relation_lattice(curvs, H)
    basis = _hnf_basis(rel, len(entries))
    if not basis:
        return GroupDescriptor("FullGm", bound=N, note=f"rank {len(entries)} torus")
    certified = None
    if certify:
        certified = []
        for m in basis:
            prod_a = entries[0].field.one
            for a, k in zip(entries, m):
                prod_a = prod_a * a**k
            certified.append(_certify_rank1(QDiffSystem.scalar(prod_a)) is not None)
    return GroupDescriptor("SubTorus", basis=basis, certified=certified, bound=N)


def constancy_check(sys: QDiffSystem, N: int = 30) -> bool:
    """For x-free A, confirm every good curvature is x-free."""
    if not sys.is_x_free():
        raise NotConstant("the system matrix depends on x")
    seq = iterates(sys, N)
    for n in range(2, N + 1):
        try:
            C = reduce_matrix(seq[n], place(n, sys.field.char))
        except (BadReduction, OrderDivisibleByChar):
            continue
        if not all(c.is_x_free() for c in C.entries()):
            raise InvariantViolation(f"curvature of a constant system depends on x at order {n}")
    return True


def generic_group(sys: QDiffSystem, N: int = 30, R: int = 12, H: int = 3) -> dict:
    """Dispatch on the shape of the system."""
    if sys.dim == 1:
        a = sys.A[0, 0]
        return {
            "shape": "rank1",
            **rank1_generic_group(a, N, R).to_json(),
            **rank1_differential_class(a, N, R).to_json(),
        }
    if sys.A.is_diagonal():
        entries = [sys.A[i, i] for i in range(sys.dim)]
        return {"shape": "diagonal", **diagonal_group(entries, N, H).to_json()}
    if sys.is_x_free():
        return {"shape": "constant", "defined_over_constants": constancy_check(sys, N)}
    raise UnsupportedShape("only rank-1, diagonal or constant systems are classified")
