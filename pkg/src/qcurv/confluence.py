"""Specialization of q (to roots of unity and to 1) and the naive
q-deformation of differential systems.

Convention: a differential system is Y' = G Y with ' = d/dx unless its
``convention`` says "x d/dx".  The horizontal vectors of the connection
e -> e G solve Y' = -G Y; reports carry that sign note.
"""

from __future__ import annotations

from dataclasses import dataclass

from .curvature import reduce_matrix
from .errors import BadReduction, DimensionMismatch, InputError, NoConfluence, UnsupportedShape
from .matrix import Matrix
from .qdiff import QDiffSystem, identity, iterates
from .tower import CyclotomicPlace, Field, place

D_DX = "d/dx"
THETA = "x d/dx"
SIGN_NOTE = "the system is Y' = G Y; horizontal vectors of the connection solve Y' = -G Y"


@dataclass(frozen=True)
class DifferentialSystem:
    G: Matrix
    convention: str = D_DX

    def __post_init__(self):
        if self.convention not in (D_DX, THETA):
            raise InputError(f"unknown derivation convention {self.convention!r}")
        if not self.G.is_square() or self.G.nrows == 0:
            raise DimensionMismatch(f"G must be square, got {self.G.shape}")

    @property
    def dim(self) -> int:
        return self.G.nrows

    @property
    def field(self) -> Field:
        return self.G[0, 0].field

    def converted(self, convention: str) -> "DifferentialSystem":
        return DifferentialSystem(convert_convention(self.G, self.convention, convention), convention)


def convert_convention(G: Matrix, frm: str, to: str) -> Matrix:
    """x d/dx Y = G_theta Y and d/dx Y = G_d Y are related by G_theta = x G_d."""
    if frm == to:
        return G
    x = G[0, 0].field.x
    if frm == D_DX and to == THETA:
        return G.scale(x)
    if frm == THETA and to == D_DX:
        return G.scale(1 / x)
    raise InputError(f"unknown conventions {frm!r} -> {to!r}")


@dataclass(frozen=True)
class SpecializedSystem:
    """The system matrix reduced modulo Phi_n (q a primitive n-th root of unity)."""

    place: CyclotomicPlace
    A: Matrix

    @property
    def order(self) -> int:
        return self.place.n

    def curvature(self) -> Matrix:
        """A(q^(n-1) x) ... A(qx) A(x) computed in the specialized ring."""
        out = self.A
        for k in range(1, self.order):
            out = self.A.map(lambda a, k=k: a.scale_x(k)) @ out
        return out


def specialize_root_of_unity(sys: QDiffSystem, n: int) -> SpecializedSystem:
    v = place(n, sys.field.char)
    return SpecializedSystem(v, reduce_matrix(sys.A, v))


def specialize_q1(sys: QDiffSystem) -> DifferentialSystem:
    """G = [(A - Id)/((q-1) x)] at q = 1, for A with A|_{q=1} = Id."""
    fld = sys.field
    try:
        at1 = sys.A.map(lambda a: a.subs_q(1))
    except ZeroDivisionError as exc:
        raise NoConfluence(f"A is not defined at q = 1: {exc}") from None
    if not at1.is_identity():
        raise NoConfluence(f"A at q = 1 is {at1}, not the identity")
    B = (sys.A - sys.identity()).scale(1 / ((fld.q - 1) * fld.x))
    try:
        G = B.map(lambda a: a.subs_q(1))
    except ZeroDivisionError as exc:
        raise NoConfluence(f"the q -> 1 limit is singular: {exc}") from None
    return DifferentialSystem(G, D_DX)


def _is_q_free(a) -> bool:
    return a.num.degrees()[0] <= 0 and a.den.degrees()[0] <= 0


def _as_differential(G) -> DifferentialSystem:
    if isinstance(G, DifferentialSystem):
        return G.converted(D_DX)
    if not isinstance(G, Matrix):
        G = Matrix(G)
    return DifferentialSystem(G, D_DX)


def deform_differential(G) -> QDiffSystem:
    """The naive deformation A = Id + (q - 1) x G of Y' = G Y."""
    ds = _as_differential(G)
    if not all(_is_q_free(a) for a in ds.G.entries()):
        raise InputError("a differential system must have entries in k(x)")
    fld = ds.field
    return QDiffSystem(identity(ds.dim, fld) + ds.G.scale((fld.q - 1) * fld.x))


def deformation_curvature(G, n: int) -> Matrix:
    """prod_{i=n-1..0} (Id + (q-1) q^i x G(q^i x)) reduced modulo Phi_n."""
    ds = _as_differential(G)
    fld = ds.field
    v = place(n, fld.char)
    Id = identity(ds.dim, fld)
    out = None
    for i in range(n):
        qi = fld.q**i
        factor = Id + ds.G.map(lambda a: a.sigma(i)).scale((fld.q - 1) * qi * fld.x)
        red = reduce_matrix(factor, v)
        out = red if out is None else red @ out
    return out


@dataclass
class DiffTrivialityReport:
    verdict: str
    order: int | None
    bound: int
    checked: list
    bad: list

    @property
    def caveat(self) -> str:
        if self.verdict == "FailWitness":
            return (
                "conclusive about this basis only: the deformation of G has a non-identity "
                "product curvature, but the module may be trivial in another basis"
            )
        return (
            "every good order up to the bound gives the identity in this basis; "
            "the differential module is trivial if this persists for almost all orders"
        )

    def to_json(self):
        out = {
            "verdict": self.verdict,
            "bound": self.bound,
            "checked_orders": self.checked,
            "bad_orders": self.bad,
            "caveat": self.caveat,
            "basis_dependent": self.verdict == "FailWitness",
            "sign_convention": SIGN_NOTE,
        }
        if self.order is not None:
            out["witness_order"] = self.order
        return out


def differential_triviality_scan(G, N: int = 30) -> DiffTrivialityReport:
    checked, bad = [], []
    for n in range(2, N + 1):
        try:
            C = deformation_curvature(G, n)
        except BadReduction:
            bad.append(n)
            continue
        except InputError:
            bad.append(n)
            continue
        checked.append(n)
        if not C.is_identity():
            return DiffTrivialityReport("FailWitness", n, N, checked, bad)
    return DiffTrivialityReport("BasisCertified", None, N, checked, bad)


def _lattice_descriptor(basis, nu):
    if not basis:
        return {"group": "FullGm"} if nu == 1 else {"group": "FullGm", "rank": nu}
    if nu == 1:
        r = abs(basis[0][0])
        return {"group": "Trivial"} if r == 1 else {"group": "FiniteCyclic", "order": r}
    return {"group": "SubTorus"}


def specialization_containment_check(sys: QDiffSystem, n: int, N: int = 30, H: int = 3) -> dict:
    """Compare the relation lattice of the curvatures at order n with the
    generic one.  The specialized group is contained in the reduction of the
    generic group iff every generic relation still holds at n."""
    from .galois import _hnf_basis, rank1_curvatures, relation_lattice

    if not sys.A.is_diagonal():
        raise UnsupportedShape("containment check needs a rank-1 or diagonal system")
    entries = [sys.A[i, i] for i in range(sys.dim)]
    v = place(n, sys.field.char)
    local = []
    for a in entries:
        An = iterates(QDiffSystem.scalar(a), n)[n]
        local.append(reduce_matrix(An, v)[0, 0])
    per_entry = [rank1_curvatures(a, N) for a in entries]
    orders = [m for m in range(2, N + 1) if all(pe[m] is not None for pe in per_entry)]
    curvs = [tuple(pe[m] for pe in per_entry) for m in orders]
    generic = _hnf_basis(relation_lattice(curvs, H), len(entries)) if curvs else []
    special = _hnf_basis(relation_lattice([tuple(local)], H), len(entries))

    def holds(m):
        acc = None
        for c, k in zip(local, m):
            if k:
                p = c**k
                acc = p if acc is None else acc * p
        return acc is None or acc.is_one()

    contained = all(holds(m) for m in generic)
    return {
        "order": n,
        "generic": {**_lattice_descriptor(generic, len(entries)), "relations": generic, "bound": N},
        "specialized": {**_lattice_descriptor(special, len(entries)), "relations": special},
        "contained": contained,
        "note": "containment only; equality is not claimed",
    }

