"""Curvatures at cyclotomic places and the triviality verdict.

The curvature at the place of order n is the iterate A_n reduced modulo
Phi_n.  It is the identity for almost all n exactly when the system has a
fundamental solution matrix with rational entries.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

from .errors import (
    BadReduction,
    IndexOutOfRange,
    InvariantViolation,
    NotRegularSingularAtZero,
    OrderDivisibleByChar,
    QCurvError,
)
from .matrix import Matrix
from .qdiff import QDiffSystem, g_matrices, iterates, q_factorial
from .tower import CyclotomicPlace, _is_prime, cyclo_valuation, gauss_valuation, place, reduce_ratfn


@dataclass(frozen=True)
class CurvatureClass:
    """kind is one of 'zero', 'nilpotent', 'other', 'bad-reduction'."""

    kind: str
    index: int | None = None
    detail: str = ""

    @property
    def is_good(self) -> bool:
        return self.kind != "bad-reduction"

    def to_json(self):
        out = {"class": self.kind}
        if self.kind == "nilpotent":
            out["index"] = self.index
        if self.detail:
            out["detail"] = self.detail
        return out

    def __str__(self):
        if self.kind == "nilpotent":
            return f"Nilpotent({self.index})"
        return {"zero": "Zero", "other": "Other", "bad-reduction": "BadReduction"}[self.kind]


ZERO = CurvatureClass("zero")
OTHER = CurvatureClass("other")


def reduce_matrix(M: Matrix, v: CyclotomicPlace) -> Matrix:
    return M.map(lambda a: reduce_ratfn(a, v))


def _place_for(sys: QDiffSystem, n: int) -> CyclotomicPlace:
    return place(n, sys.field.char)


def curvature(sys: QDiffSystem, v, incremental: bool = False, _An: Matrix | None = None) -> Matrix:
    """A_n reduced modulo Phi_n, as a matrix over (k[q]/Phi_n)(x).

    ``v`` is a CyclotomicPlace or an order n.  The incremental mode reduces
    A first and multiplies the shifted reductions; it falls back to the full
    computation when A itself has bad reduction.
    """
    if isinstance(v, int):
        v = _place_for(sys, v)
    n = v.n
    if incremental:
        try:
            red = reduce_matrix(sys.A, v)
        except BadReduction:
            pass
        else:
            out = red
            for k in range(1, n):
                out = red.map(lambda a, k=k: a.scale_x(k)) @ out
            return out
    An = _An if _An is not None else iterates(sys, n)[n]
    return reduce_matrix(An, v)


def _nilpotency(D: Matrix, nu: int):
    P = D
    for k in range(2, nu + 1):
        P = P @ D
        if P.is_zero():
            return k
    return None


def _classify_curvature(C: Matrix) -> CurvatureClass:
    one = C[0, 0] * 0 + 1
    D = C - Matrix.identity(C.nrows, one, one * 0)
    if D.is_zero():
        return ZERO
    k = _nilpotency(D, C.nrows)
    if k is not None:
        return CurvatureClass("nilpotent", k)
    return OTHER


def g_criterion(sys: QDiffSystem, v: CyclotomicPlace, _Gn: Matrix | None = None) -> bool:
    """True iff G_n reduces to zero modulo Phi_n (n = order of v)."""
    Gn = _Gn if _Gn is not None else g_matrices(sys, v.n)[v.n]
    return reduce_matrix(Gn, v).is_zero()


def classify(sys: QDiffSystem, v, cross_check: bool = False, incremental: bool = False,
             _An: Matrix | None = None, _Gn: Matrix | None = None) -> CurvatureClass:
    if isinstance(v, int):
        try:
            v = _place_for(sys, v)
        except OrderDivisibleByChar as exc:
            return CurvatureClass("bad-reduction", detail=str(exc))
    try:
        C = curvature(sys, v, incremental=incremental, _An=_An)
    except BadReduction as exc:
        return CurvatureClass("bad-reduction", detail=str(exc))
    cls = _classify_curvature(C)
    if cross_check:
        try:
            g_zero = g_criterion(sys, v, _Gn)
        except BadReduction:
            g_zero = False
        if g_zero != (cls.kind == "zero"):
            raise InvariantViolation(
                f"A- and G-criteria disagree at order {v.n}: {cls} vs G_n zero = {g_zero}"
            )
    return cls


def _threads() -> int:
    raw = os.environ.get("QCURV_THREADS", "0")
    try:
        t = int(raw)
    except ValueError:
        t = 0
    if t <= 0:
        t = min(8, os.cpu_count() or 1)
    return t


@dataclass
class CurvatureReport:
    n_min: int
    n_max: int
    prime_orders_only: bool
    classes: dict = dc_field(default_factory=dict)

    @property
    def orders(self):
        return sorted(self.classes)

    def counts(self) -> dict:
        out = {"zero": 0, "nilpotent": 0, "other": 0, "bad-reduction": 0}
        for c in self.classes.values():
            out[c.kind] += 1
        return out

    def good_orders(self):
        return [n for n in self.orders if self.classes[n].is_good]

    def first_nonzero(self):
        return next((n for n in self.orders if self.classes[n].kind in ("nilpotent", "other")), None)

    def all_good_zero(self) -> bool:
        good = self.good_orders()
        return bool(good) and all(self.classes[n].kind == "zero" for n in good)

    @property
    def verdict_hint(self) -> str:
        if self.first_nonzero() is not None:
            return "nontrivial"
        if not self.good_orders():
            return "no-good-places"
        return "conjecturally-trivial"

    def to_json(self):
        return {
            "range": [self.n_min, self.n_max],
            "prime_orders_only": self.prime_orders_only,
            "classes": {str(n): self.classes[n].to_json() for n in self.orders},
            "counts": self.counts(),
            "verdict_hint": self.verdict_hint,
        }


def scan_orders(n_min: int, n_max: int, prime_orders_only: bool = False):
    return [n for n in range(n_min, n_max + 1) if not prime_orders_only or _is_prime(n)]


def curvature_scan(sys: QDiffSystem, n_min: int = 2, n_max: int = 30,
                   prime_orders_only: bool = False, threads: int | None = None,
                   incremental: bool = False, cross_check: bool = False) -> CurvatureReport:
    """Classify the curvature at every order in [n_min, n_max].

    The symbolic iterates are shared across orders; reductions run on a
    thread pool capped by QCURV_THREADS.  The report is keyed by order, so
    completion order does not matter.
    """
    if not 2 <= n_min <= n_max:
        raise IndexOutOfRange(f"scan range must satisfy 2 <= n_min <= n_max, got {n_min}..{n_max}")
    orders = scan_orders(n_min, n_max, prime_orders_only)
    seq = None if incremental or not orders else iterates(sys, max(orders))
    gseq = g_matrices(sys, max(orders)) if cross_check and orders else None

    def work(n):
        An = None if seq is None else seq[n]
        Gn = None if gseq is None else gseq[n]
        return n, classify(sys, n, cross_check=cross_check, incremental=incremental, _An=An, _Gn=Gn)

    t = threads if threads is not None else _threads()
    if t <= 1 or len(orders) <= 1:
        results = [work(n) for n in orders]
    else:
        with ThreadPoolExecutor(max_workers=t) as pool:
            results = list(pool.map(work, orders))
    report = CurvatureReport(n_min, n_max, prime_orders_only)
    for n, c in sorted(results):
        report.classes[n] = c
    return report


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------


@dataclass
class Verdict:
    """kind is 'NontrivialWitness', 'TrivialCertified' or 'ConjecturallyTrivial'."""

    kind: str
    order: int | None = None
    solution: Matrix | None = None
    bound: int | None = None
    reason: str = ""
    report: CurvatureReport | None = None

    def to_json(self):
        out = {"verdict": self.kind}
        if self.kind == "NontrivialWitness":
            out["witness_order"] = self.order
        if self.solution is not None:
            out["solution"] = self.solution.to_strings()
        if self.bound is not None:
            out["bound"] = self.bound
        if self.reason:
            out["reason"] = self.reason
        if self.report is not None:
            out["scan"] = self.report.to_json()
        return out


def triviality_verdict(sys: QDiffSystem, N: int = 30, trunc: int = 40, degbound: int = 10,
                       prime_orders_only: bool = False, report: CurvatureReport | None = None,
                       n_min: int = 2) -> Verdict:
    """Two-sided test: a non-zero curvature at a good place is a sound witness
    of non-triviality; otherwise try to build and verify a rational
    fundamental solution."""
    from .solutions import rational_solution

    if report is None:
        report = curvature_scan(sys, n_min, N, prime_orders_only=prime_orders_only)
    w = report.first_nonzero()
    if w is not None:
        return Verdict("NontrivialWitness", order=w, report=report)
    try:
        Y = rational_solution(sys, trunc=trunc, degbound=degbound)
    except NotRegularSingularAtZero as exc:
        return Verdict("ConjecturallyTrivial", bound=N, reason=f"normalization failed: {exc}", report=report)
    except QCurvError as exc:
        return Verdict("ConjecturallyTrivial", bound=N, reason=f"reconstruction failed: {exc}", report=report)
    return Verdict("TrivialCertified", solution=Y, bound=N, report=report)


def iterative_structure_check(sys: QDiffSystem, v, M: int, _G=None) -> bool:
    """True iff every normalized G_[m], m <= M, has non-negative Gauss valuation at v.

    ``_G`` may carry precomputed g_matrices(sys, M') with M' >= M.
    """
    if isinstance(v, int):
        v = _place_for(sys, v)
    G = _G if _G is not None else g_matrices(sys, M)
    for a in G[1].entries():
        if not a.is_zero() and gauss_valuation(a, v) < 0:
            raise BadReduction(v.n, "G_1 is not integral")
    for m in range(1, M + 1):
        # Gauss valuations are additive, so divide by [m]_q! on the valuation side
        shift = cyclo_valuation(q_factorial(m, sys.field), v)
        for a in G[m].entries():
            if not a.is_zero() and gauss_valuation(a, v) < shift:
                return False
    return True
