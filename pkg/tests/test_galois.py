import pytest
from hypothesis import given, settings, strategies as st

from qcurv import (
    QQ,
    QDiffSystem,
    admissible_primes,
    diagonal_group,
    generic_group,
    monomial_dynamics_test,
    rank1_differential_class,
    rank1_generic_group,
)
from qcurv.errors import InputError, NotConstant, PrimeTooSmall, UnsupportedShape, ZeroInput
from qcurv.galois import Monomial, NotMonomial, constancy_check, q_degree, rank1_curvatures

from conftest import P, TELESCOPING, THETA, mat, scalar

PRIMES = [11, 13, 17, 19, 23]


def test_dynamics_examples():
    assert monomial_dynamics_test(P("q^3"), [5, 7, 11]) == Monomial(3)
    assert monomial_dynamics_test(P("q^(-2)"), [7, 11]) == Monomial(-2)
    assert monomial_dynamics_test(P("2*q"), admissible_primes(1)) == NotMonomial(5)
    assert monomial_dynamics_test(QQ.one, [3]) == Monomial(0)


def test_dynamics_errors():
    with pytest.raises(PrimeTooSmall):
        monomial_dynamics_test(P("q^4"), [5, 7])
    with pytest.raises(ZeroInput):
        monomial_dynamics_test(QQ.zero, PRIMES)
    with pytest.raises(InputError):
        monomial_dynamics_test(P("q*x"), PRIMES)
    with pytest.raises(InputError):
        monomial_dynamics_test(P("q"), [9, 11])


@given(st.integers(-6, 6))
def test_monomials_accepted(d):
    assert monomial_dynamics_test(QQ.q**d, PRIMES) == Monomial(d)


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=5), st.lists(st.integers(-3, 3), min_size=1, max_size=5))
@settings(max_examples=60, deadline=None)
def test_accepts_exactly_monomials(num, den):
    f = QQ.upoly(num)
    g = QQ.upoly(den)
    if f.is_zero() or g.is_zero():
        return
    r = sum((QQ(c) * QQ.q**i for i, c in enumerate(num)), QQ.zero) / sum(
        (QQ(c) * QQ.q**i for i, c in enumerate(den)), QQ.zero
    )
    if r.is_zero() or q_degree(r) > 4:
        return
    res = monomial_dynamics_test(r, PRIMES)
    is_monomial = any(r == QQ.q**d for d in range(-4, 5))
    assert isinstance(res, Monomial) == is_monomial


def test_admissible_primes():
    assert admissible_primes(4) == [11, 13, 17, 19, 23]
    assert admissible_primes(0, count=3, char=3) == [2, 5, 7]


def test_rank1_groups():
    g = rank1_generic_group(P(THETA))
    assert g.kind == "FullGm"
    g = rank1_generic_group(P("-1"))
    assert (g.kind, g.order) == ("FiniteCyclic", 2)
    for d in range(-5, 6):
        g = rank1_generic_group(QQ.q**d)
        assert g.kind == "Trivial" and g.certified
    g = rank1_generic_group(P(TELESCOPING))
    assert g.solution == mat([["x+1"]])
    assert rank1_generic_group(P("2")).kind == "FullGm"


def test_finite_order_scaling():
    # -q^2 = (-1) q^2 has curvature (-1)^n at every order
    assert rank1_generic_group(P("-q^2")).order == 2
    c = rank1_curvatures(P("-q^2"), 8)
    d = rank1_curvatures(QQ.q**2, 8)
    for n in range(2, 9):
        assert c[n] == d[n] * (-1) ** n


def test_differential_classes():
    d = rank1_differential_class(P(THETA))
    assert (d.kind, d.exact) == ("MultiplicativeFlat", True)
    assert rank1_differential_class(QQ.q**3).kind == "Trivial"
    assert rank1_differential_class(P("1+x")).kind == "FullGmDiff"
    assert rank1_differential_class(P("-1")).to_json()["exact"] is False
    # Trivial generic group implies trivial differential group
    for text in ("q^2", TELESCOPING, "(q^2*x+1)/(x+1)"):
        if rank1_generic_group(P(text)).kind == "Trivial":
            assert rank1_differential_class(P(text)).kind == "Trivial"


def test_inconclusive_when_bad_places_dominate():
    a = P("1/((q+1)*(q^2+q+1)*(q^2+1)*(q^4+q^3+q^2+q+1))") * P("2")
    d = rank1_differential_class(a, N=5)
    assert d.kind == "Inconclusive"
    assert rank1_generic_group(a, N=5).kind == "Inconclusive"


def test_diagonal_groups():
    g = diagonal_group([P("q"), P("q^2")])
    assert g.basis == [[1, 0], [0, 1]] and g.certified == [True, True]
    assert diagonal_group([P("2"), P("2")]).basis == [[1, -1]]
    assert diagonal_group([P(THETA), P(THETA)]).basis == [[1, -1]]
    assert diagonal_group([P("2"), P(THETA)]).kind == "FullGm"
    assert diagonal_group([P("2"), P("4")], H=3).basis == [[2, -1]]
    with pytest.raises(ZeroInput):
        diagonal_group([P("2"), QQ.zero])


def test_diagonal_lattice_is_saturated():
    from qcurv.galois import relation_lattice

    per = [rank1_curvatures(P(t), 12) for t in ("2", "4", "-2")]
    curvs = [tuple(p[n] for p in per) for n in range(2, 13)]
    rel = set(relation_lattice(curvs, 3))
    for m in rel:
        for k in (-3, -2, 2, 3):
            km = tuple(k * c for c in m)
            if max(abs(c) for c in km) <= 3:
                assert km in rel


def test_constancy():
    assert constancy_check(QDiffSystem(mat([["0", "1"], ["-1", "0"]])))
    assert constancy_check(QDiffSystem(mat([["1", "1"], ["0", "1"]])))
    with pytest.raises(NotConstant):
        constancy_check(scalar(THETA))


def test_generic_group_dispatch():
    assert generic_group(scalar(THETA))["group"] == "FullGm"
    assert generic_group(QDiffSystem(mat([["2", "0"], ["0", "2"]])))["shape"] == "diagonal"
    assert generic_group(QDiffSystem(mat([["0", "1"], ["-1", "0"]])))["shape"] == "constant"
    with pytest.raises(UnsupportedShape):
        generic_group(QDiffSystem(mat([["1", "x"], ["0", "1"]])))
