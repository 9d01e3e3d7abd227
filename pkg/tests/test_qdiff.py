import random

import pytest
import sympy as sp

from qcurv import (
    QQ,
    QDiffSystem,
    direct_sum,
    dual,
    ext_power,
    g_matrices,
    gauge_transform,
    identity,
    integrability_check,
    iterate,
    iterates,
    place,
    prolong,
    q_binomial,
    q_factorial,
    q_number,
    sym_power,
    tensor,
)
from qcurv.curvature import reduce_matrix
from qcurv.errors import BadReduction, DimensionMismatch, IndexOutOfRange, SingularGauge, SingularSystem
from qcurv.qdiff import sigma_matrix, theta_matrix

from conftest import P, mat, random_gauge, random_poly_x, scalar
from oracles import equal, iterate as sp_iterate, q, q_binomial as sp_q_binomial, x


def random_system(rng, fld=QQ):
    while True:
        rows = []
        for i in range(2):
            row = []
            for j in range(2):
                num = random_poly_x(rng, 1) + fld(rng.randint(-2, 2)) * fld.q
                row.append(num / (fld.x + rng.randint(1, 3)) if rng.random() < 0.3 else num)
            rows.append(row)
        try:
            return QDiffSystem(rows)
        except SingularSystem:
            continue


@pytest.mark.parametrize("n", range(0, 13))
def test_theta_iterate_closed_form(n):
    assert iterate(scalar("q*x"), n) == mat([[f"q^({n * (n + 1) // 2})*x^{n}"]])


@pytest.mark.parametrize("text", ["(q*x+1)/(x+1)", "1+x", "q^2/(x-q)"])
def test_rank1_iterates_match_sympy(text):
    a = sp.sympify(text.replace("^", "**"), locals={"q": q, "x": x})
    seq = iterates(scalar(text), 6)
    for n in range(7):
        assert equal(seq[n][0, 0], sp_iterate(a, n))


def test_negative_iterates():
    s = scalar("q*x")
    assert iterate(s, -1) == mat([["1/x"]])
    assert iterate(s, -2) == mat([["q/x^2"]])


def test_cocycle_and_inverse_laws():
    rng = random.Random(1)
    for _ in range(3):
        s = random_system(rng)
        for m in range(-3, 4):
            for n in range(-3, 4):
                assert iterate(s, m + n) == sigma_matrix(iterate(s, m), n) @ iterate(s, n)
        for n in range(1, 4):
            assert iterate(s, n) @ sigma_matrix(iterate(s, -n), n) == identity(2)


def test_tensor_and_dual_iterates():
    rng = random.Random(2)
    s1, s2 = random_system(rng), random_system(rng)
    for n in range(4):
        assert iterate(tensor(s1, s2), n) == iterate(s1, n).kron(iterate(s2, n))
        assert iterate(dual(s1), n) == iterate(s1, n).inverse().T


def test_direct_sum_sym_and_ext_powers():
    s = QDiffSystem(mat([["q", "x"], ["0", "2"]]))
    d = direct_sum(s, scalar("x"))
    assert d.A == mat([["q", "x", "0"], ["0", "2", "0"], ["0", "0", "x"]])
    assert ext_power(s, 2).A == mat([["2*q"]])
    assert sym_power(s, 2).A == mat([["q^2", "q*x", "x^2"], ["0", "2*q", "4*x"], ["0", "0", "4"]])
    assert sym_power(s, 3).A.det() == QQ(64) * QQ.q**6
    with pytest.raises(IndexOutOfRange):
        ext_power(s, 3)


@pytest.mark.parametrize("n,k", [(0, 0), (4, 2), (7, 3), (9, 9)])
def test_q_binomial(n, k):
    assert equal(q_binomial(n, k), sp_q_binomial(n, k))


def test_q_analogues():
    assert q_number(3) == P("1+q+q^2")
    assert q_factorial(3) == P("(1+q)*(1+q+q^2)")
    assert q_factorial(0) == QQ.one
    with pytest.raises(IndexOutOfRange):
        q_binomial(3, 4)
    with pytest.raises(IndexOutOfRange):
        q_factorial(-1)


def test_g_matrices():
    G = g_matrices(scalar("q*x"), 3)
    assert G[0] == identity(1)
    assert G[1] == mat([["(q*x-1)/((q-1)*x)"]])
    # G_n solves d_q^n Y = G_n Y: check via iterates, A_n = sum binom * ((q-1)x)^k G_k
    s = QDiffSystem(mat([["1", "x"], ["0", "(q*x+1)/(x+1)"]]))
    G = g_matrices(s, 4)
    A = iterates(s, 4)
    for n in range(5):
        acc = identity(2).scale(QQ.zero)
        for k in range(n + 1):
            coeff = q_binomial(n, k) * ((QQ.q - 1) * QQ.x) ** k
            for j in range(k):
                coeff = coeff * QQ.q**j
            acc = acc + G[k].scale(coeff)
        assert acc == A[n]


def test_gauge_transform():
    T = mat([["x+1"]])
    g = gauge_transform(QDiffSystem(identity(1)), T)
    assert g.A == mat([["(x+1)/(q*x+1)"]])
    with pytest.raises(SingularGauge):
        gauge_transform(g, mat([["0"]]))
    with pytest.raises(DimensionMismatch):
        gauge_transform(g, identity(2))


def test_gauge_conjugacy_mod_phi():
    rng = random.Random(3)
    s = random_system(rng)
    T = random_gauge(rng, 1)
    g = gauge_transform(s, T)
    for n in (2, 3, 5):
        v = place(n)
        try:
            lhs = reduce_matrix(iterate(g, n), v)
            rhs = reduce_matrix(T.inverse() @ iterate(s, n) @ T, v)
        except BadReduction:
            continue
        assert all((a - b).normalized().is_zero() for a, b in zip(lhs.entries(), rhs.entries()))


def test_singular_system_rejected():
    with pytest.raises(SingularSystem):
        QDiffSystem(mat([["1", "x"], ["1", "x"]]))
    with pytest.raises(DimensionMismatch):
        QDiffSystem(mat([["1", "x"]]))


def test_prolong():
    assert prolong(scalar("q*x")).A == mat([["q*x", "q*x"], ["0", "q*x"]])
    A = mat([["q", "1"], ["0", "2"]])
    p = prolong(QDiffSystem(A))
    assert p.A.submatrix([0, 1], [2, 3]).is_zero()
    # prolongation commutes with reduction
    s = QDiffSystem(mat([["(q*x+1)/(x+1)", "x"], ["0", "q"]]))
    v = place(5)
    red = reduce_matrix(prolong(s).A, v)
    assert red.submatrix([0, 1], [2, 3]) == reduce_matrix(theta_matrix(s.A), v)


def test_integrability():
    A = mat([["1", "1"], ["0", "1"]])
    assert integrability_check(QDiffSystem(A), mat([["0", "1"], ["0", "0"]]))
    assert not integrability_check(scalar("q*x"), mat([["0"]]))
    assert not integrability_check(scalar("q*x"), mat([["1"]]))
    # y = x solves y(qx) = q y and theta y = y
    assert integrability_check(scalar("q"), mat([["1"]]))
    with pytest.raises(DimensionMismatch):
        integrability_check(scalar("q"), identity(2))
