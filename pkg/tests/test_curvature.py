import random

import pytest

from qcurv import (
    QDiffSystem,
    classify,
    curvature,
    curvature_scan,
    dual,
    field,
    g_criterion,
    gauge_transform,
    identity,
    iterative_structure_check,
    place,
    sym_power,
    tensor,
    triviality_verdict,
)
from qcurv.errors import BadReduction, IndexOutOfRange

from conftest import TELESCOPING, THETA, mat, random_trivial_system, scalar


def as_str(C):
    return [[str(a.normalized()) for a in row] for row in C.rows]


def test_curvature_examples():
    v3 = place(3)
    assert as_str(curvature(scalar(THETA), v3)) == [["x^3"]]
    for n in (2, 3, 7, 12):
        assert curvature(scalar(TELESCOPING), n).is_identity()
    assert as_str(curvature(scalar("2"), 5)) == [["32"]]


@pytest.mark.parametrize("text", [THETA, TELESCOPING, "2", "(x+q)/(1-x)", "q^2*x/(x+1)"])
@pytest.mark.parametrize("n", [2, 3, 4, 6, 9])
def test_incremental_mode_agrees(text, n):
    s = scalar(text)
    try:
        full = curvature(s, n)
    except BadReduction:
        return
    inc = curvature(s, n, incremental=True)
    assert all((a - b).normalized().is_zero() for a, b in zip(full.entries(), inc.entries()))


def test_classify_examples():
    assert classify(QDiffSystem(identity(2)), 5).kind == "zero"
    assert classify(QDiffSystem(mat([["1", "x"], ["0", "1"]])), 7).kind == "zero"
    assert classify(scalar("2"), 4).kind == "other"
    assert classify(scalar("1/(q+1)"), 2).kind == "bad-reduction"
    c = classify(QDiffSystem(mat([["1", "1"], ["0", "1"]])), 3)
    assert (c.kind, c.index) == ("nilpotent", 2)
    assert str(c) == "Nilpotent(2)"


def test_scan_examples():
    rep = curvature_scan(gauge_transform(QDiffSystem(identity(1)), mat([["x+1"]])), 2, 30)
    counts = rep.counts()
    assert counts["zero"] >= 25 and counts["zero"] + counts["bad-reduction"] == 29
    assert all(c.kind == "other" for c in curvature_scan(scalar(THETA)).classes.values())
    rep = curvature_scan(scalar("-1"))
    assert [n for n, c in rep.classes.items() if c.kind == "zero"] == list(range(2, 31, 2))
    assert curvature_scan(scalar("2"), 2, 13, prime_orders_only=True).orders == [2, 3, 5, 7, 11, 13]


def test_scan_range_and_determinism(monkeypatch):
    with pytest.raises(IndexOutOfRange):
        curvature_scan(scalar("2"), 1, 5)
    with pytest.raises(IndexOutOfRange):
        curvature_scan(scalar("2"), 6, 5)
    s = QDiffSystem(mat([["1", "x"], ["0", TELESCOPING]]))
    serial = curvature_scan(s, 2, 12, threads=1).to_json()
    monkeypatch.setenv("QCURV_THREADS", "4")
    assert curvature_scan(s, 2, 12).to_json() == serial


def test_g_criterion_equivalence():
    rng = random.Random(7)
    systems = [scalar(THETA), scalar(TELESCOPING), scalar("-1"), QDiffSystem(mat([["1", "x"], ["0", "1"]]))]
    systems += [random_trivial_system(rng, 1)[1] for _ in range(2)]
    for s in systems:
        for n in range(2, 9):
            cls = classify(s, n)
            if cls.kind == "bad-reduction":
                continue
            assert g_criterion(s, place(n)) == (cls.kind == "zero")
        curvature_scan(s, 2, 8, cross_check=True)


def test_gauge_invariance_and_constructions():
    rng = random.Random(11)
    T, s = random_trivial_system(rng, 1)
    for n in range(2, 8):
        base = classify(s, n)
        if base.kind == "bad-reduction":
            continue
        assert base.kind == "zero"
        assert classify(dual(s), n).kind in ("zero", "bad-reduction")
        assert classify(tensor(s, s), n).kind in ("zero", "bad-reduction")
        assert classify(sym_power(s, 2), n).kind in ("zero", "bad-reduction")


def test_positive_characteristic_scan():
    F5 = field(5)
    rep = curvature_scan(scalar(THETA, F5), 2, 12)
    assert rep.classes[5].kind == "bad-reduction"
    assert rep.classes[10].kind == "bad-reduction"
    assert rep.classes[3].kind == "other"
    assert curvature_scan(scalar(TELESCOPING, F5), 2, 12).all_good_zero()


def test_triviality_verdicts():
    v = triviality_verdict(scalar(TELESCOPING))
    assert v.kind == "TrivialCertified" and v.solution == mat([["x+1"]])
    w = triviality_verdict(scalar(THETA))
    assert (w.kind, w.order) == ("NontrivialWitness", 2)
    assert triviality_verdict(scalar("2")).order == 2
    for d in (-2, 3):
        v = triviality_verdict(scalar(f"q^({d})"))
        assert v.kind == "TrivialCertified"
        assert v.solution == mat([[f"x^({d})"]])


def test_conjecturally_trivial_when_bounds_too_small():
    T = mat([["x^3+1", "x"], ["2", "x^2-1"]])
    s = gauge_transform(QDiffSystem(identity(2)), T)
    v = triviality_verdict(s, N=6, trunc=3, degbound=1)
    assert v.kind == "ConjecturallyTrivial"
    assert v.to_json()["bound"] == 6


def test_iterative_structure_check():
    assert iterative_structure_check(QDiffSystem(identity(2)), 5, 20)
    assert iterative_structure_check(scalar(TELESCOPING), 3, 12)
    assert not iterative_structure_check(scalar(THETA), 2, 8)
    with pytest.raises(BadReduction):
        iterative_structure_check(scalar("1/(q+1)"), 2, 4)


def test_nontrivial_witness_is_sound_rank1():
    from qcurv.solutions import pade_reconstruct, series_solution
    from qcurv.errors import NoMatch

    for text in ("2", "1+x", "(2*x+1)/(x+1)"):
        w = triviality_verdict(scalar(text))
        assert w.kind == "NontrivialWitness"
        Y = series_solution(scalar(text), 21)
        for D in range(0, 11):
            with pytest.raises(NoMatch):
                pade_reconstruct(Y, D)
