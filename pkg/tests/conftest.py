import random
from pathlib import Path

import pytest

from qcurv import QQ, Matrix, QDiffSystem, gauge_transform, identity, parse_expr

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"


def P(text, fld=QQ):
    return parse_expr(text, fld)


def mat(rows, fld=QQ):
    return Matrix([[parse_expr(e, fld) if isinstance(e, str) else fld(e) for e in r] for r in rows])


def scalar(text, fld=QQ):
    return QDiffSystem.scalar(P(text, fld))


def random_poly_x(rng, deg, fld=QQ, coeff=3):
    x = fld.x
    return sum((fld(rng.randint(-coeff, coeff)) * x**k for k in range(deg + 1)), fld.zero)


def random_gauge(rng, deg=2, fld=QQ):
    """Random T in GL_2(Q(x)) with polynomial entries of degree <= deg."""
    while True:
        T = Matrix([[random_poly_x(rng, rng.randint(0, deg), fld) for _ in range(2)] for _ in range(2)])
        if not T.det().is_zero():
            return T


def random_trivial_system(rng, deg=2, fld=QQ):
    T = random_gauge(rng, deg, fld)
    return T, gauge_transform(QDiffSystem(identity(2, fld)), T)


@pytest.fixture
def rng():
    return random.Random(20240611)


THETA = "q*x"
TELESCOPING = "(q*x+1)/(x+1)"


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
