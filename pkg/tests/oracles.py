"""Independent reference computations built on sympy."""

import sympy as sp

q, x = sp.symbols("q x")


def to_sympy(f):
    return sp.sympify(str(f).replace("^", "**"), locals={"q": q, "x": x})


def equal(f, expr):
    return sp.cancel(sp.together(to_sympy(f) - expr)) == 0


def cyclotomic(n):
    return sp.Poly(sp.cyclotomic_poly(n, q), q)


def reduce_q(expr, n):
    """Remainder of a q-polynomial (or of num * den^-1) modulo Phi_n, as a Poly in q."""
    phi = cyclotomic(n)
    num, den = sp.fraction(sp.together(expr))
    inv = sp.invert(sp.Poly(den, q), phi)
    return sp.Poly(sp.expand(num), q).mul(inv).rem(phi)


def iterate(a, n):
    """prod_{k=n-1..0} a(q^k x) for a scalar sympy expression a(q, x)."""
    out = sp.Integer(1)
    for k in range(n):
        out *= a.subs(x, q**k * x)
    return sp.factor(out)


def q_binomial(n, k):
    def fac(m):
        out = sp.Integer(1)
        for j in range(1, m + 1):
            out *= sum(q**i for i in range(j))
        return out

    return sp.cancel(fac(n) / (fac(k) * fac(n - k)))
