"""Exact arithmetic in the tower k -> k(q) -> k(q)(x), k = Q or F_p.

Elements of k(q)(x) are stored as reduced fractions of bivariate polynomials
in (q, x) (backed by FLINT).  The canonical form has gcd(num, den) = 1 and a
denominator whose leading term, for the lexicographic order with q > x, has
coefficient 1.  Two elements are equal iff their canonical forms coincide.

The second half of the module deals with cyclotomic places: the quotient
ring k[q]/(Phi_n), reduction of rational functions modulo Phi_n, and the
Phi_n-adic and Gauss valuations.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import flint

from .errors import (
    BadReduction,
    CharacteristicMismatch,
    InputError,
    NotInvertible,
    OrderDivisibleByChar,
    PoleAtZero,
    ZeroInput,
)

VARS = ("q", "x")


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class Field:
    """The field k(q)(x) for a fixed characteristic (0 or a prime p).

    Use :func:`field` to obtain instances; they are cached so that identity
    comparison works.
    """

    def __init__(self, char: int = 0):
        if char and not _is_prime(char):
            raise InputError(f"characteristic must be 0 or a prime, got {char}")
        self.char = char
        if char == 0:
            self.ctx = flint.fmpq_mpoly_ctx.get(VARS, "lex")
        else:
            self.ctx = flint.nmod_mpoly_ctx.get(VARS, modulus=char, ordering="lex")
        qm, xm = self.ctx.gens()
        self.qm = qm
        self.xm = xm
        self.one_m = self.ctx.constant(1)
        self.zero_m = self.ctx.constant(0)
        self.q = RatFn._raw(self, qm, self.one_m)
        self.x = RatFn._raw(self, xm, self.one_m)
        self.one = RatFn._raw(self, self.one_m, self.one_m)
        self.zero = RatFn._raw(self, self.zero_m, self.one_m)

    def __repr__(self):
        return f"field({self.char})"

    def scalar(self, value):
        """Coerce an int or Fraction into the base field k."""
        if isinstance(value, Fraction):
            num, den = value.numerator, value.denominator
        else:
            num, den = int(value), 1
        if self.char == 0:
            return flint.fmpq(num, den)
        if den % self.char == 0:
            raise ZeroDivisionError(f"{den} is not invertible modulo {self.char}")
        return flint.nmod(num * pow(den, -1, self.char), self.char)

    def upoly(self, coeffs):
        """Univariate polynomial in q from a low-to-high coefficient list."""
        if self.char == 0:
            return flint.fmpq_poly(list(coeffs))
        return flint.nmod_poly([int(c) for c in coeffs], self.char)

    def mpoly(self, terms: dict):
        return self.ctx.from_dict(terms)

    def __call__(self, value) -> "RatFn":
        if isinstance(value, RatFn):
            if value.field is not self:
                raise CharacteristicMismatch(f"cannot mix {value.field} and {self}")
            return value
        c = self.scalar(value)
        return RatFn._raw(self, self.ctx.constant(c), self.one_m)

    def upoly_to_mpoly(self, u):
        return self.ctx.from_dict({(i, 0): c for i, c in enumerate(u.coeffs()) if c != 0})

    def mpoly_to_upoly(self, P):
        """Convert an x-free bivariate polynomial into a univariate one in q."""
        d = P.to_dict()
        if not d:
            return self.upoly([])
        top = max(i for i, _ in d)
        coeffs = [0] * (top + 1)
        for (i, j), c in d.items():
            if j:
                raise ValueError("polynomial depends on x")
            coeffs[i] = c
        return self.upoly(coeffs)

    def x_coeffs(self, P) -> list:
        """Coefficients of P in x, as univariate polynomials in q."""
        d = P.to_dict()
        if not d:
            return []
        buckets: dict[int, dict[int, object]] = {}
        for (i, j), c in d.items():
            buckets.setdefault(j, {})[i] = c
        out = []
        for j in range(max(buckets) + 1):
            b = buckets.get(j)
            if not b:
                out.append(self.upoly([]))
                continue
            coeffs = [0] * (max(b) + 1)
            for i, c in b.items():
                coeffs[i] = c
            out.append(self.upoly(coeffs))
        return out


@lru_cache(maxsize=None)
def field(char: int = 0) -> Field:
    return Field(char)



def _scale_x(fld: Field, P, k: int):
    """Return (P', e) with P(q, q^k x) = q^e * P'(q, x) and P' a polynomial."""
    if k == 0 or P.is_zero():
        return P, 0
    if k > 0:
        return P.compose(fld.qm, fld.xm * fld.qm**k), 0
    items = [((i + k * j, j), c) for (i, j), c in P.to_dict().items()]
    e = min(0, min(ij[0] for ij, _ in items))
    return fld.mpoly({(i - e, j): c for (i, j), c in items}), e


class RatFn:
    """An element of k(q)(x) in canonical form.  Immutable."""

    __slots__ = ("field", "num", "den")

    @classmethod
    def _raw(cls, fld, num, den):
        obj = object.__new__(cls)
        obj.field = fld
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def from_polys(cls, fld: Field, num, den=None) -> "RatFn":
        if den is None:
            den = fld.one_m
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            return fld.zero
        g = num.gcd(den)
        if not g.is_one():
            num = num / g
            den = den / g
        lc = den.leading_coefficient()
        if lc != 1:
            inv = 1 / lc
            num = num * inv
            den = den * inv
        return cls._raw(fld, num, den)

    # -- coercion and arithmetic -------------------------------------------
    def _coerce(self, other) -> "RatFn":
        if isinstance(other, RatFn):
            if other.field is not self.field:
                raise CharacteristicMismatch(f"cannot mix {self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return RatFn.from_polys(self.field, self.num + other.num, self.den)
        g = self.den.gcd(other.den)
        if g.is_one():
            num = self.num * other.den + other.num * self.den
            return RatFn.from_polys(self.field, num, self.den * other.den)
        a = other.den / g
        b = self.den / g
        return RatFn.from_polys(self.field, self.num * a + other.num * b, self.den * a)

    __radd__ = __add__

    def __neg__(self):
        return RatFn._raw(self.field, -self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero() or other.num.is_zero():
            return self.field.zero
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        g1 = n1.gcd(d2)
        if not g1.is_one():
            n1, d2 = n1 / g1, d2 / g1
        g2 = n2.gcd(d1)
        if not g2.is_one():
            n2, d1 = n2 / g2, d1 / g2
        num, den = n1 * n2, d1 * d2
        lc = den.leading_coefficient()
        if lc != 1:
            inv = 1 / lc
            num, den = num * inv, den * inv
        return RatFn._raw(self.field, num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFn":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFn.from_polys(self.field, self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        try:
            k = int(k)
        except TypeError:
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return self.field.one
        return RatFn._raw(self.field, self.num**k, self.den**k)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field(other)
        if not isinstance(other, RatFn):
            return NotImplemented
        return (
            self.field.char == other.field.char
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.field.char, str(self)))

    def __bool__(self):
        return not self.num.is_zero()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num == self.den

    # -- structure ------------------------------------------------------------
    def degrees(self):
        """(deg_q, deg_x) of numerator and denominator, as a 2x2 tuple."""
        return tuple(int(d) for d in self.num.degrees()), tuple(int(d) for d in self.den.degrees())

    def is_x_free(self) -> bool:
        return self.num.degrees()[1] <= 0 and self.den.degrees()[1] <= 0

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def degree_x(self) -> int:
        return int(max(self.num.degrees()[1], self.den.degrees()[1], 0))

    def num_x_coeffs(self) -> list:
        return self.field.x_coeffs(self.num)

    def den_x_coeffs(self) -> list:
        return self.field.x_coeffs(self.den)

    def as_upolys(self):
        """(numerator, denominator) as univariate polynomials in q."""
        if not self.is_x_free():
            raise ValueError(f"{self} depends on x")
        return self.field.mpoly_to_upoly(self.num), self.field.mpoly_to_upoly(self.den)

    def x_valuation(self) -> int:
        if self.num.is_zero():
            raise ZeroInput("x-valuation of zero")
        return _x_ord(self.num) - _x_ord(self.den)

    def value_at_zero(self) -> "RatFn":
        """Substitute x = 0."""
        fld = self.field
        n0 = _x_part(fld, self.num, 0)
        d0 = _x_part(fld, self.den, 0)
        if d0.is_zero():
            raise PoleAtZero(f"{self} has a pole at x = 0")
        return RatFn.from_polys(fld, n0, d0)

    def taylor(self, order: int) -> list:
        """Taylor coefficients c_0..c_order at x = 0, each an x-free RatFn."""
        fld = self.field
        ncoef = self.num_x_coeffs()
        dcoef = self.den_x_coeffs()
        if not dcoef or dcoef[0].is_zero():
            raise PoleAtZero(f"{self} has a pole at x = 0")
        # work with c_k * d0^(k+1), which stays polynomial in q
        d0 = dcoef[0]
        scaled = []
        for k in range(order + 1):
            acc = (ncoef[k] if k < len(ncoef) else fld.upoly([])) * d0**k
            for j in range(1, min(k, len(dcoef) - 1) + 1):
                if not dcoef[j].is_zero():
                    acc -= dcoef[j] * scaled[k - j] * d0 ** (j - 1)
            scaled.append(acc)
        return [
            RatFn.from_polys(fld, fld.upoly_to_mpoly(s), fld.upoly_to_mpoly(d0 ** (k + 1)))
            for k, s in enumerate(scaled)
        ]

    # -- operators --------------------------------------------------------------
    def sigma(self, k: int = 1) -> "RatFn":
        """x -> q^k x."""
        if k == 0 or self.is_x_free():
            return self
        fld = self.field
        n, en = _scale_x(fld, self.num, k)
        d, ed = _scale_x(fld, self.den, k)
        e = en - ed
        if e > 0:
            n = n * fld.qm**e
        elif e < 0:
            d = d * fld.qm ** (-e)
        return RatFn.from_polys(fld, n, d)

    def diff_x(self) -> "RatFn":
        """d/dx."""
        n, d = self.num, self.den
        return RatFn.from_polys(
            self.field, n.derivative("x") * d - n * d.derivative("x"), d * d
        )

    def theta(self) -> "RatFn":
        """x d/dx."""
        return self.field.x * self.diff_x()

    def subs_q(self, value) -> "RatFn":
        """Substitute q = value (a base-field scalar)."""
        fld = self.field
        c = fld.scalar(value)
        n = self.num.subs({"q": c})
        d = self.den.subs({"q": c})
        if d.is_zero():
            raise ZeroDivisionError(f"denominator of {self} vanishes at q = {value}")
        return RatFn.from_polys(fld, n, d)

    def subs_x(self, value: "RatFn") -> "RatFn":
        """Substitute x = value (value in the same field)."""
        fld = self.field
        value = self._coerce(value)
        out_n = _horner(fld, fld.x_coeffs(self.num), value)
        out_d = _horner(fld, fld.x_coeffs(self.den), value)
        return out_n / out_d

    def __str__(self):
        n = format_poly(self.num)
        if self.den.is_one():
            return n
        return f"({n})/({format_poly(self.den)})"

    def __repr__(self):
        return f"RatFn({self})"


QQ = field(0)


def _x_ord(P) -> int:
    return int(min(j for (_, j) in P.to_dict()))


def _x_part(fld, P, j):
    return fld.mpoly({(a, 0): c for (a, b), c in P.to_dict().items() if b == j})


def _horner(fld, coeffs, value):
    acc = fld.zero
    for c in reversed(coeffs):
        acc = acc * value + RatFn.from_polys(fld, fld.upoly_to_mpoly(c))
    return acc


def _format_coeff(c) -> str:
    return str(c)


def format_poly(P) -> str:
    """Canonical string: terms in lexicographic order, q-major, descending."""
    d = P.to_dict()
    if not d:
        return "0"
    parts = []
    for (i, j) in sorted(d, reverse=True):
        c = d[(i, j)]
        mono = []
        if i:
            mono.append("q" if i == 1 else f"q^{i}")
        if j:
            mono.append("x" if j == 1 else f"x^{j}")
        mono_s = "*".join(mono)
        cs = _format_coeff(c)
        if not mono_s:
            term = cs
        elif cs == "1":
            term = mono_s
        elif cs == "-1":
            term = "-" + mono_s
        else:
            term = f"{cs}*{mono_s}"
        parts.append(term)
    out = parts[0]
    for t in parts[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out


# ---------------------------------------------------------------------------
# Cyclotomic polynomials and places
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _cyclotomic_z(n: int) -> tuple:
    """Integer coefficients (low to high) of the n-th cyclotomic polynomial."""
    num = flint.fmpz_poly([-1] + [0] * (n - 1) + [1])
    for d in range(1, n):
        if n % d == 0:
            num = num // flint.fmpz_poly(list(_cyclotomic_z(d)))
    return tuple(int(c) for c in num.coeffs())


def cyclotomic(n: int, fld: Field = QQ):
    """The n-th cyclotomic polynomial Phi_n as a univariate polynomial in q."""
    if n < 1:
        raise InputError(f"cyclotomic order must be positive, got {n}")
    if fld.char and n % fld.char == 0:
        raise OrderDivisibleByChar(n, fld.char)
    return fld.upoly(_cyclotomic_z(n))


class CyclotomicPlace:
    """The place of k(q) where q becomes a primitive n-th root of unity.

    All reductions are done modulo the full Phi_n; in characteristic p this
    is the product of the places above it.
    """

    __slots__ = ("n", "field", "phi", "phi_m")

    def __init__(self, n: int, fld: Field = QQ):
        if n < 2:
            raise InputError(f"cyclotomic places have order >= 2, got {n}")
        self.n = n
        self.field = fld
        self.phi = cyclotomic(n, fld)
        self.phi_m = fld.upoly_to_mpoly(self.phi)

    @property
    def degree(self) -> int:
        return self.phi.degree()

    def __eq__(self, other):
        return (
            isinstance(other, CyclotomicPlace)
            and self.n == other.n
            and self.field.char == other.field.char
        )

    def __hash__(self):
        return hash((self.n, self.field.char))

    def __repr__(self):
        return f"CyclotomicPlace({self.n}, char={self.field.char})"

    def elem(self, u) -> "CycloElem":
        return CycloElem(self, u % self.phi)

    @property
    def q(self) -> "CycloElem":
        return self.elem(self.field.upoly([0, 1]))

    def one(self) -> "CycloRatFn":
        m = self.field.one_m
        return CycloRatFn(self, m, m)

    def zero(self) -> "CycloRatFn":
        return CycloRatFn(self, self.field.zero_m, self.field.one_m)

    def mod(self, P):
        """Reduce a bivariate polynomial modulo Phi_n(q)."""
        return P % self.phi_m


@lru_cache(maxsize=None)
def place(n: int, char: int = 0) -> CyclotomicPlace:
    return CyclotomicPlace(n, field(char))


def _upoly_inverse_mod(u, phi):
    """Inverse of u modulo phi, or None when gcd(u, phi) != 1."""
    g, s, _ = u.xgcd(phi)
    if g.degree() != 0:
        return None
    return s * (1 / g.coeffs()[0])


class CycloElem:
    """Element of k[q]/(Phi_n), stored as its remainder of degree < deg Phi_n."""

    __slots__ = ("place", "rep")

    def __init__(self, place: CyclotomicPlace, rep):
        self.place = place
        self.rep = rep

    def _coerce(self, other):
        if isinstance(other, CycloElem):
            if other.place != self.place:
                raise InputError("elements of different cyclotomic quotients")
            return other
        if isinstance(other, (int, Fraction)):
            return self.place.elem(self.place.field.upoly([self.place.field.scalar(other)]))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloElem(self.place, self.rep + other.rep)

    __radd__ = __add__

    def __neg__(self):
        return CycloElem(self.place, -self.rep)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloElem(self.place, self.rep - other.rep)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloElem(self.place, (self.rep * other.rep) % self.place.phi)

    __rmul__ = __mul__

    def inverse(self) -> "CycloElem":
        inv = _upoly_inverse_mod(self.rep, self.place.phi)
        if inv is None:
            raise NotInvertible(f"{self} is not a unit modulo Phi_{self.place.n}")
        return CycloElem(self.place, inv % self.place.phi)

    def is_unit(self) -> bool:
        return _upoly_inverse_mod(self.rep, self.place.phi) is not None

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.place.elem(self.place.field.upoly([1]))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.rep == other.rep

    def __hash__(self):
        return hash((self.place, str(self.rep)))

    def is_zero(self) -> bool:
        return self.rep.is_zero()

    def is_one(self) -> bool:
        return self.rep.is_one()

    def __repr__(self):
        return f"CycloElem({format_poly(self.place.field.upoly_to_mpoly(self.rep))} mod Phi_{self.place.n})"


def _is_regular(P, v: CyclotomicPlace) -> bool:
    """True if P mod Phi_n is a non-zero-divisor in (k[q]/Phi_n)[x]."""
    g = v.phi
    for c in v.field.x_coeffs(P):
        if c.is_zero():
            continue
        g = g.gcd(c)
        if g.degree() == 0:
            return True
    return False


class CycloRatFn:
    """A fraction num/den over (k[q]/Phi_n)[x] with den a non-zero-divisor.

    No gcd cancellation is performed by the arithmetic; equality is tested by
    cross multiplication.  :meth:`normalized` cancels common factors when the
    quotient ring is a field.
    """

    __slots__ = ("place", "num", "den")

    def __init__(self, place: CyclotomicPlace, num, den):
        self.place = place
        self.num = num
        self.den = den

    def _coerce(self, other):
        if isinstance(other, CycloRatFn):
            if other.place != self.place:
                raise InputError("elements of different cyclotomic quotients")
            return other
        if isinstance(other, (int, Fraction)):
            fld = self.place.field
            return CycloRatFn(self.place, fld.ctx.constant(fld.scalar(other)), fld.one_m)
        if isinstance(other, CycloElem):
            fld = self.place.field
            return CycloRatFn(self.place, fld.upoly_to_mpoly(other.rep), fld.one_m)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        m = self.place.mod
        if self.den == other.den:
            return CycloRatFn(self.place, m(self.num + other.num), self.den)
        return CycloRatFn(
            self.place,
            m(self.num * other.den + other.num * self.den),
            m(self.den * other.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return CycloRatFn(self.place, -self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        m = self.place.mod
        if self.num.is_zero() or other.num.is_zero():
            return self.place.zero()
        if other.den.is_one():
            return CycloRatFn(self.place, m(self.num * other.num), self.den)
        if self.den.is_one():
            return CycloRatFn(self.place, m(self.num * other.num), other.den)
        return CycloRatFn(self.place, m(self.num * other.num), m(self.den * other.den))

    __rmul__ = __mul__

    def inverse(self) -> "CycloRatFn":
        if not _is_regular(self.num, self.place):
            raise NotInvertible("numerator is a zero divisor")
        return CycloRatFn(self.place, self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        m = self.place.mod
        result = self.place.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = CycloRatFn(self.place, m(base.num * base.num), m(base.den * base.den))
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.place.mod(self.num * other.den - other.num * self.den).is_zero()

    __hash__ = None

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.place.mod(self.num - self.den).is_zero()

    def is_x_free(self) -> bool:
        nf = self.normalized()
        return nf.num.degrees()[1] <= 0 and nf.den.degrees()[1] <= 0

    def scale_x(self, k: int) -> "CycloRatFn":
        """x -> q^k x (k taken modulo n since q^n = 1)."""
        k %= self.place.n
        if k == 0:
            return self
        fld = self.place.field
        sub = fld.xm * fld.qm**k
        m = self.place.mod
        return CycloRatFn(
            self.place,
            m(self.num.compose(fld.qm, sub)),
            m(self.den.compose(fld.qm, sub)),
        )

    def _dense(self, P) -> list:
        v = self.place
        return [CycloElem(v, c % v.phi) for c in v.field.x_coeffs(P)]

    def _from_dense(self, coeffs):
        fld = self.place.field
        terms = {}
        for j, c in enumerate(coeffs):
            for i, a in enumerate(c.rep.coeffs()):
                if a != 0:
                    terms[(i, j)] = a
        return fld.mpoly(terms)

    def normalized(self) -> "CycloRatFn":
        """Cancel gcd(num, den) and make den monic, when units allow it."""
        if self.num.is_zero():
            return self.place.zero()
        try:
            a = _trim(self._dense(self.num))
            b = _trim(self._dense(self.den))
            g = _dense_gcd(a, b)
            if len(g) > 1:
                a = _dense_exact_div(a, g)
                b = _dense_exact_div(b, g)
            lc_inv = b[-1].inverse()
            a = [c * lc_inv for c in a]
            b = [c * lc_inv for c in b]
        except NotInvertible:
            return self
        return CycloRatFn(self.place, self._from_dense(a), self._from_dense(b))

    def as_monomial(self):
        """Return (c, m) with self == c * x^m and c a unit, or None.

        Raises NotInvertible when the answer cannot be decided because a
        relevant coefficient is a zero divisor (characteristic p only).
        """
        if self.num.is_zero():
            return None
        a = _trim(self._dense(self.num))
        b = _trim(self._dense(self.den))
        ia = next(i for i, c in enumerate(a) if not c.is_zero())
        ib = next(i for i, c in enumerate(b) if not c.is_zero())
        c = a[ia] / b[ib]
        # self == c x^(ia-ib)  <=>  num * x^ib == c * den * x^ia
        lhs = [self.place.elem(self.place.field.upoly([]))] * ib + a
        rhs = [self.place.elem(self.place.field.upoly([]))] * ia + [c * t for t in b]
        if _trim(lhs) != _trim(rhs):
            return None
        if not c.is_unit():
            return None
        return c, ia - ib

    def __str__(self):
        nf = self.normalized()
        n = format_poly(nf.num)
        if self.place.mod(nf.den - self.place.field.one_m).is_zero():
            return n
        return f"({n})/({format_poly(nf.den)})"

    def __repr__(self):
        return f"CycloRatFn({self} mod Phi_{self.place.n})"


def _trim(a):
    a = list(a)
    while a and a[-1].is_zero():
        a.pop()
    return a


def _dense_divmod(a, b):
    a = list(a)
    inv = b[-1].inverse()
    qt = [None] * max(len(a) - len(b) + 1, 0)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] * inv
        qt[k] = c
        if not c.is_zero():
            for i, t in enumerate(b):
                a[k + i] = a[k + i] - c * t
    return qt, _trim(a[: len(b) - 1])


def _dense_gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _dense_divmod(a, b)
        a, b = b, r
    return a


def _dense_exact_div(a, b):
    qt, r = _dense_divmod(a, b)
    if r:
        raise NotInvertible("inexact division")
    return qt


# ---------------------------------------------------------------------------
# Reductions and valuations
# ---------------------------------------------------------------------------


def _coprime(u, phi) -> bool:
    return u.gcd(phi).degree() == 0


def reduce_mod_place(f: RatFn, v: CyclotomicPlace) -> CycloElem:
    """Image of an x-free rational function f(q) in k[q]/(Phi_n)."""
    if f.field.char != v.field.char:
        raise CharacteristicMismatch("place and element have different characteristic")
    num, den = f.as_upolys()
    inv = _upoly_inverse_mod(den, v.phi)
    if inv is None:
        raise BadReduction(v.n, f"denominator of {f} shares a factor with Phi_{v.n}")
    return CycloElem(v, (num * inv) % v.phi)


def content(fld: Field, P):
    """gcd over k[q] of the x-coefficients of P."""
    g = fld.upoly([])
    for c in fld.x_coeffs(P):
        if not c.is_zero():
            g = c if g.is_zero() else g.gcd(c)
            if g.degree() == 0:
                return fld.upoly([1])
    return g


def reduce_ratfn(F: RatFn, v: CyclotomicPlace) -> CycloRatFn:
    """Reduction of F in O_{v,Gauss} to (k[q]/Phi_n)(x).

    F = c * N'/D' with N', D' primitive; good reduction means the content
    ratio c has a denominator prime to Phi_n.
    """
    fld = F.field
    if fld.char != v.field.char:
        raise CharacteristicMismatch("place and element have different characteristic")
    if F.num.is_zero():
        return v.zero()
    cn = content(fld, F.num)
    cd = content(fld, F.den)
    g = cn.gcd(cd)
    cn, cd = cn // g, cd // g
    inv = _upoly_inverse_mod(cd, v.phi)
    if inv is None:
        raise BadReduction(v.n, f"Gauss valuation of {F} is negative")
    n_prim = F.num / fld.upoly_to_mpoly(content(fld, F.num))
    d_prim = F.den / fld.upoly_to_mpoly(content(fld, F.den))
    c = fld.upoly_to_mpoly((cn * inv) % v.phi)
    return CycloRatFn(v, v.mod(n_prim * c), v.mod(d_prim))


def ord_phi(u, phi) -> int:
    """Largest k with phi^k | u (u nonzero); u and phi may also be bivariate."""
    if u.is_zero():
        raise ZeroInput("valuation of zero")
    k = 0
    while True:
        qt, r = divmod(u, phi)
        if not r.is_zero():
            return k
        u = qt
        k += 1


def cyclo_valuation(f: RatFn, v: CyclotomicPlace) -> int:
    """ord_{Phi_n}(numerator) - ord_{Phi_n}(denominator) for x-free f."""
    if f.is_zero():
        raise ZeroInput("valuation of zero")
    num, den = f.as_upolys()
    return ord_phi(num, v.phi) - ord_phi(den, v.phi)


def gauss_valuation(F: RatFn, v: CyclotomicPlace) -> int:
    """Gauss valuation at v: min coefficient valuation of num minus that of den."""
    if F.is_zero():
        raise ZeroInput("Gauss valuation of zero")
    # Phi_n^k divides the content iff it divides the bivariate polynomial
    return ord_phi(F.num, v.phi_m) - ord_phi(F.den, v.phi_m)
