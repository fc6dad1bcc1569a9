"""Univariate polynomials in t over the rational-function field.

These carry the characteristic and minimal polynomials of symbolic
matrices.  Coefficients are RationalFunction values; division is exact
field arithmetic.  The gcd routine rescales intermediate remainders to
integer-primitive polynomial coefficients, which keeps the coefficient
swell of the Euclidean chain in check without affecting the result
(gcds in F[t] are only defined up to units of F anyway).
"""

from __future__ import annotations

import math

from .errors import DimensionMismatchError
from .polynomials import Polynomial, VarSet, exact_div, integer_primitive, print_poly
from .rationals import BigRat, rat
from .ratfuncs import RationalFunction, print_rf


def _coerce_rf(value, varset: VarSet) -> RationalFunction:
    if isinstance(value, RationalFunction):
        if value.varset != varset:
            raise DimensionMismatchError("mixed variable sets")
        return value
    if isinstance(value, Polynomial):
        return RationalFunction(value)
    return RationalFunction.constant(varset, value)


class UnivarPoly:
    """coeffs[i] is the coefficient of t^i; trailing zeros are stripped."""

    __slots__ = ("varset", "coeffs")

    def __init__(self, varset: VarSet, coeffs):
        coeffs = [_coerce_rf(c, varset) for c in coeffs]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.varset = varset
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls, varset: VarSet) -> "UnivarPoly":
        return cls(varset, [])

    @classmethod
    def one(cls, varset: VarSet) -> "UnivarPoly":
        return cls(varset, [1])

    @classmethod
    def t_power(cls, varset: VarSet, k: int, coeff=1) -> "UnivarPoly":
        return cls(varset, [0] * k + [coeff])

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> RationalFunction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return RationalFunction.zero(self.varset)

    @property
    def leading(self) -> RationalFunction:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __add__(self, other):
        if not isinstance(other, UnivarPoly):
            return NotImplemented
        longer, shorter = self.coeffs, other.coeffs
        if len(longer) < len(shorter):
            longer, shorter = shorter, longer
        out = list(longer)
        for i, c in enumerate(shorter):
            out[i] = out[i] + c
        return UnivarPoly(self.varset, out)

    def __neg__(self):
        return UnivarPoly(self.varset, [-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, UnivarPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, BigRat, Polynomial, RationalFunction)):
            return self.scale(other)
        if not isinstance(other, UnivarPoly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return UnivarPoly.zero(self.varset)
        out = [RationalFunction.zero(self.varset)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if b.is_zero():
                    continue
                out[i + j] = out[i + j] + a * b
        return UnivarPoly(self.varset, out)

    __rmul__ = __mul__

    def scale(self, value) -> "UnivarPoly":
        value = _coerce_rf(value, self.varset)
        return UnivarPoly(self.varset, [c * value for c in self.coeffs])

    def __divmod__(self, other):
        if not isinstance(other, UnivarPoly):
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        q = [RationalFunction.zero(self.varset)] * max(len(self.coeffs) - len(other.coeffs) + 1, 0)
        r = list(self.coeffs)
        lead_inv = other.leading.inv()
        dg = other.degree
        while len(r) - 1 >= dg and r:
            c = r[-1] * lead_inv
            k = len(r) - 1 - dg
            q[k] = c
            for j, b in enumerate(other.coeffs):
                r[k + j] = r[k + j] - c * b
            while r and r[-1].is_zero():
                r.pop()
        return UnivarPoly(self.varset, q), UnivarPoly(self.varset, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if not isinstance(other, UnivarPoly):
            return NotImplemented
        if len(self.coeffs) != len(other.coeffs):
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None

    def derivative(self) -> "UnivarPoly":
        return UnivarPoly(
            self.varset, [c * i for i, c in enumerate(self.coeffs)][1:]
        )

    def monic(self) -> "UnivarPoly":
        if self.is_zero():
            return self
        lead = self.leading
        if lead == 1:
            return self
        return self.scale(lead.inv())

    def eval_scalar(self, x: RationalFunction) -> RationalFunction:
        x = _coerce_rf(x, self.varset)
        acc = RationalFunction.zero(self.varset)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self):
        if self.is_zero():
            return "UnivarPoly('0')"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeff(i)
            if c.is_zero():
                continue
            body = print_rf(c)
            if i == 0:
                parts.append(f"({body})")
            elif i == 1:
                parts.append(f"({body})*t")
            else:
                parts.append(f"({body})*t^{i}")
        return f"UnivarPoly({' + '.join(parts)!r})"


def upoly_mul(f: UnivarPoly, g: UnivarPoly) -> UnivarPoly:
    return f * g


def upoly_mod(f: UnivarPoly, g: UnivarPoly) -> UnivarPoly:
    return f % g


def upoly_derivative(f: UnivarPoly) -> UnivarPoly:
    return f.derivative()


def _rat_gcd(values):
    num_gcd = 0
    den_lcm = 1
    for q in values:
        num_gcd = math.gcd(num_gcd, abs(int(q.numerator)))
        den_lcm = math.lcm(den_lcm, int(q.denominator))
    return rat(num_gcd or 1, den_lcm)


def coeff_normalized(f: UnivarPoly) -> UnivarPoly:
    """Rescale f by one nonzero field scalar so every coefficient is an
    integer-primitive polynomial (jointly; the scalar is shared).

    Used between Euclidean steps, where results are defined up to units.
    """
    if f.is_zero():
        return f
    den_product = Polynomial.one(f.varset)
    seen = []
    for c in f.coeffs:
        if not c.den == 1 and all(c.den != d for d in seen):
            seen.append(c.den)
            den_product = den_product * c.den
    polys = []
    for c in f.coeffs:
        num = c.num * exact_div(den_product, c.den) if not c.den == 1 else c.num * den_product
        polys.append(num)
    scalars = [integer_primitive(p)[0] for p in polys if not p.is_zero()]
    shared = _rat_gcd(scalars)
    inv = rat(1) / shared
    return UnivarPoly(f.varset, [p.scale(inv) for p in polys])


def upoly_gcd(f: UnivarPoly, g: UnivarPoly) -> UnivarPoly:
    """Monic gcd by the Euclidean algorithm with remainder rescaling."""
    a, b = f, g
    while not b.is_zero():
        r = a % b
        if not r.is_zero():
            r = coeff_normalized(r)
        a, b = b, r
    return a.monic()


def upoly_squarefree_part(f: UnivarPoly) -> UnivarPoly:
    """f divided by gcd(f, f'), monic: same roots, all simple."""
    if f.is_zero():
        raise ZeroDivisionError("squarefree part of the zero polynomial")
    g = upoly_gcd(f, f.derivative())
    q, r = divmod(f, g)
    assert r.is_zero(), "gcd(f, f') must divide f"
    return q.monic()


def upoly_ext_euclid(b: UnivarPoly, p: UnivarPoly):
    """(g, u, w) with u*b + w*p = g = gcd(b, p), g monic."""
    varset = b.varset
    r0, r1 = b, p
    u0, u1 = UnivarPoly.one(varset), UnivarPoly.zero(varset)
    w0, w1 = UnivarPoly.zero(varset), UnivarPoly.one(varset)
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        u0, u1 = u1, u0 - q * u1
        w0, w1 = w1, w0 - q * w1
    if r0.is_zero():
        return r0, u0, w0
    lead_inv = r0.leading.inv()
    return r0.scale(lead_inv), u0.scale(lead_inv), w0.scale(lead_inv)
