"""The rational-function field: lazily reduced quotients of polynomials.

Equality is decided by cross-multiplication, so reduction is purely an
optimization and never a correctness requirement.  Construction always
performs cheap normalization (constant denominators fold into the
numerator, common monomial factors cancel, the denominator is scaled to
an integer-primitive polynomial with positive leading coefficient).
Full GCD reduction runs only when the representation grows past a size
threshold, using a heuristic GCD whose result is verified by exact
division, with giving up (gcd 1) always sound.
"""

from __future__ import annotations

import math

from .errors import DimensionMismatchError, ExactDivisionError
from .polynomials import (
    Polynomial,
    VarSet,
    divide_by_monomial,
    exact_div,
    heuristic_gcd,
    integer_primitive,
    monomial_content_key,
    print_poly,
)
from .rationals import BigRat, rat

REDUCE_THRESHOLD = 24


def _coerce_poly(value, varset: VarSet) -> Polynomial:
    if isinstance(value, Polynomial):
        if value.varset != varset:
            raise DimensionMismatchError("mixed variable sets")
        return value
    return Polynomial.constant(varset, value)


class RationalFunction:
    """num/den with den nonzero; unhashable because equality is semantic."""

    __slots__ = ("num", "den")
    __hash__ = None

    def __init__(self, num: Polynomial, den: Polynomial = None):
        if den is None:
            den = Polynomial.one(num.varset)
        if num.varset != den.varset:
            raise DimensionMismatchError("numerator and denominator variable sets differ")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        num, den = _normalize(num, den)
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, p: Polynomial) -> "RationalFunction":
        return cls(p)

    @classmethod
    def constant(cls, varset: VarSet, value) -> "RationalFunction":
        return cls(Polynomial.constant(varset, value))

    @classmethod
    def zero(cls, varset: VarSet) -> "RationalFunction":
        return cls(Polynomial.zero(varset))

    @classmethod
    def one(cls, varset: VarSet) -> "RationalFunction":
        return cls(Polynomial.one(varset))

    @property
    def varset(self) -> VarSet:
        return self.num.varset

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        """True when the current representation has denominator 1."""
        return self.den == 1

    def as_polynomial(self) -> Polynomial:
        """The polynomial this value equals; forces the division to happen."""
        if self.den == 1:
            return self.num
        return exact_div(self.num, self.den)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den is other.den or self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        result = object.__new__(RationalFunction)
        result.num = -self.num
        result.den = self.den
        return result

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise ValueError("rational-function powers take an integer")
        if exponent < 0:
            return self.inv() ** (-exponent)
        return RationalFunction(self.num ** exponent, self.den ** exponent)

    def inv(self) -> "RationalFunction":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RationalFunction(self.den, self.num)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.varset != self.varset:
                raise DimensionMismatchError("mixed variable sets")
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        if isinstance(other, (int, BigRat)):
            return RationalFunction.constant(self.varset, other)
        return NotImplemented

    def eval(self, point):
        den_value = self.den.eval(point)
        if den_value == 0:
            raise ZeroDivisionError("denominator vanishes at the sample point")
        return self.num.eval(point) / den_value

    def reduced(self) -> "RationalFunction":
        """Force a full reduction attempt regardless of size."""
        num, den = _reduce_full(self.num, self.den)
        result = object.__new__(RationalFunction)
        result.num = num
        result.den = den
        return result

    def __repr__(self):
        return f"RationalFunction({print_rf(self)!r})"


def _normalize(num: Polynomial, den: Polynomial):
    if num.is_zero():
        return num, Polynomial.one(num.varset)
    if den.is_constant():
        c = den.constant_value()
        if c == 1:
            return num, den
        return num.scale(rat(1) / c), Polynomial.one(num.varset)
    nk = monomial_content_key(num)
    dk = monomial_content_key(den)
    if nk and dk:
        varset = num.varset
        mins = tuple(map(min, varset.unpack(nk), varset.unpack(dk)))
        common_key = varset.pack(mins)
        if common_key:
            num = divide_by_monomial(num, common_key)
            den = divide_by_monomial(den, common_key)
            if den.is_constant():
                return _normalize(num, den)
    scalar, den = integer_primitive(den)
    if scalar != 1:
        num = num.scale(rat(1) / scalar)
    if len(num.terms) + len(den.terms) > REDUCE_THRESHOLD:
        num, den = _reduce_full(num, den, screen=True)
    return num, den


_SCREEN_PRIMES = (3, 7, 13, 19, 29, 37, 43, 53, 61, 71, 79, 89, 101, 107, 113, 127)


_SCREEN_BOUND = 1 << 20


def _probably_coprime(num: Polynomial, den: Polynomial) -> bool:
    """Judge gcd(num, den) negligible from one integer evaluation.

    A common factor divides both images, so a small image gcd bounds
    what any common factor can evaluate to at the point.  Accidental
    small gcds (shared prime factors of the two images) are routine,
    hence a bound rather than == 1.  Trusting the screen can only miss
    a cancellation, never invent one, and unreduced fractions are
    already legal here (heuristic_gcd gives up the same way).
    """
    point = tuple(
        _SCREEN_PRIMES[i % len(_SCREEN_PRIMES)] + 2 * (i // len(_SCREEN_PRIMES))
        for i in range(num.varset.v)
    )
    a = integer_primitive(num)[1].eval(point)
    b = den.eval(point)
    if a == 0 or b == 0:
        return False
    return math.gcd(int(a), int(b)) < _SCREEN_BOUND


def _reduce_full(num: Polynomial, den: Polynomial, screen: bool = False):
    if den == 1 or num.is_zero():
        return num, den
    try:
        return exact_div(num, den), Polynomial.one(num.varset)
    except ExactDivisionError:
        pass
    if screen and _probably_coprime(num, den):
        return num, den
    common = heuristic_gcd(num, den)
    if not common.is_constant():
        num = exact_div(num, common)
        den = exact_div(den, common)
        scalar, den = integer_primitive(den)
        if scalar != 1:
            num = num.scale(rat(1) / scalar)
    return num, den


def print_rf(rf: RationalFunction) -> str:
    if rf.den == 1:
        return print_poly(rf.num)
    return f"({print_poly(rf.num)}) / ({print_poly(rf.den)})"


def rf_add(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    return a + b


def rf_mul(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    return a * b


def rf_inv(a: RationalFunction) -> RationalFunction:
    return a.inv()


def rf_eq(a: RationalFunction, b) -> bool:
    return a == b
