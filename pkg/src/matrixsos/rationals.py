"""Exact rational scalars and four-square decompositions.

All coefficient arithmetic in this package runs on ``BigRat``, an
arbitrary-precision rational type: ``gmpy2.mpq`` when available, else
``fractions.Fraction``.  Floats are rejected at construction because a
binary float would silently poison the exactness guarantee everything
else depends on.

The four-square machinery writes any nonnegative integer as a sum of
four integer squares (trial factorization, then Euler descent on each
odd prime factor, then the four-square product identity), and extends
to nonnegative rationals through a/b = ab/b^2.
"""

from __future__ import annotations

import functools
from fractions import Fraction
from math import isqrt
from typing import NamedTuple

try:
    import gmpy2 as _gmpy2

    _mpq = _gmpy2.mpq
    BigRat = type(_mpq(0))
    _HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _gmpy2 = None
    _mpq = Fraction
    BigRat = Fraction
    _HAVE_GMPY2 = False

RAT_ZERO = _mpq(0)
RAT_ONE = _mpq(1)


def rat(num=0, den=1):
    """Build a BigRat from ints, strings like "3/4", Fractions, or BigRats.

    Floats are rejected.  Raises ZeroDivisionError for a zero denominator.
    """
    if isinstance(num, float) or isinstance(den, float):
        raise TypeError("floats are not exact; pass ints, strings, or rationals")
    if isinstance(num, str):
        num = _mpq(num.strip())
    q = _mpq(num)
    if den != 1:
        if isinstance(den, str):
            den = _mpq(den.strip())
        q = q / _mpq(den)
    return q


def is_rat(value) -> bool:
    """True for the exact scalar types this package accepts as coefficients."""
    return isinstance(value, (int, BigRat, Fraction)) and not isinstance(value, bool)


class FourSquares(NamedTuple):
    """Four exact values whose squares sum to a decomposed target.

    Compares equal to a plain 4-tuple, so tests can pin expected parts
    directly.  Parts are canonically sorted by decreasing magnitude.
    """

    s1: object
    s2: object
    s3: object
    s4: object

    @property
    def parts(self):
        return tuple(self)

    def sum_squares(self):
        return self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3 + self.s4 * self.s4


if _HAVE_GMPY2:

    def _is_prime(n: int) -> bool:
        return bool(_gmpy2.is_prime(n))

else:  # pragma: no cover - exercised only without gmpy2

    def _is_prime(n: int) -> bool:
        # deterministic Miller-Rabin for n < 3.3e24; witnesses per Sorenson/Webster
        if n < 2:
            return False
        for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
            if n % p == 0:
                return n == p
        d, s = n - 1, 0
        while d % 2 == 0:
            d //= 2
            s += 1
        for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
            x = pow(a, d, n)
            if x in (1, n - 1):
                continue
            for _ in range(s - 1):
                x = x * x % n
                if x == n - 1:
                    break
            else:
                return False
        return True


def _factorize(n: int) -> dict:
    """Prime factorization by trial division; n >= 1.

    A primality short-circuit keeps large prime cofactors cheap; inputs
    here are desk scale (coefficient numerators and denominators).
    """
    factors = {}
    for p in (2, 3):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    f, step = 5, 2
    while n > 1:
        if _is_prime(n):
            factors[n] = factors.get(n, 0) + 1
            break
        while f * f <= n and n % f:
            f += step
            step = 6 - step
        if f * f > n:
            factors[n] = factors.get(n, 0) + 1
            break
        while n % f == 0:
            factors[f] = factors.get(f, 0) + 1
            n //= f
    return factors


def _sqrt_mod_prime(z: int, p: int) -> int:
    """Tonelli-Shanks; z must be a quadratic residue mod the odd prime p."""
    z %= p
    if z == 0:
        return 0
    if p % 4 == 3:
        return pow(z, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    u = 2
    while pow(u, (p - 1) // 2, p) != p - 1:
        u += 1
    c = pow(u, q, p)
    t = pow(z, q, p)
    r = pow(z, (q + 1) // 2, p)
    m = s
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        r = r * b % p
        c = b * b % p
        t = t * c % p
        m = i
    return r


def _solve_xx_yy_plus_one(p: int):
    """Smallest x with -(1 + x^2) a square mod p, and a matching y.

    Both are returned as least absolute residues, so x^2 + y^2 + 1 < p^2.
    """
    for x in range(p):
        z = (-1 - x * x) % p
        if z == 0:
            return x, 0
        if pow(z, (p - 1) // 2, p) == 1:
            y = _sqrt_mod_prime(z, p)
            if x > p // 2:
                x = p - x
            if y > p // 2:
                y = p - y
            return x, y
    raise AssertionError("every odd prime admits x^2 + y^2 + 1 = 0 mod p")


def _quat_mul(q1, q2):
    # four-square product identity: norm(q1*q2) = norm(q1)*norm(q2)
    a, b, c, d = q1
    e, f, g, h = q2
    return (
        a * e - b * f - c * g - d * h,
        a * f + b * e + c * h - d * g,
        a * g - b * h + c * e + d * f,
        a * h + b * g - c * f + d * e,
    )


def _quat_mul_conj(q1, q2):
    # q1 * conj(q2); if q2 = q1 mod m componentwise, every component is = 0 mod m
    a, b, c, d = q1
    e, f, g, h = q2
    return (
        a * e + b * f + c * g + d * h,
        -a * f + b * e - c * h + d * g,
        -a * g + c * e - d * f + b * h,
        -a * h + d * e - b * g + c * f,
    )


def _least_abs(v: int, m: int) -> int:
    r = v % m
    if r > m // 2:
        r -= m
    return r


@functools.lru_cache(maxsize=None)
def _four_squares_prime(p: int):
    """Four integer squares summing to the prime p, by Euler descent."""
    if p == 2:
        return (1, 1, 0, 0)
    x, y = _solve_xx_yy_plus_one(p)
    a, b, c, d = x, y, 1, 0
    m = (x * x + y * y + 1) // p
    while m > 1:
        if m % 2 == 0:
            evens = [v for v in (a, b, c, d) if v % 2 == 0]
            odds = [v for v in (a, b, c, d) if v % 2]
            if len(odds) == 2:
                a, b, c, d = evens[0], evens[1], odds[0], odds[1]
            elif len(odds) == 4:
                a, b, c, d = odds
            else:
                a, b, c, d = evens
            a, b, c, d = (a + b) // 2, (a - b) // 2, (c + d) // 2, (c - d) // 2
            m //= 2
        else:
            reduced = tuple(_least_abs(v, m) for v in (a, b, c, d))
            r = sum(v * v for v in reduced) // m
            assert 0 < r < m
            w = _quat_mul_conj((a, b, c, d), reduced)
            a, b, c, d = (v // m for v in w)
            m = r
    return (a, b, c, d)


# Above this, trial division is no longer guaranteed cheap and the
# decomposition switches to the prime-seeking descent.
_FACTOR_LIMIT = 1 << 40


def _prime_two_squares(p: int):
    """Legs of a prime p = 1 mod 4 by Hermite-Serret: run Euclid on p and
    a square root of -1 mod p; the first remainder below sqrt(p) is a
    leg.  Returns None if p was not actually prime (probabilistic tests
    on huge inputs), never a wrong pair."""
    a = 2
    while pow(a, (p - 1) // 2, p) != p - 1:
        a += 1
        if a > 1000:
            return None
    s = pow(a, (p - 1) // 4, p)
    u, v = p, s
    while v * v > p:
        u, v = v, u % v
    y2 = p - v * v
    y = isqrt(y2)
    if y * y != y2:
        return None
    return (v, y)


def _two_squares_or_none(p: int):
    """(x, y) with x^2 + y^2 = p, or None when this detector cannot tell.

    Complete for perfect squares, twice perfect squares, primes that are
    1 mod 4, and twice such primes (2(a^2+b^2) = (a+b)^2 + (a-b)^2).
    The doubled branch matters: remainders n - x^2 can be stuck in the
    class 2 mod 8, where odd primes never appear.
    """
    if p == 0:
        return (0, 0)
    r = isqrt(p)
    if r * r == p:
        return (r, 0)
    if p % 2 == 0:
        h = isqrt(p // 2)
        if 2 * h * h == p:
            return (h, h)
    if p % 4 == 1 and _is_prime(p):
        return _prime_two_squares(p)
    if p % 8 == 2 and _is_prime(p // 2):
        legs = _prime_two_squares(p // 2)
        if legs is not None:
            return (legs[0] + legs[1], legs[0] - legs[1])
    return None


def _three_squares(n: int):
    """(x, y, z) with x^2 + y^2 + z^2 = n; n must not be 4^a(8b+7).

    Scans x downward from isqrt(n) until the remainder is recognized as
    a two-square sum.  The remainders near the top of the scan are small
    and primes 1 mod 4 are dense among them, so the scan stops early.
    """
    scale = 1
    while n and n % 4 == 0:
        n //= 4
        scale *= 2
    if n % 8 == 7:
        raise ValueError("no three-square decomposition exists")
    for x in range(isqrt(n), -1, -1):
        two = _two_squares_or_none(n - x * x)
        if two is not None:
            return (scale * x, scale * two[0], scale * two[1])
    raise AssertionError("three-square scan exhausted on a valid input")


def _four_squares_large(n: int):
    """Four squares for n too big to factorize, by reserving one square
    so the rest avoids the 4^a(8b+7) obstruction, then a three-square
    scan.  Deterministic: fixed scan orders, no randomness."""
    scale = 1
    while n % 4 == 0:
        n //= 4
        scale *= 2
    if n % 8 == 7:
        d = isqrt(n)
        while (n - d * d) % 8 == 7:
            d -= 1
        parts = (d,) + _three_squares(n - d * d)
    else:
        parts = _three_squares(n) + (0,)
    return tuple(scale * v for v in parts)


def four_squares_integer(n: int) -> FourSquares:
    """Four integers whose squares sum to n exactly; n >= 0.

    Deterministic.  Desk-scale n is factorized, the largest square
    divisor is split off as a common scale, each remaining prime is
    decomposed by Euler descent, and the pieces are combined with the
    four-square product identity.  Larger n (certificate coefficients
    can reach hundreds of digits) skips factorization: reserve squares
    until a remainder is prime congruent to 1 mod 4, then split it by
    Hermite-Serret.  Both paths verify by construction.
    """
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError("four_squares_integer takes an int")
    if n < 0:
        raise ValueError("four_squares_integer requires n >= 0")
    if n == 0:
        return FourSquares(0, 0, 0, 0)
    if n >= _FACTOR_LIMIT:
        quat = _four_squares_large(n)
        scale = 1
    else:
        scale = 1
        quat = (1, 0, 0, 0)
        for p, e in sorted(_factorize(n).items()):
            scale *= p ** (e // 2)
            if e % 2:
                quat = _quat_mul(quat, _four_squares_prime(p))
    parts = sorted((abs(scale * v) for v in quat), reverse=True)
    result = FourSquares(*parts)
    if result.sum_squares() != n:
        raise AssertionError("four-square decomposition failed to re-sum")
    return result


def four_squares_rational(q) -> FourSquares:
    """Four rationals whose squares sum to q exactly; q >= 0.

    Uses a/b = ab/b^2: decompose the integer a*b, divide each part by b.
    Every part's denominator divides the denominator of q.
    """
    q = rat(q)
    if q < 0:
        raise ValueError("four_squares_rational requires q >= 0")
    a = int(q.numerator)
    b = int(q.denominator)
    ints = four_squares_integer(a * b)
    return FourSquares(*(rat(s, b) for s in ints))
