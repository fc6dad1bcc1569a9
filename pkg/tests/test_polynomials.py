"""Sparse multivariate polynomials: arithmetic, parsing, division, gcd.

Random identities are checked against sympy as an independent oracle
where one exists; structural properties (exact division, canonical
printing) are checked by construction.
"""

import random

import pytest
import sympy

from matrixsos.errors import DimensionMismatchError, ExactDivisionError, ParseError
from matrixsos.polynomials import (
    DEGREE_LIMIT,
    Polynomial,
    VarSet,
    divides,
    exact_div,
    heuristic_gcd,
    integer_primitive,
    parse_poly,
    poly_eval,
    poly_partial,
    poly_square_root,
    print_poly,
)
from matrixsos.rationals import rat

VS2 = VarSet(("x1", "x2"))
VS3 = VarSet(("x1", "x2", "x3"))


def random_poly(rng, varset, terms=4, degree=3, coeff=9):
    p = Polynomial.zero(varset)
    for _ in range(rng.randint(1, terms)):
        exps = tuple(rng.randint(0, degree) for _ in range(varset.v))
        p = p + Polynomial.monomial(varset, exps, rat(rng.randint(-coeff, coeff)))
    return p


def to_sympy(p, symbols):
    expr = sympy.Integer(0)
    for key, coeff in p.terms.items():
        exps = p.varset.unpack(key)
        term = sympy.Rational(int(coeff.numerator), int(coeff.denominator))
        for s, e in zip(symbols, exps):
            term *= s**e
        expr += term
    return sympy.expand(expr)


class TestVarSet:
    def test_pack_unpack_round_trip(self):
        rng = random.Random(0)
        for _ in range(200):
            exps = tuple(rng.randint(0, 50) for _ in range(3))
            assert VS3.unpack(VS3.pack(exps)) == exps

    def test_pack_rejects_wrong_arity(self):
        with pytest.raises(DimensionMismatchError):
            VS2.pack((1, 2, 3))

    def test_exponent_range(self):
        with pytest.raises(OverflowError):
            VS2.pack((DEGREE_LIMIT, 0))
        with pytest.raises(OverflowError):
            VS2.pack((-1, 0))

    def test_duplicate_names_rejected(self):
        with pytest.raises(ValueError):
            VarSet(("x", "x"))


class TestArithmetic:
    def test_ring_identities_random(self):
        rng = random.Random(1)
        for _ in range(100):
            a = random_poly(rng, VS2)
            b = random_poly(rng, VS2)
            c = random_poly(rng, VS2)
            assert a + b == b + a
            assert (a + b) + c == a + (b + c)
            assert a * (b + c) == a * b + a * c
            assert a - a == Polynomial.zero(VS2)
            assert a * Polynomial.one(VS2) == a

    def test_multiplication_against_sympy(self):
        rng = random.Random(2)
        symbols = sympy.symbols("x1 x2 x3")
        for _ in range(50):
            a = random_poly(rng, VS3)
            b = random_poly(rng, VS3)
            want = sympy.expand(to_sympy(a, symbols) * to_sympy(b, symbols))
            assert to_sympy(a * b, symbols) == want

    def test_pow(self):
        rng = random.Random(3)
        for _ in range(20):
            a = random_poly(rng, VS2, terms=3, degree=2)
            assert a**3 == a * a * a
        assert random_poly(rng, VS2) ** 0 == Polynomial.one(VS2)

    def test_eval_against_sympy(self):
        rng = random.Random(4)
        symbols = sympy.symbols("x1 x2 x3")
        for _ in range(50):
            p = random_poly(rng, VS3)
            point = tuple(rat(rng.randint(-5, 5), rng.randint(1, 5)) for _ in range(3))
            got = poly_eval(p, point)
            want = to_sympy(p, symbols).subs(
                {
                    s: sympy.Rational(int(c.numerator), int(c.denominator))
                    for s, c in zip(symbols, point)
                }
            )
            assert sympy.Rational(int(got.numerator), int(got.denominator)) == want

    def test_degree_views(self):
        p = parse_poly("x1^3*x2 + x2^2 + 5", VS2)
        assert p.total_degree() == 4
        assert p.degree_in(0) == 3
        assert p.degree_in(1) == 2

    def test_mixed_varsets_rejected(self):
        with pytest.raises(DimensionMismatchError):
            Polynomial.one(VS2) + Polynomial.one(VS3)


class TestPartial:
    def test_product_rule_random(self):
        rng = random.Random(5)
        for _ in range(60):
            f = random_poly(rng, VS3)
            g = random_poly(rng, VS3)
            for i in range(3):
                lhs = poly_partial(f * g, i)
                rhs = poly_partial(f, i) * g + f * poly_partial(g, i)
                assert lhs == rhs

    def test_against_sympy(self):
        rng = random.Random(6)
        symbols = sympy.symbols("x1 x2")
        for _ in range(30):
            f = random_poly(rng, VS2)
            for i in range(2):
                got = to_sympy(poly_partial(f, i), symbols)
                assert got == sympy.diff(to_sympy(f, symbols), symbols[i])

    def test_constant_and_range(self):
        assert poly_partial(Polynomial.constant(VS2, 7), 0).is_zero()
        with pytest.raises(DimensionMismatchError):
            poly_partial(Polynomial.one(VS2), 2)


class TestParsePrint:
    def test_round_trip_random(self):
        rng = random.Random(7)
        for _ in range(200):
            p = random_poly(rng, VS3, terms=6, degree=4)
            assert parse_poly(print_poly(p), VS3) == p

    def test_print_is_canonical(self):
        a = parse_poly("x1 + x2^2 - 3", VS2)
        b = parse_poly("-3 + x2^2 + x1", VS2)
        assert print_poly(a) == print_poly(b)

    def test_rational_coefficients(self):
        p = parse_poly("1/2*x1^2 - 2/3", VS2)
        assert p.terms[VS2.pack((2, 0))] == rat(1, 2)

    def test_parse_errors(self):
        for bad in ("x1 +", "1 ** 2", "y1", "x1^", "(x1", "x1^-2"):
            with pytest.raises(ParseError):
                parse_poly(bad, VS2)

    def test_zero_prints_as_zero(self):
        assert print_poly(Polynomial.zero(VS2)) == "0"
        assert parse_poly("0", VS2).is_zero()


class TestDivision:
    def test_exact_div_round_trip(self):
        rng = random.Random(8)
        for _ in range(60):
            a = random_poly(rng, VS2)
            b = random_poly(rng, VS2)
            if b.is_zero():
                continue
            assert exact_div(a * b, b) == a

    def test_non_divisor_raises(self):
        a = parse_poly("x1^2 + 1", VS2)
        b = parse_poly("x1 + 1", VS2)
        with pytest.raises(ExactDivisionError):
            exact_div(a, b)
        assert not divides(b, a)
        assert divides(b, b * a)

    def test_square_root(self):
        rng = random.Random(9)
        hits = 0
        for _ in range(40):
            p = random_poly(rng, VS2, terms=3, degree=2)
            if p.is_zero():
                continue
            # the routine expects its input monic in the leading term
            p = p.scale(1 / p.leading_coeff())
            root = poly_square_root(p * p)
            assert root is not None
            assert root * root == p * p
            hits += 1
        assert hits > 30
        assert poly_square_root(parse_poly("x1^2 + 1", VS2)) is None
        assert poly_square_root(parse_poly("-x1^2", VS2)) is None


class TestGcdAndContent:
    def test_heuristic_gcd_recovers_common_factor(self):
        rng = random.Random(10)
        for _ in range(40):
            a = random_poly(rng, VS2, terms=3, degree=2)
            b = random_poly(rng, VS2, terms=3, degree=2)
            c = random_poly(rng, VS2, terms=3, degree=2)
            if a.is_zero() or b.is_zero() or c.is_zero():
                continue
            g = heuristic_gcd(a * c, b * c)
            # the result always divides both inputs exactly
            assert divides(g, a * c)
            assert divides(g, b * c)

    def test_gcd_against_sympy(self):
        # the heuristic may return a proper divisor of the true gcd, but
        # never anything larger, and it should find the full gcd on the
        # bulk of easy inputs
        rng = random.Random(11)
        symbols = sympy.symbols("x1 x2")
        exact = 0
        trials = 0
        for _ in range(30):
            a = random_poly(rng, VS2, terms=3, degree=2)
            b = random_poly(rng, VS2, terms=2, degree=2)
            c = random_poly(rng, VS2, terms=2, degree=2)
            if a.is_zero() or b.is_zero() or c.is_zero():
                continue
            trials += 1
            g = heuristic_gcd(a * c, b * c)
            want = sympy.gcd(to_sympy(a * c, symbols), to_sympy(b * c, symbols))
            got = to_sympy(g, symbols)
            _, rem = sympy.div(want, got, *symbols)
            assert rem == 0
            if sympy.simplify(want / got).is_Rational:
                exact += 1
        assert trials >= 20
        assert exact >= trials * 3 // 4

    def test_integer_primitive(self):
        p = parse_poly("4*x1^2 + 6*x2", VS2)
        content, prim = integer_primitive(p)
        assert content == 2
        assert prim == parse_poly("2*x1^2 + 3*x2", VS2)
        assert prim.scale(content) == p
