"""Symbolic matrices: arithmetic, determinants, minimal polynomials,
positivity screens, and the matrix file format.

Two kinds of oracle run throughout: sympy (determinants, charpoly,
minpoly) and the package's own independent dual routes (Bareiss vs
cofactor, squarefree-of-charpoly vs Krylov elimination), which the
rest of the pipeline is not allowed to collapse into one.
"""

import random

import pytest
import sympy

from matrixsos.errors import (
    DimensionMismatchError,
    EntriesNotPolynomialError,
    LemmaViolation,
    NotDiagonalizableError,
    ParseError,
)
from matrixsos.matrices import (
    MinPolyForm,
    SymbolicMatrix,
    charpoly,
    check_lemma_form,
    det_bareiss,
    det_cofactor,
    format_matrix_file,
    mat_poly_eval,
    minimal_polynomial,
    minimal_polynomial_krylov,
    parse_matrix_file,
    principal_minors,
    psd_sample_check,
)
from matrixsos.polynomials import Polynomial, VarSet, parse_poly
from matrixsos.rationals import rat
from matrixsos.ratfuncs import RationalFunction
from matrixsos.unipoly import UnivarPoly, upoly_squarefree_part

VS1 = VarSet(("x1",))
VS2 = VarSet(("x1", "x2"))


def random_poly(rng, varset, terms=2, degree=2, coeff=4):
    p = Polynomial.zero(varset)
    for _ in range(rng.randint(1, terms)):
        exps = tuple(rng.randint(0, degree) for _ in range(varset.v))
        p = p + Polynomial.monomial(varset, exps, rat(rng.randint(-coeff, coeff)))
    return p


def random_poly_matrix(rng, varset, n, symmetric=False, **kw):
    rows = [[random_poly(rng, varset, **kw) for _ in range(n)] for _ in range(n)]
    if symmetric:
        for i in range(n):
            for j in range(i):
                rows[i][j] = rows[j][i]
    return SymbolicMatrix(varset, rows)


def random_rational_matrix(rng, varset, n, symmetric=False, bound=5):
    rows = [
        [Polynomial.constant(varset, rat(rng.randint(-bound, bound))) for _ in range(n)]
        for _ in range(n)
    ]
    if symmetric:
        for i in range(n):
            for j in range(i):
                rows[i][j] = rows[j][i]
    return SymbolicMatrix(varset, rows)


def to_sympy_matrix(A, symbols):
    grid = A.polynomial_entries()
    rows = []
    for row in grid:
        out = []
        for p in row:
            expr = sympy.Integer(0)
            for key, coeff in p.terms.items():
                term = sympy.Rational(int(coeff.numerator), int(coeff.denominator))
                for s, e in zip(symbols, p.varset.unpack(key)):
                    term *= s**e
                expr += term
            out.append(expr)
        rows.append(out)
    return sympy.Matrix(rows)


class TestArithmetic:
    def test_ring_identities(self):
        rng = random.Random(50)
        for _ in range(20):
            n = rng.randint(1, 3)
            A = random_poly_matrix(rng, VS2, n)
            B = random_poly_matrix(rng, VS2, n)
            C = random_poly_matrix(rng, VS2, n)
            assert ((A + B) * C).equals(A * C + B * C)
            assert (A - A).is_zero()
            assert (A * SymbolicMatrix.identity(VS2, n)).equals(A)
            assert (A * B).transpose().equals(B.transpose() * A.transpose())
            assert (A * B).trace() == (B * A).trace()

    def test_pow(self):
        rng = random.Random(51)
        A = random_poly_matrix(rng, VS2, 3)
        assert A.pow(0).equals(SymbolicMatrix.identity(VS2, 3))
        assert A.pow(3).equals(A * A * A)

    def test_shape_mismatch(self):
        A = SymbolicMatrix.identity(VS2, 2)
        B = SymbolicMatrix.identity(VS2, 3)
        with pytest.raises(DimensionMismatchError):
            A + B
        with pytest.raises(DimensionMismatchError):
            A * B

    def test_eval_commutes_with_mul(self):
        rng = random.Random(52)
        for _ in range(10):
            A = random_poly_matrix(rng, VS2, 2)
            B = random_poly_matrix(rng, VS2, 2)
            pt = (rat(rng.randint(-4, 4)), rat(rng.randint(-4, 4)))
            left = (A * B).eval(pt)
            av, bv = A.eval(pt), B.eval(pt)
            for i in range(2):
                for j in range(2):
                    want = sum(av[i][k] * bv[k][j] for k in range(2))
                    assert left[i][j] == want

    def test_symmetry_predicate(self):
        sym = parse_matrix_file("vars: x1\ndim: 2\nentry 1 2: x1\n")
        assert sym.is_symmetric()
        asym = SymbolicMatrix(
            VS1,
            [
                [Polynomial.zero(VS1), parse_poly("x1", VS1)],
                [Polynomial.zero(VS1), Polynomial.zero(VS1)],
            ],
        )
        assert not asym.is_symmetric()

    def test_polynomial_entries_rejects_fractions(self):
        f = RationalFunction(parse_poly("1", VS1), parse_poly("x1^2 + 1", VS1))
        A = SymbolicMatrix(VS1, [[f]])
        with pytest.raises(EntriesNotPolynomialError):
            A.polynomial_entries()


class TestDeterminants:
    def test_bareiss_against_cofactor(self):
        rng = random.Random(53)
        for _ in range(60):
            n = rng.randint(1, 4)
            A = random_poly_matrix(rng, VS2, n, terms=2, degree=1, coeff=3)
            assert det_bareiss(A) == det_cofactor(A)

    def test_against_sympy(self):
        rng = random.Random(54)
        symbols = sympy.symbols("x1 x2")
        for _ in range(15):
            n = rng.randint(1, 3)
            A = random_poly_matrix(rng, VS2, n)
            want = sympy.expand(to_sympy_matrix(A, symbols).det())
            got = det_bareiss(A)
            expr = sympy.Integer(0)
            for key, coeff in got.terms.items():
                term = sympy.Rational(int(coeff.numerator), int(coeff.denominator))
                for s, e in zip(symbols, VS2.unpack(key)):
                    term *= s**e
                expr += term
            assert sympy.expand(expr) == want

    def test_multiplicativity(self):
        rng = random.Random(55)
        for _ in range(10):
            A = random_poly_matrix(rng, VS2, 3, degree=1)
            B = random_poly_matrix(rng, VS2, 3, degree=1)
            assert det_bareiss(A * B) == det_bareiss(A) * det_bareiss(B)

    def test_principal_minors(self):
        A = parse_matrix_file(
            "vars: x1 x2\ndim: 3\n"
            "entry 1 1: x1\nentry 2 2: x2\nentry 3 3: 1\n"
            "entry 1 2: 1\n"
        )
        minors = dict(principal_minors(A))
        assert len(minors) == 7
        assert minors[(1,)] == parse_poly("x1", VS2)
        assert minors[(1, 2)] == parse_poly("x1*x2 - 1", VS2)
        assert minors[(1, 2, 3)] == det_bareiss(A)
        assert minors[(2, 3)] == parse_poly("x2", VS2)


class TestCharpoly:
    def test_cayley_hamilton(self):
        rng = random.Random(56)
        for _ in range(25):
            n = rng.randint(1, 3)
            A = random_poly_matrix(rng, VS2, n, symmetric=True, degree=1)
            assert mat_poly_eval(charpoly(A), A).is_zero()

    def test_against_sympy(self):
        rng = random.Random(57)
        t = sympy.Symbol("lambda")
        for _ in range(20):
            n = rng.randint(1, 3)
            A = random_rational_matrix(rng, VS1, n)
            cp = charpoly(A)
            want = to_sympy_matrix(A, sympy.symbols("x1,")).charpoly(t)
            got = sum(
                sympy.Rational(
                    int(cp.coeff(i).as_polynomial().constant_value().numerator),
                    int(cp.coeff(i).as_polynomial().constant_value().denominator),
                )
                * t**i
                for i in range(cp.degree + 1)
            )
            assert sympy.expand(got - want.as_expr()) == 0

    def test_constant_term_is_signed_det(self):
        rng = random.Random(58)
        for _ in range(10):
            n = rng.randint(1, 3)
            A = random_poly_matrix(rng, VS2, n, degree=1)
            cp = charpoly(A)
            c0 = cp.coeff(0).as_polynomial()
            sign = -1 if n % 2 else 1
            assert c0.scale(sign) == det_bareiss(A)


class TestMinimalPolynomial:
    def test_two_routes_agree(self):
        rng = random.Random(59)
        for _ in range(30):
            n = rng.randint(1, 4)
            A = random_rational_matrix(rng, VS1, n, symmetric=True)
            via_charpoly = upoly_squarefree_part(charpoly(A))
            via_krylov = minimal_polynomial_krylov(A)
            if mat_poly_eval(via_charpoly, A).is_zero():
                assert via_charpoly.monic() == via_krylov.monic()

    def test_annihilates_and_matches_sympy(self):
        rng = random.Random(60)
        t = sympy.Symbol("t")
        for _ in range(15):
            n = rng.randint(1, 3)
            A = random_rational_matrix(rng, VS1, n, symmetric=True)
            mp = minimal_polynomial(A)
            rebuilt = mp.reconstruct()
            assert mat_poly_eval(rebuilt, A).is_zero()
            M = to_sympy_matrix(A, sympy.symbols("x1,"))
            want = sympy.Poly(M.charpoly(t).as_expr(), t)
            want = sympy.quo(want, sympy.gcd(want, want.diff(t)))
            got = sum(
                sympy.Rational(
                    int(rebuilt.coeff(i).as_polynomial().constant_value().numerator),
                    int(rebuilt.coeff(i).as_polynomial().constant_value().denominator),
                )
                * t**i
                for i in range(rebuilt.degree + 1)
            )
            assert sympy.expand(got - want.as_expr().as_poly(t).monic().as_expr()) == 0

    def test_repeated_eigenvalue_drops_degree(self):
        ones = [Polynomial.one(VS1)] * 2 + [Polynomial.constant(VS1, 2)]
        A = SymbolicMatrix.diagonal(VS1, ones)
        mp = minimal_polynomial(A)
        assert mp.d == 2
        # p(t) = (t - 1)(t - 2) = t^2 - 3t + 2: a = (2, 3, 1)
        assert mp.a[0] == parse_poly("2", VS1)
        assert mp.a[1] == parse_poly("3", VS1)
        assert mp.a[2] == parse_poly("1", VS1)

    def test_polynomial_entries_example(self):
        A = parse_matrix_file(
            "vars: x1 x2\ndim: 2\n"
            "entry 1 1: x1^2\nentry 2 2: x2^2\n"
        )
        mp = minimal_polynomial(A)
        assert mp.d == 2
        assert mp.a[1] == parse_poly("x1^2 + x2^2", VS2)
        assert mp.a[0] == parse_poly("x1^2*x2^2", VS2)

    def test_nondiagonalizable_rejected(self):
        A = SymbolicMatrix(
            VS1,
            [
                [Polynomial.zero(VS1), Polynomial.one(VS1)],
                [Polynomial.zero(VS1), Polynomial.zero(VS1)],
            ],
        )
        with pytest.raises(NotDiagonalizableError):
            minimal_polynomial(A)

    def test_form_validation(self):
        with pytest.raises(ValueError):
            MinPolyForm(VS1, 1, (Polynomial.one(VS1),))
        with pytest.raises(ValueError):
            MinPolyForm(
                VS1, 1, (Polynomial.one(VS1), Polynomial.constant(VS1, 2))
            )

    def test_horner_matches_direct_sum(self):
        rng = random.Random(61)
        for _ in range(10):
            A = random_poly_matrix(rng, VS2, 2, degree=1)
            f = UnivarPoly(VS2, [rat(rng.randint(-3, 3)) for _ in range(5)])
            direct = SymbolicMatrix.zeros(VS2, 2)
            for i in range(f.degree + 1):
                direct = direct + A.pow(i).scale(f.coeff(i))
            assert mat_poly_eval(f, A).equals(direct)


class TestLemmaScreen:
    def test_psd_polynomial_matrix_passes(self):
        A = parse_matrix_file(
            "vars: x1 x2\ndim: 2\n"
            "entry 1 1: x1^2\nentry 2 2: x2^2\n"
        )
        report = check_lemma_form(minimal_polynomial(A))
        assert report
        assert report.d == 2

    def test_zero_a1_is_hard_failure(self):
        # diag(x1^2, -x1^2) squares to x1^4 I, so p(t) = t^2 - x1^4
        diag = [parse_poly("x1^2", VS1), parse_poly("-x1^2", VS1)]
        A = SymbolicMatrix.diagonal(VS1, diag)
        mp = minimal_polynomial(A)
        with pytest.raises(LemmaViolation) as exc:
            check_lemma_form(mp)
        assert exc.value.index == 1

    def test_negative_sample_is_refutation(self):
        A = SymbolicMatrix.diagonal(VS1, [parse_poly("x1", VS1)])
        mp = minimal_polynomial(A)
        with pytest.raises(LemmaViolation) as exc:
            check_lemma_form(mp)
        assert exc.value.witness is not None
        assert exc.value.value < 0

    def test_deterministic_for_fixed_seed(self):
        A = SymbolicMatrix.diagonal(VS1, [parse_poly("x1", VS1)])
        mp = minimal_polynomial(A)
        seen = []
        for _ in range(2):
            try:
                check_lemma_form(mp, seed=7)
            except LemmaViolation as exc:
                seen.append((exc.witness, exc.value))
        assert seen[0] == seen[1]


class TestPSDSampleCheck:
    def test_gram_matrix_passes(self):
        rng = random.Random(62)
        C = random_poly_matrix(rng, VS2, 3, degree=1)
        report = psd_sample_check(C.transpose() * C)
        assert report
        assert report.witness is None

    def test_indefinite_matrix_refuted(self):
        A = SymbolicMatrix.diagonal(VS1, [parse_poly("x1", VS1)])
        report = psd_sample_check(A)
        assert not report
        assert report.minor_indices == (1,)
        assert report.value < 0
        grid = A.polynomial_entries()
        assert grid[0][0].eval(report.witness) == report.value

    def test_off_diagonal_refutation(self):
        # eigenvalues 1 and -1: every 1x1 minor looks fine
        A = parse_matrix_file("vars: x1\ndim: 2\nentry 1 2: 1\n")
        report = psd_sample_check(A)
        assert not report
        assert report.minor_indices == (1, 2)


class TestMatrixFiles:
    def test_round_trip_random(self):
        rng = random.Random(63)
        for _ in range(20):
            n = rng.randint(1, 4)
            A = random_poly_matrix(rng, VS2, n, symmetric=True)
            back = parse_matrix_file(format_matrix_file(A))
            assert back.equals(A)
            assert back.varset == A.varset

    def test_defaults_comments_and_order(self):
        text = (
            "# comment\n"
            "vars: x1 x2\n"
            "\n"
            "dim: 2\n"
            "entry 2 2: x2\n"
            "# another\n"
            "entry 1 2: x1 + 1\n"
        )
        A = parse_matrix_file(text)
        grid = A.polynomial_entries()
        assert grid[0][0].is_zero()
        assert grid[0][1] == parse_poly("x1 + 1", VS2)
        assert grid[1][0] == grid[0][1]
        assert grid[1][1] == parse_poly("x2", VS2)

    def test_parse_errors(self):
        cases = [
            ("dim: 2\nentry 1 1: 1\n", "vars"),
            ("vars: x1\nentry 1 1: 1\n", "dim"),
            ("vars: x1\ndim: 2\nentry 1 3: 1\n", "range"),
            ("vars: x1\ndim: 2\nentry 1 2: 1\nentry 2 1: 1\n", "more than once"),
            ("vars: x1\ndim: 2\nentry 1 1: x2\n", "expression"),
            ("vars: x1\ndim: 0\n", "positive"),
            ("vars: x1\ndim: 2\nnonsense\n", "unrecognized"),
            ("vars: x1\nvars: x1\ndim: 1\n", "duplicate"),
        ]
        for text, needle in cases:
            with pytest.raises(ParseError) as exc:
                parse_matrix_file(text)
            assert needle in str(exc.value)

    def test_line_numbers_reported(self):
        with pytest.raises(ParseError) as exc:
            parse_matrix_file("vars: x1\ndim: 1\nentry 1 1: ^\n")
        assert exc.value.line == 3
