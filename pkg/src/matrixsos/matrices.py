"""Symmetric matrices over the rational-function field.

Determinants and principal minors run fraction-free (Bareiss) over the
polynomial ring, with plain cofactor expansion kept as an independent
oracle.  The characteristic polynomial comes from Faddeev-LeVerrier,
whose only divisions are by integers and therefore exact over the
rationals.  The minimal polynomial is computed as the squarefree part
of the characteristic polynomial, verified by substitution, with an
exact Krylov elimination as fallback and as a second, independent
route for tests.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .errors import (
    DimensionMismatchError,
    EntriesNotPolynomialError,
    ExactDivisionError,
    LemmaViolation,
    NotDiagonalizableError,
    ParseError,
)
from .polynomials import Polynomial, VarSet, exact_div, parse_poly, print_poly
from .rationals import BigRat, rat
from .ratfuncs import RationalFunction
from .unipoly import UnivarPoly, upoly_gcd, upoly_squarefree_part


def _coerce_entry(value, varset: VarSet) -> RationalFunction:
    if isinstance(value, RationalFunction):
        if value.varset != varset:
            raise DimensionMismatchError("mixed variable sets")
        return value
    if isinstance(value, Polynomial):
        return RationalFunction(value)
    return RationalFunction.constant(varset, value)


class SymbolicMatrix:
    """Square matrix of RationalFunction entries; immutable by convention."""

    __slots__ = ("varset", "n", "rows")

    def __init__(self, varset: VarSet, rows):
        rows = tuple(
            tuple(_coerce_entry(value, varset) for value in row) for row in rows
        )
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise DimensionMismatchError("matrix is not square")
        self.varset = varset
        self.n = n
        self.rows = rows

    @classmethod
    def identity(cls, varset: VarSet, n: int) -> "SymbolicMatrix":
        return cls(varset, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, varset: VarSet, n: int) -> "SymbolicMatrix":
        return cls(varset, [[0] * n for _ in range(n)])

    @classmethod
    def diagonal(cls, varset: VarSet, values) -> "SymbolicMatrix":
        values = list(values)
        n = len(values)
        return cls(
            varset, [[values[i] if i == j else 0 for j in range(n)] for i in range(n)]
        )

    def entry(self, i: int, j: int) -> RationalFunction:
        return self.rows[i][j]

    def _check_same_shape(self, other):
        if not isinstance(other, SymbolicMatrix):
            raise DimensionMismatchError("expected a matrix")
        if self.varset != other.varset or self.n != other.n:
            raise DimensionMismatchError("matrix dimensions or variable sets differ")

    def __add__(self, other):
        self._check_same_shape(other)
        return SymbolicMatrix(
            self.varset,
            [
                [a + b for a, b in zip(row_a, row_b)]
                for row_a, row_b in zip(self.rows, other.rows)
            ],
        )

    def __sub__(self, other):
        self._check_same_shape(other)
        return SymbolicMatrix(
            self.varset,
            [
                [a - b for a, b in zip(row_a, row_b)]
                for row_a, row_b in zip(self.rows, other.rows)
            ],
        )

    def __neg__(self):
        return SymbolicMatrix(
            self.varset, [[-a for a in row] for row in self.rows]
        )

    def scale(self, value) -> "SymbolicMatrix":
        value = _coerce_entry(value, self.varset)
        return SymbolicMatrix(
            self.varset, [[a * value for a in row] for row in self.rows]
        )

    def __mul__(self, other):
        if isinstance(other, (int, BigRat, Polynomial, RationalFunction)):
            return self.scale(other)
        self._check_same_shape(other)
        n = self.n
        cols = list(zip(*other.rows))
        out = []
        for row in self.rows:
            out_row = []
            for col in cols:
                acc = row[0] * col[0]
                for k in range(1, n):
                    acc = acc + row[k] * col[k]
                out_row.append(acc)
            out.append(out_row)
        return SymbolicMatrix(self.varset, out)

    def __rmul__(self, other):
        if isinstance(other, (int, BigRat, Polynomial, RationalFunction)):
            return self.scale(other)
        return NotImplemented

    def pow(self, k: int) -> "SymbolicMatrix":
        if not isinstance(k, int) or k < 0:
            raise ValueError("matrix powers take a nonnegative integer")
        result = SymbolicMatrix.identity(self.varset, self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def transpose(self) -> "SymbolicMatrix":
        return SymbolicMatrix(self.varset, list(zip(*self.rows)))

    def trace(self) -> RationalFunction:
        acc = RationalFunction.zero(self.varset)
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return acc

    def is_symmetric(self) -> bool:
        return all(
            self.rows[i][j] == self.rows[j][i]
            for i in range(self.n)
            for j in range(i + 1, self.n)
        )

    def is_zero(self) -> bool:
        return all(a.is_zero() for row in self.rows for a in row)

    def equals(self, other) -> bool:
        """Entry-wise mathematical equality (cross-multiplication)."""
        if not isinstance(other, SymbolicMatrix):
            return False
        if self.varset != other.varset or self.n != other.n:
            return False
        return all(
            a == b for row_a, row_b in zip(self.rows, other.rows)
            for a, b in zip(row_a, row_b)
        )

    def polynomial_entries(self):
        """Entries as Polynomials; rejects nontrivial denominators."""
        out = []
        for row in self.rows:
            out_row = []
            for a in row:
                try:
                    out_row.append(a.as_polynomial())
                except ExactDivisionError:
                    raise EntriesNotPolynomialError(
                        "matrix entry has a nontrivial denominator"
                    ) from None
            out.append(out_row)
        return out

    def eval(self, point):
        """Numeric matrix (list of lists of BigRat) at an exact point."""
        return [[a.eval(point) for a in row] for row in self.rows]

    def __repr__(self):
        return f"SymbolicMatrix(n={self.n}, vars={list(self.varset.names)})"


def mat_add(a: SymbolicMatrix, b: SymbolicMatrix) -> SymbolicMatrix:
    return a + b


def mat_mul(a: SymbolicMatrix, b: SymbolicMatrix) -> SymbolicMatrix:
    return a * b


def mat_scalar_mul(a: SymbolicMatrix, value) -> SymbolicMatrix:
    return a.scale(value)


def mat_pow(a: SymbolicMatrix, k: int) -> SymbolicMatrix:
    return a.pow(k)


def mat_poly_eval(f: UnivarPoly, A: SymbolicMatrix) -> SymbolicMatrix:
    """f(A) by Horner's rule."""
    if f.varset != A.varset:
        raise DimensionMismatchError("mixed variable sets")
    result = SymbolicMatrix.zeros(A.varset, A.n)
    identity = SymbolicMatrix.identity(A.varset, A.n)
    for c in reversed(f.coeffs):
        result = result * A + identity.scale(c)
    return result


# determinants and minors


def _det_bareiss_grid(grid, varset: VarSet) -> Polynomial:
    n = len(grid)
    if n == 0:
        return Polynomial.one(varset)
    sign = 1
    prev = Polynomial.one(varset)
    for k in range(n - 1):
        if grid[k][k].is_zero():
            for r in range(k + 1, n):
                if not grid[r][k].is_zero():
                    grid[k], grid[r] = grid[r], grid[k]
                    sign = -sign
                    break
            else:
                return Polynomial.zero(varset)
        pivot = grid[k][k]
        for i in range(k + 1, n):
            row_i = grid[i]
            for j in range(k + 1, n):
                value = row_i[j] * pivot - row_i[k] * grid[k][j]
                # Bareiss: the previous pivot divides exactly
                row_i[j] = exact_div(value, prev)
            row_i[k] = Polynomial.zero(varset)
        prev = pivot
    det = grid[n - 1][n - 1]
    return -det if sign < 0 else det


def det_bareiss(A: SymbolicMatrix) -> Polynomial:
    """Fraction-free determinant of a polynomial matrix."""
    grid = [list(row) for row in A.polynomial_entries()]
    return _det_bareiss_grid(grid, A.varset)


def _det_cofactor_grid(grid, varset: VarSet) -> Polynomial:
    n = len(grid)
    if n == 0:
        return Polynomial.one(varset)
    if n == 1:
        return grid[0][0]
    total = Polynomial.zero(varset)
    for j in range(n):
        a = grid[0][j]
        if a.is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in grid[1:]]
        term = a * _det_cofactor_grid(minor, varset)
        total = total - term if j % 2 else total + term
    return total


def det_cofactor(A: SymbolicMatrix) -> Polynomial:
    """First-row cofactor expansion; independent oracle for det_bareiss."""
    grid = [list(row) for row in A.polynomial_entries()]
    return _det_cofactor_grid(grid, A.varset)


def principal_minors(A: SymbolicMatrix):
    """All 2^n - 1 nonempty principal minors as expanded polynomials.

    Returned as (index tuple, Polynomial) with 1-based indices, ordered
    by subset size then lexicographically.
    """
    grid = A.polynomial_entries()
    out = []
    for size in range(1, A.n + 1):
        for subset in itertools.combinations(range(A.n), size):
            sub = [[grid[i][j] for j in subset] for i in subset]
            det = _det_bareiss_grid([row[:] for row in sub], A.varset)
            out.append((tuple(i + 1 for i in subset), det))
    return out


# characteristic and minimal polynomials


def charpoly(A: SymbolicMatrix) -> UnivarPoly:
    """Monic characteristic polynomial det(tI - A) by Faddeev-LeVerrier."""
    n = A.n
    varset = A.varset
    identity = SymbolicMatrix.identity(varset, n)
    coeffs_desc = [RationalFunction.one(varset)]
    current = identity
    for k in range(1, n + 1):
        product = A * current
        c_k = -(product.trace() / k)
        coeffs_desc.append(c_k)
        if k < n:
            current = product + identity.scale(c_k)
    return UnivarPoly(varset, list(reversed(coeffs_desc)))


def minimal_polynomial_krylov(A: SymbolicMatrix) -> UnivarPoly:
    """Least-degree monic annihilator, by exact elimination on I, A, A^2, ...

    Independent of the characteristic polynomial entirely; used as a
    fallback and as a cross-check oracle.
    """
    varset = A.varset
    n = A.n
    zero = RationalFunction.zero(varset)
    basis = []  # (reduced vector, pivot index, combination over powers)
    current = SymbolicMatrix.identity(varset, n)
    for k in range(n + 1):
        vec = [a for row in current.rows for a in row]
        combo = [zero] * k + [RationalFunction.one(varset)]
        for bvec, pivot, bcombo in basis:
            c = vec[pivot]
            if not c.is_zero():
                vec = [x - c * y for x, y in zip(vec, bvec)]
                for i, y in enumerate(bcombo):
                    combo[i] = combo[i] - c * y
        pivot = next((i for i, x in enumerate(vec) if not x.is_zero()), None)
        if pivot is None:
            return UnivarPoly(varset, combo)
        inv = vec[pivot].inv()
        vec = [x * inv for x in vec]
        combo = [x * inv for x in combo]
        basis.append((vec, pivot, combo))
        current = current * A
    raise AssertionError("a dependence must appear by degree n")


@dataclass(frozen=True)
class MinPolyForm:
    """Minimal polynomial presented as p(t) = sum (-1)^(d-i) a_i t^i.

    The alternating-sign presentation pins the normalization: a_d = 1,
    and for matrices that are positive semidefinite everywhere, every
    a_i is a sum of squares.
    """

    varset: VarSet
    d: int
    a: tuple

    def __post_init__(self):
        if len(self.a) != self.d + 1:
            raise ValueError("need exactly d+1 coefficients")
        if self.a[self.d] != 1:
            raise ValueError("a_d must be 1 (monic)")

    def reconstruct(self) -> UnivarPoly:
        coeffs = []
        for i, a_i in enumerate(self.a):
            sign = -1 if (self.d - i) % 2 else 1
            coeffs.append(a_i.scale(sign) if sign < 0 else a_i)
        return UnivarPoly(self.varset, coeffs)


def _to_min_poly_form(m: UnivarPoly) -> MinPolyForm:
    d = m.degree
    coeffs = []
    for i in range(d + 1):
        c = m.coeff(i)
        try:
            p = c.as_polynomial()
        except ExactDivisionError:
            raise EntriesNotPolynomialError(
                "minimal-polynomial coefficient is not a polynomial"
            ) from None
        if (d - i) % 2:
            p = -p
        coeffs.append(p)
    return MinPolyForm(m.varset, d, tuple(coeffs))


def minimal_polynomial(A: SymbolicMatrix) -> MinPolyForm:
    """Minimal polynomial of A in alternating-sign form.

    Strategy: squarefree part of the characteristic polynomial, verified
    by substituting A; on failure, the Krylov route computes the true
    minimal polynomial, and a repeated root there means A is not
    diagonalizable, so no sum-of-squares certificate can exist.
    Symmetry of A is the caller's precondition and is not checked here.
    """
    cp = charpoly(A)
    m = upoly_squarefree_part(cp)
    if not mat_poly_eval(m, A).is_zero():
        m = minimal_polynomial_krylov(A)
        g = upoly_gcd(m, m.derivative())
        if g.degree > 0:
            raise NotDiagonalizableError(
                "minimal polynomial has a repeated root; "
                "the matrix is not diagonalizable"
            )
        if not mat_poly_eval(m, A).is_zero():
            raise AssertionError("Krylov minimal polynomial must annihilate A")
    return _to_min_poly_form(m.monic())


# hypothesis checks


@dataclass(frozen=True)
class LemmaReport:
    ok: bool
    d: int
    samples: int

    def __bool__(self):
        return self.ok


def check_lemma_form(mp: MinPolyForm, samples: int = 20, seed: int = 0) -> LemmaReport:
    """Necessary-condition screen on the alternating-sign coefficients.

    a_1 = 0 (equivalently t^2 dividing p when a_0 = 0 too) is a hard
    failure.  Each a_i is then sampled at random rational points; any
    negative value refutes the sum-of-squares hypothesis definitively.
    """
    if mp.d >= 1 and mp.a[1].is_zero():
        if mp.a[0].is_zero():
            raise LemmaViolation(
                "t^2 divides the minimal polynomial (a_0 = a_1 = 0)", index=1
            )
        raise LemmaViolation("coefficient a_1 is zero", index=1)
    rnd = random.Random(seed)
    v = mp.varset.v
    for _ in range(samples):
        point = tuple(
            rat(rnd.randint(-10, 10), rnd.randint(1, 10)) for _ in range(v)
        )
        for i, a_i in enumerate(mp.a):
            value = a_i.eval(point)
            if value < 0:
                raise LemmaViolation(
                    f"coefficient a_{i} is negative at {point}",
                    index=i,
                    witness=point,
                    value=value,
                )
    return LemmaReport(ok=True, d=mp.d, samples=samples)


@dataclass(frozen=True)
class PSDReport:
    passed: bool
    samples: int
    witness: tuple = None
    minor_indices: tuple = None
    value: object = None

    def __bool__(self):
        return self.passed


def _numeric_det(grid) -> BigRat:
    n = len(grid)
    if n == 1:
        return grid[0][0]
    if n == 2:
        return grid[0][0] * grid[1][1] - grid[0][1] * grid[1][0]
    total = rat(0)
    for j in range(n):
        a = grid[0][j]
        if a == 0:
            continue
        minor = [row[:j] + row[j + 1:] for row in grid[1:]]
        term = a * _numeric_det(minor)
        total = total - term if j % 2 else total + term
    return total


def psd_sample_check(A: SymbolicMatrix, samples: int = 100, seed: int = 0) -> PSDReport:
    """Sampling screen: exact principal minors at seeded random points.

    A negative minor is a definitive refutation of positive
    semidefiniteness; passing is evidence only.
    """
    grid = A.polynomial_entries()
    n = A.n
    rnd = random.Random(seed)
    v = A.varset.v
    subsets = [
        subset
        for size in range(1, n + 1)
        for subset in itertools.combinations(range(n), size)
    ]
    for _ in range(samples):
        point = tuple(
            rat(rnd.randint(-10, 10), rnd.randint(1, 10)) for _ in range(v)
        )
        values = [[entry.eval(point) for entry in row] for row in grid]
        for subset in subsets:
            sub = [[values[i][j] for j in subset] for i in subset]
            det = _numeric_det(sub)
            if det < 0:
                return PSDReport(
                    passed=False,
                    samples=samples,
                    witness=point,
                    minor_indices=tuple(i + 1 for i in subset),
                    value=det,
                )
    return PSDReport(passed=True, samples=samples)


# matrix input files


def parse_matrix_file(text: str) -> SymbolicMatrix:
    """Parse the matrix file format.

    Header lines `vars: x1 x2 ...` and `dim: n`, then `entry i j: <expr>`
    for the upper triangle (1-based; the lower triangle is filled by
    symmetry, and giving a cell twice in any orientation is an error).
    Unlisted entries default to zero.  Blank lines and lines starting
    with '#' are ignored.
    """
    varset = None
    dim = None
    cells = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("vars:"):
            if varset is not None:
                raise ParseError("duplicate vars: line", line=lineno)
            names = line[len("vars:"):].split()
            try:
                varset = VarSet(names)
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
            continue
        if line.startswith("dim:"):
            if dim is not None:
                raise ParseError("duplicate dim: line", line=lineno)
            body = line[len("dim:"):].strip()
            if not body.isdigit() or int(body) < 1:
                raise ParseError("dim: takes a positive integer", line=lineno)
            dim = int(body)
            continue
        if line.startswith("entry"):
            if varset is None or dim is None:
                raise ParseError(
                    "vars: and dim: must come before entries", line=lineno
                )
            head, sep, expr = line.partition(":")
            if not sep:
                raise ParseError("entry line is missing ':'", line=lineno)
            parts = head.split()
            if len(parts) != 3 or not parts[1].isdigit() or not parts[2].isdigit():
                raise ParseError(
                    "entry lines look like 'entry i j: <expression>'", line=lineno
                )
            i, j = int(parts[1]), int(parts[2])
            if not (1 <= i <= dim and 1 <= j <= dim):
                raise ParseError(
                    f"entry indices out of range 1..{dim}", line=lineno
                )
            cell = (min(i, j), max(i, j))
            if cell in cells:
                raise ParseError(
                    f"entry {cell[0]} {cell[1]} given more than once", line=lineno
                )
            try:
                cells[cell] = parse_poly(expr, varset)
            except ParseError as exc:
                raise ParseError(f"bad expression: {exc}", line=lineno) from None
            continue
        raise ParseError(f"unrecognized line: {line!r}", line=lineno)
    if varset is None:
        raise ParseError("missing vars: line")
    if dim is None:
        raise ParseError("missing dim: line")
    zero = Polynomial.zero(varset)
    rows = [
        [cells.get((min(i, j) + 1, max(i, j) + 1), zero) for j in range(dim)]
        for i in range(dim)
    ]
    return SymbolicMatrix(varset, rows)


def format_matrix_file(A: SymbolicMatrix) -> str:
    """Inverse of parse_matrix_file for polynomial matrices."""
    grid = A.polynomial_entries()
    lines = [f"vars: {' '.join(A.varset.names)}", f"dim: {A.n}"]
    for i in range(A.n):
        for j in range(i, A.n):
            if not grid[i][j].is_zero():
                lines.append(f"entry {i + 1} {j + 1}: {print_poly(grid[i][j])}")
    return "\n".join(lines) + "\n"
