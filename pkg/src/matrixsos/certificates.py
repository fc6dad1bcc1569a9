"""Matrix sum-of-squares certificates built from the minimal polynomial.

For a symmetric matrix A of polynomials, positive semidefinite wherever
it is defined, write the minimal polynomial in alternating-sign form
p(t) = sum_i (-1)^(d-i) a_i t^i.  Splitting by index parity gives
univariate b and r with b(t)*t - r(t) = (-1)^(d+1) p(t), so B = b(A)
satisfies B*A = r(A), and a_1 != 0 makes B invertible with inverse q(A)
for a polynomial q.  Expanding B through the split turns scalar
sum-of-squares certificates for the a_i into the matrix identity

    A = sum over odd i, even j of a_i * a_j * (q(A) * A^((i-1+j)/2))^2

whose terms, after folding in the scalar squares, are the emitted
matrix squares.  Every square is a polynomial in A, hence symmetric and
commuting with A and with each other.  All arithmetic is exact and the
certificate is re-verified symbolically before it is returned.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace

from .errors import (
    DimensionMismatchError,
    LemmaViolation,
    MissingScalarCertError,
    NotCoprimeError,
    NotPSDError,
    NotSymmetricError,
    ParseError,
    ScalarSOSUnavailable,
    VerificationFailedError,
)
from .matrices import (
    MinPolyForm,
    SymbolicMatrix,
    check_lemma_form,
    mat_poly_eval,
    minimal_polynomial,
    psd_sample_check,
)
from .polynomials import Polynomial, VarSet, parse_poly, print_poly
from .ratfuncs import RationalFunction
from .scalar_sos import CertStore, ScalarSOSCert, scalar_sos_pipeline
from .unipoly import UnivarPoly, upoly_ext_euclid

CERT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class EvenOddSplit:
    """Minimal polynomial split by coefficient-index parity.

    b(t) collects the odd-index coefficients shifted down one power, so
    that b(A)*A = r(A); r(t) collects the even-index ones.  Both are
    polynomials in t^2, and the constant term of b is a_1.
    """

    b: UnivarPoly
    r: UnivarPoly


def split_even_odd(mp: MinPolyForm) -> EvenOddSplit:
    """Parity split with the defining identity verified symbolically."""
    if mp.a[1].is_zero():
        raise LemmaViolation(
            "coefficient a_1 is zero, so the parity split has no invertible b",
            index=1,
        )
    varset = mp.varset
    zero = Polynomial.zero(varset)
    b = UnivarPoly(varset, [mp.a[k + 1] if k % 2 == 0 else zero for k in range(mp.d)])
    r = UnivarPoly(varset, [mp.a[k] if k % 2 == 0 else zero for k in range(mp.d + 1)])
    t = UnivarPoly.t_power(varset, 1)
    sign = 1 if mp.d % 2 == 1 else -1
    if not (b * t - r) == mp.reconstruct().scale(sign):
        raise AssertionError("parity split failed to reproduce the minimal polynomial")
    return EvenOddSplit(b=b, r=r)


def invert_b_mod_p(split: EvenOddSplit, mp: MinPolyForm) -> UnivarPoly:
    """q of degree < d with q*b = 1 modulo p, so q(A) = b(A)^(-1).

    Realizing the inverse as a polynomial in A keeps every later square
    symmetric and commuting.  A nonconstant gcd(b, p) contradicts the
    coefficient nonnegativity that positive semidefiniteness forces, so
    it is reported as evidence about the input rather than a bug.
    """
    p = mp.reconstruct()
    g, u, _ = upoly_ext_euclid(split.b, p)
    if g.degree != 0:
        raise NotCoprimeError(
            "b(t) shares a factor with the minimal polynomial; "
            "the input matrix cannot be positive semidefinite"
        )
    q = u % p
    if not (q * split.b) % p == UnivarPoly.one(mp.varset):
        raise AssertionError("modular inverse failed its defining identity")
    return q


@dataclass(frozen=True)
class MatrixSOSCert:
    """A = sum of squares of the listed symmetric matrices.

    scalar_certs maps each nonzero minimal-polynomial coefficient index
    to the scalar certificate folded into the squares; provenance holds
    provider tags and timing and takes no part in verification.
    """

    dim: int
    varset: VarSet
    squares: tuple
    minpoly: MinPolyForm
    scalar_certs: dict
    square_count: int
    provenance: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MatrixCertReport:
    """Outcome of verify_matrix_cert; falsy when any check failed."""

    ok: bool
    failures: tuple = ()

    def __bool__(self):
        return self.ok


def build_squares(
    A: SymbolicMatrix,
    mp: MinPolyForm,
    split: EvenOddSplit,
    scalar_certs: dict,
) -> MatrixSOSCert:
    """Fold scalar certificates into matrix squares summing to A.

    For every odd i and even j with nonzero coefficients and every pair
    of scalar squares s from cert(a_i) and u from cert(a_j), emits
    M = s*u*q(A)*A^((i-1+j)/2); the exponent is an integer by parity.
    Emission order is ascending i, then j, then square indices, so the
    certificate is deterministic.  Verifies sum M^2 = A before return.
    """
    d = mp.d
    for i in range(d + 1):
        if not mp.a[i].is_zero() and i not in scalar_certs:
            raise MissingScalarCertError(
                f"no scalar certificate supplied for coefficient a_{i}", index=i
            )
    q = invert_b_mod_p(split, mp)
    q_of_A = mat_poly_eval(q, A)
    powers = [SymbolicMatrix.identity(A.varset, A.n)]
    for _ in range(d - 1):
        powers.append(powers[-1] * A)
    odd = [i for i in range(1, d + 1, 2) if not mp.a[i].is_zero()]
    even = [j for j in range(0, d + 1, 2) if not mp.a[j].is_zero()]
    squares = []
    for i in odd:
        for j in even:
            base = q_of_A * powers[(i - 1 + j) // 2]
            for s in scalar_certs[i].squares:
                for u in scalar_certs[j].squares:
                    squares.append(base.scale(s * u))
    count_law = sum(len(scalar_certs[i].squares) for i in odd) * sum(
        len(scalar_certs[j].squares) for j in even
    )
    if len(squares) != count_law:
        raise AssertionError("square count disagrees with the parity product law")
    cert = MatrixSOSCert(
        dim=A.n,
        varset=A.varset,
        squares=tuple(squares),
        minpoly=mp,
        scalar_certs=dict(scalar_certs),
        square_count=len(squares),
    )
    # every square is a polynomial in A, so commutation holds by
    # construction; the caller's final verification re-checks it anyway
    report = verify_matrix_cert(A, cert, check_commutation=False)
    if not report:
        raise VerificationFailedError(
            "constructed certificate failed verification: "
            + "; ".join(report.failures)
        )
    return cert


def verify_matrix_cert(
    A: SymbolicMatrix, cert: MatrixSOSCert, check_commutation: bool = True
) -> MatrixCertReport:
    """Exact symbolic check of a certificate against its target.

    Pure function, usable against externally produced certificates:
    checks each square is symmetric (and optionally commutes with A)
    and that the squares sum to A entry-wise.
    """
    if A.n != cert.dim:
        raise DimensionMismatchError("certificate dimension does not match the matrix")
    if A.varset != cert.varset:
        raise DimensionMismatchError("certificate variables do not match the matrix")
    failures = []
    if cert.square_count != len(cert.squares):
        failures.append(
            f"square_count says {cert.square_count} but {len(cert.squares)} squares are listed"
        )
    total = SymbolicMatrix.zeros(A.varset, A.n)
    for k, M in enumerate(cert.squares):
        if M.n != A.n or M.varset != A.varset:
            failures.append(f"square {k} has mismatched shape or variables")
            continue
        if not M.is_symmetric():
            failures.append(f"square {k} is not symmetric")
        if check_commutation and not (M * A).equals(A * M):
            failures.append(f"square {k} does not commute with the target")
        total = total + M * M
    if not total.equals(A):
        where = next(
            (i, j)
            for i in range(A.n)
            for j in range(A.n)
            if not (total.entry(i, j) == A.entry(i, j))
        )
        failures.append(
            f"sum of squares differs from the target at entry "
            f"({where[0] + 1},{where[1] + 1})"
        )
    return MatrixCertReport(ok=not failures, failures=tuple(failures))


def certify(
    A: SymbolicMatrix,
    store: CertStore = None,
    samples: int = 100,
    seed: int = 0,
) -> MatrixSOSCert:
    """End-to-end certification pipeline for a symmetric PSD matrix.

    Stages: sampling refutation of positive semidefiniteness, minimal
    polynomial, coefficient screen, one scalar certificate per nonzero
    coefficient, parity split, modular inverse, square construction,
    final verification.  Each failure mode raises a distinct error
    naming its stage; ScalarSOSUnavailable carries the coefficient
    index, since that gap (no general scalar decomposition procedure)
    is expected rather than exceptional.
    """
    t0 = time.perf_counter()
    if not A.is_symmetric():
        raise NotSymmetricError("certify requires a symmetric matrix")
    A.polynomial_entries()  # rejects rational-function entries up front
    psd = psd_sample_check(A, samples=samples, seed=seed)
    if not psd:
        raise NotPSDError(
            f"principal minor {psd.minor_indices} is {psd.value} at {psd.witness}",
            witness=psd.witness,
            minor_indices=psd.minor_indices,
            value=psd.value,
        )
    mp = minimal_polynomial(A)
    check_lemma_form(mp)
    providers = {}
    scalar_certs = {}
    for i in range(mp.d + 1):
        if mp.a[i].is_zero():
            continue
        try:
            scalar_certs[i] = scalar_sos_pipeline(mp.a[i], store)
        except ScalarSOSUnavailable as exc:
            raise ScalarSOSUnavailable(
                f"coefficient a_{i} ({print_poly(mp.a[i])}) has no scalar "
                f"certificate: {exc}",
                target=exc.target,
                reasons=exc.reasons,
                coefficient_index=i,
            ) from None
        providers[str(i)] = scalar_certs[i].provider
    split = split_even_odd(mp)
    cert = build_squares(A, mp, split, scalar_certs)
    report = verify_matrix_cert(A, cert)
    if not report:
        raise VerificationFailedError("; ".join(report.failures))
    provenance = {
        "providers": providers,
        "elapsed_seconds": round(time.perf_counter() - t0, 3),
    }
    return replace(cert, provenance=provenance)


# serialization


def _rf_fields(x: RationalFunction) -> dict:
    return {"num": print_poly(x.num), "den": print_poly(x.den)}


def _rf_parse(fields: dict, varset: VarSet) -> RationalFunction:
    return RationalFunction(
        parse_poly(fields["num"], varset), parse_poly(fields["den"], varset)
    )


def serialize_cert(cert: MatrixSOSCert) -> str:
    """Canonical JSON text; byte-identical for equal certificates."""
    payload = {
        "version": CERT_FORMAT_VERSION,
        "vars": list(cert.varset.names),
        "dim": cert.dim,
        "minpoly": {
            "d": cert.minpoly.d,
            "coefficients": [print_poly(a) for a in cert.minpoly.a],
        },
        "scalar_certs": {
            str(i): {
                "provider": sc.provider,
                "multiplier": None
                if sc.multiplier is None
                else print_poly(sc.multiplier),
                "squares": [_rf_fields(s) for s in sc.squares],
            }
            for i, sc in sorted(cert.scalar_certs.items())
        },
        "squares": [
            [
                [_rf_fields(M.entry(i, j)) for j in range(cert.dim)]
                for i in range(cert.dim)
            ]
            for M in cert.squares
        ],
        "square_count": cert.square_count,
    }
    return json.dumps(payload, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def parse_cert(text: str) -> MatrixSOSCert:
    """Inverse of serialize_cert; raises ParseError on malformed input."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"certificate is not valid JSON: {exc}") from None
    try:
        version = payload["version"]
        if version != CERT_FORMAT_VERSION:
            raise ParseError(f"unsupported certificate version {version!r}")
        varset = VarSet(tuple(payload["vars"]))
        dim = int(payload["dim"])
        d = int(payload["minpoly"]["d"])
        coeff_texts = payload["minpoly"]["coefficients"]
        if len(coeff_texts) != d + 1:
            raise ParseError("minpoly lists the wrong number of coefficients")
        mp = MinPolyForm(
            varset, d, tuple(parse_poly(c, varset) for c in coeff_texts)
        )
        scalar_certs = {}
        for key, record in payload["scalar_certs"].items():
            i = int(key)
            multiplier = record["multiplier"]
            scalar_certs[i] = ScalarSOSCert(
                target=RationalFunction(mp.a[i]),
                squares=tuple(_rf_parse(s, varset) for s in record["squares"]),
                provider=record["provider"],
                multiplier=None
                if multiplier is None
                else parse_poly(multiplier, varset),
            )
        squares = tuple(
            SymbolicMatrix(
                varset, [[_rf_parse(e, varset) for e in row] for row in rows]
            )
            for rows in payload["squares"]
        )
        square_count = int(payload["square_count"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed certificate: {exc}") from None
    return MatrixSOSCert(
        dim=dim,
        varset=varset,
        squares=squares,
        minpoly=mp,
        scalar_certs=scalar_certs,
        square_count=square_count,
    )
