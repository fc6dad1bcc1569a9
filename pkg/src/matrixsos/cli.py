"""Command-line front end for certification and verification runs.

One logical command per invocation; summaries go to standard output and
certificates to files, so batch scripts can chain certify and verify.
Exit codes are stable: 0 success, 1 mathematical refutation or failed
verification, 2 unusable input (parse errors, missing files, shape
problems), 3 no scalar certificate for some coefficient, 4 internal
verification failure (always a bug).
"""

from __future__ import annotations

import argparse
import sys

from .certificates import certify, parse_cert, serialize_cert, verify_matrix_cert
from .errors import (
    DimensionMismatchError,
    EntriesNotPolynomialError,
    LemmaViolation,
    MatrixSOSError,
    NotCoprimeError,
    NotDiagonalizableError,
    NotPSDError,
    NotSymmetricError,
    ParseError,
    ScalarSOSUnavailable,
    VerificationFailedError,
)
from .matrices import (
    minimal_polynomial,
    parse_matrix_file,
    principal_minors,
    psd_sample_check,
)
from .polynomials import print_poly
from .rationals import four_squares_rational, rat
from .scalar_sos import CertStore

# mathematical "no" answers: the run worked, the input is refuted
_REFUTATIONS = (
    NotPSDError,
    LemmaViolation,
    NotDiagonalizableError,
    NotCoprimeError,
)

# unusable input: files, syntax, shapes
_INPUT_ERRORS = (
    ParseError,
    DimensionMismatchError,
    NotSymmetricError,
    EntriesNotPolynomialError,
)


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load_matrix(args):
    return parse_matrix_file(_read_text(args.input))


def _load_store(args, varset) -> CertStore:
    if getattr(args, "store", None) is None:
        return CertStore.empty()
    return CertStore.parse(_read_text(args.store), varset)


def cmd_certify(args) -> int:
    A = _load_matrix(args)
    store = _load_store(args, A.varset)
    cert = certify(A, store, samples=args.samples, seed=args.seed)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(serialize_cert(cert))
    providers = cert.provenance.get("providers", {})
    tags = ", ".join(
        f"a_{i}: {providers[i]}" for i in sorted(providers, key=int)
    )
    print(f"certified: degree {cert.minpoly.d}, {cert.square_count} squares")
    print(f"providers: {tags}")
    print(f"certificate written to {args.output}")
    return 0


def cmd_verify(args) -> int:
    A = _load_matrix(args)
    cert = parse_cert(_read_text(args.cert))
    report = verify_matrix_cert(A, cert)
    if report:
        print(f"certificate verifies: {cert.square_count} squares sum to the target")
        return 0
    for failure in report.failures:
        print(f"FAIL: {failure}")
    return 1


def cmd_minpoly(args) -> int:
    A = _load_matrix(args)
    if not A.is_symmetric():
        raise NotSymmetricError("minpoly expects a symmetric matrix")
    mp = minimal_polynomial(A)
    print(f"minimal polynomial degree: {mp.d}")
    for i in range(mp.d, -1, -1):
        print(f"a_{i} = {print_poly(mp.a[i])}")
    return 0


def cmd_minors(args) -> int:
    A = _load_matrix(args)
    for indices, det in principal_minors(A):
        label = ",".join(str(i) for i in indices)
        print(f"minor [{label}]: {print_poly(det)}")
    return 0


def cmd_check_psd(args) -> int:
    A = _load_matrix(args)
    if not A.is_symmetric():
        raise NotSymmetricError("check-psd expects a symmetric matrix")
    report = psd_sample_check(A, samples=args.samples, seed=args.seed)
    if report:
        print(
            f"no refutation in {report.samples} samples "
            "(evidence of positive semidefiniteness, not proof)"
        )
        return 0
    print(
        f"not positive semidefinite: principal minor {list(report.minor_indices)} "
        f"evaluates to {report.value} at {tuple(str(c) for c in report.witness)}"
    )
    return 1


def _fmt_part(q) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"({q.numerator}/{q.denominator})"


def cmd_four_squares(args) -> int:
    try:
        value = rat(args.value)
    except (ValueError, ZeroDivisionError, TypeError):
        raise ParseError(f"not a rational number: {args.value!r}") from None
    if value < 0:
        print(f"{args.value} is negative; squares cannot sum to it")
        return 1
    parts = four_squares_rational(value)
    rhs = " + ".join(f"{_fmt_part(p)}^2" for p in parts)
    print(f"{value} = {rhs}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matrixsos",
        description=(
            "Exact sum-of-squares certificates for symmetric polynomial "
            "matrices that are positive semidefinite everywhere."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, matrix=True, samples=False):
        cmd = sub.add_parser(name, help=help_text)
        cmd.set_defaults(func=func)
        if matrix:
            cmd.add_argument("--input", required=True, help="matrix file to read")
        if samples:
            cmd.add_argument(
                "--samples", type=int, default=100, help="sample count (default 100)"
            )
            cmd.add_argument(
                "--seed", type=int, default=0, help="sampling seed (default 0)"
            )
        return cmd

    cmd = add("certify", cmd_certify, "build and write a certificate", samples=True)
    cmd.add_argument("--store", help="optional scalar certificate store file")
    cmd.add_argument("--output", required=True, help="where to write the certificate")

    cmd = add("verify", cmd_verify, "check a certificate against a matrix")
    cmd.add_argument("--cert", required=True, help="certificate file to check")

    add("minpoly", cmd_minpoly, "print the minimal polynomial coefficients")
    add("minors", cmd_minors, "print all principal minors")
    add("check-psd", cmd_check_psd, "sample for a refutation of PSD", samples=True)

    cmd = sub.add_parser("four-squares", help="write a rational as four squares")
    cmd.set_defaults(func=cmd_four_squares)
    cmd.add_argument("value", help="nonnegative integer or fraction like 7/9")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _REFUTATIONS as exc:
        print(f"refuted: {exc}", file=sys.stderr)
        return 1
    except ScalarSOSUnavailable as exc:
        print(f"no scalar certificate: {exc}", file=sys.stderr)
        for provider, reason in exc.reasons.items():
            print(f"  {provider}: {reason}", file=sys.stderr)
        return 3
    except VerificationFailedError as exc:
        print(f"internal verification failure: {exc}", file=sys.stderr)
        return 4
    except MatrixSOSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
