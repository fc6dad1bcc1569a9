"""Exact sum-of-squares certificates for symmetric polynomial matrices.

A symmetric matrix of polynomials that is positive semidefinite for
every real substitution is a sum of squares of symmetric matrices over
the rational-function field.  This package constructs such
representations explicitly, with every step in exact rational
arithmetic and every certificate re-verified symbolically.
"""

from .certificates import (
    EvenOddSplit,
    MatrixCertReport,
    MatrixSOSCert,
    build_squares,
    certify,
    invert_b_mod_p,
    parse_cert,
    serialize_cert,
    split_even_odd,
    verify_matrix_cert,
)
from .errors import (
    DimensionMismatchError,
    EntriesNotPolynomialError,
    ExactDivisionError,
    LemmaViolation,
    MatrixSOSError,
    MissingScalarCertError,
    NotCoprimeError,
    NotDiagonalizableError,
    NotFoundError,
    NotPSDError,
    NotSymmetricError,
    ParseError,
    ScalarSOSUnavailable,
    VerificationFailedError,
)
from .matrices import (
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
from .polynomials import Polynomial, VarSet, parse_poly, print_poly
from .ratfuncs import RationalFunction, print_rf
from .rationals import BigRat, FourSquares, four_squares_rational, rat
from .scalar_sos import (
    CertStore,
    ScalarSOSCert,
    scalar_sos_pipeline,
    sos_gram_attempt,
    verify_scalar_cert,
)
from .unipoly import UnivarPoly

__version__ = "1.0.0"

__all__ = [
    "BigRat",
    "CertStore",
    "DimensionMismatchError",
    "EntriesNotPolynomialError",
    "EvenOddSplit",
    "ExactDivisionError",
    "FourSquares",
    "LemmaViolation",
    "MatrixCertReport",
    "MatrixSOSCert",
    "MatrixSOSError",
    "MinPolyForm",
    "MissingScalarCertError",
    "NotCoprimeError",
    "NotDiagonalizableError",
    "NotFoundError",
    "NotPSDError",
    "NotSymmetricError",
    "ParseError",
    "Polynomial",
    "RationalFunction",
    "ScalarSOSCert",
    "ScalarSOSUnavailable",
    "SymbolicMatrix",
    "UnivarPoly",
    "VarSet",
    "VerificationFailedError",
    "build_squares",
    "certify",
    "charpoly",
    "check_lemma_form",
    "det_bareiss",
    "det_cofactor",
    "format_matrix_file",
    "four_squares_rational",
    "invert_b_mod_p",
    "mat_poly_eval",
    "minimal_polynomial",
    "minimal_polynomial_krylov",
    "parse_cert",
    "parse_matrix_file",
    "parse_poly",
    "principal_minors",
    "print_poly",
    "print_rf",
    "psd_sample_check",
    "rat",
    "scalar_sos_pipeline",
    "serialize_cert",
    "sos_gram_attempt",
    "split_even_odd",
    "verify_matrix_cert",
    "verify_scalar_cert",
]
