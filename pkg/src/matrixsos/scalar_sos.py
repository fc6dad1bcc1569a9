"""Sum-of-squares certificates for scalar polynomials and rational functions.

There is no complete algorithm for writing an arbitrary nonnegative
element of the rational-function field as a sum of squares, so this
module is an ordered chain of providers, each of which handles one
recognizable shape:

    zero -> constant -> perfect square -> monomial squares
         -> user-supplied store -> Gram matrix attempt

Every provider verifies its own output symbolically before returning
it, and the chain fails honestly (ScalarSOSUnavailable, with each
provider's reason) rather than guess.  A failure is never a proof that
no certificate exists.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import (
    NegativeTargetError,
    NotApplicableError,
    NotFoundError,
    ScalarSOSUnavailable,
    SOSProviderError,
    VerificationFailedError,
    ZeroMultiplierError,
)
from .polynomials import Polynomial, VarSet, parse_poly, poly_partial, print_poly
from .rationals import four_squares_rational, rat
from .ratfuncs import RationalFunction, print_rf


@dataclass(frozen=True)
class ScalarSOSCert:
    """target = sum of squares of the listed rational functions.

    Providers verify before returning, so any certificate obtained from
    this module satisfies verify_scalar_cert; hand-built instances may
    not, which is what makes verify_scalar_cert worth having.
    """

    target: RationalFunction
    squares: tuple
    provider: str
    multiplier: Polynomial = None

    @property
    def square_count(self) -> int:
        return len(self.squares)


def verify_scalar_cert(cert: ScalarSOSCert) -> bool:
    """Exact symbolic check that the squares sum to the target."""
    total = RationalFunction.zero(cert.target.varset)
    for g in cert.squares:
        total = total + g * g
    return total == cert.target


def _checked(target: RationalFunction, squares, provider: str, multiplier=None):
    cert = ScalarSOSCert(
        target=target, squares=tuple(squares), provider=provider, multiplier=multiplier
    )
    if not verify_scalar_cert(cert):
        raise VerificationFailedError(
            f"provider {provider} produced a certificate that does not verify"
        )
    return cert


def _rf(value, varset: VarSet) -> RationalFunction:
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, Polynomial):
        return RationalFunction(value)
    return RationalFunction.constant(varset, value)


_EMPTY_VARSET = VarSet(())


def sos_zero(varset: VarSet = _EMPTY_VARSET) -> ScalarSOSCert:
    """The empty certificate for the zero target."""
    return ScalarSOSCert(
        target=RationalFunction.zero(varset), squares=(), provider="zero"
    )


def sos_constant(q, varset: VarSet = _EMPTY_VARSET) -> ScalarSOSCert:
    """At most four rational squares for a nonnegative rational constant."""
    q = rat(q)
    if q < 0:
        raise NegativeTargetError(f"{q} is negative, never a sum of squares")
    target = RationalFunction.constant(varset, q)
    if q == 0:
        return ScalarSOSCert(target=target, squares=(), provider="constant")
    num, den = int(q.numerator), int(q.denominator)
    num_root, den_root = math.isqrt(num), math.isqrt(den)
    if num_root * num_root == num and den_root * den_root == den:
        squares = [RationalFunction.constant(varset, rat(num_root, den_root))]
    else:
        squares = [
            RationalFunction.constant(varset, s)
            for s in four_squares_rational(q)
            if s != 0
        ]
    return _checked(target, squares, "constant")


def sos_perfect_square(p: Polynomial) -> ScalarSOSCert:
    """Certificates for p = c * q^2 with c a nonnegative rational."""
    from .polynomials import poly_square_root

    if p.is_zero():
        return sos_zero(p.varset)
    c = p.leading_coeff()
    if c < 0:
        raise NotApplicableError("leading coefficient is negative")
    root = poly_square_root(p.scale(rat(1) / c))
    if root is None:
        raise NotApplicableError("no exact polynomial square root")
    scale_cert = sos_constant(c, p.varset)
    root_rf = RationalFunction(root)
    squares = [s * root_rf for s in scale_cert.squares]
    return _checked(RationalFunction(p), squares, "perfect-square")


def sos_monomial_squares(p: Polynomial) -> ScalarSOSCert:
    """Certificates for polynomials whose every term is c * x^(2e), c > 0."""
    varset = p.varset
    squares = []
    for exps, coeff in p.sorted_terms():
        if any(e % 2 for e in exps):
            raise NotApplicableError(
                f"term with odd exponent: {print_poly(Polynomial.monomial(varset, exps, coeff))}"
            )
        if coeff < 0:
            raise NotApplicableError(
                f"negative coefficient on {print_poly(Polynomial.monomial(varset, exps, 1))}"
            )
        half = Polynomial.monomial(varset, tuple(e // 2 for e in exps))
        half_rf = RationalFunction(half)
        for s in four_squares_rational(coeff):
            if s != 0:
                squares.append(half_rf * s)
    return _checked(RationalFunction(p), squares, "monomial-squares")


def sos_denominator_lift(
    p: Polynomial,
    multiplier: Polynomial,
    cert_of_product: ScalarSOSCert,
    cert_of_multiplier: ScalarSOSCert,
) -> ScalarSOSCert:
    """Turn a certificate of multiplier*p into one of p.

    With multiplier = sum sigma_l^2 and multiplier*p = sum h_k^2,
    p = sum over (k, l) of (sigma_l * h_k / multiplier)^2.
    """
    if multiplier.is_zero():
        raise ZeroMultiplierError("multiplier must be nonzero")
    if multiplier == 1:
        if not verify_scalar_cert(cert_of_product):
            raise VerificationFailedError("certificate of the product does not verify")
        return cert_of_product
    mult_rf = RationalFunction(multiplier)
    if not verify_scalar_cert(cert_of_product):
        raise VerificationFailedError("certificate of the product does not verify")
    if not cert_of_product.target == mult_rf * p:
        raise VerificationFailedError(
            "product certificate does not certify multiplier * target"
        )
    if not verify_scalar_cert(cert_of_multiplier):
        raise VerificationFailedError("certificate of the multiplier does not verify")
    if not cert_of_multiplier.target == mult_rf:
        raise VerificationFailedError(
            "multiplier certificate does not certify the multiplier"
        )
    squares = [
        sigma * h / mult_rf
        for h in cert_of_product.squares
        for sigma in cert_of_multiplier.squares
    ]
    return _checked(RationalFunction(p), squares, "denominator-lift", multiplier)


# Gram matrix attempt

_BASIS_LIMIT = 40
_CANDIDATE_LIMIT = 20000
_BARRIER_T_FLOOR = 1e-11
_BARRIER_T_DECAY = 0.125
_BARRIER_NEWTON_MAX = 15
_BARRIER_DENOMINATORS = (1, 100, 10**4)
_BARRIER_FINAL_DENOMINATORS = (1, 100, 10**4, 10**6, 10**9)


def _half_support_basis(p: Polynomial):
    """Candidate monomials for squares of p, or None if hopeless.

    Bounding box intersected with total-degree bounds, then the standard
    fixpoint reduction: keep e only while 2e is in the support of p or
    is a sum of two distinct surviving candidates.
    """
    varset = p.varset
    support = {exps for exps, _ in p.sorted_terms()}
    caps = []
    for i in range(varset.v):
        d = p.degree_in(i)
        if d % 2:
            return None
        caps.append(d // 2)
    total = p.total_degree()
    low = min(sum(e) for e in support)
    if total % 2 or low % 2:
        return None
    hi, lo = total // 2, low // 2
    count = 1
    for c in caps:
        count *= c + 1
        if count > _CANDIDATE_LIMIT:
            return None
    candidates = {
        e
        for e in itertools.product(*(range(c + 1) for c in caps))
        if lo <= sum(e) <= hi
    }
    changed = True
    while changed:
        changed = False
        pair_sums = {
            tuple(x + y for x, y in zip(e1, e2))
            for e1, e2 in itertools.combinations(candidates, 2)
        }
        for e in sorted(candidates):
            double = tuple(2 * x for x in e)
            if double not in support and double not in pair_sums:
                candidates.remove(e)
                changed = True
    return candidates


def _gram_equations(p: Polynomial, basis):
    """Decoupled coefficient-matching equations, one per product monomial.

    Each Gram entry G[i][j] shows up in exactly one equation (the one for
    basis[i] + basis[j]), so the system never needs elimination: every
    equation distributes its coefficient among its own entries.  Returns
    {mu: (diag_index_or_None, [(i, j) upper pairs], coefficient)}, or
    None when some monomial of p is not a product of basis monomials.
    """
    m = len(basis)
    equations = {}
    for i in range(m):
        for j in range(i, m):
            mu = tuple(x + y for x, y in zip(basis[i], basis[j]))
            diag, pairs = equations.setdefault(mu, [None, []])
            if i == j:
                equations[mu][0] = i
            else:
                pairs.append((i, j))
    coeffs = {exps: c for exps, c in p.sorted_terms()}
    for mu in coeffs:
        if mu not in equations:
            return None
    return {
        mu: (diag, pairs, coeffs.get(mu, rat(0)))
        for mu, (diag, pairs) in equations.items()
    }


def _assemble_gram(m, equations, assignment):
    gram = [[rat(0)] * m for _ in range(m)]
    for mu, (diag, pairs, _c) in equations.items():
        values = assignment(mu)
        for (i, j), v in zip(pairs, values[1:]):
            gram[i][j] = v
            gram[j][i] = v
        if diag is not None:
            gram[diag][diag] = values[0]
    return gram


def _distribution_strategies(equations):
    """Three deterministic ways to split each coefficient, cheapest first.

    'pinned' loads the lexicographically first entry (matching plain
    completion of squares), 'diagonal' prefers the diagonal entry, and
    'spread' is the minimum-Frobenius-norm split.  values[0] is always
    the diagonal share, values[1:] follow the pair order.
    """

    def pinned(mu):
        diag, pairs, c = equations[mu]
        values = [rat(0)] * (1 + len(pairs))
        if c != 0:
            slots = [(i, j) for (i, j) in pairs]
            if diag is not None:
                slots.append((diag, diag))
            first = min(slots)
            if first == (diag, diag):
                values[0] = c
            else:
                values[1 + pairs.index(first)] = c / 2
        return values

    def diagonal(mu):
        diag, pairs, c = equations[mu]
        values = [rat(0)] * (1 + len(pairs))
        if c != 0:
            if diag is not None:
                values[0] = c
            else:
                share = c / (2 * len(pairs))
                values[1:] = [share] * len(pairs)
        return values

    def spread(mu):
        diag, pairs, c = equations[mu]
        weight = 2 * len(pairs) + (1 if diag is not None else 0)
        share = c / weight if c != 0 else rat(0)
        values = [share] * (1 + len(pairs))
        if diag is None:
            values[0] = rat(0)
        return values

    return (pinned, diagonal, spread)


def _constraint_rows(m, equations):
    """The coefficient-matching conditions as sparse exact rows over the
    flattened upper triangle, in a fixed deterministic order."""

    def flat(i, j):
        return i * m - i * (i - 1) // 2 + (j - i)

    rows = []
    for mu in sorted(equations, key=lambda e: (sum(e), e), reverse=True):
        diag, pairs, c = equations[mu]
        row = {flat(i, j): rat(2) for i, j in pairs}
        if diag is not None:
            row[flat(diag, diag)] = rat(1)
        rows.append((row, c))
    return rows


def _rref(rows):
    """Sparse Gauss-Jordan over the rationals.

    Returns {pivot: (free-column coefficients, rhs)} with every stored
    row fully reduced, or None when the system is inconsistent.
    """
    pivot_rows = {}
    for row, rhs in rows:
        row = dict(row)
        rhs = rat(rhs)
        for p in [p for p in row if p in pivot_rows]:
            c = row.pop(p)
            prow, prhs = pivot_rows[p]
            for idx, val in prow.items():
                acc = row.get(idx, rat(0)) - c * val
                if acc == 0:
                    row.pop(idx, None)
                else:
                    row[idx] = acc
            rhs = rhs - c * prhs
        if not row:
            if rhs != 0:
                return None
            continue
        pivot = min(row)
        inv = rat(1) / row.pop(pivot)
        row = {idx: val * inv for idx, val in row.items()}
        rhs = rhs * inv
        for other, (orow, orhs) in pivot_rows.items():
            c = orow.get(pivot)
            if c is not None:
                del orow[pivot]
                for idx, val in row.items():
                    acc = orow.get(idx, rat(0)) - c * val
                    if acc == 0:
                        orow.pop(idx, None)
                    else:
                        orow[idx] = acc
                pivot_rows[other] = (orow, orhs - c * rhs)
        pivot_rows[pivot] = (row, rhs)
    return pivot_rows


def _gram_from_free(m, rref, free_values):
    """Exact Gram matrix from rationalized free variables; pivots are
    recomputed exactly, so the linear constraints hold by construction."""
    gram = [[rat(0)] * m for _ in range(m)]
    values = {}
    for pivot, (row, rhs) in rref.items():
        acc = rhs
        for idx, coeff in row.items():
            v = free_values.get(idx)
            if v:
                acc = acc - coeff * v
        values[pivot] = acc
    values.update(free_values)
    idx = 0
    for i in range(m):
        for j in range(i, m):
            v = values.get(idx, rat(0))
            gram[i][j] = v
            gram[j][i] = v
            idx += 1
    return gram


def _rationalize_free(x, free, rref, m, schedule):
    """Try the free variables at escalating precision; first PSD wins."""
    from fractions import Fraction

    for bound in schedule:
        free_values = {}
        for idx in free:
            f = Fraction(float(x[idx])).limit_denominator(bound)
            if f != 0:
                free_values[idx] = rat(f.numerator, f.denominator)
        factored = _ldl(_gram_from_free(m, rref, free_values))
        if factored is not None:
            return factored
    return None


class _Infeasible(Exception):
    """A determined principal block already rules out PSD completion."""


def _sqrt_upper(q):
    """A rational upper bound on sqrt(q), exact for perfect squares."""
    num, den = int(q.numerator), int(q.denominator)
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return rat(rn, rd)
    return rat(rn + 1, rd)


def _propagate_forced(m, rows):
    """Exact facial reduction from entries the linear system determines.

    Any 1x1 or 2x2 principal block whose entries are fixed by the
    constraints alone has the same value in every Gram candidate, so a
    singular such block forces G v = 0 for its kernel vector v in every
    PSD candidate (x^T G x = 0 with G PSD implies G x = 0).  Those exact
    rows are appended and the search repeats to a fixpoint.  Raises
    _Infeasible when a determined block is already not PSD, which
    refutes every candidate at once.
    """

    def flat(i, j):
        return i * m - i * (i - 1) // 2 + (j - i)

    rows = list(rows)
    imposed = set()
    while True:
        rref = _rref(rows)
        if rref is None:
            raise _Infeasible("kernel constraints are inconsistent")
        fixed = {idx: rhs for idx, (row, rhs) in rref.items() if not row}
        new_vecs = []

        def note(vec):
            lead = next(v for v in vec if v)
            key = tuple(v / lead for v in vec)
            if key not in imposed:
                imposed.add(key)
                new_vecs.append(list(key))

        diag = [fixed.get(flat(i, i)) for i in range(m)]
        for i in range(m):
            if diag[i] is None:
                continue
            if diag[i] < 0:
                raise _Infeasible("a determined diagonal entry is negative")
            if diag[i] == 0:
                vec = [rat(0)] * m
                vec[i] = rat(1)
                note(vec)
        for i in range(m):
            if diag[i] is None or diag[i] == 0:
                continue
            for j in range(i + 1, m):
                if diag[j] is None:
                    continue
                c = fixed.get(flat(i, j))
                if c is None:
                    continue
                disc = diag[i] * diag[j] - c * c
                if disc < 0:
                    raise _Infeasible("a determined 2x2 minor is negative")
                if disc == 0 and c != 0:
                    vec = [rat(0)] * m
                    vec[i] = c
                    vec[j] = -diag[i]
                    note(vec)
        if new_vecs:
            rows.extend(_kernel_rows(m, new_vecs))
            continue
        pinched = _pinched_entries(m, rref, fixed, flat)
        if not pinched:
            return rows, rref
        rows.extend(pinched)


def _pinched_entries(m, rref, fixed, flat):
    """Interval reasoning on entries that are affine in one free variable.

    Necessary PSD conditions (nonnegative diagonal, 2x2 minors against
    determined diagonals) become rational intervals on such variables;
    square roots are widened outward, so an interval that collapses to a
    point is a sound exact determination and an empty one is a sound
    refutation.  Returns new constraint rows for the pinched variables.
    """
    n = m * (m + 1) // 2
    exprs = {}
    for pivot, (row, rhs) in rref.items():
        if len(row) == 1:
            ((f, cf),) = row.items()
            exprs[pivot] = (rhs, -cf, f)
    for idx in range(n):
        if idx not in rref and idx not in fixed:
            exprs.setdefault(idx, (rat(0), rat(1), idx))
    bounds = {}

    def constrain(entry, lo, hi):
        e = exprs.get(entry)
        if e is None:
            return
        alpha, beta, f = e
        if beta > 0:
            lo, hi = (
                None if lo is None else (lo - alpha) / beta,
                None if hi is None else (hi - alpha) / beta,
            )
        else:
            lo, hi = (
                None if hi is None else (hi - alpha) / beta,
                None if lo is None else (lo - alpha) / beta,
            )
        cur = bounds.setdefault(f, [None, None])
        if lo is not None and (cur[0] is None or lo > cur[0]):
            cur[0] = lo
        if hi is not None and (cur[1] is None or hi < cur[1]):
            cur[1] = hi
        if cur[0] is not None and cur[1] is not None and cur[0] > cur[1]:
            raise _Infeasible("interval bounds on a Gram entry contradict")

    for i in range(m):
        constrain(flat(i, i), rat(0), None)
    for i in range(m):
        for j in range(i + 1, m):
            a = fixed.get(flat(i, i))
            d = fixed.get(flat(j, j))
            c = fixed.get(flat(i, j))
            if a is not None and d is not None and a > 0 and d > 0:
                s = _sqrt_upper(a * d)
                constrain(flat(i, j), -s, s)
            elif c is not None and d is not None and d > 0:
                constrain(flat(i, i), c * c / d, None)
            elif c is not None and a is not None and a > 0:
                constrain(flat(j, j), c * c / a, None)
    new_rows = []
    for f, (lo, hi) in sorted(bounds.items()):
        if lo is not None and lo == hi:
            new_rows.append(({f: rat(1)}, lo))
    return new_rows


def _barrier_center(m, rref, free, try_candidate):
    """Push the slice's smallest eigenvalue up a shrinking-barrier path.

    Phase-1 search for max lambda_min: minimize -s - mu*logdet(G(y)-sI)
    with Newton steps over (y, s), shrinking mu on a fixed schedule.
    The free variables y of the exact row-reduced system parameterize
    the affine slice, so every constraint holds identically.  The Gram
    spectahedron is compact, which rules out runaway rays.  On a
    boundary instance the forced-kernel eigenvalues land at O(mu) while
    the rest stay ordinary, so the terminal eigendecomposition exposes
    the kernel to many digits.  try_candidate(y, schedule) runs after
    every mu step so interior instances exit with small denominators.
    Returns (found, eigenvalues, eigenvectors).
    """
    import numpy as np

    n = m * (m + 1) // 2
    x0 = np.zeros(n)
    nmat = np.zeros((n, len(free)))
    col = {f: k for k, f in enumerate(free)}
    for k, f in enumerate(free):
        nmat[f, k] = 1.0
    for pivot, (row, rhs) in rref.items():
        x0[pivot] = float(rhs)
        for f, coeff in row.items():
            nmat[pivot, col[f]] -= float(coeff)
    iu = np.triu_indices(m)

    def tomat(x):
        g = np.zeros((m, m))
        g[iu] = x
        return g + g.T - np.diag(np.diag(g))

    eye = np.eye(m)
    dirs = [tomat(nmat[:, k]) for k in range(len(free))]
    dirs.append(-eye)
    dirs = np.stack(dirs)
    nvar = len(free) + 1
    lin = np.zeros(nvar)
    lin[-1] = -1.0

    def assemble(z):
        return tomat(x0 + nmat @ z[:-1]), float(z[-1])

    z = np.zeros(nvar)
    g_now = tomat(x0)
    z[-1] = float(np.linalg.eigvalsh(g_now)[0]) - 1.0
    mu = 1.0
    while True:
        for _ in range(_BARRIER_NEWTON_MAX):
            g_now, s = assemble(z)
            mm = g_now - s * eye
            try:
                chol = np.linalg.cholesky(mm)
            except np.linalg.LinAlgError:
                break
            minv = np.linalg.inv(mm)
            grad = lin - mu * np.tensordot(dirs, minv, axes=([1, 2], [0, 1]))
            half = minv @ dirs @ minv
            hess = mu * np.tensordot(half, dirs, axes=([1, 2], [1, 2]))
            try:
                dz = np.linalg.solve(hess + 1e-13 * np.eye(nvar), -grad)
            except np.linalg.LinAlgError:
                break
            decrement = float(-grad @ dz)
            if decrement < 1e-12:
                break
            f_now = -s - 2.0 * mu * float(np.log(np.diag(chol)).sum())
            alpha, accepted = 1.0, False
            while alpha > 1e-9:
                z_try = z + alpha * dz
                g_try, s_try = assemble(z_try)
                try:
                    c_try = np.linalg.cholesky(g_try - s_try * eye)
                except np.linalg.LinAlgError:
                    alpha *= 0.5
                    continue
                f_try = -s_try - 2.0 * mu * float(np.log(np.diag(c_try)).sum())
                if f_try <= f_now - 0.25 * alpha * decrement:
                    accepted = True
                    break
                alpha *= 0.5
            if not accepted:
                break
            z = z + alpha * dz
        g_now, s = assemble(z)
        if float(np.linalg.eigvalsh(g_now)[0]) > -1e-3:
            last = mu <= _BARRIER_T_FLOOR
            schedule = _BARRIER_FINAL_DENOMINATORS if last else _BARRIER_DENOMINATORS
            found = try_candidate(z[:-1], schedule)
            if found is not None:
                return found, None, None
        if mu <= _BARRIER_T_FLOOR:
            break
        mu *= _BARRIER_T_DECAY
    w, v = np.linalg.eigh(g_now)
    return None, w, v


def _psd_search_numeric(p, basis, m, equations):
    """Central-path numerics plus kernel-guided exact facial reduction.

    Floating point only guides the search; every candidate assigns
    rationalized values to the free variables of the exact row-reduced
    system and is re-verified by exact LDL^T, so a wrong float can cost
    time but never correctness.  When a round ends on the boundary of
    the cone, the near-null eigenvectors are turned into exact kernel
    rows, preferably through zeros of p polished to high precision and
    otherwise through the rational closure of the float vectors (a
    rational Gram annihilating an irrational kernel vector annihilates
    the whole conjugate subspace), and the search repeats on the smaller
    face.  Fixed schedules keep results and NotFound deterministic.
    """
    import numpy as np

    n = m * (m + 1) // 2
    rows = _constraint_rows(m, equations)
    for _round in range(4):
        try:
            rows, rref = _propagate_forced(m, rows)
        except _Infeasible:
            if _round == 0:
                raise
            return None
        free = [idx for idx in range(n) if idx not in rref]
        factored = _ldl(_gram_from_free(m, rref, {}))
        if factored is not None:
            return factored

        def try_candidate(y, schedule):
            x = [0.0] * n
            for k, f in enumerate(free):
                x[f] = float(y[k])
            return _rationalize_free(x, free, rref, m, schedule)

        found, w, v = _barrier_center(m, rref, free, try_candidate)
        if found is not None:
            return found
        if float(w[0]) < -1e-7:
            return None
        tol = max(1e-7 * max(1.0, float(w[-1])), 3.0 * float(max(0.0, -w[0])))
        null_vecs = [v[:, k] for k in range(m) if w[k] < tol]
        if not null_vecs:
            return None
        # Zero polishing gives far more precise kernel data than the
        # float eigenvectors, so its closure is tried first; the plain
        # closure of the eigenvectors is the fallback.  The coarser
        # scales at the end match the ~1e-6 noise of barely-resolved
        # eigenvectors, where the fine scale only amplifies the noise
        # into junk relations; junk is rejected by the consistency
        # check, so later rungs run only when the earlier ones failed.
        adopted = None
        for space in (
            _polished_zero_closure(p, basis, null_vecs, m),
            _rational_closure(null_vecs, m),
            _rational_closure(null_vecs, m, scale=10**4, tol=1e-5),
            _rational_closure(null_vecs, m, scale=10**3, tol=1e-4),
        ):
            if not space:
                continue
            candidate = rows + _kernel_rows(m, space)
            reduced = _rref(candidate)
            if reduced is not None and len(reduced) > len(rref):
                adopted = candidate
                break
        if adopted is None:
            return None
        rows = adopted
    return None


def _kernel_rows(m, kernel):
    """Exact rows demanding G v = 0 for each rationalized kernel vector."""

    def flat(i, j):
        return i * m - i * (i - 1) // 2 + (j - i)

    rows = []
    for vec in kernel:
        for i in range(m):
            row = {}
            for j in range(m):
                if vec[j] == 0:
                    continue
                idx = flat(i, j) if i <= j else flat(j, i)
                row[idx] = row.get(idx, rat(0)) + vec[j]
            if row:
                rows.append((row, rat(0)))
    return rows


_CLOSURE_SCALE = 10**7


def _round_int(x):
    # works for float and mpf alike; int() truncates toward zero
    return int(x + 0.5) if x >= 0 else int(x - 0.5)


def _rational_closure(vectors, m, scale=_CLOSURE_SCALE, tol=1e-8):
    """Smallest rational subspace containing the numeric kernel span.

    A rational symmetric G with G v = 0 for an irrational v also kills
    every algebraic conjugate of v, so the span to annihilate is defined
    over the rationals even when no single kernel vector is.  Lattice
    reduction on [I | scale * kernel coordinates] digs up small integer
    vectors orthogonal to the kernel; the exact rational null space of
    those is the closure.  Downstream consistency and LDL checks keep a
    wrong guess harmless.  Entries may be floats or mpmath values; the
    caller picks scale and tol to match their precision.
    """
    from sympy import ZZ
    from sympy.polys.matrices import DomainMatrix

    k = len(vectors)
    lattice = []
    for i in range(m):
        row = [ZZ(1) if j == i else ZZ(0) for j in range(m)]
        row.extend(ZZ(_round_int(scale * vec[i])) for vec in vectors)
        lattice.append(row)
    reduced = DomainMatrix(lattice, (m, m + k), ZZ).lll().to_list()
    # Lattice reduction also digs up Bezout artifacts: combinations that
    # cancel the rounded column without being orthogonal to the actual
    # vector.  The residual against the unrounded kernel separates the
    # two by orders of magnitude, and a k-dim kernel admits at most
    # m - k independent normals.
    normals = []
    for row in reduced:
        u = [int(e) for e in row[:m]]
        if not any(u):
            continue
        norm = max(1.0, math.sqrt(sum(e * e for e in u)))
        residuals = (
            abs(sum(e * vec[i] for i, e in enumerate(u))) for vec in vectors
        )
        if all(r <= tol * norm for r in residuals):
            normals.append(u)
            if len(normals) == m - k:
                break
    if not normals:
        return []
    # exact null space of the normal rows, by Gauss-Jordan over BigRat
    work = [[rat(e) for e in u] for u in normals]
    pivots = []
    r = 0
    for c in range(m):
        pr = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        inv = 1 / work[r][c]
        work[r] = [e * inv for e in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
    basis = []
    for c in range(m):
        if c in pivots:
            continue
        vec = [rat(0)] * m
        vec[c] = rat(1)
        for rr, pc in enumerate(pivots):
            vec[pc] = -work[rr][c]
        basis.append(vec)
    return basis


def _mp_eval_poly(mp, poly, point):
    """Evaluate at an mpf point; also return the sum of term magnitudes."""
    total = mp.mpf(0)
    scale = mp.mpf(1)
    vs = poly.varset
    for key, coeff in poly.terms.items():
        term = mp.mpf(int(coeff.numerator)) / mp.mpf(int(coeff.denominator))
        for xv, e in zip(point, vs.unpack(key)):
            if e:
                term = term * xv**e
        total += term
        scale += abs(term)
    return total, scale


def _extract_point(basis, vec, nvars):
    """Read approximate zero coordinates off monomial ratios.

    If vec is the monomial vector of a point, the ratio of the entries
    for x^(e+u_i) and x^e is the i-th coordinate.  Picks the largest
    safe denominator entry per variable; None when some variable has no
    usable adjacent pair.
    """
    index = {e: pos for pos, e in enumerate(basis)}
    top = max(abs(float(x)) for x in vec)
    if top == 0.0:
        return None
    point = []
    for i in range(nvars):
        best = None
        for e, pos in index.items():
            up = e[:i] + (e[i] + 1,) + e[i + 1 :]
            if up not in index:
                continue
            mag = abs(float(vec[pos]))
            if mag < 0.05 * top:
                continue
            if best is None or mag > best[0]:
                best = (mag, float(vec[index[up]]) / float(vec[pos]))
        if best is None:
            return None
        point.append(best[1])
    return point


def _newton_polish(mp, grads, hess, point):
    """Drive an approximate critical point to working precision.

    Plain Newton on the gradient system; quadratic from a float-quality
    start, so a handful of steps reach fifty digits.  None on breakdown
    or when the iterate runs away from the start.
    """
    nv = len(point)
    bound = 10 * (1 + max(abs(xv) for xv in point))
    x = list(point)
    for _ in range(40):
        gvals = []
        gscale = mp.mpf(1)
        for gp in grads:
            val, sc = _mp_eval_poly(mp, gp, x)
            gvals.append(val)
            gscale = max(gscale, sc)
        if max(abs(gv) for gv in gvals) <= gscale * mp.mpf("1e-52"):
            return x
        hmat = mp.matrix(nv, nv)
        for i in range(nv):
            for j in range(nv):
                hmat[i, j], _ = _mp_eval_poly(mp, hess[i][j], x)
        try:
            dx = mp.lu_solve(hmat, mp.matrix([-gv for gv in gvals]))
        except (ZeroDivisionError, ValueError):
            return None
        x = [xv + dx[i] for i, xv in enumerate(x)]
        if max(abs(xv) for xv in x) > bound:
            return None
    return None


def _polished_zero_closure(p, basis, null_vecs, m):
    """Exact kernel rows through high-precision zeros of p.

    Every real zero of a nonnegative p is a critical point, and its
    monomial vector lies in the kernel of every feasible Gram matrix.
    Float eigenvectors alone carry too little precision to separate the
    genuine integer relations of a high-degree algebraic zero from
    lattice artifacts, so this reads an approximate zero off monomial
    ratios of each kernel vector, polishes it against the gradient
    system to fifty digits, and runs the closure at a matching scale
    where that separation is unambiguous.
    """
    from mpmath import mp

    nv = p.varset.v
    grads = [poly_partial(p, i) for i in range(nv)]
    hess = [[poly_partial(g, j) for j in range(nv)] for g in grads]
    starts = list(null_vecs)
    for a in range(len(null_vecs)):
        for b in range(a + 1, len(null_vecs)):
            starts.append(null_vecs[a] + null_vecs[b])
            starts.append(null_vecs[a] - null_vecs[b])
    closure = []
    seen = set()
    with mp.workdps(60):
        for vec in starts[:8]:
            guess = _extract_point(basis, vec, nv)
            if guess is None:
                continue
            zero = _newton_polish(mp, grads, hess, [mp.mpf(g) for g in guess])
            if zero is None:
                continue
            value, pscale = _mp_eval_poly(mp, p, zero)
            if abs(value) > pscale * mp.mpf("1e-45"):
                continue
            key = tuple(mp.nstr(xv, 30) for xv in zero)
            if key in seen:
                continue
            seen.add(key)
            zvec = []
            for e in basis:
                term = mp.mpf(1)
                for xv, ei in zip(zero, e):
                    if ei:
                        term = term * xv**ei
                zvec.append(term)
            top = max(abs(t) for t in zvec)
            if top < mp.mpf("1e-40"):
                # the polished zero is numerically the origin; over a
                # constant-free basis its monomial vector is the zero
                # vector, so normalizing would only amplify Newton noise
                # into a junk direction
                continue
            zvec = [t / top for t in zvec]
            closure.extend(
                _rational_closure([zvec], m, scale=10**30, tol=mp.mpf("1e-35"))
            )
    return closure


def _ldl(gram):
    """Exact LDL^T in the fixed basis order; None unless PSD-consistent."""
    m = len(gram)
    work = [row[:] for row in gram]
    diag = []
    lower = {}
    for k in range(m):
        d = work[k][k]
        if d < 0:
            return None
        if d == 0:
            if any(work[i][k] != 0 for i in range(k + 1, m)):
                return None
            diag.append(d)
            continue
        diag.append(d)
        col = [work[i][k] for i in range(m)]
        for i in range(k + 1, m):
            li = col[i] / d
            if li != 0:
                lower[(i, k)] = li
            for j in range(k + 1, i + 1):
                work[i][j] = work[i][j] - li * col[j]
    return diag, lower


def _squares_from_ldl(p, basis, factored):
    varset = p.varset
    diag, lower = factored
    m = len(basis)
    squares = []
    for k in range(m):
        if diag[k] == 0:
            continue
        w = Polynomial.monomial(varset, basis[k])
        for i in range(k + 1, m):
            li = lower.get((i, k))
            if li:
                w = w + Polynomial.monomial(varset, basis[i], li)
        w_rf = RationalFunction(w)
        for s in sos_constant(diag[k], varset).squares:
            squares.append(s * w_rf)
    return _checked(RationalFunction(p), squares, "gram")


def sos_gram_attempt(p: Polynomial) -> ScalarSOSCert:
    """Best-effort certificate via an exact PSD Gram matrix.

    Each coefficient of p constrains its own disjoint set of Gram
    entries, so the solver tries three deterministic splits first and
    falls back to a barrier search whose candidates are rationalized
    and re-verified exactly.  NotFound means the search budget ran out;
    it is NOT a proof that p has no sum-of-squares form.
    """
    if p.is_zero():
        return sos_zero(p.varset)
    varset = p.varset
    lead_exps = varset.unpack(p.leading_key())
    trail_exps = varset.unpack(p.trailing_key())
    if (
        any(e % 2 for e in lead_exps)
        or any(e % 2 for e in trail_exps)
        or p.terms[p.leading_key()] < 0
        or p.terms[p.trailing_key()] < 0
    ):
        raise NotFoundError("an extreme monomial is not an even square term")
    basis_set = _half_support_basis(p)
    if not basis_set:
        raise NotFoundError("no candidate square monomials survive support reduction")
    if len(basis_set) > _BASIS_LIMIT:
        raise NotFoundError(f"candidate basis has {len(basis_set)} monomials; giving up")
    basis = sorted(basis_set, key=lambda e: (sum(e), e), reverse=True)
    m = len(basis)
    equations = _gram_equations(p, basis)
    if equations is None:
        raise NotFoundError("some monomial is not a product of candidate squares")
    for assignment in _distribution_strategies(equations):
        factored = _ldl(_assemble_gram(m, equations, assignment))
        if factored is not None:
            return _squares_from_ldl(p, basis, factored)
    try:
        factored = _psd_search_numeric(p, basis, m, equations)
    except _Infeasible:
        raise NotFoundError(
            "no Gram matrix over the candidate basis is positive semidefinite"
        ) from None
    if factored is None:
        raise NotFoundError("no positive semidefinite Gram matrix found in budget")
    return _squares_from_ldl(p, basis, factored)


# certificate store and the provider chain


@dataclass(frozen=True)
class StoreRecord:
    target: Polynomial
    multiplier: Polynomial
    squares: tuple


class CertStore:
    """User-supplied certificates, looked up by canonical polynomial.

    A record either lists squares for the target directly, or, with a
    multiplier, lists squares for multiplier*target (the denominator
    lift then divides them out).  First matching record wins.
    """

    def __init__(self, records=()):
        self.records = list(records)
        self._by_target = {}
        for record in self.records:
            self._by_target.setdefault(record.target, record)

    @classmethod
    def empty(cls) -> "CertStore":
        return cls()

    @classmethod
    def parse(cls, text: str, varset: VarSet) -> "CertStore":
        from .errors import ParseError

        records = []
        target = None
        multiplier = None
        squares = []

        def flush(lineno):
            nonlocal target, multiplier, squares
            if target is None:
                return
            if not squares:
                raise ParseError("record has no square: lines", line=lineno)
            records.append(StoreRecord(target, multiplier, tuple(squares)))
            target, multiplier, squares = None, None, []

        lineno = 0
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, expr = line.partition(":")
            key = key.strip()
            if not sep or key not in ("target", "multiplier", "square"):
                raise ParseError(
                    "store lines are 'target:', 'multiplier:', or 'square:'",
                    line=lineno,
                )
            try:
                value = parse_poly(expr, varset)
            except ParseError as exc:
                raise ParseError(f"bad expression: {exc}", line=lineno) from None
            if key == "target":
                flush(lineno)
                target = value
            elif key == "multiplier":
                if target is None:
                    raise ParseError("multiplier: before any target:", line=lineno)
                if multiplier is not None:
                    raise ParseError("duplicate multiplier: line", line=lineno)
                multiplier = value
            else:
                if target is None:
                    raise ParseError("square: before any target:", line=lineno)
                squares.append(value)
        flush(lineno + 1)
        return cls(records)

    def lookup(self, target: Polynomial):
        return self._by_target.get(target)

    def __len__(self):
        return len(self.records)


def _store_provider(p, store, visiting):
    record = store.lookup(p)
    if record is None:
        raise NotApplicableError("no store record for this target")
    square_rfs = tuple(RationalFunction(s) for s in record.squares)
    if record.multiplier is None:
        return _checked(RationalFunction(p), square_rfs, "user-store")
    if record.multiplier in visiting:
        raise NotApplicableError("cyclic multiplier reference in the store")
    product_target = RationalFunction(record.multiplier * p)
    cert_of_product = ScalarSOSCert(
        target=product_target, squares=square_rfs, provider="user-store"
    )
    try:
        cert_of_multiplier = scalar_sos_pipeline(
            record.multiplier, store, _visiting=visiting | {p}
        )
    except ScalarSOSUnavailable as exc:
        raise NotApplicableError(f"multiplier has no certificate: {exc}") from None
    return sos_denominator_lift(
        p, record.multiplier, cert_of_product, cert_of_multiplier
    )


def scalar_sos_pipeline(
    p: Polynomial, store: CertStore = None, _visiting=frozenset()
) -> ScalarSOSCert:
    """First verified certificate from the provider chain, else
    ScalarSOSUnavailable carrying every provider's failure reason."""
    reasons = {}
    if p.is_zero():
        return sos_zero(p.varset)
    reasons["zero"] = "target is not the zero polynomial"
    if p.is_constant():
        try:
            return sos_constant(p.constant_value(), p.varset)
        except SOSProviderError as exc:
            reasons["constant"] = str(exc)
    else:
        reasons["constant"] = "target is not a constant"
    try:
        return sos_perfect_square(p)
    except SOSProviderError as exc:
        reasons["perfect-square"] = str(exc)
    try:
        return sos_monomial_squares(p)
    except SOSProviderError as exc:
        reasons["monomial-squares"] = str(exc)
    if store is None or len(store) == 0:
        reasons["user-store"] = "no certificate store supplied"
    else:
        try:
            return _store_provider(p, store, _visiting)
        except (SOSProviderError, VerificationFailedError) as exc:
            reasons["user-store"] = str(exc)
    try:
        return sos_gram_attempt(p)
    except SOSProviderError as exc:
        reasons["gram"] = str(exc)
    raise ScalarSOSUnavailable(
        f"no provider could certify {print_poly(p)}", target=p, reasons=reasons
    )
