"""Sparse multivariate polynomials over the rationals.

Monomials are packed into single integers: 16 bits per variable
exponent, with the total degree in the topmost field.  Plain integer
comparison of packed keys is then exactly graded-lexicographic order,
and integer addition of keys multiplies monomials.  The packing is safe
as long as every stored polynomial keeps total degree below 2^15, which
is enforced at construction; the product of two in-range polynomials
cannot overflow a field before the check runs on the result.
"""

from __future__ import annotations

import math
import re

from .errors import DimensionMismatchError, ExactDivisionError, ParseError
from .rationals import RAT_ONE, RAT_ZERO, BigRat, rat

SHIFT = 16
MASK = (1 << SHIFT) - 1
DEGREE_LIMIT = 1 << 15

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


class VarSet:
    """An ordered set of variable names, fixed for a whole computation.

    Provides the packing and unpacking between exponent vectors and the
    integer monomial keys used by Polynomial.
    """

    __slots__ = ("names", "v", "_index")

    def __init__(self, names):
        names = tuple(names)
        seen = set()
        for name in names:
            if not isinstance(name, str) or not _NAME_RE.match(name):
                raise ValueError(f"invalid variable name: {name!r}")
            if name in seen:
                raise ValueError(f"duplicate variable name: {name!r}")
            seen.add(name)
        self.names = names
        self.v = len(names)
        self._index = {name: i for i, name in enumerate(names)}

    def index(self, name: str) -> int:
        return self._index[name]

    def pack(self, exps) -> int:
        exps = tuple(exps)
        if len(exps) != self.v:
            raise DimensionMismatchError(
                f"expected {self.v} exponents, got {len(exps)}"
            )
        key = 0
        total = 0
        for e in exps:
            if e < 0 or e >= DEGREE_LIMIT:
                raise OverflowError(f"exponent {e} out of range [0, {DEGREE_LIMIT})")
            key = (key << SHIFT) | e
            total += e
        if total >= DEGREE_LIMIT:
            raise OverflowError(f"total degree {total} exceeds limit {DEGREE_LIMIT - 1}")
        return key | (total << (SHIFT * self.v))

    def unpack(self, key: int):
        return tuple(
            (key >> (SHIFT * (self.v - 1 - i))) & MASK for i in range(self.v)
        )

    def __eq__(self, other):
        return isinstance(other, VarSet) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VarSet({list(self.names)!r})"


def _check_varsets(a, b):
    if a.varset != b.varset:
        raise DimensionMismatchError(
            f"mixed variable sets: {a.varset!r} vs {b.varset!r}"
        )


class Polynomial:
    """Immutable sparse polynomial: map from packed monomial key to BigRat.

    Zero coefficients are never stored; the zero polynomial has an empty
    term map.  Canonical term order is graded lexicographic, which is
    plain descending order of the packed keys.
    """

    __slots__ = ("varset", "terms", "_hash")

    def __init__(self, varset: VarSet, terms: dict, _trusted: bool = False):
        if not _trusted:
            clean = {}
            for key, coeff in terms.items():
                coeff = rat(coeff)
                if coeff != 0:
                    clean[key] = coeff
            terms = clean
        self.varset = varset
        self.terms = terms
        self._hash = None
        if terms:
            top = max(terms) >> (SHIFT * varset.v)
            if top >= DEGREE_LIMIT:
                raise OverflowError(
                    f"total degree {top} exceeds limit {DEGREE_LIMIT - 1}"
                )

    # construction helpers

    @classmethod
    def zero(cls, varset: VarSet) -> "Polynomial":
        return cls(varset, {}, _trusted=True)

    @classmethod
    def constant(cls, varset: VarSet, value) -> "Polynomial":
        value = rat(value)
        if value == 0:
            return cls.zero(varset)
        return cls(varset, {0: value}, _trusted=True)

    @classmethod
    def one(cls, varset: VarSet) -> "Polynomial":
        return cls.constant(varset, 1)

    @classmethod
    def variable(cls, varset: VarSet, name: str) -> "Polynomial":
        i = varset.index(name)
        exps = [0] * varset.v
        exps[i] = 1
        return cls(varset, {varset.pack(exps): RAT_ONE}, _trusted=True)

    @classmethod
    def monomial(cls, varset: VarSet, exps, coeff=1) -> "Polynomial":
        coeff = rat(coeff)
        if coeff == 0:
            return cls.zero(varset)
        return cls(varset, {varset.pack(exps): coeff}, _trusted=True)

    @classmethod
    def from_terms(cls, varset: VarSet, exp_coeffs: dict) -> "Polynomial":
        return cls(varset, {varset.pack(e): c for e, c in exp_coeffs.items()})

    # predicates and views

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get(0, RAT_ZERO)

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(self.terms) >> (SHIFT * self.varset.v)

    def degree_in(self, var_index: int) -> int:
        if not self.terms:
            return -1
        off = SHIFT * (self.varset.v - 1 - var_index)
        return max((key >> off) & MASK for key in self.terms)

    def leading_key(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms)

    def leading_coeff(self):
        return self.terms[self.leading_key()]

    def trailing_key(self) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no trailing term")
        return min(self.terms)

    def sorted_terms(self):
        """Terms as (exponent tuple, coefficient), descending graded-lex."""
        unpack = self.varset.unpack
        return [(unpack(key), self.terms[key]) for key in sorted(self.terms, reverse=True)]

    # ring operations

    def __add__(self, other):
        if isinstance(other, (int, BigRat)):
            other = Polynomial.constant(self.varset, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        _check_varsets(self, other)
        if len(self.terms) < len(other.terms):
            self, other = other, self
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            acc = terms.get(key)
            if acc is None:
                terms[key] = coeff
            else:
                acc = acc + coeff
                if acc == 0:
                    del terms[key]
                else:
                    terms[key] = acc
        return Polynomial(self.varset, terms, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(
            self.varset, {k: -c for k, c in self.terms.items()}, _trusted=True
        )

    def __sub__(self, other):
        if isinstance(other, (int, BigRat)):
            other = Polynomial.constant(self.varset, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, BigRat)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        _check_varsets(self, other)
        if not self.terms or not other.terms:
            return Polynomial.zero(self.varset)
        if len(self.terms) < len(other.terms):
            self, other = other, self
        if len(other.terms) == 1:
            ((k2, c2),) = other.terms.items()
            return Polynomial(
                self.varset, {k1 + k2: c1 * c2 for k1, c1 in self.terms.items()}
            )
        terms = {}
        get = terms.get
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = k1 + k2
                acc = get(key)
                terms[key] = c1 * c2 if acc is None else acc + c1 * c2
        return Polynomial(self.varset, terms)

    __rmul__ = __mul__

    def scale(self, value) -> "Polynomial":
        value = rat(value)
        if value == 0:
            return Polynomial.zero(self.varset)
        return Polynomial(
            self.varset, {k: c * value for k, c in self.terms.items()}, _trusted=True
        )

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("polynomial powers take a nonnegative integer")
        result = Polynomial.one(self.varset)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base_needed = e >> 1
            if base_needed:
                base = base * base
            e = base_needed
        return result

    def __eq__(self, other):
        if isinstance(other, (int, BigRat)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.varset == other.varset and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(
                (self.varset, frozenset((k, c) for k, c in self.terms.items()))
            )
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def eval(self, point):
        """Exact evaluation at a point of BigRat coordinates."""
        if len(point) != self.varset.v:
            raise DimensionMismatchError(
                f"point has {len(point)} coordinates, need {self.varset.v}"
            )
        pt = [rat(x) for x in point]
        unpack = self.varset.unpack
        total = RAT_ZERO
        for key, coeff in self.terms.items():
            val = coeff
            for x, e in zip(pt, unpack(key)):
                if e:
                    val = val * x ** e
            total += val
        return total

    def __repr__(self):
        return f"Polynomial({print_poly(self)!r})"


# functional aliases for the core ring operations

def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    return a + b


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    return a * b


def poly_neg(a: Polynomial) -> Polynomial:
    return -a


def poly_eval(p: Polynomial, point):
    return p.eval(point)


def poly_partial(p: Polynomial, var_index: int) -> Polynomial:
    """Partial derivative with respect to the variable at var_index."""
    vs = p.varset
    if var_index < 0 or var_index >= vs.v:
        raise DimensionMismatchError(
            f"variable index {var_index} out of range for {vs.v} variables"
        )
    out = {}
    for key, coeff in p.terms.items():
        exps = vs.unpack(key)
        e = exps[var_index]
        if e == 0:
            continue
        lowered = exps[:var_index] + (e - 1,) + exps[var_index + 1 :]
        out[lowered] = coeff * e
    return Polynomial.from_terms(vs, out)


# printing and parsing


def print_poly(p: Polynomial) -> str:
    """Canonical text form: terms in descending graded-lex order."""
    if not p.terms:
        return "0"
    names = p.varset.names
    unpack = p.varset.unpack
    out = []
    for key in sorted(p.terms, reverse=True):
        coeff = p.terms[key]
        negative = coeff < 0
        mag = -coeff if negative else coeff
        mono = "*".join(
            name if e == 1 else f"{name}^{e}"
            for name, e in zip(names, unpack(key))
            if e
        )
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not out:
            out.append(f"-{body}" if negative else body)
        else:
            out.append(f" - {body}" if negative else f" + {body}")
    return "".join(out)


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()/]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(
                f"unexpected character {stripped[0]!r}", position=pos
            )
        if m.lastgroup == "number":
            tokens.append(("number", int(m.group("number")), m.start("number")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    """Recursive descent over the expression grammar.

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' uint)?
    base   := rational | var | '(' expr ')'

    Division appears only inside rational literals like 3/4.  The
    leading unary minus lets printed polynomials with a negative leading
    coefficient round-trip through the parser.
    """

    def __init__(self, tokens, varset, text):
        self.tokens = tokens
        self.varset = varset
        self.text = text
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, position=tok[2])

    def parse_expr(self) -> Polynomial:
        kind, value, _ = self.peek()
        negate = False
        if kind == "op" and value == "-":
            self.advance()
            negate = True
        result = self.parse_term()
        if negate:
            result = -result
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                term = self.parse_term()
                result = result + term if value == "+" else result - term
            else:
                return result

    def parse_term(self) -> Polynomial:
        result = self.parse_factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == "*":
                self.advance()
                result = result * self.parse_factor()
            elif kind == "op" and value == "/":
                self.error("division is only allowed inside rational literals like 3/4")
            else:
                return result

    def parse_factor(self) -> Polynomial:
        base = self.parse_base()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            kind, value, tok_pos = self.tokens[self.i]
            if kind != "number":
                self.error("exponent must be a nonnegative integer")
            self.advance()
            return base ** value
        return base

    def parse_base(self) -> Polynomial:
        kind, value, pos = self.advance()
        if kind == "number":
            nxt_kind, nxt_value, _ = self.peek()
            if nxt_kind == "op" and nxt_value == "/":
                self.advance()
                den_kind, den_value, den_pos = self.advance()
                if den_kind != "number":
                    raise ParseError(
                        "denominator of a rational literal must be an integer",
                        position=den_pos,
                    )
                if den_value == 0:
                    raise ParseError("zero denominator", position=den_pos)
                return Polynomial.constant(self.varset, rat(value, den_value))
            return Polynomial.constant(self.varset, value)
        if kind == "name":
            if value not in self.varset._index:
                raise ParseError(f"unknown variable {value!r}", position=pos)
            return Polynomial.variable(self.varset, value)
        if kind == "op" and value == "(":
            inner = self.parse_expr()
            kind, value, pos = self.advance()
            if not (kind == "op" and value == ")"):
                raise ParseError("expected ')'", position=pos)
            return inner
        raise ParseError(
            "expected a number, variable, or parenthesized expression", position=pos
        )

    def expect_end(self):
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input {value!r}", position=pos)


def parse_poly(text: str, varset: VarSet) -> Polynomial:
    """Parse an expression into canonical expanded form.

    Grammar: integers, rationals a/b, variables, + - * ^, parentheses;
    ^ takes a nonnegative integer.  A single leading '-' is accepted so
    print_poly output always parses back.
    """
    parser = _Parser(_tokenize(text), varset, text)
    result = parser.parse_expr()
    parser.expect_end()
    return result


# exact division, contents, square roots, heuristic gcd


def exact_div(f: Polynomial, g: Polynomial) -> Polynomial:
    """Quotient f/g when g divides f exactly; ExactDivisionError otherwise.

    Greedy leading-term elimination in graded-lex order.  For an exact
    multiple the leading term of every remainder stays divisible by the
    leading term of g, so the loop cannot strand.
    """
    _check_varsets(f, g)
    if g.is_zero():
        raise ExactDivisionError("division by the zero polynomial")
    if f.is_zero():
        return f
    varset = f.varset
    g_key = g.leading_key()
    g_exps = varset.unpack(g_key)
    g_coeff = g.terms[g_key]
    quotient = {}
    remainder = dict(f.terms)
    while remainder:
        r_key = max(remainder)
        r_exps = varset.unpack(r_key)
        if any(re_ < ge_ for re_, ge_ in zip(r_exps, g_exps)):
            raise ExactDivisionError("inexact polynomial division")
        q_key = r_key - g_key
        q_coeff = remainder[r_key] / g_coeff
        quotient[q_key] = q_coeff
        for key, coeff in g.terms.items():
            target = key + q_key
            acc = remainder.get(target, RAT_ZERO) - coeff * q_coeff
            if acc == 0:
                remainder.pop(target, None)
            else:
                remainder[target] = acc
    return Polynomial(varset, quotient, _trusted=True)


def divides(g: Polynomial, f: Polynomial) -> bool:
    try:
        exact_div(f, g)
        return True
    except ExactDivisionError:
        return False


def integer_primitive(p: Polynomial):
    """Split p = scalar * primitive with integer coprime coefficients.

    The primitive part has positive leading coefficient; the zero
    polynomial returns (1, 0).
    """
    if p.is_zero():
        return RAT_ONE, p
    den_lcm = 1
    for coeff in p.terms.values():
        den_lcm = math.lcm(den_lcm, int(coeff.denominator))
    ints = {k: int(c * den_lcm) for k, c in p.terms.items()}
    g = 0
    for value in ints.values():
        g = math.gcd(g, value)
    if ints[max(ints)] < 0:
        g = -g
    prim = Polynomial(p.varset, {k: rat(c // g) for k, c in ints.items()}, _trusted=True)
    return rat(g, den_lcm), prim


def monomial_content_key(p: Polynomial) -> int:
    """Packed key of the largest monomial dividing every term of p."""
    if p.is_zero():
        return 0
    varset = p.varset
    mins = None
    for key in p.terms:
        exps = varset.unpack(key)
        mins = exps if mins is None else tuple(map(min, mins, exps))
    return varset.pack(mins)


def divide_by_monomial(p: Polynomial, key: int) -> Polynomial:
    if key == 0:
        return p
    return Polynomial(p.varset, {k - key: c for k, c in p.terms.items()}, _trusted=True)


def poly_square_root(p: Polynomial):
    """The polynomial q with q^2 = p, or None.

    Expects p monic in its graded-lex leading coefficient (callers
    factor out the leading coefficient first).  Greedy digit-by-digit
    extraction; the final verification makes the routine sound even if
    the greedy loop is cut short.
    """
    if p.is_zero():
        return Polynomial.zero(p.varset)
    varset = p.varset
    lead = p.leading_key()
    if p.terms[lead] != 1:
        return None
    exps = varset.unpack(lead)
    if any(e % 2 for e in exps):
        return None
    half = varset.pack(tuple(e // 2 for e in exps))
    half_exps = varset.unpack(half)
    q = {half: RAT_ONE}
    residual = dict(p.terms)
    del residual[lead]
    steps = 4 * (len(p.terms) + 2) ** 2
    while residual:
        steps -= 1
        if steps < 0:
            return None
        r_key = max(residual)
        r_exps = varset.unpack(r_key)
        if any(re_ < he_ for re_, he_ in zip(r_exps, half_exps)):
            return None
        t_key = r_key - half
        t_coeff = residual[r_key] / 2
        # residual -= 2*q*t + t^2, then q += t
        for key, coeff in q.items():
            target = key + t_key
            acc = residual.get(target, RAT_ZERO) - 2 * coeff * t_coeff
            if acc == 0:
                residual.pop(target, None)
            else:
                residual[target] = acc
        target = t_key + t_key
        acc = residual.get(target, RAT_ZERO) - t_coeff * t_coeff
        if acc == 0:
            residual.pop(target, None)
        else:
            residual[target] = acc
        q[t_key] = t_coeff
    root = Polynomial(varset, q)
    if root * root == p:
        return root
    return None


def _symmetric_mod(p: Polynomial, xi: int):
    """Coefficient-wise least absolute residue mod xi; None on non-integers."""
    terms = {}
    for key, coeff in p.terms.items():
        if coeff.denominator != 1:
            return None
        r = int(coeff) % xi
        if r > xi // 2:
            r -= xi
        if r:
            terms[key] = rat(r)
    return Polynomial(p.varset, terms, _trusted=True)


def _subs_int(p: Polynomial, var_index: int, xi: int) -> Polynomial:
    """Substitute an integer for one variable, staying in the same VarSet."""
    varset = p.varset
    terms = {}
    for key, coeff in p.terms.items():
        exps = list(varset.unpack(key))
        e = exps[var_index]
        if e:
            coeff = coeff * xi ** e
            exps[var_index] = 0
        new_key = varset.pack(exps)
        acc = terms.get(new_key)
        terms[new_key] = coeff if acc is None else acc + coeff
    return Polynomial(varset, terms)


def _max_abs_coeff(p: Polynomial) -> int:
    return max(abs(int(c)) for c in p.terms.values())


def _reconstruct_from_digits(h_img: Polynomial, var_index: int, xi: int, cap: int):
    varset = h_img.varset
    digits = []
    cur = h_img
    while not cur.is_zero():
        if len(digits) > cap:
            return None
        digit = _symmetric_mod(cur, xi)
        if digit is None:
            return None
        digits.append(digit)
        cur = (cur - digit).scale(rat(1, xi))
    exps = [0] * varset.v
    result = Polynomial.zero(varset)
    for k, digit in enumerate(digits):
        exps[var_index] = k
        result = result + digit * Polynomial.monomial(varset, exps)
    return result


def _heugcd(f: Polynomial, g: Polynomial, tries: int) -> Polynomial:
    varset = f.varset
    active = -1
    for i in range(varset.v - 1, -1, -1):
        if f.degree_in(i) > 0 or g.degree_in(i) > 0:
            active = i
            break
    if active < 0:
        a = abs(int(f.constant_value())) if not f.is_zero() else 0
        b = abs(int(g.constant_value())) if not g.is_zero() else 0
        return Polynomial.constant(varset, math.gcd(a, b) or 1)
    cap = min(max(f.degree_in(active), 0), max(g.degree_in(active), 0))
    xi = 2 * min(_max_abs_coeff(f), _max_abs_coeff(g)) + 29
    for _ in range(tries):
        f_img = _subs_int(f, active, xi)
        g_img = _subs_int(g, active, xi)
        if not f_img.is_zero() and not g_img.is_zero():
            h_img = _heugcd(f_img, g_img, tries)
            h = _reconstruct_from_digits(h_img, active, xi, cap)
            if h is not None and not h.is_zero():
                # keep integer content: at image levels it encodes powers
                # of the variables substituted further out, so stripping
                # it here would lose those factors.  The top level takes
                # the primitive part once, at the end.
                if divides(h, f) and divides(h, g):
                    return h
        xi = xi * 73 + 29
    return Polynomial.one(varset)


def heuristic_gcd(f: Polynomial, g: Polynomial, tries: int = 6) -> Polynomial:
    """A verified common divisor of f and g, integer-primitive.

    Evaluation-reconstruction gcd: substitute a large integer for one
    variable, recurse, lift back via symmetric base-xi digits, and
    verify by exact division.  May return 1 when it gives up, so callers
    can rely on the result only as a divisor, never as THE gcd.
    """
    _check_varsets(f, g)
    if f.is_zero() and g.is_zero():
        return Polynomial.zero(f.varset)
    if f.is_zero():
        return integer_primitive(g)[1]
    if g.is_zero():
        return integer_primitive(f)[1]
    fp = integer_primitive(f)[1]
    gp = integer_primitive(g)[1]
    return integer_primitive(_heugcd(fp, gp, tries))[1]
