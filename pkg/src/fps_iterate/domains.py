"""Exact coefficient domains: rationals, prime fields, sparse polynomial rings.

Values are immutable and canonical, so equal values have identical
representations, ``==`` is exact structural equality, and printing is
deterministic. Nothing here ever rounds.
"""

from __future__ import annotations

import re
from fractions import Fraction

__all__ = [
    "Domain",
    "Rationals",
    "PrimeField",
    "PolynomialRing",
    "FpElement",
    "Polynomial",
    "RATIONALS",
    "domain_from_json",
    "is_prime",
]


_MILLER_RABIN_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test, exact below 3.3e24."""
    if n < 2:
        return False
    for w in _MILLER_RABIN_WITNESSES:
        if n % w == 0:
            return n == w
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MILLER_RABIN_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_RATIONAL_RE = re.compile(r"[+-]?\d+(?:/\d+)?")
_INTEGER_RE = re.compile(r"[+-]?\d+")
_VARIABLE_RE = re.compile(r"a(\d+)(?:\^(\d+))?")


class FpElement:
    """Residue modulo a prime, kept canonical in [0, p).

    Arithmetic only combines residues with the same modulus; anything else
    is rejected rather than silently coerced.
    """

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.value = value % p
        self.p = p

    def _lift(self, other):
        if isinstance(other, FpElement):
            if other.p != self.p:
                raise ValueError(f"mixed moduli {self.p} and {other.p}")
            return other
        return None

    def __add__(self, other):
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        return FpElement(self.value + rhs.value, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        return FpElement(self.value - rhs.value, self.p)

    def __mul__(self, other):
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        return FpElement(self.value * rhs.value, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElement(-self.value, self.p)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a nonnegative integer")
        return FpElement(pow(self.value, exponent, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, FpElement):
            return self.p == other.p and self.value == other.value
        return NotImplemented

    def __hash__(self):
        return hash((FpElement, self.p, self.value))

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return f"FpElement({self.value}, {self.p})"


def _strip(exps) -> tuple[int, ...]:
    end = len(exps)
    while end and exps[end - 1] == 0:
        end -= 1
    return tuple(exps[:end])


def _mul_key(e1: tuple[int, ...], e2: tuple[int, ...]) -> tuple[int, ...]:
    if len(e1) < len(e2):
        e1, e2 = e2, e1
    return tuple(a + b for a, b in zip(e1, e2)) + e1[len(e2):]


class Polynomial:
    """Sparse multivariate polynomial over the rationals.

    ``terms`` maps exponent vectors (tuples with no trailing zeros) to
    nonzero Fraction coefficients; the zero polynomial has no terms. The
    mapping is never mutated after construction.
    """

    __slots__ = ("num_vars", "terms")

    def __init__(self, num_vars: int, terms=None):
        if num_vars < 1:
            raise ValueError("num_vars must be >= 1")
        canon: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in (terms or {}).items():
            coeff = Fraction(coeff)
            if coeff == 0:
                continue
            if any(not isinstance(e, int) or e < 0 for e in exps):
                raise ValueError("exponents must be nonnegative integers")
            key = _strip(exps)
            if len(key) > num_vars:
                raise ValueError("exponent vector longer than num_vars")
            total = canon.get(key, Fraction(0)) + coeff
            if total:
                canon[key] = total
            else:
                canon.pop(key, None)
        self.num_vars = num_vars
        self.terms = canon

    @classmethod
    def _raw(cls, num_vars: int, terms: dict) -> "Polynomial":
        # trusted constructor: terms must already be canonical
        poly = object.__new__(cls)
        poly.num_vars = num_vars
        poly.terms = terms
        return poly

    def _lift(self, other):
        if isinstance(other, Polynomial):
            if other.num_vars != self.num_vars:
                raise ValueError("mixed polynomial rings")
            return other
        return None

    def __add__(self, other):
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        out = dict(self.terms)
        for exps, coeff in rhs.terms.items():
            total = out.get(exps, Fraction(0)) + coeff
            if total:
                out[exps] = total
            else:
                out.pop(exps, None)
        return Polynomial._raw(self.num_vars, out)

    __radd__ = __add__

    def __sub__(self, other):
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __neg__(self):
        return Polynomial._raw(
            self.num_vars, {e: -c for e, c in self.terms.items()}
        )

    def __mul__(self, other):
        rhs = self._lift(other)
        if rhs is None:
            return NotImplemented
        out: dict[tuple[int, ...], Fraction] = {}
        get = out.get
        for e1, c1 in self.terms.items():
            for e2, c2 in rhs.terms.items():
                key = _mul_key(e1, e2)
                total = get(key)
                if total is None:
                    out[key] = c1 * c2
                else:
                    total = total + c1 * c2
                    if total:
                        out[key] = total
                    else:
                        del out[key]
        return Polynomial._raw(self.num_vars, out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a nonnegative integer")
        if exponent == 0:
            return Polynomial._raw(self.num_vars, {(): Fraction(1)})
        if len(self.terms) == 1:
            ((exps, coeff),) = self.terms.items()
            key = tuple(e * exponent for e in exps)
            return Polynomial._raw(self.num_vars, {key: coeff ** exponent})
        base = self
        result = None
        e = exponent
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.num_vars == other.num_vars and self.terms == other.terms
        return NotImplemented

    __hash__ = None

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, index: int) -> int:
        """Highest power of variable ``index`` (1-based) in any term."""
        if not 1 <= index <= self.num_vars:
            raise ValueError(f"variable index {index} outside 1..{self.num_vars}")
        return max(
            (e[index - 1] for e in self.terms if len(e) >= index), default=0
        )

    def _ordered_terms(self):
        # graded-lex, highest first
        pad = self.num_vars

        def key(item):
            exps = item[0]
            return (sum(exps), exps + (0,) * (pad - len(exps)))

        return sorted(self.terms.items(), key=key, reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for exps, coeff in self._ordered_terms():
            mono = "*".join(
                f"a{i + 1}" if e == 1 else f"a{i + 1}^{e}"
                for i, e in enumerate(exps)
                if e
            )
            mag = -coeff if coeff < 0 else coeff
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not pieces:
                pieces.append(body if coeff > 0 else f"-{body}")
            else:
                pieces.append(f" + {body}" if coeff > 0 else f" - {body}")
        return "".join(pieces)

    def __repr__(self):
        return f"Polynomial({self.num_vars}, {self})"


def _signed_chunks(text: str) -> list[tuple[int, str]]:
    out = []
    for i, plus_part in enumerate(text.split(" + ")):
        for j, piece in enumerate(plus_part.split(" - ")):
            sign = -1 if j > 0 else 1
            piece = piece.strip()
            if i == 0 and j == 0 and piece.startswith("-"):
                sign = -1
                piece = piece[1:].strip()
            if not piece:
                raise ValueError("empty term in polynomial literal")
            out.append((sign, piece))
    return out


def _parse_polynomial(text: str, num_vars: int) -> Polynomial:
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial literal")
    if s == "0":
        return Polynomial._raw(num_vars, {})
    terms: dict[tuple[int, ...], Fraction] = {}
    for sign, chunk in _signed_chunks(s):
        coeff = Fraction(sign)
        exps = [0] * num_vars
        for factor in chunk.split("*"):
            factor = factor.strip()
            if _RATIONAL_RE.fullmatch(factor):
                try:
                    coeff *= Fraction(factor)
                except ZeroDivisionError:
                    raise ValueError(f"zero denominator in {factor!r}") from None
                continue
            m = _VARIABLE_RE.fullmatch(factor)
            if m is None:
                raise ValueError(f"bad polynomial factor {factor!r}")
            index = int(m.group(1))
            if not 1 <= index <= num_vars:
                raise ValueError(f"variable a{index} outside a1..a{num_vars}")
            exps[index - 1] += int(m.group(2) or 1)
        key = _strip(exps)
        terms[key] = terms.get(key, Fraction(0)) + coeff
    return Polynomial(num_vars, terms)


class Domain:
    """A coefficient domain: element checks plus exact ring operations.

    Subclasses fix the element type and canonical form. The instance doubles
    as the domain descriptor (value equality, JSON round-trip).
    """

    kind = "abstract"
    is_field = False

    def contains(self, x) -> bool:
        raise NotImplementedError

    def check(self, x) -> None:
        if not self.contains(x):
            raise ValueError(f"{x!r} is not an element of {self}")

    def add(self, a, b):
        self.check(a)
        self.check(b)
        return a + b

    def sub(self, a, b):
        self.check(a)
        self.check(b)
        return a - b

    def mul(self, a, b):
        self.check(a)
        self.check(b)
        return a * b

    def neg(self, a):
        self.check(a)
        return -a

    def pow(self, a, exponent: int):
        self.check(a)
        return a ** exponent

    def inv(self, a):
        raise ValueError("not a field")

    def from_int(self, m: int):
        raise NotImplementedError

    def from_fraction(self, q: Fraction):
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, x) -> str:
        self.check(x)
        return str(x)

    def to_json(self):
        raise NotImplementedError


class Rationals(Domain):
    """Arbitrary-precision rational numbers (``fractions.Fraction``)."""

    kind = "rational"
    is_field = True
    zero = Fraction(0)
    one = Fraction(1)

    def contains(self, x) -> bool:
        return isinstance(x, Fraction)

    def inv(self, a):
        self.check(a)
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def from_int(self, m: int):
        return Fraction(m)

    def from_fraction(self, q: Fraction):
        return Fraction(q)

    def parse(self, text: str):
        if not isinstance(text, str) or not _RATIONAL_RE.fullmatch(text.strip()):
            raise ValueError(f"bad rational literal {text!r}")
        try:
            return Fraction(text.strip())
        except ZeroDivisionError:
            raise ValueError(f"zero denominator in {text!r}") from None

    def to_json(self):
        return "rational"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash(Rationals)

    def __repr__(self):
        return "Rationals()"


RATIONALS = Rationals()


class PrimeField(Domain):
    """Integers modulo a prime p, residues kept in [0, p)."""

    kind = "prime_field"
    is_field = True

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.zero = FpElement(0, p)
        self.one = FpElement(1, p)

    def contains(self, x) -> bool:
        return isinstance(x, FpElement) and x.p == self.p

    def inv(self, a):
        self.check(a)
        if a.value == 0:
            raise ZeroDivisionError("inverse of zero")
        return FpElement(pow(a.value, -1, self.p), self.p)

    def from_int(self, m: int):
        return FpElement(m, self.p)

    def from_fraction(self, q: Fraction):
        q = Fraction(q)
        if q.denominator % self.p == 0:
            raise ValueError(
                f"denominator {q.denominator} not invertible modulo {self.p}"
            )
        return FpElement(
            q.numerator * pow(q.denominator, -1, self.p), self.p
        )

    def parse(self, text: str):
        if not isinstance(text, str) or not _INTEGER_RE.fullmatch(text.strip()):
            raise ValueError(f"bad integer literal {text!r}")
        return FpElement(int(text), self.p)

    def to_json(self):
        return {"prime": self.p}

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash((PrimeField, self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


class PolynomialRing(Domain):
    """Polynomials over the rationals in variables a1..a{num_vars}."""

    kind = "polynomial_ring"
    is_field = False

    def __init__(self, num_vars: int):
        if num_vars < 1:
            raise ValueError("num_vars must be >= 1")
        self.num_vars = num_vars
        self.zero = Polynomial._raw(num_vars, {})
        self.one = Polynomial._raw(num_vars, {(): Fraction(1)})

    def contains(self, x) -> bool:
        return isinstance(x, Polynomial) and x.num_vars == self.num_vars

    def variable(self, index: int) -> Polynomial:
        """The generator a_index, 1-based."""
        if not 1 <= index <= self.num_vars:
            raise ValueError(
                f"variable index {index} outside 1..{self.num_vars}"
            )
        key = (0,) * (index - 1) + (1,)
        return Polynomial._raw(self.num_vars, {key: Fraction(1)})

    def from_int(self, m: int):
        return Polynomial(self.num_vars, {(): Fraction(m)})

    def from_fraction(self, q: Fraction):
        return Polynomial(self.num_vars, {(): Fraction(q)})

    def parse(self, text: str):
        if not isinstance(text, str):
            raise ValueError("polynomial literal must be a string")
        return _parse_polynomial(text, self.num_vars)

    def substitute(self, p: Polynomial, values, target: Domain | None = None):
        """Evaluate p at ``values`` (one per variable) in the target domain.

        The target is inferred from the assignment when not given; plain
        ints are promoted to rationals first.
        """
        self.check(p)
        values = [Fraction(v) if isinstance(v, int) else v for v in values]
        if len(values) != self.num_vars:
            raise ValueError(
                f"assignment length {len(values)} != num_vars {self.num_vars}"
            )
        if target is None:
            target = _infer_domain(values)
        for v in values:
            target.check(v)
        result = target.zero
        for exps, coeff in p.terms.items():
            term = target.from_fraction(coeff)
            for i, e in enumerate(exps):
                if e:
                    term = term * values[i] ** e
            result = result + term
        return result

    def to_json(self):
        return {"symbolic": self.num_vars}

    def __eq__(self, other):
        return (
            isinstance(other, PolynomialRing)
            and other.num_vars == self.num_vars
        )

    def __hash__(self):
        return hash((PolynomialRing, self.num_vars))

    def __repr__(self):
        return f"PolynomialRing({self.num_vars})"


def _infer_domain(values) -> Domain:
    first = values[0]
    if isinstance(first, Fraction):
        return RATIONALS
    if isinstance(first, FpElement):
        return PrimeField(first.p)
    if isinstance(first, Polynomial):
        return PolynomialRing(first.num_vars)
    raise ValueError(f"cannot infer a domain from {first!r}")


def domain_from_json(obj) -> Domain:
    """Inverse of Domain.to_json for the three supported domains."""
    if obj == "rational":
        return RATIONALS
    if isinstance(obj, dict):
        if set(obj) == {"prime"}:
            return PrimeField(obj["prime"])
        if set(obj) == {"symbolic"}:
            return PolynomialRing(obj["symbolic"])
    raise ValueError(f"bad domain descriptor {obj!r}")
