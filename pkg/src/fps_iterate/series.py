"""Truncated formal power series with zero constant term.

A series is the coefficient vector a_1..a_K of f(x) = a_1 x + ... + a_K x^K.
Multiplication, powering, composition, and iteration are exact in the
coefficient domain and always stay at the same truncation order. Composition
and iteration are deliberately naive so they can serve as the ground-truth
oracle for every shortcut formula.
"""

from __future__ import annotations

from typing import NamedTuple

from .domains import Domain, domain_from_json


class TruncatedSeries:
    """Immutable truncated series over an exact coefficient domain."""

    __slots__ = ("domain", "order", "coeffs")

    def __init__(self, domain: Domain, order: int, coeffs):
        if not isinstance(order, int) or order < 1:
            raise ValueError("truncation order must be a positive integer")
        coeffs = tuple(coeffs)
        if len(coeffs) != order:
            raise ValueError(
                f"expected {order} coefficients, got {len(coeffs)}"
            )
        for c in coeffs:
            domain.check(c)
        self.domain = domain
        self.order = order
        self.coeffs = coeffs

    @classmethod
    def from_coefficients(cls, domain, coeffs, order=None) -> "TruncatedSeries":
        """Build from leading coefficients, zero-padded up to ``order``."""
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs)
        if order < len(coeffs):
            raise ValueError(
                "order smaller than the coefficient list; truncate explicitly"
            )
        coeffs.extend([domain.zero] * (order - len(coeffs)))
        return cls(domain, order, coeffs)

    def coefficient(self, k: int):
        """The coefficient of x^k, 1-based."""
        if not 1 <= k <= self.order:
            raise ValueError(f"coefficient index {k} outside 1..{self.order}")
        return self.coeffs[k - 1]

    def _like(self, other: "TruncatedSeries") -> None:
        if not isinstance(other, TruncatedSeries):
            raise ValueError("expected a TruncatedSeries")
        if other.domain != self.domain:
            raise ValueError("domain mismatch")
        if other.order != self.order:
            raise ValueError("order mismatch")

    def add(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._like(other)
        return TruncatedSeries(
            self.domain,
            self.order,
            [a + b for a, b in zip(self.coeffs, other.coeffs)],
        )

    def scale(self, c) -> "TruncatedSeries":
        self.domain.check(c)
        return TruncatedSeries(
            self.domain, self.order, [c * a for a in self.coeffs]
        )

    def mul(self, other: "TruncatedSeries") -> "TruncatedSeries":
        """Cauchy product truncated at the common order.

        Both factors have zero constant term, so the product coefficient at
        x^m is the convolution over 1 <= j <= m-1 and the x^1 coefficient
        vanishes.
        """
        self._like(other)
        dom = self.domain
        a, b = self.coeffs, other.coeffs
        out = []
        for m in range(1, self.order + 1):
            acc = dom.zero
            for j in range(1, m):
                acc = acc + a[j - 1] * b[m - j - 1]
            out.append(acc)
        return TruncatedSeries(dom, self.order, out)

    def pow(self, i: int) -> "TruncatedSeries":
        """The i-th power as an i-fold product, i >= 1."""
        if not isinstance(i, int) or i < 1:
            raise ValueError("constant term unsupported: power i must be >= 1")
        result = self
        for _ in range(i - 1):
            result = result.mul(self)
        return result

    def compose(self, other: "TruncatedSeries") -> "TruncatedSeries":
        """self(other(x)) to the common truncation order, Horner style."""
        self._like(other)
        acc = other.scale(self.coeffs[-1])
        for m in range(self.order - 1, 0, -1):
            acc = acc.mul(other).add(other.scale(self.coeffs[m - 1]))
        return acc

    def iterate(self, n: int) -> "IterationResult":
        """The n-fold self-composition, folding f^(n) = f^(n-1) o f."""
        if not isinstance(n, int) or n < 1:
            raise ValueError("iteration count n must be >= 1")
        result = self
        for _ in range(n - 1):
            result = result.compose(self)
        return IterationResult(n, result)

    def truncate(self, order: int) -> "TruncatedSeries":
        if not 1 <= order <= self.order:
            raise ValueError(f"new order {order} outside 1..{self.order}")
        return TruncatedSeries(self.domain, order, self.coeffs[:order])

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "order": self.order,
            "coeffs": [self.domain.format(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj) -> "TruncatedSeries":
        if not isinstance(obj, dict):
            raise ValueError("series JSON must be an object")
        raw = obj.get("coeffs")
        if not isinstance(raw, list) or not raw:
            raise ValueError("'coeffs' must be a nonempty array of strings")
        domain = domain_from_json(obj.get("domain", "rational"))
        coeffs = [domain.parse(s) for s in raw]
        order = obj.get("order", len(coeffs))
        if order != len(coeffs):
            raise ValueError(
                f"'order' {order} does not match {len(coeffs)} coefficients"
            )
        return cls(domain, order, coeffs)

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return (
                self.domain == other.domain
                and self.order == other.order
                and self.coeffs == other.coeffs
            )
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        shown = ", ".join(self.domain.format(c) for c in self.coeffs)
        return f"TruncatedSeries({self.domain!r}, order={self.order}, [{shown}])"


class IterationResult(NamedTuple):
    """An n-fold composition together with the n that produced it."""

    n: int
    series: TruncatedSeries
