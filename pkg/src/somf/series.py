"""Rational power series P(t) / prod (1 - t^a_i)^mult with exact expansion.

The universal carrier for dimension generating series and Euler factors.
Numerator coefficients are Fractions (usually integers); denominators are
kept factored as cyclotomic-style factors (1 - t^a).
"""

from __future__ import annotations

import json
from fractions import Fraction


def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def poly_mul(a, b):
    """Product of two coefficient lists."""
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y != 0:
                out[i + j] += x * y
    return _poly_trim(out)


def poly_add(a, b):
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] += x
    return _poly_trim(out)


def poly_scale(a, s):
    return _poly_trim([x * s for x in a])


class RationalSeries:
    """P(t) / prod_i (1 - t^{a_i})^{m_i}, exact."""

    __slots__ = ("num", "den", "var")

    def __init__(self, num, den=(), var="t"):
        self.num = tuple(Fraction(c) for c in _poly_trim(list(num)))
        # normalize denominator multiset to sorted (a, mult) pairs
        mults = {}
        for item in den:
            a, m = (item if isinstance(item, (tuple, list)) else (item, 1))
            a, m = int(a), int(m)
            if a < 1 or m < 0:
                raise ValueError("bad denominator factor (1-t^a)^m: %r" % (item,))
            if m:
                mults[a] = mults.get(a, 0) + m
        self.den = tuple(sorted(mults.items()))
        self.var = var

    # -- constructors -------------------------------------------------
    @classmethod
    def monomial(cls, e, c=1, var="t"):
        return cls([0] * e + [c], (), var=var)

    @classmethod
    def zero(cls, var="t"):
        return cls([], (), var=var)

    @classmethod
    def one(cls, var="t"):
        return cls([1], (), var=var)

    # -- views --------------------------------------------------------
    def den_poly(self):
        """Expanded denominator as a coefficient list."""
        out = [Fraction(1)]
        for a, m in self.den:
            f = [Fraction(1)] + [Fraction(0)] * (a - 1) + [Fraction(-1)]
            for _ in range(m):
                out = poly_mul(out, f)
        return out

    def expand(self, N):
        """Coefficients of t^0 .. t^N, exact rationals."""
        if N < 0:
            raise ValueError("N must be >= 0")
        c = [Fraction(0)] * (N + 1)
        for i, x in enumerate(self.num):
            if i <= N:
                c[i] = Fraction(x)
        for a, m in self.den:
            for _ in range(m):
                for i in range(a, N + 1):
                    c[i] += c[i - a]
        return c

    def coeff(self, n):
        return self.expand(n)[n]

    # -- algebra ------------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, RationalSeries):
            return RationalSeries(poly_mul(list(self.num), list(other.num)),
                                  list(self.den) + list(other.den), var=self.var)
        return RationalSeries(poly_scale(list(self.num), Fraction(other)),
                              self.den, var=self.var)

    __rmul__ = __mul__

    def _on_common_den(self, other):
        d1, d2 = dict(self.den), dict(other.den)
        common = {a: max(d1.get(a, 0), d2.get(a, 0)) for a in set(d1) | set(d2)}
        n1 = list(self.num)
        n2 = list(other.num)
        for a, m in common.items():
            f = [Fraction(1)] + [Fraction(0)] * (a - 1) + [Fraction(-1)]
            for _ in range(m - d1.get(a, 0)):
                n1 = poly_mul(n1, f)
            for _ in range(m - d2.get(a, 0)):
                n2 = poly_mul(n2, f)
        return n1, n2, sorted(common.items())

    def __add__(self, other):
        if not isinstance(other, RationalSeries):
            other = RationalSeries([Fraction(other)], (), var=self.var)
        n1, n2, den = self._on_common_den(other)
        return RationalSeries(poly_add(n1, n2), den, var=self.var)

    def __sub__(self, other):
        if not isinstance(other, RationalSeries):
            other = RationalSeries([Fraction(other)], (), var=self.var)
        return self + (other * Fraction(-1))

    def __neg__(self):
        return self * Fraction(-1)

    def __eq__(self, other):
        """Equality as rational functions: cross-multiplied numerators agree."""
        if not isinstance(other, RationalSeries):
            return NotImplemented
        left = poly_mul(list(self.num), other.den_poly())
        right = poly_mul(list(other.num), self.den_poly())
        return left == right

    def __hash__(self):
        raise TypeError("RationalSeries is not hashable")

    # -- io -----------------------------------------------------------
    def to_json(self):
        if any(c.denominator != 1 for c in self.num):
            num = [str(c) for c in self.num]
        else:
            num = [int(c) for c in self.num]
        return {"num": num, "den": [[a, m] for a, m in self.den]}

    @classmethod
    def from_json(cls, obj, var="t"):
        num = [Fraction(c) for c in obj["num"]]
        return cls(num, [tuple(x) for x in obj["den"]], var=var)

    def dumps(self):
        return json.dumps(self.to_json())

    def __repr__(self):
        den = "".join("(1-%s^%d)%s" % (self.var, a, "" if m == 1 else "^%d" % m)
                      for a, m in self.den)
        num = " + ".join("%s*%s^%d" % (c, self.var, i)
                         for i, c in enumerate(self.num) if c != 0) or "0"
        return "(%s)%s" % (num, (" / " + den) if den else "")


def euler_poly(coeffs, var="X"):
    """Polynomial (degree-d Euler factor) as a denominator-free series."""
    return RationalSeries(coeffs, (), var=var)
