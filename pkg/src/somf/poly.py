"""Multivariate polynomials over Q as exponent-vector tables.

Carrier for harmonic polynomials P(x_1..x_6).  Monomial order for any
serialized/deterministic listing is graded lexicographic.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement


def monomials(nvars, deg):
    """All exponent tuples of total degree deg, graded-lex order."""
    out = []
    for combo in combinations_with_replacement(range(nvars), deg):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


class MultiPoly:
    __slots__ = ("n", "coeffs")

    def __init__(self, nvars, coeffs=None):
        self.n = nvars
        cc = {}
        if coeffs:
            for e, c in coeffs.items():
                c = Fraction(c)
                if c != 0:
                    cc[tuple(e)] = c
        self.coeffs = cc

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def constant(cls, nvars, c):
        return cls(nvars, {tuple([0] * nvars): c})

    @classmethod
    def variable(cls, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def linear_form(cls, coeffs):
        n = len(coeffs)
        d = {}
        for i, c in enumerate(coeffs):
            if c != 0:
                e = [0] * n
                e[i] = 1
                d[tuple(e)] = c
        return cls(n, d)

    @classmethod
    def quadratic_form(cls, G):
        """x^T G x for a symmetric matrix G."""
        n = len(G)
        d = {}
        for i in range(n):
            for j in range(n):
                if G[i][j] != 0:
                    e = [0] * n
                    e[i] += 1
                    e[j] += 1
                    d[tuple(e)] = d.get(tuple(e), 0) + Fraction(G[i][j])
        return cls(n, d)

    def is_zero(self):
        return not self.coeffs

    def degree(self):
        return max((sum(e) for e in self.coeffs), default=-1)

    def homogeneous_degree(self):
        """Common degree, or None if mixed/zero."""
        degs = {sum(e) for e in self.coeffs}
        return degs.pop() if len(degs) == 1 else None

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.n, other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            v = out.get(e, 0) + c
            if v == 0:
                out.pop(e, None)
            else:
                out[e] = v
        return MultiPoly(self.n, out)

    def __sub__(self, other):
        return self + (other * -1 if isinstance(other, MultiPoly)
                       else MultiPoly.constant(self.n, -Fraction(other)))

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            s = Fraction(other)
            if s == 0:
                return MultiPoly(self.n)
            return MultiPoly(self.n, {e: c * s for e, c in self.coeffs.items()})
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v == 0:
                    out.pop(e, None)
                else:
                    out[e] = v
        return MultiPoly(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = MultiPoly.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __eq__(self, other):
        return isinstance(other, MultiPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        raise TypeError("MultiPoly is not hashable")

    def diff(self, i):
        out = {}
        for e, c in self.coeffs.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        return MultiPoly(self.n, out)

    def laplacian(self, Ginv):
        """Sum_ij Ginv[i][j] d_i d_j applied to self."""
        out = MultiPoly(self.n)
        firsts = [self.diff(i) for i in range(self.n)]
        for i in range(self.n):
            for j in range(self.n):
                g = Ginv[i][j]
                if g != 0:
                    out = out + firsts[i].diff(j) * g
        return out

    def substitute(self, M):
        """P(Mx): each variable x_i replaced by sum_j M[i][j] x_j."""
        n = self.n
        images = [MultiPoly.linear_form([Fraction(M[i][j]) for j in range(n)])
                  for i in range(n)]
        out = MultiPoly(n)
        # cache powers of the variable images
        maxe = [0] * n
        for e in self.coeffs:
            for i in range(n):
                maxe[i] = max(maxe[i], e[i])
        pows = []
        for i in range(n):
            pi = [MultiPoly.constant(n, 1)]
            for _ in range(maxe[i]):
                pi.append(pi[-1] * images[i])
            pows.append(pi)
        for e, c in self.coeffs.items():
            term = MultiPoly.constant(n, c)
            for i in range(n):
                if e[i]:
                    term = term * pows[i][e[i]]
            out = out + term
        return out

    def evaluate(self, point):
        """Exact evaluation at a rational point."""
        pt = [Fraction(x) for x in point]
        total = Fraction(0)
        powcache = [{0: Fraction(1)} for _ in range(self.n)]
        for e, c in self.coeffs.items():
            v = Fraction(c)
            for i, ei in enumerate(e):
                if ei:
                    if ei not in powcache[i]:
                        powcache[i][ei] = pt[i] ** ei
                    v *= powcache[i][ei]
            total += v
        return total

    def coefficient_vector(self, monomial_list):
        return [self.coeffs.get(e, Fraction(0)) for e in monomial_list]

    @classmethod
    def from_coefficient_vector(cls, nvars, monomial_list, vec):
        return cls(nvars, {e: c for e, c in zip(monomial_list, vec)})

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, reverse=True):
            c = self.coeffs[e]
            mono = "*".join("x%d^%d" % (i + 1, k) if k > 1 else "x%d" % (i + 1)
                            for i, k in enumerate(e) if k)
            parts.append("%s%s" % (c, ("*" + mono) if mono else ""))
        return " + ".join(parts)
