"""Level-one elliptic eigenforms, weight-3 CM forms, and lift Euler factors.

Everything is exact.  Satake parameters are never extracted as algebraic
numbers: degree-4 Rankin factors are expanded through elementary symmetric
functions of (a_p, p^{k-1}), and eigenvalues living in a real quadratic
field are carried as (trace, norm) pairs of the Hecke matrix.
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg
from .genus import kronecker
from .series import poly_mul


# ---------------------------------------------------------------------------
# q-expansions


def _sigma(n, k):
    s = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            s += d ** k
            e = n // d
            if e != d:
                s += e ** k
        d += 1
    return s


def _qmul(a, b, prec):
    out = [0] * prec
    for i, x in enumerate(a):
        if x == 0:
            continue
        top = min(prec - i, len(b))
        for j in range(top):
            if b[j]:
                out[i + j] += x * b[j]
    return out


def eisenstein_qexp(k, prec):
    """E_4 or E_6 normalized with constant term 1 (integer coefficients)."""
    if k == 4:
        return [1] + [240 * _sigma(n, 3) for n in range(1, prec)]
    if k == 6:
        return [1] + [-504 * _sigma(n, 5) for n in range(1, prec)]
    raise ValueError("only E4 and E6 are generators")


def delta_qexp(prec):
    """Discriminant cusp form (E4^3 - E6^2)/1728."""
    e4 = eisenstein_qexp(4, prec)
    e6 = eisenstein_qexp(6, prec)
    d = [Fraction(a - b, 1728) for a, b in
         zip(_qmul(_qmul(e4, e4, prec), e4, prec), _qmul(e6, e6, prec))]
    assert all(x.denominator == 1 for x in d)
    return [int(x) for x in d]


class QExpansion:
    """Eigenform of level one given by its q-expansion, a_1 = 1."""

    def __init__(self, weight, coeffs, level=1):
        self.weight = int(weight)
        self.level = int(level)
        self.coeffs = [Fraction(c) for c in coeffs]

    def ap(self, p):
        if p >= len(self.coeffs):
            raise ValueError("q-expansion too short for p=%d" % p)
        return self.coeffs[p]

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:6])
        return "QExpansion(weight=%d, q + ...: [%s])" % (self.weight, head)


def cusp_basis(k, prec):
    """Echelonized basis of the level-one cusp space of even weight k.

    Spanned by Delta * E4^a * E6^b with 4a + 6b = k - 12; reduced so that
    basis form i starts q^(i+1) + O(q^(dim+1)).
    """
    if k % 2 or k < 12:
        return []
    e4 = eisenstein_qexp(4, prec)
    e6 = eisenstein_qexp(6, prec)
    dl = delta_qexp(prec)
    forms = []
    for a in range((k - 12) // 4 + 1):
        rem = k - 12 - 4 * a
        if rem % 6:
            continue
        f = dl
        for _ in range(a):
            f = _qmul(f, e4, prec)
        for _ in range(rem // 6):
            f = _qmul(f, e6, prec)
        forms.append([Fraction(c) for c in f])
    # row-reduce on coefficients q^1, q^2, ...
    basis = []
    for f in forms:
        for g in basis:
            lead = next(i for i in range(1, prec) if g[i] != 0)
            if f[lead] != 0:
                c = f[lead] / g[lead]
                f = [x - c * y for x, y in zip(f, g)]
        if any(c != 0 for c in f[1:]):
            basis.append(f)
    basis.sort(key=lambda f: next(i for i in range(1, prec) if f[i] != 0))
    return [[c / f[next(i for i in range(1, prec) if f[i] != 0)] for c in f]
            for f in basis]


def hecke_matrix_level1(k, p, dim=None):
    """Matrix of T_p on the cusp basis of weight k (columns = images)."""
    if dim is None:
        dim = len(cusp_basis(k, 14))
    prec = dim * p + 1
    basis = cusp_basis(k, prec + 1)
    assert len(basis) == dim
    mat = [[Fraction(0)] * dim for _ in range(dim)]
    for j, f in enumerate(basis):
        img = []
        for n in range(1, dim + 1):
            v = f[n * p]
            if n % p == 0:
                v += Fraction(p) ** (k - 1) * f[n // p]
            img.append(v)
        # basis is echelon on q^1..q^dim, so solve by back-substitution
        for i in range(dim):
            c = img[i]
            if c != 0:
                mat[i][j] = c
                for n in range(dim):
                    img[n] -= c * basis[i][n + 1]
        assert all(x == 0 for x in img)
    return mat


class ConjugatePair:
    """Two conjugate eigenforms with a_p in a real quadratic field.

    Only trace and norm of a_p are ever needed; both are read off the
    Hecke matrix on the full cusp space (dimension 2).
    """

    def __init__(self, weight):
        self.weight = int(weight)
        self._cache = {}

    def ap_trace_norm(self, p):
        if p not in self._cache:
            m = hecke_matrix_level1(self.weight, p, dim=2)
            self._cache[p] = (m[0][0] + m[1][1], linalg.det(m))
        return self._cache[p]

    def __repr__(self):
        t, n = self.ap_trace_norm(2)
        return "ConjugatePair(weight=%d, a2 trace=%s norm=%s)" % (
            self.weight, t, n)


def level1_eigenforms(k, prec=30):
    """Eigenforms of the level-one cusp space of weight k (dim <= 2).

    Rational eigenforms come back as QExpansion; an irrational Galois
    pair as a single ConjugatePair.
    """
    if k % 2 or not 12 <= k <= 26:
        raise ValueError("weight must be even with 12 <= k <= 26")
    basis = cusp_basis(k, prec)
    if not basis:
        return []
    if len(basis) == 1:
        return [QExpansion(k, basis[0])]
    t2 = hecke_matrix_level1(k, 2, dim=len(basis))
    tr = t2[0][0] + t2[1][1]
    nm = linalg.det(t2)
    disc = tr * tr - 4 * nm
    r = _sqrt_exact(disc)
    if r is None:
        return [ConjugatePair(k)]
    out = []
    for lam in ((tr + r) / 2, (tr - r) / 2):
        # eigenvector (x, y): since basis is echelon, a_1 = x, a_2 = ...
        x, y = (t2[0][1], lam - t2[0][0]) if t2[0][1] != 0 else (1, 0)
        f = [x * a + y * b for a, b in zip(basis[0], basis[1])]
        out.append(QExpansion(k, [c / f[1] for c in f]))
    return out


def _sqrt_exact(q):
    q = Fraction(q)
    if q < 0:
        return None
    import math
    a = math.isqrt(q.numerator)
    b = math.isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


# ---------------------------------------------------------------------------
# weight-3 CM forms


_CM_FIELDS = {7: -7, 8: -8, 11: -11}


def _cm_pi(d2, p):
    """Generator of a prime above split p in the class-number-one field."""
    delta = _CM_FIELDS[d2]
    # O_K = Z + Z*omega, omega = (delta + sqrt(delta))/2;
    # N(x + y*omega) = x^2 + delta*x*y + y^2*(delta^2 - delta)/4
    nw = (delta * delta - delta) // 4
    import math
    ymax = math.isqrt(4 * p // -delta)
    for y in range(-ymax, ymax + 1):
        # x^2 + delta*x*y + (nw*y^2 - p) = 0
        disc = delta * delta * y * y - 4 * (nw * y * y - p)
        if disc < 0:
            continue
        r = math.isqrt(disc)
        if r * r != disc:
            continue
        for x2 in (-delta * y + r, -delta * y - r):
            if x2 % 2 == 0:
                return x2 // 2, y
    raise ArithmeticError("no element of norm %d" % p)


def cm_coefficients(d2, p):
    """a_p of the weight-3 CM newform attached to Q(sqrt(-d2)), d2 in 7,8,11.

    Inert p gives 0; split p = N(pi) gives pi^2 + conj(pi)^2, well defined
    because the unit group is {+-1}.  Ramified p is rejected.
    """
    delta = _CM_FIELDS[d2]
    chi = kronecker(delta, p)
    if chi == 0:
        raise ValueError("p=%d ramifies in Q(sqrt(%d))" % (p, delta))
    if chi == -1:
        return 0
    x, y = _cm_pi(d2, p)
    tr = 2 * x + delta * y  # pi + conj(pi)
    return tr * tr - 2 * p  # pi^2 + conj(pi)^2


def cm_coefficient_psquared(d2, p):
    """a_{p^2} for split p, by direct pi-power computation."""
    delta = _CM_FIELDS[d2]
    if kronecker(delta, p) != 1:
        raise ValueError("p must split")
    x, y = _cm_pi(d2, p)
    tr = 2 * x + delta * y
    t2 = tr * tr - 2 * p          # pi^2 + conj^2
    t4 = t2 * t2 - 2 * p * p      # pi^4 + conj^4
    return t4 + p * p             # ideals p^2, conj^2 and (p)


# ---------------------------------------------------------------------------
# Euler factor assembly (X = p^{-s}; all factors constant term 1)


def _lin(*roots):
    out = [Fraction(1)]
    for r in roots:
        out = poly_mul(out, [1, Fraction(-r)])
    return out


def rankin_euler(f, g, p):
    """Degree-4 Euler factor of the Rankin-Selberg product L(f x g).

    prod (1 - rho X) over the four products of Satake roots, expanded via
    symmetric functions only.  f, g are QExpansions, or f is a
    ConjugatePair paired with itself (pass g = f).
    """
    if isinstance(f, ConjugatePair):
        assert g is f, "a Galois pair is convolved with its own conjugate"
        tr, nm = f.ap_trace_norm(p)
        qq = Fraction(p) ** (f.weight - 1)
        e1 = nm                       # a b
        ssq = tr * tr - 2 * nm        # a^2 + b^2
        c2 = qq * ssq - 2 * qq * qq   # a^2 B + b^2 A - 2AB, A = B = qq
        return [Fraction(1), -e1, c2, -e1 * qq * qq, qq ** 4]
    a, b = f.ap(p), g.ap(p)
    A = Fraction(p) ** (f.weight - 1)
    B = Fraction(p) ** (g.weight - 1)
    return [Fraction(1), -a * b, a * a * B + b * b * A - 2 * A * B,
            -a * b * A * B, A * A * B * B]


def yoshida_euler(f, g, d2, nu, p):
    """Degree-6 standard Euler factor of the Yoshida-type lift.

    f, g of weight nu + 3 (or one ConjugatePair for both), d2 the CM
    datum in {7, 8, 11}: Rankin factor of f x g times the CM factor
    1 - a_p(h) p^{nu+1} X + chi(p) p^{2nu+4} X^2 shifted into place.
    """
    r4 = rankin_euler(f, g, p)
    ah = cm_coefficients(d2, p)
    chi = kronecker(_CM_FIELDS[d2], p)
    cm = [Fraction(1), -Fraction(ah) * p ** (nu + 1),
          Fraction(chi) * Fraction(p) ** (2 * nu + 4)]
    return poly_mul(r4, cm)


def miyawaki_euler(f, g, delta, p):
    """Degree-6 Euler factor zeta_K(s - k + 2) * L(f x g) at p.

    f of weight k, g of weight k - 2; delta the field discriminant.
    """
    k = f.weight if not isinstance(f, ConjugatePair) else f.weight
    chi = kronecker(delta, p)
    zk = _lin(Fraction(p) ** (k - 2), chi * Fraction(p) ** (k - 2))
    return poly_mul(zk, rankin_euler(f, g, p))


def maass_euler(lam_p, k, chi_p, p):
    """Degree-6 Euler factor of the Maass lift of a Jacobi eigenform.

    lam_p is the (externally supplied) index-one Jacobi eigenvalue.
    """
    lam_p = Fraction(lam_p)
    pk = Fraction(p)
    lead = _lin(pk ** (k - 3), pk ** (k - 2), pk ** (k - 1))
    sym2 = [Fraction(1), -lam_p, chi_p * lam_p * pk ** (k - 2),
            -Fraction(chi_p) * pk ** (3 * k - 6)]
    return poly_mul(lead, sym2)


def eisenstein_euler(k, chi_p, p):
    """Degree-6 Euler factor of the degree-two Eisenstein series."""
    pk = Fraction(p)
    return _lin(chi_p * pk ** (k - 2), 1, pk ** (k - 1), pk ** (k - 2),
                pk ** (k - 3), pk ** (2 * k - 4))
