"""Algebraic modular forms on definite rank-6 quadratic lattices.

A form of weight nu on a genus assigns to each class a degree-nu
polynomial on the ambient space, harmonic for the class Gram matrix and
equivariant under the automorphism group twisted by a (spin x det)
character.  Hecke operators act through p^k-neighbors: each neighbor is
carried back to a class representative by a rational isometry and the
polynomial is transported along it.

Harmonic polynomials of degree nu are computed through the quotient
Q[x_1..x_6]/(q): the monomials with x_1-exponent <= 1 form a basis of
each graded piece, and multiplication by x_1 on an x_1-divisible
monomial reduces through x_1^2 = -(x_1*l + q'')/G11 where
q = G11*x_1^2 + x_1*l(x_2..x_6) + q''(x_2..x_6).  Scaling every
substitution matrix by (den*G11)^nu keeps all entries integral, so group
action matrices can be built level by level in exact wordsize modular
arithmetic (and reconstructed over Z by CRT when an exact basis is
needed).
"""

import itertools

from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, lcm

import numpy as np

from . import genus, lattice, linalg, poly, series
from .lattice import QuadLattice, SpinCharacter
from .linalg import _PRIMES15, _PRIMES19
from .poly import MultiPoly


def harmonic_dim(nu):
    """dim of degree-nu harmonics in 6 variables."""
    return (nu + 1) * (nu + 2) ** 2 * (nu + 3) // 12


# ------------------------------------------------ monomial bookkeeping

@lru_cache(maxsize=None)
def _quot_monomials(d):
    """Degree-d monomials with x_1-exponent <= 1 (basis of Q[x]/(q))."""
    return tuple(m for m in poly.monomials(6, d) if m[0] <= 1)


@lru_cache(maxsize=None)
def _quot_index(d):
    return {m: i for i, m in enumerate(_quot_monomials(d))}


@lru_cache(maxsize=None)
def _level_structure(d):
    """Index maps for one multiplication level Q_{d-1} -> Q_d.

    groups[i]: rows of Q_d whose largest variable is i, with parent rows
    in Q_{d-1}.  shifts[j]: column map w -> w+e_j (-1 where x_1 would
    reach exponent 2).  red_src: columns with x_1-exponent 1; red_terms:
    for each symbolic term of -(x_1*l + q''), the target columns aligned
    with red_src.
    """
    QM0 = _quot_monomials(d - 1)
    QM1 = _quot_monomials(d)
    idx0 = _quot_index(d - 1)
    idx1 = _quot_index(d)
    byi = [[] for _ in range(6)]
    for r, u in enumerate(QM1):
        i = max(j for j in range(6) if u[j])
        v = list(u)
        v[i] -= 1
        byi[i].append((r, idx0[tuple(v)]))
    groups = []
    for i in range(6):
        rows = np.array([a for a, _ in byi[i]], dtype=np.intp)
        pars = np.array([b for _, b in byi[i]], dtype=np.intp)
        groups.append((rows, pars))
    n0 = len(QM0)
    shifts = []
    for j in range(6):
        t = np.empty(n0, dtype=np.intp)
        for c, w in enumerate(QM0):
            if j == 0 and w[0] == 1:
                t[c] = -1
            else:
                v = list(w)
                v[j] += 1
                t[c] = idx1[tuple(v)]
        shifts.append(t)
    red_src = np.array([c for c, w in enumerate(QM0) if w[0] == 1],
                       dtype=np.intp)
    plain_src = np.array([c for c, w in enumerate(QM0) if w[0] == 0],
                         dtype=np.intp)
    red_terms = []
    for jj in range(1, 6):  # x_1 * l_jj part keeps the x_1 factor
        tg = np.empty(len(red_src), dtype=np.intp)
        for s, c in enumerate(red_src):
            v = list(QM0[c])
            v[jj] += 1
            tg[s] = idx1[tuple(v)]
        red_terms.append((("l", jj), tg))
    for a in range(1, 6):
        for b in range(a, 6):
            tg = np.empty(len(red_src), dtype=np.intp)
            for s, c in enumerate(red_src):
                v = list(QM0[c])
                v[0] -= 1
                v[a] += 1
                v[b] += 1
                tg[s] = idx1[tuple(v)]
            red_terms.append((("q", a, b), tg))
    return groups, shifts, red_src, plain_src, red_terms


class _ActionModel:
    """Substitution action matrices on graded pieces of Q[x]/(q).

    For an integer matrix num (= den * the actual linear map), the
    degree-nu matrix C satisfies: row u = coefficients over the quotient
    monomial basis of (den*G11)^nu * (u composed with the map).
    """

    def __init__(self, gram):
        self.G = tuple(tuple(int(x) for x in row) for row in gram)
        self.g11 = int(self.G[0][0])
        vals = {}
        for jj in range(1, 6):
            vals[("l", jj)] = -2 * self.G[0][jj]
        for a in range(1, 6):
            for b in range(a, 6):
                vals[("q", a, b)] = (-self.G[a][a] if a == b
                                     else -2 * self.G[a][b])
        self.red_vals = vals

    def _build(self, num, nu, p):
        """Level-by-level build; p=None runs on absolute values (bound)."""
        def rd(x):
            return abs(int(x)) if p is None else int(x) % p

        g = [[rd(num[i][j]) for j in range(6)] for i in range(6)]
        g11 = rd(self.g11)
        if nu == 0:
            return np.ones((1, 1))
        C = np.array([[(g11 * g[i][j]) % p if p else g11 * g[i][j]
                       for j in range(6)] for i in range(6)], dtype=np.float64)
        for d in range(2, nu + 1):
            groups, shifts, red_src, plain_src, red_terms = _level_structure(d)
            n1 = len(_quot_monomials(d))
            C1 = np.zeros((n1, n1))
            for i in range(6):
                rows, pars = groups[i]
                if rows.size == 0:
                    continue
                B = C[pars]
                for j in range(6):
                    a = (g[i][j] * g11) % p if p else g[i][j] * g11
                    if a == 0:
                        continue
                    if j == 0:
                        tg = shifts[0][plain_src]
                        C1[np.ix_(rows, tg)] += a * B[:, plain_src]
                    else:
                        C1[np.ix_(rows, shifts[j])] += a * B
                a0 = g[i][0]
                if a0 and red_src.size:
                    Br = B[:, red_src]
                    for kind, tg in red_terms:
                        v = (a0 * rd(self.red_vals[kind])) % p if p \
                            else a0 * abs(self.red_vals[kind])
                        if v:
                            C1[np.ix_(rows, tg)] += v * Br
            if p:
                C1 %= p
            C = C1
        return C

    def matrix_modp(self, num, nu, p):
        """(den*G11)^nu-scaled substitution matrix mod p (float64)."""
        if self.g11 % p == 0:
            raise ValueError("p divides the leading Gram entry")
        return self._build(num, nu, p)

    def matrix_bound(self, num, nu):
        """Upper bound on |entries| of the exact scaled matrix."""
        B = self._build(num, nu, None)
        return int(B.max() * 1.01) + 1

    def matrix_exact(self, num, nu, primes=None):
        """Exact integer scaled substitution matrix (object ndarray)."""
        primes = list(primes or _PRIMES19)
        bound = self.matrix_bound(num, nu)
        need = 2 * bound + 1
        use = []
        mod = 1
        for p in primes:
            use.append(p)
            mod *= p
            if mod > need:
                break
        if mod <= need:
            raise ValueError("not enough primes for the coefficient bound")
        X = None
        M = 1
        for p in use:
            Cp = self.matrix_modp(num, nu, p).astype(np.int64)
            if X is None:
                X = Cp.astype(object)
                M = p
                continue
            inv = pow(M % p, p - 2, p)
            delta = ((Cp.astype(object) - X) * inv) % p
            X = X + M * delta
            M *= p
        X = X - M * (X > (M >> 1)).astype(object)
        return X


@lru_cache(maxsize=None)
def _action_model_cached(gram_key):
    return _ActionModel(gram_key)


def _action_model(gram):
    return _action_model_cached(tuple(tuple(int(x) for x in r) for r in gram))


# --------------------------------------------------- fast evaluation

@lru_cache(maxsize=None)
def _full_monomials(d):
    return tuple(poly.monomials(6, d))


@lru_cache(maxsize=None)
def _full_index(d):
    return {m: i for i, m in enumerate(_full_monomials(d))}


@lru_cache(maxsize=None)
def _full_parent(d):
    """(variable, parent row) pairs building degree d from degree d-1."""
    idx0 = _full_index(d - 1)
    out = []
    for u in _full_monomials(d):
        i = max(j for j in range(6) if u[j])
        v = list(u)
        v[i] -= 1
        out.append((i, idx0[tuple(v)]))
    return tuple(out)


def _monomial_values(z, d):
    """Values of all degree-d monomials at the integer point z."""
    vals = [1]
    for lvl in range(1, d + 1):
        vals = [vals[par] * z[i] for i, par in _full_parent(lvl)]
    return vals


class _PolyEvaluator:
    """Fast exact evaluation of a homogeneous integer polynomial."""

    def __init__(self, P):
        self.deg = P.homogeneous_degree() if not P.is_zero() else 0
        idx = _full_index(self.deg)
        self.terms = [(idx[m], int(c)) for m, c in P.coeffs.items()]

    def __call__(self, z):
        vals = _monomial_values(tuple(z), self.deg)
        return sum(c * vals[i] for i, c in self.terms)


class FactoredForm:
    """Product of integer linear forms times a scalar (kept factored)."""

    def __init__(self, linear_coeffs, scalar=1):
        self.linear_coeffs = tuple(tuple(int(x) for x in v)
                                   for v in linear_coeffs)
        self.scalar = Fraction(scalar)
        self.n = len(self.linear_coeffs[0]) if self.linear_coeffs else 6

    def homogeneous_degree(self):
        return len(self.linear_coeffs)

    def is_zero(self):
        return self.scalar == 0

    def evaluate(self, pt):
        out = self.scalar
        for v in self.linear_coeffs:
            out *= sum(Fraction(a) * b for a, b in zip(v, pt))
        return out

    def expand(self):
        P = MultiPoly.constant(self.n, self.scalar)
        for v in self.linear_coeffs:
            P = P * MultiPoly.linear_form([Fraction(x) for x in v])
        return P


def _form_evaluator(P):
    """Exact evaluator for MultiPoly or FactoredForm at integer points."""
    if isinstance(P, FactoredForm):
        sc = P.scalar
        rows = P.linear_coeffs

        def ev(z):
            out = sc
            for v in rows:
                out *= sum(a * b for a, b in zip(v, z))
            return out

        return ev
    den = 1
    for c in P.coeffs.values():
        den = lcm(den, Fraction(c).denominator)
    if den == 1:
        return _PolyEvaluator(P)
    base = _PolyEvaluator(P * Fraction(den))

    def ev(z):
        return Fraction(base(z), den)

    return ev


# --------------------------------------------------- harmonic algebra

def harmonic_decomposition(P, G):
    """[h_d, h_{d-2}, ...] with P = sum q^m h_{d-2m}, each h harmonic.

    Recursive: decompose Delta P and divide out the q-shift eigenvalues
    Delta(q^m h_e) = 2m(n + 2e + 2(m-1)) q^{m-1} h_e.
    """
    n = P.n
    d = P.homogeneous_degree() if not P.is_zero() else 0
    Ginv = linalg.mat_inv([list(map(Fraction, row)) for row in G])
    q = MultiPoly.quadratic_form(G)

    def rec(P, d):
        if P.is_zero() or d < 2:
            return [P]
        lap = P.laplacian(Ginv)
        sub = rec(lap, d - 2)  # lap = sum q^{m-1} g, g matching h_{d-2m}
        hs = [None]
        rest = MultiPoly.zero(n)
        qm = q
        for m in range(1, d // 2 + 2):
            e = d - 2 * m
            if e < 0 or m - 1 >= len(sub):
                break
            mu = 2 * m * (n + 2 * e + 2 * (m - 1))
            h = sub[m - 1] * Fraction(1, mu)
            hs.append(h)
            rest = rest + qm * h
            qm = qm * q
        hs[0] = P - rest
        return hs

    return rec(P, d)


def harmonic_projection(P, G):
    """Harmonic component (for the form G) of a homogeneous polynomial."""
    if P.is_zero():
        return P
    if P.homogeneous_degree() < 2:
        return P
    H = harmonic_decomposition(P, G)[0]
    Ginv = linalg.mat_inv([list(map(Fraction, row)) for row in G])
    assert H.laplacian(Ginv).is_zero()
    return H


class HarmonicSpace:
    """Degree-nu harmonic polynomials for a Gram matrix."""

    def __init__(self, nu, gram):
        self.nu = int(nu)
        self.gram = tuple(tuple(int(x) for x in r) for r in gram)
        self.dimension = harmonic_dim(self.nu)
        self._basis = None

    def basis(self):
        """Exact basis: harmonic projections of the quotient monomials.

        Cost grows quickly with nu; intended for small degrees.
        """
        if self._basis is None:
            out = []
            for m in _quot_monomials(self.nu):
                P = MultiPoly(6, {m: Fraction(1)})
                out.append(harmonic_projection(P, self.gram))
            self._basis = out
        return self._basis

    def check_dimension(self, p=None):
        """Laplacian kernel rank over F_p equals the closed form."""
        p = p or _PRIMES15[0]
        nu = self.nu
        if nu < 2:
            return len(_full_monomials(nu)) == self.dimension
        Ginv = linalg.mat_inv([list(map(Fraction, r)) for r in self.gram])
        det = linalg.det([list(r) for r in self.gram])
        A = [[int(det * Ginv[i][j]) for j in range(6)] for i in range(6)]
        src = _full_monomials(nu)
        tgt = _full_index(nu - 2)
        M = np.zeros((len(tgt), len(src)))
        for col, m in enumerate(src):
            for i in range(6):
                for j in range(6):
                    if A[i][j] == 0:
                        continue
                    v = list(m)
                    if i == j:
                        if v[i] < 2:
                            continue
                        c = v[i] * (v[i] - 1)
                        v[i] -= 2
                    else:
                        if v[i] < 1 or v[j] < 1:
                            continue
                        c = v[i] * v[j]
                        v[i] -= 1
                        v[j] -= 1
                    M[tgt[tuple(v)], col] += (c * A[i][j]) % p
        M %= p
        K = linalg.nullspace_modp_big(M, p)
        return len(K) == self.dimension


def harmonic_basis(nu, G):
    return HarmonicSpace(nu, G)


# ------------------------------------------- invariant class dimensions

def _minus_id_value(L, chi):
    n = L.rank
    mi = [[-1 if i == j else 0 for j in range(n)] for i in range(n)]
    return chi.value(mi, L)


def _store_int16(C):
    return np.ascontiguousarray(C.T).astype(np.int16)


def _verify_eigen_block(K, C_t, lam, p, block=512):
    """K rows satisfy v C = lam v mod p, with C stored transposed int16."""
    if K.shape[0] == 0:
        return True
    Ki = K.astype(np.int64)
    n = C_t.shape[0]
    want = (lam * Ki) % p
    for a in range(0, n, block):
        b = min(n, a + block)
        got = (Ki @ C_t[a:b].T.astype(np.int64)) % p
        if not np.array_equal(got, want[:, a:b]):
            return False
    return True


def invariant_class_dim(L, nu, chi, p=None, seed=0):
    """dim of the chi-eigenspace of O(L) on degree-nu harmonics.

    Computed in the quotient model modulo a 15-bit prime: a random
    combination of the generator eigen-conditions is reduced once, and
    the kernel is then verified against every generator (redraw on
    failure, deterministic intersection as a last resort).
    """
    nq = len(_quot_monomials(nu))
    if _minus_id_value(L, chi) != (-1) ** nu:
        return 0
    gens = lattice.small_generating_set(L)
    if not gens:
        return nq
    vals = [chi.value(g, L) for g in gens]
    model = _action_model(L.gram)
    p = p or _PRIMES15[0]
    s = pow(model.g11 % p, nu, p)
    stored = []
    for g in gens:
        C = model.matrix_modp(g, nu, p)
        stored.append(_store_int16(C))
        del C
    lams = [(v * s) % p for v in vals]
    rng = np.random.default_rng(seed + 1)
    for _ in range(4):
        R = np.zeros((nq, nq))
        shift = 0
        for C_t, lam in zip(stored, lams):
            c = int(rng.integers(1, p))
            R += c * C_t.astype(np.float64)
            shift = (shift + c * lam) % p
        idx = np.arange(nq)
        R[idx, idx] -= shift
        R %= p
        K = linalg.nullspace_modp_big(R, p)
        if K.shape[0] == 0:
            return 0
        if all(_verify_eigen_block(K, C_t, lam, p)
               for C_t, lam in zip(stored, lams)):
            return K.shape[0]
    # deterministic fallback: intersect generator eigenspaces one by one
    B = None
    for C_t, lam in zip(stored, lams):
        A = (C_t.astype(np.float64) - lam * np.eye(nq)) % p
        if B is None:
            K = linalg.nullspace_modp_big(A, p)
            B = (K.T % p).astype(np.float64)
        else:
            M = (A @ B) % p
            K2 = linalg.nullspace_modp_big(M, p)
            B = (B @ K2.T.astype(np.float64)) % p
        if B.shape[1] == 0:
            return 0
    return B.shape[1]


def _class_invariant_basis_exact(L, nu, chi, seed=0):
    """Certified exact basis (integer quotient-coefficient vectors)."""
    nq = len(_quot_monomials(nu))
    if _minus_id_value(L, chi) != (-1) ** nu:
        return []
    gens = lattice.small_generating_set(L)
    if not gens:
        return [[Fraction(i == j) for j in range(nq)] for i in range(nq)]
    vals = [chi.value(g, L) for g in gens]
    model = _action_model(L.gram)
    rng = np.random.default_rng(seed + 17)
    combo = [int(rng.integers(1, 1 << 14)) for _ in gens]
    exacts = None
    for extra in range(4):
        nprimes = 3 + extra
        use = _PRIMES19[:nprimes]
        kers = []
        ok = True
        for p in use:
            s = pow(model.g11 % p, nu, p)
            R = np.zeros((nq, nq))
            shift = 0
            for g, v, c in zip(gens, vals, combo):
                C = model.matrix_modp(g, nu, p)
                R += (c % p) * C.T
                R %= p
                shift = (shift + c * v * s) % p
            idx = np.arange(nq)
            R[idx, idx] = (R[idx, idx] - shift) % p
            K, piv = linalg.nullspace_modp_big(R, p, return_pivots=True)
            kers.append((p, K, tuple(piv)))
        dims = {K.shape[0] for _, K, _ in kers}
        pivs = {piv for _, _, piv in kers}
        if len(dims) != 1 or len(pivs) != 1:
            combo = [int(rng.integers(1, 1 << 14)) for _ in gens]
            continue
        dim = dims.pop()
        if dim == 0:
            return []
        # CRT the canonical RREF kernel entries and reconstruct over Q
        M = 1
        X = None
        for p, K, _ in kers:
            Kp = K.astype(object)
            if X is None:
                X, M = Kp, p
                continue
            inv = pow(M % p, p - 2, p)
            X = X + M * (((Kp - X) * inv) % p)
            M *= p
        vecs = []
        for r in range(dim):
            vec = []
            for x in X[r]:
                f = linalg.rational_reconstruct(int(x) % M, M)
                if f is None:
                    vec = None
                    break
                vec.append(f)
            if vec is None:
                vecs = None
                break
            den = 1
            for f in vec:
                den = lcm(den, f.denominator)
            ivec = [int(f * den) for f in vec]
            g0 = 0
            for a in ivec:
                g0 = gcd(g0, a)
            if g0 > 1:
                ivec = [a // g0 for a in ivec]
            vecs.append(ivec)
        if vecs is None:
            continue
        # exact verification against every generator
        if exacts is None:
            exacts = [model.matrix_exact(g, nu) for g in gens]
        s_ex = model.g11 ** nu
        Varr = np.array(vecs, dtype=object)
        good = True
        for C_ex, v in zip(exacts, vals):
            if not np.array_equal(Varr @ C_ex, (v * s_ex) * Varr):
                good = False
                break
        if good:
            return [[Fraction(a) for a in row] for row in vecs]
        combo = [int(rng.integers(1, 1 << 14)) for _ in gens]
    raise ArithmeticError("invariant basis reconstruction failed")


# --------------------------------------------------------- form spaces

class AMForm:
    """Tuple of polynomials, one per class (harmonic, chi-equivariant)."""

    def __init__(self, lattices, nu, chi, components, classes=None):
        self.lattices = list(lattices)
        self.nu = int(nu)
        self.chi = chi
        self.components = list(components)
        self.classes = classes

    def evaluate(self, i, pt):
        P = self.components[i]
        if isinstance(P, FactoredForm):
            return P.evaluate(pt)
        return P.evaluate(pt)

    def is_zero(self):
        return all(P.is_zero() for P in self.components)


class AMFSpace:
    """chi-equivariant weight-nu forms on a class list."""

    def __init__(self, classes, nu, chi, class_dims):
        self.classes = classes
        self.nu = int(nu)
        self.chi = chi
        self.class_dims = list(class_dims)
        self.dimension = sum(class_dims)
        self._basis = None

    def lattices(self):
        return self.classes.lattices()

    def basis(self):
        """Exact basis of AMForms, each supported on a single class."""
        if self._basis is not None:
            return self._basis
        lats = self.lattices()
        out = []
        for i, (L, d) in enumerate(zip(lats, self.class_dims)):
            if d == 0:
                continue
            vecs = _class_invariant_basis_exact(L, self.nu, self.chi)
            if len(vecs) != d:
                raise ArithmeticError("exact basis dimension mismatch")
            QM = _quot_monomials(self.nu)
            for vec in vecs:
                Pq = MultiPoly(6, {m: Fraction(c)
                                   for m, c in zip(QM, vec) if c})
                H = harmonic_projection(Pq, L.gram)
                den = 1
                for c in H.coeffs.values():
                    den = lcm(den, c.denominator)
                H = H * Fraction(den)
                g0 = 0
                for c in H.coeffs.values():
                    g0 = gcd(g0, int(c))
                if g0 > 1:
                    H = H * Fraction(1, g0)
                comps = [MultiPoly.zero(6) for _ in lats]
                comps[i] = H
                out.append(AMForm(lats, self.nu, self.chi, comps,
                                  classes=self.classes))
        self._basis = out
        return out


def invariant_subspace(classes, nu, chi):
    """Weight-nu chi-equivariant forms on the classes of a genus."""
    dims = [invariant_class_dim(L, nu, chi) for L in classes.lattices()]
    return AMFSpace(classes, nu, chi, dims)


# ------------------------------------------------------ Hecke operators

def _improper_aut(L):
    for g in lattice.small_generating_set(L):
        if linalg.det(g) == -1:
            return [list(map(int, r)) for r in g]
    return None


def _transport(Li, targets, gram_M, N, chi, improper):
    """Classify a neighbor of L_i and build the carrying isometry.

    Returns (class j of the neighbor M, character value, Psi) where
    Phi maps class-j coordinates isometrically onto M inside the
    coordinates of L_i and Psi = Phi^{-1}.  The neighbor contributes
    chi(Phi) * P_j(Psi x) to the class-i component of the image; this is
    invariant under the ambiguity Phi -> Phi u, u in O(L_j), by
    chi-equivariance of P_j.  A det -1 map is made proper by composing
    with an improper automorphism of the target class j.
    """
    red, U = lattice.lll_reduce(gram_M)
    redlat = QuadLattice(red, check=False)
    j = None
    iota = None
    for cand, Lj in enumerate(targets):
        # direct backtrack: avoids the short-vector prescreen, which would
        # re-enumerate the fresh neighbor lattice on every call
        found = lattice._aut_backtrack(redlat, Lj, find_all=False)
        if found:
            j = cand
            iota = found[0]
            break
    if j is None:
        raise ArithmeticError("neighbor matches no class representative")
    W = linalg.mat_mul(linalg.transpose([list(r) for r in N]),
                       linalg.mat_fraction(U))
    Phi = linalg.mat_mul(W, linalg.mat_inv([list(r) for r in iota]))
    trivial = (chi.d0 == 1 and not chi.det_twist)
    if trivial:
        return j, 1, linalg.mat_inv(Phi)
    if linalg.det(Phi) == -1:
        if improper[j] is None:
            raise ArithmeticError(
                "improper carrying isometry but no improper automorphism "
                "of the target class to compose with")
        Phi = linalg.mat_mul(Phi, linalg.mat_fraction(improper[j]))
    if chi.d0 != 1:
        sn, _ = lattice.spinor_norm(Li, Phi)
        chv = chi.nu(sn)
    else:
        chv = 1
    return j, chv, linalg.mat_inv(Phi)


def _phi_int(Phi):
    """(integer matrix Z, denominator delta) with Phi = Z/delta."""
    delta = 1
    for row in Phi:
        for x in row:
            delta = lcm(delta, Fraction(x).denominator)
    Z = [[int(Fraction(x) * delta) for x in row] for row in Phi]
    return Z, delta


def _alt_list(p, k):
    """All alternating k x k matrices mod p (lift-shift parameters)."""
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    out = []
    for vals in itertools.product(range(p), repeat=len(pairs)):
        A = [[0] * k for _ in range(k)]
        for (i, j), v in zip(pairs, vals):
            A[i][j] = v
            A[j][i] = (-v) % p
        out.append(A)
    return out


def _neighbor_stream(L, p, k):
    # p^k-neighbors = (isotropic k-subspace, alternating k x k matrix mod p)
    alts = _alt_list(p, k)
    for S in genus.isotropic_subspaces(L, p, k):
        for A in alts:
            yield genus.neighbor_from_subspace(L, p, S, alt=A)


def _pick_points(polys, seed=0):
    """Integer points making the evaluation matrix of polys invertible."""
    d = len(polys)
    evs = [_form_evaluator(P) for P in polys]
    rng = np.random.default_rng(seed + 23)
    pts = []
    rows = []
    guard = 0
    while len(pts) < d:
        guard += 1
        if guard > 200:
            raise ArithmeticError("no generic evaluation points found")
        x = tuple(int(v) for v in rng.integers(-9, 10, 6))
        row = [Fraction(ev(x)) for ev in evs]
        cand = rows + [row]
        M = [list(r) for r in cand]
        # keep the point only if it keeps the value rows independent
        if not linalg.kernel(linalg.transpose(M)):
            pts.append(x)
            rows.append(row)
    return pts, rows


def _hecke_contributions(basis, p, k, pts):
    """Accumulated values of the transformed basis forms.

    W[i][s][t] = sum over p^k-neighbors M of L_i of
    chi(Phi) * f_t at the class of M, evaluated at Phi^{-1} x_{i,s}.
    """
    lats = basis[0].lattices
    chi = basis[0].chi
    nu = basis[0].nu
    trivial = (chi.d0 == 1 and not chi.det_twist)
    improper = [None] * len(lats)
    if not trivial:
        improper = [_improper_aut(L) for L in lats]
        if chi.d0 != 1 and len(lats) > 1:
            raise NotImplementedError(
                "spin characters beyond {1, det} need class number 1")
    # forms grouped by supporting class
    by_class = {}
    for t, f in enumerate(basis):
        for j, P in enumerate(f.components):
            if not P.is_zero():
                by_class.setdefault(j, []).append((t, _form_evaluator(P)))
    W = {i: [[Fraction(0)] * len(basis) for _ in pts[i]] for i in pts}
    for i in sorted(pts):
        Li = lats[i]
        for gram_M, N in _neighbor_stream(Li, p, k):
            j, chv, Psi = _transport(Li, lats, gram_M, N, chi, improper)
            forms = by_class.get(j)
            if not forms:
                continue
            # normalize by the integral transport p*Psi (denominators of
            # the carrying isometry always divide p)
            Z, delta = _phi_int(Psi)
            scale = chv * Fraction(p, delta) ** nu
            for s, x in enumerate(pts[i]):
                z = [sum(Z[r][c] * x[c] for c in range(6)) for r in range(6)]
                row = W[i][s]
                for t, ev in forms:
                    row[t] += scale * ev(z)
    return W


def hecke_matrix(space, p, k=1):
    """Matrix of the p^k-neighbor Hecke operator on a form space.

    Column t holds the coefficients of the transformed basis form f_t in
    the basis; entries are exact rationals.
    """
    if space.classes is not None and space.classes.desc.D % p == 0:
        raise ValueError("p divides the discriminant")
    if k not in (1, 2, 3):
        raise ValueError("k must be 1, 2 or 3")
    d = space.dimension
    if d == 0:
        return []
    basis = space.basis()
    pts = {}
    vrows = {}
    for j in sorted({i for f in basis
                     for i, P in enumerate(f.components) if not P.is_zero()}):
        polys = [f.components[j] for f in basis if not f.components[j].is_zero()]
        pts[j], vrows[j] = _pick_points(polys, seed=j)
    W = _hecke_contributions(basis, p, k, pts)
    T = [[Fraction(0)] * d for _ in range(d)]
    for j in pts:
        forms_j = [t for t, f in enumerate(basis)
                   if not f.components[j].is_zero()]
        V = [list(r) for r in vrows[j]]
        for t in range(d):
            b = [W[j][s][t] for s in range(len(pts[j]))]
            sol = linalg.solve(V, b)
            for r, tf in enumerate(forms_j):
                T[tf][t] = sol[r]
    return T


def hecke_eigenvalue(form, p, k=1, verify=True):
    """Eigenvalue of the p^k-neighbor operator on an eigenform.

    Evaluates the transformed form at one generic point per supported
    class and divides; with verify=True a second point must agree.
    """
    nu = form.nu
    npts = 2 if verify else 1
    supp = [i for i, P in enumerate(form.components) if not P.is_zero()]
    rng = np.random.default_rng(99)
    pts = {}
    fvals = {}
    evs = {i: _form_evaluator(form.components[i]) for i in supp}
    for i in supp:
        got = []
        vals = []
        guard = 0
        while len(got) < npts:
            guard += 1
            if guard > 200:
                raise ArithmeticError("no generic evaluation points found")
            x = tuple(int(v) for v in rng.integers(-9, 10, 6))
            v = Fraction(evs[i](x))
            if v != 0:
                got.append(x)
                vals.append(v)
        pts[i] = got
        fvals[i] = vals
    basis = [form]
    W = _hecke_contributions(basis, p, k, pts)
    lam = None
    for i in supp:
        for s in range(npts):
            cand = W[i][s][0] / fvals[i][s]
            if lam is None:
                lam = cand
            elif cand != lam:
                raise ArithmeticError("form is not an eigenform: "
                                      "inconsistent eigenvalue ratios")
    return lam


# --------------------------------- orbit-compressed eigenvalues

@lru_cache(maxsize=None)
def _primes29(count=8):
    """Largest primes below 2^29 (mod-p accumulation fits in int64)."""
    from sympy import prevprime
    ps = []
    q = 1 << 29
    while len(ps) < count:
        q = int(prevprime(q))
        ps.append(q)
    return tuple(ps)


@lru_cache(maxsize=None)
def _full_groups(d):
    """Degree-d monomials grouped by leading variable j.

    Entry j is (rows, pars) with monomial rows[r] = x_j * monomial
    pars[r] of degree d-1 (j the largest variable present)."""
    by = [([], []) for _ in range(6)]
    idx0 = _full_index(d - 1)
    for r, m in enumerate(_full_monomials(d)):
        j = max(t for t in range(6) if m[t])
        v = list(m)
        v[j] -= 1
        by[j][0].append(r)
        by[j][1].append(idx0[tuple(v)])
    return tuple((np.array(a, dtype=np.intp), np.array(b, dtype=np.intp))
                 for a, b in by)


@lru_cache(maxsize=None)
def _full_shift(d):
    """Index of m * x_t among degree d+1 monomials, per variable t."""
    idx1 = _full_index(d + 1)
    out = []
    for t in range(6):
        col = []
        for m in _full_monomials(d):
            v = list(m)
            v[t] += 1
            col.append(idx1[tuple(v)])
        out.append(np.array(col, dtype=np.intp))
    return tuple(out)


def _compose_coeffs_modp(cvec, Y, nu, pr):
    """Coefficient vector of P composed with x -> Yx, mod pr.

    cvec: int64 coefficients of P over the degree-nu monomial list.
    Expansions of all monomials are built level by level (expansion of
    m = expansion of its parent times the linear form for the leading
    variable); products stay below 2^63 so a single reduction per level
    suffices.
    """
    Ym = np.array(Y, dtype=np.int64) % pr
    V = np.ones((1, 1), dtype=np.int64)
    for d in range(1, nu):
        nd = len(_full_monomials(d))
        Vn = np.zeros((nd, nd), dtype=np.int64)
        shifts = _full_shift(d - 1)
        for j, (rows, pars) in enumerate(_full_groups(d)):
            if not len(rows):
                continue
            B = V[pars]
            for t in range(6):
                a = int(Ym[j, t])
                if a:
                    Vn[np.ix_(rows, shifts[t])] += a * B
        Vn %= pr
        V = Vn
    # top level: fold the coefficients in before expanding (the final
    # expansion is only needed in the c-weighted combination)
    nd = len(_full_monomials(nu))
    r = np.zeros(nd, dtype=np.int64)
    shifts = _full_shift(nu - 1)
    for j, (rows, pars) in enumerate(_full_groups(nu)):
        if not len(rows):
            continue
        u = np.zeros(V.shape[1], dtype=np.int64)
        cw = cvec[rows]
        B = V[pars]
        for s in range(0, len(cw), 16):
            u += (cw[s:s + 16, None] * B[s:s + 16]).sum(axis=0)
            u %= pr
        for t in range(6):
            a = int(Ym[j, t])
            if a:
                r[shifts[t]] += a * u
        r %= pr
    return r


def _pluecker_keys(Ms, p):
    """Canonical subspace keys (normalized Pluecker vectors) for a batch.

    Ms: (N, k, 6) mod-p basis matrices.  Returns an (N, C(6,k)) int64
    array, scaled so the first nonzero minor is 1; rows are equal iff
    the row spaces agree.
    """
    Ms = Ms % p
    k = Ms.shape[1]
    cols = list(itertools.combinations(range(6), k))
    mins = np.empty((Ms.shape[0], len(cols)), dtype=np.int64)
    for ci, cc in enumerate(cols):
        B = Ms[:, :, cc]
        if k == 1:
            d = B[:, 0, 0]
        elif k == 2:
            d = B[:, 0, 0] * B[:, 1, 1] - B[:, 0, 1] * B[:, 1, 0]
        else:
            d = (B[:, 0, 0] * (B[:, 1, 1] * B[:, 2, 2]
                               - B[:, 1, 2] * B[:, 2, 1])
                 - B[:, 0, 1] * (B[:, 1, 0] * B[:, 2, 2]
                                 - B[:, 1, 2] * B[:, 2, 0])
                 + B[:, 0, 2] * (B[:, 1, 0] * B[:, 2, 1]
                                 - B[:, 1, 1] * B[:, 2, 0]))
        mins[:, ci] = d % p
    invtab = np.array([0] + [pow(v, p - 2, p) for v in range(1, p)],
                      dtype=np.int64)
    lead = np.argmax(mins != 0, axis=1)
    scale = invtab[mins[np.arange(len(mins)), lead]]
    return mins * scale[:, None] % p


_ortho_chi_cache = {}


def _ortho_with_chi(L, chi):
    """All elements of O(L) with their character values."""
    key = (L.key(), chi.d0, chi.det_twist)
    if key not in _ortho_chi_cache:
        gens = lattice.small_generating_set(L)
        gvals = [(chi.value(g, L),) for g in gens]
        _, order, _, _ = lattice.automorphism_group(L)
        table = lattice._closure_with_values(gens, gvals, L.rank, order)
        mats = np.array([m for m, _ in table.values()], dtype=np.int64)
        vals = np.array([v[0] for _, v in table.values()], dtype=np.int64)
        _ortho_chi_cache[key] = (mats, vals)
    return _ortho_chi_cache[key]


def _matrix_closure(gens, n):
    idm = np.eye(n, dtype=np.int64)
    seen = {idm.tobytes()}
    frontier = np.stack([idm])
    garr = np.stack(gens)
    while len(frontier):
        prods = np.einsum('gij,fjk->gfik', garr, frontier)
        prods = prods.reshape(-1, n, n)
        nxt = []
        for h in prods:
            kb = h.tobytes()
            if kb not in seen:
                seen.add(kb)
                nxt.append(h)
        frontier = np.stack(nxt) if nxt else np.empty((0, n, n),
                                                      dtype=np.int64)
    return seen


def _few_generators(elems):
    """Small generating subset of a matrix group given by its elements."""
    n = elems[0].shape[0]
    sel = []
    seen = {np.eye(n, dtype=np.int64).tobytes()}
    for g in elems:
        if g.tobytes() in seen:
            continue
        sel.append(g)
        seen = _matrix_closure(sel, n)
        if len(seen) == len(elems):
            return sel
    assert len(seen) == len(elems)
    return sel


def _subspace_orbits(L, p, k, mats):
    """Orbits of O(L) on isotropic k-subspaces: (rep, size, stabilizer)."""
    subs = genus.isotropic_subspaces(L, p, k)
    arr = np.stack(subs)
    keys = _pluecker_keys(arr, p)
    index = {kk.tobytes(): i for i, kk in enumerate(keys)}
    # generator permutations, then union-find for orbits
    parent = np.arange(len(subs))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for g in lattice.small_generating_set(L):
        gT = np.array(g, dtype=np.int64).T
        imk = _pluecker_keys(arr @ gT, p)
        for i in range(len(subs)):
            a, b = find(i), find(index[imk[i].tobytes()])
            if a != b:
                parent[a] = b
    comps = {}
    for i in range(len(subs)):
        comps.setdefault(find(i), []).append(i)
    out = []
    for comp in comps.values():
        S = subs[comp[0]]
        stab = None
        if k > 1:
            key = _pluecker_keys(S[None], p)[0]
            imgs = np.einsum('aj,nij->nai', S, mats)
            ik = _pluecker_keys(imgs, p)
            sel = np.nonzero((ik == key).all(axis=1))[0]
            assert len(sel) * len(comp) == len(mats)
            stab = [mats[i] for i in sel]
        out.append((S, len(comp), stab))
    assert sum(sz for _, sz, _ in out) == len(subs)
    return out


def _pair_orbit_reps(L, p, k, chi):
    """Orbit representatives of p^k-neighbors: (subspace, alt, orbit size)."""
    mats, _ = _ortho_with_chi(L, chi)
    alts = _alt_list(p, k)
    reps = []
    total = 0
    nsubs = 0
    for S, osize, stab in _subspace_orbits(L, p, k, mats):
        nsubs += osize
        if len(alts) == 1:
            reps.append((S, alts[0], osize))
            total += osize
            continue
        keys = {}
        rowmats = []
        for ai, A in enumerate(alts):
            _, N = genus.neighbor_from_subspace(L, p, S, alt=A)
            R = [[int(x * p) for x in row] for row in N]
            keys[tuple(map(tuple, linalg.hermite_normal_form(R)))] = ai
            rowmats.append(np.array(R, dtype=np.int64))
        perms = []
        for s in _few_generators(stab):
            sT = s.T
            pm = []
            for R in rowmats:
                img = (R @ sT).tolist()
                pm.append(keys[tuple(map(tuple,
                                         linalg.hermite_normal_form(img)))])
            perms.append(pm)
        unseen = set(range(len(alts)))
        while unseen:
            root = min(unseen)
            unseen.discard(root)
            comp = [root]
            qi = 0
            while qi < len(comp):
                cur = comp[qi]
                qi += 1
                for pm in perms:
                    jj = pm[cur]
                    if jj in unseen:
                        unseen.discard(jj)
                        comp.append(jj)
            reps.append((S, alts[comp[0]], osize * len(comp)))
            total += osize * len(comp)
    assert total == nsubs * len(alts)
    return reps


def hecke_eigenvalue_orbits(form, p, k=1):
    """Eigenvalue of the p^k-neighbor operator via orbit compression.

    Neighbors are grouped into O(L)-orbits; the orbit of M contributes
    (orbit size) * chi(Phi) * <P o (Z adjG), P> to lambda <P o adjG, P>,
    where <,> is the apolar pairing, P the eigenform component, Z = p Psi
    the integral carrying isometry and adjG the adjugate Gram matrix.
    Pairings are computed modulo word-size primes and the integer
    eigenvalue is reconstructed.  Single-class genera only.
    """
    if len(form.lattices) != 1:
        raise NotImplementedError("orbit compression needs class number 1")
    L = form.lattices[0]
    chi = form.chi
    nu = form.nu
    P = form.components[0]
    mon = _full_monomials(nu)
    midx = _full_index(nu)
    c = [0] * len(mon)
    for m, co in P.coeffs.items():
        c[midx[m]] = int(co)
    w = []
    for i, m in enumerate(mon):
        f = 1
        for e in m:
            for t in range(2, e + 1):
                f *= t
        w.append(f * c[i])
    Gf = linalg.mat_fraction([list(r) for r in L.gram])
    detG = linalg.det(Gf)
    adjG = [[int(Fraction(x) * detG) for x in row]
            for row in linalg.mat_inv(Gf)]
    improper = [_improper_aut(L)] if (chi.d0 != 1 or chi.det_twist) else [None]
    data = []
    for S, A, count in _pair_orbit_reps(L, p, k, chi):
        gram_M, N = genus.neighbor_from_subspace(L, p, S, alt=A)
        j, chv, Psi = _transport(L, [L], gram_M, N, chi, improper)
        Z, delta = _phi_int(Psi)
        if delta != p:
            raise ArithmeticError("carrying isometry denominator != p")
        Y = [[sum(Z[i][t] * adjG[t][jj] for t in range(6))
              for jj in range(6)] for i in range(6)]
        data.append((Y, chv, count))
    lam = 0
    M = 1
    prev = None
    stable = 0
    for pr in _primes29(12):
        carr = np.array([x % pr for x in c], dtype=np.int64)
        r0 = _compose_coeffs_modp(carr, adjG, nu, pr)
        D = sum(wi % pr * int(v) for wi, v in zip(w, r0)) % pr
        if D == 0:
            continue
        T = 0
        for Y, chv, count in data:
            r = _compose_coeffs_modp(carr, Y, nu, pr)
            s = sum(wi % pr * int(v) for wi, v in zip(w, r)) % pr
            T = (T + chv * count * s) % pr
        res = T * pow(D, -1, pr) % pr
        inv = pow(M % pr, -1, pr)
        lam += M * ((res - lam) % pr * inv % pr)
        M *= pr
        cen = lam - M if lam > M // 2 else lam
        # stop once the centered reconstruction survives two new primes
        stable = stable + 1 if cen == prev else 0
        prev = cen
        if M > 1 << 58 and stable >= 2:
            return int(cen)
    raise ArithmeticError("eigenvalue reconstruction did not stabilize")


class EigenSplit:
    """Decomposition of a form space under one Hecke operator."""

    def __init__(self, rational, irrational, defective):
        self.rational = rational      # list of (eigenvalue, [coeff vectors])
        self.irrational = irrational  # list of (min poly coeffs, multiplicity)
        self.defective = defective

    def rational_lines(self):
        return [(lam, vecs) for lam, vecs in self.rational
                if len(vecs) == 1]


def eigen_split(space, T):
    """Split a space under an exact Hecke matrix.

    Rational eigenvalues come with exact eigenvector coefficient
    vectors; non-rational factors are reported with multiplicity.  The
    split is flagged defective when the minimal polynomial is not
    squarefree.
    """
    d = len(T)
    Tm = [[Fraction(x) for x in row] for row in T]
    cp = linalg.charpoly(Tm)
    _, facs = linalg.factor_poly(cp)
    rational = []
    irrational = []
    defective = False
    for fc, mult in facs:
        if len(fc) == 2:
            lam = -fc[0] / fc[1]
            A = [[Tm[i][j] - (lam if i == j else 0) for j in range(d)]
                 for i in range(d)]
            vecs = linalg.kernel(A)
            if len(vecs) < mult:
                defective = True
            rational.append((lam, vecs))
        else:
            # geometric multiplicity via the kernel of fc(T)
            M = linalg.identity_matrix(d)
            acc = [[Fraction(fc[0]) * (i == j) for j in range(d)]
                   for i in range(d)]
            for cidx in range(1, len(fc)):
                M = linalg.mat_mul(Tm, M) if cidx > 1 else Tm
                for i in range(d):
                    for j in range(d):
                        acc[i][j] += fc[cidx] * M[i][j]
            nullity = len(linalg.kernel(acc))
            if nullity < mult * (len(fc) - 1):
                defective = True
            irrational.append((fc, mult))
    return EigenSplit(rational, irrational, defective)


# ------------------------------------------------ standard L-factors

def standard_euler_factor(lams, nu, p, split):
    """Degree-6 standard Euler factor from neighbor eigenvalues.

    lams: {k: lambda_{p,k}}; split: whether p splits in the CM field.
    Coefficients are listed constant term first.
    """
    p = int(p)
    l1 = Fraction(lams[1])
    l2 = Fraction(lams.get(2, 0))
    if split:
        l3 = Fraction(lams.get(3, 0))
        mid = p ** nu + p ** (nu + 1) + p ** (nu + 2) + l2
        return [Fraction(1),
                -l1,
                p ** (nu + 1) * mid,
                -(p ** (2 * nu + 3)) * (2 * l1 + l3),
                p ** (3 * nu + 5) * mid,
                -(p ** (4 * nu + 8)) * l1,
                Fraction(p ** (6 * nu + 12))]
    mid = (p ** nu - p ** (nu + 1) + p ** (nu + 2) + p ** (nu + 3) + l2)
    quart = [Fraction(1),
             -l1,
             p ** (nu + 1) * mid,
             -(p ** (2 * nu + 4)) * l1,
             Fraction(p ** (4 * nu + 8))]
    extra = [Fraction(1), Fraction(0), Fraction(-(p ** (2 * nu + 4)))]
    return series.poly_mul(quart, extra)


# ------------------------------------------------------- theta lifts

class ThetaSeries:
    """Vector-valued q-expansion attached to the discriminant group.

    components[mu][n] with mu a generator-coordinate label and n the
    rational exponent <lambda,lambda>/2; exact to exponent <= bound.
    """

    def __init__(self, weight, invariants, gens_q, bilin, components, bound):
        self.weight = weight
        self.invariants = tuple(invariants)
        self.gens_q = tuple(gens_q)
        self.bilin = tuple(tuple(r) for r in bilin)
        self.components = components
        self.bound = Fraction(bound)

    def coefficient(self, mu, n):
        return self.components.get(tuple(mu), {}).get(Fraction(n), Fraction(0))

    def is_zero(self):
        """Vanishing of every stored coefficient (up to the bound only)."""
        return all(c == 0 for comp in self.components.values()
                   for c in comp.values())

    def qbar(self, mu):
        tot = Fraction(0)
        for i, m in enumerate(mu):
            tot += m * m * self.gens_q[i]
            for j in range(i + 1, len(mu)):
                tot += 2 * m * mu[j] * self.bilin[i][j]
        return tot % 2

    def hecke_image(self, p):
        """Classical weight-w T_p (p coprime to the level); bound shrinks."""
        w = self.weight
        inv = self.invariants
        pinvs = [pow(p, -1, d) for d in inv]
        nb = self.bound / p
        comps = {}
        labels = set(self.components)
        for mu in labels:
            pm = tuple((p * m) % d for m, d in zip(mu, inv))
            pim = tuple((pi * m) % d for pi, m, d in zip(pinvs, mu, inv))
            out = {}
            exps = set(n / p for n in self.components.get(pm, {}))
            exps |= set(n * p for n in self.components.get(pim, {}))
            for n in exps:
                if n > nb:
                    continue
                c = self.components.get(pm, {}).get(n * p, Fraction(0))
                c += p ** (w - 1) * self.components.get(pim, {}).get(
                    n / p, Fraction(0))
                out[n] = c
            comps[mu] = out
        return ThetaSeries(w, inv, self.gens_q, self.bilin, comps, nb)

    def proportionality(self, other, tol_bound=None):
        """Scalar c with other = c * self on the common range, or None."""
        bound = min(self.bound, other.bound)
        if tol_bound is not None:
            bound = min(bound, Fraction(tol_bound))
        c = None
        for mu in set(self.components) | set(other.components):
            exps = (set(self.components.get(mu, {}))
                    | set(other.components.get(mu, {})))
            for n in exps:
                if n > bound:
                    continue
                a = self.coefficient(mu, n)
                b = other.coefficient(mu, n)
                if a == 0 and b == 0:
                    continue
                if a == 0:
                    return None
                r = b / a
                if c is None:
                    c = r
                elif r != c:
                    return None
        return c


def _disc_labels(L):
    """(invariants, positions, U) labelling L'/L in dual coordinates."""
    G = [list(map(int, r)) for r in L.gram]
    D, U, V = linalg.smith_normal_form(G)
    n = len(G)
    invs = []
    pos = []
    for i in range(n):
        d = abs(D[i][i])
        if d > 1:
            invs.append(d)
            pos.append(i)
    return invs, pos, U


def _disc_autos(invariants, gens_q, bilin):
    """Automorphisms of the finite quadratic form, as generator images."""
    from itertools import product as iproduct
    r = len(invariants)
    elems = list(iproduct(*[range(d) for d in invariants]))
    if len(elems) ** r > 10 ** 6:
        raise ValueError("discriminant group too large for brute force")

    def add(a, b):
        return tuple((x + y) % d for x, y, d in zip(a, b, invariants))

    def smul(k, a):
        return tuple((k * x) % d for x, d in zip(a, invariants))

    def qv(mu):
        tot = Fraction(0)
        for i, m in enumerate(mu):
            tot += m * m * gens_q[i]
            for j in range(i + 1, r):
                tot += 2 * m * mu[j] * bilin[i][j]
        return tot % 2

    def order(mu):
        o = 1
        for m, d in zip(mu, invariants):
            o = lcm(o, d // gcd(m, d))
        return o

    qvals = {e: qv(e) for e in elems}
    out = []
    for images in iproduct(*[[e for e in elems
                              if order(e) == invariants[i]
                              and qvals[e] == gens_q[i] % 2]
                             for i in range(r)]):
        def apply(mu, im=images):
            acc = tuple(0 for _ in invariants)
            for m, g in zip(mu, im):
                acc = add(acc, smul(m, g))
            return acc
        seen = {apply(e) for e in elems}
        if len(seen) != len(elems):
            continue
        if all(qvals[apply(e)] == qvals[e] for e in elems):
            out.append({e: apply(e) for e in elems})
    return out


def theta_map(f, N=None):
    """Theta series of a form: weight nu+3, valued in the group algebra
    of the discriminant group.

    Component mu collects sum P_i(lambda) q^{<lambda,lambda>/2} over
    dual vectors in the coset mu, each class weighted by 1/|SO(L_i)|,
    then averaged over the automorphisms of the discriminant form.
    Exact up to exponent N (default ceil((nu+3)D/12)+1, recorded).
    """
    nu = f.nu
    lats = f.lattices
    Dord = abs(linalg.det([list(r) for r in lats[0].gram]))
    if N is None:
        N = (nu + 3) * Dord // 12 + ((nu + 3) * Dord % 12 > 0) + 1
    ref = lats[0]
    invs, pos, U = _disc_labels(ref)
    df_ref = lattice.discriminant_form(ref)
    acc = {}
    from itertools import product as iproduct
    for mu in iproduct(*[range(d) for d in invs]):
        acc[mu] = {}
    for i, L in enumerate(lats):
        P = f.components[i]
        if P.is_zero():
            continue
        _, order, so, _ = lattice.automorphism_group(L)
        wt = Fraction(1, so)
        invs_i, pos_i, U_i = _disc_labels(L)
        if invs_i != invs:
            raise ArithmeticError("discriminant groups disagree")
        if i > 0:
            df_i = lattice.discriminant_form(L)
            relabel = _match_disc_forms(df_i, df_ref)
        else:
            relabel = None
        G = [list(map(int, r)) for r in L.gram]
        det = abs(linalg.det(G))
        Ginv = linalg.mat_inv(G)
        A = [[int(det * Ginv[r][c]) for c in range(6)] for r in range(6)]
        ev = _form_evaluator(P)
        for z in lattice.enumerate_quadratic(Ginv, [0] * 6, 2 * N):
            zz = list(z)
            n_exp = sum(Fraction(zz[r]) * Ginv[r][c] * zz[c]
                        for r in range(6) for c in range(6)) / 2
            lab = tuple((sum(U_i[pos_i[t]][c] * zz[c] for c in range(6)))
                        % invs[t] for t in range(len(invs)))
            if relabel is not None:
                lab = relabel[lab]
            az = [sum(A[r][c] * zz[c] for c in range(6)) for r in range(6)]
            val = Fraction(ev(az), det ** nu) if nu else Fraction(ev(az))
            if val:
                d = acc[lab]
                d[n_exp] = d.get(n_exp, Fraction(0)) + wt * val
    autos = _disc_autos(invs, df_ref.gens_q, df_ref.bilin)
    sym = {mu: {} for mu in acc}
    for g in autos:
        for mu, comp in acc.items():
            tgt = sym[g[mu]]
            for n, c in comp.items():
                tgt[n] = tgt.get(n, Fraction(0)) + c
    na = len(autos)
    for comp in sym.values():
        for n in list(comp):
            comp[n] /= na
    return ThetaSeries(nu + 3, invs, df_ref.gens_q, df_ref.bilin, sym, N)


def _match_disc_forms(A, B):
    """Explicit q- and b-preserving label bijection A -> B."""
    from itertools import product as iproduct
    if A.invariants != B.invariants:
        raise ArithmeticError("discriminant form invariants disagree")
    invs = A.invariants
    r = len(invs)
    elems = list(iproduct(*[range(d) for d in invs]))

    def qval(F, mu):
        tot = Fraction(0)
        for i, m in enumerate(mu):
            tot += m * m * F.gens_q[i]
            for j in range(i + 1, r):
                tot += 2 * m * mu[j] * F.bilin[i][j]
        return tot % 2

    def order(mu):
        o = 1
        for m, d in zip(mu, invs):
            o = lcm(o, d // gcd(m, d))
        return o

    qB = {e: qval(B, e) for e in elems}
    for images in iproduct(*[[e for e in elems
                              if order(e) == invs[i]
                              and qB[e] == qval(A, tuple(int(j == i)
                                                         for j in range(r)))]
                             for i in range(r)]):
        def apply(mu, im=images):
            return tuple(sum(m * g[t] for m, g in zip(mu, im)) % d
                         for t, d in enumerate(invs))
        seen = {apply(e) for e in elems}
        if len(seen) != len(elems):
            continue
        if all(qB[apply(e)] == qval(A, e) for e in elems):
            return {e: apply(e) for e in elems}
    raise ArithmeticError("no discriminant form identification found")


# -------------------------------------------------- dimension series

def _inv_series(bz, N):
    """Coefficients of 1/(sum bz[j] t^j) to order N (bz[0] = 1)."""
    out = [Fraction(1)] + [Fraction(0)] * N
    for n in range(1, N + 1):
        s = Fraction(0)
        for j in range(1, min(n, len(bz) - 1) + 1):
            s += bz[j] * out[n - j]
        out[n] = -s
    return out


def dimension_series(classes, chi, N):
    """Molien expansion of the weight-graded chi-form dimensions.

    Averages chi(g)/det(1 - t g) over each SO-class stabilizer and
    multiplies by (1 - t^2) to strip the radial generator.  Returns a
    RationalSeries holding the truncated expansion to order N.
    """
    total = [Fraction(0)] * (N + 1)
    done = {}
    for idx, _sign in classes.so_classes():
        cdata = classes.classes[idx]
        if idx in done:
            per = done[idx]
        else:
            L = QuadLattice(cdata["gram"])
            elems = lattice.group_with_characters(L, [chi])
            order = len(elems)
            mats = np.array([m for m, _, _ in elems], dtype=np.int64)
            nel = len(elems)
            traces = np.zeros((7, nel), dtype=np.int64)
            traces[0] = 6
            Pw = mats.copy()
            for kk in range(1, 7):
                traces[kk] = np.trace(Pw, axis1=1, axis2=2)
                if kk < 6:
                    Pw = Pw @ mats
            wdict = {}
            for e in range(nel):
                chv = elems[e][2][0]
                s = traces[:, e]
                a = [0] * 7
                a[0] = 1
                for kk in range(1, 7):
                    acc = 0
                    for j in range(1, kk + 1):
                        acc += (-1) ** (j - 1) * a[kk - j] * int(s[j])
                    a[kk] = acc // kk
                # det(1 - t g) = sum (-1)^j e_j t^j
                key = tuple((-1) ** j * a[j] for j in range(7))
                wdict[key] = wdict.get(key, 0) + chv
            per = [Fraction(0)] * (N + 1)
            for key, wt in wdict.items():
                if wt == 0:
                    continue
                inv = _inv_series([Fraction(x) for x in key], N)
                for n in range(N + 1):
                    per[n] += Fraction(wt, order) * inv[n]
            done[idx] = per
        for n in range(N + 1):
            total[n] += per[n]
    out = [total[n] - (total[n - 2] if n >= 2 else 0) for n in range(N + 1)]
    return series.RationalSeries(tuple(out), ())


# ---------------------------------------------------- jacobian forms

def jacobian_form(L):
    """Product of the root-hyperplane linear forms of a lattice.

    Returns an AMForm (factored component) whose degree is the number of
    reflections; the transformation character under O(L) is identified
    among spin x det characters by evaluation on generators.
    """
    roots = lattice.reflections(L)
    if not roots:
        raise ValueError("lattice has no reflections")
    G = [list(map(int, r)) for r in L.gram]
    factors = [tuple(sum(G[r][c] * v[c] for c in range(6)) for r in range(6))
               for v in roots]
    form = FactoredForm(factors)
    deg = len(factors)
    gens = lattice.small_generating_set(L)
    rng = np.random.default_rng(7)
    x0 = None
    for _ in range(100):
        cand = [int(v) for v in rng.integers(-9, 10, 6)]
        if form.evaluate(cand) != 0:
            x0 = cand
            break
    vals = []
    dets = []
    sns = []
    for g in gens:
        gx = [sum(Fraction(g[r][c]) * x0[c] for c in range(6))
              for r in range(6)]
        eps = form.evaluate(gx) / form.evaluate(x0)
        assert eps in (1, -1)
        vals.append(int(eps))
        dets.append(int(linalg.det(g)))
        sn, _ = lattice.spinor_norm(L, g)
        sns.append(sn)
    primes = sorted({q for sn in sns for q in _prime_factors(sn)})
    from itertools import combinations
    best = None
    for rr in range(len(primes) + 1):
        for sub in combinations(primes, rr):
            d0 = 1
            for q in sub:
                d0 *= q
            for tw in (False, True):
                ch = SpinCharacter(d0, det_twist=tw)
                if all(ch.nu(sn) * (dt if tw else 1) == v
                       for sn, dt, v in zip(sns, dets, vals)):
                    if best is None:
                        best = ch
        if best is not None:
            break
    return AMForm([L], deg, best, [form])


def _prime_factors(n):
    n = abs(int(n))
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ------------------------------------------------------- report JSON

def eigenform_report(space, coeffs, eigenvalues, euler_factors=None,
                     theta_kernel=None, theta_bound=None):
    """JSON-ready description of a Hecke eigenform.

    eigenvalues: {(p, k): value}; euler_factors: {p: [coefficients]}.
    """
    desc = {
        "disc": space.classes.desc.delta if space.classes else None,
        "weight": space.nu,
        "character": space.chi.name(),
        "class_dims": list(space.class_dims),
        "dimension": space.dimension,
    }
    rep = {
        "space": desc,
        "coefficients": [str(c) for c in coeffs],
        "eigenvalues": {"%d,%d" % pk: str(v)
                        for pk, v in sorted(eigenvalues.items())},
    }
    if euler_factors:
        rep["euler_factors"] = {str(p): [str(c) for c in cs]
                                for p, cs in sorted(euler_factors.items())}
    if theta_kernel is not None:
        rep["theta_kernel"] = {"vanishes_to_bound": bool(theta_kernel),
                               "bound": str(theta_bound)}
    return rep
