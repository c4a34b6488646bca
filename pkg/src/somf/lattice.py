"""Quadratic lattices over Z.

Even positive-definite lattices as integer Gram matrices, with short-vector
enumeration, automorphism groups (backtracking over short vectors),
isometry testing, reflections, spinor norms and spin characters, and
discriminant forms.

Conventions: B(x,y) = x^T G y, Q(x) = B(x,x)/2.  Isometries act on
coordinates, U^T G U = G.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

from . import linalg


def squarefree_part(n):
    """Squarefree part of a nonzero rational (as a positive integer)."""
    if isinstance(n, Fraction):
        n = n.numerator * n.denominator
    n = abs(int(n))
    if n == 0:
        raise ValueError("squarefree part of 0")
    out = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            if e % 2:
                out *= d
        d += 1
    return out * n


def _floor_sqrt(fr):
    """floor(sqrt(p/q)) for a nonnegative Fraction."""
    if fr < 0:
        raise ValueError
    p, q = fr.numerator, fr.denominator
    return isqrt(p * q) // q if q > 1 else isqrt(p)


class QuadLattice:
    """Even positive-definite lattice given by its Gram matrix."""

    def __init__(self, gram, check=True):
        self.gram = tuple(tuple(int(x) for x in row) for row in gram)
        self.rank = len(self.gram)
        if check:
            self._validate()
        self._cholesky = None
        self._shorts = {}

    def _validate(self):
        G = self.gram
        n = self.rank
        for i in range(n):
            if len(G[i]) != n:
                raise ValueError("non-square Gram")
            if G[i][i] % 2 != 0 or G[i][i] <= 0:
                raise ValueError("Gram not even positive")
            for j in range(n):
                if G[i][j] != G[j][i]:
                    raise ValueError("Gram not symmetric")
        # positive definite: leading principal minors > 0
        for k in range(1, n + 1):
            minor = linalg.det([row[:k] for row in G[:k]])
            if minor <= 0:
                raise ValueError("Gram not positive definite")

    # -- basic data ---------------------------------------------------
    def det(self):
        return int(linalg.det(self.gram))

    def bilinear(self, x, y):
        G = self.gram
        return sum(x[i] * sum(G[i][j] * y[j] for j in range(self.rank))
                   for i in range(self.rank))

    def quadratic(self, x):
        b = self.bilinear(x, x)
        if isinstance(b, int) and b % 2 == 0:
            return b // 2
        return Fraction(b, 2)

    def gram_inverse(self):
        return linalg.mat_inv(self.gram)

    def to_json(self):
        return {"rank": self.rank, "gram": [list(r) for r in self.gram]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["gram"])

    def key(self):
        return self.gram

    def __repr__(self):
        return "QuadLattice(%r)" % (self.gram,)

    # -- short vectors ------------------------------------------------
    def _cholesky_data(self):
        """Rational Cholesky: B(x,x) = sum d_i (x_i + sum_{j>i} r_ij x_j)^2."""
        if self._cholesky is None:
            n = self.rank
            A = [[Fraction(x) for x in row] for row in self.gram]
            d = [Fraction(0)] * n
            r = [[Fraction(0)] * n for _ in range(n)]
            for i in range(n):
                d[i] = A[i][i]
                for j in range(i + 1, n):
                    r[i][j] = A[i][j] / d[i]
                for j in range(i + 1, n):
                    for k in range(j, n):
                        A[j][k] -= d[i] * r[i][j] * r[i][k]
                        A[k][j] = A[j][k]
            self._cholesky = (d, r)
        return self._cholesky

    def vectors_up_to(self, bound, shift=None):
        """Integer vectors x (x+shift != 0) with B(x+s, x+s) <= bound.

        With shift=None only one of each +-pair is returned (first nonzero
        coordinate positive).  Exact arithmetic throughout.
        """
        n = self.rank
        d, r = self._cholesky_data()
        s = [Fraction(x) for x in (shift or [0] * n)]
        out = []
        x = [0] * n

        def rec(i, remaining):
            if i < 0:
                v = [a + b for a, b in zip(x, s)]
                if any(v):
                    out.append(list(x))
                return
            c = s[i] + sum(r[i][j] * (x[j] + s[j]) for j in range(i + 1, n))
            lim = remaining / d[i]
            root = _floor_sqrt(lim)
            lo = -root - 1 - c
            hi = root + 1 - c
            xi = int(lo) - 1
            while xi <= hi:
                t = d[i] * (xi + c) ** 2
                if t <= remaining:
                    x[i] = xi
                    rec(i - 1, remaining - t)
                xi += 1
            x[i] = 0

        rec(n - 1, Fraction(bound))
        if shift is None:
            half = []
            for v in out:
                nz = next(a for a in v if a)
                if nz > 0:
                    half.append(v)
            return half
        return out

    def short_vectors(self, bound):
        """One vector per +-pair with 0 < B(x,x) <= bound, sorted by norm."""
        key = int(bound)
        if key not in self._shorts:
            sup = [b for b in self._shorts if b > key]
            if sup:
                vs = []
                for v in self._shorts[min(sup)]:
                    if self.bilinear(v, v) > key:
                        break
                    vs.append(v)
            else:
                vs = self.vectors_up_to(key)
                vs.sort(key=lambda v: (self.bilinear(v, v), v))
            self._shorts[key] = vs
        return self._shorts[key]

    def vectors_with_norm(self, norm, shift=None):
        """Vectors (in x+shift if shift given) with B = norm exactly."""
        res = []
        for v in self.vectors_up_to(norm, shift=shift):
            w = [a + b for a, b in zip(v, shift)] if shift else v
            if self.bilinear(w, w) == norm:
                res.append(v)
        return res

    def minimum(self):
        b = 2
        while True:
            vs = self.short_vectors(b)
            if vs:
                return self.bilinear(vs[0], vs[0])
            b += 2


# ------------------------------------------------------------ isometries

class Isometry:
    """Map between lattices: columns of matrix = images of source basis."""

    def __init__(self, source, target, matrix, check=True):
        self.source = source
        self.target = target
        self.matrix = tuple(tuple(Fraction(x) for x in row) for row in matrix)
        if check:
            M = [list(r) for r in self.matrix]
            lhs = linalg.mat_mul(linalg.mat_mul(linalg.transpose(M),
                                                linalg.mat_fraction(target.gram)), M)
            if not linalg.mat_eq(lhs, linalg.mat_fraction(source.gram)):
                raise ValueError("matrix is not an isometry")

    def det(self):
        d = linalg.det(self.matrix)
        if d not in (1, -1):
            raise ValueError("isometry determinant not +-1")
        return int(d)

    def compose(self, other):
        """self o other (apply other first)."""
        if other.target is not self.source and other.target.gram != self.source.gram:
            raise ValueError("composition mismatch")
        M = linalg.mat_mul([list(r) for r in self.matrix],
                           [list(r) for r in other.matrix])
        return Isometry(other.source, self.target, M, check=False)

    def inverse(self):
        return Isometry(self.target, self.source,
                        linalg.mat_inv([list(r) for r in self.matrix]),
                        check=False)


def _aut_backtrack(source, target, find_all, det_filter=None):
    """Backtracking search for isometries source -> target.

    Candidate image vectors for basis vector i are target vectors of norm
    G_source[i][i]; Gram constraints pruned at every level.  Deterministic
    ordering.  Returns list of matrices (columns = images).
    """
    import numpy as np
    n = source.rank
    Gs = np.array(source.gram, dtype=np.int64)
    maxnorm = int(max(Gs[i, i] for i in range(n)))
    half = target.short_vectors(maxnorm)
    if len(half) < n:
        return []
    V = np.array(list(half) + [[-a for a in v] for v in half], dtype=np.int64)
    Gt = np.array(target.gram, dtype=np.int64)
    GV = V @ Gt
    norms = (GV * V).sum(axis=1)
    results = []
    chosen = [0] * n

    # full Gram agreement at the leaf forces an isometry (det +-1 since the
    # determinants match), so only det_filter needs an actual determinant
    def rec(i, cand):
        if results and not find_all:
            return
        if i == n:
            M = V[chosen].T
            if det_filter is not None:
                d = int(round(np.linalg.det(M)))
                if d != det_filter:
                    return
            results.append([[int(x) for x in row] for row in M])
            return
        for ci in cand[i]:
            chosen[i] = ci
            row = GV[ci]
            nxt = [None] * n
            ok = True
            for l in range(i + 1, n):
                nxt[l] = cand[l][V[cand[l]] @ row == Gs[i, l]]
                if len(nxt[l]) == 0:
                    ok = False
                    break
            if ok or i == n - 1:
                rec(i + 1, nxt)

    rec(0, [np.nonzero(norms == Gs[i, i])[0] for i in range(n)])
    return results


def isometry(L, M, proper_only=False):
    """An isometry L -> M or None.  proper_only restricts to det +1."""
    if L.rank != M.rank:
        return None
    if L.det() != M.det():
        return None
    # cheap invariant prescreen: short vector counts by norm
    b = max(4, L.minimum())
    cl = sorted(L.bilinear(v, v) for v in L.short_vectors(b))
    cm = sorted(M.bilinear(v, v) for v in M.short_vectors(b))
    if cl != cm:
        return None
    found = _aut_backtrack(L, M, find_all=False,
                           det_filter=1 if proper_only else None)
    if not found:
        return None
    return Isometry(L, M, found[0])


_aut_cache = {}


def automorphisms(L):
    """All elements of O(L) as matrices (cached per Gram)."""
    key = L.key()
    if key not in _aut_cache:
        gens, order, _, _ = automorphism_group(L)
        sel = small_generating_set(L)
        elems = _closure_with_values(sel, [() for _ in sel], L.rank, order)
        assert len(elems) == order
        _aut_cache[key] = [m for m, _v in elems.values()]
    return _aut_cache[key]


def _closure_with_values(gens, gvals, n, order=None):
    """BFS closure of the generators with multiplicative value tracking.

    gens: integer matrices; gvals[i]: tuple of +-1 values for gens[i]
    (homomorphic, combined componentwise).  Returns dict bytes-key ->
    (matrix as list rows, value tuple).  Matmuls batched via numpy.
    """
    import numpy as np
    garr = [np.array(g, dtype=np.int64) for g in gens]
    nv = len(gvals[0]) if gvals else 0
    idm = np.eye(n, dtype=np.int64)
    one = tuple(1 for _ in range(nv))
    table = {idm.tobytes(): ([[int(x) for x in r] for r in idm], one)}
    fmats = idm[None, :, :]
    fvals = [one]
    while len(fmats):
        new_mats = []
        new_vals = []
        for g, gv in zip(garr, gvals):
            prod = fmats @ g
            for M, ev in zip(prod, fvals):
                k = M.tobytes()
                if k not in table:
                    e = tuple(a * b for a, b in zip(ev, gv))
                    entry = ([[int(x) for x in r] for r in M], e)
                    table[k] = entry
                    new_mats.append(M)
                    new_vals.append(e)
        fmats = (np.array(new_mats, dtype=np.int64) if new_mats
                 else np.zeros((0, n, n), dtype=np.int64))
        fvals = new_vals
    if order is not None:
        assert len(table) == order, (len(table), order)
    return table


_small_gens_cache = {}


def small_generating_set(L):
    """Few-element generating set of O(L), verified against |O|."""
    key = L.key()
    if key in _small_gens_cache:
        return _small_gens_cache[key]
    import numpy as np
    gens, order, _, _ = automorphism_group(L)
    n = L.rank
    sel = []
    members = {np.eye(n, dtype=np.int64).tobytes()}
    for g in gens:
        if len(members) == order:
            break
        if np.array(g, dtype=np.int64).tobytes() in members:
            continue
        sel.append(g)
        members = set(_closure_with_values(sel, [() for _ in sel], n))
    assert len(members) == order
    _small_gens_cache[key] = sel
    return sel


_aut_group_cache = {}


def automorphism_group(L):
    """(generators, |O|, |SO|, has_improper) without full enumeration.

    Orbit-stabilizer chain on the standard basis: |O| is the product over
    levels i of the number of completable images of b_i fixing b_0..b_{i-1};
    one completion per image gives Schreier coset representatives, which
    generate the group.
    """
    key = L.key()
    if key in _aut_group_cache:
        return _aut_group_cache[key]
    import numpy as np
    n = L.rank
    G = np.array(L.gram, dtype=np.int64)
    maxnorm = int(G.diagonal().max())
    half = L.short_vectors(maxnorm)
    V = np.array(list(half) + [[-a for a in v] for v in half], dtype=np.int64)
    GV = V @ G
    norms = (GV * V).sum(axis=1)
    base_cand = [np.nonzero(norms == G[i, i])[0] for i in range(n)]
    chosen = [0] * n

    def complete(level):
        """One completion of chosen[:level+1]; None if impossible."""
        found = []

        def rec(i, cand):
            if found:
                return
            if i == n:
                found.append([c for c in chosen])
                return
            for ci in cand[i]:
                chosen[i] = ci
                row = GV[ci]
                nxt = [None] * n
                ok = True
                for l in range(i + 1, n):
                    nxt[l] = cand[l][V[cand[l]] @ row == G[i, l]]
                    if len(nxt[l]) == 0:
                        ok = False
                        break
                if ok or i == n - 1:
                    rec(i + 1, nxt)

        cand = [None] * n
        ok = True
        for l in range(level + 1, n):
            cc = base_cand[l]
            for j in range(level + 1):
                cc = cc[V[cc] @ GV[chosen[j]] == G[j, l]]
            cand[l] = cc
            if len(cc) == 0:
                ok = False
                break
        if not ok:
            return None
        rec(level + 1, cand)
        if not found:
            return None
        idx = found[0]
        return [[int(V[idx[j]][r]) for j in range(n)] for r in range(n)]

    id_idx = {}
    for a, v in enumerate(V):
        id_idx[tuple(int(x) for x in v)] = a
    order = 1
    gens = []
    for i in range(n):
        e_i = tuple(1 if j == i else 0 for j in range(n))
        cand = base_cand[i]
        for j in range(i):
            cand = cand[V[cand] @ GV[id_idx[tuple(
                1 if r == j else 0 for r in range(n))]] == G[j, i]]
        cnt = 0
        for j in range(i):
            chosen[j] = id_idx[tuple(1 if r == j else 0 for r in range(n))]
        for ci in cand:
            chosen[i] = ci
            g = complete(i)
            if g is not None:
                cnt += 1
                if tuple(int(x) for x in V[ci]) != e_i:
                    gens.append(g)
        order *= cnt
    has_improper = any(linalg.det(g) == -1 for g in gens)
    so = order // 2 if has_improper else order
    res = (gens, order, so, has_improper)
    _aut_group_cache[key] = res
    return res


def generating_set(elems):
    """Small generating subset, verified by closure."""
    keyset = {_mkey(g) for g in elems}
    gens = []
    closure = {_mkey(linalg.identity_matrix(len(elems[0])))}
    for g in sorted(elems, key=_mkey, reverse=True):
        if _mkey(g) not in closure:
            gens.append(g)
            closure = _close(gens, len(elems[0]))
            if len(closure) == len(keyset):
                break
    assert closure == keyset, "closure does not reproduce enumerated group"
    return gens


def _mkey(M):
    return tuple(tuple(int(x) for x in row) for row in M)


def _close(gens, n):
    idm = linalg.identity_matrix(n)
    seen = {_mkey(idm)}
    frontier = [idm]
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                b = linalg.mat_mul(a, g)
                k = _mkey(b)
                if k not in seen:
                    seen.add(k)
                    new.append(b)
        frontier = new
    return seen


def group_with_characters(L, characters):
    """Enumerate O(L) via closure over generators, tracking character values.

    characters: list of SpinCharacter.  Returns a list of
    (matrix, det, tuple of character values), one per group element.
    Characters are homomorphisms, so values propagate along the closure.
    """
    _gens, order, _so, _ = automorphism_group(L)
    gens = small_generating_set(L)
    gvals = []
    for g in gens:
        iso = Isometry(L, L, g, check=False)
        gvals.append((iso.det(),)
                     + tuple(chi.value(iso, L) for chi in characters))
    raw = _closure_with_values(gens, gvals, L.rank, order)
    return [(m, vals[0], vals[1:]) for m, vals in raw.values()]


def reflections(L):
    """Primitive vectors of the det -1, codim-1-fixed elements of O(L)."""
    n = L.rank
    out = []
    for g in automorphisms(L):
        # reflection <=> involution with det -1 and trace n-2
        if sum(g[i][i] for i in range(n)) != n - 2:
            continue
        if linalg.det(g) != -1:
            continue
        if not linalg.mat_eq(linalg.mat_mul(g, g), linalg.identity_matrix(n)):
            continue
        neg = [[g[i][j] + (1 if i == j else 0) for j in range(n)]
               for i in range(n)]
        vec = linalg.kernel(neg)
        assert len(vec) == 1
        out.append(tuple(vec[0]))
    out.sort()
    return out


def reflection_matrix(L, x):
    """tau_x(y) = y - (B(x,y)/Q(x)) x as a matrix over Q."""
    n = L.rank
    q = Fraction(L.bilinear(x, x), 2)
    G = L.gram
    cols = []
    for j in range(n):
        e = [Fraction(0)] * n
        e[j] = Fraction(1)
        bxy = sum(Fraction(x[i]) * G[i][j] for i in range(n))
        col = [e[i] - bxy / q * x[i] for i in range(n)]
        cols.append(col)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


# -------------------------------------------------------- spinor norms

def reflection_decomposition(L, M):
    """Cassels-style decomposition of an isometry matrix M into reflections.

    Returns a list of reflection vectors (rational) whose product of
    tau's equals M.  Greedy pivoting on basis vectors; the classical
    degenerate fallback (auxiliary reflection when Q(sigma x - x) = 0)
    cannot trigger on positive-definite forms but is kept for safety.
    """
    n = L.rank
    sigma = [[Fraction(M[i][j]) for j in range(n)] for i in range(n)]
    idm = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    vecs = []

    Gm = [[Fraction(x) for x in row] for row in L.gram]

    def apply_tau(v, mat):
        # rank-1 update: tau_v(y) = y - B(v,y)/Q(v) * v applied columnwise
        gv = [sum(Gm[i][t] * v[t] for t in range(n)) for i in range(n)]
        qv = sum(gv[t] * v[t] for t in range(n)) / 2
        r = [sum(gv[i] * mat[i][j] for i in range(n)) / qv for j in range(n)]
        return [[mat[i][j] - r[j] * v[i] for j in range(n)] for i in range(n)]

    guard = 0
    while not linalg.mat_eq(sigma, idm):
        guard += 1
        if guard > 2 * n + 4:
            raise ArithmeticError("reflection decomposition failed")
        moved = None
        for j in range(n):
            col = [sigma[i][j] for i in range(n)]
            e = [Fraction(int(i == j)) for i in range(n)]
            if col != e:
                moved = (j, col, e)
                break
        j, sx, x = moved
        v = [a - b for a, b in zip(sx, x)]
        qv = Fraction(L.bilinear(v, v), 2)
        if qv != 0:
            vecs.append(v)
            sigma = apply_tau(v, sigma)
        else:
            # degenerate fallback: reflect through sigma(x) first
            w = sx
            qw = Fraction(L.bilinear(w, w), 2)
            if qw == 0:
                raise ArithmeticError("isotropic vector in definite lattice")
            vecs.append(w)
            sigma = apply_tau(w, sigma)
    return vecs


def spinor_norm(L, M):
    """(squarefree spinor norm, parity of reflection count).

    For det +1 the parity is 0; det -1 gives parity 1 (one extra
    reflection, reported).
    """
    vecs = reflection_decomposition(L, M)
    prod = Fraction(1)
    for v in vecs:
        prod *= Fraction(L.bilinear(v, v), 2)
    return squarefree_part(prod) if vecs else 1, len(vecs) % 2


class SpinCharacter:
    """spin_{d0} (x) optional det twist: value = nu_{d0}(N(sigma)) * det^e."""

    def __init__(self, d0=1, det_twist=False):
        d0 = int(d0)
        if d0 < 1 or squarefree_part(d0) != d0:
            raise ValueError("d0 must be a squarefree positive integer")
        self.d0 = d0
        self.det_twist = bool(det_twist)

    def nu(self, n):
        """Completely multiplicative sign on squarefree positive n."""
        n = int(n)
        s = 1
        d = 2
        m = n
        while d * d <= m:
            if m % d == 0:
                m //= d
                if self.d0 % d == 0:
                    s = -s
            d += 1
        if m > 1 and self.d0 % m == 0:
            s = -s
        return s

    def value(self, iso, L=None):
        """Character value on an isometry (matrix or Isometry) of L."""
        if isinstance(iso, Isometry):
            L = L or iso.source
            M = iso.matrix
        else:
            M = iso
        sn, _ = spinor_norm(L, M)
        v = self.nu(sn)
        if self.det_twist:
            v *= int(linalg.det(M))
        return v

    def name(self):
        base = "triv" if self.d0 == 1 else "spin%d" % self.d0
        return base + ("*det" if self.det_twist else "")

    def __eq__(self, other):
        return (isinstance(other, SpinCharacter)
                and (self.d0, self.det_twist) == (other.d0, other.det_twist))

    def __hash__(self):
        return hash((self.d0, self.det_twist))

    def __repr__(self):
        return "SpinCharacter(%d%s)" % (self.d0,
                                        ", det" if self.det_twist else "")


# ---------------------------------------------------- discriminant forms

class DiscriminantForm:
    """Finite quadratic form (L'/L, q) with q in Q/2Z, b in Q/Z."""

    def __init__(self, invariants, gens_q, bilin):
        # invariants: cyclic orders d_i > 1;  gens_q: q(e_i) mod 2
        # bilin[i][j]: b(e_i, e_j) mod 1
        self.invariants = tuple(int(d) for d in invariants)
        self.gens_q = tuple(Fraction(x) % 2 for x in gens_q)
        self.bilin = tuple(tuple(Fraction(x) % 1 for x in row) for row in bilin)

    def order(self):
        n = 1
        for d in self.invariants:
            n *= d
        return n

    def elements(self):
        from itertools import product
        return list(product(*[range(d) for d in self.invariants]))

    def q_value(self, elem):
        """q(sum a_i e_i) mod 2."""
        total = Fraction(0)
        k = len(self.invariants)
        for i in range(k):
            total += self.gens_q[i] * elem[i] * elem[i]
            for j in range(i + 1, k):
                total += 2 * self.bilin[i][j] * elem[i] * elem[j]
        return total % 2

    def q_multiset(self):
        from collections import Counter
        return Counter(self.q_value(e) for e in self.elements())


def discriminant_form(L):
    """Discriminant form of L via Smith normal form of the Gram matrix."""
    G = [list(r) for r in L.gram]
    D, U, V = linalg.smith_normal_form(G)
    n = L.rank
    Ginv = L.gram_inverse() if isinstance(L, QuadLattice) else linalg.mat_inv(G)
    Uinv = linalg.mat_inv(U)
    orders = []
    gens = []
    for i in range(n):
        d = abs(D[i][i])
        if d > 1:
            orders.append(d)
            gens.append([Uinv[r][i] for r in range(n)])  # representative y
    # dual vector of representative y is G^{-1} y; q = y^T G^{-1} y mod 2
    k = len(orders)
    gens_q = []
    bil = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        gi = linalg.mat_vec(Ginv, gens[i])
        gens_q.append(sum(Fraction(a) * b for a, b in zip(gens[i], gi)) % 2)
        for j in range(k):
            gj = gens[j]
            bil[i][j] = sum(Fraction(a) * b
                            for a, b in zip(gi, gj)) % 1
    return DiscriminantForm(orders, gens_q, bil)


def disc_form_isomorphic(A, B):
    """Brute-force isomorphism search preserving q (|group| <= 10^4)."""
    if sorted(A.invariants) != sorted(B.invariants):
        return False
    if A.order() > 10 ** 4:
        raise ValueError("discriminant form order cap exceeded")
    if A.q_multiset() != B.q_multiset():
        return False
    # search images of A's generators among B elements of the right order
    elems = B.elements()

    def elem_order(e):
        from math import lcm
        o = 1
        for a, d in zip(e, B.invariants):
            o = lcm(o, d // gcd(a, d))
        return o

    def add(e1, e2):
        return tuple((a + b) % d for a, b, d in zip(e1, e2, B.invariants))

    def scale(e, s):
        return tuple((a * s) % d for a, d in zip(e, B.invariants))

    def b_val(e1, e2):
        return Fraction(B.q_value(add(e1, e2)) - B.q_value(e1) - B.q_value(e2),
                        2) % 1

    def a_b_val(e1, e2):
        return Fraction(A.q_value(tuple((x + y) % d for x, y, d in
                                        zip(e1, e2, A.invariants)))
                        - A.q_value(e1) - A.q_value(e2), 2) % 1

    k = len(A.invariants)
    agens = [tuple(1 if i == j else 0 for j in range(k)) for i in range(k)]
    chosen = []

    def span_size(imgs):
        seen = {tuple([0] * len(B.invariants))}
        frontier = list(seen)
        while frontier:
            new = []
            for e in frontier:
                for g in imgs:
                    f = add(e, g)
                    if f not in seen:
                        seen.add(f)
                        new.append(f)
            frontier = new
        return len(seen)

    def rec(i):
        if i == k:
            return span_size(chosen) == B.order()
        gi = agens[i]
        need_o = A.invariants[i]
        need_q = A.q_value(gi)
        for cand in elems:
            if elem_order(cand) != need_o or B.q_value(cand) != need_q:
                continue
            ok = True
            for j in range(i):
                if b_val(chosen[j], cand) != a_b_val(agens[j], gi):
                    ok = False
                    break
            if not ok:
                continue
            chosen.append(cand)
            if rec(i + 1):
                return True
            chosen.pop()
        return False

    return rec(0)


def enumerate_quadratic(gram, shift, bound):
    """Lazily yield integer x with (x+shift)^T gram (x+shift) <= bound.

    gram: symmetric positive-definite matrix of Fractions/ints (any
    scaling); shift rational.  Exact; yields x (not x+shift).
    """
    n = len(gram)
    A = [[Fraction(v) for v in row] for row in gram]
    d = [Fraction(0)] * n
    r = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = A[i][i]
        for j in range(i + 1, n):
            r[i][j] = A[i][j] / d[i]
        for j in range(i + 1, n):
            for k in range(j, n):
                A[j][k] -= d[i] * r[i][j] * r[i][k]
                A[k][j] = A[j][k]
    s = [Fraction(v) for v in shift]
    x = [0] * n

    def rec(i, remaining):
        if i < 0:
            yield list(x)
            return
        c = s[i] + sum(r[i][j] * (x[j] + s[j]) for j in range(i + 1, n))
        root = _floor_sqrt(remaining / d[i])
        xi = int((-root - 1 - c).__floor__()) - 1
        hi = root + 1 - c
        while xi <= hi:
            t = d[i] * (xi + c) ** 2
            if t <= remaining:
                x[i] = xi
                yield from rec(i - 1, remaining - t)
            xi += 1
        x[i] = 0

    yield from rec(n - 1, Fraction(bound))


# ---------------------------------------------------------------- LLL

def lll_reduce(gram):
    """LLL reduction of a Gram matrix; returns (reduced_gram, U) with
    U^T G U = reduced.  Size-reduction/swap decisions use floating-point
    Gram-Schmidt, all updates to G and U are exact integer operations,
    so the returned pair is exact regardless of rounding (delta = 3/4)."""
    n = len(gram)
    G = [[int(x) for x in row] for row in gram]
    U = linalg.identity_matrix(n)

    def gso():
        mu = [[0.0] * n for _ in range(n)]
        Bst = [0.0] * n
        for i in range(n):
            Bst[i] = float(G[i][i])
            for j in range(i):
                mu[i][j] = (G[i][j]
                            - sum(mu[i][t] * mu[j][t] * Bst[t]
                                  for t in range(j))) / Bst[j]
                Bst[i] -= mu[i][j] ** 2 * Bst[j]
        return mu, Bst

    def swap(i):
        G[i], G[i + 1] = G[i + 1], G[i]
        for r in range(n):
            G[r][i], G[r][i + 1] = G[r][i + 1], G[r][i]
        for r in range(n):
            U[r][i], U[r][i + 1] = U[r][i + 1], U[r][i]

    def translate(i, j, q):
        # basis_i -= q * basis_j
        for r in range(n):
            G[i][r] -= q * G[j][r]
        for r in range(n):
            G[r][i] -= q * G[r][j]
        for r in range(n):
            U[r][i] -= q * U[r][j]

    k = 1
    guard = 0
    while k < n:
        guard += 1
        if guard > 10000:
            break
        mu, Bst = gso()
        for j in range(k - 1, -1, -1):
            q = int(mu[k][j] + 0.5) if mu[k][j] >= -0.5 else -int(0.5 - mu[k][j])
            if q:
                translate(k, j, q)
                mu, Bst = gso()
        if Bst[k] >= (0.75 - mu[k][k - 1] ** 2) * Bst[k - 1] - 1e-9:
            k += 1
        else:
            swap(k - 1)
            k = max(k - 1, 1)
    return G, U
