"""Genus of rank-6 even lattices attached to an imaginary quadratic field.

Seed construction inside E8, Kneser p^k-neighbors, mass-certified class
enumeration, closed-form local densities and masses, and weight-0
spin-character dimensions.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction
from math import gcd

from . import linalg
from .lattice import (QuadLattice, SpinCharacter, automorphism_group,
                      discriminant_form, disc_form_isomorphic,
                      enumerate_quadratic, group_with_characters, isometry,
                      lll_reduce)

E8_GRAM = [
    [2, -1, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, 0],
    [0, 0, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, -1],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0],
    [0, 0, 0, 0, -1, 0, 0, 2],
]


def kronecker(a, n):
    """Kronecker symbol (a/n)."""
    a = int(a)
    n = int(n)
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -sign
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 and a % 8 in (3, 5):
            sign = -sign
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def squarefree(n):
    n = abs(int(n))
    if n == 0:
        return False
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


class GenusDescriptor:
    """Imaginary quadratic discriminant data for the rank-6 genus."""

    def __init__(self, delta):
        delta = int(delta)
        if delta >= 0:
            raise ValueError("discriminant must be negative")
        D = -delta
        if delta % 4 == 1:
            if not squarefree(D):
                raise ValueError("non-fundamental discriminant")
        elif delta % 4 == 0:
            m = D // 4
            if not (squarefree(m) and m % 4 in (1, 2)):
                raise ValueError("non-fundamental discriminant")
        else:
            raise ValueError("non-fundamental discriminant")
        self.delta = delta
        self.D = D
        self.prime_divisors = _prime_divisors(D)
        self.t = len(self.prime_divisors)

    def chi(self, p):
        return kronecker(self.delta, p)

    def __repr__(self):
        return "GenusDescriptor(%d)" % self.delta


def _prime_divisors(n):
    out = []
    d = 2
    n = abs(n)
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ------------------------------------------------------- binary lattice

def norm_form_gram(desc):
    """Gram of the ring of integers with the norm form (even binary)."""
    D = desc.D
    if desc.delta % 2:
        return [[2, 1], [1, (D + 1) // 2]]
    return [[2, 0], [0, D // 2]]


def target_disc_form(desc):
    """(O_K'/O_K, -N) as the discriminant form of the negated norm form."""
    neg = [[-x for x in row] for row in norm_form_gram(desc)]
    # discriminant_form only uses G^{-1}; build a plain object
    class _L:
        gram = neg
        rank = 2
    _L.gram = neg
    return discriminant_form(_L)


# ------------------------------------------------------------ seed

def seed_lattice(desc):
    """Rank-6 member of the genus: orthogonal complement in E8 of a
    primitive embedding of the binary norm form."""
    if desc.D > 200:
        raise ValueError("discriminant beyond search budget")
    E8 = QuadLattice(E8_GRAM)
    target = norm_form_gram(desc)
    b22 = target[1][1]
    b12 = target[0][1]
    u = None
    for v in E8.short_vectors(2):
        if E8.bilinear(v, v) == 2:
            u = v
            break
    # particular solution of B(u, v0) = b12
    Gu = [sum(E8_GRAM[i][j] * u[j] for j in range(8)) for i in range(8)]
    v0 = _diophantine_solve(Gu, b12)
    # perp lattice basis (saturated)
    K = linalg.kernel([Gu])  # 7 primitive integer rows
    gramK = linalg.mat_mul(linalg.mat_mul(K, E8_GRAM), linalg.transpose(K))
    # shift: coordinates of the perp-projection of v0 in the K basis
    a = Fraction(b12, 2)
    w0 = [Fraction(x) - a * ui for x, ui in zip(v0, u)]
    rhs = linalg.mat_vec(linalg.mat_mul(K, E8_GRAM), w0)
    shift = linalg.solve(gramK, rhs)
    tgt = Fraction(b22) - 2 * a * a
    want = target_disc_form(desc)
    for z in enumerate_quadratic(gramK, shift, tgt):
        val = _eval_quad(gramK, [zi + si for zi, si in zip(z, shift)])
        if val != tgt:
            continue
        v = [v0[i] + sum(z[r] * K[r][i] for r in range(7)) for i in range(8)]
        if E8.bilinear(v, v) != b22 or E8.bilinear(u, v) != b12:
            continue
        Gv = [sum(E8_GRAM[i][j] * v[j] for j in range(8)) for i in range(8)]
        comp = linalg.kernel([Gu, Gv])
        if len(comp) != 6:
            continue
        gramL = linalg.mat_mul(linalg.mat_mul(comp, E8_GRAM),
                               linalg.transpose(comp))
        if linalg.det(gramL) != desc.D:
            continue
        red, _ = lll_reduce(gramL)
        L = QuadLattice(red)
        if disc_form_isomorphic(discriminant_form(L), want):
            return L
    raise RuntimeError("no embedding found within budget for %s" % desc)


def _eval_quad(G, x):
    n = len(G)
    return sum(Fraction(G[i][j]) * x[i] * x[j] for i in range(n)
               for j in range(n))


def _diophantine_solve(coeffs, rhs):
    """Integer x with sum coeffs[i] x[i] = rhs (coeffs primitive)."""
    n = len(coeffs)
    g = 0
    for c in coeffs:
        g = gcd(g, abs(c))
    if rhs % g:
        raise ValueError("no integer solution")
    # extended gcd across the vector
    x = [0] * n
    g_cur = 0
    combo = [0] * n
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        if g_cur == 0:
            g_cur = abs(c)
            combo = [0] * n
            combo[i] = 1 if c > 0 else -1
        else:
            old_g = g_cur
            gg, s, t = _xgcd(g_cur, c)
            combo = [s * v for v in combo]
            combo[i] += t
            g_cur = gg
    scale = rhs // g_cur
    return [scale * v for v in combo]


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


# ------------------------------------------------------------ neighbors

def isotropic_subspaces(L, p, k):
    """Totally isotropic k-dim subspaces of L/pL as RREF basis matrices.

    Each subspace is produced exactly once, directly in reduced row echelon
    form: rows ordered by pivot column, pivot entries 1, pivot columns zero
    elsewhere.  Extension candidates per level are filtered with vectorized
    mod-p arithmetic.
    """
    import numpy as np
    n = L.rank
    G = np.array(L.gram, dtype=np.int64)

    # canonical projective isotropic points (first nonzero entry = 1),
    # generated in blocks of constant pivot so pivots are nondecreasing
    parts = []
    for lead in range(n):
        t = n - lead - 1
        X = np.zeros((p ** t, n), dtype=np.int64)
        X[:, lead] = 1
        idx = np.arange(p ** t)
        for j in range(t):
            X[:, n - 1 - j] = idx % p
            idx //= p
        qv = (np.einsum('ij,jk,ik->i', X, G, X) // 2) % p
        parts.append(X[qv == 0])
    P = np.ascontiguousarray(np.vstack(parts))
    m = len(P)
    piv = np.argmax(P != 0, axis=1)
    if k == 1:
        return [P[i:i + 1].copy() for i in range(m)]

    GP = (P @ G) % p
    # first index whose pivot exceeds a given column
    nxt = np.searchsorted(piv, np.arange(n + 1))
    spaces = [(i,) for i in range(m)]
    for _ in range(2, k + 1):
        new = []
        for S in spaces:
            lo = nxt[piv[S[-1]] + 1]
            if lo >= m:
                continue
            # RREF shape: candidate vanishes at existing pivot columns,
            # existing rows vanish at the candidate's pivot column
            ok = (P[lo:, piv[list(S)]] == 0).all(axis=1)
            for i in S:
                ok &= P[i][piv[lo:]] == 0
                ok &= (GP[lo:] @ P[i]) % p == 0
            for c in np.nonzero(ok)[0]:
                new.append(S + (lo + c,))
        spaces = new
    return [P[list(S)].copy() for S in spaces]


def _nullspace_small(A, p, n):
    import numpy as np
    A = A % p
    M = A.copy()
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if M[i, c] % p:
                piv = i
                break
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        M[r] = (M[r] * pow(int(M[r, c]), p - 2, p)) % p
        for i in range(rows):
            if i != r and M[i, c] % p:
                M[i] = (M[i] - M[i, c] * M[r]) % p
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for rr, pc in enumerate(pivots):
            basis[i, pc] = (-int(M[rr, fc])) % p
    return basis % p


def neighbor_from_subspace(L, p, rows, alt=None):
    """Kneser neighbor attached to a totally isotropic subspace.

    rows: k x n integer matrix (mod-p basis).  Returns (gram_M, N) where
    N (rows = neighbor basis in L-coordinates, rational) has det +-1.

    For k >= 2 the subspace does not determine the neighbor: valid lifts
    of the basis differ by an alternating k x k matrix mod p, and distinct
    matrices give distinct lattices.  alt[i][j] prescribes the pairing
    B(u_i, w_j) mod p of the extra lift shift (alt alternating, default 0),
    so the p^k-neighbors with a given reduction are (rows, alt) pairs with
    alt running over the p^(k(k-1)/2) strictly-upper-triangular choices.
    """
    n = L.rank
    k = len(rows)
    G = L.gram
    u = [list(map(int, r)) for r in rows]

    def B(x, y):
        return sum(x[i] * G[i][j] * y[j] for i in range(n) for j in range(n))

    # adjust lifts: Gram(u) = 0 mod p^2 (diagonal: Q(u_i) = 0 mod p^2)
    for i in range(k):
        # w with B(u_l, w) = c_l mod p for all l <= i constraints
        targ = [0] * (i + 1)
        qi = B(u[i], u[i]) // 2
        targ[i] = (-(qi // p)) % p
        for l in range(i):
            bl = B(u[l], u[i])
            assert bl % p == 0
            targ[l] = (-(bl // p)) % p
        w = _solve_modp([[B(u[l], e) % p for e in _std(n)] for l in range(i + 1)],
                        targ, p)
        u[i] = [a + p * b for a, b in zip(u[i], w)]
        assert B(u[i], u[i]) % (2 * p * p) == 0
        for l in range(i):
            assert B(u[l], u[i]) % (p * p) == 0
    if alt is not None:
        base = [list(ui) for ui in u]
        for i in range(k):
            targ = [alt[l][i] % p for l in range(k)]
            assert targ[i] == 0
            w = _solve_modp([[B(base[l], e) % p for e in _std(n)]
                             for l in range(k)], targ, p)
            u[i] = [a + p * b for a, b in zip(u[i], w)]
        for i in range(k):
            assert B(u[i], u[i]) % (2 * p * p) == 0
            for l in range(i):
                assert B(u[l], u[i]) % (p * p) == 0
    # S = {x : B(x, u_i) = 0 mod p}; p*M = p*S + Z u_i
    import numpy as np
    A = np.array([[B(ui, e) % p for e in _std(n)] for ui in u], dtype=np.int64)
    ker = _nullspace_small(A, p, n)
    rows_int = [[p if i == j else 0 for j in range(n)] for i in range(n)]
    for kv in ker:
        rows_int.append([int(x) for x in kv])
    S = linalg.hermite_normal_form(rows_int)
    stack = [[p * x for x in r] for r in S] + [list(ui) for ui in u]
    H = linalg.hermite_normal_form(stack)
    assert len(H) == n
    N = [[Fraction(x, p) for x in r] for r in H]
    d = linalg.det(N)
    assert abs(d) == 1, "neighbor basis not unimodular"
    gram_M = linalg.mat_mul(linalg.mat_mul(N, [list(r) for r in G]),
                            linalg.transpose(N))
    for i in range(n):
        assert gram_M[i][i] % 2 == 0
        for j in range(n):
            assert Fraction(gram_M[i][j]).denominator == 1
    gram_M = [[int(x) for x in r] for r in gram_M]
    return gram_M, N


def _std(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _solve_modp(A, rhs, p):
    """Any solution of A w = rhs mod p (A k x n over Z)."""
    import numpy as np
    k = len(A)
    n = len(A[0])
    M = np.array([[a % p for a in row] + [r % p] for row, r in zip(A, rhs)],
                 dtype=np.int64)
    piv = []
    r = 0
    for c in range(n):
        pv = None
        for i in range(r, k):
            if M[i, c] % p:
                pv = i
                break
        if pv is None:
            continue
        M[[r, pv]] = M[[pv, r]]
        M[r] = (M[r] * pow(int(M[r, c]), p - 2, p)) % p
        for i in range(k):
            if i != r and M[i, c] % p:
                M[i] = (M[i] - M[i, c] * M[r]) % p
        piv.append(c)
        r += 1
    for i in range(r, k):
        if M[i, n] % p:
            raise ArithmeticError("inconsistent mod-p system")
    w = [0] * n
    for i, c in enumerate(piv):
        w[c] = int(M[i, n]) % p
    return w


def neighbors(L, p, k=1):
    """All p^k-neighbors of L: list of (QuadLattice, basis change N)."""
    desc_det = L.det()
    if desc_det % p == 0:
        raise ValueError("p divides det")
    if k == 3 and kronecker(-L.det(), p) != 1:
        raise ValueError("p^3-neighbors require split p")
    out = []
    for S in isotropic_subspaces(L, p, k):
        gram_M, N = neighbor_from_subspace(L, p, S)
        out.append((QuadLattice(gram_M, check=False), N))
    return out


# ------------------------------------------------------------- densities

def local_density(desc, p):
    """Closed-form local density at p."""
    D = desc.D
    pf = Fraction(p)
    if desc.delta % 2:  # D = 3 mod 4
        if p == 2:
            return (2 ** 6 * (1 - pf ** -2) * (1 - pf ** -4)
                    * (1 + kronecker(-D, 2) * pf ** -3))
        if D % p == 0:
            return 2 * p * (1 - pf ** -2) * (1 - pf ** -4)
        return ((1 - pf ** -2) * (1 - pf ** -4)
                * (1 - kronecker(-D, p) * pf ** -3))
    m = D // 4
    if p == 2:
        if m % 4 == 1:
            return 2 ** 9 * (1 - pf ** -2) * (1 - pf ** -4)
        return 2 ** 10 * (1 - pf ** -2) * (1 - pf ** -4)
    if m % p == 0:
        return 2 * p * (1 - pf ** -2) * (1 - pf ** -4)
    return (1 - pf ** -2) * (1 - pf ** -4) * (1 - desc.chi(p) * pf ** -3)


def mass_closed_form(desc):
    """B_{3,chi} / (2^{t-1} * 2^9 * 3^3 * 5)."""
    from .dimseries import bernoulli3
    B = bernoulli3(desc.delta)
    return B / (2 ** (desc.t - 1) * 2 ** 9 * 3 ** 3 * 5)


def mass(desc, mode="closed_form", class_list=None):
    if mode == "closed_form":
        return mass_closed_form(desc)
    if mode == "from_classes":
        if class_list is None:
            raise ValueError("from_classes needs an enumerated ClassList")
        return sum(Fraction(1, c["autO"]) for c in class_list.classes)
    raise ValueError("unknown mode %r" % mode)


# ---------------------------------------------------------- class lists

class ClassList:
    """Mass-certified list of O-classes with automorphism data."""

    def __init__(self, desc, classes, certified):
        self.desc = desc
        self.classes = classes  # dicts: gram, autO, autSO, has_improper
        self.certified = certified

    def mass(self):
        return sum(Fraction(1, c["autO"]) for c in self.classes)

    def lattices(self):
        return [QuadLattice(c["gram"]) for c in self.classes]

    def so_classes(self):
        """SO-classes: improper-free classes count twice (orientations)."""
        out = []
        for i, c in enumerate(self.classes):
            out.append((i, +1))
            if not c["has_improper"]:
                out.append((i, -1))
        return out

    def to_json(self):
        return {
            "disc": self.desc.delta,
            "classes": [{"gram": [list(r) for r in c["gram"]],
                         "autO": c["autO"], "autSO": c["autSO"],
                         "has_improper": c["has_improper"]}
                        for c in self.classes],
            "mass": str(self.mass()),
            "certified": self.certified,
        }

    @classmethod
    def from_json(cls, obj):
        desc = GenusDescriptor(obj["disc"])
        classes = [{"gram": tuple(tuple(int(x) for x in r) for r in c["gram"]),
                    "autO": c["autO"], "autSO": c["autSO"],
                    "has_improper": c["has_improper"]}
                   for c in obj["classes"]]
        cl = cls(desc, classes, obj.get("certified", False))
        if str(cl.mass()) != obj["mass"] or cl.mass() != mass_closed_form(desc):
            raise ValueError("mass certificate failure")
        return cl


def enumerate_genus(seed, p=None, desc=None, max_rounds=60):
    """BFS closure under p-neighbors, terminated by the mass certificate."""
    if desc is None:
        desc = GenusDescriptor(-seed.det())
    target = mass_closed_form(desc)
    primes = _good_primes(desc)
    if p is not None:
        primes = [p] + [q for q in primes if q != p]
    reps = []
    queue = []

    def add_class(L):
        red, _ = lll_reduce(L.gram)
        Lr = QuadLattice(red)
        for c in reps:
            if isometry(QuadLattice(c["gram"]), Lr) is not None:
                return False
        gens, order, so, impr = automorphism_group(Lr)
        reps.append({"gram": Lr.gram, "autO": order, "autSO": so,
                     "has_improper": impr})
        queue.append(Lr)
        return True

    add_class(seed)
    prime_idx = 0
    cur_p = primes[prime_idx]
    rounds = 0
    while sum(Fraction(1, c["autO"]) for c in reps) != target:
        rounds += 1
        if rounds > max_rounds:
            raise RuntimeError("mass not reached within budget: deficit %s"
                               % (target - sum(Fraction(1, c["autO"])
                                               for c in reps)))
        if queue:
            L = queue.pop(0)
            for M, _N in neighbors(L, cur_p, 1):
                add_class(M)
                if sum(Fraction(1, c["autO"]) for c in reps) == target:
                    break
        else:
            # stalled below the mass: add a second good prime
            prime_idx += 1
            if prime_idx >= len(primes):
                raise RuntimeError("mass deficit persists across primes")
            cur_p = primes[prime_idx]
            queue.extend(QuadLattice(c["gram"]) for c in reps)
    got = sum(Fraction(1, c["autO"]) for c in reps)
    assert got == target
    reps.sort(key=lambda c: c["gram"])
    return ClassList(desc, reps, certified=True)


def _good_primes(desc, count=6):
    out = []
    p = 2
    while len(out) < count:
        if desc.D % p:
            out.append(p)
        p = _next_prime(p)
    return out


def _next_prime(p):
    q = p + 1
    while True:
        if all(q % r for r in range(2, int(q ** 0.5) + 1)):
            return q
        q += 1


# ------------------------------------------------------------- caching

_CACHE_ENV = "SOMF_CACHE_DIR"


def default_cache_dir():
    return os.environ.get(_CACHE_ENV,
                          os.path.join(os.path.expanduser("~"), ".cache",
                                       "somf"))


def genus_cache_path(delta, cache_dir=None):
    d = cache_dir or default_cache_dir()
    return os.path.join(d, "genus_%d.json" % abs(delta))


def get_genus(delta, cache_dir=None, force=False):
    """Enumerated (and cached) class list for the discriminant."""
    desc = GenusDescriptor(delta)
    path = genus_cache_path(delta, cache_dir)
    if not force and os.path.exists(path):
        try:
            with open(path) as fh:
                return ClassList.from_json(json.load(fh))
        except (ValueError, KeyError, json.JSONDecodeError):
            pass  # corrupted or failed certificate: recompute
    seed = seed_lattice(desc)
    cl = enumerate_genus(seed, desc=desc)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as fh:
        json.dump(cl.to_json(), fh)
    return cl


# ------------------------------------------------- weight-0 dimensions

def spin_divisors(D):
    """Products of distinct prime divisors of D (the d0 values), sorted."""
    primes = _prime_divisors(D)
    out = [1]
    for p in primes:
        out += [d * p for d in out]
    return sorted(out)


def weight0_spin_dims(class_list):
    """dim of the weight-0 spin_{d0} eigenspaces and their total.

    A SO-class contributes 1 to spin_{d0} iff its full (special)
    automorphism group lies in the character kernel.
    """
    desc = class_list.desc
    d0s = spin_divisors(desc.D)
    chars = [SpinCharacter(d) for d in d0s]
    dims = {d: 0 for d in d0s}
    for c in class_list.classes:
        L = QuadLattice(c["gram"])
        table = group_with_characters(L, chars)
        mult = 1 if c["has_improper"] else 2
        for idx, d in enumerate(d0s):
            ok = all(vals[idx] == 1 for _m, detv, vals in table
                     if detv == 1)
            if ok:
                dims[d] += mult
    return dims, sum(dims.values())
