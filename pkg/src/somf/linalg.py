"""Exact integer/rational matrix algebra.

Dense matrices are plain lists of lists (Fraction or int entries).
Large kernel computations go through a mod-p + CRT + rational-reconstruction
engine whose output is certified exactly (verification over Q plus the
mod-p rank bound), so results are never merely probabilistic.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

import numpy as np

# 25-bit primes: residue products stay well inside int64.
_PRIMES = [33554393, 33554383, 33554371, 33554347, 33554341, 33554317,
           33554291, 33554273, 33554267, 33554249, 33554237, 33554221]

# 19-bit primes: block dot products of length <= ~2^14 stay exactly
# representable in float64 (p^2 * 2^14 < 2^53), enabling BLAS-backed
# modular elimination on large matrices.
_PRIMES19 = [524287, 524269, 524261, 524257, 524243, 524231, 524221,
             524219, 524203, 524201, 524197, 524189]

# 15-bit primes: with p < 2^15 the accumulated magnitude of a full
# elimination (N * p^2 for N up to ~2^22) never threatens float64
# exactness, so reduction passes are essentially free to skip.  Used
# for rank/dimension work; exact reconstructions use _PRIMES19.
_PRIMES15 = [32749, 32719, 32717, 32713, 32707, 32693, 32687, 32653,
             32647, 32633, 32621, 32611]


# ---------------------------------------------------------------- basics

def identity_matrix(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    n, m, k = len(A), len(B[0]), len(B)
    Bt = list(zip(*B))
    return [[sum(A[i][t] * Bt[j][t] for t in range(k)) for j in range(m)]
            for i in range(n)]


def mat_vec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def transpose(A):
    return [list(r) for r in zip(*A)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_eq(A, B):
    return all(all(a == b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_fraction(A):
    return [[Fraction(x) for x in row] for row in A]


def det(A):
    """Exact determinant (fraction-free Bareiss on a Fraction copy)."""
    n = len(A)
    M = [[Fraction(x) for x in row] for row in A]
    sign = 1
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            sign = -sign
        d *= M[c][c]
        inv = 1 / M[c][c]
        for r in range(c + 1, n):
            if M[r][c] != 0:
                f = M[r][c] * inv
                for j in range(c, n):
                    M[r][j] -= f * M[c][j]
    return sign * d


def mat_inv(A):
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def charpoly(A):
    """Characteristic polynomial det(xI - A), coefficients low -> high."""
    n = len(A)
    M = None
    c = [Fraction(0)] * (n + 1)
    c[n] = Fraction(1)
    Afr = mat_fraction(A)
    M = identity_matrix(n)
    for k in range(1, n + 1):
        M = mat_mul(Afr, M)
        tr = sum(M[i][i] for i in range(n))
        ck = -tr / k
        c[n - k] = ck
        for i in range(n):
            M[i][i] += ck
    return c


# ---------------------------------------------------------------- solving

def rref_fraction(A):
    """Reduced row echelon form over Q; returns (R, pivot_columns)."""
    M = [[Fraction(x) for x in row] for row in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return M, pivots


def kernel(A):
    """Exact rational kernel basis of A (rows = relations).

    For an all-integer input the basis vectors are scaled to primitive
    integer vectors (saturated).
    """
    rows = len(A)
    if rows == 0:
        raise ValueError("empty matrix: ambient dimension unknown")
    cols = len(A[0])
    R, pivots = rref_fraction(A)
    pivset = set(pivots)
    basis = []
    integral = all(Fraction(x).denominator == 1 for row in A for x in row)
    for free in range(cols):
        if free in pivset:
            continue
        v = [Fraction(0)] * cols
        v[free] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][free]
        if integral:
            den = 1
            for x in v:
                den = den * x.denominator // gcd(den, x.denominator)
            w = [int(x * den) for x in v]
            g = 0
            for x in w:
                g = gcd(g, abs(x))
            if g > 1:
                w = [x // g for x in w]
            basis.append(w)
        else:
            basis.append(v)
    return basis


def solve(A, rhs):
    """One exact solution of A x = rhs, or None if inconsistent."""
    rows = len(A)
    cols = len(A[0])
    aug = [list(map(Fraction, A[i])) + [Fraction(rhs[i])] for i in range(rows)]
    R, pivots = rref_fraction(aug)
    for r in range(len(R)):
        if all(R[r][c] == 0 for c in range(cols)) and R[r][cols] != 0:
            return None
    x = [Fraction(0)] * cols
    for r, pc in enumerate(pivots):
        if pc < cols:
            x[pc] = R[r][cols]
    # verify by substitution
    for i in range(rows):
        if sum(Fraction(A[i][j]) * x[j] for j in range(cols)) != Fraction(rhs[i]):
            return None
    return x


# ---------------------------------------------------------- integer forms

def hermite_normal_form(rows):
    """Row-style HNF of an integer matrix; returns the nonzero rows."""
    M = [list(map(int, r)) for r in rows]
    if not M:
        return []
    ncols = len(M[0])
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(M)):
            if M[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        # clear below by gcd steps
        for i in range(r + 1, len(M)):
            while M[i][c] != 0:
                q = M[r][c] // M[i][c]
                M[r] = [a - q * b for a, b in zip(M[r], M[i])]
                M[r], M[i] = M[i], M[r]
        if M[r][c] < 0:
            M[r] = [-a for a in M[r]]
        for i in range(r):
            q = M[i][c] // M[r][c]
            if q:
                M[i] = [a - q * b for a, b in zip(M[i], M[r])]
        r += 1
        if r == len(M):
            break
    return [row for row in M[:r]]


def smith_normal_form(A):
    """U A V = D diagonal with d_i | d_{i+1}; returns (D, U, V)."""
    M = [list(map(int, row)) for row in A]
    n = len(M)
    m = len(M[0])
    U = identity_matrix(n)
    V = identity_matrix(m)

    def swap_rows(i, j):
        M[i], M[j] = M[j], M[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def addmul_row(i, j, q):  # row_i += q * row_j
        M[i] = [a + q * b for a, b in zip(M[i], M[j])]
        U[i] = [a + q * b for a, b in zip(U[i], U[j])]

    def addmul_col(i, j, q):  # col_i += q * col_j
        for row in M:
            row[i] += q * row[j]
        for row in V:
            row[i] += q * row[j]

    t = 0
    while t < min(n, m):
        # find a nonzero pivot
        piv = None
        for i in range(t, n):
            for j in range(t, m):
                if M[i][j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            done = True
            for i in range(t + 1, n):
                if M[i][t] % M[t][t] != 0:
                    q = M[i][t] // M[t][t]
                    addmul_row(i, t, -q)
                    swap_rows(t, i)
                    done = False
            for i in range(t + 1, n):
                if M[i][t] != 0:
                    addmul_row(i, t, -(M[i][t] // M[t][t]))
            for j in range(t + 1, m):
                if M[t][j] % M[t][t] != 0:
                    q = M[t][j] // M[t][t]
                    addmul_col(j, t, -q)
                    swap_cols(t, j)
                    done = False
            for j in range(t + 1, m):
                if M[t][j] != 0:
                    addmul_col(j, t, -(M[t][j] // M[t][t]))
            if done and all(M[i][t] == 0 for i in range(t + 1, n)) \
                    and all(M[t][j] == 0 for j in range(t + 1, m)):
                break
        # divisibility condition
        ok = True
        for i in range(t + 1, n):
            for j in range(t + 1, m):
                if M[i][j] % M[t][t] != 0:
                    addmul_row(t, i, 1)
                    ok = False
                    break
            if not ok:
                break
        if ok:
            if M[t][t] < 0:
                M[t] = [-a for a in M[t]]
                U[t] = [-a for a in U[t]]
            t += 1
    return M, U, V


# ------------------------------------------------- mod-p kernel engine

def _echelon_modp(A, p):
    """In-place row echelon mod p; returns pivot column list."""
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        sub = A[r:, c]
        nz = np.nonzero(sub)[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r, c:] = (A[r, c:] * inv) % p
        col = A[r + 1:, c]
        nzr = np.nonzero(col)[0]
        if nzr.size:
            A[r + 1 + nzr, c:] = (A[r + 1 + nzr, c:]
                                  - np.outer(col[nzr], A[r, c:])) % p
        pivots.append(c)
        r += 1
    return pivots


def nullspace_modp(A, p):
    """Kernel basis mod p in RREF convention.

    Returns (pivots, free_cols, B) where B[i] is the kernel vector for
    free column free_cols[i] (entry 1 there, pivot entries filled in).
    """
    A = np.array(A, dtype=np.int64) % p
    rows, cols = A.shape
    pivots = _echelon_modp(A, p)
    # back-eliminate to RREF
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        col = A[:r, c]
        nz = np.nonzero(col)[0]
        if nz.size:
            A[nz, c:] = (A[nz, c:] - np.outer(col[nz], A[r, c:])) % p
    pivset = set(pivots)
    free = [c for c in range(cols) if c not in pivset]
    B = np.zeros((len(free), cols), dtype=np.int64)
    for i, fc in enumerate(free):
        B[i, fc] = 1
        for r, pc in enumerate(pivots):
            B[i, pc] = (-int(A[r, fc])) % p
    return pivots, free, B


def echelon_modp_big(A, p, block=128, super_block=1024):
    """Two-level blocked row echelon mod p with float64 BLAS updates.

    Within a superpanel of `super_block` columns, panels of `block`
    columns are eliminated with recorded row operations (multipliers
    and pivot scalings); the far trailing block is then updated with
    one matmul of inner dimension `super_block` per superpanel.  Needs
    a 19-bit prime (see _PRIMES19) so all intermediate dot products
    stay exactly representable in float64.  Returns (E, pivots): E
    float64, rows 0..len(pivots)-1 in echelon form with unit pivots.
    """
    A = np.ascontiguousarray(np.asarray(A, dtype=np.float64) % p)
    m, n = A.shape
    pivots = []
    r = 0
    C0 = 0
    # the far trailing block stays unreduced between superpanels; each
    # superpanel matmul adds <= super_block * p^2 in magnitude, so track
    # the bound and reduce before float64 exactness (2^53) is lost
    acc_bound = float(p)
    while C0 < n and r < m:
        C1 = min(n, C0 + super_block)
        r0 = r
        S = np.ascontiguousarray(A[r0:m, C0:C1] % p)
        ms, ws = S.shape
        Zcat = np.zeros((ms, min(ms, ws)))
        D = np.zeros(min(ms, ws))
        subs = []  # (pivot-row offset rel r0, panel pivot count)
        c0 = 0
        while c0 < ws and r < m:
            c1 = min(ws, c0 + block)
            a = r - r0
            P = np.ascontiguousarray(S[a:, c0:c1])
            Z = np.zeros((ms - a, c1 - c0))
            npiv = 0
            for j in range(c1 - c0):
                col = P[npiv:, j]
                np.mod(col, p, out=col)
                nz = np.nonzero(col)[0]
                if nz.size == 0:
                    continue
                i = npiv + int(nz[0])
                if i != npiv:
                    A[[r0 + a + npiv, r0 + a + i]] = \
                        A[[r0 + a + i, r0 + a + npiv]]
                    S[[a + npiv, a + i]] = S[[a + i, a + npiv]]
                    P[[npiv, i]] = P[[i, npiv]]
                    Z[[npiv, i]] = Z[[i, npiv]]
                    Zcat[[a + npiv, a + i]] = Zcat[[a + i, a + npiv]]
                inv = pow(int(P[npiv, j]), p - 2, p)
                P[npiv] = (P[npiv] % p * inv) % p
                Z[npiv, npiv] = inv
                below = P[npiv + 1:, j].copy()
                P[npiv + 1:, j:] -= np.outer(below, P[npiv, j:])
                Z[npiv + 1:, npiv] = below
                pivots.append(C0 + c0 + j)
                npiv += 1
            if npiv:
                if c1 < ws:
                    # replay on the rest of the superpanel: current
                    # pivot rows sequentially, the rest in one matmul
                    V = S[a:, c1:]
                    for k in range(npiv):
                        if k:
                            V[k] -= Z[k, :k] @ V[:k]
                        V[k] = (V[k] % p * Z[k, k]) % p
                    V[npiv:] -= Z[npiv:, :npiv] @ V[:npiv]
                S[a:a + npiv, c0:c1] = P[:npiv] % p
                S[a + npiv:, c0:c1] = 0
                Zw = Zcat[a:, a:a + npiv]
                Zw[:] = Z[:, :npiv]
                D[a:a + npiv] = np.diag(Z)[:npiv]
                np.fill_diagonal(Zw, 0.0)
                subs.append((a, npiv))
                r += npiv
            c0 = c1
        NP = r - r0
        if NP and C1 < n:
            # replay the whole superpanel's operations on the trailing
            # columns: per panel, one matmul against already-finalized
            # pivot rows plus a short sequential sweep, then one big
            # matmul (inner dimension NP) for the remaining rows
            V = A[r0:m, C1:]
            for a, npiv in subs:
                if a:
                    V[a:a + npiv] -= Zcat[a:a + npiv, :a] @ V[:a]
                for k in range(npiv):
                    if k:
                        V[a + k] -= Zcat[a + k, a:a + k] @ V[a:a + k]
                    V[a + k] = (V[a + k] % p * D[a + k]) % p
            V[NP:] -= Zcat[NP:, :NP] @ V[:NP]
            acc_bound += NP * float(p) * p
            if acc_bound > 2.0 ** 51:
                np.mod(V[NP:], p, out=V[NP:])
                acc_bound = float(p)
        A[r0:r, C0:C1] = S[:NP]
        A[r:m, C0:C1] = 0
        C0 = C1
    return A, pivots


def nullspace_modp_big(A, p, block=128, super_block=1024,
                       return_pivots=False):
    """Kernel basis mod p of a large matrix via blocked echelon form.

    Back-substitutes only the free columns, so the cost beyond the
    echelon reduction is rank^2 * kerdim.  Returns an int64 array of
    shape (kerdim, n) whose rows are kernel vectors (free column c of
    row i carries an identity pattern B[i, free[i]] = 1, so the basis
    is the canonical RREF kernel basis for the given pivot set).
    """
    E, pivots = echelon_modp_big(A, p, block=block, super_block=super_block)
    n = E.shape[1]
    R = len(pivots)
    pivset = set(pivots)
    free = [c for c in range(n) if c not in pivset]
    nf = len(free)
    if nf == 0:
        Z = np.zeros((0, n), dtype=np.int64)
        return (Z, pivots) if return_pivots else Z
    # solve the unit upper-triangular system on pivot variables
    Xp = np.zeros((R, nf))
    Ef = E[:R, free]
    Ep = np.zeros((R, R))
    for k, c in enumerate(pivots):
        Ep[:, k] = E[:R, c]
    for k in range(R - 1, -1, -1):
        Xp[k] = (-(Ef[k] + Ep[k, k + 1:] @ Xp[k + 1:])) % p
    B = np.zeros((nf, n), dtype=np.int64)
    for i, fc in enumerate(free):
        B[i, fc] = 1
    for k, c in enumerate(pivots):
        B[:, c] = Xp[k].astype(np.int64)
    return (B, pivots) if return_pivots else B


def rational_reconstruct(r, m):
    """Unique p/q with r*q = p mod m, |p|,|q| <= sqrt(m/2), or None."""
    bound = isqrt(m // 2)
    a, b = m, r % m
    pa, pb = 0, 1
    while b > bound:
        q = a // b
        a, b = b, a - q * b
        pa, pb = pb, pa - q * pb
    if pb == 0 or abs(pb) > bound or gcd(b, abs(pb)) != 1:
        return None
    return Fraction(b, pb) if pb > 0 else Fraction(-b, -pb)


def certified_kernel_int(rows_sparse, ncols, primes=None):
    """Exact kernel of an integer matrix given as sparse rows.

    rows_sparse: list of dicts {col: int coefficient}.
    Returns a list of Fraction vectors.  The result is certified:
    each vector is verified to annihilate every row exactly over Q, and
    the mod-p rank bounds nullity from above, so the dimension is exact.
    """
    primes = primes or _PRIMES
    nrows = len(rows_sparse)
    if nrows == 0:
        return [[Fraction(int(i == j)) for j in range(ncols)]
                for i in range(ncols)]
    p0 = primes[0]
    A0 = np.zeros((nrows, ncols), dtype=np.int64)
    for i, row in enumerate(rows_sparse):
        for j, v in row.items():
            A0[i, j] = v % p0
    pivots, free, B0 = nullspace_modp(A0, p0)
    d = len(free)
    if d == 0:
        return []
    # accumulate more primes via CRT until reconstruction verifies
    residues = [B0]
    mods = [p0]
    for extra in range(len(primes)):
        M = 1
        for m in mods:
            M *= m
        # CRT combine entrywise (over Python ints)
        comb = np.zeros((d, ncols), dtype=object)
        for Bi, mi in zip(residues, mods):
            Mi = M // mi
            inv = pow(Mi % mi, -1, mi)
            comb = comb + Bi.astype(object) * (Mi * inv)
        comb = comb % M
        vecs = []
        fail = False
        for i in range(d):
            v = []
            for j in range(ncols):
                f = rational_reconstruct(int(comb[i, j]), M)
                if f is None:
                    fail = True
                    break
                v.append(f)
            if fail:
                break
            vecs.append(v)
        if not fail:
            ok = True
            for v in vecs:
                for row in rows_sparse:
                    if sum(Fraction(c) * v[j] for j, c in row.items()) != 0:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                return vecs
        # add another prime
        pnext = primes[len(mods)]
        An = np.zeros((nrows, ncols), dtype=np.int64)
        for i, row in enumerate(rows_sparse):
            for j, v in row.items():
                An[i, j] = v % pnext
        piv2, free2, Bn = nullspace_modp(An, pnext)
        if free2 != free:
            raise ArithmeticError("unlucky prime in kernel computation")
        residues.append(Bn)
        mods.append(pnext)
    raise ArithmeticError("rational reconstruction failed (prime budget)")


# ---------------------------------------------------------- factorization

def factor_poly(coeffs):
    """Irreducible factorization over Q of sum coeffs[i] x^i.

    Returns (unit: Fraction, [(factor_coeffs, multiplicity)]).
    Degree capped at 64.
    """
    import sympy

    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise ValueError("zero polynomial")
    if len(coeffs) - 1 > 64:
        raise ValueError("degree cap 64 exceeded")
    x = sympy.Symbol("x")
    poly = sympy.Poly(sum(sympy.Rational(Fraction(c)) * x ** i
                          for i, c in enumerate(coeffs)), x, domain="QQ")
    unit, factors = poly.factor_list()
    out = []
    for f, mult in factors:
        fc = [Fraction(str(c)) for c in reversed(f.all_coeffs())]
        out.append((fc, int(mult)))
    # sanity: recombine
    prod = [Fraction(str(unit))]
    for fc, mult in out:
        for _ in range(mult):
            new = [Fraction(0)] * (len(prod) + len(fc) - 1)
            for i, a in enumerate(prod):
                for j, b in enumerate(fc):
                    new[i + j] += a * b
            prod = new
    assert prod == [Fraction(c) for c in coeffs], "factorization recombine failed"
    return Fraction(str(unit)), out


def rational_roots(coeffs):
    """Rational roots with multiplicity from the exact factorization."""
    _, factors = factor_poly(coeffs)
    roots = []
    for fc, mult in factors:
        if len(fc) == 2:
            roots.append((-fc[0] / fc[1], mult))
    return roots
