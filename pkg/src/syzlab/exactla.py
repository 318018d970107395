"""Dense exact linear algebra over prime fields F_p.

Matrices are plain ``numpy`` int64 arrays whose entries are kept reduced
into ``[0, p)``.  Univariate polynomials are tuples of residues, lowest
degree first.  Every routine takes the modulus explicitly, so values can
be shared freely between threads.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_PRIME = 101
# products of two residues are accumulated in int64 by numpy; keeping p
# below 2^20 leaves room for ~10^6-term sums without overflow
MAX_PRIME = 2**20

Poly = tuple  # coefficients mod p, lowest degree first, no trailing zeros


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field F_p.  Only word-sized primes are supported."""

    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.p >= MAX_PRIME:
            raise ValueError(f"modulus must be below {MAX_PRIME}")

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, -1, self.p)

    def matrix(self, rows) -> np.ndarray:
        return as_matrix(rows, self.p)


def as_matrix(rows, p: int, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Build a reduced int64 matrix from nested lists (or an array)."""
    A = np.array(rows, dtype=object if _needs_object(p) else np.int64)
    if shape is not None:
        A = A.reshape(shape)
    if A.ndim == 1:
        A = A.reshape(1, -1) if A.size else A.reshape(0, 0)
    return (A % p).astype(np.int64)


def _needs_object(p: int) -> bool:
    return p >= 2**31


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Product mod p.

    Integer matmul in numpy does not use BLAS, so the product is taken in
    float64, chunking the inner dimension so that every partial sum stays
    below 2^53 and is therefore exact.
    """
    if (p - 1) ** 2 >= 2**53:
        raise ValueError(f"modulus {p} too large for exact float64 products")
    inner = A.shape[-1]
    step = max(1, (2**53) // max((p - 1) ** 2, 1))
    Af = np.asarray(A, dtype=np.float64)
    Bf = np.asarray(B, dtype=np.float64)
    if inner <= step:
        return np.fmod(Af @ Bf, p).astype(np.int64)
    out = np.zeros(np.broadcast_shapes(A.shape[:-2], B.shape[:-2]) + (A.shape[-2], B.shape[-1])
                   if B.ndim > 1 else A.shape[:-1], dtype=np.int64)
    for s in range(0, inner, step):
        part = np.fmod(Af[..., s:s + step] @ (Bf[..., s:s + step, :] if Bf.ndim > 1 else Bf[s:s + step]), p).astype(np.int64)
        out = (out + part) % p
    return out


def matpow(A: np.ndarray, k: int, p: int) -> np.ndarray:
    R = identity(A.shape[0])
    base = A.copy()
    while k:
        if k & 1:
            R = matmul(R, base, p)
        base = matmul(base, base, p)
        k >>= 1
    return R


# --------------------------------------------------------------------------
# elimination


def rref(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int], int]:
    """Reduced row echelon form.  Returns (R, pivot columns, rank)."""
    R = np.array(A, dtype=np.int64) % p
    if R.ndim != 2:
        raise ValueError("rref expects a 2-d matrix")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r, c:] = R[r, c:] * pow(int(R[r, c]), -1, p) % p
        col = R[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            R[hit, c:] = (R[hit, c:] - np.outer(col[hit], R[r, c:])) % p
        pivots.append(c)
        r += 1
    return R, pivots, r


def rank(A: np.ndarray, p: int) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return rref(A, p)[2]


def kernel_basis(A: np.ndarray, p: int) -> np.ndarray:
    """Columns form a basis of {v : A v = 0}."""
    A = np.asarray(A, dtype=np.int64)
    rows, cols = A.shape
    if rows == 0:
        return identity(cols)
    R, pivots, rk = rref(A, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    K = zeros(cols, len(free))
    if free:
        K[free, np.arange(len(free))] = 1
        if pivots:
            K[np.ix_(pivots, range(len(free)))] = (-R[:rk][:, free]) % p
    return K


def row_space(A: np.ndarray, p: int) -> np.ndarray:
    """Rows of the returned matrix are the nonzero rows of rref(A)."""
    A = np.asarray(A, dtype=np.int64)
    if A.shape[0] == 0:
        return zeros(0, A.shape[1])
    R, _, rk = rref(A, p)
    return R[:rk]


def column_space(A: np.ndarray, p: int) -> np.ndarray:
    """A basis (as columns) of the column span of A."""
    A = np.asarray(A, dtype=np.int64)
    if A.shape[1] == 0:
        return zeros(A.shape[0], 0)
    return row_space(A.T, p).T


def solve(A: np.ndarray, b: Sequence[int], p: int) -> np.ndarray | None:
    """One solution of A x = b, or None when the system is inconsistent."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    if A.shape[0] != b.shape[0]:
        raise ValueError(f"shape mismatch: {A.shape[0]} rows vs rhs of length {b.shape[0]}")
    X = solve_many(A, b.reshape(-1, 1), p)
    return None if X is None else X[:, 0]


def solve_many(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray | None:
    """Solve A X = B column by column; None if any column is inconsistent."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    rows, cols = A.shape
    if B.shape[0] != rows:
        raise ValueError("shape mismatch")
    if rows == 0:
        return zeros(cols, B.shape[1])
    R, pivots, rk = rref(np.hstack([A, B]), p)
    if any(pc >= cols for pc in pivots):
        return None
    X = zeros(cols, B.shape[1])
    for i, pc in enumerate(pivots):
        X[pc] = R[i, cols:]
    return X


def inverse(A: np.ndarray, p: int) -> np.ndarray:
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    if n == 0:
        return zeros(0, 0)
    R, pivots, rk = rref(np.hstack([A, identity(n)]), p)
    if rk < n or pivots[n - 1] >= n:
        raise ZeroDivisionError("matrix is singular")
    return R[:, n:]


def left_inverse(B: np.ndarray, p: int) -> np.ndarray:
    """L with L @ B = I for B of full column rank."""
    rows, r = B.shape
    if r == 0:
        return zeros(0, rows)
    _, piv, rk = rref(B.T, p)
    if rk < r:
        raise ValueError("matrix does not have full column rank")
    L = zeros(r, rows)
    L[:, piv] = inverse(B[piv], p)
    return L


def complement_coords(W: np.ndarray, p: int, dim: int):
    """Coordinates for the quotient V / W, V = F_p^dim, W spanned by columns.

    Returns (Q, S): Q maps V onto V/W, S is a section (columns are unit
    vectors at the non-pivot positions), so Q @ S = I.
    """
    W = np.asarray(W, dtype=np.int64).reshape(dim, -1)
    Wr = row_space(W.T, p)
    piv = [int(np.flatnonzero(row)[0]) for row in Wr]
    free = [c for c in range(dim) if c not in set(piv)]
    Q = zeros(len(free), dim)
    for j, f in enumerate(free):
        Q[j, f] = 1
    if piv:
        # v - sum_i v[piv_i] * Wr_i, restricted to free coordinates
        Q[:, piv] = (-Wr[:, free].T) % p
    S = zeros(dim, len(free))
    for j, f in enumerate(free):
        S[f, j] = 1
    return Q, S


# --------------------------------------------------------------------------
# univariate polynomials


def poly_trim(c: Iterable[int], p: int) -> Poly:
    c = [int(x) % p for x in c]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_deg(f: Poly) -> int:
    return len(f) - 1


def poly_add(f: Poly, g: Poly, p: int) -> Poly:
    n = max(len(f), len(g))
    return poly_trim([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)], p)


def poly_sub(f: Poly, g: Poly, p: int) -> Poly:
    return poly_add(f, tuple(-x for x in g), p)


def poly_mul(f: Poly, g: Poly, p: int) -> Poly:
    if not f or not g:
        return ()
    if (p - 1) ** 2 * min(len(f), len(g)) < 2**62:
        return poly_trim(np.convolve(np.array(f, dtype=np.int64), np.array(g, dtype=np.int64)) % p, p)
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] += a * b
    return poly_trim(out, p)


def poly_scale(f: Poly, c: int, p: int) -> Poly:
    return poly_trim([x * c for x in f], p)


def poly_monic(f: Poly, p: int) -> Poly:
    if not f:
        return f
    return poly_scale(f, pow(f[-1], -1, p), p)


def poly_divmod(f: Poly, g: Poly, p: int) -> tuple[Poly, Poly]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    if len(f) < len(g):
        return (), f
    r = np.array(f, dtype=np.int64)
    gg = np.array(g, dtype=np.int64)
    inv_lead = pow(int(g[-1]), -1, p)
    dg = len(g) - 1
    q = np.zeros(len(f) - dg, dtype=np.int64)
    for k in range(len(f) - 1, dg - 1, -1):
        c = int(r[k]) * inv_lead % p
        if c:
            q[k - dg] = c
            r[k - dg:k + 1] = (r[k - dg:k + 1] - c * gg) % p
    return poly_trim(q, p), poly_trim(r[:dg], p)


def poly_mod(f: Poly, g: Poly, p: int) -> Poly:
    return poly_divmod(f, g, p)[1]


def poly_gcd(f: Poly, g: Poly, p: int) -> Poly:
    while g:
        f, g = g, poly_mod(f, g, p)
    return poly_monic(f, p)


def poly_xgcd(f: Poly, g: Poly, p: int) -> tuple[Poly, Poly, Poly]:
    """(d, u, v) with u f + v g = d = gcd(f, g), d monic."""
    r0, r1 = f, g
    s0, s1 = (1,), ()
    t0, t1 = (), (1,)
    while r1:
        q, r = poly_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, poly_sub(s0, poly_mul(q, s1, p), p)
        t0, t1 = t1, poly_sub(t0, poly_mul(q, t1, p), p)
    if not r0:
        return (), (), ()
    c = pow(r0[-1], -1, p)
    return poly_scale(r0, c, p), poly_scale(s0, c, p), poly_scale(t0, c, p)


def poly_deriv(f: Poly, p: int) -> Poly:
    return poly_trim([i * f[i] for i in range(1, len(f))], p)


def poly_powmod(f: Poly, e: int, m: Poly, p: int) -> Poly:
    result: Poly = (1,)
    base = poly_mod(f, m, p)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base, p), m, p)
        base = poly_mod(poly_mul(base, base, p), m, p)
        e >>= 1
    return result


def poly_pow(f: Poly, e: int, p: int) -> Poly:
    out: Poly = (1,)
    for _ in range(e):
        out = poly_mul(out, f, p)
    return out


def poly_eval_matrix(f: Poly, A: np.ndarray, p: int) -> np.ndarray:
    """f(A) by Horner's rule."""
    n = A.shape[0]
    R = zeros(n, n)
    for c in reversed(f):
        R = matmul(R, A, p)
        R[np.diag_indices(n)] = (R[np.diag_indices(n)] + c) % p
    return R


def hessenberg(A: np.ndarray, p: int) -> np.ndarray:
    """Upper Hessenberg matrix similar to A."""
    H = np.array(A, dtype=np.int64) % p
    n = H.shape[0]
    for j in range(n - 2):
        nz = np.flatnonzero(H[j + 1:, j])
        if nz.size == 0:
            continue
        i = j + 1 + int(nz[0])
        if i != j + 1:
            H[[i, j + 1]] = H[[j + 1, i]]
            H[:, [i, j + 1]] = H[:, [j + 1, i]]
        inv = pow(int(H[j + 1, j]), -1, p)
        ks = np.arange(j + 2, n)
        u = H[ks, j] * inv % p
        hit = ks[u != 0]
        u = u[u != 0]
        if hit.size == 0:
            continue
        H[hit] = (H[hit] - np.outer(u, H[j + 1])) % p
        H[:, j + 1] = (H[:, j + 1] + matmul(H[:, hit], u, p)) % p
    return H


def char_poly(A: np.ndarray, p: int) -> Poly:
    """Monic characteristic polynomial det(t I - A)."""
    A = np.asarray(A, dtype=np.int64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("char_poly needs a square matrix")
    n = A.shape[0]
    H = hessenberg(A, p)
    P = np.zeros((n + 1, n + 1), dtype=np.int64)
    P[0, 0] = 1
    for m in range(1, n + 1):
        # (t - h_mm) p_{m-1}
        row = np.zeros(n + 1, dtype=np.int64)
        row[1:] = P[m - 1, :-1]
        row = (row - H[m - 1, m - 1] * P[m - 1]) % p
        prod = 1
        for i in range(m - 1, 0, -1):
            prod = prod * int(H[i, i - 1]) % p
            if prod == 0:
                break
            c = int(H[i - 1, m - 1]) * prod % p
            if c:
                row = (row - c * P[i - 1]) % p
        P[m] = row
    return poly_trim(P[n], p)


# --------------------------------------------------------------------------
# factorization


def squarefree_decomposition(f: Poly, p: int) -> list[tuple[Poly, int]]:
    """Monic squarefree factors with multiplicities (characteristic-p aware)."""
    f = poly_monic(f, p)
    if not f:
        raise ValueError("zero polynomial")
    out: list[tuple[Poly, int]] = []
    _sqf(f, p, 1, out)
    merged: dict[Poly, int] = {}
    for g, e in out:
        if poly_deg(g) > 0:
            merged[g] = merged.get(g, 0) + e
    return sorted(merged.items(), key=lambda t: (t[1], t[0]))


def _sqf(f: Poly, p: int, mult: int, out: list) -> None:
    if poly_deg(f) <= 0:
        return
    d = poly_deriv(f, p)
    if not d:
        # f is a p-th power
        root = poly_trim([f[i] for i in range(0, len(f), p)], p)
        _sqf(root, p, mult * p, out)
        return
    c = poly_gcd(f, d, p)
    w = poly_divmod(f, c, p)[0]
    i = 1
    while poly_deg(w) > 0:
        y = poly_gcd(w, c, p)
        z = poly_divmod(w, y, p)[0]
        if poly_deg(z) > 0:
            out.append((poly_monic(z, p), i * mult))
        i += 1
        w = y
        c = poly_divmod(c, y, p)[0]
    if poly_deg(c) > 0:
        root = poly_trim([c[i] for i in range(0, len(c), p)], p)
        _sqf(root, p, mult * p, out)


def distinct_degree(f: Poly, p: int) -> list[tuple[Poly, int]]:
    """Split a monic squarefree f into products of irreducibles of equal degree."""
    out = []
    h: Poly = (0, 1)
    i = 0
    g = f
    while poly_deg(g) >= 2 * (i + 1):
        i += 1
        h = poly_powmod(h, p, g, p)
        d = poly_gcd(g, poly_sub(h, (0, 1), p), p)
        if poly_deg(d) > 0:
            out.append((d, i))
            g = poly_divmod(g, d, p)[0]
            h = poly_mod(h, g, p)
    if poly_deg(g) > 0:
        out.append((g, poly_deg(g)))
    return out


def equal_degree(f: Poly, d: int, p: int, rng: random.Random) -> list[Poly]:
    """Cantor-Zassenhaus splitting of a product of degree-d irreducibles."""
    n = poly_deg(f)
    if n == d:
        return [f]
    while True:
        a = poly_trim([rng.randrange(p) for _ in range(n)], p)
        if poly_deg(a) < 1:
            continue
        if p == 2:
            # trace map a + a^2 + ... + a^(2^(d-1))
            b, t = a, a
            for _ in range(d - 1):
                t = poly_mod(poly_mul(t, t, p), f, p)
                b = poly_add(b, t, p)
        else:
            b = poly_sub(poly_powmod(a, (p**d - 1) // 2, f, p), (1,), p)
        g = poly_gcd(f, b, p)
        if 0 < poly_deg(g) < n:
            h = poly_divmod(f, g, p)[0]
            return equal_degree(g, d, p, rng) + equal_degree(poly_monic(h, p), d, p, rng)


def factor(f: Poly, p: int, seed: int = 0) -> list[tuple[Poly, int]]:
    """Irreducible factorization of f (monic-normalized) over F_p."""
    f = poly_trim(f, p)
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    rng = random.Random(seed)
    out: dict[Poly, int] = {}
    for g, e in squarefree_decomposition(f, p):
        for prod, d in distinct_degree(g, p):
            for q in equal_degree(prod, d, p, rng):
                out[q] = out.get(q, 0) + e
    return sorted(out.items(), key=lambda t: (poly_deg(t[0]), t[0]))


factor_squarefree_then_equal_degree = factor


def is_irreducible(f: Poly, p: int) -> bool:
    f = poly_monic(poly_trim(f, p), p)
    if poly_deg(f) < 1:
        return False
    fs = factor(f, p)
    return len(fs) == 1 and fs[0][1] == 1


def radical_poly(f: Poly, p: int) -> Poly:
    """Product of the distinct monic irreducible factors of f."""
    out: Poly = (1,)
    for g, _ in squarefree_decomposition(f, p):
        out = poly_mul(out, g, p)
    # the squarefree parts may still share nothing, but different
    # multiplicities never share factors, so this is squarefree
    return out
