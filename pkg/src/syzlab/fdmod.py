"""Finitely generated modules over a LocalAlgebra, and homological tools.

A module is a k-vector space with one action matrix per generator of the
maximal ideal.  Free modules R^n use coordinates ``j * dim R + l``
(component j, basis element l of R).  Maps between modules are plain
k-linear matrices (target dim x source dim) that commute with the actions.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import exactla as la
from .algebra import LocalAlgebra, quotient_algebra


class ModuleError(ValueError):
    pass


class FDModule:
    """Module over a LocalAlgebra given by generator actions.

    ``ambient`` optionally records an R-linear embedding of the module into
    a free module R^beta as a pair ``(beta, K)`` with K of shape
    ``(beta * dim R, dim)``; syzygies carry one, and it makes Hom into big
    syzygies much cheaper.
    """

    def __init__(self, R: LocalAlgebra, actions: Sequence[np.ndarray], check: bool = True,
                 ambient: tuple[int, np.ndarray] | None = None, label: str | None = None):
        self.R = R
        self.p = R.p
        if len(actions) != R.ngens:
            raise ModuleError(f"expected {R.ngens} action matrices, got {len(actions)}")
        acts = [np.asarray(a, dtype=np.int64) % R.p for a in actions]
        self.dim = acts[0].shape[0] if acts else None
        self._acts = acts
        self.ambient = ambient
        self.label = label
        self._basis_acts = None
        self._res: Resolution | None = None
        self._res_offset = 0
        self._lock = threading.Lock()
        self._cache: dict = {}
        if self.dim is None:
            raise ModuleError("over the residue field use vector_space(R, n)")
        for a in acts:
            if a.shape != (self.dim, self.dim):
                raise ModuleError("action matrices must be square of equal size")
        if check:
            self.certify()

    @classmethod
    def _raw(cls, R, actions, dim, ambient=None, label=None):
        """Construct without checks; ``dim`` is needed when R has no generators."""
        M = cls.__new__(cls)
        M.R, M.p = R, R.p
        M._acts = [np.asarray(a, dtype=np.int64) for a in actions]
        M.dim = dim
        M.ambient = ambient
        M.label = label
        M._basis_acts = None
        M._res = None
        M._res_offset = 0
        M._lock = threading.Lock()
        M._cache = {}
        return M

    @property
    def actions(self) -> list[np.ndarray]:
        return self._acts

    def __repr__(self):
        lab = f" {self.label}" if self.label else ""
        return f"<FDModule{lab} dim={self.dim} over dim-{self.R.dim} algebra>"

    @property
    def basis_acts(self) -> list[np.ndarray]:
        if self._basis_acts is None:
            self._basis_acts = self.R.basis_actions(self._acts, self.dim)
        return self._basis_acts

    def act(self, a: np.ndarray) -> np.ndarray:
        """Matrix by which the algebra element a acts."""
        if self.dim == 0:
            return la.zeros(0, 0)
        return self.R.act(a, self.basis_acts)

    def certify(self) -> None:
        R, p = self.R, self.p
        B = self.basis_acts
        for g, A in enumerate(self._acts):
            if not np.array_equal(A, self.R.act(R.gen(g), B)):
                raise ModuleError(f"action of generator {R.gen_names[g]} disagrees with its basis expansion")
            L = R.gen_mats[g]
            for l in range(R.dim):
                lhs = la.matmul(A, B[l], p)
                rhs = R.act(L[:, l], B)
                if not np.array_equal(lhs, rhs):
                    raise ModuleError("actions do not satisfy the relations of the algebra")

    def is_zero(self) -> bool:
        return self.dim == 0

    # resolution access --------------------------------------------------
    def resolution(self) -> Resolution:
        with self._lock:
            if self._res is None:
                self._res = Resolution(self)
                self._res_offset = 0
        return self._res


def vector_space(R: LocalAlgebra, n: int) -> FDModule:
    """k^n with trivial action."""
    return FDModule._raw(R, [la.zeros(n, n) for _ in range(R.ngens)], n, label=f"k^{n}" if n != 1 else "k")


def residue(R: LocalAlgebra) -> FDModule:
    return vector_space(R, 1)


def zero_module(R: LocalAlgebra) -> FDModule:
    return FDModule._raw(R, [la.zeros(0, 0) for _ in range(R.ngens)], 0, ambient=(0, la.zeros(0, 0)), label="0")


def free(R: LocalAlgebra, n: int = 1) -> FDModule:
    acts = [np.kron(la.identity(n), L) for L in R.gen_mats]
    return FDModule._raw(R, acts, n * R.dim, ambient=(n, la.identity(n * R.dim)),
                         label="R" if n == 1 else f"R^{n}")


def submodule(M: FDModule, B: np.ndarray, check: bool = False, label=None) -> FDModule:
    """The submodule spanned by the columns of B (assumed R-stable, independent)."""
    p = M.p
    B = np.asarray(B, dtype=np.int64)
    if M.dim == 0 or B.size == 0:
        return zero_module(M.R)
    B = B.reshape(M.dim, -1)
    r = B.shape[1]
    L = la.left_inverse(B, p)
    acts = []
    for A in M.actions:
        AB = la.matmul(A, B, p)
        if check and la.rank(np.hstack([B, AB]), p) != r:
            raise ModuleError("subspace is not stable under the action")
        acts.append(la.matmul(L, AB, p))
    amb = None
    if M.ambient is not None:
        beta, K = M.ambient
        amb = (beta, la.matmul(K, B, p))
    return FDModule._raw(M.R, acts, r, ambient=amb, label=label)


def generated_submodule(M: FDModule, vectors: np.ndarray) -> np.ndarray:
    """Basis (columns) of the submodule generated by the given column vectors."""
    V = np.asarray(vectors, dtype=np.int64).reshape(M.dim, -1)
    if V.shape[1] == 0 or M.dim == 0:
        return la.zeros(M.dim, 0)
    return la.column_space(np.hstack([la.matmul(A, V, M.p) for A in M.basis_acts]), M.p)


def quotient(M: FDModule, W: np.ndarray, label=None) -> tuple[FDModule, np.ndarray]:
    """M / W for an R-stable subspace with basis columns W.  Returns (module, projection)."""
    p = M.p
    Q, S = la.complement_coords(W, p, M.dim)
    acts = [la.matmul(la.matmul(Q, A, p), S, p) for A in M.actions]
    return FDModule._raw(M.R, acts, Q.shape[0], label=label), Q


def direct_sum(*mods: FDModule) -> FDModule:
    if not mods:
        raise ModuleError("empty direct sum")
    R = mods[0].R
    for N in mods:
        if not N.R.same_as(R):
            raise ModuleError("algebra mismatch")
    n = sum(N.dim for N in mods)
    acts = []
    for g in range(R.ngens):
        A = la.zeros(n, n)
        o = 0
        for N in mods:
            A[o:o + N.dim, o:o + N.dim] = N.actions[g]
            o += N.dim
        acts.append(A)
    amb = None
    if all(N.ambient is not None for N in mods):
        beta = sum(N.ambient[0] for N in mods)
        K = la.zeros(beta * R.dim, n)
        r = c = 0
        for N in mods:
            b, KN = N.ambient
            K[r:r + b * R.dim, c:c + N.dim] = KN
            r += b * R.dim
            c += N.dim
        amb = (beta, K)
    label = " + ".join(N.label or "?" for N in mods)
    return FDModule._raw(R, acts, n, ambient=amb, label=label)


def power(M: FDModule, n: int) -> FDModule:
    if n == 0:
        return zero_module(M.R)
    return direct_sum(*([M] * n))


def maximal_ideal(R: LocalAlgebra) -> FDModule:
    F = free(R, 1)
    B = la.identity(R.dim)[:, 1:]
    return submodule(F, B, label="m")


def ideal_module(R: LocalAlgebra, gens: Sequence[np.ndarray], label=None) -> FDModule:
    """The ideal generated by the given elements, as an R-module."""
    B = R.ideal_span(gens)
    return submodule(free(R, 1), B, label=label)


def coker(R: LocalAlgebra, matrix: Sequence[Sequence[np.ndarray]], label=None) -> FDModule:
    """Cokernel of an a x b matrix over R (entries are element vectors).

    The columns are the relations: M = R^a / (column span).
    """
    a = len(matrix)
    b = len(matrix[0]) if a else 0
    d = R.dim
    F = free(R, a)
    cols = []
    for j in range(b):
        v = np.zeros(a * d, dtype=np.int64)
        for i in range(a):
            v[i * d:(i + 1) * d] = np.asarray(matrix[i][j], dtype=np.int64) % R.p
        cols.append(v)
    W = generated_submodule(F, np.array(cols, dtype=np.int64).T if cols else la.zeros(a * d, 0))
    M, _ = quotient(F, W, label=label)
    return M


def is_homomorphism(f: np.ndarray, M: FDModule, N: FDModule) -> bool:
    p = M.p
    if f.shape != (N.dim, M.dim):
        return False
    return all(np.array_equal(la.matmul(f, A, p), la.matmul(B, f, p)) for A, B in zip(M.actions, N.actions))


def random_basis_change(M: FDModule, rng: np.random.Generator) -> tuple[FDModule, np.ndarray]:
    """Conjugate M by a random invertible matrix.  Returns (module, T) with T: M -> new."""
    p = M.p
    while True:
        T = rng.integers(0, p, (M.dim, M.dim))
        if la.rank(T, p) == M.dim:
            break
    Ti = la.inverse(T, p)
    acts = [la.matmul(la.matmul(T, A, p), Ti, p) for A in M.actions]
    return FDModule._raw(M.R, acts, M.dim, label=M.label), T


# --------------------------------------------------------------------------
# covers and resolutions


def minimal_cover(M: FDModule) -> tuple[int, np.ndarray]:
    """(nu, pi) with pi: R^nu -> M surjective and nu = dim M/mM minimal."""
    return M.resolution().cover(M._res_offset)


def top_representatives(M: FDModule) -> np.ndarray:
    """Columns: vectors of M whose images form a basis of M/mM."""
    if M.dim == 0:
        return la.zeros(0, 0)
    mM = np.hstack(M.actions) if M.actions else la.zeros(M.dim, 0)
    _, S = la.complement_coords(mM, M.p, M.dim)
    return S


def cover_from_generators(M: FDModule, U: np.ndarray) -> np.ndarray:
    """pi: R^n -> M sending the j-th basis vector to the column U[:, j]."""
    d = M.R.dim
    n = U.shape[1]
    pi = la.zeros(M.dim, n * d)
    for l, A in enumerate(M.basis_acts):
        if M.dim:
            pi[:, l::d] = la.matmul(A, U, M.p)
    return pi


class Resolution:
    """Lazily extended minimal free resolution of a module.

    ``modules[i]`` is the i-th syzygy, ``covers[i] = (beta_i, pi_i)`` its
    minimal cover, ``embeds[i]`` the basis of ker pi_i inside R^beta_i (that
    is, the inclusion of modules[i + 1]).
    """

    def __init__(self, M: FDModule):
        self.R = M.R
        self.modules: list[FDModule] = [M]
        self.covers: list[tuple[int, np.ndarray]] = []
        self.embeds: list[np.ndarray] = []
        self._lock = threading.Lock()

    def _step(self) -> None:
        i = len(self.covers)
        X = self.modules[i]
        R, p, d = self.R, X.p, self.R.dim
        U = top_representatives(X)
        nu = U.shape[1]
        pi = cover_from_generators(X, U)
        K = la.kernel_basis(pi, p) if X.dim else la.identity(nu * d)
        # minimality: the kernel lies in m R^nu, i.e. no unit coordinates
        if nu and K.shape[1] and K[0::d].any():
            raise AssertionError("resolution step is not minimal")
        Y = submodule(free(R, nu), K)
        Y._res = self
        Y._res_offset = i + 1
        self.covers.append((nu, pi))
        self.embeds.append(K)
        self.modules.append(Y)

    def extend(self, n: int) -> None:
        """Make sure syzygies up to index n and covers up to n - 1 exist."""
        with self._lock:
            while len(self.modules) <= n or len(self.covers) < n:
                self._step()

    def syzygy(self, n: int) -> FDModule:
        self.extend(n)
        return self.modules[n]

    def cover(self, i: int) -> tuple[int, np.ndarray]:
        self.extend(i + 1)
        return self.covers[i]

    def betti(self, i: int) -> int:
        return self.cover(i)[0]

    def differential(self, i: int) -> np.ndarray:
        """k-linear matrix of d_i: R^beta_i -> R^beta_{i-1}, for i >= 1."""
        self.extend(i + 1)
        return la.matmul(self.embeds[i - 1], self.covers[i][1], self.R.p)

    def differential_matrix(self, i: int) -> np.ndarray:
        """d_i as a matrix over R: shape (beta_{i-1}, beta_i, dim R)."""
        D = self.differential(i)
        d = self.R.dim
        a, b = self.betti(i - 1), self.betti(i)
        out = np.zeros((a, b, d), dtype=np.int64)
        for j in range(b):
            col = D[:, j * d]
            out[:, j, :] = col.reshape(a, d)
        return out


def _shifted(M: FDModule, i: int):
    return M.resolution(), M._res_offset + i


def syzygy(M: FDModule, n: int = 1) -> FDModule:
    """Omega^n M from a minimal resolution."""
    if n < 0:
        raise ValueError("use cosyzygy for negative indices")
    res, k = _shifted(M, n)
    return res.syzygy(k)


def betti(M: FDModule, n: int) -> int:
    res, k = _shifted(M, n)
    return res.betti(k)


def betti_numbers(M: FDModule, upto: int) -> list[int]:
    return [betti(M, i) for i in range(upto + 1)]


def presentation(M: FDModule) -> np.ndarray:
    """The minimal presentation matrix: shape (nu(M), beta_1(M), dim R)."""
    res, k = _shifted(M, 0)
    return res.differential_matrix(k + 1)


def is_free(M: FDModule) -> bool:
    return M.dim == betti(M, 0) * M.R.dim


def pd_is_infinite(M: FDModule) -> bool:
    """Over an Artinian local ring pd is 0 or infinite (depth R = 0)."""
    return not is_free(M)


# --------------------------------------------------------------------------
# Hom


class HomSpace:
    """A k-basis of Hom_R(M, N) as matrices, with the R-module structure."""

    def __init__(self, M: FDModule, N: FDModule, maps: np.ndarray):
        self.source, self.target = M, N
        maps = np.asarray(maps, dtype=np.int64)
        self.maps = maps if maps.ndim == 3 else maps.reshape(-1, N.dim, M.dim)
        self._module = None

    @property
    def dim(self) -> int:
        return self.maps.shape[0]

    def combine(self, coeffs: np.ndarray) -> np.ndarray:
        c = np.asarray(coeffs, dtype=np.int64).reshape(-1)
        if self.dim == 0:
            return la.zeros(self.target.dim, self.source.dim)
        return np.tensordot(c, self.maps, axes=1) % self.source.p

    def coordinates(self, f: np.ndarray) -> np.ndarray:
        flat = self.maps.reshape(self.dim, -1).T
        x = la.solve(flat, np.asarray(f).reshape(-1), self.source.p)
        if x is None:
            raise ModuleError("map is not in this Hom space")
        return x

    def module(self) -> FDModule:
        """Hom_R(M, N) with R acting by post-composition."""
        if self._module is None:
            M, N, p = self.source, self.target, self.source.p
            h = self.dim
            if h == 0:
                self._module = zero_module(M.R)
            else:
                flat = self.maps.reshape(h, -1).T
                L = la.left_inverse(flat, p)
                acts = []
                for A in N.actions:
                    moved = la.matmul(A, self.maps, p).reshape(h, -1).T
                    acts.append(la.matmul(L, moved, p))
                self._module = FDModule._raw(M.R, acts, h)
        return self._module


def _check_same(M: FDModule, N: FDModule):
    if not M.R.same_as(N.R):
        raise ModuleError("modules over different algebras")


def hom(M: FDModule, N: FDModule) -> HomSpace:
    """Hom_R(M, N) as the solution space of the intertwining equations."""
    _check_same(M, N)
    p = M.p
    if M.dim == 0 or N.dim == 0:
        return HomSpace(M, N, np.zeros((0, N.dim, M.dim), dtype=np.int64))
    a = betti(M, 0)
    b = betti(M, 1)
    direct_cost = (b * N.dim) * (a * N.dim) * min(b, a) * N.dim
    if N.ambient is not None and N.ambient[0] > 0:
        beta = N.ambient[0]
        q = beta * M.R.dim - N.dim
        amb_cost = (q * a + 1) * (beta * a * M.R.dim) * min(q * a + 1, beta * a * M.R.dim)
        if amb_cost < direct_cost:
            return _hom_via_ambient(M, N)
    return _hom_direct(M, N)


def _hom_direct(M: FDModule, N: FDModule) -> HomSpace:
    p, d = M.p, M.R.dim
    res, k = _shifted(M, 0)
    a, pi = res.cover(k)
    P = res.differential_matrix(k + 1) if res.betti(k + 1) else np.zeros((a, 0, d), dtype=np.int64)
    b = P.shape[1]
    n = N.dim
    E = la.zeros(b * n, a * n)
    for c in range(b):
        for i in range(a):
            if P[i, c].any():
                E[c * n:(c + 1) * n, i * n:(i + 1) * n] = N.act(P[i, c])
    H = la.kernel_basis(E, p) if b else la.identity(a * n)
    h = H.shape[1]
    if h == 0:
        return HomSpace(M, N, np.zeros((0, n, M.dim), dtype=np.int64))
    s = la.solve_many(pi, la.identity(M.dim), p)  # section of the cover
    # T[(i, l)] = rho_N(b_l) @ H_i, shape (a*d, n, h); built in slices of h
    maps = np.zeros((h, n, M.dim), dtype=np.int64)
    step = max(1, 10_000_000 // max(1, a * d * n))
    for c0 in range(0, h, step):
        Hc = H[:, c0:c0 + step]
        T = np.zeros((a * d, n, Hc.shape[1]), dtype=np.int64)
        for i in range(a):
            Hi = Hc[i * n:(i + 1) * n]
            for l, B in enumerate(N.basis_acts):
                T[i * d + l] = la.matmul(B, Hi, p)
        maps[c0:c0 + step] = la.matmul(T.transpose(2, 1, 0), s, p)  # (h, n, dim M)
    return HomSpace(M, N, maps)


def _hom_via_ambient(M: FDModule, N: FDModule) -> HomSpace:
    """Hom(M, N) for N inside R^beta: maps M -> R^beta landing in N."""
    p, d = M.p, M.R.dim
    beta, K = N.ambient
    dual = _hom_direct(M, free(M.R, 1))  # psi_t : M -> R
    s = dual.dim
    if s == 0:
        return HomSpace(M, N, np.zeros((0, N.dim, M.dim), dtype=np.int64))
    Q, _ = la.complement_coords(K, p, beta * d)
    q = Q.shape[0]
    U = top_representatives(M)
    a = U.shape[1]
    psiU = la.matmul(dual.maps, U, p)  # (s, d, a)
    Qb = Q.reshape(q, beta, d).transpose(1, 0, 2)  # (beta, q, d)
    cols = np.einsum("jqd,tda->jtqa", Qb, psiU) % p
    A = cols.reshape(beta * s, q * a).T
    C = la.kernel_basis(A, p) if q else la.identity(beta * s)
    h = C.shape[1]
    if h == 0:
        return HomSpace(M, N, np.zeros((0, N.dim, M.dim), dtype=np.int64))
    Phi = np.einsum("jth,tdw->hjdw", C.reshape(beta, s, h), dual.maps) % p
    Phi = Phi.reshape(h, beta * d, M.dim)
    LK = la.left_inverse(K, p)
    maps = la.matmul(LK, Phi, p)
    return HomSpace(M, N, maps)


def hom_module(M: FDModule, N: FDModule) -> FDModule:
    return hom(M, N).module()


def dual(M: FDModule) -> FDModule:
    return hom(M, free(M.R, 1)).module()


def endomorphisms(M: FDModule) -> HomSpace:
    return hom(M, M)


# --------------------------------------------------------------------------
# transpose, Ext, cosyzygy


def transpose(M: FDModule) -> FDModule:
    """Tr M = coker of the dual of the minimal presentation."""
    R = M.R
    P = presentation(M)  # (a, b, d)
    a, b = P.shape[0], P.shape[1]
    if b == 0:
        return zero_module(R)
    # P^T : R^a -> R^b; its columns are the rows of P
    PT = [[P[i, j] for i in range(a)] for j in range(b)]
    return coker(R, PT, label=f"Tr({M.label})" if M.label else None)


def ext(M: FDModule, N: FDModule, i: int) -> FDModule:
    """Ext^i_R(M, N) from the minimal resolution of M."""
    _check_same(M, N)
    if i < 0:
        raise ValueError("negative Ext index")
    res, k = _shifted(M, 0)
    p, n = M.p, N.dim

    def dstar(j):
        # Hom(d_j, N): N^{beta_{j-1}} -> N^{beta_j}
        P = res.differential_matrix(k + j)
        a, b = P.shape[0], P.shape[1]
        D = la.zeros(b * n, a * n)
        for c in range(b):
            for r in range(a):
                if P[r, c].any():
                    D[c * n:(c + 1) * n, r * n:(r + 1) * n] = N.act(P[r, c])
        return D

    bi = res.betti(k + i)
    Ni = power(N, bi) if bi else zero_module(M.R)
    if bi == 0 or n == 0:
        return zero_module(M.R)
    outgoing = dstar(i + 1)
    Z = la.kernel_basis(outgoing, p) if outgoing.shape[0] else la.identity(bi * n)
    Zmod = submodule(Ni, Z)
    if i == 0:
        return Zmod
    B = la.column_space(dstar(i), p)
    # express boundaries in cycle coordinates
    LZ = la.left_inverse(Z, p) if Z.shape[1] else la.zeros(0, bi * n)
    Bz = la.matmul(LZ, B, p)
    out, _ = quotient(Zmod, Bz)
    return out


def cosyzygy(M: FDModule, n: int = 1) -> FDModule:
    """Omega^{-n} M: cokernel of M -> F_0^* where F_0 -> M^* is a minimal cover."""
    if n < 1:
        raise ValueError("cosyzygy index must be >= 1")
    X = M
    for _ in range(n):
        X = _cosyzygy_once(X)
    return X


def cosyzygy_data(M: FDModule):
    """(Omega^{-1} M, c, lam, proj) with lam: M -> R^c and proj: R^c -> Omega^{-1} M."""
    R, p, d = M.R, M.p, M.R.dim
    D = hom(M, free(R, 1))
    if D.dim == 0:
        return zero_module(R), 0, la.zeros(0, M.dim), la.zeros(0, 0)
    Dm = D.module()
    U = top_representatives(Dm)  # generators of M^* in Hom-coordinates
    c = U.shape[1]
    phis = [D.combine(U[:, j]) for j in range(c)]  # each (d, dim M)
    lam = np.vstack(phis) % p  # M -> R^c
    F = free(R, c)
    img = la.column_space(lam, p)
    C, Q = quotient(F, img)
    return C, c, lam, Q


def _cosyzygy_once(M: FDModule) -> FDModule:
    return cosyzygy_data(M)[0]


# --------------------------------------------------------------------------
# base change


def base_change(M: FDModule, gens: Sequence[np.ndarray]):
    """(M/IM over R/I, the algebra R/I, projection M -> M/IM)."""
    R, p = M.R, M.p
    Rbar, _ = quotient_algebra(R, gens)
    I = Rbar.ideal_basis_in_parent
    if M.dim == 0:
        return FDModule._raw(Rbar, M.actions, 0), Rbar, la.zeros(0, 0)
    IM = la.column_space(np.hstack([M.act(I[:, j]) for j in range(I.shape[1])] or [la.zeros(M.dim, 0)]), p)
    Q, S = la.complement_coords(IM, p, M.dim)
    acts = [la.matmul(la.matmul(Q, A, p), S, p) for A in M.actions]
    return FDModule._raw(Rbar, acts, Q.shape[0]), Rbar, Q


def inflate(N: FDModule, R: LocalAlgebra) -> FDModule:
    """View a module over a quotient R/I (same generator list) as an R-module."""
    if N.R.ngens != R.ngens:
        raise ModuleError("generator lists do not match")
    return FDModule._raw(R, N.actions, N.dim, label=N.label)


# --------------------------------------------------------------------------
# short exact sequences


@dataclass
class ShortExactSeq:
    """0 -> A --f--> B --g--> C -> 0."""

    A: FDModule
    B: FDModule
    C: FDModule
    f: np.ndarray
    g: np.ndarray
    note: dict = field(default_factory=dict)

    def check(self) -> bool:
        A, B, C = self.A, self.B, self.C
        p = B.p
        if self.f.shape != (B.dim, A.dim) or self.g.shape != (C.dim, B.dim):
            return False
        if not (is_homomorphism(self.f, A, B) and is_homomorphism(self.g, B, C)):
            return False
        if la.rank(self.f, p) != A.dim or la.rank(self.g, p) != C.dim:
            return False
        if A.dim and C.dim and la.matmul(self.g, self.f, p).any():
            return False
        return B.dim == A.dim + C.dim

    def require_exact(self):
        if not self.check():
            raise ModuleError("sequence is not exact")
        return self


def _lift(g: np.ndarray, targets: np.ndarray, p: int) -> np.ndarray:
    X = la.solve_many(g, targets, p)
    if X is None:
        raise ModuleError("map is not surjective")
    return X


def _cover_generators(X: FDModule) -> np.ndarray:
    """Generator vectors of the minimal cover used by the resolution of X."""
    nu, pi = minimal_cover(X)
    d = X.R.dim
    return pi[:, 0::d] if nu else la.zeros(X.dim, 0)


def split_sequence(L: FDModule, N: FDModule) -> ShortExactSeq:
    B = direct_sum(L, N)
    f = np.vstack([la.identity(L.dim), la.zeros(N.dim, L.dim)])
    g = np.hstack([la.zeros(N.dim, L.dim), la.identity(N.dim)])
    return ShortExactSeq(L, B, N, f, g, {"split": True})


def horseshoe_step(S: ShortExactSeq) -> ShortExactSeq:
    """From 0->L->M->N->0 build 0 -> Omega L -> K -> Omega N -> 0, K = Omega M + free."""
    S.require_exact()
    L, M, N = S.A, S.B, S.C
    R, p, d = M.R, M.p, M.R.dim
    nl, pil = minimal_cover(L)
    nn, pin = minimal_cover(N)
    # lift the cover of N through g, generator by generator
    hgen = _lift(S.g, _cover_generators(N), p)
    h = cover_from_generators(M, hgen)
    Phi = np.hstack([la.matmul(S.f, pil, p), h])  # R^(nl+nn) -> M
    Kb = la.kernel_basis(Phi, p)
    K = submodule(free(R, nl + nn), Kb)
    OL, ON = syzygy(L, 1), syzygy(N, 1)
    KL = L.resolution().embeds[L._res_offset] if OL.dim else la.zeros(nl * d, 0)
    KN = N.resolution().embeds[N._res_offset] if ON.dim else la.zeros(nn * d, 0)
    LK = la.left_inverse(Kb, p) if Kb.shape[1] else la.zeros(0, (nl + nn) * d)
    incl = np.vstack([KL, la.zeros(nn * d, OL.dim)])
    f = la.matmul(LK, incl, p)
    proj = la.matmul(np.hstack([la.zeros(nn * d, nl * d), la.identity(nn * d)]), Kb, p)
    LKN = la.left_inverse(KN, p) if KN.shape[1] else la.zeros(0, nn * d)
    g = la.matmul(LKN, proj, p)
    extra = nl + nn - betti(M, 0)
    return ShortExactSeq(OL, K, ON, f, g, {"free_rank": extra})


def horseshoe(S: ShortExactSeq, n: int) -> ShortExactSeq:
    """0 -> Omega^n L -> Omega^n M + R^a -> Omega^n N -> 0."""
    out = S.require_exact()
    total = 0
    for _ in range(n):
        out = horseshoe_step(out)
        total += out.note["free_rank"]
    out.note = {"free_rank_steps": total, "n": n}
    return out


def rotate(S: ShortExactSeq) -> ShortExactSeq:
    """From 0->L->M->N->0 build 0 -> Omega N -> L + R^q -> M -> 0 (q = nu(N))."""
    S.require_exact()
    L, M, N = S.A, S.B, S.C
    R, p, d = M.R, M.p, M.R.dim
    q, pin = minimal_cover(N)
    hgen = _lift(S.g, _cover_generators(N), p)
    h = cover_from_generators(M, hgen)  # R^q -> M lifting pi_N
    F = free(R, q)
    Bm = direct_sum(L, F)
    g = np.hstack([S.f, h])
    ON = syzygy(N, 1)
    KN = N.resolution().embeds[N._res_offset] if ON.dim else la.zeros(q * d, 0)
    # r in Omega N: h(r) lies in f(L); send r to (-f^{-1} h(r), r)
    hr = la.matmul(h, KN, p)
    pre = _lift(S.f, hr, p) if hr.shape[1] else la.zeros(L.dim, 0)
    f = np.vstack([(-pre) % p, KN])
    return ShortExactSeq(ON, Bm, M, f, g, {"free_rank": q})


def rotate_twice(S: ShortExactSeq) -> ShortExactSeq:
    """From 0->L->M->N->0 build 0 -> Omega M -> K -> L -> 0 with K = Omega N + R^(nu M - nu N)."""
    S.require_exact()
    L, M, N = S.A, S.B, S.C
    R, p, d = M.R, M.p, M.R.dim
    q, pim = minimal_cover(M)
    comp = la.matmul(S.g, pim, p)  # R^q -> N
    Kb = la.kernel_basis(comp, p)
    K = submodule(free(R, q), Kb)
    OM = syzygy(M, 1)
    KM = M.resolution().embeds[M._res_offset] if OM.dim else la.zeros(q * d, 0)
    LK = la.left_inverse(Kb, p) if Kb.shape[1] else la.zeros(0, q * d)
    f = la.matmul(LK, KM, p)
    img = la.matmul(pim, Kb, p)  # lands in f(L)
    g = _lift(S.f, img, p) if img.shape[1] else la.zeros(L.dim, 0)
    return ShortExactSeq(OM, K, L, f, g, {"free_rank": q - betti(N, 0)})


def rotate_left(S: ShortExactSeq, n: int) -> ShortExactSeq:
    """0 -> Omega^{n+1} N -> Omega^n L + R^b -> Omega^n M -> 0."""
    return horseshoe(rotate(S), n)


def rotate_left2(S: ShortExactSeq, n: int) -> ShortExactSeq:
    """0 -> Omega^{n+1} M -> Omega^{n+1} N + R^c -> Omega^n L -> 0."""
    return horseshoe(rotate_twice(S), n)


def socle_sequence(R: LocalAlgebra) -> ShortExactSeq:
    """0 -> k^r -> R -> R/Soc R -> 0."""
    from .algebra import socle

    F = free(R, 1)
    Sb = socle(R)
    A = submodule(F, Sb, label="Soc")
    C, Q = quotient(F, Sb, label="R/Soc")
    return ShortExactSeq(A, F, C, Sb, Q, {"type": Sb.shape[1]}).require_exact()


def syzygy_quotient_sequence(M: FDModule, gens: Sequence[np.ndarray]) -> ShortExactSeq:
    """0 -> I^nu(M) -> Omega_R M -> Omega_{R/I} M -> 0, for IM = 0.

    The right-hand term is computed over R/I and then inflated to R.
    """
    R, p, d = M.R, M.p, M.R.dim
    I = R.ideal_span(gens)
    for j in range(I.shape[1]):
        if M.dim and M.act(I[:, j]).any():
            raise ModuleError("I does not annihilate M")
    Mbar, Rbar, _ = base_change(M, gens)
    nu, pi = minimal_cover(M)
    OM = syzygy(M, 1)
    KM = M.resolution().embeds[M._res_offset] if OM.dim else la.zeros(nu * d, 0)
    # the cover of Mbar over R/I uses the same generators
    U = _cover_generators(M)
    pibar = cover_from_generators(Mbar, U)
    Kbar = la.kernel_basis(pibar, p)
    OMbar = inflate(submodule(free(Rbar, nu), Kbar), R)
    # R^nu -> (R/I)^nu coordinatewise
    _, h = quotient_algebra(R, gens)
    proj = np.kron(la.identity(nu), h.matrix)
    g = la.matmul(la.left_inverse(Kbar, p), la.matmul(proj, KM, p), p) if Kbar.shape[1] else la.zeros(0, OM.dim)
    # kernel: I^nu inside Omega M
    Ib = np.kron(la.identity(nu), I)
    A = submodule(free(R, nu), Ib)
    f = la.matmul(la.left_inverse(KM, p), Ib, p) if KM.shape[1] else la.zeros(0, A.dim)
    return ShortExactSeq(A, OM, OMbar, f, g, {"nu": nu}).require_exact()
