"""Krull-Schmidt engine: endomorphism algebras, idempotents, decompositions.

Everything here is exact.  Randomness only chooses which endomorphism to
try next; any idempotent found is verified (e^2 = e) and any claim of
locality comes with an explicit nilpotent ideal of the right codimension.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exactla as la
from .fdmod import FDModule, HomSpace, ModuleError, hom, submodule, syzygy


class DecompositionError(RuntimeError):
    pass


@dataclass
class EndoAlgebra:
    """End_R(M) realized as a list of matrices."""

    module: FDModule
    basis: np.ndarray  # (m, dim M, dim M)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def flat(self) -> np.ndarray:
        # columns are the basis elements, vectorized
        return self.basis.reshape(self.dim, -1).T

    def coords(self, phi: np.ndarray) -> np.ndarray:
        x = la.solve(self.flat(), phi.reshape(-1), self.module.p)
        if x is None:
            raise ModuleError("matrix is not an endomorphism")
        return x

    def check_closed(self, rng: np.random.Generator, trials: int = 3) -> bool:
        p = self.module.p
        n = self.module.dim
        if la.solve(self.flat(), la.identity(n).reshape(-1), p) is None:
            return False
        for _ in range(trials):
            i, j = rng.integers(0, self.dim, 2)
            prod = la.matmul(self.basis[i], self.basis[j], p)
            if la.solve(self.flat(), prod.reshape(-1), p) is None:
                return False
        return True


def endo_algebra(M: FDModule) -> EndoAlgebra:
    return EndoAlgebra(M, hom(M, M).maps)


@dataclass
class LocalCert:
    """Witness that End(W) is local.

    ``radical`` spans a nilpotent ideal J with E/J a field of degree
    ``degree``; ``functional`` maps a dim W x dim W matrix in E to its class
    in E/J (row-major vectorization), so that phi is a unit of E exactly
    when ``functional @ phi.ravel()`` is nonzero.
    """

    degree: int
    radical: np.ndarray  # (r, dim W, dim W)
    functional: np.ndarray  # (degree, dim W * dim W)

    def residue(self, phi: np.ndarray, p: int) -> np.ndarray:
        return la.matmul(self.functional, phi.reshape(-1), p)


def _primary_info(phi: np.ndarray, p: int, seed: int):
    """Analyze char_poly(phi).

    Returns ('split', g, h) for a coprime factorization, or
    ('primary', q) with q the irreducible (monic) radical.
    """
    cp = la.char_poly(phi, p)
    sqf = la.squarefree_decomposition(cp, p)
    if len(sqf) >= 2:
        g = la.poly_pow(sqf[0][0], sqf[0][1], p)
        h = la.poly_divmod(cp, g, p)[0]
        return ("split", g, h)
    s, e = sqf[0]
    if la.poly_deg(s) == 1:
        return ("primary", s)
    fs = la.factor(s, p, seed)
    if len(fs) == 1:
        return ("primary", s)
    q = fs[0][0]
    g = la.poly_pow(q, e, p)
    return ("split", g, la.poly_divmod(cp, g, p)[0])


def _idempotent_from_split(phi: np.ndarray, g, h, p: int) -> np.ndarray:
    d, u, v = la.poly_xgcd(g, h, p)
    if d != (1,):
        raise AssertionError("factors are not coprime")
    proj = la.poly_mod(la.poly_mul(v, h, p), la.poly_mul(g, h, p), p)
    return la.poly_eval_matrix(proj, phi, p)


def _is_nilpotent_span(mats: list[np.ndarray], n: int, p: int) -> bool:
    """Does every product of n elements of span(mats) vanish?  (action chain)"""
    if not mats:
        return True
    V = la.identity(n)
    for _ in range(n + 1):
        if V.shape[1] == 0:
            return True
        nxt = la.column_space(np.hstack([la.matmul(A, V, p) for A in mats]), p)
        if nxt.shape[1] == V.shape[1]:
            return False
        V = nxt
    return V.shape[1] == 0


def _cert_from_ideal(E: EndoAlgebra, U_alpha: np.ndarray) -> LocalCert:
    p = E.module.p
    m = E.dim
    L = la.left_inverse(E.flat(), p)  # alpha-coordinates of elements of E
    Q, _ = la.complement_coords(U_alpha, p, m)
    rad = la.matmul(E.basis.transpose(1, 2, 0), U_alpha, p).transpose(2, 0, 1) if U_alpha.shape[1] else \
        np.zeros((0,) + E.basis.shape[1:], dtype=np.int64)
    return LocalCert(Q.shape[0], rad, la.matmul(Q, L, p))


def certify_local(E: EndoAlgebra, infos: list, seed: int = 0) -> LocalCert | None:
    """Try to prove E local from primary data of its basis elements.

    ``infos[i]`` is the irreducible radical of char_poly(basis[i]).
    """
    M = E.module
    p, n, m = M.p, M.dim, E.dim
    I = la.identity(n)
    alpha_I = E.coords(I)
    L = la.left_inverse(E.flat(), p)

    if all(la.poly_deg(q) == 1 for q in infos):
        # residue field F_p: U = span(b_i - lambda_i) must be a nilpotent subspace of codim 1
        lams = [(-q[0]) % p for q in infos]
        U = []
        for i in range(m):
            v = (-lams[i] * alpha_I) % p
            v[i] = (v[i] + 1) % p
            U.append(v)
        Ua = la.column_space(np.array(U, dtype=np.int64).T, p)
        if Ua.shape[1] == m - 1:
            mats = [np.tensordot(Ua[:, j], E.basis, axes=1) % p for j in range(Ua.shape[1])]
            if _is_nilpotent_span(mats, n, p):
                return _cert_from_ideal(E, Ua)
        return None

    # residue field bigger than F_p: grow the ideal generated by q_i(b_i)
    gens = [la.poly_eval_matrix(q, E.basis[i], p) for i, q in enumerate(infos)]
    V = la.column_space(np.array([la.matmul(L, g.reshape(-1), p) for g in gens], dtype=np.int64).T, p)
    while True:
        mats = [np.tensordot(V[:, j], E.basis, axes=1) % p for j in range(V.shape[1])]
        new = [la.matmul(L, la.matmul(b, u, p).reshape(-1), p) for b in E.basis for u in mats]
        new += [la.matmul(L, la.matmul(u, b, p).reshape(-1), p) for b in E.basis for u in mats]
        W = la.column_space(np.hstack([V, np.array(new, dtype=np.int64).T]) if new else V, p)
        if W.shape[1] == V.shape[1]:
            break
        V = W
    mats = [np.tensordot(V[:, j], E.basis, axes=1) % p for j in range(V.shape[1])]
    if not _is_nilpotent_span(mats, n, p):
        return None
    f = m - V.shape[1]
    if any(la.poly_deg(q) == f for q in infos):
        return _cert_from_ideal(E, V)
    return None


def split_or_certify(E: EndoAlgebra, seed: int = 0, tries: int = 40):
    """Return (idempotent, None) with a nontrivial idempotent, or (None, LocalCert)."""
    M = E.module
    p, n = M.p, M.dim
    rng = np.random.default_rng(seed)
    infos = []
    for i in range(E.dim):
        kind = _primary_info(E.basis[i], p, seed)
        if kind[0] == "split":
            return _idempotent_from_split(E.basis[i], kind[1], kind[2], p), None
        infos.append(kind[1])
    cert = certify_local(E, infos, seed)
    if cert is not None:
        return None, cert
    for _ in range(tries):
        c = rng.integers(0, p, E.dim)
        phi = np.tensordot(c, E.basis, axes=1) % p
        kind = _primary_info(phi, p, seed)
        if kind[0] == "split":
            return _idempotent_from_split(phi, kind[1], kind[2], p), None
    raise DecompositionError("could neither split nor certify the endomorphism algebra as local")


def find_idempotent(E: EndoAlgebra, seed: int = 0) -> np.ndarray | None:
    """A nontrivial idempotent of E, or None when E is (certified) local."""
    e, _ = split_or_certify(E, seed)
    if e is not None:
        p = E.module.p
        if not np.array_equal(la.matmul(e, e, p), e):
            raise AssertionError("idempotent check failed")
    return e


# --------------------------------------------------------------------------
# decompositions


@dataclass
class Summand:
    module: FDModule
    incl: np.ndarray  # W -> M
    proj: np.ndarray  # M -> W
    cert: LocalCert


@dataclass
class Decomposition:
    module: FDModule
    summands: list[Summand]
    groups: list[list[int]] = field(default_factory=list)  # indices of isomorphic summands
    isos: dict = field(default_factory=dict)  # j -> iso W_rep -> W_j for the group rep

    @property
    def idempotents(self) -> list[np.ndarray]:
        p = self.module.p
        return [la.matmul(s.incl, s.proj, p) for s in self.summands]

    def multiset(self) -> list[tuple[int, int]]:
        """Sorted (dim, multiplicity) pairs, a cheap shape summary."""
        return sorted((self.summands[g[0]].module.dim, len(g)) for g in self.groups)

    def check(self) -> bool:
        p, n = self.module.p, self.module.dim
        es = self.idempotents
        total = la.zeros(n, n)
        for i, e in enumerate(es):
            for j, f in enumerate(es):
                prod = la.matmul(e, f, p)
                if i == j and not np.array_equal(prod, e):
                    return False
                if i != j and prod.any():
                    return False
            total = (total + e) % p
        return np.array_equal(total, la.identity(n)) if n else True

    def __len__(self):
        return len(self.summands)


def decompose(M: FDModule, seed: int = 0) -> Decomposition:
    """Split M into indecomposables by recursive Fitting idempotents."""
    key = ("decompose", seed)
    if key in M._cache:
        return M._cache[key]
    p = M.p
    pieces: list[Summand] = []
    stack = [(M, la.identity(M.dim), la.identity(M.dim))]
    while stack:
        X, s, t = stack.pop()
        if X.dim == 0:
            continue
        E = endo_algebra(X)
        e, cert = split_or_certify(E, seed)
        if e is None:
            pieces.append(Summand(X, s, t, cert))
            continue
        f = (la.identity(X.dim) - e) % p
        for idem in (f, e):
            B = la.column_space(idem, p)
            Y = submodule(X, B)
            proj = la.matmul(la.left_inverse(B, p), idem, p)
            stack.append((Y, la.matmul(s, B, p), la.matmul(proj, t, p)))
    pieces.sort(key=lambda S: S.module.dim)
    D = Decomposition(M, pieces)
    _group(D, seed)
    M._cache[key] = D
    return D


def _group(D: Decomposition, seed: int) -> None:
    groups: list[list[int]] = []
    for j, S in enumerate(D.summands):
        for g in groups:
            rep = D.summands[g[0]]
            if rep.module.dim != S.module.dim:
                continue
            found = _split_copy(rep.module, rep.cert, S.module)
            if found is not None:
                D.isos[j] = found[0]  # W_rep -> W_j, injective hence bijective
                g.append(j)
                break
        else:
            groups.append([j])
            D.isos[j] = la.identity(S.module.dim)
    D.groups = groups


def _split_copy(W: FDModule, cert: LocalCert, X: FDModule):
    """Find f: W -> X, g: X -> W with g f a unit of End(W).

    Returns (f, pi) with pi f = id_W, or None when W is not a summand of X.
    Because End(W) is local, the pairs (f, g) give a unit iff some pair of
    basis maps does, and unit-ness is read off the residue functional.
    """
    p = W.p
    if X.dim < W.dim:
        return None
    F = hom(W, X).maps  # (nf, dX, dW)
    if F.shape[0] == 0:
        return None
    G = hom(X, W).maps  # (ng, dW, dX)
    if G.shape[0] == 0:
        return None
    dW, dX = W.dim, X.dim
    P = cert.functional.reshape(cert.degree, dW, dW)
    Pf = P.reshape(cert.degree, dW * dW)

    def unit_pair(g):
        # residues of g F_j for every j; a nonzero one means g F_j is a unit
        gF = la.matmul(g, F, p).reshape(F.shape[0], dW * dW)
        hit = np.argwhere(la.matmul(Pf, gF.T, p))
        return None if hit.size == 0 else int(hit[0][1])

    # a random combination of the maps X -> W finds a unit pair with
    # probability >= 1 - 1/p when one exists; then scan exactly
    rng = np.random.default_rng(dX * 7919 + dW)
    g = np.tensordot(rng.integers(0, p, G.shape[0]), G, axes=1) % p
    j = unit_pair(g)
    if j is None:
        chunk = max(1, 20_000_000 // max(1, dX * dW * cert.degree))
        Fm = F.reshape(F.shape[0], dX * dW).T
        for s in range(0, G.shape[0], chunk):
            # Lam[k, i, j] = sum_{a,b,c} P[k,a,b] G[i,a,c] F[j,c,b]
            Gp = np.einsum("kab,iac->kicb", P, G[s:s + chunk]) % p
            Lam = la.matmul(Gp.reshape(-1, dX * dW), Fm, p)
            hit = np.argwhere(Lam)
            if hit.size:
                ki, j = hit[0]
                g = G[s + ki % len(G[s:s + chunk])]
                break
        else:
            return None
    f = F[j]
    u = la.matmul(g, f, p)
    pi = la.matmul(la.inverse(u, p), g, p)
    return f, pi


@dataclass
class SummandResult:
    verdict: bool
    sigma: np.ndarray | None = None  # X -> M
    pi: np.ndarray | None = None  # M -> X
    failed_factor: int | None = None

    def __bool__(self):
        return self.verdict


def is_summand(X: FDModule, M: FDModule, seed: int = 0) -> SummandResult:
    """Decide X | M, with maps sigma: X -> M and pi: M -> X, pi sigma = id."""
    if not X.R.same_as(M.R):
        raise ModuleError("algebra mismatch")
    p = M.p
    if X.dim == 0:
        return SummandResult(True, la.zeros(M.dim, 0), la.zeros(0, M.dim))
    if X.dim > M.dim:
        return SummandResult(False)
    D = decompose(X, seed)
    current = M
    C = la.identity(M.dim)  # current -> M
    r = la.identity(M.dim)  # M -> current
    sigma = la.zeros(M.dim, X.dim)
    pi = la.zeros(X.dim, M.dim)
    for idx, S in enumerate(D.summands):
        found = _split_copy(S.module, S.cert, current)
        if found is None:
            return SummandResult(False, failed_factor=idx)
        f, g = found  # W -> current, current -> W
        sigma = (sigma + la.matmul(la.matmul(C, f, p), S.proj, p)) % p
        pi = (pi + la.matmul(S.incl, la.matmul(g, r, p), p)) % p
        # pass to the complement ker g inside current
        Kb = la.kernel_basis(g, p)
        comp = (la.identity(current.dim) - la.matmul(f, g, p)) % p
        r = la.matmul(la.matmul(la.left_inverse(Kb, p), comp, p), r, p) if Kb.shape[1] else la.zeros(0, M.dim)
        C = la.matmul(C, Kb, p)
        current = submodule(current, Kb)
    res = SummandResult(True, sigma, pi)
    if not np.array_equal(la.matmul(pi, sigma, p), la.identity(X.dim)):
        raise AssertionError("summand witness failed verification")
    return res


@dataclass
class IsoResult:
    verdict: bool
    witness: np.ndarray | None = None  # M -> N invertible

    def __bool__(self):
        return self.verdict


def is_isomorphic(M: FDModule, N: FDModule, seed: int = 0) -> IsoResult:
    """M and N are isomorphic iff dims agree and M | N (Krull-Schmidt)."""
    if not M.R.same_as(N.R):
        raise ModuleError("algebra mismatch")
    if M.dim != N.dim:
        return IsoResult(False)
    r = is_summand(M, N, seed)
    if not r:
        return IsoResult(False)
    return IsoResult(True, r.sigma)


def in_add(X: FDModule, M: FDModule, seed: int = 0) -> bool:
    """X in add(M): every indecomposable summand of X is a summand of M."""
    if not X.R.same_as(M.R):
        raise ModuleError("algebra mismatch")
    D = decompose(X, seed)
    for g in D.groups:
        S = D.summands[g[0]]
        if _split_copy(S.module, S.cert, M) is None:
            return False
    return True


def radical(E: EndoAlgebra, seed: int = 0, certify: bool = True) -> np.ndarray:
    """Jacobson radical of End(M) as a stack of matrices.

    phi lies in the radical iff every component between isomorphic
    indecomposable summands is a non-unit; those conditions are linear once
    the summands and their isomorphisms are fixed.  With ``certify`` the
    result is checked: the span is a two-sided ideal of nilpotents, and E
    maps onto the product of matrix algebras over the residue fields, so
    E/J is semisimple.
    """
    M = E.module
    p = M.p
    D = decompose(M, seed)
    rows = []
    for g in D.groups:
        rep = D.summands[g[0]]
        for i in g:
            for j in g:
                Si, Sj = D.summands[i], D.summands[j]
                bi, bj = D.isos[i], D.isos[j]  # W_rep -> W_i, W_rep -> W_j
                bj_inv = la.inverse(bj, p)
                # phi -> P(bj^{-1} proj_j phi incl_i bi), linear in phi
                left = la.matmul(bj_inv, Sj.proj, p)
                right = la.matmul(Si.incl, bi, p)
                comp = la.matmul(la.matmul(left, E.basis, p), right, p)  # (m, dW, dW)
                rows.append(la.matmul(rep.cert.functional, comp.reshape(E.dim, -1).T, p))
    if not rows:
        return E.basis
    A = np.vstack(rows)
    K = la.kernel_basis(A, p)
    J = la.matmul(E.basis.transpose(1, 2, 0), K, p).transpose(2, 0, 1)
    if certify:
        _certify_radical(E, J, A)
    return J


def _certify_radical(E: EndoAlgebra, J: np.ndarray, A: np.ndarray) -> None:
    p, n = E.module.p, E.module.dim
    if la.rank(A, p) != A.shape[0]:
        raise DecompositionError("End(M) does not map onto its semisimple quotient")
    if not J.shape[0]:
        return
    flat = J.reshape(J.shape[0], -1).T
    for a in J:
        if la.matpow(a, n, p).any():
            raise DecompositionError("radical element is not nilpotent")
        for b in E.basis:
            for prod in (la.matmul(a, b, p), la.matmul(b, a, p)):
                if la.solve(flat, prod.reshape(-1), p) is None:
                    raise DecompositionError("radical span is not a two-sided ideal")


def free_rank(M: FDModule, seed: int = 0) -> int:
    """Number of copies of R in the Krull-Schmidt decomposition of M."""
    from .fdmod import free

    F = free(M.R, 1)
    D = decompose(M, seed)
    count = 0
    for S in D.summands:
        if S.module.dim == F.dim and _split_copy(S.module, S.cert, F) is not None:
            count += 1
    return count


def has_free_summand(M: FDModule, seed: int = 0) -> bool:
    from .fdmod import free

    return bool(is_summand(free(M.R, 1), M, seed)) if M.dim else False


# --------------------------------------------------------------------------
# modules up to isomorphism, as multisets of indecomposables


def _add_class(classes: list, S: Summand, mult: int) -> None:
    for c in classes:
        W = c[0]
        if W.module.dim == S.module.dim and _split_copy(W.module, W.cert, S.module) is not None:
            c[1] += mult
            return
    classes.append([S, mult])


def iso_classes(M: FDModule, seed: int = 0) -> list:
    """[[Summand, multiplicity], ...] for the indecomposable summands of M."""
    D = decompose(M, seed)
    return [[D.summands[g[0]], len(g)] for g in D.groups]


def syzygy_classes(M: FDModule, n: int, seed: int = 0) -> list:
    """Omega^n M up to isomorphism.

    Omega commutes with direct sums, so each indecomposable class is
    resolved once; this keeps every module small even when the Betti
    numbers of M grow fast.
    """
    return syzygy_step(iso_classes(M, seed), n, seed)


def syzygy_step(classes: list, n: int = 1, seed: int = 0) -> list:
    """Apply Omega n times to a class list."""
    for _ in range(n):
        nxt: list = []
        for S, mult in classes:
            for T, m2 in iso_classes(syzygy(S.module, 1), seed):
                _add_class(nxt, T, mult * m2)
        classes = nxt
    return classes


def merge_classes(*lists) -> list:
    out: list = []
    for cl in lists:
        for S, mult in cl:
            _add_class(out, S, mult)
    return out


def summand_of_classes(X: FDModule, classes: list, seed: int = 0) -> bool:
    """X | (the module described by classes), by Krull-Schmidt multiplicities."""
    for S, need in iso_classes(X, seed):
        have = sum(mult for T, mult in classes
                   if T.module.dim == S.module.dim and _split_copy(S.module, S.cert, T.module) is not None)
        if have < need:
            return False
    return True
