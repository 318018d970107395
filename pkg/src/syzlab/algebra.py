"""Finite-dimensional commutative local algebras over F_p.

A ``LocalAlgebra`` is stored through its regular representation.  The
basis is always made of monomials (words) in a fixed list of generators of
the maximal ideal, with the unit first, so that the action of any basis
element on any module is a product of generator actions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import exactla as la
from .polyring import MultiPoly, PolyIdeal, PolyRing, is_artinian_quotient


class NotLocalError(ValueError):
    pass


def _mono_label(names: Sequence[str], word: Sequence[int]) -> str:
    parts = [n if k == 1 else f"{n}^{k}" for n, k in zip(names, word) if k]
    return "*".join(parts) or "1"


class LocalAlgebra:
    """Commutative local F_p-algebra with a monomial basis.

    Args:
        p: the prime.
        gen_names: names of the chosen generators of the maximal ideal.
        gen_mats: for each generator, its multiplication matrix on the basis.
        words: exponent vector (over the generators) of every basis element;
            ``words[0]`` must be the zero vector (the unit).
        presentation: optional ideal I with the algebra equal to S/I.
    """

    def __init__(self, p: int, gen_names, gen_mats, words, presentation: PolyIdeal | None = None,
                 labels: Sequence[str] | None = None, check: bool = True):
        self.p = p
        self.gen_names = tuple(gen_names)
        self.gen_mats = [np.asarray(m, dtype=np.int64) % p for m in gen_mats]
        self.words = [tuple(w) for w in words]
        self.dim = len(self.words)
        self.presentation = presentation
        self.labels = tuple(labels) if labels is not None else tuple(
            _mono_label(self.gen_names, w) for w in self.words)
        self._word_index = {w: i for i, w in enumerate(self.words)}
        self.reg = self.basis_actions(self.gen_mats)
        if check:
            self.certify()

    # ------------------------------------------------------------------
    @property
    def ngens(self) -> int:
        return len(self.gen_names)

    @property
    def max_ideal_indices(self) -> list[int]:
        return list(range(1, self.dim))

    def same_as(self, other: LocalAlgebra) -> bool:
        if self is other:
            return True
        return (self.p == other.p and self.words == other.words and self.ngens == other.ngens
                and all(np.array_equal(a, b) for a, b in zip(self.gen_mats, other.gen_mats)))

    def __repr__(self):
        return f"LocalAlgebra(dim={self.dim}, gens={list(self.gen_names)}, p={self.p})"

    def basis_actions(self, mats: Sequence[np.ndarray], n: int | None = None) -> list[np.ndarray]:
        """Actions of every basis element, given generator actions ``mats`` on F_p^n."""
        p = self.p
        if n is None:
            n = mats[0].shape[0] if len(mats) else self.dim
        cache: dict[tuple, np.ndarray] = {(0,) * self.ngens: la.identity(n)}

        def act(w):
            if w in cache:
                return cache[w]
            g = next(i for i, k in enumerate(w) if k)
            prev = list(w)
            prev[g] -= 1
            out = la.matmul(mats[g], act(tuple(prev)), p)
            cache[w] = out
            return out

        return [act(w) for w in self.words]

    def certify(self) -> None:
        p, d = self.p, self.dim
        if d == 0:
            raise NotLocalError("zero ring")
        if self.words[0] != (0,) * self.ngens:
            raise NotLocalError("first basis element must be the unit")
        e0 = la.zeros(d, 1)
        e0[0, 0] = 1
        for l, M in enumerate(self.reg):
            col = M[:, 0]
            expect = np.zeros(d, dtype=np.int64)
            expect[l] = 1
            if not np.array_equal(col, expect):
                raise NotLocalError(f"basis word {self.labels[l]} does not act as itself on 1")
        for i, A in enumerate(self.gen_mats):
            for B in self.gen_mats[i + 1:]:
                if not np.array_equal(la.matmul(A, B, p), la.matmul(B, A, p)):
                    raise NotLocalError("generator actions do not commute")
            if A[0].any():
                raise NotLocalError("span of the non-unit basis is not an ideal")
            if la.matpow(A, d, p).any():
                raise NotLocalError("generator is not nilpotent: the algebra is not local")

    # elements ---------------------------------------------------------
    def unit(self) -> np.ndarray:
        e = np.zeros(self.dim, dtype=np.int64)
        e[0] = 1
        return e

    def basis_vector(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim, dtype=np.int64)
        e[i] = 1
        return e

    def gen(self, i: int) -> np.ndarray:
        return self.gen_mats[i][:, 0].copy()

    def mult_matrix(self, a: np.ndarray) -> np.ndarray:
        """Matrix of multiplication by the element a."""
        return self.act(a, self.reg)

    def act(self, a: np.ndarray, basis_acts: Sequence[np.ndarray]) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64) % self.p
        n = basis_acts[0].shape[0]
        out = np.zeros((n, n), dtype=np.int64)
        for l in np.flatnonzero(a):
            out = (out + int(a[l]) * basis_acts[l]) % self.p
        return out

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return la.matmul(self.mult_matrix(a), np.asarray(b, dtype=np.int64), self.p)

    def element(self, f) -> np.ndarray:
        """Coordinates of a polynomial (or literal) in the generators or presentation variables."""
        if isinstance(f, int):
            return self.unit() * (f % self.p)
        if isinstance(f, str):
            f = self.parse_ring().parse(f)
        if self.presentation is not None and f.ring == self.presentation.ring:
            r = self.presentation.reduce(f)
            v = np.zeros(self.dim, dtype=np.int64)
            gidx = [self.presentation.ring.names.index(n) for n in self.gen_names]
            for e, c in r.terms.items():
                w = tuple(e[i] for i in gidx)
                if sum(w) != sum(e):
                    raise ValueError("normal form outside the standard monomials")
                v[self._word_index[w]] = c
            return v
        # evaluate on generators
        if f.ring.names != self.gen_names:
            raise ValueError("polynomial is not over this algebra's generators")
        v = np.zeros(self.dim, dtype=np.int64)
        for e, c in f.terms.items():
            M = la.identity(self.dim)
            for g, k in enumerate(e):
                if k:
                    M = la.matmul(la.matpow(self.gen_mats[g], k, self.p), M, self.p)
            v = (v + c * M[:, 0]) % self.p
        return v

    def parse_ring(self) -> PolyRing:
        if self.presentation is not None:
            return self.presentation.ring
        return PolyRing(self.gen_names, self.p)

    def format_element(self, a: np.ndarray) -> str:
        a = np.asarray(a) % self.p
        parts = []
        for l in np.flatnonzero(a):
            c = int(a[l])
            c = c if c <= self.p // 2 else c - self.p
            lab = self.labels[l]
            if lab == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(lab)
            elif c == -1:
                parts.append("-" + lab)
            else:
                parts.append(f"{c}*{lab}")
        return " + ".join(parts).replace("+ -", "- ") or "0"

    # ideals -------------------------------------------------------------
    def ideal_span(self, gens: Sequence[np.ndarray]) -> np.ndarray:
        """Basis (columns) of the ideal generated by the given elements."""
        cols = [la.matmul(M, np.asarray(g, dtype=np.int64).reshape(-1, 1), self.p) for g in gens for M in self.reg]
        if not cols:
            return la.zeros(self.dim, 0)
        return la.column_space(np.hstack(cols), self.p)

    def max_ideal_power(self, k: int) -> np.ndarray:
        """Basis (columns) of m^k."""
        V = la.identity(self.dim)
        for _ in range(k):
            if V.shape[1] == 0:
                break
            V = la.column_space(np.hstack([la.matmul(A, V, self.p) for A in self.gen_mats] or [la.zeros(self.dim, 0)]), self.p)
        return V


@dataclass
class AlgebraHom:
    source: LocalAlgebra
    target: LocalAlgebra
    matrix: np.ndarray  # target.dim x source.dim

    def __call__(self, a: np.ndarray) -> np.ndarray:
        return la.matmul(self.matrix, np.asarray(a, dtype=np.int64), self.source.p)

    def check(self) -> bool:
        S, T, p = self.source, self.target, self.source.p
        if not np.array_equal(self(S.unit()), T.unit()):
            return False
        for i in range(S.dim):
            for j in range(S.dim):
                lhs = self(S.mul(S.basis_vector(i), S.basis_vector(j)))
                rhs = T.mul(self(S.basis_vector(i)), self(S.basis_vector(j)))
                if not np.array_equal(lhs, rhs):
                    return False
        return True


# --------------------------------------------------------------------------
# constructors


def from_quotient(I: PolyIdeal) -> LocalAlgebra:
    """S/I as a local algebra; the generators are the degree-one standard monomials."""
    ring = I.ring
    if I.is_unit():
        raise ValueError("quotient by the unit ideal")
    for g in I.gens:
        if g.constant_term():
            raise ValueError("ideal is not contained in the irrelevant maximal ideal")
    ok, basis = is_artinian_quotient(I)
    if not ok:
        raise ValueError("quotient is not Artinian")
    n = ring.nvars
    gvars = [i for i in range(n) if tuple(1 if j == i else 0 for j in range(n)) in set(basis)]
    index = {e: k for k, e in enumerate(basis)}
    d = len(basis)
    mats = []
    for i in gvars:
        M = la.zeros(d, d)
        xi = ring.var(i)
        for k, e in enumerate(basis):
            r = I.reduce(xi * ring.monomial(e))
            for ee, c in r.terms.items():
                M[index[ee], k] = c
        mats.append(M)
    words = []
    for e in basis:
        if any(e[i] for i in range(n) if i not in gvars):
            raise ValueError("standard monomial involves a non-standard variable")
        words.append(tuple(e[i] for i in gvars))
    return LocalAlgebra(ring.p, [ring.names[i] for i in gvars], mats, words, presentation=I)


def quotient_ring(names: Sequence[str], gens: Sequence[str], p: int = la.DEFAULT_PRIME) -> LocalAlgebra:
    """Convenience: ``quotient_ring("xy", ["x^2", "y^2"])``."""
    R = PolyRing(list(names), p)
    return from_quotient(R.ideal(gens))


def residue_field(p: int = la.DEFAULT_PRIME) -> LocalAlgebra:
    return LocalAlgebra(p, [], [], [()])


def fiber_product(A: LocalAlgebra, B: LocalAlgebra) -> LocalAlgebra:
    """A x_k B: basis 1, m_A, m_B; generators of A then generators of B."""
    if A.p != B.p:
        raise ValueError("field mismatch")
    p = A.p
    names_a, names_b = list(A.gen_names), list(B.gen_names)
    clash = set(names_a) & set(names_b)
    if clash:
        names_a = [f"{n}_1" if n in clash else n for n in names_a]
        names_b = [f"{n}_2" if n in clash else n for n in names_b]
    da, db = A.dim, B.dim
    d = da + db - 1
    ia = list(range(da))  # unit and m_A
    ib = [0] + list(range(da, d))  # unit and m_B
    mats = []
    for M in A.gen_mats:
        F = la.zeros(d, d)
        F[np.ix_(ia, ia)] = M
        mats.append(F)
    for M in B.gen_mats:
        F = la.zeros(d, d)
        F[np.ix_(ib, ib)] = M
        mats.append(F)
    words = [tuple(w) + (0,) * B.ngens for w in A.words]
    words += [(0,) * A.ngens + tuple(w) for w in B.words[1:]]
    labels = ["1"] + [_mono_label(names_a, w) for w in A.words[1:]] + [_mono_label(names_b, w) for w in B.words[1:]]
    return LocalAlgebra(p, names_a + names_b, mats, words, labels=labels)


def quotient_algebra(R: LocalAlgebra, gens: Sequence[np.ndarray]) -> tuple[LocalAlgebra, AlgebraHom]:
    """R/(gens) with the projection.  All generators of R are kept (some may act as 0)."""
    p = R.p
    I = R.ideal_span(gens)
    if I.shape[1] and I[0].any():
        raise ValueError("ideal is the whole ring")
    Q, S = la.complement_coords(I, p, R.dim)
    keep = [int(np.flatnonzero(S[:, j])[0]) for j in range(S.shape[1])]
    mats = [la.matmul(la.matmul(Q, M, p), S, p) for M in R.gen_mats]
    words = [R.words[k] for k in keep]
    labels = [R.labels[k] for k in keep]
    Rbar = LocalAlgebra(p, R.gen_names, mats, words, labels=labels)
    Rbar.ideal_basis_in_parent = I
    return Rbar, AlgebraHom(R, Rbar, Q)


# --------------------------------------------------------------------------
# invariants


def socle(R: LocalAlgebra) -> np.ndarray:
    """Basis (columns) of 0 :_R m."""
    if not R.gen_mats:
        return la.identity(R.dim)
    return la.kernel_basis(np.vstack(R.gen_mats), R.p)


def type_r(R: LocalAlgebra) -> int:
    return socle(R).shape[1]


def loewy_length(R: LocalAlgebra) -> int:
    k = 0
    while R.max_ideal_power(k).shape[1]:
        k += 1
    return k


def edim(R: LocalAlgebra) -> int:
    m2 = R.max_ideal_power(2).shape[1]
    return R.dim - 1 - m2


def is_field(R: LocalAlgebra) -> bool:
    return R.dim == 1
