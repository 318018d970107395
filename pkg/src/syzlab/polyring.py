"""Multivariate polynomials over F_p and ideal arithmetic.

Everything user-facing is in degrevlex with x_1 > x_2 > ... > x_n.  The
ideal quotient needs one auxiliary variable eliminated with a block order;
that order only ever lives inside this module.
"""
from __future__ import annotations

import ast
import itertools
import threading
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from . import exactla as la

Exp = tuple  # exponent vector


def degrevlex_key(e: Exp):
    return (sum(e), tuple(-x for x in reversed(e)))


def _elim_key(e: Exp):
    # first variable is eliminated: lex on it, then degrevlex on the rest
    return (e[0], degrevlex_key(e[1:]))


def _divides(a: Exp, b: Exp) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exp, b: Exp) -> Exp:
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a: Exp, b: Exp) -> Exp:
    return tuple(x - y for x, y in zip(a, b))


def _add(a: Exp, b: Exp) -> Exp:
    return tuple(x + y for x, y in zip(a, b))


class PolyRing:
    """F_p[x_1, ..., x_n] with named variables."""

    def __init__(self, names: Sequence[str], p: int = la.DEFAULT_PRIME):
        la.PrimeField(p)
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.names = tuple(names)
        self.p = p

    @property
    def nvars(self) -> int:
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and (self.names, self.p) == (other.names, other.p)

    def __hash__(self):
        return hash((self.names, self.p))

    def __repr__(self):
        return f"PolyRing({', '.join(self.names)}; p={self.p})"

    def zero(self) -> MultiPoly:
        return MultiPoly(self, {})

    def one(self) -> MultiPoly:
        return self.const(1)

    def const(self, c: int) -> MultiPoly:
        return MultiPoly(self, {(0,) * self.nvars: c})

    def var(self, i: int | str) -> MultiPoly:
        if isinstance(i, str):
            i = self.names.index(i)
        e = [0] * self.nvars
        e[i] = 1
        return MultiPoly(self, {tuple(e): 1})

    def gens(self) -> list[MultiPoly]:
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, e: Exp, c: int = 1) -> MultiPoly:
        return MultiPoly(self, {tuple(e): c})

    def parse(self, text: str) -> MultiPoly:
        """Parse a literal such as ``x^3 + 2*x*y - 1``."""
        tree = ast.parse(text.replace("^", "**"), mode="eval")
        return self._from_ast(tree.body)

    def _from_ast(self, node) -> MultiPoly:
        if isinstance(node, ast.BinOp):
            a = self._from_ast(node.left)
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                    raise ValueError("exponents must be nonnegative integer literals")
                return a ** node.right.value
            b = self._from_ast(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
        elif isinstance(node, ast.UnaryOp):
            a = self._from_ast(node.operand)
            if isinstance(node.op, ast.USub):
                return -a
            if isinstance(node.op, ast.UAdd):
                return a
        elif isinstance(node, ast.Constant) and isinstance(node.value, int):
            return self.const(node.value)
        elif isinstance(node, ast.Name):
            if node.id not in self.names:
                raise ValueError(f"unknown variable {node.id!r}")
            return self.var(node.id)
        raise ValueError(f"unsupported polynomial syntax: {ast.dump(node)}")

    def ideal(self, gens: Iterable[MultiPoly | str]) -> PolyIdeal:
        gens = [self.parse(g) if isinstance(g, str) else g for g in gens]
        return PolyIdeal(self, gens)


class MultiPoly:
    """Immutable polynomial: a dict exponent-vector -> nonzero residue."""

    __slots__ = ("ring", "terms", "__weakref__")

    def __init__(self, ring: PolyRing, terms: dict):
        p = ring.p
        self.ring = ring
        self.terms = {e: c % p for e, c in terms.items() if c % p}

    # arithmetic --------------------------------------------------------
    def _coerce(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            if other.ring != self.ring:
                raise ValueError("polynomials from different rings")
            return other
        if isinstance(other, int):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return MultiPoly(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        p = self.ring.p
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _add(e1, e2)
                t[e] = (t.get(e, 0) + c1 * c2) % p
        return MultiPoly(self.ring, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        return isinstance(other, MultiPoly) and self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    # structure ---------------------------------------------------------
    def sorted_terms(self) -> list[tuple[Exp, int]]:
        return sorted(self.terms.items(), key=lambda t: degrevlex_key(t[0]), reverse=True)

    def lm(self) -> Exp:
        return max(self.terms, key=degrevlex_key)

    def lc(self) -> int:
        return self.terms[self.lm()]

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.ring.nvars, 0)

    def monic(self) -> MultiPoly:
        if not self.terms:
            return self
        inv = pow(self.lc(), -1, self.ring.p)
        return MultiPoly(self.ring, {e: c * inv for e, c in self.terms.items()})

    def derivative(self, i: int) -> MultiPoly:
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                t[tuple(f)] = c * e[i]
        return MultiPoly(self.ring, t)

    def homogeneous_part(self, d: int) -> MultiPoly:
        return MultiPoly(self.ring, {e: c for e, c in self.terms.items() if sum(e) == d})

    def __repr__(self):
        return str(self)

    def __str__(self):
        if not self.terms:
            return "0"
        p = self.ring.p
        out = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                (n if k == 1 else f"{n}^{k}") for n, k in zip(self.ring.names, e) if k
            )
            # print residues in the symmetric range, it reads better
            s = c if c <= p // 2 else c - p
            if not mono:
                piece = str(abs(s))
            elif abs(s) == 1:
                piece = mono
            else:
                piece = f"{abs(s)}*{mono}"
            out.append(("-" if s < 0 else "+", piece))
        text = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, piece in out[1:]:
            text += f" {sign} {piece}"
        return text


# --------------------------------------------------------------------------
# Groebner machinery on raw dicts (exp -> coeff), parameterized by order


def _lead(f: dict, key) -> Exp:
    return max(f, key=key)


def _monic(f: dict, key, p: int) -> dict:
    inv = pow(f[_lead(f, key)], -1, p)
    return {e: c * inv % p for e, c in f.items()}


def _reduce(f: dict, G: list[dict], leads: list[Exp], key, p: int) -> dict:
    """Full reduction of f modulo G (G monic)."""
    f = dict(f)
    rem: dict = {}
    while f:
        m = _lead(f, key)
        c = f[m]
        for g, lg in zip(G, leads):
            if _divides(lg, m):
                q = _sub(m, lg)
                for e, gc in g.items():
                    ee = _add(e, q)
                    v = (f.get(ee, 0) - c * gc) % p
                    if v:
                        f[ee] = v
                    else:
                        f.pop(ee, None)
                break
        else:
            rem[m] = c
            del f[m]
    return rem


def _spoly(f: dict, g: dict, lf: Exp, lg: Exp, p: int) -> dict:
    L = _lcm(lf, lg)
    a, b = _sub(L, lf), _sub(L, lg)
    out: dict = {}
    for e, c in f.items():
        ee = _add(e, a)
        out[ee] = (out.get(ee, 0) + c) % p
    for e, c in g.items():
        ee = _add(e, b)
        out[ee] = (out.get(ee, 0) - c) % p
    return {e: c for e, c in out.items() if c}


def buchberger(gens: list[dict], key, p: int) -> list[dict]:
    """Reduced Groebner basis; product and chain criteria, normal selection."""
    G: list[dict] = []
    leads: list[Exp] = []
    for f in gens:
        if f:
            f = _reduce(f, G, leads, key, p) if G else f
            if f:
                f = _monic(f, key, p)
                G.append(f)
                leads.append(_lead(f, key))
    pairs = {(i, j) for j in range(len(G)) for i in range(j)}
    while pairs:
        i, j = min(pairs, key=lambda ij: (key(_lcm(leads[ij[0]], leads[ij[1]])), ij))
        pairs.discard((i, j))
        L = _lcm(leads[i], leads[j])
        if _add(leads[i], leads[j]) == L:
            continue  # coprime leading monomials
        if any(
            k not in (i, j)
            and _divides(leads[k], L)
            and (min(i, k), max(i, k)) not in pairs
            and (min(j, k), max(j, k)) not in pairs
            for k in range(len(G))
        ):
            continue  # chain criterion
        s = _spoly(G[i], G[j], leads[i], leads[j], p)
        r = _reduce(s, G, leads, key, p)
        if r:
            r = _monic(r, key, p)
            G.append(r)
            leads.append(_lead(r, key))
            n = len(G) - 1
            pairs |= {(k, n) for k in range(n)}
    return _interreduce(G, key, p)


def _interreduce(G: list[dict], key, p: int) -> list[dict]:
    leads = [_lead(g, key) for g in G]
    keep = []
    for i, li in enumerate(leads):
        if any(j != i and _divides(leads[j], li) and (leads[j] != li or j < i) for j in range(len(G))):
            continue
        keep.append(i)
    H = [G[i] for i in keep]
    out = []
    for i, g in enumerate(H):
        others = H[:i] + H[i + 1:]
        r = _reduce(g, others, [_lead(h, key) for h in others], key, p)
        out.append(_monic(r, key, p))
    out.sort(key=lambda g: key(_lead(g, key)))
    return out


# --------------------------------------------------------------------------
# ideals


class PolyIdeal:
    """An ideal of a PolyRing with a lazily computed reduced degrevlex GB."""

    def __init__(self, ring: PolyRing, gens: Iterable[MultiPoly]):
        self.ring = ring
        self.gens = tuple(g for g in gens if not g.is_zero())
        for g in self.gens:
            if g.ring != ring:
                raise ValueError("generator from a different ring")
        self._gb = None
        self._lock = threading.Lock()

    def __repr__(self):
        return "(" + ", ".join(str(g) for g in self.gens) + ")"

    def groebner(self) -> list[MultiPoly]:
        if self._gb is None:
            with self._lock:
                if self._gb is None:
                    raw = buchberger([dict(g.terms) for g in self.gens], degrevlex_key, self.ring.p)
                    self._gb = [MultiPoly(self.ring, f) for f in raw]
        return list(self._gb)

    @cached_property
    def leading_monomials(self) -> list[Exp]:
        return [g.lm() for g in self.groebner()]

    def is_unit(self) -> bool:
        return any(sum(e) == 0 for e in self.leading_monomials)

    def reduce(self, f: MultiPoly) -> MultiPoly:
        G = self.groebner()
        r = _reduce(dict(f.terms), [g.terms for g in G], self.leading_monomials, degrevlex_key, self.ring.p)
        return MultiPoly(self.ring, r)

    def contains(self, f: MultiPoly) -> bool:
        return self.reduce(f).is_zero()

    def __contains__(self, f):
        return self.contains(f)

    def contains_ideal(self, other: PolyIdeal) -> bool:
        return all(self.contains(g) for g in other.gens)

    def __eq__(self, other):
        if not isinstance(other, PolyIdeal):
            return NotImplemented
        return self.ring == other.ring and [g.terms for g in self.groebner()] == [g.terms for g in other.groebner()]

    def __hash__(self):
        return hash(tuple(frozenset(g.terms.items()) for g in self.groebner()))

    def __add__(self, other: PolyIdeal) -> PolyIdeal:
        return PolyIdeal(self.ring, self.gens + other.gens)

    def __mul__(self, other: PolyIdeal) -> PolyIdeal:
        return PolyIdeal(self.ring, [f * g for f in self.gens for g in other.gens])


def groebner(I: PolyIdeal) -> list[MultiPoly]:
    return I.groebner()


def normal_form(f: MultiPoly, I: PolyIdeal) -> MultiPoly:
    return I.reduce(f)


def maximal_ideal(ring: PolyRing) -> PolyIdeal:
    """The irrelevant ideal (x_1, ..., x_n)."""
    return PolyIdeal(ring, ring.gens())


def _embed(f: MultiPoly, coef: dict) -> dict:
    """f times a polynomial in the auxiliary variable t (dict power -> c)."""
    out: dict = {}
    for e, c in f.terms.items():
        for k, d in coef.items():
            ee = (k,) + e
            out[ee] = out.get(ee, 0) + c * d
    return out


def intersection(I: PolyIdeal, J: PolyIdeal) -> PolyIdeal:
    """I ∩ J via t*I + (1-t)*J and elimination of t."""
    ring, p = I.ring, I.ring.p
    if not I.gens or not J.gens:
        return PolyIdeal(ring, [])
    gens = [_embed(f, {1: 1}) for f in I.gens] + [_embed(g, {0: 1, 1: p - 1}) for g in J.gens]
    G = buchberger(gens, _elim_key, p)
    kept = [MultiPoly(ring, {e[1:]: c for e, c in g.items()}) for g in G if all(e[0] == 0 for e in g)]
    return PolyIdeal(ring, kept)


def divide_exact(h: MultiPoly, f: MultiPoly) -> MultiPoly:
    """h / f, assuming f divides h."""
    ring, p = h.ring, h.ring.p
    q: dict = {}
    r = dict(h.terms)
    lf = f.lm()
    inv = pow(f.terms[lf], -1, p)
    while r:
        m = _lead(r, degrevlex_key)
        if not _divides(lf, m):
            raise ArithmeticError("division is not exact")
        e = _sub(m, lf)
        c = r[m] * inv % p
        q[e] = c
        for fe, fc in f.terms.items():
            ee = _add(fe, e)
            v = (r.get(ee, 0) - c * fc) % p
            if v:
                r[ee] = v
            else:
                r.pop(ee, None)
    return MultiPoly(ring, q)


def quotient_by_element(I: PolyIdeal, f: MultiPoly) -> PolyIdeal:
    """(I : f) = (1/f)(I ∩ (f))."""
    ring = I.ring
    if f.is_zero() or I.contains(f):
        return PolyIdeal(ring, [ring.one()])
    K = intersection(I, PolyIdeal(ring, [f]))
    return PolyIdeal(ring, [divide_exact(h, f) for h in K.groebner()])


def ideal_quotient(I: PolyIdeal, J: PolyIdeal) -> PolyIdeal:
    """(I :_S J), one generator of J at a time."""
    out = None
    ring = I.ring
    for f in J.gens:
        Q = quotient_by_element(I, f)
        out = Q if out is None else intersection(out, Q)
    if out is None:
        return PolyIdeal(ring, [ring.one()])
    return PolyIdeal(ring, out.groebner())


def krull_dimension(I: PolyIdeal) -> int:
    """Largest set of variables independent modulo the leading-term ideal."""
    if I.is_unit():
        raise ValueError("unit ideal has no dimension")
    n = I.ring.nvars
    leads = I.leading_monomials
    for size in range(n, -1, -1):
        for U in itertools.combinations(range(n), size):
            Us = set(U)
            if not any(all(i in Us for i, k in enumerate(e) if k) for e in leads):
                return size
    return 0


def standard_monomials(I: PolyIdeal, limit: int = 100000) -> list[Exp] | None:
    """Standard monomials of S/I, or None if there are infinitely many."""
    n = I.ring.nvars
    leads = I.leading_monomials
    if I.is_unit():
        return []
    for i in range(n):
        if not any(e[i] > 0 and sum(e) == e[i] for e in leads):
            return None
    seen = {(0,) * n}
    frontier = [(0,) * n]
    while frontier:
        nxt = []
        for e in frontier:
            for i in range(n):
                f = list(e)
                f[i] += 1
                f = tuple(f)
                if f in seen or any(_divides(l, f) for l in leads):
                    continue
                seen.add(f)
                nxt.append(f)
        frontier = nxt
        if len(seen) > limit:
            raise RuntimeError("staircase too large")
    # by degree, and degrevlex-descending inside a degree: 1, x, y, x^2, x*y, ...
    return sorted(seen, key=lambda e: (sum(e), tuple(reversed(e))))


def is_artinian_quotient(I: PolyIdeal) -> tuple[bool, list[Exp] | None]:
    basis = standard_monomials(I)
    return basis is not None, basis


def is_regular_element(I: PolyIdeal, f: MultiPoly) -> bool:
    if I.contains(f):
        raise ValueError("element lies in the ideal")
    return quotient_by_element(I, f) == I


def minors(M: list[list[MultiPoly]], h: int, ring: PolyRing) -> list[MultiPoly]:
    rows, cols = len(M), len(M[0]) if M else 0
    out = []
    for R in itertools.combinations(range(rows), h):
        for C in itertools.combinations(range(cols), h):
            d = _det([[M[r][c] for c in C] for r in R], ring)
            if not d.is_zero():
                out.append(d)
    return out


def _det(A: list[list[MultiPoly]], ring: PolyRing) -> MultiPoly:
    n = len(A)
    if n == 0:
        return ring.one()
    if n == 1:
        return A[0][0]
    total = ring.zero()
    for j in range(n):
        if A[0][j].is_zero():
            continue
        sub = [row[:j] + row[j + 1:] for row in A[1:]]
        term = A[0][j] * _det(sub, ring)
        total = total + term if j % 2 == 0 else total - term
    return total


def jacobian_ideal(I: PolyIdeal) -> tuple[PolyIdeal, bool]:
    """I plus the h x h minors of the Jacobian, h = n - dim(S/I).

    Returns (ideal, degenerate); degenerate is True when there are fewer
    than h generators, in which case the ideal returned is I itself.
    """
    ring = I.ring
    h = ring.nvars - krull_dimension(I)
    gens = list(I.gens)
    if h > len(gens):
        return I, True
    if h == 0:
        return PolyIdeal(ring, gens + [ring.one()]), False
    J = [[g.derivative(i) for i in range(ring.nvars)] for g in gens]
    return PolyIdeal(ring, gens + minors(J, h, ring)), False


def linear_part_rank(I: PolyIdeal) -> int:
    """dim_k (I + n^2) / n^2 for an ideal inside n = (x_1, ..., x_n)."""
    ring = I.ring
    rows = []
    for g in I.gens:
        if g.constant_term():
            raise ValueError("ideal is not contained in the irrelevant maximal ideal")
        rows.append([g.terms.get(tuple(1 if j == i else 0 for j in range(ring.nvars)), 0) for i in range(ring.nvars)])
    if not rows:
        return 0
    return la.rank(np.array(rows, dtype=np.int64), ring.p)


def substitute_linear(I: PolyIdeal, f: MultiPoly) -> tuple[PolyIdeal, PolyRing]:
    """Kill a linear form f with a nonzero coefficient: eliminate one variable.

    Returns the ideal (I + (f)) presented in the polynomial ring on the
    remaining variables.  Used to pass to S/(I, f) while staying in a
    polynomial presentation.
    """
    ring, p = I.ring, I.ring.p
    lin = [f.terms.get(tuple(1 if j == i else 0 for j in range(ring.nvars)), 0) for i in range(ring.nvars)]
    if f.constant_term() or any(sum(e) > 1 for e in f.terms):
        raise ValueError("only linear forms can be eliminated")
    # eliminate the last variable with nonzero coefficient (keeps x before y)
    k = max(i for i, c in enumerate(lin) if c)
    inv = pow(lin[k], -1, p)
    # x_k = -(1/c) * (f - c x_k)
    rest = f - ring.var(k) * lin[k]
    image = rest * ((-inv) % p)
    names = ring.names[:k] + ring.names[k + 1:]
    sub = PolyRing(names, p)

    def push(g: MultiPoly) -> MultiPoly:
        out = sub.zero()
        img = {}
        for e, c in g.terms.items():
            mono = sub.const(c)
            for i, a in enumerate(e):
                if not a:
                    continue
                if i == k:
                    if k not in img:
                        img[k] = MultiPoly(sub, {_drop(ee, k): cc for ee, cc in image.terms.items()})
                    mono = mono * img[k] ** a
                else:
                    mono = mono * sub.var(ring.names[i]) ** a
            out = out + mono
        return out

    return PolyIdeal(sub, [push(g) for g in I.gens]), sub


def _drop(e: Exp, k: int) -> Exp:
    return e[:k] + e[k + 1:]
