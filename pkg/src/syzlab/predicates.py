"""Ring predicates: Burch, decomposable maximal ideal, hypersurface,
the syzygy conditions, and torsionfreeness."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import exactla as la
from . import fdmod as fd
from . import krs
from .algebra import LocalAlgebra, from_quotient, is_field
from .polyring import (MultiPoly, PolyIdeal, ideal_quotient, is_artinian_quotient, krull_dimension,
                       linear_part_rank, maximal_ideal as poly_max_ideal, substitute_linear)
from .polyring import is_regular_element


class PredicateError(ValueError):
    pass


@dataclass
class PredicateReport:
    name: str
    verdict: bool | None  # None means "not established"
    witness: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.verdict is True

    def to_dict(self) -> dict:
        return {"name": self.name, "verdict": self.verdict, "witness": self.witness, "notes": list(self.notes)}


def is_linear(f: MultiPoly) -> bool:
    return not f.constant_term() and all(sum(e) <= 1 for e in f.terms)


class RingPresentation:
    """S/I with an optional regular sequence used to reach an Artinian ring.

    Linear elements of the sequence are eliminated (the reduction stays in
    a polynomial ring); other elements are added to the ideal.
    """

    def __init__(self, ideal: PolyIdeal, sequence: Sequence[MultiPoly | str] = ()):
        ring = ideal.ring
        self.ideal = ideal
        self.sequence = [ring.parse(s) if isinstance(s, str) else s for s in sequence]
        self.krull_dim = krull_dimension(ideal)
        self.edim = ring.nvars - linear_part_rank(ideal)
        J = ideal
        for f in self.sequence:
            # f is read in the current quotient; push it along eliminations
            f = _restrict(f, J.ring)
            if J.contains(f):
                raise PredicateError(f"{f} is zero in the quotient, not a regular element")
            if not is_regular_element(J, f):
                raise PredicateError(f"{f} is a zero divisor on the current quotient")
            if is_linear(f):
                J, _ = substitute_linear(J, f)
            else:
                J = PolyIdeal(J.ring, list(J.gens) + [f])
        self.reduced = J
        self.artinian, _ = is_artinian_quotient(J)
        self._algebra = None

    def algebra(self) -> LocalAlgebra:
        if not self.artinian:
            raise PredicateError("the reduction is not Artinian; supply a regular sequence")
        if self._algebra is None:
            self._algebra = from_quotient(self.reduced)
        return self._algebra


def _restrict(f: MultiPoly, ring) -> MultiPoly:
    """Re-read f in a ring whose variables are a subset (after eliminations)."""
    if f.ring == ring:
        return f
    # variables eliminated so far were expressed through the survivors;
    # re-parse from text, which only works when f avoids eliminated names
    text = str(f)
    try:
        return ring.parse(text)
    except Exception as exc:
        raise PredicateError(f"cannot read {text} after eliminating variables; "
                             "list sequence elements in terms of surviving variables") from exc


# --------------------------------------------------------------------------
# Burch


def is_burch(P: RingPresentation) -> PredicateReport:
    if not P.artinian:
        raise PredicateError("Burch test needs an Artinian reduction")
    I = P.reduced
    n = poly_max_ideal(I.ring)
    colon = ideal_quotient(I, n)
    A = n * colon
    B = n * I
    witness = {}
    verdict = A != B
    if verdict:
        for g in A.groebner():
            if not B.contains(g):
                witness["element"] = str(g)
                break
    witness["colon"] = [str(g) for g in colon.groebner()]
    return PredicateReport("burch", verdict, witness)


# --------------------------------------------------------------------------
# decomposable maximal ideal


def decomposable_maximal_ideal(R: LocalAlgebra, seed: int = 0) -> PredicateReport:
    """Split m = I + J when possible; I is the first indecomposable factor."""
    if is_field(R):
        raise PredicateError("a field has zero maximal ideal")
    m = fd.maximal_ideal(R)
    D = krs.decompose(m, seed)
    if len(D) < 2:
        return PredicateReport("decomposable", False, {"factors": 1})
    p = R.p
    K = m.ambient[1]  # m -> R as columns in R-coordinates
    Ib = la.matmul(K, D.summands[0].incl, p)
    Jb = la.matmul(K, np.hstack([S.incl for S in D.summands[1:]]), p)
    for B in (Ib, Jb):
        if la.rank(np.hstack([B] + [la.matmul(L, B, p) for L in R.gen_mats]), p) != B.shape[1]:
            raise AssertionError("summand of m is not an ideal")
    return PredicateReport("decomposable", True,
                           {"I": Ib, "J": Jb, "dims": [Ib.shape[1], Jb.shape[1]], "factors": len(D)})


def ideal_generators(R: LocalAlgebra, B: np.ndarray) -> list[np.ndarray]:
    """Element vectors generating the ideal spanned by the columns of B."""
    Mod = fd.submodule(fd.free(R, 1), B)
    U = fd.top_representatives(Mod)
    return [la.matmul(B, U[:, j:j + 1], R.p).reshape(-1) for j in range(U.shape[1])]


def quasi_decomposable(P: RingPresentation, seed: int = 0) -> PredicateReport:
    if not P.artinian:
        raise PredicateError("sequence does not reach an Artinian ring")
    R = P.algebra()
    if is_field(R):
        return PredicateReport("quasi_decomposable", None, notes=["reduction is a field"])
    rep = decomposable_maximal_ideal(R, seed)
    if rep.verdict:
        return PredicateReport("quasi_decomposable", True, rep.witness,
                               [f"sequence: {[str(f) for f in P.sequence]}"])
    if P.krull_dim == 0 and not P.sequence:
        return PredicateReport("quasi_decomposable", False, notes=["Artinian: depth 0, only the empty sequence"])
    return PredicateReport("quasi_decomposable", None, notes=["not established with the supplied sequence"])


def is_hypersurface(P: RingPresentation) -> PredicateReport:
    if P.krull_dim > 0 and not P.artinian:
        raise PredicateError("depth cannot be witnessed without a maximal regular sequence")
    depth = len(P.sequence)
    e = P.edim
    return PredicateReport("hypersurface", e - depth <= 1, {"edim": e, "depth": depth})


# --------------------------------------------------------------------------
# syzygy conditions at depth zero


def syzygy_conditions(R: LocalAlgebra, presentation: RingPresentation | None = None,
                      seed: int = 0) -> PredicateReport:
    """C1: m in add(R + Omega^2 k);  C2: k in add(R + Omega^2 k)."""
    k = fd.residue(R)
    m = fd.maximal_ideal(R)
    target = fd.direct_sum(fd.free(R, 1), fd.syzygy(k, 2))
    c1 = krs.in_add(m, target, seed)
    c2 = krs.in_add(k, target, seed)
    rep = PredicateReport("syzygy_conditions", c1 or c2, {"C1": c1, "C2": c2})
    if c2 and presentation is not None:
        if not is_burch(presentation).verdict:
            raise AssertionError("k in add(R + Omega^2 k) but the presentation is not Burch")
        rep.notes.append("C2 implies Burch: confirmed on the presentation")
    return rep


# --------------------------------------------------------------------------
# torsionfreeness


def _ext_vanishes(M: fd.FDModule, i: int) -> bool:
    return fd.ext(M, fd.free(M.R, 1), i).dim == 0


def torsionfree_degree(M: fd.FDModule, n: int) -> int:
    """Largest j <= n with Ext^i(Tr M, R) = 0 for 1 <= i <= j."""
    if M.dim == 0 or fd.is_free(M):
        return n
    T = fd.transpose(M)
    j = 0
    while j < n and _ext_vanishes(T, j + 1):
        j += 1
    return j


def g_membership(M: fd.FDModule, n: int, m: int) -> bool:
    """M in G_{n,m}: Ext^i(M,R) = 0 for 1 <= i <= n and Ext^j(Tr M,R) = 0 for 1 <= j <= m."""
    if M.dim == 0 or fd.is_free(M):
        return True
    if not all(_ext_vanishes(M, i) for i in range(1, n + 1)):
        return False
    return torsionfree_degree(M, m) >= m
