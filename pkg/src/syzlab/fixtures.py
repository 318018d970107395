"""Named test rings and seeded random modules."""

from __future__ import annotations

import numpy as np

from . import fdmod as fd
from .algebra import LocalAlgebra, from_quotient
from .polyring import PolyRing
from .predicates import RingPresentation

# name -> (variables, ideal generators)
RINGS = {
    "x3_x2y_y2": ("xy", ["x^3", "x^2*y", "y^2"]),
    "m3_xy": ("xy", ["x^3", "x^2*y", "x*y^2", "y^3"]),
    "fiber_xy_zw": ("xyzw", ["x^2", "y^2", "z^2", "w^2", "x*z", "x*w", "y*z", "y*w"]),
    "x2": ("x", ["x^2"]),
    "x3": ("x", ["x^3"]),
    "x2_y2": ("xy", ["x^2", "y^2"]),
    "x2_xy_y2": ("xy", ["x^2", "x*y", "y^2"]),
    "x3_xy_y2": ("xy", ["x^3", "x*y", "y^2"]),
}

_cache: dict = {}


def presentation(name: str, p: int = 101) -> RingPresentation:
    names, gens = RINGS[name]
    return RingPresentation(PolyRing(list(names), p).ideal(gens))


def ring(name: str, p: int = 101) -> LocalAlgebra:
    key = (name, p)
    if key not in _cache:
        _cache[key] = from_quotient(presentation(name, p).ideal)
    return _cache[key]


def random_module(R: LocalAlgebra, seed: int, max_gens: int = 2, max_rels: int = 2) -> fd.FDModule:
    """Cokernel of a random matrix with entries in m; nonzero and not free.

    Over an Artinian non-field ring such a module has infinite projective
    dimension.
    """
    rng = np.random.default_rng(seed)
    if R.dim == 1:
        raise ValueError("no non-free modules over a field")
    while True:
        a = int(rng.integers(1, max_gens + 1))
        b = int(rng.integers(1, max_rels + 1))
        mat = []
        for _ in range(a):
            row = []
            for _ in range(b):
                v = np.zeros(R.dim, dtype=np.int64)
                v[1:] = rng.integers(0, R.p, R.dim - 1) * (rng.random(R.dim - 1) < 0.5)
                row.append(v)
            mat.append(row)
        M = fd.coker(R, mat, label=f"random[{seed}]")
        if M.dim and not fd.is_free(M):
            return M


def random_modules(R: LocalAlgebra, count: int, seed: int = 0, **kw) -> list[fd.FDModule]:
    return [random_module(R, seed * 1000 + i, **kw) for i in range(count)]
