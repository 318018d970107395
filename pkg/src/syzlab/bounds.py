"""Upper bounds for the dominant index dx and the ultimate dimension udim.

Rings are described by ``RingDescriptor``s joined by ``Link``s (quotient by a
regular element, power series, completion, ...).  ``dx_bound`` closes the
rule set over the graph: every rule only lowers a bound, bounds are integers
>= -1, so the relaxation reaches a fixed point.  Every value carries the
rule application that produced it, so a derivation can be replayed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

INF = math.inf
FLAGS = ("C1", "C2", "burch", "quasi_decomposable", "hypersurface", "regular")


class BoundError(ValueError):
    pass


def _s(t: int, e: int) -> int:
    return 1 if t == 0 else 2 ** e


# rule name -> (statement, function of the named inputs)
RULES = {
    "regular": ("regular rings have dx = -1", lambda: -1),
    "known": ("user-supplied bound", lambda value: value),
    "syzygy_condition_C1": ("Omega^{t+1}k in add(R + Omega^{t+2}k) gives dx <= s(2t+3) - 1",
                            lambda s, t: s * (2 * t + 3) - 1),
    "syzygy_condition_C2": ("Omega^t k in add(R + Omega^{t+2}k) gives dx <= s(2t+4) - 1",
                            lambda s, t: s * (2 * t + 4) - 1),
    "regular_element_lift": ("dx(R) <= 2 dx(R/(x)) + 1", lambda dx: 2 * dx + 1),
    "regular_element_descent": ("dx(R/(x)) <= dx(R) for x not in m^2", lambda dx: dx),
    "power_series_extension": ("dx(R[[x_1..x_m]]) <= 2^m (dx(R) + 1) - 1", lambda dx, m: 2 ** m * (dx + 1) - 1),
    "power_series_restriction": ("dx(R) <= dx(R[[x_1..x_m]])", lambda dx: dx),
    "completion": ("dx(completion) <= 2^e (dx(R) + 1) - 1", lambda dx, e: 2 ** e * (dx + 1) - 1),
    "decompletion": ("dx(R) <= 2^e (dx(completion) + 1) - 1", lambda dx, e: 2 ** e * (dx + 1) - 1),
    "parameter_change": ("dx(R/bI) <= 2 dx(R/aI) + 1", lambda dx: 2 * dx + 1),
    "specialization_up": ("dx(S) <= 2^m (dx(R) + 1) - 1", lambda dx, m: 2 ** m * (dx + 1) - 1),
    "specialization_down": ("dx(R) <= 2^h (dx(S) + 1) - 1", lambda dx, h: 2 ** h * (dx + 1) - 1),
    "flat_fiber": ("dx(S) <= 2^d (dx(S/mS) + 1) - 1 for S flat over a regular ring of dimension d",
                   lambda dx, d: 2 ** d * (dx + 1) - 1),
    # ultimate dimension
    "udim_from_dx": ("udim <= (n+1)(m-t+1)l - 1 with n = dx", lambda n, m, t, l: (n + 1) * (m - t + 1) * l - 1),
    "udim_C1": ("udim <= s(2t+3)(m-t+1)l - 1", lambda s, t, m, l: s * (2 * t + 3) * (m - t + 1) * l - 1),
    "udim_C2": ("udim <= s(2t+4)(m-t+1)l - 1", lambda s, t, m, l: s * (2 * t + 4) * (m - t + 1) * l - 1),
    "udim_level_gt": ("udim <= (dx+1)(level+1)(gt+1) - 1", lambda dx, level, gt: (dx + 1) * (level + 1) * (gt + 1) - 1),
    "hypersurface_reference": ("generation time <= 2(d+2)l - 1 (complete isolated hypersurface, char 0)",
                               lambda d, l: 2 * (d + 2) * l - 1),
}


@dataclass
class RingDescriptor:
    name: str
    t: int = 0  # depth
    e: int = 0  # embedding dimension
    d: int = 0  # Krull dimension
    flags: set = field(default_factory=set)
    dx: int | None = None  # known upper bound
    dx_source: str = ""
    m: int | None = None  # nu(J)
    l: int | None = None  # Loewy length of R/J
    assertions: list = field(default_factory=list)

    def validate(self) -> list[str]:
        """Check the invariants; returns the flag implications added."""
        bad = set(self.flags) - set(FLAGS)
        if bad:
            raise BoundError(f"unknown flags {sorted(bad)}")
        if not (0 <= self.t <= self.d <= self.e):
            raise BoundError(f"{self.name}: need 0 <= t <= d <= e, got t={self.t}, d={self.d}, e={self.e}")
        added = []
        if "regular" in self.flags:
            if self.e != self.d:
                raise BoundError(f"{self.name}: a regular ring has edim = dim")
            for f in ("hypersurface", "burch"):
                if f not in self.flags:
                    added.append(f"regular => {f}")
                    self.flags.add(f)
        if "hypersurface" in self.flags:
            if self.e - self.t > 1:
                raise BoundError(f"{self.name}: a hypersurface has edim - depth <= 1")
            if "burch" not in self.flags:
                added.append("hypersurface => burch")
                self.flags.add("burch")
        return added


@dataclass
class Link:
    kind: str
    source: str
    target: str
    params: dict = field(default_factory=dict)


@dataclass
class Step:
    rule: str
    ring: str
    inputs: dict
    value: int
    uses: list = field(default_factory=list)  # ring names whose bounds fed this step

    def to_dict(self) -> dict:
        return {"rule": self.rule, "ring": self.ring, "statement": RULES[self.rule][0],
                "inputs": dict(self.inputs), "value": self.value}


@dataclass
class BoundDerivation:
    quantity: str
    ring: str
    value: int | float
    steps: list
    assertions: list = field(default_factory=list)
    references: list = field(default_factory=list)

    def to_dict(self) -> dict:
        v = self.value if self.value != INF else None
        return {"quantity": self.quantity, "ring": self.ring, "bound": v,
                "steps": [s.to_dict() for s in self.steps], "assertions": list(self.assertions),
                "references": [s.to_dict() for s in self.references]}


def evaluate(rule: str, inputs: dict) -> int:
    return RULES[rule][1](**inputs)


def replay(deriv: BoundDerivation) -> bool:
    """Recompute every step; inputs named ``dx``/``n`` must equal the value of the step they came from."""
    seen: dict[str, int] = {}
    for s in deriv.steps:
        if evaluate(s.rule, s.inputs) != s.value:
            return False
        for src in s.uses:
            if src not in seen:
                return False
            key = "n" if "n" in s.inputs else "dx"
            if s.inputs.get(key) != seen[src]:
                return False
        seen[s.ring] = s.value
    return not deriv.steps or deriv.steps[-1].value == deriv.value


class BoundGraph:
    def __init__(self, rings: list[RingDescriptor] = (), links: list[Link] = ()):
        self.rings: dict[str, RingDescriptor] = {}
        self.links: list[Link] = []
        self.notes: list[str] = []
        for r in rings:
            self.add(r)
        for k in links:
            self.link(k)

    def add(self, r: RingDescriptor) -> RingDescriptor:
        self.notes += [f"{r.name}: {a}" for a in r.validate()]
        self.rings[r.name] = r
        return r

    def link(self, k: Link) -> Link:
        if k.source not in self.rings or k.target not in self.rings:
            raise BoundError(f"link {k.kind} refers to an undeclared ring")
        needed = {"regular_quotient": [], "power_series": ["m"], "completion": [], "parameter_change": [],
                  "specialization": ["m", "h"], "flat_fiber": ["d"]}
        if k.kind not in needed:
            raise BoundError(f"unknown link kind {k.kind!r}")
        for p in needed[k.kind]:
            if p not in k.params:
                raise BoundError(f"link {k.kind} needs parameter {p}")
        self.links.append(k)
        return k

    # -- local rules ------------------------------------------------------
    def _local(self, r: RingDescriptor) -> list[Step]:
        out = []
        s = _s(r.t, r.e)
        if "regular" in r.flags:
            out.append(Step("regular", r.name, {}, -1))
        if r.dx is not None:
            out.append(Step("known", r.name, {"value": r.dx}, r.dx))
        if r.flags & {"C1", "quasi_decomposable"}:
            out.append(Step("syzygy_condition_C1", r.name, {"s": s, "t": r.t}, evaluate("syzygy_condition_C1", {"s": s, "t": r.t})))
        if r.flags & {"C2", "burch", "hypersurface"}:
            out.append(Step("syzygy_condition_C2", r.name, {"s": s, "t": r.t}, evaluate("syzygy_condition_C2", {"s": s, "t": r.t})))
        return out

    def _edges(self, k: Link, val: dict) -> list[Step]:
        """Candidate steps along one link given the current bounds."""
        a, b = k.source, k.target
        out = []

        def step(rule, ring, src, **extra):
            if val[src] == INF:
                return
            inputs = {"dx": val[src], **extra}
            out.append(Step(rule, ring, inputs, evaluate(rule, inputs), [src]))

        if k.kind == "regular_quotient":  # source R, target R/(x)
            step("regular_element_lift", a, b)
            if k.params.get("linear", False):
                step("regular_element_descent", b, a)
        elif k.kind == "power_series":  # source R, target R[[x_1..x_m]]
            step("power_series_extension", b, a, m=k.params["m"])
            step("power_series_restriction", a, b)
        elif k.kind == "completion":  # source R, target its completion
            e = self.rings[a].e
            step("completion", b, a, e=e)
            step("decompletion", a, b, e=e)
        elif k.kind == "parameter_change":  # source R/aI, target R/bI
            step("parameter_change", b, a)
        elif k.kind == "specialization":  # source R, target S
            step("specialization_up", b, a, m=k.params["m"])
            step("specialization_down", a, b, h=k.params["h"])
        elif k.kind == "flat_fiber":  # source: the closed fiber S/mS, target S
            step("flat_fiber", b, a, d=k.params["d"])
        return out

    def close(self) -> tuple[dict, dict]:
        """Fixed point of all rules: (values, best step per ring)."""
        val = {n: INF for n in self.rings}
        best: dict[str, Step] = {}

        def offer(st: Step) -> bool:
            if st.value < val[st.ring]:
                val[st.ring] = st.value
                best[st.ring] = st
                return True
            return False

        for r in self.rings.values():
            for st in self._local(r):
                offer(st)
        changed = True
        while changed:
            changed = False
            for k in self.links:
                for st in self._edges(k, val):
                    changed |= offer(st)
        return val, best

    def improvable(self, val: dict) -> bool:
        """True if one more application of any rule would lower a bound."""
        for r in self.rings.values():
            if any(st.value < val[r.name] for st in self._local(r)):
                return True
        for k in self.links:
            if any(st.value < val[st.ring] for st in self._edges(k, val)):
                return True
        return False

    def derivation(self, name: str) -> BoundDerivation:
        if name not in self.rings:
            raise BoundError(f"unknown ring {name}")
        val, best = self.close()
        steps: list[Step] = []
        seen = set()

        def collect(n):
            if n in seen or n not in best:
                return
            seen.add(n)
            for src in best[n].uses:
                collect(src)
            steps.append(best[n])

        collect(name)
        assertions = [f"{r.name}: {a}" for r in self.rings.values() for a in r.assertions]
        return BoundDerivation("dx", name, val[name], steps, assertions + list(self.notes))


def dx_bound(desc: RingDescriptor, graph: BoundGraph | None = None) -> BoundDerivation:
    if graph is None:
        graph = BoundGraph([desc])
    elif desc.name not in graph.rings:
        graph.add(desc)
    return graph.derivation(desc.name)


def udim_bound(desc: RingDescriptor, m: int | None = None, l: int | None = None, dx: int | None = None,
               level: int | None = None, gt: int | None = None, graph: BoundGraph | None = None) -> BoundDerivation:
    """Least ultimate-dimension bound available from the descriptor.

    The isolated-singularity / excellence hypotheses are recorded as
    assertions, not checked.
    """
    m = desc.m if m is None else m
    l = desc.l if l is None else l
    if m is None or l is None:
        raise BoundError("udim bounds need the annihilator data m = nu(J) and l = Loewy length of R/J")
    if m < desc.t:
        raise BoundError("need m >= t")
    desc.validate()
    t, s = desc.t, _s(desc.t, desc.e)
    steps, refs = [], []
    if dx is None:
        d = dx_bound(desc, graph)
        if d.value != INF:
            steps.append(("dx", d))
            dx = int(d.value)
    cands = []
    if dx is not None:
        inp = {"n": dx, "m": m, "t": t, "l": l}
        cands.append(Step("udim_from_dx", desc.name, inp, evaluate("udim_from_dx", inp)))
    if desc.flags & {"C1", "quasi_decomposable"}:
        inp = {"s": s, "t": t, "m": m, "l": l}
        cands.append(Step("udim_C1", desc.name, inp, evaluate("udim_C1", inp)))
    if desc.flags & {"C2", "burch", "hypersurface"}:
        inp = {"s": s, "t": t, "m": m, "l": l}
        cands.append(Step("udim_C2", desc.name, inp, evaluate("udim_C2", inp)))
    if dx is not None and level is not None and gt is not None:
        inp = {"dx": dx, "level": level, "gt": gt}
        cands.append(Step("udim_level_gt", desc.name, inp, evaluate("udim_level_gt", inp)))
    if "hypersurface" in desc.flags:
        refs.append(Step("hypersurface_reference", desc.name, {"d": desc.d, "l": l},
                         evaluate("hypersurface_reference", {"d": desc.d, "l": l})))
    assertions = ["excellent", "equicharacteristic", "isolated singularity", "J inside ann Dsg(R)"]
    if not cands:
        return BoundDerivation("udim", desc.name, INF, [], assertions, refs)
    best = min(cands, key=lambda st: st.value)
    chain = [st for _, dd in steps for st in dd.steps] if best.rule in ("udim_from_dx", "udim_level_gt") else []
    return BoundDerivation("udim", desc.name, best.value, chain + [best], assertions + list(desc.assertions), refs)


# --------------------------------------------------------------------------
# worked families


def _determinantal(h: int, u: int) -> tuple[BoundGraph, str]:
    """k[[x_1..x_h]]/I_2 of a 2 x u matrix of nonunits, of dimension h - u + 1.

    The generic determinantal ring is Cohen-Macaulay Burch of dimension u+1
    and edim 2u; its completion specializes to R.
    """
    if u < 1 or h < u - 1:
        raise BoundError("need u >= 1 and h >= u - 1")
    g = BoundGraph()
    g.add(RingDescriptor("generic", t=u + 1, e=2 * u, d=u + 1, flags={"burch"},
                         assertions=["generic 2 x u determinantal ring localized at the irrelevant ideal"]))
    g.add(RingDescriptor("generic_completed", t=u + 1, e=2 * u, d=u + 1, flags=set()))
    g.add(RingDescriptor("R", t=max(0, h - u + 1), e=h, d=max(0, h - u + 1)))
    g.link(Link("completion", "generic", "generic_completed"))
    g.link(Link("specialization", "generic_completed", "R", {"m": h, "h": 2 * u}))
    return g, "R"


def _fiber_flat(d: int, h: int, m: int, with_z: bool) -> tuple[BoundGraph, str]:
    """R/(x y) or R/(x (y, z)) for R regular of dimension d."""
    if h <= 0 or m < 0 or d < 0:
        raise BoundError("need h > 0, m >= 0, d >= 0")
    if not with_z and m == 0:
        raise BoundError("the product x y needs m > 0")
    n = h + m + (1 if with_z else 0)
    g = BoundGraph()
    # closed fiber k[[X, Y(, Z)]]/(X(Y, Z)): depth one, decomposable maximal ideal
    g.add(RingDescriptor("fiber", t=1, e=n, d=max(h, n - h), flags={"quasi_decomposable"}))
    g.add(RingDescriptor("flat", t=1, e=d + n, d=d + max(h, n - h)))
    g.add(RingDescriptor("completed_quotient", t=min(d, d - 1 if d else 0), e=d, d=max(0, d - 1)))
    g.add(RingDescriptor("quotient", t=min(d, d - 1 if d else 0), e=d, d=max(0, d - 1)))
    g.link(Link("flat_fiber", "fiber", "flat", {"d": d}))
    # the completion is the flat ring modulo n linear regular elements; each step keeps dx
    g.link(Link("regular_quotient", "flat", "completed_quotient", {"linear": True, "length": n}))
    g.link(Link("completion", "quotient", "completed_quotient"))
    return g, "quotient"


def _staircase() -> tuple[BoundGraph, str]:
    """k[x,y]/(x^a1, x^a2 y^b2, ..., y^bn), n >= 3: parameter change from an Artinian Burch ring."""
    g = BoundGraph()
    g.add(RingDescriptor("S/yI", t=0, e=2, d=0, flags={"burch"}))
    g.add(RingDescriptor("R", t=0, e=2, d=0))
    g.link(Link("parameter_change", "S/yI", "R"))
    return g, "R"


def named_bounds(example: str, **params) -> BoundDerivation:
    """Bounds for the worked families; ``example`` is one of
    determinantal (h, u), semigroup, product_ideal (d, h, m),
    product_ideal_extended (d, h, m), two_generated (d), staircase."""
    if example == "determinantal":
        g, name = _determinantal(params["h"], params["u"])
    elif example == "semigroup":
        g, name = _determinantal(3, 3)
    elif example == "product_ideal":
        g, name = _fiber_flat(params["d"], params["h"], params["m"], False)
    elif example == "product_ideal_extended":
        g, name = _fiber_flat(params["d"], params["h"], params["m"], True)
    elif example == "two_generated":
        g, name = _fiber_flat(params["d"], 1, 1, True)
    elif example == "staircase":
        g, name = _staircase()
    else:
        raise BoundError(f"unknown example {example!r}")
    out = g.derivation(name)
    out.assertions.append(f"family {example} with {params}")
    return out


NAMED = ("determinantal", "semigroup", "product_ideal", "product_ideal_extended", "two_generated", "staircase")
