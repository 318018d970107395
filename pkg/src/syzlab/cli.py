"""Script language and batch runner.

A script is a list of ``;``-terminated statements::

    option prime = 101;
    ring R = poly(x, y) / (x^3, x^2*y, y^2);
    module K = residue(R);
    check summand(maxideal(R), syz(K, 2));
    check decomposable R expect false;
    cert residue R K;
    bound dx R with {C1};

``parse`` gives a ``Script`` (checked for undeclared names, argument kinds
and the prime), ``run`` executes it into a report dict, ``main`` is the
console entry point.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from . import __version__
from . import bounds as bd
from . import exactla as la
from . import fdmod as fd
from . import krs
from . import predicates as pr
from . import theorems as th
from .fixtures import random_module
from .polyring import PolyRing

SCHEMA = 1

GRAMMAR = r"""
start: stmt*

?stmt: option_stmt | ring_stmt | module_stmt | seq_stmt | check_stmt | cert_stmt | bound_stmt

option_stmt: "option" NAME "=" optval ";"
?optval: SIGNED_INT -> intval
       | NAME -> nameval

ring_stmt: "ring" NAME "=" ring_expr ";"
ring_expr: "poly" "(" name_list ")" "/" "(" poly_list ")"  -> poly_ring
         | "fiber" "(" NAME "," NAME ")"                   -> fiber_ring
name_list: NAME ("," NAME)*
poly_list: poly ("," poly)*

module_stmt: "module" NAME "=" mexpr ";"
?mexpr: "coker" NAME matrix                 -> coker
      | NAME "(" [marg ("," marg)*] ")"     -> call
      | NAME                                -> ref
?marg: mexpr
     | SIGNED_INT                           -> intarg
matrix: "[" mrow ("," mrow)* "]"
mrow: "[" poly ("," poly)* "]"

seq_stmt: "seq" NAME "on" NAME "=" "(" poly_list ")" ";"

check_stmt: "check" NAME cargs [expect] ";"
cargs: "(" [marg ("," marg)*] ")"           -> call_args
     | simple*                              -> plain_args
?simple: NAME                               -> ref
       | SIGNED_INT                         -> intarg

cert_stmt: "cert" NAME simple* [params] ";"
bound_stmt: "bound" NAME [NAME] [params] [expect] ";"
params: "with" "{" [param ("," param)*] "}"
param: NAME ["=" SIGNED_INT]
expect: "expect" (SIGNED_INT | NAME)

?poly: pterm
     | poly "+" pterm    -> add
     | poly "-" pterm    -> sub
?pterm: pfactor
      | pterm "*" pfactor -> mul
?pfactor: patom
        | patom "^" INT   -> pow
        | "-" pfactor     -> neg
?patom: NAME              -> var
      | INT               -> num
      | "(" poly ")"      -> paren

NAME: /[A-Za-z_][A-Za-z_0-9]*/
%import common.INT
%import common.SIGNED_INT
%import common.WS
%ignore WS
%ignore /#[^\n]*/
%ignore /\/\/[^\n]*/
"""

_parser = Lark(GRAMMAR, parser="lalr", propagate_positions=True, maybe_placeholders=True)


class ScriptError(ValueError):
    def __init__(self, msg: str, line: int | None = None, column: int | None = None):
        self.msg, self.line, self.column = msg, line, column
        loc = f"{line}:{column}: " if line is not None else ""
        super().__init__(loc + msg)


# --------------------------------------------------------------------------
# abstract syntax


@dataclass(frozen=True)
class Ref:
    name: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def text(self):
        return self.name


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def text(self):
        return f"{self.fn}({', '.join(_text(a) for a in self.args)})"


@dataclass(frozen=True)
class Coker:
    ring: str
    rows: tuple
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def text(self):
        rows = ", ".join("[" + ", ".join(r) + "]" for r in self.rows)
        return f"coker {self.ring} [{rows}]"


def _text(a) -> str:
    return str(a) if isinstance(a, int) else a.text()


@dataclass(frozen=True)
class Stmt:
    kind: str  # option ring module seq check cert bound
    name: str = ""  # declared name / command kind
    body: tuple = ()
    params: tuple = ()  # ((name, value or None), ...)
    expect: object = None
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def text(self) -> str:
        k = self.kind
        if k == "option":
            return f"option {self.name} = {self.body[0]};"
        if k == "ring":
            if self.body[0] == "poly":
                _, names, gens = self.body
                return f"ring {self.name} = poly({', '.join(names)}) / ({', '.join(gens)});"
            return f"ring {self.name} = fiber({self.body[1]}, {self.body[2]});"
        if k == "module":
            return f"module {self.name} = {self.body[0].text()};"
        if k == "seq":
            ring, elems = self.body
            return f"seq {self.name} on {ring} = ({', '.join(elems)});"
        out = f"{k} {self.name}"
        if k == "check":
            if all(isinstance(a, (int, Ref)) for a in self.body):
                out += "".join(" " + _text(a) for a in self.body)
            else:
                out += "(" + ", ".join(_text(a) for a in self.body) + ")"
        elif k == "cert":
            out += "".join(" " + _text(a) for a in self.body)
        elif k == "bound" and self.body:
            out += " " + self.body[0]
        if self.params:
            out += " with {" + ", ".join(n if v is None else f"{n}={v}" for n, v in self.params) + "}"
        if self.expect is not None:
            e = self.expect
            out += " expect " + (("true" if e else "false") if isinstance(e, bool) else str(e))
        return out + ";"


@dataclass
class Script:
    statements: list

    def pretty(self) -> str:
        return "".join(s.text() + "\n" for s in self.statements)

    def __eq__(self, other):
        return isinstance(other, Script) and self.statements == other.statements

    def options(self) -> dict:
        return {s.name: s.body[0] for s in self.statements if s.kind == "option"}


def _pos(meta):
    return dict(line=getattr(meta, "line", 0) or 0, column=getattr(meta, "column", 0) or 0)


def _expect_value(tok):
    s = str(tok)
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        return s


@v_args(meta=True)
class _Build(Transformer):
    # polynomials are kept as normalized text
    def add(self, meta, c):
        return f"{c[0]} + {c[1]}"

    def sub(self, meta, c):
        return f"{c[0]} - {c[1]}"

    def mul(self, meta, c):
        return f"{c[0]}*{c[1]}"

    def pow(self, meta, c):
        return f"{c[0]}^{c[1]}"

    def neg(self, meta, c):
        return f"-{c[0]}"

    def var(self, meta, c):
        return str(c[0])

    def num(self, meta, c):
        return str(c[0])

    def paren(self, meta, c):
        return f"({c[0]})"

    def name_list(self, meta, c):
        return tuple(str(x) for x in c)

    def poly_list(self, meta, c):
        return tuple(c)

    def mrow(self, meta, c):
        return tuple(c)

    def matrix(self, meta, c):
        return tuple(c)

    def intval(self, meta, c):
        return int(c[0])

    def nameval(self, meta, c):
        return str(c[0])

    def intarg(self, meta, c):
        return int(c[0])

    def ref(self, meta, c):
        return Ref(str(c[0]), **_pos(meta))

    def call(self, meta, c):
        return Call(str(c[0]), tuple(a for a in c[1:] if a is not None), **_pos(meta))

    def coker(self, meta, c):
        return Coker(str(c[0]), c[1], **_pos(meta))

    def call_args(self, meta, c):
        return tuple(a for a in c if a is not None)

    def plain_args(self, meta, c):
        return tuple(c)

    def poly_ring(self, meta, c):
        return ("poly", c[0], c[1])

    def fiber_ring(self, meta, c):
        return ("fiber", str(c[0]), str(c[1]))

    def param(self, meta, c):
        return (str(c[0]), None if c[1] is None else int(c[1]))

    def params(self, meta, c):
        return tuple(x for x in c if x is not None)

    def expect(self, meta, c):
        return ("expect", _expect_value(c[0]))

    def option_stmt(self, meta, c):
        return Stmt("option", str(c[0]), (c[1],), **_pos(meta))

    def ring_stmt(self, meta, c):
        return Stmt("ring", str(c[0]), c[1], **_pos(meta))

    def module_stmt(self, meta, c):
        return Stmt("module", str(c[0]), (c[1],), **_pos(meta))

    def seq_stmt(self, meta, c):
        return Stmt("seq", str(c[0]), (str(c[1]), c[2]), **_pos(meta))

    def check_stmt(self, meta, c):
        exp = c[2][1] if c[2] is not None else None
        return Stmt("check", str(c[0]), tuple(c[1]), expect=exp, **_pos(meta))

    def cert_stmt(self, meta, c):
        prm = c[-1] if c[-1] is not None else ()
        return Stmt("cert", str(c[0]), tuple(c[1:-1]), params=prm, **_pos(meta))

    def bound_stmt(self, meta, c):
        target = () if c[1] is None else (str(c[1]),)
        prm = c[2] if c[2] is not None else ()
        exp = c[3][1] if c[3] is not None else None
        return Stmt("bound", str(c[0]), target, params=prm, expect=exp, **_pos(meta))

    def start(self, meta, c):
        return Script(list(c))


# --------------------------------------------------------------------------
# static checks

# argument kinds: r ring name, m module expression, i integer, * variadic modules
MODULE_FUNCS = {
    "residue": "r", "maxideal": "r", "free": "ri", "syz": "mi", "cosyz": "mi", "tr": "m",
    "dual": "m", "hom": "mm", "sum": "*", "random": "ri",
}
CHECKS = {
    "burch": "r", "decomposable": "r", "quasi_decomposable": "r", "hypersurface": "r",
    "syzygy_conditions": "r", "C1": "r", "C2": "r", "gorenstein": "r",
    "summand": "mm", "iso": "mm", "in_add": "mm", "free": "m", "dim": "m", "betti": "mi",
    "torsionfree": "mi", "ringdim": "r", "edim": "r", "loewy_length": "r",
    "high_syzygy_summands": "rm", "syzygy_splitting": "rm", "ideal_summands": "r",
    "max_ideal_in_second_syzygy": "r", "residue_periodicity": "r",
}
CERTS = {"residue": ("r", "rm"), "hom_transpose": ("mmi",)}
BOUNDS = ("dx", "udim", "named")
OPTIONS = ("prime", "seed", "maxsteps")


def _syntax_message(e: UnexpectedInput, text: str) -> ScriptError:
    if isinstance(e, UnexpectedToken):
        tok = e.token
        if tok.type == "$END":
            return ScriptError("syntax error: unexpected end of input (missing ';'?)", e.line, e.column)
        exp = sorted(_terminal_text(t) for t in e.expected)
        return ScriptError(f"syntax error: unexpected {str(tok)!r}; expected one of {', '.join(exp)}",
                           e.line, e.column)
    if isinstance(e, UnexpectedCharacters):
        return ScriptError(f"syntax error: unexpected character {text[e.pos_in_stream]!r}", e.line, e.column)
    if isinstance(e, UnexpectedEOF):
        lines = text.splitlines() or [""]
        return ScriptError("syntax error: unexpected end of input (missing ';'?)", len(lines), len(lines[-1]) + 1)
    return ScriptError(f"syntax error: {e}", getattr(e, "line", None), getattr(e, "column", None))


def _terminal_text(name: str) -> str:
    try:
        pat = _parser.get_terminal(name).pattern
        return repr(pat.value) if pat.type == "str" else name
    except KeyError:
        return name


def parse(text: str) -> Script:
    try:
        tree = _parser.parse(text)
    except UnexpectedInput as e:
        raise _syntax_message(e, text) from None
    try:
        script = _Build().transform(tree)
    except VisitError as e:
        raise ScriptError(str(e.orig_exc)) from None
    _check(script)
    return script


def _check(script: Script) -> None:
    kinds: dict[str, str] = {}
    prime = None

    def need(name, kind, where):
        got = kinds.get(name)
        if got is None:
            raise ScriptError(f"undeclared name {name!r}", where.line, where.column)
        if got != kind:
            raise ScriptError(f"{name!r} is a {got}, expected a {kind}", where.line, where.column)

    def arg(a, kind, where):
        if kind == "i":
            if not isinstance(a, int):
                raise ScriptError("expected an integer", where.line, where.column)
        elif kind == "r":
            if not isinstance(a, Ref):
                raise ScriptError("expected a ring name", where.line, where.column)
            need(a.name, "ring", a)
        else:
            expr(a, where)

    def args(items, sig, where, what):
        if sig == "*":
            if not items:
                raise ScriptError(f"{what} needs at least one module", where.line, where.column)
            for a in items:
                arg(a, "m", where)
            return
        if len(items) != len(sig):
            raise ScriptError(f"{what} takes {len(sig)} argument(s), got {len(items)}", where.line, where.column)
        for a, k in zip(items, sig):
            arg(a, k, a if isinstance(a, (Ref, Call, Coker)) else where)

    def expr(e, where):
        if isinstance(e, int):
            raise ScriptError("expected a module, got an integer", where.line, where.column)
        if isinstance(e, Ref):
            need(e.name, "module", e)
        elif isinstance(e, Coker):
            need(e.ring, "ring", e)
            widths = {len(r) for r in e.rows}
            if len(widths) != 1:
                raise ScriptError("matrix rows have different lengths", e.line, e.column)
        else:
            if e.fn not in MODULE_FUNCS:
                raise ScriptError(f"unknown module function {e.fn!r}", e.line, e.column)
            args(e.args, MODULE_FUNCS[e.fn], e, e.fn)

    for s in script.statements:
        if s.kind == "option":
            if s.name not in OPTIONS:
                raise ScriptError(f"unknown option {s.name!r}", s.line, s.column)
            v = s.body[0]
            if not isinstance(v, int):
                raise ScriptError(f"option {s.name} needs an integer", s.line, s.column)
            if s.name == "prime":
                if not la.is_prime(v) or v >= la.MAX_PRIME:
                    raise ScriptError(f"{v} is not a (word-sized) prime", s.line, s.column)
                if prime is not None and prime != v:
                    raise ScriptError("one prime per script", s.line, s.column)
                if any(k == "ring" for k in kinds.values()):
                    raise ScriptError("option prime must precede ring declarations", s.line, s.column)
                prime = v
            elif v < 0:
                raise ScriptError(f"option {s.name} must be nonnegative", s.line, s.column)
        elif s.kind in ("ring", "module", "seq"):
            if s.name in kinds:
                raise ScriptError(f"{s.name!r} is already declared", s.line, s.column)
            if s.kind == "ring" and s.body[0] == "fiber":
                for n in s.body[1:]:
                    need(n, "ring", s)
            if s.kind == "module":
                expr(s.body[0], s)
            if s.kind == "seq":
                need(s.body[0], "ring", s)
            kinds[s.name] = s.kind
        elif s.kind == "check":
            if s.name not in CHECKS:
                raise ScriptError(f"unknown check {s.name!r}", s.line, s.column)
            args(s.body, CHECKS[s.name], s, s.name)
        elif s.kind == "cert":
            if s.name not in CERTS:
                raise ScriptError(f"unknown certificate {s.name!r}", s.line, s.column)
            sigs = [g for g in CERTS[s.name] if len(g) == len(s.body)]
            if not sigs:
                raise ScriptError(f"cert {s.name} takes {' or '.join(str(len(g)) for g in CERTS[s.name])} "
                                  f"argument(s)", s.line, s.column)
            args(s.body, sigs[0], s, s.name)
        elif s.kind == "bound":
            if s.name not in BOUNDS:
                raise ScriptError(f"unknown bound {s.name!r}; use dx, udim or named", s.line, s.column)
            if s.name == "named":
                if not s.body or s.body[0] not in bd.NAMED:
                    raise ScriptError(f"bound named needs one of {', '.join(bd.NAMED)}", s.line, s.column)
            elif s.body:
                need(s.body[0], "ring", s)


# --------------------------------------------------------------------------
# evaluation


class RingValue:
    def __init__(self, name: str, presentation: pr.RingPresentation, seq_name: str = ""):
        self.name = name
        self.presentation = presentation
        self.seq_name = seq_name
        self._alg = None

    @property
    def algebra(self):
        if self._alg is None:
            self._alg = self.presentation.algebra()
        return self._alg


class _Failed:
    def __init__(self, name, error):
        self.name, self.error = name, error


@dataclass
class RunConfig:
    prime: int = la.DEFAULT_PRIME
    seed: int = 0
    maxsteps: int = 12
    jobs: int = 1
    timings: bool = False
    fixed: set = field(default_factory=set)  # set on the command line; script options do not override


def _fiber(A: RingValue, B: RingValue, p: int) -> pr.RingPresentation:
    """A x_k B presented as S/(I_A + I_B + (vars of A)(vars of B))."""
    PA, PB = A.presentation, B.presentation
    if PA.sequence or PB.sequence:
        raise ScriptError("fiber products are built from rings without a sequence")
    na, nb = PA.ideal.ring.names, PB.ideal.ring.names
    if set(na) & set(nb):
        raise ScriptError(f"fiber({A.name}, {B.name}): variable names must be disjoint")
    S = PolyRing(list(na) + list(nb), p)
    gens = [S.parse(str(g)) for g in PA.ideal.gens] + [S.parse(str(g)) for g in PB.ideal.gens]
    gens += [S.var(a) * S.var(b) for a in na for b in nb]
    return pr.RingPresentation(S.ideal(gens))


class _Env:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.vals: dict = {}

    def get(self, name):
        v = self.vals[name]
        if isinstance(v, _Failed):
            raise RuntimeError(f"{name} was not built: {v.error}")
        return v

    def ring(self, a) -> RingValue:
        return self.get(a.name if isinstance(a, Ref) else a)

    def steps(self, n: int) -> int:
        if n < 0:
            raise ValueError("negative index")
        if n > self.cfg.maxsteps:
            raise ValueError(f"index {n} exceeds maxsteps = {self.cfg.maxsteps}")
        return n

    def module(self, e) -> fd.FDModule:
        if isinstance(e, Ref):
            return self.get(e.name)
        if isinstance(e, Coker):
            R = self.ring(e.ring).algebra
            return fd.coker(R, [[R.element(f) for f in row] for row in e.rows])
        f, a = e.fn, e.args
        if f == "residue":
            return fd.residue(self.ring(a[0]).algebra)
        if f == "maxideal":
            return fd.maximal_ideal(self.ring(a[0]).algebra)
        if f == "free":
            return fd.free(self.ring(a[0]).algebra, a[1])
        if f == "random":
            return random_module(self.ring(a[0]).algebra, a[1])
        if f == "syz":
            return fd.syzygy(self.module(a[0]), self.steps(a[1]))
        if f == "cosyz":
            return fd.cosyzygy(self.module(a[0]), self.steps(a[1]))
        if f == "tr":
            return fd.transpose(self.module(a[0]))
        if f == "dual":
            return fd.dual(self.module(a[0]))
        if f == "hom":
            return fd.hom_module(self.module(a[0]), self.module(a[1]))
        if f == "sum":
            return fd.direct_sum(*[self.module(x) for x in a])
        raise ScriptError(f"unknown module function {f}")

    def declare(self, s: Stmt) -> None:
        p = self.cfg.prime
        if s.kind == "ring":
            if s.body[0] == "poly":
                _, names, gens = s.body
                S = PolyRing(list(names), p)
                self.vals[s.name] = RingValue(s.name, pr.RingPresentation(S.ideal(list(gens))))
            else:
                A, B = self.ring(s.body[1]), self.ring(s.body[2])
                self.vals[s.name] = RingValue(s.name, _fiber(A, B, p))
        elif s.kind == "seq":
            R = self.ring(s.body[0])
            P = R.presentation
            newP = pr.RingPresentation(P.ideal, list(P.sequence) + [P.ideal.ring.parse(t) for t in s.body[1]])
            self.vals[s.body[0]] = RingValue(R.name, newP, s.name)
            self.vals[s.name] = R.name
        elif s.kind == "module":
            self.vals[s.name] = self.module(s.body[0])


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, float):
        return None if x != x or x in (float("inf"), float("-inf")) else x
    return x


def _artinian_flags(P: pr.RingPresentation, seed: int) -> set:
    """Flags computed on an Artinian presentation with no sequence."""
    A = P.algebra()
    if A.dim == 1:
        return {"regular"}
    flags = set()
    sc = pr.syzygy_conditions(A, P, seed).witness
    flags |= {c for c in ("C1", "C2") if sc[c]}
    if pr.is_burch(P).verdict:
        flags.add("burch")
    if pr.is_hypersurface(P).verdict:
        flags.add("hypersurface")
    if pr.decomposable_maximal_ideal(A, seed).verdict:
        flags.add("quasi_decomposable")
    return flags


def _descriptor(env: _Env, s: Stmt) -> tuple[bd.RingDescriptor, bd.BoundGraph]:
    """Descriptor for a bound statement.

    With ``auto`` and a regular sequence, the chain of quotients down to the
    Artinian reduction is added to the graph, one regular-element link per
    sequence element.
    """
    params = dict(s.params)
    flags = {n for n, v in params.items() if v is None and n != "auto"}
    kw = {}
    chain = []
    name = s.body[0] if s.body else "R"
    if s.body:
        R = env.ring(s.body[0])
        P = R.presentation
        kw = dict(d=P.krull_dim, e=P.edim)
        if P.artinian:
            kw["t"] = len(P.sequence)
        if "auto" in params:
            if not P.artinian:
                raise ValueError("computed flags need an Artinian reduction")
            seed = env.cfg.seed
            if not P.sequence:
                flags |= _artinian_flags(P, seed)
            else:
                if pr.is_hypersurface(P).verdict:
                    flags.add("hypersurface")
                if pr.quasi_decomposable(P, seed).verdict:
                    flags.add("quasi_decomposable")
                t = len(P.sequence)
                for i in range(1, t + 1):
                    Pi = pr.RingPresentation(pr.RingPresentation(P.ideal, P.sequence[:i]).reduced)
                    fl = _artinian_flags(Pi, seed) if i == t else set()
                    d = bd.RingDescriptor(f"{name}/({', '.join(str(f) for f in P.sequence[:i])})",
                                          t=t - i, e=Pi.edim, d=Pi.krull_dim, flags=fl)
                    chain.append((d, pr.is_linear(P.sequence[i - 1])))
    for k in ("t", "e", "d"):
        if k in params and params[k] is not None:
            kw[k] = params[k]
    if "t" not in kw:
        raise ValueError("depth t is unknown: give t=... or a sequence reaching an Artinian ring")
    kw.setdefault("d", kw["t"])
    kw.setdefault("e", kw["d"])
    desc = bd.RingDescriptor(name, flags=flags, **kw)
    if params.get("dx") is not None:
        desc.dx, desc.dx_source = params["dx"], "script"
    desc.m, desc.l = params.get("m"), params.get("l")
    if "auto" in params:
        desc.assertions.append(f"computed flags: {sorted(flags)}")
    g = bd.BoundGraph([desc])
    prev = desc
    for d, linear in chain:
        g.add(d)
        d.assertions.append(f"computed flags: {sorted(d.flags)}")
        g.link(bd.Link("regular_quotient", prev.name, d.name, {"linear": linear}))
        prev = d
    return desc, g


def _check_cmd(env: _Env, s: Stmt) -> tuple:
    """(result, witness) for a check statement."""
    seed = env.cfg.seed
    k, a = s.name, s.body
    if k in ("burch", "hypersurface", "quasi_decomposable"):
        P = env.ring(a[0]).presentation
        fn = {"burch": pr.is_burch, "hypersurface": pr.is_hypersurface,
              "quasi_decomposable": lambda P: pr.quasi_decomposable(P, seed)}[k]
        r = fn(P)
        return r.verdict, {**r.witness, **({"notes": r.notes} if r.notes else {})}
    if k == "decomposable":
        r = pr.decomposable_maximal_ideal(env.ring(a[0]).algebra, seed)
        w = {x: r.witness[x] for x in ("dims", "factors") if x in r.witness}
        return r.verdict, w
    if k in ("syzygy_conditions", "C1", "C2"):
        R = env.ring(a[0])
        r = pr.syzygy_conditions(R.algebra, R.presentation, seed)
        if k == "syzygy_conditions":
            return r.verdict, {**r.witness, "notes": r.notes}
        return r.witness[k], {}
    if k == "gorenstein":
        from .algebra import type_r
        return type_r(env.ring(a[0]).algebra) == 1, {}
    if k in ("ringdim", "edim", "loewy_length"):
        from .algebra import edim, loewy_length
        A = env.ring(a[0]).algebra
        return {"ringdim": A.dim, "edim": edim(A), "loewy_length": loewy_length(A)}[k], {}
    if k in ("summand", "iso", "in_add"):
        X, Y = env.module(a[0]), env.module(a[1])
        if k == "summand":
            return bool(krs.is_summand(X, Y, seed)), {"dims": [X.dim, Y.dim]}
        if k == "iso":
            return bool(krs.is_isomorphic(X, Y, seed)), {"dims": [X.dim, Y.dim]}
        return krs.in_add(X, Y, seed), {"dims": [X.dim, Y.dim]}
    if k == "free":
        return fd.is_free(env.module(a[0])), {}
    if k == "dim":
        return env.module(a[0]).dim, {}
    if k == "betti":
        return fd.betti(env.module(a[0]), env.steps(a[1])), {}
    if k == "torsionfree":
        return pr.torsionfree_degree(env.module(a[0]), env.steps(a[1])), {}
    if k in ("high_syzygy_summands", "syzygy_splitting"):
        R = env.ring(a[0])
        fn = th.verify_high_syzygy_summands if k == "high_syzygy_summands" else th.verify_syzygy_splitting
        r = fn(R.algebra, env.module(a[1]), R.name, seed)
        return r.verdict, r.to_dict()["checks"]
    if k in ("ideal_summands", "max_ideal_in_second_syzygy"):
        R = env.ring(a[0])
        fn = th.verify_ideal_summands if k == "ideal_summands" else th.verify_max_ideal_in_second_syzygy
        r = fn(R.algebra, R.name, seed)
        return r.verdict, r.to_dict()["checks"]
    if k == "residue_periodicity":
        R = env.ring(a[0])
        r = th.verify_residue_periodicity(R.algebra, R.presentation, R.name, seed)
        return r.verdict, r.to_dict()["checks"]
    raise ScriptError(f"unknown check {k}")


def _cert_cmd(env: _Env, s: Stmt) -> tuple:
    seed = env.cfg.seed
    params = dict(s.params)
    if s.name == "residue":
        R = env.ring(s.body[0])
        A = R.algebra
        M = env.module(s.body[1]) if len(s.body) > 1 else fd.residue(A)
        variant = "C1" if "C1" in params else ("C2" if "C2" in params else "auto")
        c = th.build_cert_residue(A, M, variant, seed=seed)
    else:
        M, N = env.module(s.body[0]), env.module(s.body[1])
        c = th.build_cert_hom_transpose(M, N, s.body[2], params.get("extra") or 0, seed)
    v = th.verify_cert(c, seed=seed)
    return v.ok, {"claimed_weight": c.weight, "verified_weight": v.weight,
                  "failures": [list(f) for f in v.failures], "certificate": th.cert_summary(c)}


def _bound_cmd(env: _Env, s: Stmt) -> tuple:
    params = dict(s.params)
    if s.name == "named":
        d = bd.named_bounds(s.body[0], **{k: v for k, v in params.items() if v is not None})
    else:
        desc, graph = _descriptor(env, s)
        if s.name == "dx":
            d = bd.dx_bound(desc, graph)
        else:
            d = bd.udim_bound(desc, dx=params.get("n"), level=params.get("level"), gt=params.get("gt"),
                              graph=graph)
    if not bd.replay(d):
        raise AssertionError("bound transcript does not replay")
    out = d.to_dict()
    return out.pop("bound"), out


def _execute(env: _Env, s: Stmt) -> dict:
    rec = {"line": s.line, "command": s.text(), "kind": s.kind}
    t0 = time.perf_counter()
    try:
        fn = {"check": _check_cmd, "cert": _cert_cmd, "bound": _bound_cmd}[s.kind]
        result, witness = fn(env, s)
        rec["result"] = result
        if s.expect is not None:
            rec["expect"] = s.expect
            rec["passed"] = result == s.expect and type(result) is type(s.expect)
        elif s.kind == "cert" or isinstance(result, bool):
            rec["passed"] = result is True
        else:
            rec["passed"] = None  # informational
        rec["witness"] = witness
    except Exception as exc:  # surfaced per command; the batch goes on
        rec["result"] = None
        rec["passed"] = False
        rec["error"] = f"{type(exc).__name__}: {exc}"
    if env.cfg.timings:
        rec["seconds"] = round(time.perf_counter() - t0, 4)
    return _jsonable(rec)


def run(script: Script, cfg: RunConfig | None = None) -> dict:
    cfg = cfg or RunConfig()
    opts = script.options()
    for k in OPTIONS:
        if k in opts and k not in cfg.fixed:
            setattr(cfg, k, opts[k])
    env = _Env(cfg)
    records: list = [None] * len(script.statements)
    tasks = []
    for i, s in enumerate(script.statements):
        if s.kind == "option":
            continue
        if s.kind in ("ring", "module", "seq"):
            try:
                env.declare(s)
            except Exception as exc:
                env.vals[s.name] = _Failed(s.name, f"{type(exc).__name__}: {exc}")
                records[i] = {"line": s.line, "command": s.text(), "kind": s.kind, "result": None,
                              "passed": False, "error": f"{type(exc).__name__}: {exc}"}
            continue
        # commands see the declarations made so far
        snap = _Env(cfg)
        snap.vals = dict(env.vals)
        tasks.append((i, snap, s))
    if cfg.jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as ex:
            outs = list(ex.map(lambda t: _execute(t[1], t[2]), tasks))
    else:
        outs = [_execute(snap, s) for _, snap, s in tasks]
    for (i, _, _), rec in zip(tasks, outs):
        records[i] = rec
    records = [r for r in records if r is not None]
    bearing = [r for r in records if r["passed"] is not None]
    summary = {"commands": len(records), "verdicts": len(bearing),
               "passed": sum(1 for r in bearing if r["passed"]),
               "failed": sum(1 for r in bearing if not r["passed"]),
               "errors": sum(1 for r in records if "error" in r)}
    return {"schema": SCHEMA, "version": __version__,
            "options": {"prime": cfg.prime, "seed": cfg.seed, "maxsteps": cfg.maxsteps},
            "records": records, "summary": summary, "ok": summary["failed"] == 0}


def format_text(report: dict) -> str:
    lines = []
    for r in report["records"]:
        tag = {True: "PASS", False: "FAIL", None: "INFO"}[r["passed"]]
        res = r.get("error") or json.dumps(r["result"])
        lines.append(f"{tag} line {r['line']}: {r['command']} -> {res}")
    s = report["summary"]
    lines.append(f"{s['passed']}/{s['verdicts']} passed, {s['errors']} error(s)")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="syzlab", description="Run syzlab scripts.")
    ap.add_argument("script", help="script file (.syz) or - for stdin")
    ap.add_argument("--emit", choices=("json", "text"), default="text")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--prime", type=int)
    ap.add_argument("--maxsteps", type=int)
    ap.add_argument("--timings", action="store_true", help="add per-command seconds (reports stop being byte-stable)")
    ap.add_argument("--pretty", action="store_true", help="print the normalized script and exit")
    ns = ap.parse_args(argv)

    text = sys.stdin.read() if ns.script == "-" else open(ns.script, encoding="utf-8").read()
    try:
        script = parse(text)
    except ScriptError as e:
        print(f"{ns.script}:{e}", file=sys.stderr)
        return 2
    if ns.pretty:
        sys.stdout.write(script.pretty())
        return 0
    cfg = RunConfig(jobs=max(1, ns.jobs), timings=ns.timings)
    for k in OPTIONS:
        v = getattr(ns, k)
        if v is not None:
            if k == "prime" and (not la.is_prime(v) or v >= la.MAX_PRIME):
                print(f"--prime {v} is not prime", file=sys.stderr)
                return 2
            setattr(cfg, k, v)
            cfg.fixed.add(k)
    report = run(script, cfg)
    out = json.dumps(report, indent=1) + "\n" if ns.emit == "json" else format_text(report)
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0 if report["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
