import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from syzlab import bounds as bd
from syzlab import fixtures
from syzlab import predicates as pd
from syzlab.algebra import edim

D = bd.RingDescriptor


# --- local rules ---

def test_first_condition_depth_zero():
    assert bd.dx_bound(D("R", flags={"C1"})).value == 2


@pytest.mark.parametrize("flag", ["C2", "burch"])
def test_second_condition_depth_zero(flag):
    d = bd.dx_bound(D("R", flags={flag}))
    assert d.value == 3
    assert d.steps[-1].rule == "syzygy_condition_C2"


def test_quasi_decomposable_acts_like_first_condition():
    assert bd.dx_bound(D("R", flags={"quasi_decomposable"})).value == 2


@pytest.mark.parametrize("t,e", [(1, 2), (2, 3), (1, 4)])
def test_positive_depth_uses_power_of_two(t, e):
    s = 2 ** e
    assert bd.dx_bound(D("R", t=t, e=e, d=t, flags={"C1"})).value == s * (2 * t + 3) - 1
    assert bd.dx_bound(D("R", t=t, e=e, d=t, flags={"C2"})).value == s * (2 * t + 4) - 1


def test_no_flags_is_unbounded():
    d = bd.dx_bound(D("R", e=2))
    assert d.value == math.inf and d.steps == []
    assert d.to_dict()["bound"] is None


def test_regular_is_minus_one():
    d = bd.dx_bound(D("R", t=2, e=2, d=2, flags={"regular"}))
    assert d.value == -1


def test_known_value_taken_when_smaller():
    assert bd.dx_bound(D("R", flags={"C2"}, dx=1)).value == 1
    assert bd.dx_bound(D("R", flags={"C1"}, dx=10)).value == 2


# --- descriptor validation ---

def test_flag_implications_recorded():
    r = D("R", t=1, e=1, d=1, flags={"regular"})
    added = r.validate()
    assert {"hypersurface", "burch"} <= r.flags
    assert "regular => burch" in added


@pytest.mark.parametrize("kw", [dict(t=2, d=1, e=3), dict(t=0, d=3, e=2),
                                dict(flags={"regular"}, e=2, d=1, t=1),
                                dict(flags={"hypersurface"}, e=3, d=1, t=1),
                                dict(flags={"smooth"})])
def test_inconsistent_descriptor(kw):
    with pytest.raises(bd.BoundError):
        bd.dx_bound(D("R", **kw))


def test_link_errors():
    g = bd.BoundGraph([D("A"), D("B")])
    with pytest.raises(bd.BoundError):
        g.link(bd.Link("power_series", "A", "B"))
    with pytest.raises(bd.BoundError):
        g.link(bd.Link("glue", "A", "B"))
    with pytest.raises(bd.BoundError):
        g.link(bd.Link("completion", "A", "C"))


# --- propagation along links ---

def test_parameter_change_chain():
    d = bd.named_bounds("staircase")
    assert d.value == 7
    assert [s.value for s in d.steps] == [3, 7]
    assert bd.replay(d)


def test_regular_element_lift():
    g = bd.BoundGraph([D("R", t=1, e=2, d=1), D("R/x", t=0, e=2, d=0, flags={"C1"})],
                      [bd.Link("regular_quotient", "R", "R/x")])
    assert g.derivation("R").value == 2 * 2 + 1
    # descent needs x outside m^2
    assert g.derivation("R/x").value == 2


def test_linear_descent():
    g = bd.BoundGraph([D("R", t=1, e=2, d=1, flags={"C1"}), D("R/x", t=0, e=1, d=0)],
                      [bd.Link("regular_quotient", "R", "R/x", {"linear": True})])
    assert g.derivation("R/x").value == g.derivation("R").value


@pytest.mark.parametrize("m,dx", [(1, 2), (3, 2), (2, 3)])
def test_power_series_extension(m, dx):
    g = bd.BoundGraph([D("R", dx=dx), D("S", t=m, e=m, d=m)],
                      [bd.Link("power_series", "R", "S", {"m": m})])
    assert g.derivation("S").value == 2 ** m * (dx + 1) - 1


@pytest.mark.parametrize("e,dx", [(1, 2), (2, 3), (4, 7)])
def test_completion_both_ways(e, dx):
    g = bd.BoundGraph([D("R", e=e, dx=dx), D("Rhat", e=e)], [bd.Link("completion", "R", "Rhat")])
    assert g.derivation("Rhat").value == 2 ** e * (dx + 1) - 1
    g = bd.BoundGraph([D("R", e=e), D("Rhat", e=e, dx=dx)], [bd.Link("completion", "R", "Rhat")])
    assert g.derivation("R").value == 2 ** e * (dx + 1) - 1


def test_flat_fiber_rule():
    g = bd.BoundGraph([D("F", flags={"C2"}), D("S", t=2, e=4, d=2)], [bd.Link("flat_fiber", "F", "S", {"d": 2})])
    assert g.derivation("S").value == 4 * (3 + 1) - 1


# --- worked families ---

def test_semigroup_constant():
    d = bd.named_bounds("semigroup")
    assert d.value == 3 * 2 ** 17 - 1 == 393215
    assert bd.replay(d)


@pytest.mark.parametrize("h,u", [(1, 1), (2, 2), (3, 3), (4, 2), (5, 3)])
def test_determinantal_chain(h, u):
    d = bd.named_bounds("determinantal", h=h, u=u)
    a = 2 ** (2 * u + 1) * (u + 3) - 1
    b = 2 ** (4 * u + 1) * (u + 3) - 1
    assert [s.value for s in d.steps] == [a, b, d.value]
    assert d.value == 2 ** (h + 4 * u + 1) * (u + 3) - 1
    assert bd.replay(d)


def test_determinantal_rejects_bad_parameters():
    with pytest.raises(bd.BoundError):
        bd.named_bounds("determinantal", h=1, u=3)


@pytest.mark.parametrize("d,h,m", [(0, 1, 1), (1, 1, 1), (2, 1, 2), (2, 3, 1), (3, 2, 2)])
def test_product_ideal_forms(d, h, m):
    assert bd.named_bounds("product_ideal", d=d, h=h, m=m).value == 5 * 2 ** (2 * d + h + m) - 1
    ext = bd.named_bounds("product_ideal_extended", d=d, h=h, m=m)
    assert ext.value == 5 * 2 ** (2 * d + h + m + 1) - 1
    assert bd.replay(ext)


def test_product_ideal_needs_positive_m():
    with pytest.raises(bd.BoundError):
        bd.named_bounds("product_ideal", d=2, h=1, m=0)
    # with the extra variable m = 0 is allowed
    assert bd.named_bounds("product_ideal_extended", d=1, h=1, m=0).value == 5 * 2 ** 4 - 1


@pytest.mark.parametrize("d", [0, 1, 2, 3, 5])
def test_two_generated(d):
    assert bd.named_bounds("two_generated", d=d).value == 5 * 2 ** (2 * d + 3) - 1


def test_two_generated_worked_value():
    assert bd.named_bounds("two_generated", d=2).value == 639


def test_unknown_family():
    with pytest.raises(bd.BoundError):
        bd.named_bounds("torus")
    assert set(bd.NAMED) >= {"semigroup", "staircase"}


# --- ultimate dimension ---

def test_udim_from_dx():
    d = bd.udim_bound(D("R"), m=3, l=3, dx=2)
    assert d.value == 3 * 4 * 3 - 1 == 35
    assert d.steps[-1].rule == "udim_from_dx"


def test_udim_first_condition():
    d = bd.udim_bound(D("R", flags={"C1"}), m=2, l=2)
    assert d.value == 3 * 3 * 2 - 1 == 17


@pytest.mark.parametrize("t,e,m,l", [(0, 2, 2, 2), (1, 2, 3, 2), (2, 3, 2, 4)])
def test_udim_condition_formulas(t, e, m, l):
    s = 1 if t == 0 else 2 ** e
    r = D("R", t=t, e=e, d=t, flags={"C1"})
    assert bd.udim_bound(r, m=m, l=l, dx=10 ** 6).value == s * (2 * t + 3) * (m - t + 1) * l - 1
    r = D("R", t=t, e=e, d=t, flags={"C2"})
    assert bd.udim_bound(r, m=m, l=l, dx=10 ** 6).value == s * (2 * t + 4) * (m - t + 1) * l - 1


def test_udim_level_form():
    d = bd.udim_bound(D("R"), m=5, l=5, dx=1, level=0, gt=1)
    assert d.value == 2 * 1 * 2 - 1
    assert d.steps[-1].rule == "udim_level_gt"


@pytest.mark.parametrize("dd,l", [(1, 2), (2, 3), (4, 1)])
def test_hypersurface_reference_line(dd, l):
    r = D("R", t=dd, e=dd + 1, d=dd, flags={"hypersurface"})
    d = bd.udim_bound(r, m=dd, l=l)
    assert d.references[0].value == 2 * (dd + 2) * l - 1
    # the reference is reported, not used
    assert all(s.rule != "hypersurface_reference" for s in d.steps)
    assert "isolated singularity" in d.assertions


def test_udim_errors():
    with pytest.raises(bd.BoundError):
        bd.udim_bound(D("R", flags={"C1"}), m=2)
    with pytest.raises(bd.BoundError):
        bd.udim_bound(D("R", t=2, e=2, d=2, flags={"C1"}), m=1, l=2)


def test_udim_uses_descriptor_data():
    assert bd.udim_bound(D("R", flags={"C1"}, m=2, l=2)).value == 17


def test_udim_without_inputs_unbounded():
    assert bd.udim_bound(D("R"), m=1, l=1).value == math.inf


# --- properties ---

flag_sets = st.sets(st.sampled_from(["C1", "C2", "burch", "quasi_decomposable"]))


@given(flag_sets, st.sampled_from(["C1", "C2", "burch", "quasi_decomposable"]),
       st.integers(0, 3), st.integers(0, 3))
def test_dropping_a_flag_never_lowers_the_bound(flags, drop, t, extra):
    e = t + extra
    full = bd.dx_bound(D("R", t=t, e=e, d=t, flags=set(flags))).value
    weak = bd.dx_bound(D("R", t=t, e=e, d=t, flags=set(flags) - {drop})).value
    assert weak >= full


@given(flag_sets, st.integers(1, 3), st.integers(0, 4))
def test_replay_and_fixed_point(flags, m, dx):
    g = bd.BoundGraph([D("R", flags=set(flags)), D("S", t=m, e=m, d=m, dx=2 ** m * (dx + 1) + 5),
                       D("T", t=0, e=1, d=0)],
                      [bd.Link("power_series", "R", "S", {"m": m}), bd.Link("completion", "T", "R")])
    val, _ = g.close()
    assert not g.improvable(val)
    for name in g.rings:
        d = g.derivation(name)
        if d.value != math.inf:
            assert bd.replay(d)


def test_replay_catches_tampering():
    d = bd.named_bounds("semigroup")
    d.steps[1].value += 1
    assert not bd.replay(d)
    d = bd.named_bounds("staircase")
    d.value = 6
    assert not bd.replay(d)


def test_transcript_cites_rules():
    d = bd.named_bounds("staircase").to_dict()
    assert d["quantity"] == "dx" and d["bound"] == 7
    assert all(s["statement"] == bd.RULES[s["rule"]][0] for s in d["steps"])


# --- computed flags feed the engine ---

@pytest.mark.parametrize("name,expected", [("x3_x2y_y2", 2), ("x2", 2), ("x3", 3), ("m3_xy", 3)])
def test_computed_flags(name, expected):
    R = fixtures.ring(name)
    w = pd.syzygy_conditions(R, fixtures.presentation(name)).witness
    flags = {f for f in ("C1", "C2") if w[f]}
    assert bd.dx_bound(D(name, flags=flags, e=edim(R))).value == expected
