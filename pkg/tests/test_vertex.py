from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bigcenter import vertex as va
from bigcenter.poly import Poly

SF = va.builtin_symplectic_fermions()
ALL = [va.builtin(name) for name in sorted(va.BUILTINS)]


def test_fermion_table():
    assert SF.ope_coeff("x", -2, "y") == {va.VACUUM: 1}
    assert SF.ope_coeff("y", -2, "x") == {va.VACUUM: -1}
    assert SF.ope_coeff("x", -1, "y") == {}
    assert SF.is_odd("x") and SF.is_odd("y")
    assert SF.l_min == -2


def test_doublet_parity_follows_pole():
    assert not va.builtin_doublet(1).is_odd("x")
    assert va.builtin_doublet(2).is_odd("x")
    assert not va.builtin_doublet(3).is_odd("y")
    with pytest.raises(ValueError):
        va.builtin_doublet(0)


def test_unknown_builtin():
    with pytest.raises(ValueError, match="unknown builtin"):
        va.builtin("virasoro")


def test_spec_validation():
    with pytest.raises(ValueError, match="singular range"):
        va.VASpec("bad", ("x", "y"), {}, (va.Block("standard", ("x", "y")),),
                  {("x", 0, "y"): {va.VACUUM: 1}}, -1)
    with pytest.raises(ValueError, match="block"):
        va.VASpec("bad", ("x", "y"), {}, (va.Block("trivial", ("x",)),), {}, -1)


def test_action_on_doublet():
    g = [[1, 2], [3, 4]]
    assert SF.act(g, {"x": 1}) == {"x": 1, "y": 3}
    assert SF.act(g, {"y": 1}) == {"x": 2, "y": 4}
    assert SF.act(g, {va.VACUUM: 5}) == {va.VACUUM: 5}
    assert SF.weight("x") == 1 and SF.weight("y") == -1
    assert SF.weight({"x": 1, "y": 1}) is None
    assert va.builtin_central_doublet().weight("h") == 0


@pytest.mark.parametrize("spec", ALL, ids=lambda s: s.name)
def test_symbolic_equivariance(spec):
    t, s, u = Poly.var("t"), Poly.var("s"), Poly.var("X")
    g = [[t, s], [u, (s * u + 1) * t ** -1]]
    assert va.check_equivariance(spec, g)


def test_equivariance_fails_off_sl2():
    assert not va.check_equivariance(SF, [[2, 0], [0, 1]])


def test_fermion_commutator_example():
    # x_{-1} y_{1}: m = 0, n = -2
    out = va.untwisted_commutator(SF, "x", 0, "y", -2)
    assert out == va.ModeExpr({(va.VACUUM, 0): -1})
    assert str(out) == "-id"


def test_boson_heisenberg_relations():
    sb = va.builtin("symplectic_bosons")
    for k in range(-4, 5):
        assert va.untwisted_commutator(sb, "x", k, "y", -k - 1) == va.ModeExpr({(va.VACUUM, 0): 1})
        assert not va.untwisted_commutator(sb, "x", k, "y", -k)


@given(st.sampled_from(ALL), st.integers(-5, 5), st.integers(-5, 5))
def test_super_antisymmetry(spec, m, n):
    for u in spec.generators:
        for v in spec.generators:
            lhs = va.untwisted_commutator(spec, u, m, v, n)
            rhs = va.untwisted_commutator(spec, v, n, u, m).scale(-va.super_sign(spec, u, v))
            assert lhs == rhs


def test_vacuum_is_absorbing():
    assert not va.untwisted_commutator(SF, va.VACUUM, 0, "x", 3)
    assert va.ModeExpr({(va.VACUUM, 2): 1}) == va.ModeExpr()


def test_central_doublet_output():
    cd = va.builtin_central_doublet()
    out = va.untwisted_commutator(cd, "x", 1, "y", 2)
    assert out == va.ModeExpr({("h", 4): 1})
    assert str(out) == "h_{-5}"


def test_mode_expr_arithmetic_and_display():
    e = va.ModeExpr({("x", 0): Fraction(3, 2), ("y", 1): -1})
    assert str(e) == "3/2 x_{-1} - y_{-2}"
    assert e - e == va.ModeExpr()
    assert e.restrict(lambda s, p: p > 0) == va.ModeExpr({("y", 1): -1})
    assert e.scale(2).terms[("x", 0)] == 3


def test_parse_vaspec_round_trip():
    data = {"generators": ["x", "y"], "parity": [1, 1],
            "blocks": [{"kind": "standard", "states": ["x", "y"]}],
            "ope": [{"u": "x", "l": -2, "v": "y", "out": {"1": "1"}},
                    {"u": "y", "l": -2, "v": "x", "out": {"1": "-1"}}]}
    spec = va.parse_vaspec(data)
    assert spec.l_min == -2
    for m in range(-3, 3):
        for n in range(-3, 3):
            assert va.untwisted_commutator(spec, "x", m, "y", n) == va.untwisted_commutator(SF, "x", m, "y", n)
