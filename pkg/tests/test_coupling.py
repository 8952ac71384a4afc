import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bigcenter import coupling as cp
from bigcenter import functionals as fn
from bigcenter import gauge, vertex as va
from bigcenter.poly import Poly, binom

SF = va.builtin_symplectic_fermions()
OTHERS = [va.builtin("symplectic_bosons"), va.builtin("doublet_pole3"), va.builtin_central_doublet()]


def test_delta_of_generators():
    A, B, C, D = (fn.G(s, 0) for s in "ABCD")
    assert cp.delta(SF, "x") == cp.CoupledElement({"x": D, "y": -C})
    assert cp.delta(SF, "y") == cp.CoupledElement({"x": -B, "y": A})
    assert str(cp.delta(SF, "y")) == "-B*_{-1}⊗x + A*_{-1}⊗y"


@given(st.fractions(-3, 3, max_denominator=3), st.fractions(-3, 3, max_denominator=3))
def test_delta_is_linear_and_injective(p, q):
    e = cp.delta(SF, {"x": p, "y": q})
    assert e == cp.delta(SF, "x").map(lambda f: f * p) + cp.delta(SF, "y").map(lambda f: f * q)
    assert (e == cp.CoupledElement()) == (p == 0 and q == 0)


@pytest.mark.parametrize("spec", [SF] + OTHERS, ids=lambda s: s.name)
def test_delta_images_are_invariant(spec):
    for v in spec.generators:
        assert cp.check_invariance(spec, cp.delta(spec, v))


def test_invariance_detects_failures():
    bare = cp.CoupledElement({"x": fn.G("A", 0)})
    failures = cp.invariance_failures(SF, bare)
    assert failures and "translate changes" in failures[0]
    assert cp.check_invariance(SF, cp.embedded_central("b", 2))
    assert not cp.check_invariance(SF, cp.vacuum_element(fn.G("B", 0)))


def test_g_action_recovery_composite():
    g1, g2 = [[1, 2], [0, 1]], [[Fraction(3), 0], [0, Fraction(1, 3)]]
    g = [[sum(g1[i][k] * g2[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    g = fn.mat_adj(fn.mat_adj(g))
    for v in ("x", "y", {"x": 1, "y": -2}):
        assert cp.g_action_recovery(SF, g, v)
    with pytest.raises(ValueError, match="determinant 1"):
        cp.g_action_recovery(SF, [[2, 0], [0, 1]], "x")


def test_a_bracket_needs_truncation():
    A = gauge.Connection.zero(4)
    with pytest.raises(cp.InsufficientTruncation) as info:
        cp.a_bracket_coeffs(A, 4, 4)
    assert info.value.required == 5
    with pytest.raises(cp.InsufficientTruncation):
        cp.a_bracket_recursive(A, 5, 4)


def test_recursion_matches_fibre_route():
    rng = random.Random(2)
    N = 8
    A = gauge.random_connection(rng, 2, N)
    for s in range(4):
        direct = cp.a_bracket_coeffs(A, s, N).series
        rec = cp.a_bracket_recursive(A, s, N).series
        assert direct == rec.truncate(N - s)


@pytest.mark.parametrize("m", range(-3, 4))
@pytest.mark.parametrize("n", range(-3, 4))
def test_formula_at_zero_connection_is_untwisted(m, n):
    A = gauge.Connection.zero(6)
    for a in SF.generators:
        for b in SF.generators:
            tw = cp.twisted_commutator_formula(SF, a, m, b, n, A, 6)
            assert tw.terms == va.untwisted_commutator(SF, a, m, b, n).terms


@pytest.mark.parametrize("spec", OTHERS, ids=lambda s: s.name)
def test_formula_matches_oracle(spec):
    rng = random.Random(11)
    N = 9
    A = gauge.random_connection(rng, 2, N)
    for a in spec.generators:
        for b in spec.generators:
            for m in range(-2, 3):
                for n in range(-2, 3):
                    f, o, diff = cp.compare_twisted(spec, a, m, b, n, A, N)
                    assert not diff, (a, m, b, n, str(f), str(o))


def _formula_without_s_shift(spec, a, m, b, n, A, N):
    out = cp.TwistedModeExpr()
    for l in range(spec.l_min, 0):
        for s in range(-l):
            c = binom(-m - 1, -l - 1 - s)
            for k in range(N - 1 - s):
                mat = cp.a_bracket_coeffs(A, s, N).coefficient(k)
                w = spec.ope_lin(spec.act(mat, {a: 1}, trivial=int(s == k == 0)), l, {b: 1})
                out = out + cp.TwistedModeExpr.mode(w, m + n - l - k, c)
    return out


def test_output_mode_needs_the_s_shift():
    A = gauge.Connection.from_coefficients([[[1, 0], [0, -1]]] + [[[0, 0], [0, 0]]] * 7, 8)
    f, o, diff = cp.compare_twisted(SF, "x", -1, "y", -1, A, 8)
    assert not diff
    floor = cp.comparison_floor(SF, -1, -1, 8)
    literal = _formula_without_s_shift(SF, "x", -1, "y", -1, A, 8)
    assert literal.restrict(lambda s, p: p >= floor) != o


def test_comparison_floor_guard():
    A = gauge.Connection.zero(6)
    with pytest.raises(cp.InsufficientTruncation):
        cp.twisted_commutator_formula(SF, "x", 0, "y", 0, A, 6, p_min=-10)


def test_fibre_of_delta_is_the_state():
    rng = random.Random(5)
    A = gauge.random_connection(rng, 2, 6)
    assert cp.fibre_evaluate(SF, cp.delta(SF, {"x": 2, "y": -1}), A) == {"x": 2, "y": -1}


def test_fibre_of_embedded_functional_reads_connection():
    rng = random.Random(6)
    N = 6
    A = gauge.random_connection(rng, 3, N)
    for k in range(3):
        coeffs = A.A.coefficient(k)
        for sym, (i, j) in (("a", (0, 0)), ("b", (0, 1)), ("c", (1, 0)), ("d", (1, 1))):
            val = cp.fibre_evaluate(SF, cp.embedded_central(sym, k), A)
            assert val.get(va.VACUUM, 0) == coeffs[i][j]


def test_fibre_rejects_noninvariant():
    A = gauge.Connection.zero(4)
    bare = cp.CoupledElement({"x": fn.G("A", 1)})
    with pytest.raises(ValueError, match="not G-invariant"):
        cp.fibre_evaluate(SF, bare, A)
    assert cp.fibre_evaluate(SF, bare, A, allow_noninvariant=True) == {}


def test_fibre_is_right_translation_equivariant():
    rng = random.Random(8)
    N = 5
    A = gauge.random_connection(rng, 2, N)
    F = gauge.solve_connection(A, [[1, 0], [0, 1]], N)
    g = [[Fraction(2), Fraction(1)], [Fraction(3), Fraction(2)]]
    Fg = F * gauge.MatrixSeries.constant(g, N)
    e = cp.delta(SF, "x")
    moved = SF.act(g, cp.evaluate_element(e, Fg))
    assert moved == cp.evaluate_element(e, F)


def test_coupled_ope_fermions():
    xy = cp.coupled_ope(SF, "x", "y")
    assert xy.poles[-2] == cp.vacuum_element(fn.det_coefficient(0))
    assert xy.poles[-1] == cp.vacuum_element(-fn.embed_g_in_G("d", 0))
    yx = cp.coupled_ope(SF, "y", "x")
    assert yx.poles[-2] == cp.vacuum_element(-fn.det_coefficient(0))


def test_coupled_ope_central_doublet_keeps_h_leg():
    cd = va.builtin_central_doublet()
    xy = cp.coupled_ope(cd, "x", "y")
    assert set(xy.poles) == {-1}
    assert xy.poles[-1] == cp.CoupledElement({"h": fn.det_coefficient(0)})


def test_symbolic_connection_shape():
    M = cp.symbolic_connection(3)
    assert M.coefficient(1)[1][1] == -fn.g("a", 1)
    assert M.coefficient(2)[1][0] == fn.g("c", 2)


def test_product_expansion_via_taylor_reexpansion():
    # D*(z) C*(w) = sum_j (z-w)^j (T^j D*/j!)(w) C*(w); the w^2 coefficient at j = 0
    # is D*_{-1}C*_{-3} + D*_{-2}C*_{-2} + D*_{-3}C*_{-1}
    from bigcenter.series import TruncSeries, taylor_reexpand
    N = 5
    Dz = TruncSeries([fn.G("D", k) for k in range(N)])
    Cw = TruncSeries([fn.G("C", k) for k in range(N)])
    pieces = taylor_reexpand(Dz)
    j0 = (pieces[0] * Cw.truncate(pieces[0].order))[2]
    assert j0 == sum((fn.G("D", i) * fn.G("C", 2 - i) for i in range(3)), Poly())
    assert j0 != fn.G("D", 2) * fn.G("C", 0) * 2 + fn.G("D", 1) * fn.G("C", 1)
    j1 = (pieces[1] * Cw.truncate(pieces[1].order))[1]
    assert j1 == fn.G("D", 2) * fn.G("C", 0) * 2 + fn.G("D", 1) * fn.G("C", 1)
    # each piece is Y(T^j D*_{-1} / j!, w)
    phi = fn.G("D", 0)
    for j in range(3):
        Y = fn.vertex_op(phi * Fraction(1, math.factorial(j)), N - j)
        assert all(Y[k] == pieces[j][k] for k in range(N - j))
        phi = fn.derivation_T(phi)
