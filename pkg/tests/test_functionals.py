import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bigcenter import functionals as fn
from bigcenter.poly import LAM, MU, X, Poly, parse_poly

BASIS = {"e": [[0, 1], [0, 0]], "f": [[0, 0], [1, 0]], "h": [[1, 0], [0, -1]]}


def test_embedding_display():
    assert str(fn.embed_g_in_G("a", 0)) == "-A*_{-2}D*_{-1} + B*_{-2}C*_{-1}"
    assert fn.embed_g_in_G("b", 0) == parse_poly("A*_{-2}B*_{-1} - B*_{-2}A*_{-1}")
    assert fn.embed_g_in_G("c", 0) == parse_poly("-C*_{-2}D*_{-1} + D*_{-2}C*_{-1}")
    assert fn.embed_g_in_G("d", 0) == parse_poly("C*_{-2}B*_{-1} - D*_{-2}A*_{-1}")


def test_embedding_is_quadratic_and_mode_shifted():
    # the image of x*_{-n-1} only involves modes up to -n-2
    for n in range(4):
        p = fn.embed_g_in_G("b", n)
        assert p.degree() == 2
        assert max(gg.mode for gg in p.generators()) == n + 1


def test_trace_of_embedding_is_log_derivative_of_det():
    # a + d images sum to -(det)' which vanishes on SL_2
    for n in range(4):
        s = fn.embed_g_in_G("a", n) + fn.embed_g_in_G("d", n)
        assert s == -fn.det_coefficient(n + 1) * (n + 1)
        assert fn.equal_mod_det(s, 0)


def test_right_translate_unipotent():
    u = [[1, 1], [0, 1]]
    M = fn.mode_matrix(2)
    assert fn.right_translate(u, M[0][1]) == M[0][0] + M[0][1]
    assert fn.right_translate(u, M[1][0]) == M[1][0]
    assert fn.right_translate(u, fn.embed_g_in_G("a", 0)) == fn.embed_g_in_G("a", 0)


def test_left_translate_moves_embedding_by_conjugation():
    h = [[2, 0], [0, Fraction(1, 2)]]
    # F -> hF sends -dF adj F to h(-dF adj F)h^-1, so b* scales by 4
    moved = fn.left_translate(h, fn.embed_g_in_G("b", 1))
    assert fn.equal_mod_det(moved, fn.embed_g_in_G("b", 1) * 4)


@pytest.mark.parametrize("name", ["upper", "lower", "diagonal"])
def test_embedding_is_right_invariant(name):
    h = fn.one_parameter_subgroups()[name]
    for sym in "abcd":
        e = fn.embed_g_in_G(sym, 1)
        assert fn.equal_mod_det(fn.right_translate(h, e), e)


def test_T_on_generators():
    assert fn.derivation_T(fn.g("a", 0)) == fn.g("a", 1)
    assert fn.derivation_T(fn.g("a", 2)) == fn.g("a", 3) * 3
    p = fn.g("b", 0) * fn.g("c", 1)
    assert fn.derivation_T(p) == fn.g("b", 1) * fn.g("c", 1) + fn.g("b", 0) * fn.g("c", 2) * 2
    assert fn.derivation_T(LAM) == 0


def test_vertex_op_of_generator():
    Y = fn.vertex_op(fn.g("c", 1), 4)
    assert Y == fn.vertex_op_mode("c", 1, 4)
    assert Y[2] == fn.g("c", 3) * 3


def test_vertex_op_intertwines_embedding():
    N = 5
    lhs = fn.vertex_op(fn.embed_g_in_G("c", 1), N)
    rhs = fn.vertex_op_mode("c", 1, N).map(fn.embed_poly)
    assert all(fn.equal_mod_det(lhs[k], rhs[k]) for k in range(N))


def test_bracket_of_generators():
    c, b, a = fn.g("c", 0), fn.g("b", 0), fn.g("a", 0)
    assert fn.poisson_bracket(c, b) == a * 2 + LAM
    assert fn.poisson_bracket(a, c) == c
    assert fn.poisson_bracket(a, b) == -b
    assert fn.poisson_bracket(a, a) == LAM * Fraction(1, 2)


def test_bracket_sesquilinearity():
    a, b = fn.g("a", 0), fn.g("b", 0)
    assert fn.poisson_bracket(fn.derivation_T(a), b) == -LAM * fn.poisson_bracket(a, b)
    rhs = fn.poisson_bracket(a, b)
    assert fn.poisson_bracket(a, fn.derivation_T(b)) == LAM * rhs + fn.derivation_T(rhs)


def test_bracket_rejects_group_functionals():
    with pytest.raises(ValueError, match="not in O"):
        fn.poisson_bracket(fn.G("A", 0), fn.g("a", 0))


_gens = st.tuples(st.sampled_from("abc"), st.integers(0, 2))


def _mono(pairs):
    out = Poly.const(1)
    for s, n in pairs:
        out = out * fn.g(s, n)
    return out


@given(st.lists(_gens, min_size=1, max_size=2), st.lists(_gens, min_size=1, max_size=2))
@settings(max_examples=30, deadline=None)
def test_skew_symmetry(p, q):
    P, Q = _mono(p), _mono(q)
    lhs = fn.poisson_bracket(Q, P)
    rhs = -fn.apply_T_polynomial(fn.lambda_coefficients(fn.poisson_bracket(P, Q)), -LAM, LAM)
    assert lhs == rhs


@given(_gens, _gens, st.lists(_gens, min_size=1, max_size=2))
@settings(max_examples=25, deadline=None)
def test_jacobi(x, y, z):
    P, Q, R = fn.g(*x), fn.g(*y), _mono(z)
    lhs = (fn.poisson_bracket(P, fn.poisson_bracket(Q, R, MU), LAM)
           - fn.poisson_bracket(Q, fn.poisson_bracket(P, R, LAM), MU))
    inner = fn.poisson_bracket(P, Q, LAM)
    outer = fn.poisson_bracket(inner, R, X)
    rhs = fn.substitute_spectral(outer, X, LAM + MU)
    assert lhs == rhs


@pytest.mark.parametrize("an", BASIS)
@pytest.mark.parametrize("bn", BASIS)
def test_module_act_matches_adjoint(an, bn):
    a, b = BASIS[an], BASIS[bn]
    for n in range(2):
        lhs = fn.poisson_module_act(a, fn.embed_poly(fn.trace_functional(b, n)))
        rhs = fn.embed_poly(fn.trace_functional(fn.bracket_matrix(a, b), n))
        assert lhs == rhs


def test_canonical_functional_only_equal_mod_det():
    a, b = BASIS["h"], BASIS["e"]
    lhs = fn.poisson_module_act(a, fn.embed_poly(fn.functional_of(b, 1)))
    rhs = fn.embed_poly(fn.functional_of(fn.bracket_matrix(a, b), 1))
    assert fn.equal_mod_det(lhs, rhs)


def test_equal_mod_det_exact_and_reduced():
    cert = fn.equal_mod_det(fn.G("A", 1), fn.G("A", 1))
    assert cert and cert.method == "exact"
    cert = fn.equal_mod_det(fn.det_coefficient(0), 1)
    assert cert and cert.method == "evaluation" and len(cert.transcript) == 20


def test_equal_mod_det_witness():
    cert = fn.equal_mod_det(fn.G("A", 0), fn.G("D", 0), seed=3)
    assert not cert
    w = cert.witness
    assert w["lhs"] != w["rhs"]
    assert w["lhs"] == w["point"]["A*_{-1}"]


def test_random_points_lie_on_sl2():
    rng = random.Random(4)
    for _ in range(5):
        F = fn.random_sl2_point(5, rng)
        assert fn.evaluate_at(fn.det_coefficient(0), F) == 1
        assert all(fn.evaluate_at(fn.det_coefficient(k), F) == 0 for k in range(1, 5))


def test_normalize_og_and_ring_tag():
    p = fn.g("d", 2) + fn.g("a", 2)
    assert fn.normalize_og(p) == 0
    assert fn.ring_tag(fn.g("b", 0)) == "O_g"
    assert fn.ring_tag(fn.G("B", 0)) == "O_G"
    assert fn.ring_tag(fn.G("B", 0) * fn.g("b", 0)) == "mixed"


def test_symbolic_subgroups_are_sl2():
    for h in fn.one_parameter_subgroups().values():
        assert fn.is_sl2(h)
