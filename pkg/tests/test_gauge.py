import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bigcenter.gauge import (Connection, MatrixSeries, NotInvertibleError, automorphism_space,
                             connection_of, gauge_act, matrix_inverse, random_connection,
                             solve_connection)
from bigcenter.poly import T, Poly
from bigcenter.series import TruncSeries

ID = [[1, 0], [0, 1]]


def _random_sl2_series(rng, N):
    # upper and lower unipotent factors with series entries, times a constant SL_2 matrix
    u = TruncSeries([Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(N)])
    l = TruncSeries([Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(N)])
    one, zero = TruncSeries.constant(1, N), TruncSeries.zero(N)
    U = MatrixSeries([[one, u], [zero, one]])
    L = MatrixSeries([[one, zero], [l, one]])
    return U * L


@pytest.mark.parametrize("seed", range(5))
def test_round_trip(seed):
    rng = random.Random(seed)
    N = 9
    A = random_connection(rng, 3, N)
    F = solve_connection(A, ID, N)
    assert F.coefficient(0) == [[1, 0], [0, 1]]
    assert connection_of(F).A.truncate(N - 2) == A.A.truncate(N - 2)
    assert F.det() == TruncSeries.constant(1, N)


def test_diagonal_constant_solution_is_exponential():
    N = 7
    A = Connection.from_coefficients([[[2, 0], [0, -2]]] + [[[0, 0], [0, 0]]] * (N - 1), N)
    F = solve_connection(A, ID, N)
    rate = TruncSeries([0, -2] + [0] * (N - 2))
    assert F[0, 0] == rate.exp()
    assert F[1, 1] == (-rate).exp()


@pytest.mark.parametrize("seed", range(3))
def test_gauge_action_composes(seed):
    rng = random.Random(seed)
    N = 8
    A = random_connection(rng, 2, N)
    F, G = _random_sl2_series(rng, N), _random_sl2_series(rng, N)
    lhs = gauge_act(G, gauge_act(F, A))
    rhs = gauge_act(G * F, A)
    assert lhs.A.truncate(N - 2) == rhs.A.truncate(N - 2)


def test_solution_trivializes_connection():
    rng = random.Random(9)
    N = 8
    A = random_connection(rng, 3, N)
    F = solve_connection(A, ID, N)
    B = gauge_act(matrix_inverse(F), A)
    assert all(not x for k in range(B.order) for r in B.A.coefficient(k) for x in r)


def test_not_invertible():
    N = 3
    F = MatrixSeries.from_coefficients([[[0, 0], [0, 1]], [[1, 0], [0, 0]], [[0, 0], [0, 0]]], N)
    with pytest.raises(NotInvertibleError, match="not invertible at z=0"):
        matrix_inverse(F)


def test_traceless_required():
    with pytest.raises(ValueError, match="not traceless"):
        Connection.from_coefficients([[[1, 0], [0, 1]]], 1)


def test_singular_connection_rejected_by_solver():
    A = Connection.from_coefficients([[[0, 0], [0, 0]]] * 3, 3, singular=[[[1, 0], [0, -1]]])
    with pytest.raises(ValueError, match="regular"):
        solve_connection(A, ID, 3)


def test_solver_needs_enough_coefficients():
    A = Connection.zero(3)
    with pytest.raises(ValueError, match="need >= 5"):
        solve_connection(A, ID, 6)


def test_aut_of_zero_is_constants():
    fam = automorphism_space(Connection.zero(5), 5)
    F = fam.member([2, 1, 3, 2])
    assert F.coefficient(0) == [[2, 1], [3, 2]]
    assert all(F.coefficient(k) == [[0, 0], [0, 0]] for k in range(1, 5))
    with pytest.raises(ValueError):
        fam.member([1, 1, 1, 1])


def test_aut_diagonal_family_symbolic_t():
    N = 6
    diag = MatrixSeries.from_coefficients([[[T, 0], [0, T ** -1]]] + [[[0, 0], [0, 0]]] * (N - 1), N)
    fam = automorphism_space(diag, N)
    B = Poly.var(fam.parameters[1])
    # z^2 coefficient of B exp(-(t - 1/t) z)
    assert fam.F[0, 1][2] == B * (T - T ** -1) ** 2 * Fraction(1, 2)
    assert fam.F[0, 0][1] == 0


@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=3), min_size=3, max_size=3))
@settings(max_examples=25)
def test_aut_members_fix_the_connection(vals):
    a, b, c = vals
    N = 6
    A = Connection.from_coefficients([[[a, b], [c, -a]], [[b, 0], [a, -b]]] + [[[0, 0], [0, 0]]] * (N - 2), N)
    fam = automorphism_space(A, N)
    F = fam.member([1, 2, 0, 1])
    assert gauge_act(F, A).A.truncate(N - 1) == A.A.truncate(N - 1)
