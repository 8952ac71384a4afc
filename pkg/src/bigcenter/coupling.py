"""The coupled algebra ``(O(G[[z]]) (x) V)^G``: the delta map, fibres over
connections, the ``(d+A)``-twisted commutator formula and its brute-force oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable, Mapping

from .functionals import (G, derivation_T, embed_g_in_G, equal_mod_det, evaluate_at,
                          left_translate, one_parameter_subgroups, right_translate,
                          vertex_op)
from .gauge import Connection, MatrixSeries, matrix_inverse, solve_connection
from .poly import ONE, ZERO, Poly, binom
from .series import TruncSeries
from .vertex import (VACUUM, ModeExpr, VASpec, as_vector, untwisted_commutator,
                     vec_add, vec_scale)


class InsufficientTruncation(ValueError):
    def __init__(self, required: int, detail: str = ""):
        self.required = required
        super().__init__(f"insufficient truncation: need N >= {required}" + (f" ({detail})" if detail else ""))


@dataclass(frozen=True)
class CoupledElement:
    """``sum_s Phi_s (x) s`` with ``Phi_s`` in ``O(G[[z]])``; ``terms`` maps state -> Poly."""
    terms: Mapping[str, Poly] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "terms", {s: Poly.coerce(c) for s, c in self.terms.items() if c})

    def __add__(self, other: "CoupledElement") -> "CoupledElement":
        return CoupledElement(vec_add(self.terms, other.terms))

    def __neg__(self) -> "CoupledElement":
        return CoupledElement({s: -c for s, c in self.terms.items()})

    def __sub__(self, other: "CoupledElement") -> "CoupledElement":
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoupledElement):
            return NotImplemented
        return not (self - other).terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def map(self, f: Callable[[Poly], Poly]) -> "CoupledElement":
        return CoupledElement({s: f(c) for s, c in self.terms.items()})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for s in sorted(self.terms, key=lambda s: (s != VACUUM, s)):
            c = self.terms[s]
            coeff = str(c)
            if len(c) > 1:
                coeff = f"({coeff})"
            parts.append(f"{coeff}⊗{s if s != VACUUM else '1'}")
        return " + ".join(parts).replace("+ -", "- ")


def _mode0_inverse():
    A, B, C, D = (G(s, 0) for s in "ABCD")
    return [[D, -B], [-C, A]]


def delta(spec: VASpec, v) -> CoupledElement:
    """``delta(v) = (F -> F(0)^-1 . v)``; on ``SL_2`` the inverse is the adjugate."""
    return CoupledElement(spec.act(_mode0_inverse(), as_vector(v)))


def translate_element(spec: VASpec, h, e: CoupledElement) -> CoupledElement:
    """Diagonal action ``h.(Phi (x) s) = Phi(- h) (x) h.s``."""
    out: dict = {}
    for s, phi in e.terms.items():
        out = vec_add(out, spec.act(h, {s: right_translate(h, phi)}))
    return CoupledElement(out)


def invariance_failures(spec: VASpec, e: CoupledElement, subgroups=None) -> list[str]:
    subgroups = subgroups or one_parameter_subgroups()
    bad = []
    for name, h in subgroups.items():
        moved = translate_element(spec, h, e)
        for s in set(moved.terms) | set(e.terms):
            if not equal_mod_det(moved.terms.get(s, ZERO), e.terms.get(s, ZERO)):
                bad.append(f"{name} translate changes the {s} component")
                break
    return bad


def check_invariance(spec: VASpec, e: CoupledElement, subgroups=None) -> bool:
    """G-invariance tested against symbolic one-parameter subgroups (exact in ``t``)."""
    return not invariance_failures(spec, e, subgroups)


@dataclass(frozen=True)
class Verification:
    lhs: object
    rhs: object

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs

    def __bool__(self) -> bool:
        return self.ok


def g_action_recovery(spec: VASpec, g, v) -> Verification:
    """Left translation ``F -> g^-1 F`` on the functional leg of ``delta(v)`` vs ``delta(g.v)``."""
    ginv = [[g[1][1], -g[0][1]], [-g[1][0], g[0][0]]]
    if g[0][0] * g[1][1] - g[0][1] * g[1][0] != 1:
        raise ValueError("g must have determinant 1")
    lhs = delta(spec, v).map(lambda phi: left_translate(ginv, phi))
    rhs = delta(spec, spec.act(g, as_vector(v)))
    return Verification(lhs, rhs)


# A^[s] coefficients ----------------------------------------------------------
@dataclass(frozen=True)
class ABracketCoeffs:
    """``B_s = F_A (1/s!) d^s F_A^-1``, known modulo ``z^(N-s)``."""
    s: int
    series: MatrixSeries

    def coefficient(self, k: int):
        return self.series.coefficient(k)


def _connection_series(A) -> MatrixSeries:
    return A.A if isinstance(A, Connection) else A


@lru_cache(maxsize=64)
def fibre_point(A: Connection, N: int) -> tuple[MatrixSeries, MatrixSeries]:
    """``(F_A, F_A^-1)`` modulo ``z^N`` with ``F_A(0) = 1``."""
    n = A.A.size
    F = solve_connection(A, [[1 if i == j else 0 for j in range(n)] for i in range(n)], N)
    return F, matrix_inverse(F)


@lru_cache(maxsize=256)
def a_bracket_coeffs(A: Connection, s: int, N: int) -> ABracketCoeffs:
    if s >= N:
        raise InsufficientTruncation(s + 1, f"A^[{s}] needs more than {N} coefficients")
    F, D = fibre_point(A, N)
    for _ in range(s):
        D = D.derivative()
    B = (F.truncate(N - s) * D) * Fraction(1, factorial(s))
    return ABracketCoeffs(s, B)


def a_bracket_recursive(A, s: int, N: int) -> ABracketCoeffs:
    """Same series via ``B_{s+1} = (B_s' + A B_s)/(s+1)``; works for symbolic ``A``."""
    if s >= N:
        raise InsufficientTruncation(s + 1, f"A^[{s}] needs more than {N} coefficients")
    M = _connection_series(A)
    if M.order < N - 1:
        raise InsufficientTruncation(N - 1, "connection known to too low an order")
    B = MatrixSeries.identity(N, M.size)
    for j in range(s):
        B = (B.derivative() + M * B) * Fraction(1, j + 1)
    return ABracketCoeffs(s, B)


def symbolic_connection(N: int) -> MatrixSeries:
    """``A(z)`` with coefficient ``z^k`` equal to ``[[a*, b*], [c*, -a*]]_{-k-1}``."""
    from .functionals import g
    mats = [[[g("a", k), g("b", k)], [g("c", k), -g("a", k)]] for k in range(N)]
    return MatrixSeries.from_coefficients(mats, N)


# twisted commutator --------------------------------------------------------------
class TwistedModeExpr(ModeExpr):
    """``sum c * (state)^{d+A}_{-1-p}``."""
    superscript = "^{d+A}"


def comparison_floor(spec: VASpec, m: int, n: int, N: int) -> int:
    """Lowest output index ``p`` whose coefficient is complete when ``k + s <= N - 2``."""
    return m + n - spec.l_min - (N - 2)


def _trivial_scale(s: int, k: int) -> int:
    return 1 if s == 0 and k == 0 else 0


def twisted_commutator_formula(spec: VASpec, a, m: int, b, n: int, A, N: int,
                               brackets: Mapping[int, ABracketCoeffs] | None = None,
                               p_min: int | None = None) -> TwistedModeExpr:
    """``sum_{k,l,r+s=-l-1} binom(-m-1, r) ((A^[s]_{-k-1}.a)_{(-l-1)} b)^{d+A}_{-1-(m+n-l-k-s)}``.

    The internal index ``k + s`` runs up to ``N - 2``.  ``A`` is a regular
    :class:`Connection` (rational) or a symbolic :class:`MatrixSeries`, in
    which case the recursion route supplies ``A^[s]``.
    """
    if p_min is not None and p_min < comparison_floor(spec, m, n, N):
        raise InsufficientTruncation(m + n - spec.l_min - p_min + 2,
                                     f"output mode index {p_min} requested")
    avec, bvec = as_vector(a), as_vector(b)
    kmax = N - 2
    if brackets is None:
        smax = -spec.l_min - 1
        route = a_bracket_coeffs if isinstance(A, Connection) else a_bracket_recursive
        brackets = {s: route(A, s, N) for s in range(min(smax, kmax) + 1)}
    out = TwistedModeExpr()
    for l in range(spec.l_min, 0):
        for s in range(-l):
            r = -l - 1 - s
            c = binom(-m - 1, r)
            if not c:
                continue
            for k in range(kmax - s + 1):
                mat = brackets[s].coefficient(k)
                moved = spec.act(mat, avec, trivial=_trivial_scale(s, k))
                w = spec.ope_lin(moved, l, bvec)
                if w:
                    out = out + TwistedModeExpr.mode(w, m + n - l - k - s, c)
    return out


def l2_specialization(spec: VASpec, a, m: int, b, n: int, A, N: int) -> TwistedModeExpr:
    """Second-order-pole form: ``(-m-1)(a_{(1)}b)_{-1-(m+n+2)} + sum_k ((A_{-k-1}.a)_{(1)}b)_{-1-(m+n+1-k)}``."""
    if spec.l_min < -2:
        raise ValueError("specialization needs poles of order at most 2")
    avec, bvec = as_vector(a), as_vector(b)
    M = _connection_series(A)
    out = TwistedModeExpr.mode(spec.ope_lin(avec, -2, bvec), m + n + 2, -m - 1)
    out = out + TwistedModeExpr.mode(spec.ope_lin(avec, -1, bvec), m + n + 1)
    for k in range(N - 2):
        w = spec.ope_lin(spec.act(M.coefficient(k), avec, trivial=0), -2, bvec)
        out = out + TwistedModeExpr.mode(w, m + n + 1 - k)
    return out


def _act_coeff(spec: VASpec, F: MatrixSeries, t: int, vec) -> dict:
    return spec.act(F.coefficient(t), vec, trivial=_trivial_scale(0, t))


def twisted_commutator_oracle(spec: VASpec, a, m: int, b, n: int, A: Connection, N: int) -> TwistedModeExpr:
    """Brute force at the point ``F = F_A``.

    ``delta(a)_{-m-1} = sum_i (F^-1_i.a)_{-(m-i)-1}``; the untwisted commutator
    is applied termwise and untwisted modes are converted back by
    ``c_{-1-q} = sum_t delta(F_t.c)_{-1-(q-t)}``.  Terms with ``i+j+t <= N-2``.
    """
    avec, bvec = as_vector(a), as_vector(b)
    F, Finv = fibre_point(A, N)
    kmax = N - 2
    out = TwistedModeExpr()
    for i in range(kmax + 1):
        ai = _act_coeff(spec, Finv, i, avec)
        if not ai:
            continue
        for j in range(kmax - i + 1):
            bj = _act_coeff(spec, Finv, j, bvec)
            if not bj:
                continue
            inner = untwisted_commutator(spec, ai, m - i, bj, n - j)
            for (state, q), c in inner.terms.items():
                if state == VACUUM:
                    out = out + TwistedModeExpr({(VACUUM, q): c})
                    continue
                for t in range(kmax - i - j + 1):
                    moved = _act_coeff(spec, F, t, {state: c})
                    if moved:
                        out = out + TwistedModeExpr.mode(moved, q - t)
    return out


def compare_twisted(spec: VASpec, a, m: int, b, n: int, A: Connection, N: int):
    """Formula and oracle restricted to the exact window; returns ``(formula, oracle, diff)``."""
    floor = comparison_floor(spec, m, n, N)
    keep = lambda s, p: p >= floor  # noqa: E731
    f = twisted_commutator_formula(spec, a, m, b, n, A, N).restrict(keep)
    o = twisted_commutator_oracle(spec, a, m, b, n, A, N).restrict(keep)
    return f, o, f - o


# operator product expansions -----------------------------------------------------
@dataclass(frozen=True)
class CoupledOPE:
    """Singular part of ``Y(delta u, z) Y(delta v, w)``: ``poles[j]`` is the
    coefficient of ``(z-w)^j`` as a coupled element at the point ``w``."""
    poles: Mapping[int, CoupledElement]

    def series(self, j: int, N: int) -> dict[str, TruncSeries]:
        """The ``w``-series ``Y(Phi, w)`` of each V-leg state at pole order ``j``."""
        e = self.poles.get(j, CoupledElement())
        return {s: vertex_op(phi, N) for s, phi in e.terms.items()}


def coupled_ope(spec: VASpec, u, v, N: int | None = None) -> CoupledOPE:
    """Uses ``Y(Phi, z) = sum_j (z-w)^j Y(T^j Phi / j!, w)`` on the functional leg."""
    du, dv = delta(spec, u), delta(spec, v)
    poles: dict[int, CoupledElement] = {}
    for s, phi in du.terms.items():
        derivs = [phi]
        for _ in range(-spec.l_min - 1):
            derivs.append(derivation_T(derivs[-1]))
        for t, psi in dv.terms.items():
            for l in range(spec.l_min, 0):
                w = spec.ope_coeff(s, l, t)
                if not w:
                    continue
                for j in range(-l):
                    f = derivs[j] * psi * Fraction(1, factorial(j))
                    term = CoupledElement(vec_scale(f, w))
                    poles[l + j] = poles.get(l + j, CoupledElement()) + term
    return CoupledOPE({k: e for k, e in poles.items() if e.terms})


# fibres ---------------------------------------------------------------------------
def evaluate_element(e: CoupledElement, F: MatrixSeries) -> dict:
    out: dict = {}
    for s, phi in e.terms.items():
        val = evaluate_at(phi, F)
        if isinstance(val, Poly):
            raise ValueError(f"functional {phi} involves modes beyond the truncation {F.order}")
        out = vec_add(out, {s: val})
    return out


def fibre_evaluate(spec: VASpec, e: CoupledElement, A: Connection, N: int | None = None,
                   allow_noninvariant: bool = False) -> dict:
    """Evaluate the functional leg at ``F_A`` (``F_A(0) = 1``)."""
    bad = invariance_failures(spec, e)
    if bad and not allow_noninvariant:
        raise ValueError("element is not G-invariant: " + "; ".join(bad))
    modes = [gg.mode for phi in e.terms.values() for gg in phi.generators() if gg.mode is not None]
    N = N or max(max(modes, default=0) + 1, 2)
    if A.order < N - 1:
        raise InsufficientTruncation(A.order + 1, "connection too short for the modes involved")
    F = solve_connection(A, [[1, 0], [0, 1]], N)
    return evaluate_element(e, F)


def vacuum_element(phi: Poly) -> CoupledElement:
    return CoupledElement({VACUUM: phi})


def embedded_central(symbol: str, n: int = 0) -> CoupledElement:
    return vacuum_element(embed_g_in_G(symbol, n))
