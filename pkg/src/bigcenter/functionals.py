"""Functionals on sl_2[[z]] and SL_2[[z]].

``O_g`` is generated by entry functionals ``a*, b*, c*, d*`` at modes
``-n-1`` (``d* = -a*`` in canonical form); ``O_G`` by ``A*, B*, C*, D*``.
The embedding ``O_g -> O_G`` reads off the coefficients of ``-(dF) adj(F)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Sequence

from .gauge import MatrixSeries
from .poly import (ALGEBRA_SYMBOLS, GROUP_SYMBOLS, LAM, ONE, ZERO, Generator,
                   Poly, binom)
from .series import TruncSeries

_ENTRY = {"A": (0, 0), "B": (0, 1), "C": (1, 0), "D": (1, 1)}
_ENTRY_LOWER = {s.lower(): ij for s, ij in _ENTRY.items()}


def G(symbol: str, n: int) -> Poly:
    """Group coordinate ``symbol*_{-n-1}``."""
    return Poly.var(symbol, n)


def g(symbol: str, n: int) -> Poly:
    """Lie algebra coordinate ``symbol*_{-n-1}``."""
    return Poly.var(symbol, n)


def mode_matrix(n: int) -> list[list[Poly]]:
    return [[G("A", n), G("B", n)], [G("C", n), G("D", n)]]


def symbolic_point(N: int) -> MatrixSeries:
    """The universal point ``F(z) = sum_n [[A*_{-n-1}, B*..], [C*.., D*..]] z^n``."""
    return MatrixSeries.from_coefficients([mode_matrix(n) for n in range(N)], N)


def ring_tag(p: Poly) -> str:
    syms = {gg.symbol for gg in p.generators() if gg.is_functional}
    has_G = bool(syms & set(GROUP_SYMBOLS))
    has_g = bool(syms & set(ALGEBRA_SYMBOLS))
    if has_G and has_g:
        return "mixed"
    return "O_g" if has_g else "O_G"


def normalize_og(p: Poly) -> Poly:
    """Eliminate ``d*_{-n-1} = -a*_{-n-1}``."""
    sub = {gg: -g("a", gg.mode) for gg in p.generators() if gg.symbol == "d" and gg.mode is not None}
    return p.subs(sub)


# determinant ideal -----------------------------------------------------
def det_coefficient(n: int) -> Poly:
    """``det_{-n-1} = sum_{i+j=n} A_{-i-1} D_{-j-1} - B_{-i-1} C_{-j-1}``."""
    out = ZERO
    for i in range(n + 1):
        out = out + G("A", i) * G("D", n - i) - G("B", i) * G("C", n - i)
    return out


def det_relation(n: int) -> Poly:
    return det_coefficient(n) - (1 if n == 0 else 0)


@dataclass(frozen=True)
class DetIdeal:
    order: int

    @property
    def relations(self) -> list[Poly]:
        return [det_relation(n) for n in range(self.order)]


# embedding --------------------------------------------------------------
@lru_cache(maxsize=None)
def embed_matrix(n: int) -> tuple[tuple[Poly, Poly], tuple[Poly, Poly]]:
    """Images of ``[[a*, b*], [c*, d*]]_{-n-1}``: coefficient of ``z^n`` in
    ``-(sum_i i F_i z^(i-1)) adj(F)(z)``."""
    out = [[ZERO, ZERO], [ZERO, ZERO]]
    for i in range(1, n + 2):
        j = n + 1 - i
        Fi = mode_matrix(i)
        Fj = mode_matrix(j)
        adj = [[Fj[1][1], -Fj[0][1]], [-Fj[1][0], Fj[0][0]]]
        for r in range(2):
            for c in range(2):
                acc = Fi[r][0] * adj[0][c] + Fi[r][1] * adj[1][c]
                out[r][c] = out[r][c] - acc * i
    return tuple(tuple(r) for r in out)


def embed_g_in_G(symbol: str, n: int) -> Poly:
    i, j = _ENTRY_LOWER[symbol]
    return embed_matrix(n)[i][j]


def embed_poly(p: Poly) -> Poly:
    """Replace every ``O_g`` generator by its quadratic ``O_G`` image."""
    sub = {gg: embed_g_in_G(gg.symbol, gg.mode) for gg in p.generators()
           if gg.symbol in ALGEBRA_SYMBOLS and gg.mode is not None}
    return p.subs(sub)


# translations -------------------------------------------------------------
def _translate(p: Poly, hmat, side: str) -> Poly:
    modes = {gg.mode for gg in p.generators() if gg.symbol in GROUP_SYMBOLS}
    sub = {}
    for n in modes:
        M = mode_matrix(n)
        for s, (i, j) in _ENTRY.items():
            if side == "right":
                val = M[i][0] * hmat[0][j] + M[i][1] * hmat[1][j]
            else:
                val = hmat[i][0] * M[0][j] + hmat[i][1] * M[1][j]
            sub[Generator(s, n)] = val
    return p.subs(sub)


def right_translate(gmat, phi: Poly) -> Poly:
    """``(g.Phi)(F) = Phi(F g)``: each mode matrix is multiplied by ``g`` on the right."""
    return _translate(phi, gmat, "right")


def left_translate(hmat, phi: Poly) -> Poly:
    """``Phi -> (F -> Phi(h F))``."""
    return _translate(phi, hmat, "left")


# vertex algebra structure --------------------------------------------------
def _T_image(gg: Generator) -> Poly:
    if gg.mode is None:
        return ZERO
    return Poly.var(gg.symbol, gg.mode + 1) * (gg.mode + 1)


def derivation_T(phi: Poly) -> Poly:
    """``T phi_{-n-1} = (n+1) phi_{-n-2}``, extended by Leibniz."""
    return phi.apply_derivation(_T_image)


def vertex_op_mode(symbol: str, n: int, N: int) -> TruncSeries:
    """``Y(phi_{-n-1}, z) = sum_m phi_{-m-1} binom(m, n) z^(m-n)``, modulo ``z^N``."""
    return TruncSeries([Poly.var(symbol, n + k) * binom(n + k, n) for k in range(N)])


def vertex_op(phi: Poly, N: int) -> TruncSeries:
    """``Y(Phi, z) = sum_k z^k T^k Phi / k!`` for any functional polynomial."""
    out = []
    cur = phi
    for k in range(N):
        out.append(cur * Fraction(1, factorial(k)))
        cur = derivation_T(cur)
    return TruncSeries(out)


# Poisson structure on O_g ------------------------------------------------
_HALF = Fraction(1, 2)
# element X of sl_2 with phi(Y) = tr(X Y) for traceless Y
_DUAL = {
    "a": ((_HALF, 0), (0, -_HALF)),
    "b": ((0, 0), (1, 0)),
    "c": ((0, 1), (0, 0)),
    "d": ((-_HALF, 0), (0, _HALF)),
}


def functional_matrix(symbol: str):
    return _DUAL[symbol]


def _mat_mul(x, y):
    return [[sum(x[i][k] * y[k][j] for k in range(2)) for j in range(2)] for i in range(2)]


def bracket_matrix(x, y):
    xy, yx = _mat_mul(x, y), _mat_mul(y, x)
    return [[xy[i][j] - yx[i][j] for j in range(2)] for i in range(2)]


def trace_form(x, y) -> Fraction:
    m = _mat_mul(x, y)
    return Fraction(m[0][0] + m[1][1])


def functional_of(mat, n: int = 0) -> Poly:
    """The functional ``tr(mat * -)`` at mode ``-n-1`` in ``a, b, c`` coordinates."""
    return (g("a", n) * (mat[0][0] - mat[1][1]) + g("c", n) * mat[0][1]
            + g("b", n) * mat[1][0])


def trace_functional(mat, n: int = 0) -> Poly:
    """``tr(mat * -)`` at mode ``-n-1`` with all four entry functionals (no tracelessness used)."""
    return (g("a", n) * mat[0][0] + g("c", n) * mat[0][1]
            + g("b", n) * mat[1][0] + g("d", n) * mat[1][1])


def _is_og_gen(gg: Generator) -> bool:
    return gg.symbol in ALGEBRA_SYMBOLS and gg.mode is not None


def _gen_bracket(x: Generator, y: Generator, spectral: Poly) -> Poly:
    if not (_is_og_gen(x) and _is_og_gen(y)):
        if x.mode is None or y.mode is None:
            return ZERO
        raise ValueError("not in O(g[[z]])")
    X, Y = _DUAL[x.symbol], _DUAL[y.symbol]
    base = functional_of(bracket_matrix(X, Y), 0) + spectral * trace_form(X, Y)
    m, n = x.mode, y.mode
    # {T^m a / m! _lam T^n b / n!} = (-lam)^m/m! (lam+T)^n/n! {a _lam b}
    shifted = ZERO
    cur = base
    for i in range(n + 1):
        shifted = shifted + cur * spectral ** (n - i) * binom(n, i)
        cur = derivation_T(cur)
    return shifted * (-spectral) ** m * Fraction(1, factorial(m) * factorial(n))


def poisson_bracket(p: Poly, q: Poly, spectral: Poly = LAM) -> Poly:
    """Lambda-bracket on ``O(g[[z]])`` extended by sesquilinearity and Leibniz.

    The result is a polynomial in the spectral parameter (default ``lam``).
    """
    sg = next(iter(spectral.generators()))
    for poly in (p, q):
        for gg in poly.generators():
            if gg.symbol in GROUP_SYMBOLS and gg.mode is not None:
                raise ValueError("not in O(g[[z]])")
    result = ZERO
    for x in p.generators():
        if not _is_og_gen(x):
            continue
        inner = q.apply_derivation(lambda y: _gen_bracket(x, y, spectral))
        if not inner:
            continue
        dp = p.diff(x)
        for j in range(inner.degree_in(sg) + 1):
            cj = inner.coefficient_in(sg, j)
            if not cj:
                continue
            # (lam + T)^j acting on dp
            acc = ZERO
            cur = dp
            for i in range(j + 1):
                acc = acc + cur * spectral ** (j - i) * binom(j, i)
                cur = derivation_T(cur)
            result = result + cj * acc
    return result


def lambda_coefficients(p: Poly, spectral: Poly = LAM) -> dict[int, Poly]:
    sg = next(iter(spectral.generators()))
    return {j: c for j in range(p.degree_in(sg) + 1) if (c := p.coefficient_in(sg, j))}


def substitute_spectral(p: Poly, spectral: Poly, value: Poly) -> Poly:
    sg = next(iter(spectral.generators()))
    return p.subs({sg: value})


def apply_T_polynomial(coeffs: dict[int, Poly], shift: Poly, spectral: Poly) -> Poly:
    """Replace ``spectral^j`` by ``(shift - T)^j`` acting on each coefficient
    (used for skew-symmetry ``{b _lam a} = -{a _(-lam-T) b}``)."""
    out = ZERO
    for j, c in coeffs.items():
        cur = c
        for i in range(j + 1):
            out = out + cur * shift ** (j - i) * binom(j, i) * (-1) ** i
            cur = derivation_T(cur)
    return out


def poisson_module_act(a, phi: Poly) -> Poly:
    """``{a*_{-1} _lam Phi} = -d/dt Phi(e^{at} F)|_{t=0}`` (lambda independent).

    Implemented as the derivation ``M_k -> -a M_k`` on every mode matrix.
    """
    modes = {gg.mode for gg in phi.generators() if gg.symbol in GROUP_SYMBOLS and gg.mode is not None}
    images = {}
    for n in modes:
        M = mode_matrix(n)
        for s, (i, j) in _ENTRY.items():
            images[Generator(s, n)] = -(M[0][j] * a[i][0] + M[1][j] * a[i][1])
    return phi.apply_derivation(lambda gg: images.get(gg, ZERO))


# equality modulo the determinant ideal --------------------------------------
@dataclass
class EqualityCertificate:
    equal: bool
    method: str
    transcript: list = field(default_factory=list)
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.equal


def _rand_rational(rng: random.Random, nonzero: bool = False) -> Fraction:
    while True:
        v = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
        if v or not nonzero:
            return v


def random_sl2_point(N: int, rng: random.Random) -> MatrixSeries:
    """Random point of SL_2[[z]] mod ``z^N``: ``D = (1 + B C) A^-1``."""
    A = TruncSeries([_rand_rational(rng, nonzero=True)] + [_rand_rational(rng) for _ in range(N - 1)])
    B = TruncSeries([_rand_rational(rng) for _ in range(N)])
    C = TruncSeries([_rand_rational(rng) for _ in range(N)])
    D = (B * C + 1) * A.invert()
    return MatrixSeries([[A, B], [C, D]])


def point_values(F: MatrixSeries) -> dict[Generator, Fraction]:
    vals = {}
    for s, (i, j) in _ENTRY.items():
        for n in range(F.order):
            vals[Generator(s, n)] = F[i, j][n]
    return vals


def evaluate_at(phi: Poly, F: MatrixSeries, extra: dict | None = None) -> Fraction | Poly:
    """Substitute the coefficients of ``F`` into an ``O_G`` polynomial."""
    vals = point_values(F)
    if extra:
        vals.update(extra)
    sub = {gg: vals[gg] for gg in phi.generators() if gg in vals}
    out = phi.subs(sub)
    return out.constant_value() if out.is_constant() else out


def _max_mode(polys: Iterable[Poly]) -> int:
    return max((gg.mode for p in polys for gg in p.generators() if gg.mode is not None), default=0)


def equal_mod_det(phi: Poly, psi: Poly, trials: int = 20, seed: int = 0) -> EqualityCertificate:
    """Equality in ``O(SL_2[[z]])`` (free ring modulo the det ideal).

    Exact comparison first; otherwise ``trials`` random points on the
    variety (exact rational arithmetic).  ``O_g`` generators are mapped
    through the embedding, free parameters get random nonzero values.
    """
    phi, psi = Poly.coerce(phi), Poly.coerce(psi)
    if phi == psi:
        return EqualityCertificate(True, "exact")
    phi, psi = embed_poly(phi), embed_poly(psi)
    if phi == psi:
        return EqualityCertificate(True, "exact")
    N = _max_mode((phi, psi)) + 1
    params = sorted({gg for p in (phi, psi) for gg in p.generators() if gg.mode is None},
                    key=lambda gg: gg.key)
    rng = random.Random(seed)
    transcript = []
    for trial in range(trials):
        F = random_sl2_point(N, rng)
        extra = {gg: _rand_rational(rng, nonzero=True) for gg in params}
        lhs, rhs = evaluate_at(phi, F, extra), evaluate_at(psi, F, extra)
        entry = {"trial": trial, "lhs": lhs, "rhs": rhs,
                 "point": {str(k): v for k, v in point_values(F).items()},
                 "parameters": {str(k): v for k, v in extra.items()}}
        transcript.append(entry)
        if lhs != rhs:
            return EqualityCertificate(False, "evaluation", transcript, entry)
    return EqualityCertificate(True, "evaluation", transcript)


def sl2_unipotent_upper(t=None):
    from .poly import T
    t = T if t is None else t
    return [[ONE, t], [ZERO, ONE]]


def sl2_unipotent_lower(t=None):
    from .poly import T
    t = T if t is None else t
    return [[ONE, ZERO], [t, ONE]]


def sl2_diagonal(t=None):
    from .poly import T
    t = T if t is None else t
    return [[t, ZERO], [ZERO, t ** -1 if isinstance(t, Poly) else Fraction(1) / t]]


def one_parameter_subgroups() -> dict[str, list]:
    """Symbolic generators of SL_2 in the parameter ``t`` (Laurent for the torus)."""
    return {"upper": sl2_unipotent_upper(), "lower": sl2_unipotent_lower(),
            "diagonal": sl2_diagonal()}


def mat_det(m) -> object:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def mat_adj(m) -> list:
    return [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]


def is_sl2(m: Sequence[Sequence]) -> bool:
    d = mat_det(m)
    return d == 1
