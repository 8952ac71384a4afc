"""Regular singular connections ``d + A_0/z``: normal-form solutions, twisted
vertex operators on functionals and the semisimple twisted commutator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .coupling import TwistedModeExpr
from .poly import LAM, ONE, ZERO, Poly, binom
from .series import LogLaurentSeries
from .vertex import VASpec, as_vector

# c = -1 rows carry z^(-lam), c = +1 rows z^(+lam)
_ROW_SHIFT = {"A": -1, "C": -1, "B": 1, "D": 1}


@dataclass(frozen=True)
class NormalForm:
    kind: str  # "semisimple" | "nilpotent"
    lam: object  # eigenvalue (semisimple) or upper-right entry (nilpotent)
    A0: tuple
    F: tuple  # 2x2 of LogLaurentSeries

    def entry(self, i: int, j: int) -> LogLaurentSeries:
        return self.F[i][j]


def _is_lam_multiple(x) -> tuple[int, int] | None:
    """Write ``x`` as ``n + c*lam`` with integers ``n, c``; ``None`` otherwise."""
    p = Poly.coerce(x)
    lam_gen = next(iter(LAM.generators()))
    if any(g is not lam_gen for g in p.generators()) or p.degree_in(lam_gen) > 1:
        return None
    n, c = p.coefficient_in(lam_gen, 0), p.coefficient_in(lam_gen, 1)
    n, c = n.constant_value() if n else Fraction(0), c.constant_value() if c else Fraction(0)
    if n.denominator != 1 or c.denominator != 1:
        return None
    return int(n), int(c)


def _zpow(x) -> LogLaurentSeries:
    """``z^x`` for ``x = n + c*lam``."""
    nc = _is_lam_multiple(x)
    if nc is None:
        raise ValueError("exponent must be an integer combination of 1 and lam")
    return LogLaurentSeries.monomial(nc[0], nc[1])


def fnorm(A0, kind: str | None = None) -> NormalForm:
    """``z^{-A0}`` for ``A0 = diag(lam, -lam)`` or ``[[0, nu], [0, 0]]``.

    The result is checked against ``(d + A0/z) F = 0``.
    """
    a, b, c, d = A0[0][0], A0[0][1], A0[1][0], A0[1][1]
    zero = lambda x: not x  # noqa: E731
    if zero(b) and zero(c) and zero(Poly.coerce(a) + d) and kind in (None, "semisimple"):
        lam = a
        F = ((_zpow(-Poly.coerce(lam)), LogLaurentSeries()),
             (LogLaurentSeries(), _zpow(Poly.coerce(lam))))
        nf = NormalForm("semisimple", lam, tuple(map(tuple, A0)), F)
    elif zero(a) and zero(c) and zero(d) and kind in (None, "nilpotent"):
        nu = b
        F = ((LogLaurentSeries.monomial(), LogLaurentSeries.monomial(0, 0, 1, coeff=-nu)),
             (LogLaurentSeries(), LogLaurentSeries.monomial()))
        nf = NormalForm("nilpotent", nu, tuple(map(tuple, A0)), F)
    else:
        raise ValueError("unsupported normal form")
    residual = normal_form_residual(nf)
    if any(not e.is_zero() for r in residual for e in r):
        raise ArithmeticError("normal form does not solve the connection")
    return nf


def normal_form_residual(nf: NormalForm) -> list[list[LogLaurentSeries]]:
    """``dF + (A0/z) F``, entrywise."""
    out = []
    for i in range(2):
        row = []
        for j in range(2):
            e = nf.F[i][j].derivative()
            for r in range(2):
                coeff = nf.A0[i][r]
                if coeff:
                    e = e + (nf.F[r][j] * coeff).shift(-1)
            row.append(e)
        out.append(row)
    return out


def twisted_vertex_op(symbol: str, n: int, normal: NormalForm, N: int) -> LogLaurentSeries:
    """``Y(X*_{-n-1}, z) = sum_{m>=0} X*_{-m-1} binom(m + c lam, n) z^(m-n+c lam)``.

    ``c = -1`` for ``A, C`` and ``+1`` for ``B, D``.  This is ``(1/n!) d^n``
    of ``Y(X*_{-1}, z) = sum_m X*_{-m-1} z^(m + c lam)``; terms with ``m < n``
    are kept since ``binom(m + c lam, n)`` does not vanish for generic ``lam``.
    """
    if normal.kind != "semisimple":
        raise NotImplementedError("log-twisted operators not implemented")
    nc = _is_lam_multiple(normal.lam)
    if nc is None:
        raise ValueError("eigenvalue must be an integer combination of 1 and lam")
    c = _ROW_SHIFT[symbol]
    shift_n, shift_c = c * nc[0], c * nc[1]
    lam = LAM
    terms = {}
    for m in range(N):
        expo = lam * shift_c + (m + shift_n)
        coeff = Poly.var(symbol, m) * binom(expo, n)
        if coeff:
            terms[(m - n + shift_n, shift_c, 0)] = coeff
    return LogLaurentSeries(terms, N - n + shift_n)


def normal_a_bracket(normal: NormalForm, s: int) -> list[list[LogLaurentSeries]]:
    """``F (1/s!) d^s F^-1`` for the semisimple normal form, computed in the log-Laurent ring."""
    if normal.kind != "semisimple":
        raise NotImplementedError("log-twisted operators not implemented")
    Finv = [[normal.F[1][1], LogLaurentSeries()], [LogLaurentSeries(), normal.F[0][0]]]
    D = [[e for e in r] for r in Finv]
    for _ in range(s):
        D = [[e.derivative() for e in r] for r in D]
    out = []
    for i in range(2):
        row = []
        for j in range(2):
            e = LogLaurentSeries()
            for r in range(2):
                e = e + normal.F[i][r] * D[r][j]
            row.append(e * Fraction(1, factorial(s)))
        out.append(row)
    return out


def eigenvalue_on(spec: VASpec, a, lam=LAM):
    w = spec.weight(a)
    if w is None:
        raise ValueError("requires Cartan eigenvector")
    return Poly.coerce(lam) * w


def vandermonde_collapse(m: int, q: int, lam=LAM):
    """``(sum_{r+s=q} binom(-m-1, r) binom(lam, s), binom(-m-1+lam, q))``."""
    lam = Poly.coerce(lam)
    lhs = ZERO
    for s in range(q + 1):
        lhs = lhs + binom(lam, s) * binom(-m - 1, q - s)
    return lhs, binom(lam - m - 1, q)


def regular_singular_commutator(spec: VASpec, a, m: int, b, n: int, lam=LAM,
                                reduced: bool = True) -> TwistedModeExpr:
    """Twisted commutator over ``d + diag(lam, -lam)/z``.

    Reduced: ``sum_l binom(-m-1 + lam w(a), -l-1) (a_{(-l-1)} b)_{-1-(m+n-l)}``.
    Unreduced: the double sum with ``binom(-m-1, r) A^[s]`` where ``A^[s] a``
    is read off ``normal_a_bracket`` (``binom(lam w(a), s) z^-s``).
    """
    avec, bvec = as_vector(a), as_vector(b)
    ev = eigenvalue_on(spec, avec, lam)
    out = TwistedModeExpr()
    if reduced:
        for l in range(spec.l_min, 0):
            w = spec.ope_lin(avec, l, bvec)
            if w:
                out = out + TwistedModeExpr.mode(w, m + n - l, binom(ev - m - 1, -l - 1))
        return out
    weight = spec.weight(avec)
    nf = fnorm([[Poly.coerce(lam), ZERO], [ZERO, -Poly.coerce(lam)]])
    for l in range(spec.l_min, 0):
        w = spec.ope_lin(avec, l, bvec)
        if not w:
            continue
        coeff = ZERO
        for s in range(-l):
            B = normal_a_bracket(nf, s)
            # z^{-s} coefficient of the diagonal entry acting on the weight space
            idx = {1: 0, -1: 1}.get(weight)
            a_s = B[idx][idx].coefficient(-s) if idx is not None else (ONE if s == 0 else ZERO)
            coeff = coeff + binom(-m - 1, -l - 1 - s) * a_s
        out = out + TwistedModeExpr.mode(w, m + n - l, coeff)
    return out
