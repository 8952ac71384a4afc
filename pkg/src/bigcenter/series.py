"""Truncated power series, log-Laurent series and Taylor re-expansion.

Coefficients live in any commutative ring supporting ``+ - *`` with ints and
``Fraction`` (in practice ``Fraction`` or :class:`~bigcenter.poly.Poly`).
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Sequence

from .poly import Poly, binom


class NonUnitError(ArithmeticError):
    pass


def _zero_like(x):
    return Poly() if isinstance(x, Poly) else Fraction(0)


def _unit_inverse(c):
    if isinstance(c, Poly):
        if c.is_constant() and c.constant_term() != 0:
            return Fraction(1) / c.constant_term()
        raise NonUnitError("non-unit constant term")
    if c == 0:
        raise NonUnitError("non-unit constant term")
    return Fraction(1) / Fraction(c)


class TruncSeries:
    """``sum c_n z^n`` known modulo ``z^order``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable, order: int | None = None):
        cs = list(coeffs)
        if order is not None:
            if order < 0:
                raise ValueError("order must be >= 0")
            zero = _zero_like(cs[0]) if cs else Fraction(0)
            cs = cs[:order] + [zero] * (order - len(cs))
        self.coeffs = tuple(c if isinstance(c, Poly) else Fraction(c) for c in cs)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @classmethod
    def constant(cls, c, order: int) -> "TruncSeries":
        return cls([c], order)

    @classmethod
    def zero(cls, order: int) -> "TruncSeries":
        return cls([], order)

    def __getitem__(self, n: int):
        if n < 0:
            return Fraction(0)
        if n >= self.order:
            raise IndexError(f"coefficient z^{n} beyond truncation order {self.order}")
        return self.coeffs[n]

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise ValueError("cannot raise truncation order")
        return TruncSeries(self.coeffs[:order])

    def map(self, f: Callable) -> "TruncSeries":
        return TruncSeries([f(c) for c in self.coeffs])

    def __add__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            other = TruncSeries.constant(other, self.order)
        n = min(self.order, other.order)
        return TruncSeries([self.coeffs[i] + other.coeffs[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self) -> "TruncSeries":
        return TruncSeries([-c for c in self.coeffs])

    def __sub__(self, other) -> "TruncSeries":
        return self + (-other)

    def __rsub__(self, other) -> "TruncSeries":
        return (-self) + other

    def __mul__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            return TruncSeries([c * other for c in self.coeffs])
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n):
            acc = a[0] * b[k]
            for i in range(1, k + 1):
                acc = acc + a[i] * b[k - i]
            out.append(acc)
        return TruncSeries(out)

    def __rmul__(self, other) -> "TruncSeries":
        return TruncSeries([other * c for c in self.coeffs])

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return all(self.coeffs[i] == other.coeffs[i] for i in range(n))

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def derivative(self) -> "TruncSeries":
        """d/dz; the result is known modulo ``z^(order-1)``."""
        return TruncSeries([(i + 1) * self.coeffs[i + 1] for i in range(self.order - 1)])

    def integrate_zero(self) -> "TruncSeries":
        """Antiderivative with zero constant term, known modulo ``z^(order+1)``."""
        zero = _zero_like(self.coeffs[0]) if self.coeffs else Fraction(0)
        return TruncSeries([zero] + [c * Fraction(1, i + 1) for i, c in enumerate(self.coeffs)])

    def invert(self) -> "TruncSeries":
        if not self.coeffs:
            raise NonUnitError("non-unit constant term")
        inv0 = _unit_inverse(self.coeffs[0])
        out = [Fraction(inv0)]
        for k in range(1, self.order):
            acc = self.coeffs[k] * out[0]
            for i in range(1, k):
                acc = acc + self.coeffs[i] * out[k - i]
            out.append(-acc * inv0)
        return TruncSeries(out)

    def exp(self) -> "TruncSeries":
        """exp(f) for f with vanishing constant term (E' = f'E recursion)."""
        if self.coeffs and self.coeffs[0]:
            raise ValueError("exp requires zero constant term")
        f = self.coeffs
        out = [Fraction(1)]
        for n in range(1, self.order):
            acc = _zero_like(f[0]) if f else Fraction(0)
            for k in range(1, n + 1):
                acc = acc + k * f[k] * out[n - k]
            out.append(acc * Fraction(1, n))
        return TruncSeries(out)

    def __repr__(self) -> str:
        return f"TruncSeries({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        terms = [(c, "" if n == 0 else ("z" if n == 1 else f"z^{n}"))
                 for n, c in enumerate(self.coeffs) if c]
        return f"{join_signed(terms)} + O(z^{self.order})"


def join_signed(terms) -> str:
    """Render ``[(coeff, factor_string), ...]`` as a signed sum."""
    out = []
    for coeff, factor in terms:
        cs = str(coeff)
        neg = cs.startswith("-") and (not isinstance(coeff, Poly) or len(coeff) == 1)
        if neg:
            cs = cs[1:]
        if factor:
            if " " in cs:
                cs = f"({cs})"
            body = factor if cs == "1" else f"{cs} {factor}"
        else:
            body = cs
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out) if out else "0"


def series_exp(f: TruncSeries) -> TruncSeries:
    return f.exp()


def series_invert(f: TruncSeries) -> TruncSeries:
    return f.invert()


def series_derivative(f: TruncSeries) -> TruncSeries:
    return f.derivative()


def series_integrate_zero(f: TruncSeries) -> TruncSeries:
    return f.integrate_zero()


def series_arith(f: TruncSeries, g: TruncSeries, op: str) -> TruncSeries:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown op {op!r}")


class LogLaurentSeries:
    """``sum coeff * z^(n + c*lam) * log(z)^j`` over a finite term set.

    ``order`` bounds the integer exponent: terms with ``n >= order`` are
    unknown (truncated).  ``None`` means the expression is exact.
    """

    __slots__ = ("terms", "order")

    def __init__(self, terms: dict | None = None, order: int | None = None):
        clean = {}
        for key, v in (terms or {}).items():
            n, c, j = key
            if j < 0:
                raise ValueError("log power must be >= 0")
            if order is not None and n >= order:
                continue
            if v:
                clean[(int(n), int(c), int(j))] = v if isinstance(v, Poly) else Fraction(v)
        self.terms = clean
        self.order = order

    @classmethod
    def monomial(cls, n: int = 0, c: int = 0, j: int = 0, coeff=1, order: int | None = None):
        return cls({(n, c, j): coeff}, order)

    @classmethod
    def from_trunc(cls, f: TruncSeries, shift_c: int = 0) -> "LogLaurentSeries":
        return cls({(n, shift_c, 0): v for n, v in enumerate(f.coeffs)}, f.order)

    @property
    def floor(self) -> int | None:
        return min((n for n, _, _ in self.terms), default=None)

    @property
    def logcap(self) -> int:
        return max((j for _, _, j in self.terms), default=0)

    def _min_order(self, other: "LogLaurentSeries") -> int | None:
        cands = []
        if self.order is not None:
            f = other.floor
            cands.append(self.order + (f if f is not None else 0))
        if other.order is not None:
            f = self.floor
            cands.append(other.order + (f if f is not None else 0))
        return min(cands) if cands else None

    def __add__(self, other) -> "LogLaurentSeries":
        if not isinstance(other, LogLaurentSeries):
            other = LogLaurentSeries.monomial(coeff=other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        orders = [o for o in (self.order, other.order) if o is not None]
        return LogLaurentSeries(out, min(orders) if orders else None)

    __radd__ = __add__

    def __neg__(self) -> "LogLaurentSeries":
        return LogLaurentSeries({k: -v for k, v in self.terms.items()}, self.order)

    def __sub__(self, other) -> "LogLaurentSeries":
        return self + (-other)

    def __mul__(self, other) -> "LogLaurentSeries":
        if not isinstance(other, LogLaurentSeries):
            return LogLaurentSeries({k: v * other for k, v in self.terms.items()}, self.order)
        out: dict = {}
        for (n1, c1, j1), v1 in self.terms.items():
            for (n2, c2, j2), v2 in other.terms.items():
                k = (n1 + n2, c1 + c2, j1 + j2)
                out[k] = out[k] + v1 * v2 if k in out else v1 * v2
        return LogLaurentSeries(out, self._min_order(other))

    def __rmul__(self, other) -> "LogLaurentSeries":
        return LogLaurentSeries({k: other * v for k, v in self.terms.items()}, self.order)

    def shift(self, dn: int) -> "LogLaurentSeries":
        """Multiply by ``z^dn``."""
        return LogLaurentSeries(
            {(n + dn, c, j): v for (n, c, j), v in self.terms.items()},
            None if self.order is None else self.order + dn,
        )

    def derivative(self) -> "LogLaurentSeries":
        """d/dz using d z^(n+c lam) = (n+c lam) z^(n-1+c lam) and d log z = 1/z."""
        lam = Poly.var("lam")
        out: dict = {}
        for (n, c, j), v in self.terms.items():
            e = lam * c + n if c else Fraction(n)
            if e:
                k = (n - 1, c, j)
                add = v * e
                out[k] = out[k] + add if k in out else add
            if j:
                k = (n - 1, c, j - 1)
                add = v * j
                out[k] = out[k] + add if k in out else add
        return LogLaurentSeries(out, None if self.order is None else self.order - 1)

    def map(self, f: Callable) -> "LogLaurentSeries":
        return LogLaurentSeries({k: f(v) for k, v in self.terms.items()}, self.order)

    def coefficient(self, n: int, c: int = 0, j: int = 0):
        if self.order is not None and n >= self.order:
            raise IndexError(f"z^{n} beyond truncation order {self.order}")
        return self.terms.get((n, c, j), Fraction(0))

    def is_zero(self) -> bool:
        return all(not v for v in self.terms.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, LogLaurentSeries):
            return NotImplemented
        orders = [o for o in (self.order, other.order) if o is not None]
        bound = min(orders) if orders else None
        keys = set(self.terms) | set(other.terms)
        for k in keys:
            if bound is not None and k[0] >= bound:
                continue
            if self.terms.get(k, 0) != other.terms.get(k, 0):
                return False
        return True

    def __hash__(self):
        return hash(frozenset(self.terms))

    def __str__(self) -> str:
        terms = []
        for (n, c, j) in sorted(self.terms):
            expo = _fmt_exponent(n, c)
            z = "" if expo == "0" else ("z" if expo == "1" else
                                        (f"z^{expo}" if c == 0 else f"z^({expo})"))
            lg = "" if j == 0 else ("log(z)" if j == 1 else f"log(z)^{j}")
            terms.append((self.terms[(n, c, j)], " ".join(x for x in (z, lg) if x)))
        tail = "" if self.order is None else f" + O(z^{self.order})"
        return join_signed(terms) + tail

    def __repr__(self) -> str:
        return f"LogLaurentSeries({self})"


def _fmt_exponent(n: int, c: int) -> str:
    if c == 0:
        return str(n)
    lam = "lam" if c == 1 else ("-lam" if c == -1 else f"{c} lam")
    if n == 0:
        return lam
    if lam.startswith("-"):
        return f"{n} - {lam[1:]}"
    return f"{n} + {lam}"


def taylor_reexpand(f, shift=None, count: int | None = None):
    """Re-expand ``f(t)`` around ``t = z``.

    * ``TruncSeries`` without ``shift``: returns a list whose n-th entry is the
      coefficient of ``(t-z)^n`` as a ``TruncSeries`` in ``z``,
      ``sum_k f_{n+k} binom(n+k, n) z^k`` (truncated so ``n + k < N``).
    * ``TruncSeries`` with ``shift`` (rational or Poly offset): the truncated
      polynomial is shifted exactly; returns coefficients of ``(t - shift)^n``.
    * ``LogLaurentSeries``: n-th entry is ``(1/n!) d^n f`` (in ``z``), for
      ``n < count``.
    """
    if isinstance(f, LogLaurentSeries):
        if count is None:
            raise ValueError("count required for log-Laurent re-expansion")
        out = []
        cur = f
        for n in range(count):
            out.append(cur * Fraction(1, factorial(n)))
            cur = cur.derivative()
        return out
    N = f.order
    if shift is None:
        return [
            TruncSeries([f.coeffs[n + k] * binom(n + k, n) for k in range(N - n)])
            for n in range(N)
        ]
    out = []
    for n in range(N):
        acc = Poly() if isinstance(shift, Poly) else Fraction(0)
        for k in range(N - n):
            acc = acc + f.coeffs[n + k] * binom(n + k, n) * _pow(shift, k)
        out.append(acc)
    return out


def _pow(x, k: int):
    return x ** k if isinstance(x, Poly) else Fraction(x) ** k


def shift_polynomial(coeffs: Sequence, shift) -> list:
    """Coefficients of ``sum c_m t^m`` in powers of ``(t - shift)`` (exact)."""
    return taylor_reexpand(TruncSeries(coeffs), shift=shift)
