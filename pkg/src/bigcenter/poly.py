"""Sparse multivariate (Laurent) polynomials over exact rationals.

Generators are interned ``(symbol, mode)`` pairs.  Functional symbols carry a
mode ``n >= 0`` and stand for ``phi_{-n-1}``; parameters (``t``, ``lam``, ...)
carry no mode.  Parameters may appear with negative exponents so that
one-parameter diagonal subgroups ``diag(t, t^-1)`` stay polynomial.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Mapping, Union

# Functional alphabets first (group coordinates, then Lie algebra
# coordinates), then parameters.  The position in this tuple fixes the
# global generator order.
ALPHABET = ("A", "B", "C", "D", "a", "b", "c", "d", "t", "s", "lam", "mu", "X", "z", "w")
GROUP_SYMBOLS = ("A", "B", "C", "D")
ALGEBRA_SYMBOLS = ("a", "b", "c", "d")
_ALPHA_INDEX = {s: i for i, s in enumerate(ALPHABET)}


class Generator:
    """An interned polynomial generator.  Compare with ``is``/``==`` freely."""

    __slots__ = ("symbol", "mode", "key", "__weakref__")
    _registry: dict[tuple[str, int | None], "Generator"] = {}

    def __new__(cls, symbol: str, mode: int | None = None):
        k = (symbol, mode)
        obj = cls._registry.get(k)
        if obj is not None:
            return obj
        if symbol not in _ALPHA_INDEX:
            raise ValueError(f"unknown generator symbol {symbol!r}")
        if mode is not None and mode < 0:
            raise ValueError("mode index must be >= 0 (generator phi_{-n-1})")
        obj = super().__new__(cls)
        obj.symbol = symbol
        obj.mode = mode
        obj.key = (_ALPHA_INDEX[symbol], -1 if mode is None else mode)
        cls._registry[k] = obj
        return obj

    def __reduce__(self):
        return (Generator, (self.symbol, self.mode))

    @property
    def is_functional(self) -> bool:
        return self.mode is not None

    def __lt__(self, other: "Generator") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        return f"Generator({self.symbol!r}, {self.mode!r})"

    def __str__(self) -> str:
        if self.mode is None:
            return self.symbol
        return f"{self.symbol}*_{{{-self.mode - 1}}}"


def gen(symbol: str, mode: int | None = None) -> Generator:
    return Generator(symbol, mode)


Monomial = tuple  # tuple[tuple[Generator, int], ...] sorted by generator key
Scalar = Union[int, Fraction]

_SENTINEL = ((10**9, 0), 0)


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for g, e in m2:
        s = d.get(g, 0) + e
        if s:
            d[g] = s
        else:
            del d[g]
    return tuple(sorted(d.items(), key=lambda ge: ge[0].key))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _display_key(m: Monomial):
    # descending graded lex
    lex = tuple((g.key, -e) for g, e in m) + (_SENTINEL,)
    return (-_mono_degree(m), lex)


class Poly:
    """Immutable sparse polynomial ``{monomial: Fraction}``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = Fraction(c)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        return cls({(): c})

    @classmethod
    def var(cls, symbol: str | Generator, mode: int | None = None, exp: int = 1) -> "Poly":
        g = symbol if isinstance(symbol, Generator) else Generator(symbol, mode)
        return cls._raw({((g, exp),): Fraction(1)}) if exp else cls.const(1)

    @staticmethod
    def coerce(x) -> "Poly":
        if isinstance(x, Poly):
            return x
        if isinstance(x, (int, Fraction)):
            return Poly.const(x)
        if isinstance(x, Generator):
            return Poly.var(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Poly")

    # inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not m for m in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.constant_term()

    def generators(self) -> set[Generator]:
        return {g for m in self._terms for g, _ in m}

    def degree(self) -> int:
        return max((_mono_degree(m) for m in self._terms), default=0)

    def degree_in(self, g: Generator) -> int:
        return max((dict(m).get(g, 0) for m in self._terms), default=0)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda mc: _display_key(mc[0]))

    # arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return self
            other = Poly.const(other)
        elif not isinstance(other, Poly):
            return NotImplemented
        if not other._terms:
            return self
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self + (-other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly._raw({})
            return Poly._raw({m: c * other for m, c in self._terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly":
        if isinstance(other, Poly):
            other = other.constant_value()
        return self * (Fraction(1) / Fraction(other))

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            if len(self._terms) != 1:
                raise ValueError("negative powers only for monomials")
            (m, c), = self._terms.items()
            return Poly._raw({tuple((g, e * k) for g, e in m): Fraction(1) / c ** (-k)})
        result = Poly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # substitution and derivations ---------------------------------------
    def subs(self, mapping: Mapping[Generator, object]) -> "Poly":
        """Substitute generators by polynomials or rationals.

        Generators absent from ``mapping`` are kept.
        """
        if not mapping:
            return self
        cache: dict[tuple[Generator, int], object] = {}
        out = Poly._raw({})
        for m, c in self._terms.items():
            kept = []
            factor: object = c
            for g, e in m:
                if g in mapping:
                    key = (g, e)
                    val = cache.get(key)
                    if val is None:
                        val = cache[key] = _power(mapping[g], e)
                    factor = factor * val
                else:
                    kept.append((g, e))
            term = Poly._raw({tuple(kept): Fraction(1)}) * factor if kept else Poly.coerce(factor)
            out = out + term
        return out

    def evaluate(self, values: Mapping[Generator, Scalar]) -> Fraction:
        total = Fraction(0)
        for m, c in self._terms.items():
            v = c
            for g, e in m:
                v *= Fraction(values[g]) ** e
            total += v
        return total

    def apply_derivation(self, image: Callable[[Generator], "Poly"]) -> "Poly":
        """Extend ``g -> image(g)`` to a derivation (Leibniz rule)."""
        out = Poly._raw({})
        for m, c in self._terms.items():
            for idx, (g, e) in enumerate(m):
                dg = image(g)
                if not dg:
                    continue
                rest = m[:idx] + ((g, e - 1),) + m[idx + 1:] if e != 1 else m[:idx] + m[idx + 1:]
                rest = tuple(ge for ge in rest if ge[1])
                out = out + Poly._raw({rest: c * e}) * dg
        return out

    def diff(self, g: Generator) -> "Poly":
        return self.apply_derivation(lambda h: Poly.const(1) if h is g else ZERO)

    def coefficient_in(self, g: Generator, k: int) -> "Poly":
        """Coefficient of ``g**k`` viewing the polynomial as univariate in ``g``."""
        out: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            d = dict(m)
            if d.get(g, 0) == k:
                d.pop(g, None)
                out[tuple(sorted(d.items(), key=lambda ge: ge[0].key))] = c
        return Poly._raw(out)

    # display ------------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            sign = "-" if c < 0 else "+"
            a = -c if c < 0 else c
            mono = "".join(_fmt_factor(g, e) for g, e in m)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a} {mono}"
            if i == 0:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Poly({str(self)!r})"


def _fmt_factor(g: Generator, e: int) -> str:
    s = str(g)
    if e == 1:
        return s if g.mode is not None or len(s) == 1 else s
    return f"{s}^{e}"


def _power(x, e: int):
    if isinstance(x, Poly):
        return x ** e
    return Fraction(x) ** e


ZERO = Poly()
ONE = Poly.const(1)


def var(symbol: str, mode: int | None = None) -> Poly:
    return Poly.var(symbol, mode)


T = var("t")
LAM = var("lam")
MU = var("mu")
X = var("X")


def is_zero(x) -> bool:
    return not x


def binom(x, s: int):
    """Generalised binomial ``x(x-1)...(x-s+1)/s!`` for Poly or rational ``x``."""
    if s < 0:
        return 0 if not isinstance(x, Poly) else ZERO
    if isinstance(x, Poly):
        out = ONE
        for i in range(s):
            out = out * (x - i)
        return out * Fraction(1, factorial(s))
    x = Fraction(x)
    out = Fraction(1)
    for i in range(s):
        out *= x - i
    out /= factorial(s)
    return out.numerator if out.denominator == 1 else out


# parsing ----------------------------------------------------------------
_TOKEN = re.compile(
    r"\s*(?:(?P<op>[+-])|(?P<num>\d+(?:/\d+)?)"
    r"|(?P<func>[A-Da-d])\*_\{-(?P<mode>\d+)\}|(?P<param>lam|mu|[tsXzw])"
    r"|(?P<pow>\^-?\d+)|(?P<junk>\S))"
)


def parse_poly(text: str) -> Poly:
    """Parse the display format produced by ``str(Poly)``.

    Example: ``"-A*_{-2}D*_{-1} + 3/2 B*_{-2}C*_{-1} - lam^2 + 1"``.
    """
    total = ZERO
    sign = 1
    term: Poly | None = None
    coeff = Fraction(1)
    last: Generator | None = None
    pending: list[tuple[Generator, int]] = []

    def flush():
        nonlocal total, term, coeff, pending
        if term is None and not pending and coeff == 1:
            return
        mono = ONE
        for g, e in pending:
            mono = mono * Poly.var(g, exp=e)
        total = total + mono * (sign * coeff)
        term, coeff, pending = None, Fraction(1), []

    pos = 0
    text = text.strip()
    started = False
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            break
        pos = mt.end()
        if mt.group("junk"):
            raise ValueError(f"unexpected character {mt.group('junk')!r} in {text!r}")
        if mt.group("op"):
            if started:
                flush()
            sign = -1 if mt.group("op") == "-" else 1
            started = True
            last = None
            continue
        started = True
        if mt.group("num"):
            coeff *= Fraction(mt.group("num"))
            term = ONE
            last = None
        elif mt.group("func"):
            last = Generator(mt.group("func"), int(mt.group("mode")) - 1)
            pending.append((last, 1))
        elif mt.group("param"):
            last = Generator(mt.group("param"))
            pending.append((last, 1))
        elif mt.group("pow"):
            if last is None:
                raise ValueError(f"exponent without base in {text!r}")
            g, _ = pending.pop()
            pending.append((g, int(mt.group("pow")[1:])))
    if text in ("", "0"):
        return ZERO
    flush()
    return total


def poly_sum(items: Iterable) -> Poly:
    out = ZERO
    for x in items:
        out = out + x
    return out
