"""Canonical JSON-compatible trees: rationals as ``"p/q"`` strings, polynomials as
ordered monomial lists, the spectral/eigenvalue parameter as ``"lam"``."""

from __future__ import annotations

import json
from fractions import Fraction

from .gauge import Connection, MatrixSeries
from .poly import Poly
from .series import LogLaurentSeries, TruncSeries
from .vertex import VACUUM, ModeExpr


def rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, float):
        raise ValueError("floating point values are not accepted; write rationals as \"p/q\"")
    return Fraction(str(text).strip())


def poly_tree(p: Poly) -> list:
    out = []
    for mono, c in p.sorted_terms():
        factors = []
        for g, e in mono:
            name = f"{g.symbol}*" if g.is_functional else g.symbol
            factors.append([name, -1 - g.mode if g.mode is not None else None, e])
        out.append({"coeff": rational(c), "monomial": factors})
    return out


def scalar_tree(c):
    if isinstance(c, Poly):
        return rational(c.constant_value()) if c.is_constant() else {"poly": poly_tree(c)}
    return rational(c)


def to_tree(obj):
    """Dispatch on the library's value types; lists/dicts are mapped recursively."""
    if isinstance(obj, (bool, str)) or obj is None:
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, (Fraction, Poly)):
        return scalar_tree(obj)
    if isinstance(obj, TruncSeries):
        return {"order": obj.order, "coefficients": [scalar_tree(c) for c in obj.coeffs]}
    if isinstance(obj, LogLaurentSeries):
        terms = sorted(obj.terms.items())
        return {"order": obj.order,
                "terms": [{"z_power": n, "lam_power": c, "log_power": j, "coeff": scalar_tree(v)}
                          for (n, c, j), v in terms]}
    if isinstance(obj, MatrixSeries):
        return {"order": obj.order,
                "coefficients": [[[scalar_tree(x) for x in r] for r in obj.coefficient(k)]
                                 for k in range(obj.order)]}
    if isinstance(obj, Connection):
        return {"regular": to_tree(obj.A),
                "singular": [[[scalar_tree(x) for x in r] for r in m] for m in obj.singular]}
    if isinstance(obj, ModeExpr):
        return [{"state": s, "mode": -1 - p, "coeff": scalar_tree(c),
                 "vacuum": s == VACUUM} for (s, p), c in obj.sorted_items()]
    if hasattr(obj, "terms") and isinstance(getattr(obj, "terms"), dict):
        return {s: scalar_tree(c) for s, c in sorted(obj.terms.items())}
    if isinstance(obj, dict):
        return {str(k): to_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_tree(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_tree(obj), indent=2, ensure_ascii=False)
