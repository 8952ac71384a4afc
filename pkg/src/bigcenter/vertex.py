"""Finite presentations of vertex algebras with linear OPE closure.

States are names: the vacuum ``"1"`` and the generators.  Vectors are dicts
``state -> coefficient``.  ``ope[(u, l, v)]`` is ``u_{(-l-1)} v`` for ``l < 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .poly import Poly, binom

VACUUM = "1"

Vector = dict  # state -> Fraction | Poly


def _clean(vec: Mapping) -> dict:
    return {k: v for k, v in vec.items() if v}


def vec_add(*vecs: Mapping) -> dict:
    out: dict = {}
    for v in vecs:
        for k, c in v.items():
            out[k] = out[k] + c if k in out else c
    return _clean(out)


def vec_scale(c, vec: Mapping) -> dict:
    return _clean({k: c * v for k, v in vec.items()})


def as_vector(v) -> dict:
    if isinstance(v, str):
        return {v: Fraction(1)}
    return _clean(dict(v))


@dataclass(frozen=True)
class Block:
    """``kind`` is ``"standard"`` (a doublet ``(x, y)``) or ``"trivial"``."""
    kind: str
    states: tuple[str, ...]


@dataclass(frozen=True)
class VASpec:
    name: str
    generators: tuple[str, ...]
    parity: Mapping[str, int]
    blocks: tuple[Block, ...]
    ope: Mapping[tuple[str, int, str], Mapping[str, object]]
    l_min: int

    def __post_init__(self):
        for (u, l, v), out in self.ope.items():
            if not (self.l_min <= l < 0):
                raise ValueError(f"OPE entry {(u, l, v)} outside singular range [{self.l_min}, -1]")
            for s in (u, v, *out):
                if s not in self.states:
                    raise ValueError(f"unknown state {s!r}")
        covered = [s for b in self.blocks for s in b.states]
        if sorted(covered) != sorted(self.generators):
            raise ValueError("every generator must lie in exactly one representation block")
        for b in self.blocks:
            if b.kind == "standard" and len(b.states) != 2:
                raise ValueError("standard block needs two states")
            if b.kind not in ("standard", "trivial"):
                raise ValueError(f"unknown block kind {b.kind!r}")

    @property
    def states(self) -> tuple[str, ...]:
        return (VACUUM,) + tuple(self.generators)

    def is_odd(self, state: str) -> bool:
        return bool(self.parity.get(state, 0))

    def ope_coeff(self, u: str, l: int, v: str) -> dict:
        return dict(self.ope.get((u, l, v), {}))

    def ope_lin(self, uvec: Mapping, l: int, vvec: Mapping) -> dict:
        """Bilinear extension of ``u_{(-l-1)} v``; the vacuum is killed by ``l < 0`` products."""
        out: dict = {}
        for u, cu in uvec.items():
            if u == VACUUM:
                continue
            for v, cv in vvec.items():
                if v == VACUUM:
                    continue
                for w, c in self.ope.get((u, l, v), {}).items():
                    term = cu * cv * c
                    out[w] = out[w] + term if w in out else term
        return _clean(out)

    # representation --------------------------------------------------------
    def act(self, g, vec: Mapping, trivial=1) -> dict:
        """Apply the matrix ``g`` on standard blocks (``g.x = g11 x + g21 y``)
        and multiply trivial states (vacuum included) by ``trivial``."""
        out: dict = {}
        pos = {}
        for b in self.blocks:
            if b.kind == "standard":
                pos[b.states[0]] = (b, 0)
                pos[b.states[1]] = (b, 1)
        for s, c in vec.items():
            if s in pos:
                b, j = pos[s]
                for i in range(2):
                    term = g[i][j] * c
                    t = b.states[i]
                    out[t] = out[t] + term if t in out else term
            else:
                term = trivial * c
                out[s] = out[s] + term if s in out else term
        return _clean(out)

    def lie_act(self, X, vec: Mapping) -> dict:
        return self.act(X, vec, trivial=0)

    def weight(self, state) -> int | None:
        """Eigenvalue of ``diag(1, -1)``; ``None`` if not an eigenvector."""
        vec = as_vector(state)
        image = self.lie_act([[1, 0], [0, -1]], vec)
        for w in (1, -1, 0):
            if vec_add(image, vec_scale(-w, vec)) == {}:
                return w
        return None


def builtin_symplectic_fermions() -> VASpec:
    """Odd doublet with ``x(z) y(w) ~ (z-w)^-2``."""
    return builtin_doublet(2)


def builtin_doublet(pole: int = 2) -> VASpec:
    """Doublet ``x, y`` with ``x_{(pole-1)} y = 1`` and ``y_{(pole-1)} x = -1``.

    ``pole=1`` is the symplectic boson pair, ``pole=2`` symplectic fermions.
    The parity is forced to ``pole-1 mod 2`` by skew-symmetry and invariance
    of the antisymmetric pairing.
    """
    if pole < 1:
        raise ValueError("pole must be positive")
    par = (pole - 1) % 2
    name = {1: "symplectic_bosons", 2: "symplectic_fermions"}.get(pole, f"doublet_pole{pole}")
    ope = {("x", -pole, "y"): {VACUUM: Fraction(1)}, ("y", -pole, "x"): {VACUUM: Fraction(-1)}}
    return VASpec(name, ("x", "y"), {"x": par, "y": par},
                  (Block("standard", ("x", "y")),), ope, -pole)


def builtin_central_doublet() -> VASpec:
    """Even doublet with ``x_{(0)} y = h = -y_{(0)} x`` and ``h`` central (trivial block)."""
    ope = {("x", -1, "y"): {"h": Fraction(1)}, ("y", -1, "x"): {"h": Fraction(-1)}}
    return VASpec("central_doublet", ("x", "y", "h"), {"x": 0, "y": 0, "h": 0},
                  (Block("standard", ("x", "y")), Block("trivial", ("h",))), ope, -1)


BUILTINS = {
    "symplectic_fermions": builtin_symplectic_fermions,
    "symplectic_bosons": lambda: builtin_doublet(1),
    "doublet_pole3": lambda: builtin_doublet(3),
    "central_doublet": builtin_central_doublet,
}


def builtin(name: str) -> VASpec:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ValueError(f"unknown builtin algebra {name!r}; choose from {sorted(BUILTINS)}") from None


# mode expressions ------------------------------------------------------------
@dataclass(frozen=True)
class ModeExpr:
    """``sum c * (state)_{-1-p}``, keyed by ``(state, p)``.

    Vacuum modes are normalized: ``(1)_{-1-p} = delta_{p,0} id``.
    """
    terms: Mapping[tuple[str, int], object] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (s, p), c in self.terms.items():
            if s == VACUUM and p != 0:
                continue
            if c:
                clean[(s, p)] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def mode(cls, vec: Mapping, p: int, coeff=1) -> "ModeExpr":
        return cls({(s, p): coeff * c for s, c in vec.items()})

    def __add__(self, other: "ModeExpr") -> "ModeExpr":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return type(self)(out)

    def __neg__(self) -> "ModeExpr":
        return type(self)({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "ModeExpr") -> "ModeExpr":
        return self + (-other)

    def scale(self, c) -> "ModeExpr":
        return type(self)({k: c * v for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModeExpr):
            return NotImplemented
        return not (self - other).terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def restrict(self, pred) -> "ModeExpr":
        return type(self)({k: c for k, c in self.terms.items() if pred(k[0], k[1])})

    def map_coeffs(self, f) -> "ModeExpr":
        return type(self)({k: f(c) for k, c in self.terms.items()})

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda kc: (kc[0][1], kc[0][0]))

    superscript = ""

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (s, p), c in self.sorted_items():
            sym = "id" if s == VACUUM else f"{s}{self.superscript}_{{{-1 - p}}}"
            parts.append((c, sym))
        return _join_terms(parts)


def _join_terms(parts) -> str:
    out = ""
    for c, sym in parts:
        if isinstance(c, Poly) and not c.is_constant():
            text = f"({c}) {sym}"
            sign = "+"
        else:
            val = c.constant_value() if isinstance(c, Poly) else Fraction(c)
            sign = "-" if val < 0 else "+"
            mag = abs(val)
            text = sym if mag == 1 else f"{mag} {sym}"
        if not out:
            out = text if sign == "+" else f"-{text}"
        else:
            out += f" {sign} {text}"
    return out


def untwisted_commutator(spec: VASpec, u, m: int, v, n: int) -> ModeExpr:
    """``[u_{-m-1}, v_{-n-1}] = sum_l binom(-m-1, -l-1) (u_{(-l-1)} v)_{-1-(m+n-l)}``.

    ``u, v`` are states or vectors in the generator span; for two odd
    arguments the bracket is the anticommutator.
    """
    uvec, vvec = as_vector(u), as_vector(v)
    out = ModeExpr()
    for l in range(spec.l_min, 0):
        w = spec.ope_lin(uvec, l, vvec)
        if w:
            out = out + ModeExpr.mode(w, m + n - l, binom(-m - 1, -l - 1))
    return out


def super_sign(spec: VASpec, u: str, v: str) -> int:
    return -1 if spec.is_odd(u) and spec.is_odd(v) else 1


def check_equivariance(spec: VASpec, gmat, reduce=None) -> bool:
    """``(g.u)_{(j)}(g.v) = g.(u_{(j)} v)`` for all generator pairs and singular ``j``.

    ``reduce`` post-processes coefficients (e.g. imposing ``det g = 1``).
    """
    reduce = reduce or (lambda c: c)
    for u in spec.generators:
        for v in spec.generators:
            for l in range(spec.l_min, 0):
                lhs = spec.ope_lin(spec.act(gmat, {u: 1}), l, spec.act(gmat, {v: 1}))
                rhs = spec.act(gmat, spec.ope_coeff(u, l, v))
                diff = vec_add(lhs, vec_scale(-1, rhs))
                if any(reduce(c) for c in diff.values()):
                    return False
    return True


def parse_vaspec(data: Mapping) -> VASpec:
    """Build a ``VASpec`` from a plain mapping (the CLI's inline algebra table).

    Keys: ``generators``, ``parity`` (list of 0/1), ``blocks`` (list of
    ``{kind, states}``), ``ope`` (list of ``{u, l, v, out: {state: "p/q"}}``), ``l_min``.
    """
    gens = tuple(data["generators"])
    parity = dict(zip(gens, data.get("parity", [0] * len(gens))))
    blocks = tuple(Block(b["kind"], tuple(b["states"])) for b in data["blocks"])
    ope = {}
    for entry in data.get("ope", []):
        key = (entry["u"], int(entry["l"]), entry["v"])
        ope[key] = {s: Fraction(c) for s, c in entry["out"].items()}
    l_min = int(data.get("l_min", min((k[1] for k in ope), default=-1)))
    return VASpec(data.get("name", "inline"), gens, parity, blocks, ope, l_min)


def states_of(vecs: Iterable[Mapping]) -> set[str]:
    return {s for v in vecs for s in v}
