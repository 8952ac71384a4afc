"""Matrix-valued series, regular connections and the gauge action.

Matrices are square of any size; SL_2 is the case exercised throughout, the
cofactor-based inverse works unchanged for SL_n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from .poly import ONE, Poly, ZERO
from .series import NonUnitError, TruncSeries


class NotInvertibleError(ArithmeticError):
    pass


def _is_zero(x) -> bool:
    return not x


def _perm_sign(p: Sequence[int]) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


class MatrixSeries:
    """Square matrix of :class:`TruncSeries`, all truncated at ``order``."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence[TruncSeries]]):
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        order = min(e.order for r in rows for e in r)
        self.rows = tuple(tuple(e if e.order == order else e.truncate(order) for e in r) for r in rows)

    # construction -------------------------------------------------------
    @classmethod
    def from_coefficients(cls, mats: Sequence[Sequence[Sequence]], order: int) -> "MatrixSeries":
        """``sum_k mats[k] z^k``; coefficients past ``len(mats)`` are zero."""
        if not mats:
            raise ValueError("need at least one coefficient matrix (use identity/zero)")
        n = len(mats[0])
        return cls([[TruncSeries([m[i][j] for m in mats[:order]], order) for j in range(n)]
                    for i in range(n)])

    @classmethod
    def constant(cls, mat: Sequence[Sequence], order: int) -> "MatrixSeries":
        return cls.from_coefficients([mat], order)

    @classmethod
    def identity(cls, order: int, size: int = 2) -> "MatrixSeries":
        return cls.constant([[1 if i == j else 0 for j in range(size)] for i in range(size)], order)

    @classmethod
    def zero(cls, order: int, size: int = 2) -> "MatrixSeries":
        return cls.constant([[0] * size for _ in range(size)], order)

    # inspection ---------------------------------------------------------
    @property
    def size(self) -> int:
        return len(self.rows)

    @property
    def order(self) -> int:
        return self.rows[0][0].order

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def coefficient(self, k: int) -> list[list]:
        return [[e[k] for e in r] for r in self.rows]

    def coefficients(self) -> list[list[list]]:
        return [self.coefficient(k) for k in range(self.order)]

    def truncate(self, order: int) -> "MatrixSeries":
        return MatrixSeries([[e.truncate(order) for e in r] for r in self.rows])

    def map(self, f) -> "MatrixSeries":
        return MatrixSeries([[e.map(f) for e in r] for r in self.rows])

    # arithmetic ---------------------------------------------------------
    def __add__(self, other: "MatrixSeries") -> "MatrixSeries":
        return MatrixSeries([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "MatrixSeries":
        return MatrixSeries([[-a for a in r] for r in self.rows])

    def __sub__(self, other: "MatrixSeries") -> "MatrixSeries":
        return self + (-other)

    def __mul__(self, other) -> "MatrixSeries":
        if not isinstance(other, MatrixSeries):
            return MatrixSeries([[a * other for a in r] for r in self.rows])
        n = self.size
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = self.rows[i][0] * other.rows[0][j]
                for k in range(1, n):
                    acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            out.append(row)
        return MatrixSeries(out)

    def __rmul__(self, other) -> "MatrixSeries":
        return MatrixSeries([[other * a for a in r] for r in self.rows])

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixSeries):
            return NotImplemented
        return all(a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    def __hash__(self):
        return hash(self.rows)

    def derivative(self) -> "MatrixSeries":
        return MatrixSeries([[e.derivative() for e in r] for r in self.rows])

    def trace(self) -> TruncSeries:
        acc = self.rows[0][0]
        for i in range(1, self.size):
            acc = acc + self.rows[i][i]
        return acc

    def det(self) -> TruncSeries:
        n = self.size
        if n == 2:
            (a, b), (c, d) = self.rows
            return a * d - b * c
        total = None
        for p in permutations(range(n)):
            term = self.rows[0][p[0]]
            for i in range(1, n):
                term = term * self.rows[i][p[i]]
            term = term * _perm_sign(p)
            total = term if total is None else total + term
        return total

    def adjugate(self) -> "MatrixSeries":
        """Transposed cofactor matrix, so that ``F adj(F) = det(F) 1``."""
        n = self.size
        if n == 1:
            return MatrixSeries([[TruncSeries.constant(1, self.order)]])
        if n == 2:
            (a, b), (c, d) = self.rows
            return MatrixSeries([[d, -b], [-c, a]])
        cof = []
        for i in range(n):
            row = []
            for j in range(n):
                minor = MatrixSeries([[self.rows[r][s] for s in range(n) if s != j]
                                      for r in range(n) if r != i])
                row.append(minor.det() * (-1) ** (i + j))
            cof.append(row)
        return MatrixSeries([[cof[j][i] for j in range(n)] for i in range(n)])

    def inverse(self) -> "MatrixSeries":
        return matrix_inverse(self)

    def is_traceless(self) -> bool:
        return self.trace().is_zero()

    def __str__(self) -> str:
        lines = []
        for k in range(self.order):
            m = self.coefficient(k)
            if all(_is_zero(x) for r in m for x in r):
                continue
            lines.append(f"z^{k}: " + "[" + "; ".join(", ".join(str(x) for x in r) for r in m) + "]")
        return "\n".join(lines) if lines else "0"

    def __repr__(self) -> str:
        return f"MatrixSeries(order={self.order}, size={self.size})"


def matrix_inverse(F: MatrixSeries) -> MatrixSeries:
    """Inverse via adjugate and series inversion of the determinant."""
    try:
        inv_det = F.det().invert()
    except NonUnitError:
        raise NotInvertibleError("not invertible at z=0") from None
    return F.adjugate() * inv_det


def _trace_zero_mat(m) -> bool:
    return _is_zero(sum((m[i][i] for i in range(1, len(m))), m[0][0]))


@dataclass(frozen=True)
class Connection:
    """``d + A(z)`` with regular part ``A`` and optional polar coefficients.

    ``singular[k]`` is the coefficient of ``z^(-k-1)``.
    """

    A: MatrixSeries
    singular: tuple = field(default=())
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.check:
            for k in range(self.A.order):
                if not _trace_zero_mat(self.A.coefficient(k)):
                    raise ValueError(f"connection coefficient at z^{k} is not traceless")
            for k, m in enumerate(self.singular):
                if not _trace_zero_mat(m):
                    raise ValueError(f"singular coefficient z^{-k - 1} is not traceless")

    @classmethod
    def from_coefficients(cls, mats, order: int, singular=()) -> "Connection":
        return cls(MatrixSeries.from_coefficients(mats, order), tuple(singular))

    @classmethod
    def zero(cls, order: int, size: int = 2) -> "Connection":
        return cls(MatrixSeries.zero(order, size))

    @property
    def order(self) -> int:
        return self.A.order

    @property
    def is_regular(self) -> bool:
        return not any(any(not _is_zero(x) for r in m for x in r) for m in self.singular)

    def coefficient(self, k: int):
        """``A_{-k-1}``, the coefficient of ``z^k``."""
        return self.A.coefficient(k)

    def truncate(self, order: int) -> "Connection":
        return Connection(self.A.truncate(order), self.singular, self.check)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Connection):
            return NotImplemented
        return self.A == other.A and self.is_regular == other.is_regular

    def __hash__(self):
        return hash(self.A)

    def __str__(self) -> str:
        s = str(self.A)
        if self.singular:
            s += "\nsingular: " + "; ".join(str(m) for m in self.singular)
        return s


def _require_regular(A: Connection):
    if not A.is_regular:
        raise ValueError("regular connection required (singular connections belong to the twisted module)")


def gauge_act(F: MatrixSeries, A: Connection) -> Connection:
    """``F(d + A)F^-1 = d + (-(dF)F^-1 + F A F^-1)``, known mod ``z^(N-1)``."""
    _require_regular(A)
    Finv = matrix_inverse(F)
    new = -(F.derivative() * Finv) + F * A.A * Finv
    return Connection(new, check=False)


def connection_of(F: MatrixSeries) -> Connection:
    """``-(dF) F^-1`` for ``F`` with invertible constant term."""
    A = -(F.derivative() * matrix_inverse(F))
    if not A.is_traceless():
        raise ValueError("-(dF)F^-1 is not traceless: F is not in SL[[z]]")
    return Connection(A, check=False)


def solve_connection(A: Connection, F0, N: int) -> MatrixSeries:
    """Unique ``F`` with ``dF + A F = 0`` and ``F(0) = F0``, modulo ``z^N``.

    Recursion ``F_{m+1} = -1/(m+1) sum_{i+j=m} A_i F_j``; works for
    non-commuting coefficients.
    """
    _require_regular(A)
    if A.order < N - 1:
        raise ValueError(f"connection known to order {A.order}; need >= {N - 1} for N={N}")
    n = A.A.size
    coeffs = [[[F0[i][j] for j in range(n)] for i in range(n)]]
    Acs = [A.coefficient(k) for k in range(N - 1)]
    for m in range(N - 1):
        nxt = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = 0
                for a in range(m + 1):
                    Ai, Fj = Acs[a], coeffs[m - a]
                    for r in range(n):
                        if _is_zero(Ai[i][r]) or _is_zero(Fj[r][j]):
                            continue
                        acc = acc + Ai[i][r] * Fj[r][j]
                row.append(acc * Fraction(-1, m + 1))
            nxt.append(row)
        coeffs.append(nxt)
    return MatrixSeries.from_coefficients(coeffs, N)


@dataclass(frozen=True)
class AutFamily:
    """Solutions of ``dF = [F, A]`` with symbolic initial value.

    ``F`` has Poly entries in ``parameters``; members are obtained by
    substituting values satisfying ``constraint == 0``.
    """

    parameters: tuple
    F: MatrixSeries
    constraint: Poly

    def member(self, values) -> MatrixSeries:
        vals = dict(zip(self.parameters, values))
        if self.constraint.subs(vals) != 0:
            raise ValueError("parameter values violate the determinant constraint")
        return self.F.map(lambda c: _to_rational(c.subs(vals)) if isinstance(c, Poly) else c)


def _to_rational(p: Poly):
    return p.constant_value() if p.is_constant() else p


def automorphism_space(A, N: int) -> AutFamily:
    """``Aut(d + A)`` as the family ``F(0) = [[A, B], [C, D]]`` propagated by
    ``F_{m+1} = 1/(m+1) sum_{i+j=m} (F_i A_j - A_j F_i)``.

    ``A`` may be a :class:`Connection` or a bare :class:`MatrixSeries`; the
    equation only sees ``A`` modulo scalars, so non-traceless input is
    accepted.
    """
    from .poly import Generator

    M = A.A if isinstance(A, Connection) else A
    if isinstance(A, Connection):
        _require_regular(A)
    if M.size != 2:
        raise NotImplementedError("automorphism families are parametrised for 2x2 only")
    if M.order < N - 1:
        raise ValueError(f"connection known to order {M.order}; need >= {N - 1} for N={N}")
    params = tuple(Generator(s) for s in ("A", "B", "C", "D"))
    P = [Poly.var(g) for g in params]
    coeffs = [[[P[0], P[1]], [P[2], P[3]]]]
    Acs = [M.coefficient(k) for k in range(N - 1)]
    for m in range(N - 1):
        nxt = [[ZERO, ZERO], [ZERO, ZERO]]
        for a in range(m + 1):
            Am, Fm = Acs[a], coeffs[m - a]
            for i in range(2):
                for j in range(2):
                    acc = ZERO
                    for r in range(2):
                        acc = acc + Fm[i][r] * Am[r][j] - Am[i][r] * Fm[r][j]
                    nxt[i][j] = nxt[i][j] + acc
        coeffs.append([[x * Fraction(1, m + 1) for x in r] for r in nxt])
    F = MatrixSeries.from_coefficients(coeffs, N)
    return AutFamily(params, F, P[0] * P[3] - P[1] * P[2] - ONE)


def random_connection(rng, degree: int, order: int, size: int = 2, bound: int = 3) -> Connection:
    """Traceless connection with random small rational coefficients up to ``z^degree``."""
    mats = []
    for k in range(order):
        m = [[Fraction(0)] * size for _ in range(size)]
        if k <= degree:
            for i in range(size):
                for j in range(size):
                    if (i, j) != (size - 1, size - 1):
                        m[i][j] = Fraction(rng.randint(-bound, bound), rng.randint(1, 2))
            m[size - 1][size - 1] = -sum(m[i][i] for i in range(size - 1))
        mats.append(m)
    return Connection.from_coefficients(mats, order)
