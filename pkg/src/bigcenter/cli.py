"""``bigcenter`` command line.

Jobs come from a TOML file (``--spec``) and/or flags; the grammar is in
``docs/jobspec.md``.  Exit codes: 0 success, 1 mismatch, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import acceptance, coupling, functionals as fn, gauge, twisted, vertex
from .poly import LAM, ZERO, Poly, parse_poly
from .serialize import parse_rational, to_tree

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

COMMANDS = ("solve", "gauge", "embed", "invariance", "delta", "ope", "commutator", "twist", "selftest")


class JobError(ValueError):
    """Malformed job specification (exit code 2)."""


@dataclass
class JobSpec:
    command: str
    truncation: int = 8
    seed: int = acceptance.DEFAULT_SEED
    output: str = "text"
    connection: list = field(default_factory=list)
    singular: list | None = None
    gauge: list | None = None
    algebra: vertex.VASpec = field(default_factory=vertex.builtin_symplectic_fermions)
    m_range: tuple[int, int] = (0, 2)
    n_range: tuple[int, int] = (0, 2)
    pairs: list | None = None
    mode: int = 1
    criteria: list | None = None
    random_degree: int | None = None


# parsing -----------------------------------------------------------------------
def _entry(x, where: str):
    if isinstance(x, str) and "lam" in x:
        try:
            return parse_poly(x)
        except ValueError as exc:
            raise JobError(f"{where}: {exc}") from None
    try:
        return parse_rational(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise JobError(f"{where}: {exc}") from None


def _matrix(obj, where: str):
    if not (isinstance(obj, list) and len(obj) == 2 and all(isinstance(r, list) and len(r) == 2 for r in obj)):
        raise JobError(f"{where}: expected a 2x2 matrix")
    return [[_entry(obj[i][j], f"{where}[{i}][{j}]") for j in range(2)] for i in range(2)]


def _range(obj, where: str) -> tuple[int, int]:
    if isinstance(obj, int):
        return (obj, obj)
    if isinstance(obj, list) and len(obj) == 2 and all(isinstance(v, int) for v in obj):
        return (obj[0], obj[1])
    raise JobError(f"{where}: expected an integer or [lo, hi]")


def load_job(text: str | None, overrides: dict) -> JobSpec:
    data: dict = {}
    if text is not None:
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise JobError(f"spec parse error: {exc}") from None
    command = overrides.get("command") or data.get("command")
    if command not in COMMANDS:
        raise JobError(f"command: expected one of {', '.join(COMMANDS)}, got {command!r}")
    if data.get("group", "sl2") != "sl2":
        raise JobError("group: only \"sl2\" is supported")
    job = JobSpec(command)
    job.truncation = int(overrides.get("truncation") or data.get("truncation", job.truncation))
    if job.truncation < 2:
        raise JobError("truncation: N must be at least 2")
    job.seed = int(overrides["seed"] if overrides.get("seed") is not None else data.get("seed", job.seed))
    job.output = overrides.get("output") or data.get("output", "text")
    if job.output not in ("text", "structured"):
        raise JobError("output: expected text or structured")
    conn = data.get("connection", {})
    if not isinstance(conn, dict):
        raise JobError("connection: expected a table")
    job.connection = [_matrix(m, f"connection.coefficients[{k}]") for k, m in enumerate(conn.get("coefficients", []))]
    for k, m in enumerate(job.connection):
        if m[0][0] + m[1][1] != 0:
            raise JobError(f"connection.coefficients[{k}]: not traceless")
    if "random_degree" in conn:
        job.random_degree = int(conn["random_degree"])
    if "singular" in conn:
        job.singular = _matrix(conn["singular"], "connection.singular")
    if "gauge" in data:
        job.gauge = [_matrix(m, f"gauge[{k}]") for k, m in enumerate(data["gauge"])]
    alg = data.get("algebra", "symplectic_fermions")
    try:
        job.algebra = vertex.builtin(alg) if isinstance(alg, str) else vertex.parse_vaspec(alg)
    except (KeyError, ValueError, TypeError) as exc:
        raise JobError(f"algebra: {exc}") from None
    modes = data.get("modes", {})
    if "m" in modes:
        job.m_range = _range(modes["m"], "modes.m")
    if "n" in modes:
        job.n_range = _range(modes["n"], "modes.n")
    if "pairs" in modes:
        job.pairs = [tuple(p) for p in modes["pairs"]]
        for p in job.pairs:
            if len(p) != 2 or any(s not in job.algebra.generators for s in p):
                raise JobError(f"modes.pairs: {list(p)} is not a pair of generators")
    job.mode = int(overrides.get("mode") or data.get("mode", 1))
    if job.mode < 1:
        raise JobError("mode: expected a positive integer k for mode -k")
    if overrides.get("criterion"):
        job.criteria = overrides["criterion"]
    elif "criteria" in data:
        job.criteria = [str(c) for c in data["criteria"]]
    return job


def job_connection(job: JobSpec) -> gauge.Connection:
    N = job.truncation
    if job.random_degree is not None:
        return gauge.random_connection(random.Random(job.seed), job.random_degree, N)
    mats = list(job.connection[:N]) + [[[Fraction(0)] * 2 for _ in range(2)]] * max(0, N - len(job.connection))
    return gauge.Connection.from_coefficients(mats, N)


# commands -------------------------------------------------------------------------
class Report:
    def __init__(self):
        self.lines: list[str] = []
        self.data: dict = {}
        self.status = 0

    def text(self, line: str = ""):
        self.lines.append(line)


def cmd_solve(job: JobSpec, rep: Report):
    A = job_connection(job)
    F = gauge.solve_connection(A, [[1, 0], [0, 1]], job.truncation)
    rep.text(f"connection A (mod z^{A.order}):")
    rep.text(str(A))
    rep.text(f"F_A with F_A(0) = 1 (mod z^{F.order}):")
    rep.text(str(F))
    det_ok = F.det() == gauge.MatrixSeries.identity(F.order).det()
    back = gauge.connection_of(F)
    round_ok = back.A.truncate(F.order - 2) == A.A.truncate(F.order - 2)
    rep.text(f"det F_A = 1: {det_ok}")
    rep.text(f"-(dF_A) F_A^-1 = A (mod z^{F.order - 2}): {round_ok}")
    rep.data.update(connection=to_tree(A), solution=to_tree(F), det_is_one=det_ok, round_trip=round_ok)
    rep.status = 0 if det_ok and round_ok else 1


def cmd_gauge(job: JobSpec, rep: Report):
    A = job_connection(job)
    N = job.truncation
    if job.gauge:
        mats = list(job.gauge[:N]) + [[[0, 0], [0, 0]]] * max(0, N - len(job.gauge))
        F = gauge.MatrixSeries.from_coefficients(mats, N)
        new = gauge.gauge_act(F, A)
        rep.text("F (d + A) F^-1 = d + B with B:")
        rep.text(str(new.A))
        rep.data.update(gauge=to_tree(F), result=to_tree(new))
        return
    F = gauge.solve_connection(A, [[1, 0], [0, 1]], N)
    new = gauge.gauge_act(gauge.matrix_inverse(F), A)
    zero = all(not x for k in range(new.A.order) for r in new.A.coefficient(k) for x in r)
    rep.text("F_A^-1 (d + A) F_A = d + B with B:")
    rep.text(str(new.A))
    rep.text(f"B = 0: {zero}")
    rep.data.update(result=to_tree(new), trivialized=zero)
    rep.status = 0 if zero else 1


def cmd_embed(job: JobSpec, rep: Report):
    n = job.mode - 1
    labels = [["a", "b"], ["c", "d"]]
    mat = [[fn.embed_g_in_G(labels[i][j], n) for j in range(2)] for i in range(2)]
    rep.text(f"images of [[a*, b*], [c*, d*]]_{{{-n - 1}}} in O(G[[z]]):")
    for i in range(2):
        for j in range(2):
            rep.text(f"  {labels[i][j]}*_{{{-n - 1}}} = {mat[i][j]}")
    rep.data.update(mode=-n - 1, matrix=[[to_tree(x) for x in r] for r in mat])


def cmd_invariance(job: JobSpec, rep: Report):
    results = {}
    for sym in "abcd":
        for n in range(job.mode):
            e = fn.embed_g_in_G(sym, n)
            ok = all(fn.equal_mod_det(fn.right_translate(h, e), e, seed=job.seed)
                     for h in fn.one_parameter_subgroups().values())
            results[f"{sym}*_{{{-n - 1}}}"] = ok
    spec = job.algebra
    for v in spec.generators:
        results[f"delta({v})"] = coupling.check_invariance(spec, coupling.delta(spec, v))
    for k, ok in results.items():
        rep.text(f"{k}: {'invariant' if ok else 'NOT invariant'}")
    rep.data.update(invariant=results)
    rep.status = 0 if all(results.values()) else 1


def cmd_delta(job: JobSpec, rep: Report):
    spec = job.algebra
    out = {}
    for v in spec.generators:
        e = coupling.delta(spec, v)
        rep.text(f"delta({v}_{{-1}}) = {e}")
        out[v] = to_tree(e)
    rep.data.update(delta=out)


def _series_text(series, var: str = "w", upto: int = 4) -> str:
    parts = []
    for k in range(min(upto, series.order)):
        c = series[k]
        if c:
            mono = "" if k == 0 else (f" {var}" if k == 1 else f" {var}^{k}")
            parts.append(f"({c}){mono}")
    return " + ".join(parts) + " + ..." if parts else "0"


def _ope_name(lead: Poly) -> str | None:
    """Recognize a pole coefficient as +-det(w) or +-x*(w)."""
    for sign, prefix in ((1, ""), (-1, "-")):
        if lead == fn.det_coefficient(0) * sign:
            return f"{prefix}det(w)"
        for sym in "abcd":
            if lead == fn.embed_g_in_G(sym, 0) * sign:
                return f"{prefix}{sym}*(w)"
    return None


def _display(terms: list[tuple[int, str]]) -> str:
    out = ""
    for j, name in terms:
        neg = name.startswith("-")
        body = f"(z-w)^{j} {name.lstrip('-')}"
        out += (f"-{body}" if neg else body) if not out else (f" - {body}" if neg else f" + {body}")
    return out


def cmd_ope(job: JobSpec, rep: Report):
    spec = job.algebra
    N = max(job.truncation, 2)
    pairs = job.pairs or [(u, v) for u in spec.generators for v in spec.generators]
    out = {}
    for u, v in pairs:
        ope = coupling.coupled_ope(spec, u, v)
        named = []
        if ope.poles and all(set(e.terms) == {vertex.VACUUM} for e in ope.poles.values()):
            named = [(j, _ope_name(ope.poles[j].terms[vertex.VACUUM])) for j in sorted(ope.poles)]
        if named and all(name for _, name in named):
            rep.text(f"delta({u})(z) delta({v})(w) ~ {_display(named)}")
        else:
            rep.text(f"delta({u})(z) delta({v})(w) ~")
        if not ope.poles:
            rep.text("  0")
        entry = {}
        for j in sorted(ope.poles):
            elem = ope.poles[j]
            rep.text(f"  (z-w)^{j}: {elem}")
            for s, series in ope.series(j, N).items():
                rep.text(f"      {s if s != vertex.VACUUM else '1'}-leg w-series: {_series_text(series)}")
                lead = elem.terms[s]
                for sign in (1, -1):
                    if fn.equal_mod_det(lead, sign, seed=job.seed):
                        rep.text(f"      = {'-' if sign < 0 else ''}det(w), which is {sign} in O(SL_2[[z]])")
            entry[str(j)] = {"element": to_tree(elem),
                             "series": {s: to_tree(ser) for s, ser in ope.series(j, N).items()}}
        out[f"{u}{v}"] = entry
    rep.data.update(ope=out)


def cmd_commutator(job: JobSpec, rep: Report):
    spec = job.algebra
    N = job.truncation
    if N < 1 - spec.l_min:
        raise coupling.InsufficientTruncation(1 - spec.l_min, f"every A^[s] with s <= {-spec.l_min - 1} must contribute")
    A = job_connection(job)
    pairs = job.pairs or [(u, v) for u in spec.generators for v in spec.generators]
    results = []
    mismatch = False
    for a, b in pairs:
        for m in range(job.m_range[0], job.m_range[1] + 1):
            for n in range(job.n_range[0], job.n_range[1] + 1):
                f, o, d = coupling.compare_twisted(spec, a, m, b, n, A, N)
                floor = coupling.comparison_floor(spec, m, n, N)
                rep.text(f"[{a}^{{d+A}}_{{{-m - 1}}}, {b}^{{d+A}}_{{{-n - 1}}}]  "
                         f"(compared on output modes <= {-1 - floor})")
                rep.text(f"  formula: {f}")
                rep.text(f"  oracle:  {o}")
                rep.text(f"  diff:    {d}")
                mismatch |= bool(d)
                entry = {"a": a, "m": m, "b": b, "n": n, "p_min": floor,
                         "formula": to_tree(f), "oracle": to_tree(o), "diff": to_tree(d)}
                if spec.l_min >= -2:
                    full = coupling.twisted_commutator_formula(spec, a, m, b, n, A, N)
                    special = coupling.l2_specialization(spec, a, m, b, n, A, N)
                    rep.text(f"  l=-2 form: {special}")
                    rep.text(f"  l=-2 form equals general formula: {special == full}")
                    mismatch |= special != full
                    entry["l2_form"] = to_tree(special)
                    entry["l2_agrees"] = special == full
                results.append(entry)
    rep.data.update(connection=to_tree(A), commutators=results)
    rep.status = 1 if mismatch else 0


def cmd_twist(job: JobSpec, rep: Report):
    spec = job.algebra
    A0 = job.singular or [[LAM, ZERO], [ZERO, -LAM]]
    try:
        nf = twisted.fnorm(A0)
    except ValueError as exc:
        raise JobError(f"connection.singular: {exc}") from None
    rep.text(f"normal form ({nf.kind}): F_norm = [[{nf.F[0][0]}, {nf.F[0][1]}], [{nf.F[1][0]}, {nf.F[1][1]}]]")
    rep.text("(d + A0/z) F_norm = 0: True")
    rep.data.update(kind=nf.kind, normal_form=[[to_tree(e) for e in r] for r in nf.F])
    if nf.kind != "semisimple":
        rep.text("log-twisted operators not implemented")
        return
    N = job.truncation
    ops = {}
    for sym in "ABCD":
        Y = twisted.twisted_vertex_op(sym, job.mode - 1, nf, N)
        rep.text(f"Y({sym}*_{{{-job.mode}}}, z) = {Y}")
        ops[sym] = to_tree(Y)
    pairs = job.pairs or [(u, v) for u in spec.generators for v in spec.generators]
    comms = []
    status = 0
    for a, b in pairs:
        for m in range(job.m_range[0], job.m_range[1] + 1):
            for n in range(job.n_range[0], job.n_range[1] + 1):
                try:
                    red = twisted.regular_singular_commutator(spec, a, m, b, n, lam=nf.lam)
                    full = twisted.regular_singular_commutator(spec, a, m, b, n, lam=nf.lam, reduced=False)
                except ValueError as exc:
                    rep.text(f"[{a}, {b}]: {exc}")
                    continue
                rep.text(f"[{a}^{{d+A}}_{{{-m - 1}}}, {b}^{{d+A}}_{{{-n - 1}}}] = {red}")
                if red != full:
                    status = 1
                    rep.text(f"  MISMATCH with unreduced form: {full}")
                comms.append({"a": a, "m": m, "b": b, "n": n, "reduced": to_tree(red), "unreduced_agrees": red == full})
    rep.data.update(vertex_ops=ops, commutators=comms)
    rep.status = status


def cmd_selftest(job: JobSpec, rep: Report):
    try:
        results = acceptance.run_all(job.criteria, seed=job.seed)
    except KeyError as exc:
        raise JobError(str(exc.args[0])) from None
    for r in results:
        rep.text(r.line())
    rep.data.update(criteria=[{"id": r.id, "title": r.title, "passed": r.passed, "detail": r.detail}
                              for r in results])
    rep.status = 0 if all(r.passed for r in results) else 1


HANDLERS = {
    "solve": cmd_solve, "gauge": cmd_gauge, "embed": cmd_embed, "invariance": cmd_invariance,
    "delta": cmd_delta, "ope": cmd_ope, "commutator": cmd_commutator, "twist": cmd_twist,
    "selftest": cmd_selftest,
}


def run(job: JobSpec) -> Report:
    rep = Report()
    HANDLERS[job.command](job, rep)
    return rep


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bigcenter", description="Exact computations for coupled vertex algebras over sl_2 connections.")
    p.add_argument("command", nargs="?", choices=COMMANDS, help="operation (may instead be given in the spec file)")
    p.add_argument("--spec", help="TOML job specification")
    p.add_argument("--seed", type=int)
    p.add_argument("--truncation", type=int, help="series truncation order N")
    p.add_argument("--output", choices=("text", "structured"))
    p.add_argument("--criterion", action="append", help="selftest filter (repeatable)")
    p.add_argument("--mode", type=int, help="functional mode -k for embed/twist (default 1)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    text = None
    if args.spec:
        try:
            with open(args.spec, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            print(f"error: cannot read spec: {exc}", file=sys.stderr)
            return 2
    overrides = {"command": args.command, "seed": args.seed, "truncation": args.truncation,
                 "output": args.output, "criterion": args.criterion, "mode": args.mode}
    try:
        job = load_job(text, overrides)
        rep = run(job)
    except JobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except coupling.InsufficientTruncation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if job.output == "structured":
        print(json.dumps({"command": job.command, "status": rep.status, "result": rep.data},
                         indent=2, ensure_ascii=False))
    else:
        print("\n".join(rep.lines))
    return rep.status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
