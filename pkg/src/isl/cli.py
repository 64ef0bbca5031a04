"""Command line entry point: ``isl COMMAND FILE [options]``.

Exit codes: 0 success, 1 negative analysis verdict, 2 input error,
3 internal verification failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction

from .classify import (
    LinearPartFamily, canonical_linear_form, classify_singular_point,
    joint_eigenbasis, linear_parts_of,
)
from .dsl import ParseError, parse_system, render_system
from .errors import AnalysisError, DegenerateError, DivisionError, InputError, VerificationError
from .exactalg import as_fraction
from .normalform import divide_by_cartan, geometric_linearize
from .report import digest, dumps, make_report, rational
from .resonance import DEFAULT_DEGREE_CAP, monoid_hilbert_basis, resonant_monomials_up_to_degree
from .series import lie_bracket, render_monomial
from .sysmodel import SystemFamily, reduce_at_singular_point, suspend_family, verify

COMMANDS = ("check", "classify", "resonance", "normalize", "divide", "reduce", "canonical", "suspend")


class _UsageError(InputError):
    pass


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="isl", description="Analyze singularities of integrable polynomial systems.")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def cmd(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="system file (.sys)")
        p.add_argument("--json", action="store_true", help="emit a JSON report")
        return p

    cmd("check", "verify commutation, first integrals and independence")
    p = cmd("classify", "classify the singular point (default: origin)")
    p.add_argument("--point", help="declared point name or comma-separated rationals")
    p = cmd("resonance", "resonance lattice and Hilbert basis of the linear part at the origin")
    p.add_argument("--max-degree", type=int, help="also list resonant monomials up to this degree")
    p = cmd("normalize", "geometric linearization at the origin")
    p.add_argument("--degree", type=int, help="normalization degree (default: file truncation)")
    p.add_argument("--emit-change", action="store_true", help="print the coordinate change")
    p = cmd("divide", "divide a field by the linear parts of the system")
    p.add_argument("--field", required=True, help="name of the field to divide")
    p.add_argument("--degree", type=int, help="truncation degree (default: file truncation)")
    p = cmd("reduce", "reduce at a singular point")
    p.add_argument("--point", help="declared point name or comma-separated rationals")
    cmd("canonical", "canonical generators of the linear part at the origin")
    p = cmd("suspend", "suspend a parameter family into one system")
    p.add_argument("--params", type=int, default=1, help="number of trailing variables that are parameters")
    return ap


def _point(S, text):
    if text is None:
        return tuple(Fraction(0) for _ in range(S.nvars))
    if text in S.points:
        return S.points[text]
    try:
        coords = tuple(as_fraction(Fraction(part.strip())) for part in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise _UsageError(f"--point {text!r} is neither a declared point nor a list of rationals") from None
    if len(coords) != S.nvars:
        raise _UsageError(f"--point has {len(coords)} coordinates, expected {S.nvars}")
    return coords


def _degree_cap() -> int:
    raw = os.environ.get("ISL_DEGREE_CAP")
    if raw is None:
        return DEFAULT_DEGREE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise _UsageError(f"ISL_DEGREE_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise _UsageError("ISL_DEGREE_CAP must be positive")
    return cap


def _mono(e, names):
    return {"exponent": list(e), "monomial": render_monomial(e, names) or "1"}


def _cartan(ct):
    return None if ct is None else {"h": ct.h, "e": ct.e, "null": ct.null}


# ---------------------------------------------------------------------------
# command handlers: each returns (exit code, result dict, text lines)


def _check(S, args):
    rep = verify(S)
    res = {"kind": "check", "type": [S.p, S.q], "m": S.m,
           "commutation_ok": rep.commutation_ok, "integrals_ok": rep.integrals_ok,
           "independence_fields_ok": rep.independence_fields_ok,
           "independence_integrals_ok": rep.independence_integrals_ok,
           "witnesses": rep.witnesses, "notes": rep.notes, "ok": rep.ok}
    lines = [f"system of type ({S.p},{S.q}) on {S.m} variables, truncation {S.order}"]
    for key in ("commutation", "integrals", "independence_fields", "independence_integrals"):
        flag = getattr(rep, f"{key}_ok")
        lines.append(f"{key.replace('_', ' ')}: {'ok' if flag else 'FAILED'}")
        lines += [f"  {w}" for w in rep.witnesses[key]]
    lines += [f"note: {n}" for n in rep.notes]
    return (0 if rep.ok else 1), res, lines


def _classify(S, args):
    z = _point(S, args.point)
    res = {"kind": "classify", "point": [rational(v) for v in z]}
    try:
        c = classify_singular_point(S, z)
    except DegenerateError as exc:
        v = exc.verdict
        red = reduce_at_singular_point(S, z)
        res.update(corank=S.nvars - len(red.rectified), regular_rank=len(red.rectified), cartan=None,
                   verdict=v.verdict, witnesses=list(v.witnesses), notes=list(v.notes))
        return 1, res, [v.summary()]
    verdict = "regular" if c.verdict is None else c.verdict.verdict
    witnesses = [] if c.verdict is None else list(c.verdict.witnesses)
    res.update(corank=c.corank, regular_rank=c.regular_rank, cartan=_cartan(c.cartan),
               verdict=verdict, witnesses=witnesses, notes=list(c.notes))
    lines = [verdict if verdict != "not-applicable" else c.verdict.summary(),
             f"corank {c.corank}, regular rank {c.regular_rank}"]
    if c.cartan is not None:
        lines.append(f"Cartan type (h, e) = ({c.cartan.h}, {c.cartan.e})"
                     + (f", {c.cartan.null} null direction(s)" if c.cartan.null else ""))
    lines += [f"note: {n}" for n in c.notes]
    code = 0 if verdict in ("nondegenerate", "regular") else 1
    return code, res, lines


def _coefficients(S):
    family, _ = linear_parts_of(S)
    mats = family.matrices
    m = family.m
    if all(A[i, j] == 0 for A in mats for i in range(m) for j in range(m) if i != j):
        return [[A[j, j] for j in range(m)] for A in mats], "original", list(S.var_names)
    eb = joint_eigenbasis(family)
    return [list(r) for r in eb.c], "eigen", [f"w{j + 1}" for j in range(m)]


def _resonance(S, args):
    C, coords, names = _coefficients(S)
    lat = monoid_hilbert_basis(C, _degree_cap())
    res = {"kind": "resonance", "coordinates": coords, "coefficients": [[str(x) for x in r] for r in C],
           "space_dimension": lat.dimension, "space_basis": [[rational(x) for x in v] for v in lat.space],
           "lattice_basis": [list(v) for v in lat.lattice.basis],
           "hilbert_basis": [_mono(e, names) for e in lat.hilbert_basis],
           "monoid_dimension": lat.monoid_dimension, "full_dimension": lat.full_dimension, "notes": []}
    lines = []
    if coords == "eigen":
        lines.append("linear part is not diagonal; monomials are in joint eigen-coordinates w")
        res["notes"].append("monomials refer to joint eigen-coordinates")
    lines.append(f"resonance space dimension {lat.dimension}")
    lines.append(f"Hilbert basis ({len(lat.hilbert_basis)}): "
                 + (", ".join(render_monomial(e, names) for e in lat.hilbert_basis) or "none"))
    lines.append(f"monoid dimension {lat.monoid_dimension}")
    if args.max_degree is not None:
        if args.max_degree < 0:
            raise _UsageError("--max-degree must be nonnegative")
        mons = resonant_monomials_up_to_degree(C, args.max_degree)
        res["resonant_monomials"] = [_mono(e, names) for e in mons]
        lines.append(f"resonant monomials up to degree {args.max_degree}: "
                     + (", ".join(render_monomial(e, names) for e in mons) or "none"))
    return 0, res, lines


def _normalize(S, args):
    N = args.degree if args.degree is not None else S.order
    r = geometric_linearize(S, N)
    names = S.var_names
    res = {"kind": "normalize", "degree": N,
           "fields": {n: X.render(names) for n, X in zip(S.field_names, r.fields)},
           "integrals": {n: F.render(names) for n, F in zip(S.integral_names, r.integrals)},
           "f": [[q.render(names) for q in row] for row in r.f],
           "scaling": [rational(r.scaling[i, i]) for i in range(S.p)],
           "identity_change": r.is_identity, "notes": list(r.notes)}
    lines = [f"normalized to degree {N} (coordinates renamed to the normalizing ones)"]
    lines += [f"{n} = {X.render(names)}" for n, X in zip(S.field_names, r.fields)]
    lines += [f"{n} = {F.render(names)}" for n, F in zip(S.integral_names, r.integrals)]
    lines.append("first-integral matrix f (fields = f * rescaled linear parts):")
    lines += ["  [" + ", ".join(q.render(names) for q in row) + "]" for row in r.f]
    if args.emit_change:
        new = [f"{n}_new" for n in names]
        res["change"] = r.change.render(new, names)
        res["inverse_change"] = r.inverse_change.render(names, new)
        lines.append("old coordinates in terms of new:")
        lines += ["  " + s for s in res["change"]]
        lines.append("new coordinates in terms of old:")
        lines += ["  " + s for s in res["inverse_change"]]
    return 0, res, lines


def _divide(S, args):
    if args.field not in S.field_names:
        raise _UsageError(f"no field named {args.field!r}")
    N = args.degree if args.degree is not None else S.order
    family, _ = linear_parts_of(S)
    X = S.fields[S.field_names.index(args.field)]
    for name, Y in zip(S.field_names, family.fields(N)):
        br = lie_bracket(X.with_order(N), Y)
        if not br.is_zero():
            raise DivisionError(f"{args.field} does not commute with the linear part of {name}: "
                                f"{br.render(S.var_names)}")
    fs = divide_by_cartan(X, family, N)
    names = S.var_names
    quotients = {f"f_{n}": q.render(names) for n, q in zip(S.field_names, fs)}
    res = {"kind": "divide", "field": args.field, "degree": N, "quotients": quotients}
    lines = [f"{args.field} = " + " + ".join(f"({q}) * lin({n})" for n, q in
                                              zip(S.field_names, (q.render(names) for q in fs)))]
    return 0, res, lines


def _reduce(S, args):
    z = _point(S, args.point)
    r = reduce_at_singular_point(S, z)
    R = r.system
    kept = [S.var_names[c] for c in r.kept]
    new_names = [f"y{c + 1}" for c in range(S.nvars)]
    change = r.change.render(S.var_names, new_names)
    inverse = r.inverse.render(new_names, list(S.var_names))
    text = render_system(R, points={}) if R.nvars else ""
    res = {"kind": "reduce", "point": [rational(v) for v in z], "rank": len(r.rectified),
           "rectified": [S.field_names[i] for i in r.rectified], "kept_variables": kept,
           "system": text, "change": change, "inverse_change": inverse, "notes": list(r.notes)}
    lines = [f"rank {len(r.rectified)} at the point; rectified: "
             + (", ".join(res["rectified"]) or "none"),
             "rectifying change (local coordinates centered at the point):"]
    lines += ["  " + s for s in change]
    lines.append(f"reduced system of type ({R.p},{R.q}) on {R.nvars} variables:")
    lines += ["  " + s for s in text.splitlines()]
    return 0, res, lines


def _canonical(S, args):
    family, _ = linear_parts_of(S)
    cf = canonical_linear_form(family)

    def fmt(M):
        if cf.exact:
            return [[str(x) for x in M.row(i)] for i in range(M.rows)]
        return [[repr(float(x)) for x in row] for row in M]

    gens = [g.render(S.var_names) for g in cf.generators]
    res = {"kind": "canonical", "cartan": _cartan(cf.cartan), "exact": cf.exact, "V": fmt(cf.V),
           "P": fmt(cf.P), "generators": gens, "residual": cf.residual, "notes": list(cf.notes)}
    lines = [f"Cartan type (h, e) = ({cf.cartan.h}, {cf.cartan.e}); {'exact' if cf.exact else 'numeric'} path"]
    for i, (row, g) in enumerate(zip(res["V"], gens)):
        lines.append(f"Z{i + 1} = " + " + ".join(f"({v})*{n}" for v, n in zip(row, S.field_names)) + f"  ~  {g}")
    lines.append("basis change P (columns are new basis vectors): " + str(res["P"]))
    if not cf.exact:
        lines.append(f"residual {cf.residual:.3g}")
    return 0, res, lines


def _suspend(S, args):
    if args.params < 0 or args.params >= S.nvars:
        raise _UsageError("--params must be between 0 and the number of variables minus one")
    fam = SystemFamily.from_system(S, args.params)
    T = suspend_family(fam)
    rep = verify(T)
    text = render_system(T, points={})
    res = {"kind": "suspend", "params": args.params, "type": [T.p, T.q], "system": text, "verify_ok": rep.ok}
    lines = [f"suspended system of type ({T.p},{T.q}); verify {'passes' if rep.ok else 'FAILS'}"] + text.splitlines()
    return (0 if rep.ok else 3), res, lines


HANDLERS = {"check": _check, "classify": _classify, "resonance": _resonance, "normalize": _normalize,
            "divide": _divide, "reduce": _reduce, "canonical": _canonical, "suspend": _suspend}


def _options(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "file", "json")}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = _build_parser().parse_args(argv)
    start = time.perf_counter()
    sha = None
    result, error = None, None
    lines: list[str] = []
    try:
        try:
            with open(args.file, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise _UsageError(f"cannot read {args.file}: {exc.strerror}") from None
        sha = digest(data)
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError:
            raise _UsageError(f"{args.file} is not valid UTF-8") from None
        S = parse_system(text, args.file)
        code, result, lines = HANDLERS[args.command](S, args)
    except ParseError as exc:
        code, error = 2, {"kind": "parse-error", "message": str(exc)}
    except InputError as exc:
        code, error = 2, {"kind": "input-error", "message": str(exc)}
    except AnalysisError as exc:
        code, error = 1, {"kind": type(exc).__name__, "message": str(exc)}
    except VerificationError as exc:
        code, error = 3, {"kind": "verification-failure", "message": str(exc)}
    if args.json:
        report = make_report(args.command, _options(args), args.file, sha, code, result, error,
                             time.perf_counter() - start)
        stdout.write(dumps(report))
    else:
        if error is not None:
            if code == 1:
                print(error["message"], file=stdout)
            else:
                print(f"error: {error['message']}", file=sys.stderr)
        for line in lines:
            print(line, file=stdout)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
