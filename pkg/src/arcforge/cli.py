"""Command line front end: ``arcforge {run,verify,list,prolong,ord,fiber-count,mather}``."""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from .discrepancy import MonomialValuation, chart, discrepancy_report
from .fibers import arc_fiber_count, plane_cover, sepdeg_morphism, univariate_cover
from .fields import parse_field
from .groebner import DEFAULT_BUDGET
from .jets import affine, hs_prolong, make_arc, ord_ideal
from .polynomials import PolyRing
from .session import (Flags, SessionError, VerifyReport, list_fixtures, load_session, machine_text, run_fixture,
                      run_session, verify_all)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--precision", type=int, default=8, help="default working precision (default 8)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized searches (default 0)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="S-pair and enumeration cap")
    p.add_argument("--format", choices=("human", "machine"), default="human")
    p.add_argument("--output", help="also write the machine report to this file")
    p.add_argument("--parallel", action="store_true", help="run independent tasks concurrently")


def _flags(a) -> Flags:
    return Flags(precision=a.precision, seed=a.seed, budget=a.budget, parallel=a.parallel)


def _emit(a, human: str, machine: dict) -> None:
    text = machine_text(machine)
    print(text if a.format == "machine" else human, end="" if a.format == "machine" else "\n")
    if a.output:
        Path(a.output).write_text(text, encoding="utf-8")


def _parse_arc_spec(spec: str) -> dict[str, list[str]]:
    """``"x = 0, 1; y = 0, 0, 1"`` -> ``{"x": ["0", "1"], "y": ["0", "0", "1"]}``."""
    out = {}
    for part in spec.split(";"):
        if not part.strip():
            continue
        name, _, coeffs = part.partition("=")
        if not _:
            raise SessionError(f"arc component {part!r} should read name = c0, c1, ...")
        out[name.strip()] = [c.strip() for c in coeffs.strip().strip("[]").split(",") if c.strip()]
    return out


def cmd_run(a) -> int:
    flags = _flags(a)
    ok = True
    for path in a.sessions:
        p = Path(path)
        try:
            s = load_session(p.read_text(encoding="utf-8"), flags, p.stem)
        except (OSError, SessionError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            return 2
        rep = run_session(s, flags)
        _emit(a, rep.human(), rep.machine())
        ok = ok and rep.ok
    return 0 if ok else 1


def cmd_verify(a) -> int:
    flags = _flags(a)
    if a.fixtures:
        reps = []
        for name in a.fixtures:
            try:
                reps.append(run_fixture(name, flags))
            except SessionError as exc:
                print(str(exc), file=sys.stderr)
                return 2
        rep = VerifyReport(reps)
    else:
        rep = verify_all(flags)
    _emit(a, rep.human(), rep.machine())
    return 0 if rep.ok else 1


def cmd_list(a) -> int:
    for name in list_fixtures():
        print(name)
    return 0


def cmd_prolong(a) -> int:
    K = parse_field(a.field)
    names = a.vars.split(",") if a.vars else None
    if names is None:
        names = sorted(set(_IDENT.findall(a.poly)) - set(K.names()))
    R = PolyRing(K, names)
    pro = hs_prolong(R.parse(a.poly), a.m)
    out = {"poly": a.poly, "m": a.m, "prolongations": [p.format() for p in pro]}
    _emit(a, "\n".join(f"f^({i}) = {p.format()}" for i, p in enumerate(pro)), out)
    return 0


def cmd_ord(a) -> int:
    K = parse_field(a.field)
    coeffs = _parse_arc_spec(a.arc)
    X = affine(K, list(coeffs))
    exact = not a.inexact
    prec = max(len(c) for c in coeffs.values()) - 1 if exact else a.precision
    alpha = make_arc(X.ring, coeffs, prec, exact, K)
    o = ord_ideal([X.ring.parse(p) for p in a.polys], alpha)
    _emit(a, f"ord = {o}", {"order": o.to_json()})
    return 0


def cmd_fiber_count(a) -> int:
    K = parse_field(a.field)
    f = plane_cover(K, a.cover) if a.plane else univariate_cover(K, a.cover)
    L = affine(K, ["y"])
    coeffs = [c.strip() for c in a.beta.strip("[]").split(",") if c.strip()]
    beta = make_arc(L.ring, {"y": coeffs}, a.precision if a.inexact else None, not a.inexact, K)
    fc = arc_fiber_count(f, beta, a.precision)
    sd = sepdeg_morphism(f)
    out = {"count": fc.count, "censored": fc.censored, "sepdeg": sd}
    _emit(a, f"count = {fc.count}{' (censored)' if fc.censored else ''}; sepdeg = {sd}", out)
    return 0


def cmd_mather(a) -> int:
    K = parse_field(a.field)
    if a.weights:
        v = MonomialValuation(tuple(int(w) for w in a.weights.split(",")))
        X = None
    else:
        if not a.chart:
            raise SessionError("give --weights or --chart")
        comps = dict((k.strip(), e.strip()) for k, _, e in (c.partition("=") for c in a.chart.split(";") if c.strip()))
        target = list(comps)
        others = sorted({w for e in comps.values() for w in _IDENT.findall(e)} - set(K.names()) - {a.exceptional})
        v = chart(K, [a.exceptional] + others, target, comps, a.q)
        X = affine(K, target, a.equations) if a.equations else None
    r = discrepancy_report(v, a.c, X)
    human = (f"ord_E Jac = {r.ord_E_jac}; mather = {r.mather}; mj = {r.mj}; "
             f"edim (c = {r.codim_offset}) = {r.edim_stable}")
    _emit(a, human, r.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="arcforge", description="Jet schemes, arc spaces and their invariants.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run session files")
    p.add_argument("sessions", nargs="+")
    _common(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("verify", help="run bundled fixtures and check their expectations")
    p.add_argument("fixtures", nargs="*", help="fixture names (default: all)")
    _common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("list", help="list bundled fixtures")
    p.set_defaults(fn=cmd_list)

    p = sub.add_parser("prolong", help="Hasse-Schmidt prolongations of a polynomial")
    p.add_argument("poly")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--field", default="QQ")
    p.add_argument("--vars", help="comma separated variables (default: those in the polynomial)")
    _common(p)
    p.set_defaults(fn=cmd_prolong)

    p = sub.add_parser("ord", help="order of an ideal along an arc")
    p.add_argument("polys", nargs="+")
    p.add_argument("--arc", required=True, help='e.g. "x = 0, 1; y = 0, 0, 1"')
    p.add_argument("--field", default="QQ")
    p.add_argument("--inexact", action="store_true", help="treat the arc as known only to --precision")
    _common(p)
    p.set_defaults(fn=cmd_ord)

    p = sub.add_parser("fiber-count", help="count power-series roots over a target arc")
    p.add_argument("--cover", required=True, help="g(x), or F(x, y) with --plane")
    p.add_argument("--beta", required=True, help='target arc coefficients, e.g. "0, 0, 1"')
    p.add_argument("--plane", action="store_true")
    p.add_argument("--field", default="QQ")
    p.add_argument("--inexact", action="store_true")
    _common(p)
    p.set_defaults(fn=cmd_fiber_count)

    p = sub.add_parser("mather", help="Mather and Mather-Jacobian log discrepancies")
    p.add_argument("--weights", help="monomial weights, e.g. 2,3")
    p.add_argument("--chart", help='e.g. "x = u^2*(v+1); y = u^3*(v+1)^2"')
    p.add_argument("--exceptional", default="u")
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--equations", nargs="*", default=[], help="equations of X for the MJ value")
    p.add_argument("--c", type=int, default=0, help="codimension offset for the edim value")
    p.add_argument("--field", default="QQ")
    _common(p)
    p.set_defaults(fn=cmd_mather)
    return ap


def main(argv: list[str] | None = None) -> int:
    a = build_parser().parse_args(argv)
    try:
        return a.fn(a)
    except SessionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
