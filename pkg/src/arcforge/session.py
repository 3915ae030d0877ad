"""Session files: declarations plus an ordered task list, executed into a report.

Sessions are TOML documents (``*.session``).  See README.md for the grammar.
"""

from __future__ import annotations

import hashlib
import json
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .arcmodules import (SeriesMatrix, cotangent_kernel, differentials_pullback, fitting_order, morphism,
                         projection_search, ramification_classify, series_smith_form, torsion_dimension)
from .discrepancy import (MonomialValuation, ResolutionChart, chart, chart_ord_E, discrepancy_report,
                          embcodim_upper_bound, random_weight_family, semicontinuity_check)
from .fibers import (CoverPresentation, arc_fiber_count, fiber_bound_check, jet_fiber_oracle, plane_cover,
                     sepdeg_morphism, univariate_cover)
from .fields import Field, parse_field
from .groebner import DEFAULT_BUDGET, groebner_basis, localize, nilpotency_index
from .jets import AffinePresentation, Arc, affine, brute_force_jets, hs_prolong, jet_derivative, jet_ideal, jet_space, make_arc, ord_ideal
from .polynomials import PolyRing
from .series import TruncatedSeries

PROVENANCE_TAGS = ("PAPER", "DERIVED", "TRIVIAL")
FIXTURE_SUFFIX = ".session"


class SessionError(ValueError):
    """Parse or validation failure; the message names the offending place."""


@dataclass
class Flags:
    precision: int = 8
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    parallel: bool = False


@dataclass
class Session:
    name: str
    field: Field
    schemes: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    arcs: dict = field(default_factory=dict)
    covers: dict = field(default_factory=dict)
    valuations: dict = field(default_factory=dict)
    charts: dict = field(default_factory=dict)
    tasks: list = field(default_factory=list)
    digest: str = ""


# Parsing ---------------------------------------------------------------------

def _field_of(decl: dict, default: Field, where: str) -> Field:
    if "field" not in decl:
        return default
    try:
        return parse_field(decl["field"])
    except Exception as exc:
        raise SessionError(f"{where}: bad field {decl['field']!r}: {exc}") from None


def _need(decl: dict, key: str, where: str):
    if key not in decl:
        raise SessionError(f"{where}: missing key {key!r}")
    return decl[key]


def _lookup(table: dict, name: str, kind: str, where: str):
    if name not in table:
        raise SessionError(f"{where}: unknown {kind} {name!r}")
    return table[name]


_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def load_session(text: str, flags: Flags | None = None, name: str = "session") -> Session:
    flags = flags or Flags()
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SessionError(f"parse error: {exc}") from None
    head = doc.get("session", {})
    K = _field_of(head, parse_field("QQ"), "[session]")
    s = Session(head.get("name", name), K, digest=hashlib.sha256(text.encode()).hexdigest())
    try:
        _declare(s, doc, flags)
    except SessionError:
        raise
    except Exception as exc:
        raise SessionError(f"declaration error: {type(exc).__name__}: {exc}") from None
    tasks = doc.get("tasks", [])
    if not isinstance(tasks, list):
        raise SessionError("[[tasks]] must be an array of tables")
    seen = set()
    for i, t in enumerate(tasks):
        op = _need(t, "op", f"task {i + 1}")
        if op not in TASKS:
            raise SessionError(f"task {i + 1}: unknown op {op!r}")
        tid = t.get("id", f"{i + 1}-{op}")
        if tid in seen:
            raise SessionError(f"task {i + 1}: duplicate id {tid!r}")
        seen.add(tid)
        if "expect" in t and "provenance" not in t:
            raise SessionError(f"task {tid!r}: expectations need a provenance tag")
        prov = t.get("provenance")
        tags = prov.values() if isinstance(prov, dict) else ([prov] if prov is not None else [])
        for tag in tags:
            if tag not in PROVENANCE_TAGS:
                raise SessionError(f"task {tid!r}: provenance must be one of {PROVENANCE_TAGS}, got {tag!r}")
        for ref_kind, table in (("scheme", s.schemes), ("morphism", s.morphisms), ("arc", s.arcs),
                                ("cover", s.covers), ("valuation", s.valuations), ("chart", s.charts)):
            if ref_kind in t:
                _lookup(table, t[ref_kind], ref_kind, f"task {tid!r}")
        s.tasks.append(dict(t, id=tid))
    return s


def _declare(s: Session, doc: dict, flags: Flags) -> None:
    for nm, d in doc.get("schemes", {}).items():
        where = f"[schemes.{nm}]"
        K = _field_of(d, s.field, where)
        s.schemes[nm] = affine(K, _need(d, "variables", where), d.get("equations", []))
    for nm, d in doc.get("morphisms", {}).items():
        where = f"[morphisms.{nm}]"
        X = _lookup(s.schemes, _need(d, "source", where), "scheme", where)
        Y = _lookup(s.schemes, _need(d, "target", where), "scheme", where)
        mp = _need(d, "map", where)
        missing = [v for v in Y.variables if v not in mp]
        if missing:
            raise SessionError(f"{where}: no image for {', '.join(missing)}")
        s.morphisms[nm] = morphism(X, Y, [mp[v] for v in Y.variables], validate=d.get("validate", True))
    for nm, d in doc.get("arcs", {}).items():
        where = f"[arcs.{nm}]"
        X = _lookup(s.schemes, _need(d, "scheme", where), "scheme", where)
        coeffs = {v: d[v] for v in X.variables if v in d}
        extra = set(d) - set(X.variables) - {"scheme", "precision", "exact", "field", "validate"}
        if extra:
            raise SessionError(f"{where}: unknown keys {sorted(extra)}")
        K = _field_of(d, X.field, where)
        exact = d.get("exact", True)
        prec = d.get("precision")
        if prec is None:
            longest = max((len(c) for c in coeffs.values()), default=1) - 1
            prec = max(longest, flags.precision) if not exact else max(longest, 0)
        s.arcs[nm] = make_arc(X.ring, coeffs, prec, exact, K, X, d.get("validate", True))
    for nm, d in doc.get("covers", {}).items():
        where = f"[covers.{nm}]"
        K = _field_of(d, s.field, where)
        kind = d.get("kind", "univariate")
        poly = _need(d, "poly", where)
        if kind == "univariate":
            s.covers[nm] = univariate_cover(K, poly, d.get("x", "x"))
        elif kind == "plane":
            s.covers[nm] = plane_cover(K, poly, d.get("x", "x"), d.get("y", "y"))
        else:
            raise SessionError(f"{where}: kind must be 'univariate' or 'plane'")
    for nm, d in doc.get("valuations", {}).items():
        s.valuations[nm] = MonomialValuation(tuple(_need(d, "weights", f"[valuations.{nm}]")))
    for nm, d in doc.get("charts", {}).items():
        where = f"[charts.{nm}]"
        K = _field_of(d, s.field, where)
        mp = _need(d, "map", where)
        if "target" in d:
            target = list(_lookup(s.schemes, d["target"], "scheme", where).variables)
        else:
            target = list(mp)
        u = _need(d, "exceptional", where)
        if "source" in d:
            source = list(d["source"])
        else:
            names = {w for img in mp.values() for w in _IDENT.findall(str(img))} - set(K.names()) - {u}
            source = [u] + sorted(names)
        if source[0] != u:
            raise SessionError(f"{where}: the exceptional coordinate must come first")
        s.charts[nm] = chart(K, source, target, {v: str(mp[v]) for v in target}, d.get("q", 1))


# Tasks ----------------------------------------------------------------------

def _ring_for(s: Session, t: dict) -> PolyRing:
    if "scheme" in t:
        return s.schemes[t["scheme"]].ring
    if "variables" in t:
        K = _field_of(t, s.field, f"task {t['id']!r}")
        return PolyRing(K, t["variables"])
    raise SessionError(f"task {t['id']!r}: needs 'scheme' or 'variables'")


def _t_prolong(s, t, flags):
    R = _ring_for(s, t)
    f = R.parse(_need(t, "poly", t["id"]))
    m = int(_need(t, "m", t["id"]))
    pro = hs_prolong(f, m)
    return {"prolongations": [p.format() for p in pro],
            "nonzero_indices": [i for i, p in enumerate(pro) if not p.is_zero()]}


def _jet_relations(s, t, flags):
    X = s.schemes[_need(t, "scheme", t["id"])]
    m = int(_need(t, "m", t["id"]))
    js = jet_space(X.ring, m)
    I = jet_ideal(X, m)
    extra = [js.ring.parse(g) for g in t.get("relations", [])]
    return X, js, list(I.generators) + extra


def _t_nilpotency(s, t, flags):
    X, js, gens = _jet_relations(s, t, flags)
    g = js.ring.parse(_need(t, "element", t["id"]))
    n = nilpotency_index(g, gens, int(t.get("max_power", 8)), flags.budget)
    return {"index": n}


def _t_normal_forms(s, t, flags):
    X, js, gens = _jet_relations(s, t, flags)
    polys = [js.ring.parse(g) for g in t.get("polys", [])]
    if "derivatives_of" in t:
        g = js.ring.parse(t["derivatives_of"])
        upto = int(_need(t, "upto", t["id"]))
        polys = [g] + [jet_derivative(g, i, js) for i in range(1, upto + 1)] + polys
    units = [js.ring.parse(u) for u in t.get("localize", [])]
    if units:
        red = localize(gens, units, flags.budget, js.ring).reduce
    else:
        red = groebner_basis(gens, "grevlex", flags.budget).reduce
    nfs = [red(p) for p in polys]
    return {"normal_forms": [h.format() for h in nfs], "all_zero": all(h.is_zero() for h in nfs),
            "count": len(nfs)}


def _t_ord(s, t, flags):
    a = s.arcs[_need(t, "arc", t["id"])]
    polys = t.get("ideal") or [_need(t, "poly", t["id"])]
    return {"order": ord_ideal([a.ring.parse(p) for p in polys], a).to_json()}


def _t_brute_jets(s, t, flags):
    X = s.schemes[_need(t, "scheme", t["id"])]
    pts = brute_force_jets(X, int(_need(t, "m", t["id"])), int(t.get("budget", 10**6)))
    return {"count": len(pts)}


def _t_cotangent(s, t, flags):
    f = s.morphisms[_need(t, "morphism", t["id"])]
    return cotangent_kernel(f, s.arcs[_need(t, "arc", t["id"])]).to_json()


def _t_classify(s, t, flags):
    f = s.morphisms[_need(t, "morphism", t["id"])]
    return ramification_classify(f, s.arcs[_need(t, "arc", t["id"])]).to_json()


def _t_fitting(s, t, flags):
    X = s.schemes[_need(t, "scheme", t["id"])]
    rel = s.morphisms[t["relative_to"]] if "relative_to" in t else None
    a = s.arcs[_need(t, "arc", t["id"])]
    out = {"order": fitting_order(X, int(t.get("d", 0)), a, rel).to_json()}
    if t.get("smith", True):
        out["torsion"] = torsion_dimension(differentials_pullback(X, a, rel)).to_json()
    return out


def _t_smith(s, t, flags):
    K = _field_of(t, s.field, t["id"])
    prec = int(t.get("precision", flags.precision))
    exact = t.get("exact", True)
    rows = [[TruncatedSeries(K, [K(c) if not isinstance(c, str) else PolyRing(K, ()).parse(c).constant_coeff()
                                 for c in e], prec if not exact else max(len(e) - 1, 0), exact) for e in r]
            for r in _need(t, "matrix", t["id"])]
    A = SeriesMatrix(K, rows, t.get("ncols"))
    return series_smith_form(A, transforms=False).to_json()


def _t_projection(s, t, flags):
    X = s.schemes[_need(t, "scheme", t["id"])]
    res = projection_search(X, s.arcs[_need(t, "arc", t["id"])], int(_need(t, "d", t["id"])),
                            int(t.get("trials", 50)), int(t.get("seed", flags.seed)))
    return {"found": res is not None, **(res.to_json() if res is not None else {})}


def _beta(s, t):
    return s.arcs[_need(t, "arc", t["id"])]


def _t_fiber_count(s, t, flags):
    f = s.covers[_need(t, "cover", t["id"])]
    fc = arc_fiber_count(f, _beta(s, t), int(t.get("precision", flags.precision)))
    out = {"count": fc.count, "censored": fc.censored, "separation": fc.separation}
    if t.get("branches", False):
        out["branches"] = fc.branches
    return out


def _t_sepdeg(s, t, flags):
    return {"sepdeg": sepdeg_morphism(s.covers[_need(t, "cover", t["id"])])}


def _t_fiber_bound(s, t, flags):
    f = s.covers[_need(t, "cover", t["id"])]
    return fiber_bound_check(f, _beta(s, t), int(t.get("precision", flags.precision))).to_json()


def _t_fiber_oracle(s, t, flags):
    f = s.covers[_need(t, "cover", t["id"])]
    n = jet_fiber_oracle(f, _beta(s, t), int(_need(t, "m", t["id"])), t.get("slack"),
                         int(t.get("extension_degree", 1)))
    return {"count": n}


def _t_chart_ord(s, t, flags):
    ch = s.charts[_need(t, "chart", t["id"])]
    polys = t.get("ideal") or [_need(t, "poly", t["id"])]
    return {"order": chart_ord_E(ch, [ch.target.parse(p) for p in polys]).to_json()}


def _t_mather(s, t, flags):
    if "valuation" in t:
        v = s.valuations[t["valuation"]]
    elif "weights" in t:
        v = MonomialValuation(tuple(t["weights"]))
    else:
        v = s.charts[_need(t, "chart", t["id"])]
    X = s.schemes[t["scheme"]] if "scheme" in t else None
    return discrepancy_report(v, int(t.get("c", 0)), X).to_json()


def _t_semicontinuity(s, t, flags):
    if "family" in t:
        fam = [tuple(w) for w in t["family"]]
    else:
        fam = random_weight_family(int(_need(t, "n", t["id"])), int(t.get("size", 20)),
                                   int(t.get("seed", flags.seed)), int(t.get("max_weight", 4)))
    rep = semicontinuity_check(fam)
    out = {"ok": rep.ok, "pairs": len(rep.checks), "c_values": rep.c_values, "violations": rep.violations}
    return out


def _t_embcodim(s, t, flags):
    X = s.schemes[_need(t, "scheme", t["id"])]
    return {"bound": embcodim_upper_bound(X, s.arcs[_need(t, "arc", t["id"])], t.get("component")).to_json()}


TASKS: dict[str, Callable] = {
    "prolong": _t_prolong,
    "nilpotency": _t_nilpotency,
    "normal_forms": _t_normal_forms,
    "ord": _t_ord,
    "brute_jets": _t_brute_jets,
    "cotangent_kernel": _t_cotangent,
    "classify": _t_classify,
    "fitting_order": _t_fitting,
    "smith": _t_smith,
    "projection": _t_projection,
    "fiber_count": _t_fiber_count,
    "sepdeg": _t_sepdeg,
    "fiber_bound": _t_fiber_bound,
    "fiber_oracle": _t_fiber_oracle,
    "chart_ord": _t_chart_ord,
    "mather": _t_mather,
    "semicontinuity": _t_semicontinuity,
    "embcodim": _t_embcodim,
}


# Execution -------------------------------------------------------------------

def _canon(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def _dig(result: dict, key: str):
    cur: Any = result
    for part in key.split("."):
        if isinstance(cur, dict) and part in cur:
            cur = cur[part]
        elif isinstance(cur, list) and part.isdigit() and int(part) < len(cur):
            cur = cur[int(part)]
        else:
            raise KeyError(key)
    return cur


def _run_task(s: Session, t: dict, flags: Flags) -> dict:
    rec: dict[str, Any] = {"id": t["id"], "op": t["op"]}
    prov = t.get("provenance")
    want_error = t.get("expect_error")
    start = time.perf_counter()
    try:
        result = TASKS[t["op"]](s, t, flags)
    except Exception as exc:
        rec["seconds"] = time.perf_counter() - start
        name = type(exc).__name__
        if want_error is not None:
            ok = want_error in (True, name)
            rec.update(result=None, status="pass" if ok else "fail", error=f"{name}: {exc}",
                       checks=[{"key": "error", "expected": want_error, "actual": name, "pass": ok,
                                "provenance": prov if isinstance(prov, str) else "TRIVIAL"}])
        else:
            rec.update(result=None, status="error", error=f"{name}: {exc}", checks=[])
        return rec
    rec["seconds"] = time.perf_counter() - start
    rec["result"] = result
    checks = []
    if want_error is not None:
        checks.append({"key": "error", "expected": want_error, "actual": None, "pass": False,
                       "provenance": prov if isinstance(prov, str) else "TRIVIAL"})
    for key, expected in t.get("expect", {}).items():
        try:
            actual = _dig(result, key)
        except KeyError:
            actual = None
        tag = prov.get(key, "DERIVED") if isinstance(prov, dict) else prov
        checks.append({"key": key, "expected": expected, "actual": actual,
                       "pass": _canon(actual) == _canon(expected), "provenance": tag})
    rec["checks"] = checks
    if not checks:
        rec["status"] = "ok"
    else:
        rec["status"] = "pass" if all(c["pass"] for c in checks) else "fail"
    return rec


@dataclass
class Report:
    session: str
    digest: str
    flags: Flags
    tasks: list

    @property
    def ok(self) -> bool:
        return all(r["status"] in ("pass", "ok") for r in self.tasks)

    def summary(self) -> dict:
        st = [r["status"] for r in self.tasks]
        return {"tasks": len(st), "passed": st.count("pass"), "failed": st.count("fail"),
                "errors": st.count("error"), "unchecked": st.count("ok")}

    def machine(self) -> dict:
        """Canonical form: timing is left out so equal inputs give equal bytes."""
        return {
            "provenance": {"input_sha256": self.digest, "seed": self.flags.seed, "precision": self.flags.precision,
                           "budget": self.flags.budget, "library": "arcforge", "version": __version__},
            "session": self.session,
            "tasks": [{k: v for k, v in r.items() if k != "seconds"} for r in self.tasks],
            "summary": self.summary(),
            "ok": self.ok,
        }

    def human(self) -> str:
        lines = [f"session {self.session}  (seed {self.flags.seed}, precision {self.flags.precision})"]
        for r in self.tasks:
            mark = {"pass": "PASS", "fail": "FAIL", "error": "ERROR", "ok": "done"}[r["status"]]
            lines.append(f"  [{mark}] {r['id']} ({r['op']}, {r['seconds']:.3f} s)")
            if r["status"] == "error":
                lines.append(f"      {r['error']}")
            elif r["status"] == "ok":
                lines.append(f"      {_canon(r['result'])}")
            for c in r["checks"]:
                if c["pass"]:
                    lines.append(f"      {c['key']} = {_canon(c['actual'])}  [{c['provenance']}]")
                else:
                    lines.append(f"      {c['key']}: expected {_canon(c['expected'])}, got {_canon(c['actual'])}"
                                 f"  [{c['provenance']}]")
        sm = self.summary()
        total = sum(r["seconds"] for r in self.tasks)
        lines.append(f"  {sm['tasks']} tasks: {sm['passed']} passed, {sm['failed']} failed, {sm['errors']} errors"
                     f" ({total:.2f} s)")
        return "\n".join(lines)


def run_session(s: Session, flags: Flags | None = None) -> Report:
    flags = flags or Flags()
    if flags.parallel and len(s.tasks) > 1:
        with ThreadPoolExecutor() as ex:
            recs = list(ex.map(lambda t: _run_task(s, t, flags), s.tasks))
    else:
        recs = [_run_task(s, t, flags) for t in s.tasks]
    return Report(s.name, s.digest, flags, recs)


def run_path(path: str | Path, flags: Flags | None = None) -> Report:
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    return run_session(load_session(text, flags, p.stem), flags)


def _fixture_dir():
    return resources.files("arcforge") / "fixtures"


def list_fixtures() -> list[str]:
    return sorted(f.name[: -len(FIXTURE_SUFFIX)] for f in _fixture_dir().iterdir() if f.name.endswith(FIXTURE_SUFFIX))


def fixture_text(name: str) -> str:
    f = _fixture_dir() / (name + FIXTURE_SUFFIX)
    if not f.is_file():
        raise SessionError(f"no bundled fixture named {name!r}")
    return f.read_text(encoding="utf-8")


def run_fixture(name: str, flags: Flags | None = None) -> Report:
    return run_session(load_session(fixture_text(name), flags, name), flags)


@dataclass
class VerifyReport:
    reports: list

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)

    def machine(self) -> dict:
        return {"fixtures": {r.session: r.machine() for r in self.reports}, "ok": self.ok}

    def human(self) -> str:
        body = "\n".join(r.human() for r in self.reports)
        n_ok = sum(r.ok for r in self.reports)
        return body + f"\n{n_ok}/{len(self.reports)} fixtures passed"


def verify_all(flags: Flags | None = None) -> VerifyReport:
    return VerifyReport([run_fixture(n, flags) for n in list_fixtures()])


def machine_text(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
