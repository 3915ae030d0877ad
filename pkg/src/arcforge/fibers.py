"""Counting power-series roots in fibers of covers of the line.

Roots of ``P(x, t) = sum_k P_k(t) x^k`` in ``K̄[[t]]`` are counted by the
Newton-polygon recursion: solve the constant-term equation (adjoining roots
by dynamic evaluation), lift simple roots by Hensel, and for a multiple root
``c`` follow the integer-slope edges of the polygon of ``P(c + y, t)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

import sympy

from . import upoly
from .fields import Field, FieldError, PrimeField, field_with_parameters, fresh_name, over_roots
from .jets import Arc
from .polynomials import Poly, PolyRing
from .series import TruncatedSeries, series_order

DEFAULT_DEPTH_CAP = 4


class FiberError(ValueError):
    pass


class OracleBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class CoverPresentation:
    """``univariate``: A^1 -> A^1, x -> g(x).  ``plane``: {F(x, y) = 0} -> y-line."""

    kind: str
    poly: Poly
    x: str = "x"
    y: str | None = None

    def __post_init__(self):
        if self.kind not in ("univariate", "plane"):
            raise FiberError(f"unknown cover kind {self.kind!r}")
        if self.poly.is_zero():
            raise FiberError("the zero polynomial does not define a cover")
        dx = self.poly.degree(self.x)
        if dx < 1:
            raise FiberError("cover must have positive degree in x")
        if self.kind == "univariate":
            if set(self.poly.variables()) - {self.x}:
                raise FiberError("univariate cover must only involve x")
        else:
            if self.y is None:
                raise FiberError("plane cover needs the base coordinate")
            lead = self.poly.coefficients_in(self.x)[dx]
            if not lead.is_constant():
                raise FiberError("plane cover must be monic in x up to a unit")

    @property
    def field(self) -> Field:
        return self.poly.ring.field

    @property
    def degree(self) -> int:
        return self.poly.degree(self.x)

    def format(self) -> str:
        return self.poly.format()

    def fiber_coefficients(self, beta: TruncatedSeries) -> list[TruncatedSeries]:
        """Coefficients in x of ``g(x) - beta(t)`` or ``F(x, beta(t))``."""
        K = beta.field
        coeffs = self.poly.coefficients_in(self.x)
        out = []
        if self.kind == "univariate":
            for k in range(self.degree + 1):
                c = coeffs.get(k)
                val = c.constant_coeff() if c is not None else 0
                out.append(TruncatedSeries.constant(K, K(val)))
            out[0] = out[0] - beta
        else:
            ring = self.poly.ring
            one = TruncatedSeries.constant(K, 1)
            values = [one * 0 if n != self.y else beta for n in ring.names]
            for k in range(self.degree + 1):
                c = coeffs.get(k)
                if c is None:
                    out.append(TruncatedSeries.constant(K, 0))
                else:
                    out.append(c.evaluate(values, one))
        return out


def univariate_cover(field: Field, g: str, x: str = "x") -> CoverPresentation:
    ring = PolyRing(field, [x])
    return CoverPresentation("univariate", ring.parse(g), x)


def plane_cover(field: Field, F: str, x: str = "x", y: str = "y") -> CoverPresentation:
    ring = PolyRing(field, [x, y])
    return CoverPresentation("plane", ring.parse(F), x, y)


@dataclass
class FiberCount:
    count: int
    censored: bool
    branches: list = field(default_factory=list)
    separation: int = 0  # least m at which distinct roots have distinct m-jets

    def to_json(self) -> dict:
        return {"count": self.count, "censored": self.censored, "separation": self.separation,
                "branches": self.branches}


# Newton polygon ---------------------------------------------------------------

def _lower_hull(points: list[tuple[int, int]]) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    pts = sorted(points)
    hull: list[tuple[int, int]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above segment hull[-2] -> p
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return list(zip(hull, hull[1:]))


def _hull_value(edges, k: int, first: tuple[int, int]) -> Fraction:
    if not edges:
        return Fraction(first[1])
    for (k1, o1), (k2, o2) in edges:
        if k1 <= k <= k2:
            return Fraction(o1) + Fraction(o2 - o1, k2 - k1) * (k - k1)
    return Fraction(edges[-1][1][1])


def _format_prefix(prefix: list[tuple[str, int]]) -> str:
    parts = []
    for c, e in prefix:
        if c == "0":
            continue
        if e == 0:
            parts.append(c if not any(ch in c[1:] for ch in "+-") else f"({c})")
        else:
            body = f"t^{e}" if e > 1 else "t"
            cc = c if not any(ch in c[1:] for ch in "+-/*") else f"({c})"
            parts.append(body if c == "1" else f"{cc}*{body}")
    return " + ".join(parts) if parts else "0"


class _Counter:
    def __init__(self, depth_cap: int):
        self.depth_cap = depth_cap
        self.separation = 0

    def run(self, Q: list[TruncatedSeries], K: Field, budget: int, nonzero_only: bool,
            prefix: list[tuple[str, int]], shift: int) -> tuple[int, bool, list]:
        Q = list(Q)
        while len(Q) > 1 and Q[-1].exact and Q[-1].is_zero():
            Q.pop()
        orders = [series_order(s) for s in Q]
        finite = [o.n for o in orders if o.is_finite]
        cens = [o.n for o in orders if o.is_censored]
        if not finite:
            if cens:
                return 0, True, [{"prefix": _format_prefix(prefix), "censored": True, "reason": "no certified coefficient"}]
            raise FiberError("the zero polynomial has every series as a root")
        vmin = min(finite)
        if any(b <= vmin for b in cens):
            return 0, True, [{"prefix": _format_prefix(prefix), "censored": True, "reason": "precision wall"}]
        if vmin:
            Q = [s.divide_t(vmin) if not orders[k].is_infinite else s for k, s in enumerate(Q)]
        q0 = upoly.trim([s[0] for s in Q])
        low = 0
        if nonzero_only:
            while low < len(q0) and K.decide_zero(q0[low]):
                low += 1
            q0 = q0[low:]
        if upoly.degree(q0) <= 0:
            return 0, False, []
        try:
            rad, K2 = upoly.radical(q0, K)
        except FieldError:
            return 0, True, [{"prefix": _format_prefix(prefix), "censored": True, "reason": "p-th root not available"}]
        if K2 is not K:
            Q = [s.convert(K2) for s in Q]
            q0 = upoly.convert(q0, K2)
        if upoly.degree(rad) >= 2 and len(K2.tower) >= self.depth_cap:
            return 0, True, [{"prefix": _format_prefix(prefix), "censored": True, "reason": "tower depth cap"}]
        name = fresh_name(f"z{len(K2.tower) + 1}", K2.names())

        def branch(F: Field, c):
            return self._at_root([s.convert(F) for s in Q], upoly.convert(q0, F), low, F, c, budget, prefix, shift)

        results = over_roots(branch, K2, rad, name)
        total = 0
        censored = False
        branches = []
        distinct = 0
        for weight, F, (n, cen, info) in results:
            total += weight * n
            distinct += weight if n else 0
            censored = censored or cen
            info["weight"] = weight
            branches.append(info)
        if distinct >= 2:
            self.separation = max(self.separation, shift)
        return total, censored, branches

    def _at_root(self, Q, q0, low, F: Field, c, budget, prefix, shift):
        here = prefix + [(F.format(c), shift)]
        info = {"prefix": _format_prefix(here), "field": repr(F)}
        mu = 1
        while True:
            val = upoly.evaluate(upoly.hasse_derivative(q0, mu), c)
            if not F.decide_zero(val):
                break
            mu += 1
        info["multiplicity"] = mu
        if mu == 1:
            info.update(count=1, censored=False)
            return 1, False, info
        # R(y) = Q(c + y), coefficients up to y^deg
        deg = len(Q) - 1
        R = []
        for k in range(deg + 1):
            acc = TruncatedSeries.constant(F, 0)
            for j in range(k, deg + 1):
                b = F(comb(j, k))
                if b == 0:
                    continue
                acc = acc + Q[j] * (b * c ** (j - k))
            R.append(acc)
        orders = [series_order(R[k]) for k in range(mu + 1)]
        count = 0
        censored = False
        children = []
        if orders[0].is_infinite:
            count += 1
            children.append({"prefix": _format_prefix(here), "exact_root": True, "count": 1})
        finite = [(k, o.n) for k, o in enumerate(orders) if o.is_finite]
        cens = [(k, o.n) for k, o in enumerate(orders) if o.is_censored]
        edges = _lower_hull(finite)
        k_left = finite[0][0]
        if any(k < k_left for k, _ in cens):
            censored = True
        for (k1, o1), (k2, o2) in edges:
            w = Fraction(o1 - o2, k2 - k1)
            cst = o1 + w * k1
            if any(b + w * k <= cst for k, b in cens):
                censored = True
                continue
            if w.denominator != 1:
                continue
            w = int(w)
            cst = int(cst)
            if w > budget:
                censored = True
                children.append({"prefix": _format_prefix(here), "censored": True, "reason": "precision budget", "slope": w})
                continue
            S = []
            for k, s in enumerate(R):
                e = w * k - cst
                if e >= 0:
                    S.append(s.shift(e))
                else:
                    S.append(s.divide_t(-e))
            n, cen, sub = self.run(S, F, budget - w, True, here, shift + w)
            count += n
            censored = censored or cen
            children.append({"slope": w, "count": n, "censored": cen, "branches": sub})
        # roots in different groups differ at order shift + (smaller slope)
        groups = sorted([c.get("slope", float("inf")) for c in children if c.get("count")], reverse=True)
        if len(groups) >= 2:
            self.separation = max(self.separation, shift + groups[1])
        info.update(count=count, censored=censored, children=children)
        return count, censored, info


def series_roots_count(P: Sequence[TruncatedSeries], precision: int | None = None,
                       depth_cap: int = DEFAULT_DEPTH_CAP) -> FiberCount:
    """Number of distinct roots in K̄[[t]] of ``sum_k P[k] x^k``."""
    if not P:
        raise FiberError("empty polynomial")
    K = P[0].field
    if precision is None:
        inexact = [s.precision for s in P if not s.exact]
        precision = min(inexact) if inexact else max(s.precision for s in P)
    counter = _Counter(depth_cap)
    n, cen, branches = counter.run(list(P), K, precision, False, [], 0)
    return FiberCount(n, cen, branches, counter.separation)


def _as_series(beta) -> TruncatedSeries:
    if isinstance(beta, Arc):
        if len(beta.components) != 1:
            raise FiberError("target arcs live on the line")
        return beta.components[0]
    return beta


def arc_fiber_count(f: CoverPresentation, beta, precision: int | None = None,
                    depth_cap: int = DEFAULT_DEPTH_CAP) -> FiberCount:
    b = _as_series(beta)
    P = f.fiber_coefficients(b)
    if precision is None:
        precision = b.precision
    return series_roots_count(P, precision, depth_cap)


def sepdeg_morphism(f: CoverPresentation) -> int:
    """Number of distinct points of the geometric generic fiber."""
    K = f.field
    Y = fresh_name("Y", K.names() + f.poly.ring.names)
    KY = field_with_parameters(K, [Y])
    yv = KY.parameter(Y)
    coeffs = f.poly.coefficients_in(f.x)
    dense = []
    for k in range(f.degree + 1):
        c = coeffs.get(k)
        if c is None:
            dense.append(KY.zero)
        elif f.kind == "univariate":
            dense.append(KY(c.constant_coeff()))
        else:
            values = [KY.zero if n != f.y else yv for n in f.poly.ring.names]
            dense.append(c.map_coeffs(KY, PolyRing(KY, f.poly.ring.names)).evaluate(values, KY.one))
    if f.kind == "univariate":
        dense[0] = dense[0] - yv
    return upoly.distinct_root_count(dense, KY)


@dataclass
class FiberBoundReport:
    ok: bool
    count: int
    sepdeg: int
    censored: bool

    def to_json(self) -> dict:
        return {"ok": self.ok, "count": self.count, "sepdeg": self.sepdeg, "censored": self.censored}


def fiber_bound_check(f: CoverPresentation, beta, precision: int | None = None) -> FiberBoundReport:
    """``count <= sepdeg``; a censored count is compared through its certified part."""
    fc = arc_fiber_count(f, beta, precision)
    sd = sepdeg_morphism(f)
    return FiberBoundReport(fc.count <= sd, fc.count, sd, fc.censored)


# Brute-force oracle -----------------------------------------------------------

def _jet_equations(P: Sequence[TruncatedSeries], M: int, field: Field) -> tuple[PolyRing, list[Poly]]:
    """``E_j``, the t^j coefficient of ``sum_k P_k(t) x(t)^k`` with ``x = sum x_l t^l``."""
    from .jets import hs_prolong

    ring = PolyRing(field, ["x"])
    x = ring.gen("x")
    eqs = None
    jring = None
    for k, s in enumerate(P):
        if s.is_zero():
            continue
        pro = hs_prolong(x**k, M)
        jring = pro[0].ring
        if eqs is None:
            eqs = [jring.zero for _ in range(M + 1)]
        for j in range(M + 1):
            acc = eqs[j]
            for a in range(j + 1):
                c = s[a]
                if c != 0:
                    acc = acc + pro[j - a] * c
            eqs[j] = acc
    if jring is None:
        raise FiberError("zero polynomial")
    return jring, eqs


def _discriminant_order(P: Sequence[TruncatedSeries], p: int) -> int | None:
    """t-order of disc_x of ``sum P_k x^k`` over GF(p), or None if it vanishes."""
    x, t = sympy.symbols("x t")
    expr = sum(sympy.Integer(int(c)) * t**j * x**k
               for k, s in enumerate(P) for j, c in enumerate(s.coeffs) if c != 0)
    d = sympy.Poly(sympy.discriminant(expr, x), t)
    orders = [e for (e,), c in d.terms() if int(c) % p]
    return min(orders) if orders else None


def oracle_level(f: CoverPresentation, beta, m: int) -> int:
    """A level M past which no spurious m-jet of a root survives.

    If the m-jet of x0 matches no root in K̄[[t]], then ord(x0 - r) <= m for
    the series roots r and, by Krasner's lemma, <= disc order / 2 for the
    others, so ord P(x0) <= deg * max(m, disc order / 2).
    """
    b = _as_series(beta)
    P = f.fiber_coefficients(b)
    deg = len(P) - 1
    base = m + deg * (m + 1)
    delta = _discriminant_order(P, f.field.p)
    if delta is None:
        # inseparable: roots of x^p = b stop being series by degree b / p
        return base + b.precision
    return max(base, deg * max(m, -(-delta // 2)) + 1)


class _ZechField:
    """GF(q) with elements as discrete logarithms (``-1`` is zero)."""

    ZERO = -1

    def __init__(self, F: Field):
        self.q = F.order
        n = self.q - 1
        elems = [x for x in F.elements() if x != F.zero]
        for g in elems:
            powers = [F.one]
            for _ in range(n - 1):
                powers.append(powers[-1] * g)
            if len(set(powers)) == n:
                break
        self._log = {x: i for i, x in enumerate(powers)}
        self.n = n
        self.zech = [self._log.get(F.one + x, self.ZERO) for x in powers]
        self.minus_one = self._log[-F.one]
        self.F = F

    def log(self, c) -> int:
        c = self.F(c)
        return self.ZERO if c == self.F.zero else self._log[c]

    def add(self, a: int, b: int) -> int:
        if a < 0:
            return b
        if b < 0:
            return a
        z = self.zech[(b - a) % self.n]
        return self.ZERO if z < 0 else (a + z) % self.n

    def neg(self, a: int) -> int:
        return a if a < 0 else (a + self.minus_one) % self.n

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def div(self, a: int, b: int) -> int:
        return a if a < 0 else (a - b) % self.n

    def evaluate(self, terms, point) -> int:
        acc = self.ZERO
        n = self.n
        for mono, c in terms:
            t = c
            for i, a in mono:
                x = point[i]
                if x < 0:
                    t = self.ZERO
                    break
                t = t + a * x
            if t >= 0:
                acc = self.add(acc, t % n)
        return acc


@lru_cache(maxsize=None)
def _zech_field(p: int, k: int) -> _ZechField:
    return _ZechField(upoly.finite_field(p, k))


def jet_fiber_oracle(f: CoverPresentation, beta, m: int, slack: int | None = None,
                     extension_degree: int = 1, budget: int = 2_000_000) -> int:
    """Number of m-jets of solutions over GF(p^k) that extend to level ``m + slack``.

    Counting over an extension large enough to contain the constant terms of
    all roots makes the count geometric, comparable with the series count.
    """
    b = _as_series(beta)
    base = f.field
    if not isinstance(base, PrimeField):
        raise FiberError("the oracle needs a cover over a prime field")
    M = oracle_level(f, b, m) if slack is None else m + slack
    if not b.exact and b.precision < M:
        raise FiberError(f"target arc known to t^{b.precision} only; the oracle needs t^{M}")
    P = f.fiber_coefficients(b)
    jring, eqs = _jet_equations(P, M, base)
    Fq = _zech_field(base.p, extension_degree)
    elems = list(range(-1, Fq.q - 1))
    compiled = [[(tuple((i, a) for i, a in enumerate(e) if a), Fq.log(c)) for e, c in E.terms.items()] for E in eqs]
    nvars = jring.nvars
    appears_later = [False] * nvars
    for j, E in enumerate(eqs):
        for e in E.terms:
            for i, a in enumerate(e):
                if a and i < j:
                    appears_later[i] = True
    zero, one = Fq.ZERO, 0
    work = [0]
    ev = Fq.evaluate

    def step(i: int, point: list):
        """Candidate values of x_i given x_0..x_(i-1), or None for 'free'."""
        work[0] += 1
        if work[0] > budget:
            raise OracleBudgetExceeded("oracle search budget exhausted")
        point[i] = zero
        B = ev(compiled[i], point)
        if i == 0:
            out = []
            for v in elems:
                point[0] = v
                if ev(compiled[0], point) == zero:
                    out.append(v)
            point[0] = zero
            return out
        point[i] = one
        A = Fq.sub(ev(compiled[i], point), B)
        point[i] = zero
        if A != zero:
            return [Fq.div(Fq.neg(B), A)]
        if B != zero:
            return []
        return None

    fail = 1 << (M + 1)

    def why(i: int, point: list) -> int:
        """Assigned variables that fix the value of equation i as a function of x_i."""
        mask = fail
        for mono, _ in compiled[i]:
            zeros = [j for j, _ in mono if j != i and point[j] == zero]
            if zeros:
                mask |= 1 << min(zeros)
            else:
                for j, _ in mono:
                    mask |= 1 << j
        return mask & ~(1 << i)

    def extends(i: int, point: list) -> int:
        """0 if the assignment extends to level M, else a mask of the variables to blame."""
        if i > M:
            return 0
        cand = step(i, point)
        if cand == []:
            return why(i, point)
        forced = cand is not None
        if cand is None:
            cand = elems if appears_later[i] else [zero]
        bit = 1 << i
        blame = 0
        for v in cand:
            point[i] = v
            c = extends(i + 1, point)
            point[i] = zero
            if not c:
                return 0
            if not c & bit:
                return c
            blame |= c
        if forced:
            blame |= why(i, point)
        return blame & ~bit

    count = 0

    def prefixes(i: int, point: list):
        nonlocal count
        if i > m:
            if not extends(i, point):
                count += 1
            return
        cand = step(i, point)
        if cand is None:
            cand = elems
        for v in cand:
            point[i] = v
            prefixes(i + 1, point)
        point[i] = zero

    prefixes(0, [zero] * nvars)
    return count
