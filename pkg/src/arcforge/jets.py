"""Jet schemes, arcs and the order semivaluation.

Jet coordinates of an ambient variable ``x`` are named ``x0, x1, ...`` (or
``x_0, x_1, ...`` when ``x`` already ends in a digit) and are ordered by
ambient variable first, then by level.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from math import comb
from typing import Mapping, Sequence

from .fields import Field, PrimeField
from .groebner import Ideal
from .polynomials import Poly, PolyRing
from .series import Finite, OrderValue, TruncatedSeries, order_min, series_order


class ArcNotOnScheme(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


def jet_name(var: str, level: int) -> str:
    return f"{var}_{level}" if var[-1:].isdigit() else f"{var}{level}"


@dataclass(frozen=True)
class JetSpace:
    """Jet coordinates ``x^(l)``, ``0 <= l <= m``, for every ambient variable."""

    ambient: PolyRing
    m: int

    @functools.cached_property
    def ring(self) -> PolyRing:
        names = [jet_name(v, l) for v in self.ambient.names for l in range(self.m + 1)]
        return PolyRing(self.ambient.field, names)

    def var(self, name: str, level: int) -> Poly:
        return self.ring.gen(jet_name(name, level))

    def index(self, name: str, level: int) -> int:
        return self.ambient.index(name) * (self.m + 1) + level

    def level_of(self, k: int) -> tuple[int, int]:
        """``(ambient index, level)`` of the k-th jet coordinate."""
        return divmod(k, self.m + 1)


@functools.lru_cache(maxsize=256)
def jet_space(ambient: PolyRing, m: int) -> JetSpace:
    if m < 0:
        raise ValueError("jet level must be natural")
    return JetSpace(ambient, m)


def _series_mul(a: list, b: list, m: int) -> list:
    """Product of two t-series with dict-polynomial coefficients, truncated at t^m."""
    out = [dict() for _ in range(m + 1)]
    for i, pa in enumerate(a):
        if not pa:
            continue
        for j in range(m + 1 - i):
            pb = b[j]
            if not pb:
                continue
            tgt = out[i + j]
            for ea, ca in pa.items():
                for eb, cb in pb.items():
                    e = tuple(x + y for x, y in zip(ea, eb))
                    v = tgt.get(e)
                    v = ca * cb if v is None else v + ca * cb
                    if v == 0:
                        tgt.pop(e, None)
                    else:
                        tgt[e] = v
    return out


def _substitute(f: Poly, target: PolyRing, gen_series: Sequence[list], m: int) -> list[Poly]:
    """Coefficients of t^0..t^m of ``f`` with the i-th variable replaced by ``gen_series[i]``."""
    powers: dict[tuple[int, int], list] = {}
    one_exp = (0,) * target.nvars
    unit = [{one_exp: target.field.one}] + [dict() for _ in range(m)]

    def power(i: int, k: int) -> list:
        if k == 0:
            return unit
        key = (i, k)
        if key not in powers:
            powers[key] = _series_mul(power(i, k - 1), gen_series[i], m)
        return powers[key]

    acc = [dict() for _ in range(m + 1)]
    for e, c in f.terms.items():
        term = None
        for i, k in enumerate(e):
            if k:
                term = power(i, k) if term is None else _series_mul(term, power(i, k), m)
        if term is None:
            term = unit
        c = target.field(c)
        for d in range(m + 1):
            tgt = acc[d]
            for ex, cx in term[d].items():
                v = tgt.get(ex)
                v = c * cx if v is None else v + c * cx
                if v == 0:
                    tgt.pop(ex, None)
                else:
                    tgt[ex] = v
    return [Poly(target, d) for d in acc]


def hs_prolong(f: Poly, m: int) -> list[Poly]:
    """``[f^(0), ..., f^(m)]``: t-coefficients of ``f(sum_l x^(l) t^l)``."""
    js = jet_space(f.ring, m)
    R = js.ring
    gens = []
    for v in f.ring.names:
        s = []
        for l in range(m + 1):
            e = [0] * R.nvars
            e[js.index(v, l)] = 1
            s.append({tuple(e): R.field.one})
        gens.append(s)
    return _substitute(f, R, gens, m)


def jet_derivative(g: Poly, i: int, space: JetSpace) -> Poly:
    """The i-th Hasse-Schmidt derivative of a jet polynomial.

    The universal derivation sends ``x_n`` to ``sum_k C(n+k, k) x_(n+k) t^k``;
    every level ``n + k`` needed must exist in ``space``.
    """
    if g.ring != space.ring:
        raise ValueError("polynomial does not live on this jet space")
    R = space.ring
    used = max((space.level_of(k)[1] for e in g.terms for k, a in enumerate(e) if a), default=0)
    if used + i > space.m:
        raise ValueError(f"derivative of order {i} needs jet level {used + i} > {space.m}")
    gens = []
    for k in range(R.nvars):
        amb, n = space.level_of(k)
        s = []
        for d in range(i + 1):
            if n + d > space.m:
                s.append({})
                continue
            e = [0] * R.nvars
            e[space.index(space.ambient.names[amb], n + d)] = 1
            s.append({tuple(e): R.field(comb(n + d, d))})
        gens.append(s)
    return _substitute(g, R, gens, i)[i]


@dataclass(frozen=True)
class AffinePresentation:
    """``X = V(generators)`` inside affine space with coordinates ``ring.names``."""

    ring: PolyRing
    generators: tuple = ()

    def __init__(self, ring: PolyRing, generators: Sequence = ()):
        gens = tuple(ring(g) for g in generators)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "generators", tuple(g for g in gens if not g.is_zero()))

    @property
    def field(self) -> Field:
        return self.ring.field

    @property
    def variables(self) -> tuple[str, ...]:
        return self.ring.names

    @property
    def ideal(self) -> Ideal:
        return Ideal(self.generators, self.ring)

    def format(self) -> list[str]:
        return [g.format() for g in self.generators]


def affine(field: Field, variables: Sequence[str], generators: Sequence[str] = ()) -> AffinePresentation:
    ring = PolyRing(field, variables)
    return AffinePresentation(ring, [ring.parse(g) if isinstance(g, str) else g for g in generators])


def jet_ideal(X: AffinePresentation, m: int) -> Ideal:
    js = jet_space(X.ring, m)
    gens = []
    for f in X.generators:
        gens.extend(h for h in hs_prolong(f, m) if not h.is_zero())
    return Ideal(gens, js.ring)


@dataclass(frozen=True)
class Arc:
    """One truncated series per ambient variable, over ``field`` (which may carry parameters)."""

    ring: PolyRing
    components: tuple
    field: Field

    def __init__(self, ring: PolyRing, components: Sequence[TruncatedSeries], field: Field | None = None,
                 scheme: AffinePresentation | None = None, validate: bool = True):
        comps = tuple(components)
        if len(comps) != ring.nvars:
            raise ValueError("an arc needs one series per ambient variable")
        field = field or (comps[0].field if comps else ring.field)
        comps = tuple(c.convert(field) for c in comps)
        exacts = {c.exact for c in comps}
        if len(exacts) > 1:
            raise ValueError("arc components must share the exact flag")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "field", field)
        if scheme is not None and validate:
            check_on_scheme(scheme, self)

    @property
    def exact(self) -> bool:
        return all(c.exact for c in self.components)

    @property
    def precision(self) -> int:
        inexact = [c.precision for c in self.components if not c.exact]
        if inexact:
            return min(inexact)
        return max((c.precision for c in self.components), default=0)

    def __getitem__(self, name: str) -> TruncatedSeries:
        return self.components[self.ring.index(name)]

    def jet_point(self, m: int) -> list:
        """Jet coordinates of the truncation at level m, in jet-space order."""
        return [c[l] for c in self.components for l in range(m + 1)]

    def format(self) -> str:
        parts = [f"{n} = {c.format()}" for n, c in zip(self.ring.names, self.components)]
        parts.append(f"precision = {self.precision}")
        parts.append(f"exact = {str(self.exact).lower()}")
        return "; ".join(parts)

    def compose(self, images: Sequence[Poly], target: PolyRing) -> "Arc":
        """``f o alpha`` for a morphism given by ``images`` in this arc's ring."""
        comps = [arc_eval(g, self) for g in images]
        return Arc(target, comps, self.field)


def make_arc(ring: PolyRing, coeffs: Mapping[str, Sequence], precision: int | None = None, exact: bool = True,
             field: Field | None = None, scheme: AffinePresentation | None = None, validate: bool = True) -> Arc:
    field = field or ring.field
    comps = []
    for n in ring.names:
        cs = [field(c) if not isinstance(c, str) else _parse_scalar(field, c) for c in coeffs.get(n, [0])]
        comps.append(TruncatedSeries(field, cs, precision if precision is not None else max(len(cs) - 1, 0), exact))
    return Arc(ring, comps, field, scheme, validate)


def _parse_scalar(field: Field, text: str):
    R = PolyRing(field, ())
    p = R.parse(text)
    return p.constant_coeff()


def arc_eval(f: Poly, alpha: Arc) -> TruncatedSeries:
    if f.ring.names != alpha.ring.names:
        raise ValueError("polynomial and arc live over different coordinates")
    one = TruncatedSeries.constant(alpha.field, 1)
    res = f.evaluate(list(alpha.components), one)
    return res


def check_on_scheme(X: AffinePresentation, alpha: Arc) -> None:
    for g in X.generators:
        o = series_order(arc_eval(g, alpha))
        if o.is_finite:
            raise ArcNotOnScheme(f"{g.format()} has order {o} along the arc")


def ord_ideal(generators: Ideal | Sequence[Poly], alpha: Arc) -> OrderValue:
    gens = list(generators)
    if not gens:
        raise ValueError("ord of the zero ideal (empty generator list) is not defined here")
    if any(g.is_constant() and not g.is_zero() for g in gens):
        return Finite(0)
    return order_min(series_order(arc_eval(g, alpha)) for g in gens)


def ord_poly(f: Poly, alpha: Arc) -> OrderValue:
    return series_order(arc_eval(f, alpha))


def _compile_mod_p(f: Poly, p: int):
    return [(e, int(c)) for e, c in f.terms.items()]


def _eval_mod_p(terms, point, p: int) -> int:
    acc = 0
    for e, c in terms:
        t = c
        for x, k in zip(point, e):
            if k:
                t = t * pow(x, k, p) % p
                if not t:
                    break
        acc += t
    return acc % p


DEFAULT_ENUMERATION_BUDGET = 10**6


def brute_force_jets(X: AffinePresentation, m: int, budget: int = DEFAULT_ENUMERATION_BUDGET) -> list[tuple[int, ...]]:
    """All F_p-points of the m-th jet scheme, sorted lexicographically in jet-space order."""
    field = X.field
    if not isinstance(field, PrimeField):
        raise ValueError("brute-force enumeration needs a prime field without parameters")
    p = field.p
    n = X.ring.nvars * (m + 1)
    if p**n > budget:
        raise BudgetExceeded(f"{p}^{n} candidate jets exceed the budget {budget}")
    compiled = [_compile_mod_p(g, p) for g in jet_ideal(X, m).generators]
    out = []
    for point in itertools.product(range(p), repeat=n):
        if all(_eval_mod_p(g, point, p) == 0 for g in compiled):
            out.append(point)
    return out
