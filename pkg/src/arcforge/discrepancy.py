"""Divisorial valuations, Mather and Mather-Jacobian log discrepancies.

A divisorial valuation ``v = q * ord_E`` is given either by monomial weights
on affine space or by a chart ``Y -> X`` whose first source coordinate ``u``
cuts out ``E``.  Orders along ``E`` are read off as the least ``u``-degree of
a substituted polynomial, the other chart coordinates staying generic.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from .arcmodules import fitting_order, minors
from .fields import Field
from .groebner import GREVLEX, groebner_basis
from .jets import AffinePresentation, Arc
from .polynomials import Poly, PolyRing
from .series import INFINITE, Finite, OrderValue, order_min


class DiscrepancyError(ValueError):
    pass


@dataclass(frozen=True)
class MonomialValuation:
    weights: tuple[int, ...]

    def __post_init__(self):
        w = tuple(int(a) for a in self.weights)
        if not w:
            raise DiscrepancyError("a monomial valuation needs at least one weight")
        if any(a < 1 for a in w):
            raise DiscrepancyError("monomial weights must be positive")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return len(self.weights)

    def value(self, g: Poly) -> OrderValue:
        if g.is_zero():
            return INFINITE
        return Finite(min(sum(a * e for a, e in zip(self.weights, ex)) for ex in g.terms))

    def dominates(self, other: "MonomialValuation") -> bool:
        """Componentwise ``self >= other``."""
        return self.n == other.n and all(a >= b for a, b in zip(self.weights, other.weights))


@dataclass(frozen=True)
class ResolutionChart:
    """``source.names[0]`` is the exceptional coordinate; ``images[i]`` is the pullback of ``target.names[i]``."""

    source: PolyRing
    target: PolyRing
    images: tuple
    q: int = 1

    def __init__(self, source: PolyRing, target: PolyRing, images: Sequence, q: int = 1):
        if source.nvars < 1:
            raise DiscrepancyError("a chart needs an exceptional coordinate")
        if len(images) != target.nvars:
            raise DiscrepancyError("one image per target variable")
        if q < 1:
            raise DiscrepancyError("the multiplicity q must be positive")
        imgs = tuple(source.parse(g) if isinstance(g, str) else source(g) for g in images)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "images", imgs)
        object.__setattr__(self, "q", q)

    @property
    def exceptional(self) -> str:
        return self.source.names[0]

    def pullback(self, g: Poly) -> Poly:
        if g.ring.names != self.target.names:
            g = g.embed(self.target)
        return g.compose(self.source, self.images)

    def jacobian(self) -> list[list[Poly]]:
        return [[h.diff(v) for v in self.source.names] for h in self.images]


def chart(field: Field, source: Sequence[str], target: Sequence[str], images: Sequence[str] | dict,
          q: int = 1) -> ResolutionChart:
    src = PolyRing(field, source)
    tgt = PolyRing(field, target)
    if isinstance(images, dict):
        images = [images[n] for n in target]
    return ResolutionChart(src, tgt, images, q)


def u_order(h: Poly, u: str | None = None) -> OrderValue:
    """Least degree in the exceptional coordinate carrying a nonzero coefficient."""
    if h.is_zero():
        return INFINITE
    i = h.ring.index(u) if u is not None else 0
    return Finite(min(e[i] for e in h.terms))


def chart_ord_E(ch: ResolutionChart, g) -> OrderValue:
    """``ord_E`` of a polynomial or of an ideal (minimum over generators)."""
    if isinstance(g, Poly):
        return u_order(ch.pullback(g))
    gens = list(g)
    if not gens:
        raise DiscrepancyError("ord_E of the empty generator list")
    return order_min(u_order(ch.pullback(h)) for h in gens)


def jacobian_det_order(ch: ResolutionChart) -> OrderValue:
    """``ord_E`` of Jac of the chart map.

    For a square chart this is the determinant; for a chart from a lower
    dimensional source (a curve normalization, say) it is Fitt^0 of the
    relative differentials, i.e. the maximal minors of the Jacobian.
    """
    J = ch.jacobian()
    s = ch.source.nvars
    if s > ch.target.nvars:
        raise DiscrepancyError("chart source has larger dimension than the target")
    ms = [m for m in minors(J, s) if not m.is_zero()]
    if not ms:
        return INFINITE
    return order_min(u_order(m) for m in ms)


def mather_log_discrepancy(ch: ResolutionChart) -> int:
    o = jacobian_det_order(ch)
    if not o.is_finite:
        raise DiscrepancyError("chart is not generically etale: Jacobian vanishes along E")
    return ch.q * (o.n + 1)


def krull_dimension(X: AffinePresentation, budget: int | None = None) -> int:
    """Dimension of ``X`` from the leading monomials of a Groebner basis."""
    n = X.ring.nvars
    if not X.generators:
        return n
    kw = {} if budget is None else {"budget": budget}
    G = groebner_basis(X.ideal, GREVLEX, **kw)
    if G.is_unit():
        raise DiscrepancyError("X is empty")
    leads = [frozenset(i for i, a in enumerate(max(g.terms, key=GREVLEX.key)) if a) for g in G.polys]
    for k in range(n, -1, -1):
        for S in itertools.combinations(range(n), k):
            Ss = set(S)
            if not any(L <= Ss for L in leads):
                return k
    return 0


def jacobian_ideal(X: AffinePresentation, d: int | None = None) -> list[Poly]:
    """Generators of Jac_X = Fitt^d of the differentials of X (``d = dim X``)."""
    n = X.ring.nvars
    if d is None:
        d = krull_dimension(X)
    k = n - d
    if k <= 0:
        return [X.ring.one]
    rows = [[g.diff(v) for v in X.ring.names] for g in X.generators]
    if k > len(rows):
        return []
    return [m for m in minors(rows, k) if not m.is_zero()]


def mj_log_discrepancy(ch: ResolutionChart, X: AffinePresentation) -> int:
    """``q (ord_E Jac_f - ord_E Jac_X + 1)``; may be zero or negative."""
    if X.ring.names != ch.target.names:
        raise DiscrepancyError("chart target and scheme use different coordinates")
    for g in X.generators:
        if not ch.pullback(g).is_zero():
            raise DiscrepancyError(f"chart does not land on X: {g.format()} does not pull back to 0")
    jf = jacobian_det_order(ch)
    jac = jacobian_ideal(X, ch.source.nvars)
    jx = chart_ord_E(ch, jac) if jac else INFINITE
    if not (jf.is_finite and jx.is_finite):
        raise DiscrepancyError(f"orders along E are not finite (Jac_f {jf}, Jac_X {jx})")
    return ch.q * (jf.n - jx.n + 1)


def weighted_blowup_chart(field: Field, weights: Sequence[int], names: Sequence[str] = ("x", "y"),
                          source: Sequence[str] = ("u", "v")) -> ResolutionChart:
    """Toric chart ``x = u^a v^c, y = u^b v^d`` with ``ad - bc = +-1`` realizing weights ``(a, b)``."""
    a, b = (int(w) for w in weights)
    if a < 1 or b < 1:
        raise DiscrepancyError("weights must be positive")
    for c, d in sorted(itertools.product(range(max(a, b) + 1), repeat=2), key=lambda cd: (sum(cd), cd)):
        if abs(a * d - b * c) == 1:
            break
    else:
        raise DiscrepancyError(f"weights {(a, b)} are not coprime")
    u, v = source
    imgs = [f"{u}^{a}*{v}^{c}", f"{u}^{b}*{v}^{d}"]
    return chart(field, source, names, imgs)


def monomial_mather(w: MonomialValuation | Sequence[int], ch: ResolutionChart | None = None) -> int:
    """``sum(w)``, checked against the chart value when a chart is supplied."""
    if not isinstance(w, MonomialValuation):
        w = MonomialValuation(tuple(w))
    total = sum(w.weights)
    if ch is not None:
        other = mather_log_discrepancy(ch)
        if other != total:
            raise DiscrepancyError(f"chart gives {other} but the weights give {total}")
    return total


@dataclass
class DiscrepancyReport:
    ord_E_jac: OrderValue
    mather: int | None
    mj: int | None
    edim_stable: int | None
    codim_offset: int
    mj_lower_bound: int | None = None

    def to_json(self) -> dict:
        return {
            "ord_E_jac": self.ord_E_jac.to_json(),
            "mather": self.mather,
            "mj": self.mj,
            "edim_stable": self.edim_stable,
            "codim_offset": self.codim_offset,
            "mj_lower_bound": self.mj_lower_bound,
        }


def discrepancy_report(v: MonomialValuation | ResolutionChart, c: int = 0,
                       X: AffinePresentation | None = None) -> DiscrepancyReport:
    if c < 0:
        raise DiscrepancyError("codimension offset must be natural")
    if isinstance(v, MonomialValuation):
        m = monomial_mather(v)
        # A^n is smooth, so the MJ value agrees with the Mather value
        return DiscrepancyReport(Finite(sum(v.weights) - 1), m, m, c + m, c, c + m)
    o = jacobian_det_order(v)
    m = v.q * (o.n + 1) if o.is_finite else None
    mj = None
    if X is not None and m is not None:
        mj = mj_log_discrepancy(v, X)
    elif X is None and m is not None and v.source.nvars == v.target.nvars:
        mj = m
    return DiscrepancyReport(o, m, mj, None if m is None else c + m, c, None if mj is None else c + mj)


def edim_stable(v: MonomialValuation | ResolutionChart, c: int = 0, X: AffinePresentation | None = None) -> int:
    """``c + a_v``: embedding dimension at a stable point of codimension c in the contact flag."""
    r = discrepancy_report(v, c, X)
    if r.edim_stable is None:
        raise DiscrepancyError("Mather log discrepancy is not finite")
    return r.edim_stable


@dataclass
class SemicontinuityReport:
    checks: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def c_values(self) -> list[int]:
        return [ch["c"] for ch in self.checks]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": self.checks, "violations": self.violations}


def semicontinuity_check(family: Sequence[MonomialValuation | Sequence[int]]) -> SemicontinuityReport:
    """Check every comparable pair ``w >= w'`` of the family.

    ``alpha_w`` lies in the closure of ``alpha_w'`` exactly when ``w >= w'``
    componentwise; then ``sum w = c + sum w'`` with ``c = sum (w - w')`` and
    the Mather value strictly drops for distinct weights.
    """
    fam = [w if isinstance(w, MonomialValuation) else MonomialValuation(tuple(w)) for w in family]
    rep = SemicontinuityReport()
    for i, j in itertools.permutations(range(len(fam)), 2):
        w, w2 = fam[i], fam[j]
        if w.n != w2.n:
            raise DiscrepancyError("family mixes ambient dimensions")
        if not w.dominates(w2):
            continue
        if w == w2 and i > j:
            continue
        c = sum(a - b for a, b in zip(w.weights, w2.weights))
        a, a2 = monomial_mather(w), monomial_mather(w2)
        identity = a == c + a2
        monotone = a >= a2
        strict = a > a2 if w != w2 else True
        rec = {"w": list(w.weights), "w_prime": list(w2.weights), "c": c, "mather": a, "mather_prime": a2,
               "identity": identity, "monotone": monotone, "strict": strict}
        rep.checks.append(rec)
        if not (identity and monotone and strict):
            rep.violations.append(rec)
    return rep


def random_weight_family(n: int, size: int = 20, seed: int = 0, max_weight: int = 4) -> list[MonomialValuation]:
    rng = random.Random(seed)
    return [MonomialValuation(tuple(rng.randint(1, max_weight) for _ in range(n))) for _ in range(size)]


def embcodim_upper_bound(X: AffinePresentation, alpha: Arc, component: Sequence | None = None) -> OrderValue:
    """ord_alpha of Jac of (the component of) X: an upper bound for the embedding codimension."""
    Y = X
    if component is not None:
        gens = [X.ring.parse(g) if isinstance(g, str) else g for g in component]
        Y = AffinePresentation(X.ring, gens)
    d = krull_dimension(Y)
    return fitting_order(Y, d, alpha)
