"""Buchberger's algorithm with the sugar strategy.

Internally a polynomial is a dict ``{exponent tuple: coefficient}``; monomial
comparisons go through flat integer keys produced by :class:`MonomialOrder`
(larger key means larger monomial).  Basis elements are kept monic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .fields import fresh_name
from .polynomials import Poly, PolyRing, RingMismatch


class ResourceCapExceeded(RuntimeError):
    pass


class NotAutoreduced(ValueError):
    pass


DEFAULT_BUDGET = 20000


@dataclass(frozen=True)
class MonomialOrder:
    """``grevlex``, ``lex`` or ``elim`` (grevlex blocks split after ``split`` variables)."""

    kind: str = "grevlex"
    split: int = 0

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "elim"):
            raise ValueError(f"unknown monomial order {self.kind!r}")

    def key(self, e: tuple[int, ...]) -> tuple[int, ...]:
        if self.kind == "lex":
            return e
        if self.kind == "grevlex":
            return (sum(e),) + tuple(-a for a in reversed(e))
        k = self.split
        head, tail = e[:k], e[k:]
        return (sum(head),) + tuple(-a for a in reversed(head)) + (sum(tail),) + tuple(-a for a in reversed(tail))

    def __str__(self):
        return f"elim({self.split})" if self.kind == "elim" else self.kind


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def as_order(order) -> MonomialOrder:
    if isinstance(order, MonomialOrder):
        return order
    if isinstance(order, str):
        if order.startswith("elim"):
            return MonomialOrder("elim", int(order[order.index("(") + 1 : order.index(")")]))
        return MonomialOrder(order)
    raise ValueError(f"not a monomial order: {order!r}")


@dataclass(frozen=True)
class Ideal:
    """A nonempty list of nonzero generators in a shared ring."""

    ring: PolyRing
    generators: tuple

    def __init__(self, generators: Iterable[Poly], ring: PolyRing | None = None):
        gens = tuple(generators)
        if ring is None:
            if not gens:
                raise ValueError("an ideal needs at least one generator or an explicit ring")
            ring = gens[0].ring
        for g in gens:
            if g.ring != ring:
                raise RingMismatch("generators must share a ring")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "generators", tuple(g for g in gens if not g.is_zero()))

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)

    def format(self) -> list[str]:
        return [g.format() for g in self.generators]


class _Ctx:
    """Per-computation caches for monomial keys."""

    def __init__(self, order: MonomialOrder):
        self.order = order
        self._keys: dict = {}

    def key(self, e):
        k = self._keys.get(e)
        if k is None:
            k = self.order.key(e)
            self._keys[e] = k
        return k

    def neg(self, e):
        return tuple(-a for a in self.key(e))

    def lead(self, f: dict):
        return max(f, key=self.key)


@dataclass
class _Elem:
    lm: tuple
    mask: int
    terms: list  # [(exps, coeff)] descending, monic, first term is the lead
    sugar: int


def _mask(e) -> int:
    m = 0
    for i, a in enumerate(e):
        if a:
            m |= 1 << i
    return m


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _make_elem(f: dict, ctx: _Ctx, sugar: int) -> _Elem:
    items = sorted(f.items(), key=lambda t: ctx.key(t[0]), reverse=True)
    inv = 1 / items[0][1]
    terms = [(e, c * inv) for e, c in items]
    return _Elem(items[0][0], _mask(items[0][0]), terms, sugar)


def _reduce(f: dict, basis: Sequence[_Elem], ctx: _Ctx) -> dict:
    """Remainder of ``f`` on division by ``basis`` (consumes ``f``)."""
    heap = [(ctx.neg(e), e) for e in f]
    heapq.heapify(heap)
    rem: dict = {}
    while heap:
        _, e = heapq.heappop(heap)
        c = f.pop(e, None)
        if c is None:
            continue
        m = _mask(e)
        div = None
        for g in basis:
            if g.mask & ~m == 0 and _divides(g.lm, e):
                div = g
                break
        if div is None:
            rem[e] = c
            continue
        q = tuple(a - b for a, b in zip(e, div.lm))
        for ge, gc in div.terms[1:]:
            ne = tuple(a + b for a, b in zip(ge, q))
            v = f.get(ne)
            if v is None:
                f[ne] = -(c * gc)
                heapq.heappush(heap, (ctx.neg(ne), ne))
            else:
                v = v - c * gc
                if v == 0:
                    del f[ne]
                else:
                    f[ne] = v
    return rem


def _spoly(a: _Elem, b: _Elem) -> tuple[dict, tuple]:
    lcm = tuple(max(x, y) for x, y in zip(a.lm, b.lm))
    qa = tuple(x - y for x, y in zip(lcm, a.lm))
    qb = tuple(x - y for x, y in zip(lcm, b.lm))
    out: dict = {}
    for e, c in a.terms[1:]:
        out[tuple(x + y for x, y in zip(e, qa))] = c
    for e, c in b.terms[1:]:
        ne = tuple(x + y for x, y in zip(e, qb))
        v = out.get(ne)
        if v is None:
            out[ne] = -c
        else:
            v = v - c
            if v == 0:
                del out[ne]
            else:
                out[ne] = v
    return out, lcm


@dataclass
class GroebnerBasis:
    ring: PolyRing
    order: MonomialOrder
    polys: list
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        self._ctx = _Ctx(self.order)
        self._elems = [_make_elem(dict(p.terms), self._ctx, p.total_degree()) for p in self.polys]

    def __iter__(self):
        return iter(self.polys)

    def __len__(self):
        return len(self.polys)

    def is_unit(self) -> bool:
        return any(p.is_constant() and not p.is_zero() for p in self.polys)

    def reduce(self, g: Poly) -> Poly:
        if g.ring != self.ring:
            raise RingMismatch(f"{g.ring!r} vs {self.ring!r}")
        return Poly(self.ring, _reduce(dict(g.terms), self._elems, self._ctx))

    def contains(self, g: Poly) -> bool:
        return self.reduce(g).is_zero()

    def format(self) -> list[str]:
        return [p.format() for p in self.polys]


def groebner_basis(ideal: Ideal | Sequence[Poly], order="grevlex", budget: int | None = None) -> GroebnerBasis:
    """Reduced Gröbner basis; raises :class:`ResourceCapExceeded` after ``budget`` S-pair reductions."""
    if not isinstance(ideal, Ideal):
        ideal = Ideal(ideal)
    order = as_order(order)
    budget = DEFAULT_BUDGET if budget is None else budget
    ring = ideal.ring
    ctx = _Ctx(order)
    gens = [g for g in ideal.generators if not g.is_zero()]
    basis: list[_Elem | None] = []
    pairs: list = []
    pending: set = set()
    counter = 0
    stats = {"pairs": 0, "reductions": 0, "product": 0, "chain": 0}

    def add(elem: _Elem):
        nonlocal counter
        idx = len(basis)
        basis.append(elem)
        for j, other in enumerate(basis[:-1]):
            if other is None:
                continue
            lcm = tuple(max(x, y) for x, y in zip(elem.lm, other.lm))
            sugar = max(
                elem.sugar + sum(lcm) - sum(elem.lm),
                other.sugar + sum(lcm) - sum(other.lm),
            )
            heapq.heappush(pairs, (sugar, counter, j, idx))
            pending.add((j, idx))
            counter += 1

    # interreduce the input first so the pair set starts small
    start = sorted(gens, key=lambda p: (p.total_degree(), ctx.key(ctx.lead(p.terms))))
    for g in start:
        active = [b for b in basis if b is not None]
        r = _reduce(dict(g.terms), active, ctx)
        if r:
            elem = _make_elem(r, ctx, g.total_degree())
            add(elem)
            if not any(elem.lm):
                break

    while pairs:
        sugar, _, i, j = heapq.heappop(pairs)
        pending.discard((i, j))
        a, b = basis[i], basis[j]
        if a is None or b is None:
            continue
        stats["pairs"] += 1
        lcm = tuple(max(x, y) for x, y in zip(a.lm, b.lm))
        if all(x == 0 or y == 0 for x, y in zip(a.lm, b.lm)):
            stats["product"] += 1
            continue
        if _chain(i, j, lcm, basis, pending):
            stats["chain"] += 1
            continue
        if stats["reductions"] >= budget:
            raise ResourceCapExceeded(f"S-pair budget of {budget} exhausted")
        stats["reductions"] += 1
        s, _ = _spoly(a, b)
        active = [e for e in basis if e is not None]
        r = _reduce(s, active, ctx)
        if not r:
            continue
        elem = _make_elem(r, ctx, sugar)
        add(elem)
        if not any(elem.lm):
            break

    polys = _reduced(basis, ctx, ring)
    return GroebnerBasis(ring, order, polys, stats)


def _chain(i: int, j: int, lcm, basis, pending) -> bool:
    for k, c in enumerate(basis):
        if c is None or k == i or k == j:
            continue
        if not _divides(c.lm, lcm):
            continue
        if (min(i, k), max(i, k)) in pending or (min(j, k), max(j, k)) in pending:
            continue
        return True
    return False


def _reduced(basis, ctx: _Ctx, ring: PolyRing) -> list[Poly]:
    elems = [b for b in basis if b is not None]
    if any(not any(e.lm) for e in elems):
        return [ring.one]
    elems.sort(key=lambda e: ctx.key(e.lm))
    minimal: list[_Elem] = []
    for e in elems:
        if not any(_divides(m.lm, e.lm) for m in minimal):
            minimal.append(e)
    out = []
    for k, e in enumerate(minimal):
        others = minimal[:k] + minimal[k + 1 :]
        tail = dict(e.terms[1:])
        r = _reduce(tail, others, ctx)
        r[e.lm] = e.terms[0][1]
        out.append(Poly(ring, r))
    out.sort(key=lambda p: ctx.key(ctx.lead(p.terms)))
    return out


def is_autoreduced(polys: Sequence[Poly], order) -> bool:
    ctx = _Ctx(as_order(order))
    leads = [ctx.lead(p.terms) for p in polys if not p.is_zero()]
    for i, p in enumerate(polys):
        for e in p.terms:
            for k, lm in enumerate(leads):
                if k != i and _divides(lm, e):
                    return False
    return True


def normal_form(g: Poly, basis: GroebnerBasis | Sequence[Poly], order="grevlex") -> Poly:
    """Remainder of ``g`` modulo a Gröbner basis.

    A plain list is accepted only when it is autoreduced; it is then trusted
    to be a Gröbner basis for ``order``.
    """
    if not isinstance(basis, GroebnerBasis):
        polys = [p for p in basis if not p.is_zero()]
        if not is_autoreduced(polys, order):
            raise NotAutoreduced("basis is not autoreduced")
        ring = polys[0].ring if polys else g.ring
        basis = GroebnerBasis(ring, as_order(order), polys)
    return basis.reduce(g)


def ideal_member(g: Poly, ideal: Ideal | Sequence[Poly], order="grevlex", budget: int | None = None) -> bool:
    return groebner_basis(ideal, order, budget).contains(g)


def _extend_ring(ring: PolyRing, stem: str) -> tuple[PolyRing, str]:
    z = fresh_name(stem, ring.names + ring.field.names())
    return ring.extend([z]), z


def radical_member(g: Poly, ideal: Ideal | Sequence[Poly], budget: int | None = None) -> bool:
    """``g`` lies in the radical iff ``1`` lies in ``I + (1 - z g)``."""
    if not isinstance(ideal, Ideal):
        ideal = Ideal(ideal, g.ring)
    ring2, z = _extend_ring(ideal.ring, "z")
    gens = [p.embed(ring2) for p in ideal.generators]
    gens.append(ring2.one - ring2.gen(z) * g.embed(ring2))
    return groebner_basis(gens, "grevlex", budget).is_unit()


def nilpotency_index(g: Poly, ideal: Ideal | Sequence[Poly], max_power: int, budget: int | None = None) -> int | None:
    """Smallest ``N <= max_power`` with ``g^N`` in the ideal, else ``None``."""
    if max_power < 1:
        raise ValueError("max_power must be at least 1")
    if not isinstance(ideal, Ideal):
        ideal = Ideal(ideal, g.ring)
    if not ideal.generators:
        return None if not g.is_zero() else 1
    gb = groebner_basis(ideal, "grevlex", budget)
    h = gb.reduce(g)
    for n in range(1, max_power + 1):
        if h.is_zero():
            return n
        h = gb.reduce(h * g)
    return None


@dataclass
class LocalizedBasis:
    """Gröbner basis of ``I R_s`` realised as ``I + (z s - 1)`` in ``R[z]``."""

    ring: PolyRing
    extended: PolyRing
    basis: GroebnerBasis

    def reduce(self, g: Poly) -> Poly:
        return self.basis.reduce(g.embed(self.extended))

    def contains(self, g: Poly) -> bool:
        return self.reduce(g).is_zero()

    def is_unit(self) -> bool:
        return self.basis.is_unit()


def localize(ideal: Ideal | Sequence[Poly], units: Sequence[Poly], budget: int | None = None, ring: PolyRing | None = None) -> LocalizedBasis:
    """Ideal membership after inverting every polynomial in ``units``."""
    if not isinstance(ideal, Ideal):
        ideal = Ideal(ideal, ring)
    base = ideal.ring
    ring2, z = _extend_ring(base, "z")
    s = ring2.one
    for u in units:
        s = s * u.embed(ring2)
    gens = [p.embed(ring2) for p in ideal.generators] + [ring2.gen(z) * s - 1]
    return LocalizedBasis(base, ring2, groebner_basis(gens, "grevlex", budget))
