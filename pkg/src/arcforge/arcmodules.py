"""Modules over k[[t]] obtained by pulling differentials back along arcs.

Presentation matrices follow one convention throughout: rows are relations
and columns are generators (``dx_1..dx_n``), so a module is
``B^cols / rowspace(A)`` with ``B = k[[t]]``.

Two independent routes compute torsion:

* :func:`series_smith_form` eliminates with a minimal-order pivot;
* :func:`fitting_order` takes minors symbolically and evaluates them.

Both agree on uncensored input; that agreement is a test oracle.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Sequence

from . import upoly
from .fields import Field
from .groebner import Ideal, groebner_basis
from .jets import AffinePresentation, Arc, arc_eval, check_on_scheme
from .polynomials import Poly, PolyRing
from .series import INFINITE, AtLeast, Finite, OrderValue, TruncatedSeries, order_min, order_sum, series_order


class MorphismError(ValueError):
    pass


@dataclass(frozen=True)
class MorphismPresentation:
    """``f: X -> Y`` given by one image polynomial (in X's ring) per target coordinate."""

    source: AffinePresentation
    target: AffinePresentation
    images: tuple

    def __init__(self, source: AffinePresentation, target: AffinePresentation, images: Sequence, validate: bool = True):
        imgs = tuple(source.ring(g) for g in images)
        if len(imgs) != target.ring.nvars:
            raise MorphismError("need one image per target coordinate")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "images", imgs)
        if validate and target.generators:
            gb = groebner_basis(Ideal(source.generators, source.ring)) if source.generators else None
            for h in target.generators:
                pulled = h.compose(source.ring, imgs)
                ok = pulled.is_zero() if gb is None else gb.contains(pulled)
                if not ok:
                    raise MorphismError(f"{h.format()} does not pull back into the ideal of the source")

    def jacobian(self) -> list[list[Poly]]:
        return [[g.diff(v) for v in self.source.ring.names] for g in self.images]

    def image_arc(self, alpha: Arc) -> Arc:
        return alpha.compose(self.images, self.target.ring)


def morphism(source: AffinePresentation, target: AffinePresentation, images: Sequence[str], validate: bool = True) -> MorphismPresentation:
    return MorphismPresentation(source, target, [source.ring.parse(g) if isinstance(g, str) else g for g in images], validate)


# Series matrices ------------------------------------------------------------

@dataclass(frozen=True)
class SeriesMatrix:
    field: Field
    entries: tuple  # tuple of row tuples of TruncatedSeries
    ncols: int = 0

    def __init__(self, field: Field, entries: Sequence[Sequence[TruncatedSeries]], ncols: int | None = None):
        rows = tuple(tuple(r) for r in entries)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("series matrix must be rectangular")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "ncols", ncols)

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def exact(self) -> bool:
        return all(s.exact for r in self.entries for s in r)

    @property
    def precision(self) -> int:
        inexact = [s.precision for r in self.entries for s in r if not s.exact]
        if inexact:
            return min(inexact)
        return max((s.precision for r in self.entries for s in r), default=0)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def orders(self) -> list[list[OrderValue]]:
        return [[series_order(s) for s in r] for r in self.entries]

    def format(self) -> list[list[str]]:
        return [[s.format() for s in r] for r in self.entries]


def evaluate_matrix(rows: Sequence[Sequence[Poly]], alpha: Arc, ncols: int) -> SeriesMatrix:
    return SeriesMatrix(alpha.field, [[arc_eval(g, alpha) for g in r] for r in rows], ncols)


class _Local:
    """Element of k[t] localised at (t): ``num/den`` with ``den(0) = 1``."""

    __slots__ = ("num", "den", "field")

    def __init__(self, field: Field, num: list, den: list | None = None):
        self.field = field
        num = upoly.trim(num)
        if den is None:
            den = [field.one]
        if num and len(den) > 1:
            g = upoly.gcd(num, den)
            if len(g) > 1:
                num = upoly.exquo(num, g)
                den = upoly.exquo(den, g)
        if not num:
            den = [field.one]
        c = den[0]
        if c != field.one:
            inv = field.one / c
            num = upoly.scale(num, inv)
            den = upoly.scale(den, inv)
        self.num = num
        self.den = den

    @classmethod
    def from_series(cls, s: TruncatedSeries) -> "_Local":
        return cls(s.field, list(s.coeffs))

    def __add__(self, o: "_Local") -> "_Local":
        if len(self.den) == 1 and len(o.den) == 1:
            return _Local(self.field, upoly.add(self.num, o.num))
        return _Local(self.field, upoly.add(upoly.mul(self.num, o.den), upoly.mul(o.num, self.den)), upoly.mul(self.den, o.den))

    def __neg__(self) -> "_Local":
        return _Local(self.field, [-c for c in self.num], self.den)

    def __sub__(self, o: "_Local") -> "_Local":
        return self + (-o)

    def __mul__(self, o: "_Local") -> "_Local":
        return _Local(self.field, upoly.mul(self.num, o.num), upoly.mul(self.den, o.den))

    def order(self) -> OrderValue:
        for i, c in enumerate(self.num):
            if not self.field.decide_zero(c):
                return Finite(i)
        return INFINITE

    def quot(self, p: "_Local", v: int) -> "_Local":
        """``self / p`` where ``p`` has order ``v <= ord(self)``."""
        if not self.num:
            return self
        a = self.num[v:]
        b = p.num[v:]
        return _Local(self.field, upoly.mul(a, p.den), upoly.mul(self.den, b))

    def to_series(self, precision: int) -> TruncatedSeries:
        if len(self.den) == 1:
            return TruncatedSeries(self.field, self.num or [self.field.zero], max(len(self.num) - 1, 0), exact=True)
        d = TruncatedSeries(self.field, self.den, len(self.den) - 1, exact=True).inverse(precision)
        return TruncatedSeries(self.field, self.num, max(len(self.num) - 1, 0), exact=True) * d

    def format(self) -> str:
        f = self.field
        n = upoly.trim(self.num)
        num = [((i,), c) for i, c in enumerate(n) if c != 0]
        s = _format_t(num, f)
        if len(self.den) == 1:
            return s
        den = [((i,), c) for i, c in enumerate(self.den) if c != 0]
        return f"({s})/({_format_t(den, f)})"


def _format_t(terms, field):
    from .fields import format_terms

    return format_terms(sorted(terms, reverse=True), ("t",), field)


def _series_quot(a: TruncatedSeries, p: TruncatedSeries, v: int, working: int) -> TruncatedSeries:
    """``a / p`` for series with ``ord p = v <= ord a``."""
    unit = p.divide_t(v)
    num = a.divide_t(v) if (a.exact or v <= a.precision) else a
    prec = working if a.exact else num.precision
    if unit.exact and len(unit.coeffs) == 1:
        return num * (p.field.one / unit[0])
    return num * unit.inverse(prec)


@dataclass
class SmithForm:
    """Elementary-divisor orders of a presentation (rows = relations)."""

    invariant_orders: list
    free_rank: int
    rank: int
    censored: bool
    left: list | None = None
    right: list | None = None
    right_inverse: list | None = None
    diagonal: list | None = None
    mode: str = "exact"

    def torsion(self) -> OrderValue:
        return order_sum(o for o in self.invariant_orders)

    def to_json(self) -> dict:
        return {
            "invariant_orders": [o.to_json() for o in self.invariant_orders],
            "free_rank": self.free_rank,
            "censored": self.censored,
        }


def _identity(n: int, one, zero) -> list[list]:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def series_smith_form(A: SeriesMatrix, transforms: bool = True) -> SmithForm:
    """Smith form over k[[t]] by minimal-order pivoting.

    Exact input is processed in ``k[t]_(t)`` (exact rational functions), so
    no precision is lost.  Inexact input is processed as truncated series;
    whenever a censored entry could undercut the pivot, every remaining
    invariant order becomes ``AtLeast`` of the smallest lower bound.
    """
    K = A.field
    r, c = A.nrows, A.ncols
    exact = A.exact
    working = A.precision
    if exact:
        M = [[_Local.from_series(s) for s in row] for row in A.entries]
        one, zero = _Local(K, [K.one]), _Local(K, [])
        quot = lambda a, p, v: a.quot(p, v)  # noqa: E731
        order = lambda a: a.order()  # noqa: E731
    else:
        M = [list(row) for row in A.entries]
        one = TruncatedSeries.constant(K, 1)
        zero = TruncatedSeries.constant(K, 0)
        quot = lambda a, p, v: _series_quot(a, p, v, working)  # noqa: E731
        order = series_order
    L = _identity(r, one, zero) if transforms else None
    R = _identity(c, one, zero) if transforms else None
    Rinv = _identity(c, one, zero) if transforms else None
    orders: list[OrderValue] = []
    censored = False
    k = 0
    while k < min(r, c):
        best = None
        censor_bound = None
        for i in range(k, r):
            for j in range(k, c):
                o = order(M[i][j])
                if o.is_finite:
                    if best is None or o.n < best[0]:
                        best = (o.n, i, j)
                elif o.is_censored:
                    censor_bound = o.n if censor_bound is None else min(censor_bound, o.n)
        if best is None and censor_bound is None:
            break  # the rest is exactly zero
        if censor_bound is not None and (best is None or censor_bound <= best[0]):
            bound = censor_bound if best is None else min(censor_bound, best[0])
            orders.extend(AtLeast(bound) for _ in range(k, min(r, c)))
            censored = True
            break
        v, pi, pj = best
        if pi != k:
            M[k], M[pi] = M[pi], M[k]
            if L is not None:
                L[k], L[pi] = L[pi], L[k]
        if pj != k:
            for row in M:
                row[k], row[pj] = row[pj], row[k]
            if R is not None:
                for row in R:
                    row[k], row[pj] = row[pj], row[k]
                Rinv[k], Rinv[pj] = Rinv[pj], Rinv[k]
        p = M[k][k]
        for i in range(k + 1, r):
            if order(M[i][k]).is_infinite:
                continue
            q = quot(M[i][k], p, v)
            M[i] = [M[i][j] - q * M[k][j] if j >= k else M[i][j] for j in range(c)]
            M[i][k] = zero
            if L is not None:
                L[i] = [L[i][j] - q * L[k][j] for j in range(r)]
        for j in range(k + 1, c):
            if order(M[k][j]).is_infinite:
                continue
            q = quot(M[k][j], p, v)
            for i in range(k, r):
                M[i][j] = M[i][j] - q * M[i][k]
            M[k][j] = zero
            if R is not None:
                for i in range(c):
                    R[i][j] = R[i][j] - q * R[i][k]
                Rinv[k] = [Rinv[k][l] + q * Rinv[j][l] for l in range(c)]
        orders.append(Finite(v))
        k += 1
    diag = [M[i][i] for i in range(min(r, c))] if transforms else None
    return SmithForm(orders, c - len(orders), len(orders), censored, L, R, Rinv, diag, "exact" if exact else "truncated")


def smith_matrix_to_series(Mx: list, precision: int) -> list[list[TruncatedSeries]]:
    return [[e.to_series(precision) if isinstance(e, _Local) else e for e in row] for row in Mx]


# Minors -------------------------------------------------------------------

def _det(rows: list[list]) -> Any:
    """Laplace expansion along the first row (matrices here are tiny)."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    acc = None
    for j in range(n):
        sub = [row[:j] + row[j + 1 :] for row in rows[1:]]
        term = rows[0][j] * _det(sub)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def minors(rows: Sequence[Sequence], k: int) -> list:
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    out = []
    for ri in itertools.combinations(range(nr), k):
        for ci in itertools.combinations(range(nc), k):
            out.append(_det([[rows[i][j] for j in ci] for i in ri]))
    return out


def series_matrix_rank(A: SeriesMatrix) -> int | None:
    """Largest size of a minor that is nonzero; ``None`` when censoring hides it."""
    rows = [list(r) for r in A.entries]
    for k in range(min(A.nrows, A.ncols), 0, -1):
        os_ = [series_order(m) for m in minors(rows, k)]
        if any(o.is_finite for o in os_):
            return k
        if any(o.is_censored for o in os_):
            return None
    return 0


def matrix_fitting_order(A: SeriesMatrix, d: int) -> OrderValue:
    """ord of the ideal of ``(cols - d)``-minors of a series matrix."""
    k = A.ncols - d
    if k <= 0:
        return Finite(0)
    if k > A.nrows:
        return INFINITE
    return order_min(series_order(m) for m in minors([list(r) for r in A.entries], k))


# Differentials --------------------------------------------------------------

@dataclass
class ModulePullback:
    presentation: SeriesMatrix
    generator_labels: tuple
    symbolic: list = field(default_factory=list)


def jacobian_rows(X: AffinePresentation, relative_to: MorphismPresentation | None = None) -> list[list[Poly]]:
    rows = [[g.diff(v) for v in X.ring.names] for g in X.generators]
    if relative_to is not None:
        if relative_to.source.ring != X.ring:
            raise MorphismError("morphism source differs from the scheme")
        rows += relative_to.jacobian()
    return rows


def differentials_pullback(X: AffinePresentation, alpha: Arc, relative_to: MorphismPresentation | None = None,
                           validate: bool = True) -> ModulePullback:
    if validate:
        check_on_scheme(X, alpha)
    rows = jacobian_rows(X, relative_to)
    labels = tuple("d" + v for v in X.ring.names)
    return ModulePullback(evaluate_matrix(rows, alpha, X.ring.nvars), labels, rows)


def torsion_dimension(P: ModulePullback | SeriesMatrix) -> OrderValue:
    A = P.presentation if isinstance(P, ModulePullback) else P
    return series_smith_form(A, transforms=False).torsion()


def fitting_order(X: AffinePresentation, d: int, alpha: Arc, relative_to: MorphismPresentation | None = None) -> OrderValue:
    """ord_alpha of Fitt^d of (relative) differentials, via symbolic minors."""
    if d < 0:
        raise ValueError("Fitting index must be natural")
    rows = jacobian_rows(X, relative_to)
    n = X.ring.nvars
    k = n - d
    if k <= 0:
        return Finite(0)
    if k > len(rows):
        return INFINITE
    ms = [m for m in minors(rows, k) if not m.is_zero()]
    if not ms:
        return INFINITE
    if any(m.is_constant() for m in ms):
        return Finite(0)
    return order_min(series_order(arc_eval(m, alpha)) for m in ms)


# Cotangent kernel -------------------------------------------------------------

@dataclass
class KernelReport:
    """dim ker Phi_alpha (an upper bound for dim ker T*) and the bounds it is compared with."""

    kernel_dim: OrderValue
    bound: OrderValue
    refined_bound: OrderValue | None
    relative_rank: int | None
    source_rank: int | None
    target_rank: int | None
    source_fitting: OrderValue
    target_fitting: OrderValue
    x_smooth_at_origin: bool
    etale_at_generic: bool
    smooth_at_generic: bool
    free_map_orders: list
    censored: bool

    @property
    def equality_expected(self) -> bool:
        return self.x_smooth_at_origin and self.etale_at_generic and self.bound.is_finite

    def to_json(self) -> dict:
        return {
            "kernel_dim_Phi": self.kernel_dim.to_json(),
            "bound": self.bound.to_json(),
            "refined_bound": None if self.refined_bound is None else self.refined_bound.to_json(),
            "relative_rank": self.relative_rank,
            "source_rank": self.source_rank,
            "target_rank": self.target_rank,
            "source_fitting": self.source_fitting.to_json(),
            "target_fitting": self.target_fitting.to_json(),
            "x_smooth_at_origin": self.x_smooth_at_origin,
            "etale_at_generic": self.etale_at_generic,
            "smooth_at_generic": self.smooth_at_generic,
            "free_map_orders": [o.to_json() for o in self.free_map_orders],
            "censored": self.censored,
        }


def _matmul(a: list[list], b: list[list], zero) -> list[list]:
    out = []
    for row in a:
        new = []
        for j in range(len(b[0]) if b else 0):
            acc = zero
            for k, x in enumerate(row):
                acc = acc + x * b[k][j]
            new.append(acc)
        out.append(new)
    return out


def cotangent_kernel(f: MorphismPresentation, alpha: Arc, validate: bool = True) -> KernelReport:
    X, Y = f.source, f.target
    if validate:
        check_on_scheme(X, alpha)
    beta = f.image_arc(alpha)
    PX = differentials_pullback(X, alpha, validate=False)
    PY = differentials_pullback(Y, beta, validate=False)
    SX = series_smith_form(PX.presentation)
    SY = series_smith_form(PY.presentation)
    rel = series_smith_form(differentials_pullback(X, alpha, f, validate=False).presentation, transforms=False)
    censored = SX.censored or SY.censored or rel.censored
    d = None if SX.censored else SX.free_rank
    e = None if SY.censored else SY.free_rank
    r = None if rel.censored else rel.free_rank

    bound = fitting_order(X, r, alpha, f) if r is not None else AtLeast(0)
    fx = fitting_order(X, d, alpha) if d is not None else AtLeast(0)
    fy = fitting_order(Y, e, beta) if e is not None else AtLeast(0)

    # induced map on free parts, in the Smith bases
    free_orders: list[OrderValue] = []
    if censored:
        kernel = AtLeast(0)
    else:
        jac = [[arc_eval(g.diff(v), alpha) for v in X.ring.names] for g in f.images]
        exact = SX.mode == "exact" and SY.mode == "exact" and all(s.exact for row in jac for s in row)
        prec = min(PX.presentation.precision, PY.presentation.precision, alpha.precision)
        if exact:
            J = [[_Local.from_series(s) for s in row] for row in jac]
            zero = _Local(alpha.field, [])
            lift = [row for row in SY.right_inverse[SY.rank:]]
            cols = [row[SX.rank:] for row in SX.right]
        else:
            J = jac
            zero = TruncatedSeries.constant(alpha.field, 0)
            lift = smith_matrix_to_series(SY.right_inverse[SY.rank:], prec)
            cols = smith_matrix_to_series([row[SX.rank:] for row in SX.right], prec)
        if e == 0:
            kernel = Finite(0)
        elif d == 0:
            kernel = INFINITE
        else:
            Mf = _matmul(_matmul(lift, J, zero), cols, zero)
            Mf_series = smith_matrix_to_series(Mf, prec)
            S = series_smith_form(SeriesMatrix(alpha.field, Mf_series, d), transforms=False)
            free_orders = list(S.invariant_orders)
            if S.censored:
                kernel = AtLeast(order_sum(S.invariant_orders).n)
                censored = True
            elif S.rank < e:
                kernel = INFINITE  # not injective on free parts
            else:
                kernel = S.torsion()

    refined = None
    if not (bound.is_censored or fy.is_censored):
        diff = bound.minus(fx)
        refined = None if diff is None else diff + fy
    x_smooth = fx == Finite(0)
    smooth_generic = (
        r is not None and d is not None and e is not None and fx.is_finite and fy.is_finite and r == d - e
    )
    etale = smooth_generic and r == 0 and d == e and bound.is_finite
    return KernelReport(kernel, bound, refined, r, d, e, fx, fy, x_smooth, etale, smooth_generic, free_orders, censored)


# Ramification ----------------------------------------------------------------

@dataclass
class Classification:
    omega: OrderValue
    verdict: str
    message: str

    def to_json(self) -> dict:
        return {"omega": self.omega.to_json(), "verdict": self.verdict, "message": self.message}


VERDICTS = {
    "unramified": "f unramified at alpha(0); f_inf unramified, quasi-finite and locally of finite type at alpha",
    "ramified_closed": "f ramified at alpha(0) but unramified at alpha(eta); f_inf not lft at alpha; fiber of f_inf lft at alpha",
    "ramified_generic": "f ramified at alpha(eta); fiber of f_inf not lft at alpha",
    "indeterminate": "order censored by precision",
}


def ramification_classify(f: MorphismPresentation, alpha: Arc) -> Classification:
    omega = fitting_order(f.source, 0, alpha, f)
    if omega.is_infinite:
        v = "ramified_generic"
    elif omega.is_censored:
        v = "indeterminate"
    elif omega.n == 0:
        v = "unramified"
    else:
        v = "ramified_closed"
    msg = VERDICTS[v]
    if omega.is_censored:
        msg = f"{msg}: at least {omega.n}"
    return Classification(omega, v, msg)


# Projection search -------------------------------------------------------------

@dataclass
class ProjectionResult:
    matrix: list
    morphism: MorphismPresentation
    order: OrderValue
    trials: int
    seed: int

    def to_json(self) -> dict:
        return {
            "matrix": [[int(a) for a in row] for row in self.matrix],
            "images": [g.format() for g in self.morphism.images],
            "order": self.order.to_json(),
            "trials": self.trials,
            "seed": self.seed,
        }


def projection_search(X: AffinePresentation, alpha: Arc, d: int, trial_budget: int = 50, seed: int = 0) -> ProjectionResult | None:
    """A linear projection to A^d whose relative Fitt^0 order matches ord Fitt^d of X."""
    target = fitting_order(X, d, alpha)
    if not target.is_finite:
        raise ValueError(f"X is not smooth of dimension {d} at the generic point of the arc (ord Fitt^{d} = {target})")
    n = X.ring.nvars
    tgt_ring = PolyRing(X.field, [f"z{i + 1}" for i in range(d)])
    Y = AffinePresentation(tgt_ring, [])
    rng = random.Random(seed)

    def candidates():
        for subset in itertools.combinations(range(n), d):
            yield [[1 if j == s else 0 for j in range(n)] for s in subset]
        while True:
            yield [[rng.randint(-3, 3) for _ in range(n)] for _ in range(d)]

    gens = X.ring.gens
    for trial, mat in enumerate(candidates(), start=1):
        if trial > trial_budget:
            return None
        images = []
        for row in mat:
            g = X.ring.zero
            for a, x in zip(row, gens):
                if a:
                    g = g + x * a
            images.append(g)
        f = MorphismPresentation(X, Y, images, validate=False)
        o = fitting_order(X, 0, alpha, f)
        if o == target:
            return ProjectionResult(mat, f, o, trial, seed)
    return None


def random_series_matrix(rng: random.Random, field: Field, max_size: int = 4, max_order: int = 5, density: float = 0.8,
                         dependent: float = 0.25) -> SeriesMatrix:
    """Random exact matrix whose entries are monomial-times-unit polynomials of order <= max_order, or zero.

    With probability ``dependent`` the last row is replaced by a combination of
    the others, so rank-deficient presentations are exercised too.
    """
    r = rng.randint(1, max_size)
    c = rng.randint(1, max_size)
    rows = []
    for _ in range(r):
        row = []
        for _ in range(c):
            if rng.random() > density:
                row.append(TruncatedSeries.constant(field, 0))
                continue
            v = rng.randint(0, max_order)
            lead = 0
            while lead == 0:
                lead = rng.randint(-4, 4)
            coeffs = [0] * v + [lead] + [rng.randint(-4, 4) for _ in range(rng.randint(0, 3))]
            row.append(TruncatedSeries(field, coeffs, len(coeffs) - 1, exact=True))
        rows.append(row)
    if r >= 2 and rng.random() < dependent:
        combo = [TruncatedSeries.constant(field, 0) for _ in range(c)]
        for row in rows[:-1]:
            k = TruncatedSeries.monomial(field, rng.randint(0, 2), rng.randint(-2, 2))
            combo = [a + k * b for a, b in zip(combo, row)]
        rows[-1] = combo
    return SeriesMatrix(field, rows, c)
