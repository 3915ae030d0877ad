"""Exact coefficient fields.

Four kinds of field are supported:

* ``QQ`` -- the rationals, elements are :class:`fractions.Fraction`;
* ``PrimeField(p)`` -- residues mod ``p``, elements are :class:`Mod`;
* ``FractionField(base, params)`` -- rational functions in named parameters
  over ``QQ`` or ``GF(p)``, elements are sympy ``FracElement`` objects;
* ``TowerField(base, name, modulus)`` -- ``base[z]/(q(z))`` for a monic
  squarefree ``q`` of degree >= 2.

Tower rings need not be fields.  Inverting a zero divisor raises
:class:`ZeroDivisorSplit`, which carries the factorisation of the modulus that
it revealed; callers use :func:`over_roots` to re-run a computation once per
factor (dynamic evaluation).
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from typing import Any, Callable, Iterator, Sequence

from sympy import GF as _sympy_GF
from sympy import QQ as _sympy_QQ
from sympy.polys.fields import field as _sympy_field


class FieldError(ValueError):
    pass


class ZeroDivisorSplit(ArithmeticError):
    """A non-invertible nonzero element was met in a tower ring.

    ``factor`` and ``cofactor`` are monic coefficient lists over the tower's
    base with ``factor * cofactor == modulus``.
    """

    def __init__(self, tower: "TowerField", factor: list, cofactor: list):
        super().__init__(f"zero divisor in {tower.name}-level of tower")
        self.tower = tower
        self.factor = factor
        self.cofactor = cofactor


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


class Mod:
    """Residue class modulo a prime."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _lift(self, other):
        if isinstance(other, Mod):
            if other.p != self.p:
                raise FieldError(f"mixing GF({self.p}) and GF({other.p})")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            if other.denominator % self.p == 0:
                raise ZeroDivisionError(f"{other} has no image in GF({self.p})")
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Mod(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Mod(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Mod(o - self.v, self.p)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Mod(self.v * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Mod(-self.v, self.p)

    def __pos__(self):
        return self

    def inverse(self) -> "Mod":
        if self.v == 0:
            raise ZeroDivisionError(f"division by zero in GF({self.p})")
        return Mod(pow(self.v, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * Mod(o, self.p).inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Mod(o, self.p) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return Mod(pow(self.v, n, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, Mod):
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return (self.v - other) % self.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"Mod({self.v}, {self.p})"


class Field:
    """Common interface of the coefficient fields."""

    characteristic: int = 0

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def __call__(self, x: Any):  # pragma: no cover - abstract
        raise NotImplementedError

    def decide_zero(self, a) -> bool:
        """Exact zero test; in tower rings a nonzero zero divisor raises a split."""
        return a == 0

    def inv(self, a):
        return self.one / a

    def pth_root(self, a):
        """p-th root of ``a`` inside this field, or ``None`` if it is not a p-th power."""
        raise FieldError(f"p-th roots are not defined in characteristic {self.characteristic}")

    def format(self, a) -> str:  # pragma: no cover - abstract
        raise NotImplementedError

    def parameter(self, name: str):
        raise FieldError(f"unknown parameter {name!r}")

    @property
    def parameters(self) -> tuple[str, ...]:
        return ()

    @property
    def tower(self) -> tuple["TowerField", ...]:
        return ()

    @property
    def is_finite(self) -> bool:
        return False

    @property
    def prime_field(self) -> "Field":
        return self

    def names(self) -> tuple[str, ...]:
        return self.parameters + tuple(t.name for t in self.tower)


class Rationals(Field):
    characteristic = 0

    def __call__(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
        if isinstance(x, Mod):
            raise FieldError("cannot coerce a GF(p) element into QQ")
        try:
            return Fraction(int(x.numerator), int(x.denominator))
        except AttributeError:
            raise FieldError(f"cannot coerce {x!r} into QQ") from None

    def format(self, a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


QQ = Rationals()


class PrimeField(Field):
    def __init__(self, p: int):
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        self.p = p
        self.characteristic = p

    def __call__(self, x):
        if isinstance(x, Mod):
            if x.p != self.p:
                raise FieldError(f"cannot coerce GF({x.p}) element into GF({self.p})")
            return x
        if isinstance(x, int):
            return Mod(x, self.p)
        if isinstance(x, Fraction):
            return Mod(0, self.p) + x
        if isinstance(x, str):
            return Mod(0, self.p) + Fraction(x)
        raise FieldError(f"cannot coerce {x!r} into GF({self.p})")

    def pth_root(self, a):
        return a

    def format(self, a) -> str:
        return str(a.v)

    @property
    def is_finite(self) -> bool:
        return True

    def elements(self) -> Iterator[Mod]:
        for v in range(self.p):
            yield Mod(v, self.p)

    @property
    def order(self) -> int:
        return self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __repr__(self):
        return f"GF({self.p})"


def GF(p: int) -> PrimeField:
    return PrimeField(p)


@functools.lru_cache(maxsize=None)
def _sympy_fraction_field(base_key, params: tuple[str, ...]):
    domain = _sympy_QQ if base_key == 0 else _sympy_GF(base_key)
    K, *gens = _sympy_field(",".join(params), domain)
    return K, tuple(gens)


class FractionField(Field):
    """Rational functions in the named parameters over ``QQ`` or ``GF(p)``.

    ``rooted_from`` is set on fields produced by :meth:`frobenius_extension`:
    every parameter of that field equals the p-th power of the parameter in
    the same position here.
    """

    def __init__(self, base: Field, params: Sequence[str], rooted_from: "FractionField | None" = None):
        if not isinstance(base, (Rationals, PrimeField)):
            raise FieldError("fraction fields are built over QQ or GF(p)")
        params = tuple(params)
        if not params:
            raise FieldError("a fraction field needs at least one parameter")
        if len(set(params)) != len(params):
            raise FieldError(f"repeated parameter names in {params}")
        self.base = base
        self.params = params
        self.rooted_from = rooted_from
        self.characteristic = base.characteristic
        self._K, self._gens = _sympy_fraction_field(base.characteristic, params)

    def __call__(self, x):
        if isinstance(x, int):
            return self._K(x)
        if isinstance(x, Fraction):
            if self.characteristic:
                return self._K(int(self.base(x)))
            return self._K(x.numerator) / self._K(x.denominator)
        if isinstance(x, Mod):
            if x.p != self.characteristic:
                raise FieldError("characteristic mismatch")
            return self._K(x.v)
        if isinstance(x, str):
            return self(Fraction(x))
        if getattr(x, "field", None) is self._K:
            return x
        src = getattr(x, "field", None)
        if src is not None and hasattr(x, "numer"):
            return self._from_foreign(x)
        raise FieldError(f"cannot coerce {x!r} into {self!r}")

    def _from_foreign(self, x):
        """Map an element of a fraction field over a subset of our parameters (or of ``rooted_from``)."""
        src_names = tuple(str(s) for s in x.field.symbols)
        power = 1
        if self.rooted_from is not None and src_names == self.rooted_from.params:
            targets = list(range(len(src_names)))
            power = self.characteristic
        else:
            try:
                targets = [self.params.index(n) for n in src_names]
            except ValueError:
                raise FieldError(f"parameters {src_names} are not all in {self.params}") from None

        def conv(poly):
            acc = self._K(0)
            for exps, c in poly.terms():
                term = self(self._coeff_from_domain(c))
                for idx, e in zip(targets, exps):
                    if e:
                        term = term * self._gens[idx] ** (e * power)
                acc = acc + term
            return acc

        return conv(x.numer) / conv(x.denom)

    def _coeff_from_domain(self, c):
        if self.characteristic:
            return Mod(int(c) % self.characteristic, self.characteristic)
        return Fraction(int(c.numerator), int(c.denominator))

    def parameter(self, name: str):
        try:
            return self._gens[self.params.index(name)]
        except ValueError:
            raise FieldError(f"unknown parameter {name!r}") from None

    @property
    def parameters(self) -> tuple[str, ...]:
        return self.params

    @property
    def prime_field(self) -> Field:
        return self.base

    def pth_root(self, a):
        p = self.characteristic
        if not p:
            raise FieldError("p-th roots need positive characteristic")

        def root(poly):
            acc = self._K(0)
            for exps, c in poly.terms():
                if any(e % p for e in exps):
                    return None
                term = self._K(int(c) % p)
                for g, e in zip(self._gens, exps):
                    term = term * g ** (e // p)
                acc = acc + term
            return acc

        num, den = root(a.numer), root(a.denom)
        if num is None or den is None:
            return None
        return num / den

    def frobenius_extension(self) -> "FractionField":
        """The field obtained by adjoining a p-th root of every parameter."""
        if not self.characteristic:
            raise FieldError("Frobenius extensions need positive characteristic")
        names = tuple(n + "'" for n in self.params)
        return FractionField(self.base, names, rooted_from=self)

    def format(self, a) -> str:
        num, den = a.numer, a.denom
        lc = _leading_domain_coeff(den)
        num_s = self._format_poly(num, lc)
        den_s = self._format_poly(den, lc)
        if den_s == "1":
            return num_s
        if _is_sum(num_s):
            num_s = f"({num_s})"
        if any(ch in den_s for ch in "+-*/"):
            den_s = f"({den_s})"
        return f"{num_s}/{den_s}"

    def _format_poly(self, poly, scale) -> str:
        terms = []
        for exps, c in poly.terms():
            coeff = self._coeff_from_domain(c) / self._coeff_from_domain(scale)
            terms.append((exps, coeff))
        terms.sort(key=lambda t: (sum(t[0]), t[0]), reverse=True)
        return format_terms(terms, self.params, self.base)

    def __eq__(self, other):
        return (
            isinstance(other, FractionField)
            and other.base == self.base
            and other.params == self.params
            and other.rooted_from == self.rooted_from
        )

    def __hash__(self):
        return hash(("Frac", self.base, self.params))

    def __repr__(self):
        return f"{self.base!r}({','.join(self.params)})"


def _leading_domain_coeff(poly):
    terms = sorted(poly.terms(), key=lambda t: (sum(t[0]), t[0]), reverse=True)
    return terms[0][1]


def format_monomial(exps: Sequence[int], names: Sequence[str]) -> str:
    parts = []
    for n, e in zip(names, exps):
        if e == 1:
            parts.append(n)
        elif e > 1:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


def format_terms(terms, names: Sequence[str], coeff_field: Field) -> str:
    """Render ``[(exps, coeff), ...]`` (already sorted) in infix notation."""
    if not terms:
        return "0"
    out = []
    for exps, c in terms:
        mono = format_monomial(exps, names)
        cs = coeff_field.format(c)
        negative = cs.startswith("-") and not _is_sum(cs[1:])
        if negative:
            cs = cs[1:]
        if _is_sum(cs) or (mono and "/" in cs and any(ch.isalpha() for ch in cs)):
            cs = f"({cs})"
        if mono:
            body = mono if cs == "1" else f"{cs}*{mono}"
        else:
            body = cs
        if not out:
            out.append(("-" if negative else "") + body)
        else:
            out.append((" - " if negative else " + ") + body)
    return "".join(out)


def _is_sum(s: str) -> bool:
    depth = 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > 0:
            return True
    return False


class TowerElement:
    """Element of ``base[z]/(q)`` stored as a reduced coefficient tuple (low degree first)."""

    __slots__ = ("field", "c")

    def __init__(self, field: "TowerField", coeffs):
        self.field = field
        self.c = tuple(coeffs)

    def _coerce(self, other):
        if isinstance(other, TowerElement) and other.field is self.field:
            return other
        try:
            return self.field(other)
        except FieldError:
            return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        from . import upoly

        return TowerElement(self.field, upoly.add(self.c, o.c))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        from . import upoly

        return TowerElement(self.field, upoly.sub(self.c, o.c))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return TowerElement(self.field, tuple(-a for a in self.c))

    def __pos__(self):
        return self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        from . import upoly

        prod = upoly.mul(self.c, o.c)
        return TowerElement(self.field, upoly.rem(prod, self.field.modulus))

    __rmul__ = __mul__

    def inverse(self) -> "TowerElement":
        from . import upoly

        if not self.c:
            raise ZeroDivisionError("division by zero in tower ring")
        g, s, _ = upoly.xgcd(list(self.c), list(self.field.modulus))
        if len(g) > 1:
            raise ZeroDivisorSplit(self.field, g, upoly.exquo(list(self.field.modulus), g))
        return TowerElement(self.field, upoly.rem(s, self.field.modulus))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.c == o.c

    def __hash__(self):
        return hash(self.c)

    def __bool__(self):
        return bool(self.c)

    def __repr__(self):
        return f"TowerElement({self.field.format(self)})"


class TowerField(Field):
    """``base[name]/(modulus)`` with ``modulus`` monic and squarefree of degree >= 2."""

    def __init__(self, base: Field, name: str, modulus: Sequence):
        from . import upoly

        modulus = [base(c) for c in modulus]
        modulus = upoly.trim(modulus)
        if len(modulus) < 3:
            raise FieldError("tower modulus must have degree >= 2")
        if modulus[-1] != base.one:
            raise FieldError("tower modulus must be monic")
        if name in base.names():
            raise FieldError(f"name {name!r} already used in {base!r}")
        self.base = base
        self.name = name
        self.modulus = tuple(modulus)
        self.characteristic = base.characteristic
        self._gen = TowerElement(self, upoly.rem([base.zero, base.one], self.modulus))

    @property
    def degree(self) -> int:
        return len(self.modulus) - 1

    def __call__(self, x):
        if isinstance(x, TowerElement):
            if x.field is self:
                return x
            # element of a lower level
            return TowerElement(self, (self.base(x),)) if x else TowerElement(self, ())
        if isinstance(x, str) and x == self.name:
            return self._gen
        b = self.base(x)
        return TowerElement(self, (b,) if b != 0 else ())

    @property
    def gen(self) -> TowerElement:
        return self._gen

    def parameter(self, name: str):
        if name == self.name:
            return self._gen
        return self(self.base.parameter(name))

    @property
    def parameters(self) -> tuple[str, ...]:
        return self.base.parameters

    @property
    def tower(self) -> tuple["TowerField", ...]:
        return self.base.tower + (self,)

    @property
    def prime_field(self) -> Field:
        return self.base.prime_field

    def decide_zero(self, a) -> bool:
        if not a.c:
            return True
        a.inverse()
        return False

    @property
    def is_finite(self) -> bool:
        return self.base.is_finite

    @property
    def order(self) -> int:
        return self.base.order ** self.degree

    def elements(self) -> Iterator[TowerElement]:
        import itertools

        from . import upoly

        base_elems = list(self.base.elements())
        for combo in itertools.product(base_elems, repeat=self.degree):
            yield TowerElement(self, upoly.trim(list(combo)))

    def pth_root(self, a):
        if not self.characteristic:
            raise FieldError("p-th roots need positive characteristic")
        if not self.is_finite:
            raise FieldError("p-th roots in algebraic extensions of imperfect fields are not supported")
        # The Frobenius has order dividing lcm(1..n) on each factor field of size p^k, k <= n.
        n = 1
        for level in self.tower:
            n *= level.degree
        period = functools.reduce(math.lcm, range(1, n + 1), 1)
        r = a
        for _ in range(period - 1):
            r = r ** self.characteristic
        return r

    def format(self, a) -> str:
        terms = [((i,), c) for i, c in enumerate(a.c) if c != 0]
        terms.reverse()
        return format_terms(terms, (self.name,), self.base)

    def __repr__(self):
        return f"{self.base!r}[{self.name}]/({format_terms([((i,), c) for i, c in reversed(list(enumerate(self.modulus))) if c != 0], (self.name,), self.base)})"


def over_roots(fn: Callable[[Field, Any], Any], field: Field, poly: Sequence, name: str) -> list[tuple[int, Field, Any]]:
    """Evaluate ``fn(K, root)`` at a generic root of the squarefree ``poly``.

    Returns ``[(weight, K, result), ...]`` where ``weight`` is the number of
    distinct roots the branch stands for.  A degree-one factor is solved in
    ``field`` directly; otherwise the root is adjoined as a tower level named
    ``name``.  Zero divisors met inside ``fn`` split the modulus and the branch
    is recomputed on each factor (factor first, cofactor second).
    """
    from . import upoly

    pending = [upoly.monic(list(poly))]
    out = []
    while pending:
        q = pending.pop(0)
        if len(q) < 2:
            continue
        if len(q) == 2:
            out.append((1, field, fn(field, -q[0])))
            continue
        K = TowerField(field, name, q)
        try:
            res = fn(K, K.gen)
        except ZeroDivisorSplit as split:
            if split.tower is not K:
                raise
            pending[0:0] = [list(split.factor), list(split.cofactor)]
            continue
        out.append((K.degree, K, res))
    return out


def parse_field(spec: str) -> Field:
    """Parse ``QQ``, ``GF(p)``, ``QQ(a,b)`` or ``GF(p)(u)``."""
    s = spec.replace(" ", "")
    if s.startswith("QQ"):
        base: Field = QQ
        rest = s[2:]
    elif s.startswith("GF("):
        close = s.index(")")
        base = PrimeField(int(s[3:close]))
        rest = s[close + 1 :]
    else:
        raise FieldError(f"unrecognised field {spec!r}")
    if not rest:
        return base
    if not (rest.startswith("(") and rest.endswith(")")):
        raise FieldError(f"unrecognised field {spec!r}")
    params = [p for p in rest[1:-1].split(",") if p]
    return FractionField(base, params)


def field_with_parameters(field: Field, names: Sequence[str]) -> Field:
    """``field`` extended by extra transcendental parameters."""
    if field.tower:
        raise FieldError("cannot add parameters below an algebraic tower")
    if isinstance(field, FractionField):
        if field.rooted_from is not None:
            raise FieldError("cannot add parameters to a Frobenius-rooted field")
        return FractionField(field.base, field.params + tuple(names))
    return FractionField(field, names)


def fresh_name(stem: str, taken) -> str:
    taken = set(taken)
    if stem not in taken:
        return stem
    i = 1
    while f"{stem}{i}" in taken:
        i += 1
    return f"{stem}{i}"
