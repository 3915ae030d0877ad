"""Sparse multivariate polynomials over a coefficient field.

A :class:`Poly` stores ``{exponent tuple: nonzero coefficient}`` together with
its :class:`PolyRing` (field plus ordered variable names).  Polynomials are
immutable; arithmetic returns new objects.
"""

from __future__ import annotations

import ast
from typing import Any, Callable, Iterable, Mapping, Sequence

from .fields import Field, FieldError, format_terms


class RingMismatch(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, text: str = "", col: int | None = None):
        if col is not None:
            message = f"{message} (column {col + 1} of {text!r})"
        super().__init__(message)
        self.col = col


class PolyRing:
    def __init__(self, field: Field, names: Sequence[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"repeated variable names in {names}")
        clash = set(names) & set(field.names())
        if clash:
            raise ValueError(f"variable names {sorted(clash)} collide with field names")
        self.field = field
        self.names = names
        self.nvars = len(names)
        self._index = {n: i for i, n in enumerate(names)}
        self._zero_exp = (0,) * self.nvars

    def __eq__(self, other):
        return isinstance(other, PolyRing) and other.names == self.names and other.field == self.field

    def __hash__(self):
        return hash((self.names, repr(self.field)))

    def __repr__(self):
        return f"{self.field!r}[{','.join(self.names)}]"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"{name!r} is not a variable of {self!r}") from None

    def gen(self, name: str) -> "Poly":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Poly(self, {tuple(e): self.field.one})

    @property
    def gens(self) -> tuple["Poly", ...]:
        return tuple(self.gen(n) for n in self.names)

    @property
    def zero(self) -> "Poly":
        return Poly(self, {})

    @property
    def one(self) -> "Poly":
        return self.constant(1)

    def constant(self, c) -> "Poly":
        c = self.field(c)
        if c == 0:
            return Poly(self, {})
        return Poly(self, {self._zero_exp: c})

    def monomial(self, exps: Sequence[int], c=1) -> "Poly":
        c = self.field(c)
        if c == 0:
            return Poly(self, {})
        return Poly(self, {tuple(exps): c})

    def __call__(self, x) -> "Poly":
        if isinstance(x, Poly):
            if x.ring == self:
                return x
            return x.embed(self)
        if isinstance(x, str):
            return self.parse(x)
        return self.constant(x)

    def from_dict(self, terms: Mapping) -> "Poly":
        f = self.field
        return Poly(self, {tuple(e): f(c) for e, c in terms.items() if f(c) != 0})

    def extend(self, names: Sequence[str]) -> "PolyRing":
        return PolyRing(self.field, self.names + tuple(names))

    def with_field(self, field: Field) -> "PolyRing":
        return PolyRing(field, self.names)

    def parse(self, text: str) -> "Poly":
        return parse_poly(self, text)

    def format(self, p: "Poly") -> str:
        return p.format()


class Poly:
    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # coercion
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise RingMismatch(f"{other.ring!r} vs {self.ring!r}")
            return other
        try:
            return self.ring.constant(other)
        except FieldError:
            raise RingMismatch(f"cannot use {other!r} in {self.ring!r}") from None

    def __add__(self, other):
        o = self._coerce(other)
        out = dict(self.terms)
        for e, c in o.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v == 0:
                    del out[e]
                else:
                    out[e] = v
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            try:
                c = self.ring.field(other)
            except FieldError:
                raise RingMismatch(f"cannot use {other!r} in {self.ring!r}") from None
            if c == 0:
                return Poly(self.ring, {})
            return Poly(self.ring, {e: v * c for e, v in self.terms.items()})
        o = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e)
                out[e] = c1 * c2 if v is None else v + c1 * c2
        return Poly(self.ring, {e: c for e, c in out.items() if c != 0})

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        if isinstance(other, Poly):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("only division by nonzero constants is supported")
            other = other.constant_coeff()
        c = self.ring.field(other)
        if c == 0:
            raise ZeroDivisionError("division by zero")
        return self * (self.ring.field.one / c)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a natural number")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        try:
            return self.terms == self._coerce(other).terms
        except RingMismatch:
            return False

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"Poly({self.format()!r})"

    def __str__(self):
        return self.format()

    # inspection
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_coeff(self):
        return self.terms.get(self.ring._zero_exp, self.ring.field.zero)

    def coeff(self, exps: Sequence[int]):
        return self.terms.get(tuple(exps), self.ring.field.zero)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree(self, name: str) -> int:
        if not self.terms:
            return -1
        i = self.ring.index(name)
        return max(e[i] for e in self.terms)

    def variables(self) -> tuple[str, ...]:
        used = set()
        for e in self.terms:
            used.update(i for i, a in enumerate(e) if a)
        return tuple(self.ring.names[i] for i in sorted(used))

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Any]]:
        """Terms in graded-lex descending order on the declared variable sequence."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def format(self) -> str:
        return format_terms(self.sorted_terms(), self.ring.names, self.ring.field)

    # calculus and substitution
    def diff(self, name: str) -> "Poly":
        i = self.ring.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                v = c * e[i]
                if v != 0:
                    ne = list(e)
                    ne[i] -= 1
                    out[tuple(ne)] = v
        return Poly(self.ring, out)

    def coefficients_in(self, name: str) -> dict[int, "Poly"]:
        """``{k: c_k}`` with ``self = sum c_k * name^k`` and ``c_k`` free of ``name``."""
        i = self.ring.index(name)
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            ne = list(e)
            k = ne[i]
            ne[i] = 0
            out.setdefault(k, {})[tuple(ne)] = c
        return {k: Poly(self.ring, t) for k, t in sorted(out.items())}

    def evaluate(self, values: Sequence, one) -> Any:
        """Substitute ``values[i]`` for the i-th variable.

        ``one`` is the unit of the target algebra; values must support ``+``,
        ``*``, ``**`` and right multiplication by coefficients.
        """
        if len(values) != self.ring.nvars:
            raise ValueError("wrong number of values")
        powers: dict[tuple[int, int], Any] = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                powers[key] = values[i] if k == 1 else power(i, k - 1) * values[i]
            return powers[key]

        acc = one * 0
        for e, c in self.sorted_terms():
            term = one * c
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            acc = acc + term
        return acc

    def subs(self, mapping: Mapping[str, Any]) -> "Poly":
        """Substitute polynomials (of this ring) for some variables."""
        values = [mapping.get(n, g) for n, g in zip(self.ring.names, self.ring.gens)]
        return self.evaluate([self._coerce(v) for v in values], self.ring.one)

    def compose(self, target: PolyRing, images: Sequence["Poly"]) -> "Poly":
        """Image under the ring map sending the i-th variable to ``images[i]``."""
        return self.evaluate(list(images), target.one)

    def embed(self, ring: PolyRing) -> "Poly":
        """Reinterpret in a ring whose variables include ours (by name)."""
        idx = [ring.index(n) for n in self.ring.names]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * ring.nvars
            for i, k in zip(idx, e):
                ne[i] = k
            c = ring.field(c)
            if c != 0:
                out[tuple(ne)] = c
        return Poly(ring, out)

    def map_coeffs(self, fn: Callable[[Any], Any], ring: PolyRing | None = None) -> "Poly":
        ring = ring or self.ring
        out = {}
        for e, c in self.terms.items():
            v = fn(c)
            if v != 0:
                out[e] = v
        return Poly(ring, out)

    def to_univariate(self, name: str | None = None) -> list:
        """Dense coefficient list in the single variable ``name``."""
        if name is None:
            vs = self.variables()
            if len(vs) > 1:
                raise ValueError(f"{self} is not univariate")
            name = vs[0] if vs else self.ring.names[0]
        i = self.ring.index(name)
        dense = [self.ring.field.zero] * (self.degree(name) + 1 if self.terms else 0)
        for e, c in self.terms.items():
            if any(k for j, k in enumerate(e) if j != i):
                raise ValueError(f"{self} involves variables other than {name}")
            dense[e[i]] = c
        return dense


def from_univariate(ring: PolyRing, name: str, coeffs: Sequence) -> Poly:
    i = ring.index(name)
    out = {}
    for k, c in enumerate(coeffs):
        c = ring.field(c)
        if c != 0:
            e = [0] * ring.nvars
            e[i] = k
            out[tuple(e)] = c
    return Poly(ring, out)


def poly_arith(a: Poly, b: Poly | None, op: str, n: int | None = None) -> Poly:
    """``add``/``mul``/``power`` with the ring check made explicit."""
    if op == "power":
        return a ** (n if n is not None else 0)
    if b is None or a.ring != b.ring:
        raise RingMismatch("operands must share a ring")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


# Parsing ------------------------------------------------------------------

def parse_poly(ring: PolyRing, text: str) -> Poly:
    src = text.replace("^", "**").strip()
    if not src:
        raise ParseError("empty polynomial", text, 0)
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"syntax error: {exc.msg}", text, (exc.offset or 1) - 1) from None
    return _Evaluator(ring, text).visit(tree.body)


class _Evaluator:
    def __init__(self, ring: PolyRing, text: str):
        self.ring = ring
        self.text = text

    def fail(self, node, message):
        raise ParseError(message, self.text, getattr(node, "col_offset", None))

    def visit(self, node) -> Poly:
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                base = self.visit(node.left)
                exp = self.integer(node.right)
                if exp < 0:
                    self.fail(node.right, "negative exponent")
                return base**exp
            left = self.visit(node.left)
            right = self.visit(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if not right.is_constant() or right.is_zero():
                    self.fail(node.right, "division only by nonzero constants")
                return left / right
            self.fail(node, "unsupported operator")
        if isinstance(node, ast.UnaryOp):
            v = self.visit(node.operand)
            if isinstance(node.op, ast.USub):
                return -v
            if isinstance(node.op, ast.UAdd):
                return v
            self.fail(node, "unsupported unary operator")
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                self.fail(node, f"unsupported literal {node.value!r}")
            return self.ring.constant(node.value)
        if isinstance(node, ast.Name):
            name = node.id
            if name in self.ring._index:
                return self.ring.gen(name)
            try:
                return self.ring.constant(self.ring.field.parameter(name))
            except FieldError:
                self.fail(node, f"unknown name {name!r}")
        self.fail(node, "unsupported expression")

    def integer(self, node) -> int:
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return node.value
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -self.integer(node.operand)
        self.fail(node, "exponent must be an integer literal")


def parse_many(ring: PolyRing, texts: Iterable[str]) -> list[Poly]:
    return [parse_poly(ring, t) for t in texts]
