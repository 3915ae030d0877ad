"""Order values and truncated power series.

A :class:`TruncatedSeries` stores coefficients ``c_0..c_N`` of a power series
in ``t``.  When ``exact`` is false the series is only known modulo
``t^(N+1)``; when it is true the stored polynomial *is* the series.

Precision rules:

* inexact operands limit the result to the smallest inexact precision;
* exact operands never limit precision, and a result of exact operands is
  exact (its storage grows to hold the full polynomial).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .fields import Field


@dataclass(frozen=True)
class OrderValue:
    """``Finite(n)``, ``AtLeast(n)`` (censored by precision) or ``Infinite``."""

    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind not in ("finite", "at_least", "infinite"):
            raise ValueError(f"bad order kind {self.kind!r}")
        if self.kind != "infinite" and self.n < 0:
            raise ValueError("orders are natural numbers")

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def is_censored(self) -> bool:
        return self.kind == "at_least"

    @property
    def is_infinite(self) -> bool:
        return self.kind == "infinite"

    @property
    def lower(self) -> int | float:
        """Largest integer the value is known to be at least."""
        return float("inf") if self.is_infinite else self.n

    def compare(self, other: "OrderValue") -> int | None:
        """-1, 0, 1, or ``None`` when the answer depends on unknown digits."""
        a, b = self, other
        if a.is_finite and b.is_finite:
            return (a.n > b.n) - (a.n < b.n)
        if a.is_infinite and b.is_infinite:
            return 0
        if a.is_finite:
            if b.is_infinite or a.n < b.n:
                return -1
            return None
        if b.is_finite:
            if a.is_infinite or b.n < a.n:
                return 1
            return None
        return None

    def __add__(self, other: "OrderValue") -> "OrderValue":
        if self.is_infinite or other.is_infinite:
            return INFINITE
        if self.is_finite and other.is_finite:
            return Finite(self.n + other.n)
        return AtLeast(self.n + other.n)

    def __mul__(self, q: int) -> "OrderValue":
        if not isinstance(q, int) or q < 0:
            return NotImplemented
        if self.is_infinite:
            return INFINITE if q else Finite(0)
        return OrderValue(self.kind, self.n * q)

    __rmul__ = __mul__

    def minus(self, other: "OrderValue") -> "OrderValue | None":
        """``self - other`` when that is determined, else ``None``."""
        if not other.is_finite:
            return None
        if self.is_infinite:
            return INFINITE
        return OrderValue(self.kind, self.n - other.n) if self.n >= other.n else None

    def to_json(self):
        if self.is_infinite:
            return "infinite"
        return {self.kind: self.n}

    @staticmethod
    def from_json(obj) -> "OrderValue":
        if obj == "infinite":
            return INFINITE
        ((k, v),) = obj.items()
        return OrderValue(k, int(v))

    def __str__(self):
        if self.is_infinite:
            return "Infinite"
        return f"Finite({self.n})" if self.is_finite else f"AtLeast({self.n})"

    __repr__ = __str__


def Finite(n: int) -> OrderValue:
    return OrderValue("finite", n)


def AtLeast(n: int) -> OrderValue:
    return OrderValue("at_least", n)


INFINITE = OrderValue("infinite")


def order_min(values: Iterable[OrderValue]) -> OrderValue:
    """Minimum in the order-value sense; a censored value only loses to a smaller finite one."""
    best = INFINITE
    for v in values:
        if v.is_infinite:
            continue
        if best.is_infinite:
            best = v
        elif best.is_finite and v.is_finite:
            best = v if v.n < best.n else best
        elif best.is_finite:
            best = best if best.n < v.n else AtLeast(v.n)
        elif v.is_finite:
            best = v if v.n < best.n else best
        else:
            best = AtLeast(min(best.n, v.n))
    return best


def order_sum(values: Iterable[OrderValue]) -> OrderValue:
    total = Finite(0)
    for v in values:
        total = total + v
    return total


def _merge_precision(a: "TruncatedSeries", b: "TruncatedSeries") -> tuple[int | None, bool]:
    """``(precision, exact)`` for a binary operation; ``None`` means unlimited."""
    precs = [s.precision for s in (a, b) if not s.exact]
    if not precs:
        return None, True
    return min(precs), False


class TruncatedSeries:
    __slots__ = ("field", "coeffs", "exact")

    def __init__(self, field: Field, coeffs: Sequence, precision: int | None = None, exact: bool = False):
        coeffs = [field(c) for c in coeffs]
        if precision is None:
            precision = max(len(coeffs) - 1, 0)
        if precision < 0:
            raise ValueError("precision must be natural")
        if len(coeffs) > precision + 1:
            extra = coeffs[precision + 1 :]
            if exact and any(c != 0 for c in extra):
                raise ValueError("exact series has terms beyond its precision")
            coeffs = coeffs[: precision + 1]
        coeffs += [field.zero] * (precision + 1 - len(coeffs))
        self.field = field
        self.coeffs = tuple(coeffs)
        self.exact = exact

    @classmethod
    def _raw(cls, field, coeffs, exact):
        s = cls.__new__(cls)
        s.field = field
        s.coeffs = tuple(coeffs)
        s.exact = exact
        return s

    @classmethod
    def constant(cls, field: Field, c, precision: int = 0, exact: bool = True) -> "TruncatedSeries":
        return cls(field, [c], precision, exact)

    @classmethod
    def monomial(cls, field: Field, k: int, c=1, precision: int | None = None, exact: bool = True) -> "TruncatedSeries":
        if precision is None:
            precision = k
        return cls(field, [0] * k + [c], precision, exact)

    @property
    def precision(self) -> int:
        return len(self.coeffs) - 1

    def __repr__(self):
        return f"TruncatedSeries({self.format()}; precision = {self.precision}; exact = {str(self.exact).lower()})"

    def format(self) -> str:
        return "[" + ", ".join(self.field.format(c) for c in self.coeffs) + "]"

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.field.zero

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.exact == other.exact and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.exact))

    def _scalar(self, c):
        return TruncatedSeries._raw(self.field, [a * c for a in self.coeffs], self.exact)

    def _lift(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries.constant(self.field, other)

    def __add__(self, other):
        o = self._lift(other)
        prec, exact = _merge_precision(self, o)
        n = max(len(self.coeffs), len(o.coeffs)) if prec is None else prec + 1
        out = [self[i] + o[i] for i in range(n)]
        return _finish(self.field, out, exact)

    __radd__ = __add__

    def __neg__(self):
        return self._scalar(-self.field.one)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self._scalar(self.field(other))
        o = other
        prec, exact = _merge_precision(self, o)
        la, lb = len(self.coeffs), len(o.coeffs)
        n = la + lb - 1 if prec is None else prec + 1
        zero = self.field.zero
        out = [zero] * n
        for i, a in enumerate(self.coeffs):
            if i >= n:
                break
            if a == 0:
                continue
            for j in range(min(lb, n - i)):
                b = o.coeffs[j]
                if b != 0:
                    out[i + j] = out[i + j] + a * b
        return _finish(self.field, out, exact)

    def __rmul__(self, other):
        return self._scalar(self.field(other))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a series")
        result = TruncatedSeries.constant(self.field, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def truncate(self, n: int) -> "TruncatedSeries":
        """Forget everything from ``t^(n+1)`` on (inexact result)."""
        n = min(n, self.precision) if not self.exact else n
        out = [self[i] for i in range(n + 1)]
        return TruncatedSeries._raw(self.field, out, False)

    def shift(self, s: int) -> "TruncatedSeries":
        """Multiply by ``t^s``."""
        out = [self.field.zero] * s + list(self.coeffs)
        return _finish(self.field, out, self.exact)

    def divide_t(self, v: int) -> "TruncatedSeries":
        """Divide by ``t^v``; the first ``v`` coefficients must vanish."""
        if v > len(self.coeffs) and not self.exact:
            raise ValueError("cannot divide past the precision")
        if any(self[i] != 0 for i in range(v)):
            raise ValueError(f"series is not divisible by t^{v}")
        out = list(self.coeffs[v:])
        if not out:
            out = [self.field.zero]
            if not self.exact:
                raise ValueError("no coefficients left after division")
        return _finish(self.field, out, self.exact)

    def order(self) -> OrderValue:
        return series_order(self)

    def inverse(self, precision: int | None = None) -> "TruncatedSeries":
        """Inverse of a series with invertible constant term."""
        if precision is None:
            precision = self.precision
        if not self.exact:
            precision = min(precision, self.precision)
        c0 = self[0]
        if self.field.decide_zero(c0):
            raise ZeroDivisionError("series is not a unit")
        inv0 = self.field.one / c0
        out = [inv0]
        for k in range(1, precision + 1):
            acc = self.field.zero
            for j in range(1, k + 1):
                a = self[j]
                if a != 0:
                    acc = acc + a * out[k - j]
            out.append(-acc * inv0)
        return TruncatedSeries._raw(self.field, out, False)

    def derivative(self) -> "TruncatedSeries":
        out = [self.coeffs[i] * i for i in range(1, len(self.coeffs))] or [self.field.zero]
        return _finish(self.field, out, self.exact)

    def convert(self, field: Field) -> "TruncatedSeries":
        return TruncatedSeries._raw(field, [field(c) for c in self.coeffs], self.exact)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)


def _finish(field: Field, out: list, exact: bool) -> TruncatedSeries:
    if exact:
        while len(out) > 1 and out[-1] == 0:
            out.pop()
    return TruncatedSeries._raw(field, out, exact)


def series_order(s: TruncatedSeries) -> OrderValue:
    for i, c in enumerate(s.coeffs):
        if not s.field.decide_zero(c):
            return Finite(i)
    return INFINITE if s.exact else AtLeast(s.precision + 1)


def series(field: Field, coeffs: Sequence, precision: int | None = None, exact: bool = True) -> TruncatedSeries:
    return TruncatedSeries(field, coeffs, precision, exact)
