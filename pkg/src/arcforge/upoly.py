"""Dense univariate polynomials over a coefficient field.

A polynomial is a list of field elements, lowest degree first, with no
trailing zeros; ``[]`` is the zero polynomial.
"""

from __future__ import annotations

import itertools
from math import comb
from typing import Sequence

from .fields import Field, FieldError, FractionField, PrimeField, TowerField


def trim(a) -> list:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def degree(a) -> int:
    return len(a) - 1 if a else -1


def add(a, b) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = out[i] + c
    return trim(out)


def sub(a, b) -> list:
    out = list(a) + [None] * max(0, len(b) - len(a))
    for i in range(len(out)):
        x = a[i] if i < len(a) else None
        y = b[i] if i < len(b) else None
        if y is None:
            out[i] = x
        elif x is None:
            out[i] = -y
        else:
            out[i] = x - y
    return trim(out)


def scale(a, c) -> list:
    return trim([x * c for x in a])


def mul(a, b) -> list:
    if not a or not b:
        return []
    out = [None] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            t = x * y
            out[i + j] = t if out[i + j] is None else out[i + j] + t
    zero = a[0] * 0
    return trim([zero if c is None else c for c in out])


def divmod_(a, b) -> tuple[list, list]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    inv = 1 / b[-1]
    db = len(b) - 1
    if len(a) <= db:
        return [], trim(a)
    q = [a[0] * 0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c == 0:
            continue
        c = c * inv
        q[k - db] = c
        for j in range(db + 1):
            a[k - db + j] = a[k - db + j] - c * b[j]
    return trim(q), trim(a[:db])


def rem(a, b) -> list:
    return divmod_(a, b)[1]


def exquo(a, b) -> list:
    q, r = divmod_(a, b)
    if r:
        raise ArithmeticError("inexact polynomial division")
    return q


def monic(a) -> list:
    if not a:
        return []
    inv = 1 / a[-1]
    return [c * inv for c in a[:-1]] + [a[-1] * inv]


def xgcd(a, b) -> tuple[list, list, list]:
    """Monic ``g`` with ``s*a + t*b == g``.  Leading coefficients get inverted,
    so over a tower ring this may raise :class:`ZeroDivisorSplit`."""
    a, b = trim(a), trim(b)
    sample = (a or b or [None])[0]
    if sample is None:
        return [], [], []
    one = sample * 0 + 1
    r0, r1 = a, b
    s0, s1 = [one], []
    t0, t1 = [], [one]
    while r1:
        q, r = divmod_(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1))
        t0, t1 = t1, sub(t0, mul(q, t1))
    if not r0:
        return [], [], []
    inv = 1 / r0[-1]
    return monic(r0), scale(s0, inv), scale(t0, inv)


def gcd(a, b) -> list:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, rem(a, b)
    return monic(a)


def derivative(a) -> list:
    return trim([a[i] * i for i in range(1, len(a))])


def hasse_derivative(a, k: int) -> list:
    """``D^(k) a = sum C(i, k) a_i x^(i-k)``."""
    return trim([a[i] * comb(i, k) for i in range(k, len(a))])


def evaluate(a, x):
    acc = None
    for c in reversed(a):
        acc = c if acc is None else acc * x + c
    if acc is None:
        return x * 0
    return acc


def taylor_shift(a, c) -> list:
    """Coefficients of ``a(c + y)`` in ``y``."""
    out = list(a)
    n = len(out)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] = out[j] + c * out[j + 1]
    return trim(out)


def powmod(a, e: int, m) -> list:
    result = [m[-1] * 0 + 1]
    base = rem(a, m)
    while e:
        if e & 1:
            result = rem(mul(result, base), m)
        base = rem(mul(base, base), m)
        e >>= 1
    return result


def convert(a, field: Field) -> list:
    return trim([field(c) for c in a])


def _pth_root_poly(a, field: Field) -> list | None:
    """``b`` with ``b(x)^p == a(x)`` given ``a' == 0``, or ``None`` if some
    coefficient is not a p-th power in ``field``."""
    p = field.characteristic
    out = []
    for i in range(0, len(a), p):
        r = field.pth_root(a[i])
        if r is None:
            return None
        out.append(r)
    return trim(out)


def radical(a, field: Field) -> tuple[list, Field]:
    """Monic squarefree part of ``a`` over the perfect closure of ``field``.

    In characteristic zero this is ``a / gcd(a, a')``.  In characteristic p,
    inseparable factors are replaced by their p-th roots; when a coefficient
    has no p-th root the computation moves to a Frobenius extension of the
    parameter field, which is returned alongside the result.  The number of
    distinct roots in an algebraic closure equals the degree of the result.
    """
    a = trim(a)
    if degree(a) <= 0:
        return ([a[-1] * 0 + 1] if a else []), field
    p = field.characteristic
    if p == 0:
        return monic(exquo(a, gcd(a, derivative(a)))), field
    da = derivative(a)
    if not da:
        root = _pth_root_poly(a, field)
        if root is None:
            if isinstance(field, FractionField):
                field = field.frobenius_extension()
                root = _pth_root_poly(convert(a, field), field)
            else:
                raise FieldError(f"cannot take p-th roots of coefficients over {field!r}")
        return radical(root, field)
    g = gcd(a, da)
    w = exquo(a, g)
    y = g
    z = gcd(y, w)
    while degree(z) > 0:
        y = exquo(y, z)
        z = gcd(y, z)
    if degree(y) <= 0:
        return monic(w), field
    ry, field2 = radical(y, field)
    if field2 is not field:
        w = convert(w, field2)
    return monic(mul(w, ry)), field2


def distinct_root_count(a, field: Field) -> int:
    return degree(radical(a, field)[0])


def is_irreducible_mod_p(a, field: PrimeField) -> bool:
    """Rabin's test over a prime field."""
    a = monic(trim(a))
    n = degree(a)
    if n <= 0:
        return False
    if n == 1:
        return True
    p = field.p
    x = [field.zero, field.one]
    for q in _prime_divisors(n):
        h = sub(powmod(x, p ** (n // q), a), x)
        if degree(gcd(a, h)) > 0:
            return False
    return not sub(powmod(x, p**n, a), x)


def _prime_divisors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def first_irreducible(field: PrimeField, n: int) -> list:
    """Lexicographically first monic irreducible polynomial of degree ``n``."""
    for tail in itertools.product(range(field.p), repeat=n):
        cand = [field(c) for c in reversed(tail)] + [field.one]
        if is_irreducible_mod_p(cand, field):
            return cand
    raise FieldError(f"no irreducible polynomial of degree {n} over {field!r}")


def finite_field(p: int, k: int, name: str = "w") -> Field:
    """``GF(p^k)`` as ``GF(p)`` or a single tower level over it."""
    base = PrimeField(p)
    if k == 1:
        return base
    return TowerField(base, name, first_irreducible(base, k))


def from_coeffs(field: Field, coeffs: Sequence) -> list:
    return trim([field(c) for c in coeffs])
