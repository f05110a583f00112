"""Exact rational functions in one indeterminate ``q`` with integer coefficients.

Polynomials are tuples of ints in ascending degree.  A :class:`QValue` is
kept in lowest terms: ``gcd(num, den) = 1`` as polynomials, the integer
contents of ``num`` and ``den`` are coprime, and ``den`` has a positive
leading coefficient.  That normal form is unique, so ``==`` and ``hash``
are structural.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Union

Poly = tuple

_ZERO: Poly = ()
_ONE: Poly = (1,)


def _trim(c) -> Poly:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _trim(out)


def pneg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def psub(a: Poly, b: Poly) -> Poly:
    return padd(a, pneg(b))


def pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return _ZERO
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def pscale(a: Poly, k: int) -> Poly:
    return _trim(x * k for x in a)


def content(a: Poly) -> int:
    return reduce(gcd, a, 0)


def primitive(a: Poly) -> Poly:
    if not a:
        return a
    c = content(a)
    if a[-1] < 0:
        c = -c
    return tuple(x // c for x in a)


def pdivmod_exact(a: Poly, b: Poly):
    """Division over Q; returns (quotient, remainder) with Fraction coefficients."""
    rem = [Fraction(x) for x in a]
    db = len(b) - 1
    lead = Fraction(b[-1])
    quot = [Fraction(0)] * max(len(a) - db, 0)
    for i in range(len(rem) - 1, db - 1, -1):
        c = rem[i]
        if c == 0:
            continue
        f = c / lead
        quot[i - db] = f
        for j, y in enumerate(b):
            rem[i - db + j] -= f * y
    return quot, rem[:db]


def pdiv(a: Poly, b: Poly) -> Poly:
    """Exact integer division ``a / b``; raises if it does not divide."""
    quot, rem = pdivmod_exact(a, b)
    if any(rem) or any(x.denominator != 1 for x in quot):
        raise ArithmeticError("polynomial does not divide exactly")
    return _trim(int(x) for x in quot)


def _divides(a: Poly, b: Poly) -> bool:
    quot, rem = pdivmod_exact(a, b)
    return not any(rem) and all(x.denominator == 1 for x in quot)


def _prem(a: Poly, b: Poly) -> Poly:
    """Pseudo-remainder of ``a`` by ``b``."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [x * lb for x in r]
        for j, y in enumerate(b):
            r[shift + j] -= lr * y
        r = list(_trim(r))
    return tuple(r)


def pgcd(a: Poly, b: Poly) -> Poly:
    """Primitive gcd with positive leading coefficient."""
    a, b = primitive(a), primitive(b)
    if not a:
        return b if b else _ONE
    if not b:
        return a
    if len(a) < len(b):
        a, b = b, a
    while b:
        if len(b) == 1:
            return _ONE
        r = _prem(a, b)
        a, b = b, primitive(r)
    return primitive(a)


def peval(a: Poly, x) -> Union[int, Fraction]:
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _strip_q(a: Poly) -> tuple[int, Poly]:
    k = 0
    while k < len(a) and a[k] == 0:
        k += 1
    return k, a[k:]


class QValue:
    """A canonical rational function ``num(q) / den(q)``."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Iterable[int] = _ZERO, den: Iterable[int] = _ONE, *, _canonical=False):
        num, den = _trim(num), _trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not _canonical:
            num, den = self._normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @staticmethod
    def _normalize(num: Poly, den: Poly):
        if not num:
            return _ZERO, _ONE
        # powers of q cancel without a general gcd
        kn, num = _strip_q(num)
        kd, den = _strip_q(den)
        k = min(kn, kd)
        num = (0,) * (kn - k) + num
        den = (0,) * (kd - k) + den
        if len(den) > 1 and len(num) > 1:
            g = pgcd(num, den)
            if len(g) > 1:
                num, den = pdiv(num, g), pdiv(den, g)
        c = gcd(content(num), content(den))
        if den[-1] < 0:
            c = -c
        if c != 1:
            num = tuple(x // c for x in num)
            den = tuple(x // c for x in den)
        return num, den

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "QValue":
        c = Fraction(c)
        return cls((c.numerator,), (c.denominator,))

    @classmethod
    def poly(cls, coeffs: Iterable[int]) -> "QValue":
        return cls(tuple(coeffs), _ONE)

    @classmethod
    def q_pow(cls, k: int) -> "QValue":
        if k >= 0:
            return cls((0,) * k + (1,), _ONE, _canonical=True)
        return cls(_ONE, (0,) * (-k) + (1,), _canonical=True)

    # -- arithmetic -------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "QValue":
        if isinstance(other, QValue):
            return other
        if isinstance(other, (int, Fraction)):
            return QValue.const(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den == o.den:
            return QValue(padd(self.num, o.num), self.den)
        return QValue(padd(pmul(self.num, o.den), pmul(o.num, self.den)), pmul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        return QValue(pneg(self.num), self.den, _canonical=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QValue(pmul(self.num, o.num), pmul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o.num:
            raise ZeroDivisionError("division by the zero rational function")
        return QValue(pmul(self.num, o.den), pmul(self.den, o.num))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, e: int):
        if e < 0:
            return QValue.const(1) / (self ** (-e))
        out = QValue.const(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def is_polynomial(self) -> bool:
        return self.den == _ONE

    # -- evaluation -------------------------------------------------------
    def eval(self, q) -> Fraction:
        d = peval(self.den, q)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at q={q}")
        return Fraction(peval(self.num, q)) / d

    def eval_str(self, q) -> str:
        return str(self.eval(q))

    def is_product_form(self) -> bool:
        """True iff the denominator is ``c * q^a (q-1)^b (q+1)^c``."""
        _, rest = _strip_q(self.den)
        for f in ((-1, 1), (1, 1)):
            while len(rest) > 1 and _divides(rest, f):
                rest = pdiv(rest, f)
        return len(rest) == 1

    # -- rendering --------------------------------------------------------
    def __str__(self):
        if not self.num:
            return "0"
        num = _render_product(self.num)
        if self.den == _ONE:
            return num
        den = _render_product(self.den)
        if "*" in den:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"QValue({self})"


_KNOWN_FACTORS = (
    ((-1, 1), "(q-1)"),
    ((1, 1), "(q+1)"),
    ((1, 1, 1), "(q^2+q+1)"),
    ((1, -1, 1), "(q^2-q+1)"),
    ((1, 0, 1), "(q^2+1)"),
)


def _factor_out(a: Poly):
    k, rest = _strip_q(a)
    found = []
    for f, name in _KNOWN_FACTORS:
        e = 0
        while len(rest) > 1 and _divides(rest, f):
            rest = pdiv(rest, f)
            e += 1
        if e:
            found.append((name, e))
    return k, rest, found


def _render_poly(a: Poly) -> str:
    terms = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if c == 0:
            continue
        mono = "" if i == 0 else ("q" if i == 1 else f"q^{i}")
        if not mono:
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += sign + body
    return out


def _render_product(a: Poly) -> str:
    k, rest, found = _factor_out(a)
    parts = []
    if len(rest) == 1:
        if rest[0] != 1:
            parts.append(str(rest[0]))
    else:
        body = _render_poly(rest)
        parts.append(f"({body})")
    if k:
        parts.append("q" if k == 1 else f"q^{k}")
    for name, e in found:
        parts.append(name if e == 1 else f"{name}^{e}")
    if not parts:
        return "1"
    if parts[0] == "-1" and len(parts) > 1:
        return "-" + "*".join(parts[1:])
    return "*".join(parts)


Q = QValue.q_pow(1)
ONE = QValue.const(1)
ZERO = QValue.const(0)


def qpow(k: int) -> QValue:
    return QValue.q_pow(k)
