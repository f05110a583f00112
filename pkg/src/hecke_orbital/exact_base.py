"""Exact arithmetic over the two local-field models.

Two models of a non-Archimedean local field are supported, both with a
residue field of prime order ``p``:

* ``p-adic``: elements of the ring of integers are represented by Python
  integers (global representatives), the uniformizer is ``p``.
* ``laurent``: ``F_p((t))``, elements of ``F_p[[t]]`` are represented by
  polynomials over ``Z/p`` (:class:`FpPoly`), the uniformizer is ``t``.

All valuations and resultants are computed exactly on the global
representatives; truncation to ``o/pi^N`` happens only in
:class:`TruncatedRing`, which the counting oracles use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateInput, MalformedInput, NotIntegral

INF = math.inf

PADIC = "p-adic"
LAURENT = "laurent"


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


class FpPoly:
    """Immutable polynomial in ``t`` over ``Z/p``, coefficients in ascending order."""

    __slots__ = ("p", "coeffs")

    def __init__(self, coeffs: Sequence[int], p: int):
        c = [int(a) % p for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.p = p
        self.coeffs = tuple(c)

    @classmethod
    def constant(cls, a: int, p: int) -> "FpPoly":
        return cls((a,), p)

    def _coerce(self, other) -> "FpPoly":
        if isinstance(other, FpPoly):
            if other.p != self.p:
                raise ValueError("mixing polynomials over different primes")
            return other
        if isinstance(other, int):
            return FpPoly((other,), self.p)
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] += x
        return FpPoly(out, self.p)

    __radd__ = __add__

    def __neg__(self):
        return FpPoly([-a for a in self.coeffs], self.p)

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
        if not self.coeffs or not o.coeffs:
            return FpPoly((), self.p)
        out = [0] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(o.coeffs):
                    out[i + j] += x * y
        return FpPoly(out, self.p)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = FpPoly((1,), self.p)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divmod(self, other: "FpPoly"):
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        rem = list(self.coeffs)
        db = o.degree()
        inv = pow(o.coeffs[-1], -1, p)
        quot = [0] * max(len(rem) - db, 0)
        for i in range(len(rem) - 1, db - 1, -1):
            c = rem[i] % p
            if c == 0:
                continue
            f = c * inv % p
            quot[i - db] = f
            for j, y in enumerate(o.coeffs):
                rem[i - db + j] -= f * y
        return FpPoly(quot, p), FpPoly(rem, p)

    def __floordiv__(self, other):
        """Exact division (used by fraction-free elimination)."""
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def __eq__(self, other):
        if isinstance(other, int):
            other = FpPoly((other,), self.p)
        if not isinstance(other, FpPoly):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms)


Scalar = Union[int, FpPoly]


@dataclass(frozen=True)
class FieldSpec:
    """Which local field model is in use, and the default working precision."""

    kind: str
    p: int
    default_precision: int = 8

    def __post_init__(self):
        if self.kind not in (PADIC, LAURENT):
            raise MalformedInput(f"unknown field kind {self.kind!r}")
        if not is_prime(self.p):
            raise MalformedInput(f"residue characteristic {self.p} is not prime")
        if self.default_precision < 1:
            raise MalformedInput("default_precision must be >= 1")

    @property
    def q(self) -> int:
        return self.p

    @property
    def characteristic(self) -> int:
        return 0 if self.kind == PADIC else self.p

    # -- constructors -------------------------------------------------
    def from_int(self, a: int) -> Scalar:
        if self.kind == PADIC:
            return int(a)
        return FpPoly((a,), self.p)

    def from_coeffs(self, coeffs: Sequence[int]) -> Scalar:
        """Laurent element from its t-adic coefficients (p-adic: base-p digits)."""
        if self.kind == PADIC:
            return sum(int(c) * self.p**i for i, c in enumerate(coeffs))
        return FpPoly(coeffs, self.p)

    @property
    def zero(self) -> Scalar:
        return self.from_int(0)

    @property
    def one(self) -> Scalar:
        return self.from_int(1)

    @property
    def pi(self) -> Scalar:
        return self.p if self.kind == PADIC else FpPoly((0, 1), self.p)

    def pi_pow(self, k: int) -> Scalar:
        if k < 0:
            raise ValueError("negative power of the uniformizer")
        if self.kind == PADIC:
            return self.p**k
        return FpPoly((0,) * k + (1,), self.p)

    # -- valuation ----------------------------------------------------
    def ord(self, x: Scalar) -> float:
        if self.kind == PADIC:
            if x == 0:
                return INF
            x = abs(x)
            e = 0
            while x % self.p == 0:
                x //= self.p
                e += 1
            return e
        if x.is_zero():
            return INF
        for i, c in enumerate(x.coeffs):
            if c:
                return i
        raise AssertionError("unreachable")

    def div_pi_pow(self, x: Scalar, k: int) -> Scalar:
        """Exact ``x / pi^k``; negative ``k`` multiplies."""
        if k <= 0:
            return x * self.pi_pow(-k)
        if self.ord(x) < k:
            raise NotIntegral(f"{x!r} is not divisible by pi^{k}")
        if self.kind == PADIC:
            return x // self.p**k
        return FpPoly(x.coeffs[k:], self.p)

    # -- residues and truncation ---------------------------------------
    def digits(self, x: Scalar, m: int) -> list[int]:
        """First ``m`` pi-adic digits of ``x``."""
        if self.kind == PADIC:
            r = x % self.p**m
            out = []
            for _ in range(m):
                out.append(r % self.p)
                r //= self.p
            return out
        c = list(x.coeffs[:m])
        return c + [0] * (m - len(c))

    def from_digits(self, ds: Sequence[int]) -> Scalar:
        return self.from_coeffs(ds)

    def residue(self, x: Scalar) -> int:
        return self.digits(x, 1)[0]

    def truncate(self, x: Scalar, m: int) -> Scalar:
        """Canonical representative of ``x mod pi^m``."""
        if self.kind == PADIC:
            return x % self.p**m
        return FpPoly(x.coeffs[:m], self.p)

    def encode(self, x: Scalar, m: int) -> int:
        """Integer code in ``[0, p^m)`` of ``x mod pi^m`` (digit string in base p)."""
        ds = self.digits(x, m)
        return sum(d * self.p**i for i, d in enumerate(ds))

    def decode(self, code: int, m: int) -> Scalar:
        ds = []
        for _ in range(m):
            ds.append(code % self.p)
            code //= self.p
        return self.from_digits(ds)

    def unit_inverse(self, u: Scalar, m: int) -> Scalar:
        """``v`` with ``u*v = 1 mod pi^m``; ``u`` must be a unit."""
        if self.residue(u) == 0:
            raise ValueError("not a unit")
        if m <= 0:
            return self.zero
        if self.kind == PADIC:
            return pow(u, -1, self.p**m)
        # Newton iteration for power series inverse.
        v = FpPoly((pow(u.coeffs[0], -1, self.p),), self.p)
        prec = 1
        while prec < m:
            prec = min(2 * prec, m)
            v = self.truncate(v * (2 - self.truncate(u, prec) * v), prec)
        return self.truncate(v, m)

    # -- (de)serialisation ----------------------------------------------
    def parse_scalar(self, raw) -> Scalar:
        if self.kind == PADIC:
            if isinstance(raw, bool) or not isinstance(raw, (str, int)):
                raise MalformedInput(f"p-adic coefficient must be a decimal string, got {raw!r}")
            try:
                return int(raw)
            except ValueError as exc:
                raise MalformedInput(f"bad integer {raw!r}") from exc
        if not isinstance(raw, list) or not all(
            isinstance(c, int) and not isinstance(c, bool) for c in raw
        ):
            raise MalformedInput(f"laurent coefficient must be a list of residues, got {raw!r}")
        if any(c < 0 or c >= self.p for c in raw):
            raise MalformedInput(f"laurent coefficients must lie in [0, {self.p})")
        return FpPoly(raw, self.p)

    def format_scalar(self, x: Scalar):
        if self.kind == PADIC:
            return str(x)
        return list(x.coeffs)

    def to_json(self) -> dict:
        return {"kind": self.kind, "p": self.p}


def valuation(fs: FieldSpec, x: Scalar) -> float:
    return fs.ord(x)


# ---------------------------------------------------------------------------
# Characteristic polynomials
# ---------------------------------------------------------------------------


def _is_zero(x: Scalar) -> bool:
    return x == 0 if isinstance(x, int) else x.is_zero()


def _poly_mul(fs: FieldSpec, a: list, b: list) -> list:
    out = [fs.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def bareiss_det(rows: list[list[Scalar]], zero: Scalar) -> Scalar:
    """Determinant by fraction-free Gaussian elimination over an integral domain."""
    m = [list(r) for r in rows]
    n = len(m)
    sign = 1
    prev = None
    for k in range(n - 1):
        piv = next((i for i in range(k, n) if not _is_zero(m[i][k])), None)
        if piv is None:
            return zero
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num if prev is None else num // prev
            m[i][k] = zero
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign == 1 else -det


@dataclass(frozen=True)
class CharPoly:
    """Monic ``x^n + c_1 x^(n-1) + ... + c_n`` with integral global coefficients."""

    fs: FieldSpec
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) not in (2, 3):
            raise MalformedInput("only degrees 2 and 3 are supported")
        for c in self.coeffs:
            if self.fs.kind == PADIC and not isinstance(c, int):
                raise MalformedInput("p-adic coefficients must be integers")
            if self.fs.kind == LAURENT and not (isinstance(c, FpPoly) and c.p == self.fs.p):
                raise MalformedInput("laurent coefficients must be polynomials over Z/p")
        if _is_zero(discriminant(self)):
            raise DegenerateInput(f"{self} has zero discriminant")

    @classmethod
    def from_ints(cls, fs: FieldSpec, coeffs: Sequence) -> "CharPoly":
        out = []
        for c in coeffs:
            if isinstance(c, FpPoly):
                out.append(c)
            elif isinstance(c, int) and not isinstance(c, bool):
                out.append(fs.from_int(c))
            else:
                out.append(fs.parse_scalar(c))
        return cls(fs, tuple(out))

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def descending(self) -> list:
        """Coefficients ``[1, c_1, ..., c_n]``."""
        return [self.fs.one, *self.coeffs]

    def derivative(self) -> list:
        n = self.n
        return [self.fs.from_int(n - i) * c for i, c in enumerate(self.descending()[:-1])]

    def __str__(self):
        parts = [f"x^{self.n}"]
        for i, c in enumerate(self.coeffs, start=1):
            if _is_zero(c):
                continue
            e = self.n - i
            mono = "" if e == 0 else ("x" if e == 1 else f"x^{e}")
            parts.append(f"({c!r}){'*' + mono if mono else ''}")
        return " + ".join(parts)


def poly_eval(chi: CharPoly, a: Scalar) -> Scalar:
    acc = chi.fs.one
    for c in chi.coeffs:
        acc = acc * a + c
    return acc


def eval_descending(coeffs: Sequence[Scalar], a: Scalar, zero: Scalar) -> Scalar:
    acc = zero
    for c in coeffs:
        acc = acc * a + c
    return acc


def resultant(f: Sequence[Scalar], g: Sequence[Scalar], zero: Scalar) -> Scalar:
    """Sylvester resultant of two polynomials given by descending coefficients."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([zero] * i + list(f) + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + list(g) + [zero] * (size - n - 1 - i))
    return bareiss_det(rows, zero)


def discriminant(chi: CharPoly) -> Scalar:
    n = chi.n
    res = resultant(chi.descending(), chi.derivative(), chi.fs.zero)
    return res if (n * (n - 1) // 2) % 2 == 0 else -res


def disc_valuation(chi: CharPoly) -> int:
    v = chi.fs.ord(discriminant(chi))
    if v == INF:
        raise DegenerateInput("zero discriminant")
    return int(v)


def rescale_poly(chi: CharPoly, k: int) -> CharPoly:
    """``chi(pi^k x) / pi^(n k)``, i.e. ``c_i -> c_i / pi^(i k)``."""
    fs = chi.fs
    out = []
    for i, c in enumerate(chi.coeffs, start=1):
        out.append(fs.div_pi_pow(c, i * k))
    return CharPoly(fs, tuple(out))


def translate(chi: CharPoly, a: Scalar) -> CharPoly:
    """``chi(x + a)``, the characteristic polynomial of ``gamma - a*I``."""
    fs = chi.fs
    # Taylor shift by repeated synthetic division.
    coeffs = chi.descending()
    n = chi.n
    work = list(coeffs)
    for i in range(n):
        for j in range(1, n + 1 - i):
            work[j] = work[j] + a * work[j - 1]
    return CharPoly(fs, tuple(work[1:]))


def reduce_mod(chi: CharPoly) -> tuple[int, ...]:
    """Reduction mod pi, as descending coefficients over ``Z/p`` (monic)."""
    return (1, *(chi.fs.residue(c) for c in chi.coeffs))


def residue_irreducible(f: Sequence[int], p: int) -> bool:
    """Irreducibility over ``F_p`` of a degree 2 or 3 polynomial (no root test)."""
    deg = len(f) - 1
    if deg not in (2, 3):
        raise ValueError("degree must be 2 or 3")
    if f[0] % p == 0:
        raise ValueError("leading coefficient vanishes mod p")
    for x in range(p):
        acc = 0
        for c in f:
            acc = (acc * x + c) % p
        if acc == 0:
            return False
    return True


# ---------------------------------------------------------------------------
# Truncated rings o / pi^N, vectorised over numpy code arrays
# ---------------------------------------------------------------------------


class TruncatedRing:
    """``o / pi^N`` with elements encoded as integers in ``[0, p^N)``.

    The code of an element is its digit string read in base ``p``.  For the
    p-adic model this is ordinary arithmetic mod ``p^N``; for the Laurent model
    addition is digit-wise and multiplication is truncated convolution.
    """

    def __init__(self, fs: FieldSpec, N: int):
        if N < 1:
            raise ValueError("precision must be positive")
        self.fs = fs
        self.N = N
        self.p = fs.p
        self.size = fs.p**N
        if self.size**2 >= 2**62:
            raise ValueError("truncated ring too large for int64 codes")
        self._pows = [fs.p**i for i in range(N + 1)]

    def encode(self, x: Scalar) -> int:
        return self.fs.encode(x, self.N)

    def decode(self, code: int) -> Scalar:
        return self.fs.decode(int(code), self.N)

    def elements(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    def _digits(self, a):
        a = np.asarray(a, dtype=np.int64)
        return [(a // self._pows[i]) % self.p for i in range(self.N)]

    def _from_digits(self, ds):
        out = ds[0] % self.p
        for i in range(1, self.N):
            out = out + (ds[i] % self.p) * self._pows[i]
        return out

    def add(self, a, b):
        if self.fs.kind == PADIC:
            return (np.asarray(a, dtype=np.int64) + b) % self.size
        da, db = self._digits(a), self._digits(b)
        return self._from_digits([x + y for x, y in zip(da, db)])

    def neg(self, a):
        if self.fs.kind == PADIC:
            return (-np.asarray(a, dtype=np.int64)) % self.size
        return self._from_digits([-x for x in self._digits(a)])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.fs.kind == PADIC:
            return (np.asarray(a, dtype=np.int64) * b) % self.size
        da, db = self._digits(a), self._digits(b)
        out = []
        for k in range(self.N):
            acc = da[0] * db[k]
            for i in range(1, k + 1):
                acc = acc + da[i] * db[k - i]
            out.append(acc)
        return self._from_digits(out)

    def ord(self, a):
        """Valuation of each code; ``N`` stands for zero."""
        a = np.asarray(a, dtype=np.int64)
        out = np.zeros(a.shape, dtype=np.int64)
        for i in range(1, self.N + 1):
            out += (a % self._pows[i] == 0)
        return out


@dataclass(frozen=True)
class TruncatedMatrix:
    """An ``n x n`` matrix over ``o / pi^N``, entries held as integer codes."""

    fs: FieldSpec
    N: int
    entries: tuple

    def __post_init__(self):
        size = self.fs.p**self.N
        n = len(self.entries)
        if any(len(r) != n for r in self.entries):
            raise ValueError("matrix must be square")
        if any(not 0 <= e < size for r in self.entries for e in r):
            raise ValueError("entries must be reduced mod pi^N")

    @classmethod
    def from_scalars(cls, fs: FieldSpec, N: int, rows) -> "TruncatedMatrix":
        return cls(fs, N, tuple(tuple(fs.encode(fs.from_int(x) if isinstance(x, int) else x, N)
                                      for x in r) for r in rows))

    @property
    def n(self) -> int:
        return len(self.entries)
