"""Number of lattices of a given type relative to a fixed lattice.

``c(k)`` counts lattices ``M`` in ``F^n`` whose elementary divisors relative
to ``L = o^n`` are ``pi^{k_1}, ..., pi^{k_n}``.  Shifting every ``k_i`` by the
same integer does not change the count, so we normalise to ``k_1 = 0`` and
enumerate sublattices of ``Z_p^n`` in Hermite normal form.  The count only
depends on ``q``; for symbolic ``q`` we interpolate a polynomial through
exact counts at several primes and confirm it on one more.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from .errors import BudgetExceeded
from .exact_base import is_prime
from .qvalue import QValue

#: upper bound on the number of Hermite forms enumerated for one prime
ENUMERATION_BUDGET = 60_000_000


def _ord_p(a: np.ndarray, p: int, cap: int) -> np.ndarray:
    """p-adic valuation of each entry, saturating at ``cap`` (zero -> cap)."""
    a = np.abs(a)
    out = np.zeros(a.shape, dtype=np.int64)
    pk = 1
    for _ in range(cap):
        pk *= p
        out += (a % pk == 0)
    return out


def _diagonals(k: tuple):
    """Diagonal exponent vectors compatible with the type ``k`` (``k_1 = 0``)."""
    n, top, total = len(k), k[-1], sum(k)
    for a in itertools.product(range(top + 1), repeat=n):
        if sum(a) == total:
            yield a


def _hnf_work(p: int, a: tuple) -> int:
    n = len(a)
    return p ** sum(a[i] * (n - 1 - i) for i in range(n))


def _count_at_prime(p: int, k: tuple) -> int:
    n = len(k)
    total = sum(k)
    cap = total + 1
    work = sum(_hnf_work(p, a) for a in _diagonals(k))
    if work > ENUMERATION_BUDGET:
        raise BudgetExceeded(f"{work} Hermite forms for type {k} at p={p}")
    count = 0
    for a in _diagonals(k):
        diag = [p**e for e in a]
        if n == 2:
            x = np.arange(diag[0], dtype=np.int64)
            m1 = np.minimum(_ord_p(x, p, cap), min(a))
            ok = m1 == k[0]
        else:
            A, B, C = diag
            y, z = np.meshgrid(np.arange(A, dtype=np.int64), np.arange(B, dtype=np.int64),
                               indexing="ij")
            y, z = y.ravel(), z.ravel()
            # entries and minors that do not involve x
            base1 = np.minimum(np.minimum(_ord_p(y, p, cap), _ord_p(z, p, cap)), min(a))
            base2 = np.minimum(a[0] + _ord_p(z, p, cap),
                               min(a[0] + a[1], a[0] + a[2], a[1] + a[2]))
            ok_total = 0
            for x in range(A):
                ox = min(int(_ord_p(np.array([x]), p, cap)[0]), cap)
                m1 = np.minimum(base1, ox)
                m2 = np.minimum(base2, min(ox + a[2], cap))
                m2 = np.minimum(m2, _ord_p(x * z - y * B, p, cap))
                ok_total += int(np.count_nonzero((m1 == k[0]) & (m2 == k[0] + k[1])))
            count += ok_total
            continue
        count += int(np.count_nonzero(ok))
    return count


def _primes(count: int):
    out, c = [], 2
    while len(out) < count:
        if is_prime(c):
            out.append(c)
        c += 1
    return out


def _interpolate(xs, ys) -> tuple:
    """Integer coefficients (ascending) of the polynomial through the points."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for t in range(len(basis) - 1):
                basis[t] -= xs[j] * basis[t + 1]
            denom *= xs[i] - xs[j]
        for t in range(n):
            coeffs[t] += ys[i] * basis[t] / denom
    if any(c.denominator != 1 for c in coeffs):
        raise ArithmeticError("lattice counts are not polynomial in q")
    out = [int(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@lru_cache(maxsize=None)
def _symbolic(k: tuple) -> tuple:
    n = len(k)
    degree = sum(k[j] - k[i] for i in range(n) for j in range(i + 1, n))
    ps = _primes(degree + 2)
    counts = [_count_at_prime(p, k) for p in ps]
    coeffs = _interpolate(ps[:-1], counts[:-1])
    check = sum(c * ps[-1] ** i for i, c in enumerate(coeffs))
    if check != counts[-1]:
        raise ArithmeticError(f"interpolated lattice count for {k} fails at p={ps[-1]}")
    return coeffs


def count_lattices_of_type(q: Optional[int], k) -> Union[int, QValue]:
    """``c(k)``; an ``int`` for concrete prime ``q``, a polynomial QValue for ``q=None``."""
    k = tuple(int(x) for x in k)
    if any(a > b for a, b in zip(k, k[1:])):
        raise ValueError(f"type {k} is not nondecreasing")
    k = tuple(x - k[0] for x in k)
    if q is None:
        return QValue.poly(_symbolic(k))
    if is_prime(q):
        try:
            return _count_at_prime(q, k)
        except BudgetExceeded:
            pass
    coeffs = _symbolic(k)
    return sum(c * q**i for i, c in enumerate(coeffs))
