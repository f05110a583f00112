"""Brute-force counting oracles.

:func:`fiber_volume` counts matrices over ``o / pi^N`` with a prescribed
characteristic polynomial, sorted by the elementary-divisor type of the
matrix; dividing by ``q^{N(n^2-n)}`` gives the volume of the fiber with
respect to the geometric measure once ``N`` is large enough.

:func:`lattice_orbit_count` counts lattices in ``E = F[x]/(chi)`` up to the
action of ``E^x`` (weighted by the index of their unit groups), which is the
orbital integral for the quotient measure.  It works on the Bruhat-Tits tree
of ``GL_2`` and is restricted to ``n = 2``.
"""
from __future__ import annotations

import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .closed_form import LatticeType, as_type
from .errors import BudgetExceeded, PreconditionError, PrecisionTooLow, WindowUnstable
from .exact_base import (
    INF,
    CharPoly,
    FieldSpec,
    TruncatedMatrix,
    TruncatedRing,
    disc_valuation,
    rescale_poly,
)
from .profile import RAMIFIED, build_profile

log = logging.getLogger(__name__)

#: largest ``q^(2N)`` pair table for GL2 enumeration
GL2_BUDGET = 1 << 24
#: largest ``q^(8N)`` search space for GL3 enumeration
GL3_BUDGET = 1 << 26
MAX_WINDOW = 4


@dataclass(frozen=True)
class OracleReport:
    N: int
    count: int
    volume: Fraction
    stabilized: Optional[bool]
    millis: float = field(compare=False)
    shift: int = 0
    below_floor: bool = False
    fiber_total: int = 0

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "N": self.N,
            "count": self.count,
            "volume": str(self.volume),
            "stabilized": self.stabilized,
            "shift": self.shift,
            "below_floor": self.below_floor,
        }
        if timing:
            out["millis"] = round(self.millis, 3)
        return out


# ---------------------------------------------------------------------------
# Types of truncated matrices
# ---------------------------------------------------------------------------


def _minors(R: TruncatedRing, rows):
    n = len(rows)
    out = []
    for i in range(n):
        for i2 in range(i + 1, n):
            for j in range(n):
                for j2 in range(j + 1, n):
                    out.append(R.sub(R.mul(rows[i][j], rows[i2][j2]),
                                     R.mul(rows[i][j2], rows[i2][j])))
    return out


def _types_from_entries(R: TruncatedRing, rows, d: int):
    """Vectorised ``(k_1, k_1 + k_2)`` of matrices given entry-wise by codes."""
    n = len(rows)
    m1 = R.ord(rows[0][0])
    for r in rows:
        for e in r:
            m1 = np.minimum(m1, R.ord(e))
    if n == 2:
        return m1, None
    minors = _minors(R, rows)
    m2 = R.ord(minors[0])
    for mi in minors[1:]:
        m2 = np.minimum(m2, R.ord(mi))
    return m1, m2


def smith_type(X: TruncatedMatrix, d: int) -> LatticeType:
    """Elementary-divisor exponents of ``X`` over ``o / pi^N`` given ``ord det X = d``."""
    R = TruncatedRing(X.fs, X.N)
    if X.N <= d:
        raise PrecisionTooLow(f"need N > d (N={X.N}, d={d})")
    rows = [[np.int64(e) for e in r] for r in X.entries]
    det = _det_codes(R, rows)
    od = int(R.ord(det))
    if od >= X.N:
        raise PrecisionTooLow("determinant vanishes modulo pi^N")
    if od != d:
        raise PreconditionError(f"ord det X = {od}, expected {d}")
    m1, m2 = _types_from_entries(R, rows, d)
    k1 = int(m1)
    if X.n == 2:
        return LatticeType((k1, d - k1))
    k2 = int(m2) - k1
    return LatticeType((k1, k2, d - k1 - k2))


def _det_codes(R: TruncatedRing, rows):
    if len(rows) == 2:
        return R.sub(R.mul(rows[0][0], rows[1][1]), R.mul(rows[0][1], rows[1][0]))
    (a, b, c), (d_, e, f), (g, h, i) = rows
    t1 = R.mul(a, R.sub(R.mul(e, i), R.mul(f, h)))
    t2 = R.mul(b, R.sub(R.mul(d_, i), R.mul(f, g)))
    t3 = R.mul(c, R.sub(R.mul(d_, h), R.mul(e, g)))
    return R.add(R.sub(t1, t2), t3)


# ---------------------------------------------------------------------------
# Fiber histograms
# ---------------------------------------------------------------------------


def _budget_ok(n: int, q: int, N: int) -> bool:
    size = q**N
    return size * size <= GL2_BUDGET if n == 2 else size**8 <= GL3_BUDGET


def _coeff_codes(chi: CharPoly, N: int) -> tuple:
    return tuple(chi.fs.encode(c, N) for c in chi.coeffs)


def _gl2_histogram(fs: FieldSpec, codes: tuple, N: int, d: int) -> Counter:
    R = TruncatedRing(fs, N)
    c1, c2 = codes
    elems = R.elements()
    size = R.size
    # table[r, m] = #{(b, c) : b c = r, min(ord b, ord c) = m}
    table = np.zeros(size * (N + 1), dtype=np.int64)
    ord_e = R.ord(elems)
    chunk = max(1, (1 << 20) // size)
    for start in range(0, size, chunk):
        b = elems[start:start + chunk, None]
        prod = R.mul(b, elems[None, :])
        m = np.minimum(ord_e[start:start + chunk, None], ord_e[None, :])
        table += np.bincount((prod * (N + 1) + m).ravel(), minlength=size * (N + 1))
    table = table.reshape(size, N + 1)
    x11 = elems
    x22 = R.sub(R.neg(np.full_like(x11, c1)), x11)
    r = R.sub(R.mul(x11, x22), c2)
    m0 = np.minimum(R.ord(x11), R.ord(x22))
    hist: Counter = Counter()
    for m in range(N + 1):
        counts = table[r, m]
        k1 = np.minimum(m0, m)
        for kk in np.unique(k1[counts > 0]).tolist():
            hist[(kk, d - kk)] += int(counts[k1 == kk].sum())
    return hist


def _gl3_chunk(args):
    fs, codes, N, d, x11_values = args
    R = TruncatedRing(fs, N)
    a, b, c = codes
    size = R.size
    e = R.elements()
    grids = np.meshgrid(e, e, e, e, e, indexing="ij")
    x21, x31, x12, x22, x32 = (g.ravel() for g in grids)
    hist: Counter = Counter()
    na = R.neg(np.int64(a))
    for x11v in x11_values:
        x11 = np.full_like(x21, x11v)
        x33 = R.sub(R.sub(na, x11), x22)
        m12 = R.sub(R.mul(x11, x22), R.mul(x12, x21))
        t1 = R.sub(R.add(m12, R.mul(x33, R.add(x11, x22))), b)
        t2 = R.sub(R.neg(np.int64(c)), R.mul(x33, m12))
        M1 = R.sub(R.mul(x21, x32), R.mul(x22, x31))
        M2 = R.sub(R.mul(x11, x32), R.mul(x12, x31))
        v_terms = [(R.mul(v, x32), R.mul(v, M2)) for v in range(size)]
        for u in range(size):
            # u x31 + v x32 = t1  and  u M1 - v M2 = t2
            need1 = R.sub(t1, R.mul(u, x31))
            need2 = R.sub(R.mul(u, M1), t2)
            for v in range(size):
                hit = np.nonzero((v_terms[v][0] == need1) & (v_terms[v][1] == need2))[0]
                if not hit.size:
                    continue
                cols = [x11[hit], x21[hit], x31[hit], x12[hit], x22[hit], x32[hit]]
                uu = np.full(hit.size, u, dtype=np.int64)
                vv = np.full(hit.size, v, dtype=np.int64)
                rows = [[cols[0], cols[3], uu], [cols[1], cols[4], vv], [cols[2], cols[5], x33[hit]]]
                m1, m2 = _types_from_entries(R, rows, d)
                for k1, s2 in zip(m1.tolist(), m2.tolist()):
                    hist[(k1, s2 - k1, d - s2)] += 1
    return hist


def _gl3_histogram(fs: FieldSpec, codes: tuple, N: int, d: int, jobs: int = 1) -> Counter:
    size = fs.p**N
    parts = [list(range(i, size, max(jobs, 1))) for i in range(max(jobs, 1))]
    tasks = [(fs, codes, N, d, part) for part in parts if part]
    hist: Counter = Counter()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            for h in ex.map(_gl3_chunk, tasks):
                hist.update(h)
    else:
        for t in tasks:
            hist.update(_gl3_chunk(t))
    return hist


@lru_cache(maxsize=64)
def _histogram(fs: FieldSpec, codes: tuple, N: int, d: int, n: int) -> tuple:
    if n == 2:
        hist = _gl2_histogram(fs, codes, N, d)
    else:
        hist = _gl3_histogram(fs, codes, N, d)
    return tuple(sorted(hist.items()))


def fiber_histogram(chi: CharPoly, N: int) -> dict:
    """``{type: count}`` over all ``X`` in ``M_n(o/pi^N)`` with ``chi_X = chi``."""
    d = int(chi.fs.ord(chi.coeffs[-1]))
    if not _budget_ok(chi.n, chi.fs.q, N):
        raise BudgetExceeded(f"n={chi.n}, q={chi.fs.q}, N={N} exceeds the enumeration budget")
    return dict(_histogram(chi.fs, _coeff_codes(chi, N), N, d, chi.n))


def precision_floor(chi: CharPoly) -> int:
    d = int(chi.fs.ord(chi.coeffs[-1]))
    return max(d + 1, disc_valuation(chi) + 1)


def fiber_volume(chi: CharPoly, k, N=None, fs: Optional[FieldSpec] = None,
                 stabilize: bool = True) -> OracleReport:
    """Geometric-measure volume of ``{X : chi_X = chi, type X = k}``.

    A negative ``k_1`` is handled by enumerating ``chi(pi^{k_1} x)/pi^{n k_1}``
    at type ``k - k_1`` and multiplying by ``q^{-k_1 n(n-1)/2}``; ``N`` then
    refers to that rescaled polynomial.  ``N=None`` (or ``"auto"``) uses the
    floor ``max(d+1, ord disc + 1)``.
    """
    t0 = time.perf_counter()
    fs = fs or chi.fs
    k = as_type(k)
    n = chi.n
    if k.n != n:
        raise ValueError("type length must equal n")
    shift = min(k[0], 0)
    target = rescale_poly(chi, shift) if shift else chi
    k_enum = k.shifted(shift)
    d = int(fs.ord(target.coeffs[-1]))
    floor = precision_floor(target)
    if N is None or N == "auto":
        N = floor
    N = int(N)
    if N <= d:
        raise PrecisionTooLow(f"N={N} must exceed d={d}")
    hist = fiber_histogram(target, N)
    count = hist.get(tuple(k_enum), 0)
    q = fs.q
    weight = n * (n - 1) // 2
    volume = Fraction(count * q ** (-shift * weight), q ** (N * (n * n - n)))
    stabilized = None
    if stabilize and N - 1 > d and _budget_ok(n, q, N - 1):
        prev = fiber_histogram(target, N - 1).get(tuple(k_enum), 0)
        prev_vol = Fraction(prev * q ** (-shift * weight), q ** ((N - 1) * (n * n - n)))
        stabilized = prev_vol == volume
    millis = (time.perf_counter() - t0) * 1000.0
    return OracleReport(N=N, count=count, volume=volume, stabilized=stabilized, millis=millis,
                        shift=shift, below_floor=N < floor, fiber_total=sum(hist.values()))


def total_fiber_volume(chi: CharPoly, N: int) -> Fraction:
    n = chi.n
    hist = fiber_histogram(chi, N)
    return Fraction(sum(hist.values()), chi.fs.q ** (N * (n * n - n)))


# ---------------------------------------------------------------------------
# Quotient measure: lattices on the tree
# ---------------------------------------------------------------------------


def _mat_mul(A, B):
    return [[A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]],
            [A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]]]


def _vertices(fs: FieldSpec, radius: int):
    """Primitive Hermite bases ``[[pi^a, b], [0, pi^c]]`` at distance ``<= radius``."""
    for j in range(radius + 1):
        for a in range(j + 1):
            c = j - a
            pa = fs.pi_pow(a)
            for code in range(fs.p**a):
                b = fs.decode(code, a) if a else fs.zero
                if min(a, c, fs.ord(b)) != 0 and j > 0:
                    continue
                yield j, [[pa, b], [fs.zero, fs.pi_pow(c)]]


def _type_counts(chi: CharPoly, radius: int) -> Counter:
    fs = chi.fs
    c1, c2 = chi.coeffs
    C = [[fs.zero, fs.zero - c2], [fs.one, fs.zero - c1]]
    d = int(fs.ord(c2))
    out: Counter = Counter()
    for j, B in _vertices(fs, radius):
        adj = [[B[1][1], fs.zero - B[0][1]], [fs.zero, B[0][0]]]
        M = _mat_mul(_mat_mul(adj, C), B)
        k1 = min(fs.ord(e) for row in M for e in row) - j
        out[(int(k1), d - int(k1))] += 1
    return out


def lattice_orbit_count(chi: CharPoly, k, window: Optional[int] = None,
                        fs: Optional[FieldSpec] = None) -> int:
    """Quotient-measure orbital integral of ``1_{D_k}`` for ``n = 2``.

    Counts homothety classes ``[L]`` (vertices of the tree within distance
    ``2m`` of ``[o[x]/(chi)]``) with ``type(L, gamma L) = k``, divided by the
    ramification index.  The count must agree between windows ``m-1`` and
    ``m``; with ``window=None`` the smallest stable ``m <= 4`` is used.
    """
    fs = fs or chi.fs
    if chi.n != 2:
        raise PreconditionError("the lattice oracle is implemented for n = 2 only")
    k = as_type(k)
    profile = build_profile(chi, fs)
    e = 2 if profile.ram == RAMIFIED else 1
    windows = [window] if window is not None else list(range(1, MAX_WINDOW + 1))
    last_err = None
    for m in windows:
        if m < 1 or m > MAX_WINDOW:
            raise PreconditionError(f"window must be in 1..{MAX_WINDOW}")
        inner = _type_counts(chi, 2 * (m - 1)).get(tuple(k), 0)
        outer = _type_counts(chi, 2 * m).get(tuple(k), 0)
        if inner != outer:
            last_err = WindowUnstable(f"count moved from {inner} to {outer} at window {m}")
            continue
        if outer % e:
            raise WindowUnstable(f"{outer} classes is not divisible by e={e}")
        return outer // e
    raise last_err
