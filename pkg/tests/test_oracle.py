import itertools
from collections import Counter
from fractions import Fraction

import pytest

from hecke_orbital.closed_form import conversion_factor, so_hecke_geometric, so_hecke_quotient
from hecke_orbital.errors import BudgetExceeded, PreconditionError, PrecisionTooLow, WindowUnstable
from hecke_orbital.exact_base import CharPoly, FieldSpec, TruncatedMatrix, translate
from hecke_orbital.oracle import (
    fiber_histogram,
    fiber_volume,
    lattice_orbit_count,
    smith_type,
    total_fiber_volume,
)
from hecke_orbital.profile import build_profile

Q2 = FieldSpec("p-adic", 2)
Q3 = FieldSpec("p-adic", 3)
F2T = FieldSpec("laurent", 2)


def chi(fs, *c):
    return CharPoly.from_ints(fs, list(c))


@pytest.mark.parametrize(
    "rows, d, k",
    [([[1, 0], [0, 2]], 1, (0, 1)), ([[2, 0], [0, 2]], 2, (1, 1)), ([[0, -2], [1, -2]], 1, (0, 1))],
)
def test_smith_type_examples(rows, d, k):
    X = TruncatedMatrix.from_scalars(Q2, 3, [[x % 8 for x in r] for r in rows])
    assert smith_type(X, d).k == k


def test_smith_type_errors():
    X = TruncatedMatrix.from_scalars(Q2, 2, [[0, 0], [0, 0]])
    with pytest.raises(PrecisionTooLow):
        smith_type(X, 1)
    X = TruncatedMatrix.from_scalars(Q2, 3, [[1, 0], [0, 4]])
    with pytest.raises(PreconditionError):
        smith_type(X, 1)


def test_fiber_volume_examples():
    assert fiber_volume(chi(Q2, 0, -2), (0, 1), 3).volume == Fraction(3, 4)
    assert fiber_volume(chi(Q2, 1, 1), (0, 0), 2).volume == Fraction(1, 2)
    rep = fiber_volume(chi(Q2, 0, 0, -2), (0, 0, 1), 2)
    assert rep.volume == Fraction(21, 32)
    assert rep.below_floor
    assert rep.volume * 2 ** (rep.N * 6) == rep.count


def test_negative_k1_is_rescaled():
    rep = fiber_volume(chi(Q2, 1, 1), (-1, 1))
    assert rep.shift == -1
    assert rep.volume == Fraction(3, 2)


def _naive_histogram(fs, c, N):
    """Enumerate every matrix over o/pi^N with plain Python scalars."""
    n = c.n
    size = fs.p**N
    elems = [fs.decode(i, N) for i in range(size)]
    target = [fs.encode(x, N) for x in c.coeffs]
    hist = Counter()
    d = int(fs.ord(c.coeffs[-1]))
    for entries in itertools.product(range(size), repeat=n * n):
        M = [[elems[entries[i * n + j]] for j in range(n)] for i in range(n)]
        if n == 2:
            tr = M[0][0] + M[1][1]
            det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
            got = [fs.encode(fs.zero - tr, N), fs.encode(det, N)]
        else:
            tr = M[0][0] + M[1][1] + M[2][2]
            s2 = (M[0][0] * M[1][1] - M[0][1] * M[1][0] + M[0][0] * M[2][2] - M[0][2] * M[2][0]
                  + M[1][1] * M[2][2] - M[1][2] * M[2][1])
            det = (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
                   - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
                   + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]))
            got = [fs.encode(fs.zero - tr, N), fs.encode(s2, N), fs.encode(fs.zero - det, N)]
        if got != target:
            continue
        X = TruncatedMatrix(fs, N, tuple(tuple(entries[i * n + j] for j in range(n)) for i in range(n)))
        hist[smith_type(X, d).k] += 1
    return dict(hist)


@pytest.mark.parametrize(
    "fs, coeffs, N",
    [(Q2, (0, -2), 2), (Q2, (2, 4), 3), (F2T, ([0, 1], [0, 1]), 2), (Q3, (0, -3), 2),
     (Q2, (0, 0, -2), 2), (F2T, ([0], [1], [1]), 1)],
)
def test_histogram_matches_naive_enumeration(fs, coeffs, N):
    c = CharPoly.from_ints(fs, list(coeffs))
    assert fiber_histogram(c, N) == _naive_histogram(fs, c, N)


@pytest.mark.parametrize("coeffs", [(0, -2), (2, 4), (1, 1), (0, 0, -2)])
def test_partition_sanity(coeffs):
    c = chi(Q2, *coeffs)
    N = 3
    prof = build_profile(c)
    types = fiber_histogram(c, N)
    assert all(sum(k) == prof.d for k in types)
    total = sum(fiber_volume(c, k, N, stabilize=False).volume for k in types)
    assert total == total_fiber_volume(c, N)


@pytest.mark.parametrize("fs, coeffs, a", [(Q2, (2, 4), 1), (Q3, (0, 9), 2), (Q2, (0, 0, -2), 1)])
def test_translation_preserves_fiber_size(fs, coeffs, a):
    c = CharPoly.from_ints(fs, list(coeffs))
    t = translate(c, fs.from_int(a))
    N = 2
    assert sum(fiber_histogram(c, N).values()) == sum(fiber_histogram(t, N).values())


def test_budget_and_precision():
    with pytest.raises(BudgetExceeded):
        fiber_volume(chi(Q2, 0, 4, 8), (0, 1, 2), 4)
    with pytest.raises(PrecisionTooLow):
        fiber_volume(chi(Q2, 2, 4), (0, 2), 2)


def test_stabilization_flag():
    rep = fiber_volume(chi(Q2, 0, 0, -2), (0, 0, 1), 3)
    assert rep.stabilized is True
    assert not rep.below_floor
    assert fiber_volume(chi(Q2, 1, 1), (0, 0), 1).stabilized is None


@pytest.mark.parametrize(
    "fs, coeffs, k, expected",
    [(Q2, (1, 1), (0, 0), 1), (Q2, (0, -2), (0, 1), 1), (Q2, (1, 1), (0, 1), 0), (Q2, (1, 1), (-1, 1), 3)],
)
def test_lattice_orbit_examples(fs, coeffs, k, expected):
    assert lattice_orbit_count(CharPoly.from_ints(fs, list(coeffs)), k) == expected


def test_lattice_window_unstable():
    with pytest.raises(WindowUnstable):
        lattice_orbit_count(chi(Q2, 1, 1), (-1, 1), window=1)
    with pytest.raises(PreconditionError):
        lattice_orbit_count(chi(Q2, 0, 0, -2), (0, 0, 1))


@pytest.mark.parametrize(
    "fs, coeffs",
    [(Q2, (2, 4)), (Q3, (0, 9)), (Q3, (3, 3)), (FieldSpec("p-adic", 5), (0, -50)),
     (FieldSpec("laurent", 3), ([0], [0, 1]))],
)
def test_orbit_count_times_conversion_is_fiber_volume(fs, coeffs):
    c = CharPoly.from_ints(fs, list(coeffs))
    prof = build_profile(c)
    phi = conversion_factor(prof).eval(fs.q)
    for k1 in range(0, prof.d // 2 + 1):
        k = (k1, prof.d - k1)
        orbits = lattice_orbit_count(c, k)
        assert orbits == so_hecke_quotient(prof, k).eval(fs.q)
        vol = fiber_volume(c, k).volume
        assert orbits * phi == vol == so_hecke_geometric(prof, k).eval(fs.q)
