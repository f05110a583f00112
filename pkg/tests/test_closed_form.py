from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hecke_orbital.closed_form import (
    LatticeType,
    MeasureKind,
    admissible_types,
    case3_bracket,
    conversion_factor,
    corner_formula,
    derive_case3,
    partial_type_formula,
    reduce_type,
    so_hecke,
    so_hecke_geometric,
    so_hecke_quotient,
    so_mn,
    so_per_lattice,
    stratification_sum,
    translation_sums,
)
from hecke_orbital.errors import (
    CharacteristicUnsupported,
    NotIntegral,
    PreconditionError,
    ProfileInconsistent,
    ProvisoUnverified,
)
from hecke_orbital.exact_base import CharPoly, FieldSpec
from hecke_orbital.profile import (
    RAMIFIED,
    UNRAMIFIED,
    build_profile,
    profile_from_serre,
    profile_grid,
    symbolic_profile,
)
from hecke_orbital.qvalue import ZERO, Q, qpow

Q2 = FieldSpec("p-adic", 2)
GRID = list(profile_grid())


@pytest.fixture(scope="module")
def cubic():
    return build_profile(CharPoly.from_ints(Q2, [0, 4, 8]))


def test_lattice_type_validation():
    with pytest.raises(ValueError):
        LatticeType((1, 0))
    assert LatticeType((-1, 0, 2)).shifted(-1).k == (0, 1, 3)


def test_admissible_types():
    assert [t.k for t in admissible_types(3, 3)] == [(0, 0, 3), (0, 1, 2), (1, 1, 1)]
    assert [t.k for t in admissible_types(2, 0, -2)] == [(-2, 2), (-1, 1), (0, 0)]


def test_so_mn_examples(cubic):
    assert so_mn(symbolic_profile(2, 0, UNRAMIFIED)) == (Q - 1) / Q
    assert so_mn(symbolic_profile(2, 0, UNRAMIFIED)).eval(2) == Fraction(1, 2)
    assert so_mn(profile_from_serre(3, 1, RAMIFIED, 0)).eval(2) == Fraction(21, 32)
    assert so_mn(cubic).eval(2) == Fraction(87, 64)


def test_geometric_examples(cubic):
    assert so_hecke_geometric(symbolic_profile(2, 1, RAMIFIED), (0, 1)).eval(2) == Fraction(3, 4)
    assert so_hecke_geometric(cubic, (0, 1, 2)).eval(2) == Fraction(21, 32)
    assert so_hecke_geometric(cubic, (1, 1, 1)).eval(2) == Fraction(3, 64)
    assert so_hecke_geometric(symbolic_profile(2, 9, RAMIFIED), (3, 7)).is_zero()
    assert so_hecke_geometric(cubic, (0, 0, 2)).is_zero()


def test_quotient_examples():
    assert so_hecke_quotient(symbolic_profile(2, 0, UNRAMIFIED), (0, 0)) == 1
    prof = profile_from_serre(2, 4, UNRAMIFIED, 3)
    assert so_hecke_quotient(prof, (1, 3)) == (Q + 1) * qpow(3 - 1 - 1)
    f2 = build_profile(CharPoly.from_ints(FieldSpec("laurent", 2), [[0], [0], [0, 1]]))
    with pytest.raises(CharacteristicUnsupported):
        so_hecke_quotient(f2, (0, 0, 1))
    # the geometric path has no characteristic restriction
    assert so_hecke_geometric(f2, (0, 0, 1)).eval(2) == Fraction(21, 32)


def test_measure_dispatch(cubic):
    assert so_hecke(cubic, (1, 1, 1), MeasureKind.QUOTIENT) == so_hecke(cubic, (1, 1, 1), "quotient")


def test_conversion_factor_examples():
    assert conversion_factor(symbolic_profile(2, 0, UNRAMIFIED)) == (Q - 1) / Q
    prof = profile_from_serre(2, 4, UNRAMIFIED, 3)
    assert conversion_factor(prof) == qpow(-3) * (Q - 1) / Q
    ram3 = profile_from_serre(3, 1, RAMIFIED, 0)
    expected = (Q**3 - 1) * (Q**3 - Q) * (Q**3 - Q**2) / qpow(9) * qpow(3) / (Q**3 - Q**2)
    assert conversion_factor(ram3) == expected


def test_reduce_type_examples():
    p2 = profile_from_serre(2, 6, UNRAMIFIED, 4)
    new, k, scale = reduce_type(p2, (3, 3))
    assert k.k == (0, 0) and scale == qpow(-3) and new.S == p2.S - 3
    p3 = profile_from_serre(3, 3, UNRAMIFIED, 3)
    new, k, scale = reduce_type(p3, (1, 1, 1))
    assert k.k == (0, 0, 0) and scale == qpow(-3) and new.S == 0
    new, k, scale = reduce_type(symbolic_profile(2, 1, RAMIFIED), (-1, 2))
    assert k.k == (0, 3) and scale == Q
    with pytest.raises(NotIntegral):
        reduce_type(build_profile(CharPoly.from_ints(Q2, [0, -2])), (1, 1))


def test_reduce_type_recomputes_arithmetic_profiles(cubic):
    new, k, scale = reduce_type(cubic, (1, 1, 1))
    assert new.chi == CharPoly.from_ints(Q2, [0, 1, 1])
    assert (new.d, new.S) == (0, 0)
    assert so_hecke_geometric(cubic, (1, 1, 1)) == scale * so_hecke_geometric(new, k)


def test_per_lattice_examples():
    assert so_per_lattice(symbolic_profile(2, 1, RAMIFIED), (0, 1)) == (Q - 1) / Q**2
    assert so_per_lattice(symbolic_profile(3, 1, RAMIFIED), (0, 0, 1)) == (Q - 1) * (Q**2 - 1) / qpow(5)
    assert so_per_lattice(symbolic_profile(3, 1, RAMIFIED), (0, 0, 2)).is_zero()


def test_corner_formula():
    p2 = symbolic_profile(2, 1, RAMIFIED)
    assert corner_formula(p2, 1) == (Q**2 - 1) / Q**2
    p3 = symbolic_profile(3, 1, RAMIFIED)
    assert corner_formula(p3, 1) == (Q**3 - 1) * (Q**2 - 1) / qpow(5)
    assert corner_formula(p3, 1).eval(2) == Fraction(21, 32)
    with pytest.raises(PreconditionError):
        corner_formula(symbolic_profile(3, 0, UNRAMIFIED), 0)


def test_partial_type_formula():
    core = (Q**3 - 1) * (Q**2 - 1)
    assert partial_type_formula(4, 2, 2) == core / qpow(9) * qpow(2)
    assert partial_type_formula(7, 2, 5) == core * qpow(5) * (3 * Q - 1) / qpow(13)
    assert partial_type_formula(6, 2, 4, proviso=True) == core * qpow(4) * (3 * Q - 1) / qpow(12)
    with pytest.raises(ProvisoUnverified):
        partial_type_formula(6, 2, 4)
    with pytest.raises(PreconditionError):
        partial_type_formula(0, 0, 0)


def test_derive_case3_examples(cubic):
    r = derive_case3(cubic, 0)
    assert r.value.eval(2) == Fraction(21, 32)
    assert r.value == so_hecke_geometric(cubic, (0, 1, 2))
    with pytest.raises(PreconditionError):
        derive_case3(symbolic_profile(3, 2, RAMIFIED), 0)
    # d-dagger = 3 with an unramified witness at d_a = 3: both sums agree identically
    p = profile_from_serre(3, 3, UNRAMIFIED, 3)
    r = derive_case3(p, 0)
    assert (r.d_dag, r.d_dag_a) == (3, 3)
    assert r.rhs_sum == r.lhs_partial + r.middle


def test_case3_requires_d_prime_at_least_third():
    with pytest.raises(ProfileInconsistent):
        case3_bracket(6, 1, 0, 0)


def test_stratification_examples(cubic):
    assert stratification_sum(cubic).eval(2) == Fraction(87, 64)
    assert stratification_sum(cubic) == so_mn(cubic)
    p0 = symbolic_profile(2, 0, UNRAMIFIED)
    assert stratification_sum(p0) == so_mn(p0)


@pytest.mark.parametrize("profile", GRID, ids=lambda p: f"n{p.n}-d{p.d}-{p.ram[0]}-S{p.S}")
def test_grid_identities(profile):
    assert stratification_sum(profile) == so_mn(profile)
    phi = conversion_factor(profile)
    for k in admissible_types(profile.n, profile.d, -1):
        g = so_hecke_geometric(profile, k)
        qv = so_hecke_quotient(profile, k)
        assert g == phi * qv
        assert g.is_product_form() and qv.is_product_form()
        for q in (2, 3, 4, 5, 7, 8, 9):
            assert g.eval(q) >= 0
            val = qv.eval(q)
            assert val >= 0 and val.denominator == 1
        if k[0] >= 0 and k[0] * profile.n <= profile.d:
            new, kk, scale = reduce_type(profile, k)
            assert g == scale * so_hecke_geometric(new, kk)
    if profile.n == 3 and profile.d > 0:
        lhs, rhs = translation_sums(profile)
        assert lhs == rhs


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([p for p in GRID if p.n == 3 and p.d % 3 == 0 and p.d > 0]), st.data())
def test_derive_case3_matches_closed_form(profile, data):
    k1 = data.draw(st.integers(0, profile.d // 3 - 1))
    r = derive_case3(profile, k1)
    assert r.rhs_sum == r.rhs_closed
    assert r.lhs_partial == r.lhs_closed
    assert r.value == so_hecke_geometric(profile, (k1, profile.d // 3, 2 * profile.d // 3 - k1))


def test_off_hyperplane_is_zero():
    for p in GRID[:20]:
        k = (0,) * (p.n - 1) + (p.d + 1,)
        assert so_hecke_geometric(p, k) == ZERO
        assert so_hecke_quotient(p, k) == ZERO
