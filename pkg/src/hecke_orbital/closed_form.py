"""Closed formulas for orbital integrals of Hecke basis functions on GL2 and GL3.

Every value is a :class:`~hecke_orbital.qvalue.QValue`, a rational function
in the residue field size ``q``; evaluate it at a concrete ``q`` with
``value.eval(q)``.  Profiles supply ``d``, ``S``, ``d'`` and ``epsilon``;
evaluators never recompute them.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator, Sequence

from .errors import (
    CharacteristicUnsupported,
    InternalCaseGap,
    NotIntegral,
    PreconditionError,
    ProfileInconsistent,
    ProvisoUnverified,
)
from .exact_base import rescale_poly
from .profile import RAMIFIED, UNRAMIFIED, GammaProfile, build_profile
from .qvalue import ONE, ZERO, Q, QValue, qpow

GEOMETRIC = "geometric"
QUOTIENT = "quotient"


class MeasureKind(Enum):
    GEOMETRIC = GEOMETRIC
    QUOTIENT = QUOTIENT

_GL3_CORE = (Q**3 - 1) * (Q**2 - 1)
_CUBIC = Q**2 + Q + 1


@dataclass(frozen=True)
class LatticeType:
    """Nondecreasing exponents ``(k_1, ..., k_n)`` of a Cartan cell."""

    k: tuple

    def __post_init__(self):
        k = tuple(int(x) for x in self.k)
        object.__setattr__(self, "k", k)
        if len(k) not in (2, 3):
            raise ValueError("types have length 2 or 3")
        if any(a > b for a, b in zip(k, k[1:])):
            raise ValueError(f"type {k} is not nondecreasing")

    @property
    def n(self) -> int:
        return len(self.k)

    def __iter__(self):
        return iter(self.k)

    def __getitem__(self, i):
        return self.k[i]

    def __len__(self):
        return len(self.k)

    def shifted(self, s: int) -> "LatticeType":
        return LatticeType(tuple(x - s for x in self.k))

    def __str__(self):
        return "(" + ",".join(str(x) for x in self.k) + ")"


def as_type(k) -> LatticeType:
    return k if isinstance(k, LatticeType) else LatticeType(tuple(k))


def admissible_types(n: int, d: int, k1_min: int = 0) -> Iterator[LatticeType]:
    """Types with ``sum k = d`` and ``k_1 >= k1_min``, ordered by ``k``."""
    k1 = k1_min
    while n * k1 <= d:
        if n == 2:
            yield LatticeType((k1, d - k1))
        else:
            k2 = k1
            while k2 <= (d - k1 - k2):
                yield LatticeType((k1, k2, d - k1 - k2))
                k2 += 1
        k1 += 1


def gl_order(n: int) -> QValue:
    """``#GL_n(F_q)``."""
    out = ONE
    for i in range(n):
        out = out * (Q**n - Q**i)
    return out


def torus_order(n: int, ram: str) -> QValue:
    return Q**n - 1 if ram == UNRAMIFIED else Q**n - Q ** (n - 1)


# ---------------------------------------------------------------------------
# M_n(o) indicator
# ---------------------------------------------------------------------------


def so_mn(profile: GammaProfile) -> QValue:
    n, S = profile.n, profile.S
    if n == 2:
        head = (Q + 1) / Q
        if profile.ram == UNRAMIFIED:
            return head - 2 / qpow(S + 1)
        return head - (Q + 1) / qpow(S + 2)
    return _so_m3(profile, d=0)


def _so_m3(profile: GammaProfile, d: int) -> QValue:
    """The three-line GL3 table; ``d = 0`` is the M_3(o) indicator, ``3 | d``
    the scalar type ``(d/3, d/3, d/3)``."""
    dp = profile.d_prime
    head = (Q + 1) * _CUBIC / qpow(3 + d)
    shift = 2 * d // 3
    if profile.epsilon == 0:
        return head - 3 * _CUBIC / qpow(dp + shift + 3) + 3 / qpow(3 * dp + 3)
    if profile.epsilon == 1:
        return head - (2 * Q + 1) * _CUBIC / qpow(dp + shift + 4) + _CUBIC / qpow(3 * dp + 5)
    if profile.epsilon == 2:
        return head - (Q + 2) * _CUBIC / qpow(dp + shift + 4) + _CUBIC / qpow(3 * dp + 6)
    raise InternalCaseGap(f"epsilon={profile.epsilon}")


# ---------------------------------------------------------------------------
# Geometric measure
# ---------------------------------------------------------------------------


def _linear(m: int) -> QValue:
    """``(m+1) q - (m-1)``."""
    return (m + 1) * Q - (m - 1)


def case3_bracket(d: int, d_prime: int, k1: int, epsilon: int) -> QValue:
    """``F(d, d', k1) + epsilon`` of the middle GL3 type."""
    third = d // 3
    e = d_prime - third
    if e < 0:
        raise ProfileInconsistent(f"d'={d_prime} < d/3={third}")
    geom = Q * 3 * sum((qpow(i) for i in range(e)), ZERO)  # 3q (q^e - 1)/(q - 1)
    return (third - k1 + 1) * qpow(e + 1) - (third - k1 - 1) * qpow(e) + geom + epsilon


def so_hecke_geometric(profile: GammaProfile, k) -> QValue:
    k = as_type(k)
    if k.n != profile.n:
        raise ValueError("type length must equal n")
    d = profile.d
    if sum(k) != d:
        return ZERO
    if profile.n == 2:
        k1, k2 = k
        if 2 * k1 < d:
            return qpow(-k1) * (Q**2 - 1) / Q**2
        if k1 == k2:
            head = (Q + 1) / qpow(d // 2 + 1)
            if profile.ram == UNRAMIFIED:
                return head - 2 / qpow(profile.S + 1)
            return head - (Q + 1) / qpow(profile.S + 2)
        raise InternalCaseGap(f"GL2 type {k} with d={d}")
    k1, k2, k3 = k
    if k1 == k2 == k3:
        return _so_m3(profile, d)
    if k1 == k2 < k3:
        return qpow(-3 * k1 - 5) * _GL3_CORE
    if k1 < k2 == k3:
        return qpow(k2 - k1 - d - 5) * _GL3_CORE
    if k1 < k2 < k3:
        pref = qpow(k3 - k1 - d - 6) * _GL3_CORE
        if 3 * k2 < d:
            return pref * _linear(k2 - k1)
        if 3 * k2 > d:
            return pref * _linear(k3 - k2)
        if 3 * k2 == d:
            bracket = case3_bracket(d, profile.d_prime, k1, profile.epsilon)
            return _GL3_CORE / qpow(2 * k1 + profile.d_prime + 6) * bracket
    raise InternalCaseGap(f"GL3 type {k} with d={d}")


def stratification_sum(profile: GammaProfile) -> QValue:
    return sum((so_hecke_geometric(profile, k) for k in admissible_types(profile.n, profile.d)), ZERO)


# ---------------------------------------------------------------------------
# Quotient measure
# ---------------------------------------------------------------------------


def _check_characteristic(profile: GammaProfile):
    ch = profile.characteristic
    if ch not in (None, 0) and ch <= profile.n:
        raise CharacteristicUnsupported(
            f"quotient measure needs char(F) = 0 or > {profile.n}; got char {ch}"
        )


def conversion_factor(profile: GammaProfile) -> QValue:
    """``phi`` with ``geometric = phi * quotient``."""
    _check_characteristic(profile)
    n = profile.n
    group = gl_order(n) / qpow(n * n)
    torus = torus_order(n, profile.ram) / qpow(n)
    return qpow(-profile.S) * group / torus


def so_hecke_quotient(profile: GammaProfile, k) -> QValue:
    _check_characteristic(profile)
    k = as_type(k)
    d, S = profile.d, profile.S
    unram = profile.ram == UNRAMIFIED
    if sum(k) != d:
        return ZERO
    if profile.n == 2:
        k1, k2 = k
        if 2 * k1 < d:
            return (Q + 1) * qpow(S - k1 - 1) if unram else qpow(S - k1)
        if k1 == k2:
            e = S - d // 2
            if unram:
                return (Q + 1) / (Q - 1) * (qpow(e) - 1) + 1
            return (Q * qpow(e) - 1) / (Q - 1)
        raise InternalCaseGap(f"GL2 type {k} with d={d}")
    k1, k2, k3 = k
    dp, eps = profile.d_prime, profile.epsilon

    def weighted(expo_unram: int, expo_ram: int) -> QValue:
        return qpow(expo_unram) * _CUBIC if unram else qpow(expo_ram)

    if k1 == k2 == k3:
        bottom = (Q + 1) * (Q - 1) ** 2
        third = d // 3
        if eps == 0:
            return (qpow(3 * dp - d) * _CUBIC / (Q - 1) ** 2
                    - 3 * qpow(2 * dp - 2 * third) * _CUBIC / bottom + 3 / bottom)
        if eps == 1:
            return (qpow(3 * dp - d + 2) / (Q - 1) ** 2
                    - qpow(2 * dp - 2 * third + 1) * (2 * Q + 1) / bottom + 1 / bottom)
        return (qpow(3 * dp - d + 3) / (Q - 1) ** 2
                - qpow(2 * dp - 2 * third + 2) * (Q + 2) / bottom + 1 / bottom)
    if k1 == k2 < k3:
        return weighted(S - 3 * k1 - 2, S - 3 * k1)
    if k1 < k2 == k3:
        return weighted(S + k2 - k1 - d - 2, S + k2 - k1 - d)
    if k1 < k2 < k3:
        if 3 * k2 != d:
            m = k2 - k1 if 3 * k2 < d else k3 - k2
            return weighted(S + k3 - k1 - d - 3, S + k3 - k1 - d - 1) * _linear(m)
        bracket = case3_bracket(d, dp, k1, eps)
        if unram:
            return qpow(2 * dp - 2 * k1 - 3) * _CUBIC * bracket
        return qpow(S - 2 * k1 - dp - 1) * bracket
    raise InternalCaseGap(f"GL3 type {k} with d={d}")


def so_hecke(profile: GammaProfile, k, measure=GEOMETRIC) -> QValue:
    """Dispatch on ``measure`` (a :class:`MeasureKind` or its string value)."""
    kind = MeasureKind(measure.value if isinstance(measure, MeasureKind) else measure)
    if kind is MeasureKind.GEOMETRIC:
        return so_hecke_geometric(profile, k)
    return so_hecke_quotient(profile, k)


# ---------------------------------------------------------------------------
# Structural identities
# ---------------------------------------------------------------------------


def reduce_type(profile: GammaProfile, k):
    """Rescale ``gamma`` by ``pi^{k_1}``; returns ``(profile', k - k_1, scale)``.

    ``so_hecke_geometric(profile, k) == scale * so_hecke_geometric(profile', k')``.
    """
    k = as_type(k)
    n = profile.n
    k1 = k[0]
    weight = n * (n - 1) // 2
    scale = qpow(-k1 * weight)
    if profile.chi is not None:
        try:
            chi2 = rescale_poly(profile.chi, k1)
        except NotIntegral:
            raise
        new = build_profile(chi2)
    else:
        if n * k1 > profile.d:
            raise NotIntegral(f"c_n / pi^(n k1) is not integral for k1={k1}, d={profile.d}")
        new = replace(
            profile,
            d=profile.d - n * k1,
            S=profile.S - k1 * weight,
            witness_da=profile.witness_da - n * k1,
            d_prime=None,
            epsilon=None,
            delta_ord=None if profile.delta_ord is None else profile.delta_ord - n * (n - 1) * k1,
        )
    return new, k.shifted(k1), scale


def corner_formula(profile: GammaProfile, k_n: int) -> QValue:
    n = profile.n
    if k_n != profile.d or k_n <= 0:
        raise PreconditionError("corner formula needs k_n = d > 0")
    return gl_order(n) / ((Q - 1) * qpow(n * n - 1))


def partial_type_formula(d: int, k2: int, k3: int, proviso: bool = False) -> QValue:
    """GL3 value at type ``(0, k2, k3)`` for an element with ``ord det = d > 0``.

    The type ``(0, d/3, 2d/3)`` is only available when the caller asserts
    that the rescaled reduction is irreducible (``proviso=True``).
    """
    if d <= 0 or k2 + k3 != d or not 0 < k2 <= k3:
        raise PreconditionError(f"partial type (0,{k2},{k3}) with d={d}")
    if k2 == k3:
        return _GL3_CORE / qpow(5 + d) * qpow(k2)
    if 3 * k2 == d:
        if not proviso:
            raise ProvisoUnverified("(0, d/3, 2d/3) needs an irreducible rescaled reduction")
        return _GL3_CORE * qpow(2 * d // 3) * _linear(d // 3) / qpow(6 + d)
    if 3 * k2 < d:
        return _GL3_CORE * qpow(k3) * _linear(k2) / qpow(6 + d)
    return _GL3_CORE * qpow(k3) * _linear(k3 - k2) / qpow(6 + d)


@dataclass(frozen=True)
class Case3Derivation:
    d_dag: int
    d_dag_a: int
    rhs_sum: QValue
    rhs_closed: QValue
    lhs_partial: QValue
    lhs_closed: QValue
    middle: QValue
    value: QValue


def _series(top: int, lo: int) -> QValue:
    """``3 q^(top-1) + ... + 3 q^lo`` (empty when ``lo >= top``)."""
    return 3 * sum((qpow(e) for e in range(lo, top)), ZERO)


def derive_case3(profile: GammaProfile, k1: int) -> Case3Derivation:
    """Re-derive the middle GL3 type ``(k1, d/3, 2d/3 - k1)`` through translation."""
    if profile.n != 3:
        raise PreconditionError("derive_case3 is GL3 only")
    d = profile.d
    d_dag = d - 3 * k1
    if d % 3 or d_dag <= 0:
        raise PreconditionError(f"need 3 | d and d - 3 k1 > 0 (d={d}, k1={k1})")
    d_dag_a = 3 * profile.d_prime - 3 * k1 + profile.epsilon
    if d_dag_a < d_dag:
        raise ProfileInconsistent("translated determinant order below d")
    rhs = ZERO
    for i in range(1, d_dag_a // 2 + 1):
        rhs = rhs + partial_type_formula(d_dag_a, i, d_dag_a - i, proviso=True)
    fl = d_dag_a // 3
    rhs_closed = _GL3_CORE / qpow(6 + d_dag_a) * (
        2 * qpow(d_dag_a) + _series(d_dag_a, d_dag_a - fl + 1) + (d_dag_a - 3 * fl) * qpow(d_dag_a - fl)
    )
    lhs = ZERO
    for j in range(1, d_dag // 2 + 1):
        if 3 * j == d_dag:
            continue
        lhs = lhs + partial_type_formula(d_dag, j, d_dag - j)
    third = d_dag // 3
    lhs_closed = _GL3_CORE / qpow(6 + d_dag) * (
        2 * qpow(d_dag) + _series(d_dag, 2 * third + 1) - qpow(2 * third) * _linear(third)
    )
    middle = rhs - lhs
    return Case3Derivation(d_dag, d_dag_a, rhs, rhs_closed, lhs, lhs_closed, middle,
                           qpow(-3 * k1) * middle)


def translation_sums(profile: GammaProfile):
    """Both sides of the translation identity for a GL3 profile with ``d > 0``.

    Left: ``sum_j SO(1_{D(0,j,d-j)})`` from the main table.  Right: the same
    sum at ``d_a`` for ``gamma - a I``, from the partial-type table.
    """
    if profile.n != 3 or profile.d <= 0:
        raise PreconditionError("translation identity needs n = 3 and d > 0")
    d, da = profile.d, profile.witness_da
    lhs = sum((so_hecke_geometric(profile, (0, j, d - j)) for j in range(1, d // 2 + 1)), ZERO)
    rhs = sum((partial_type_formula(da, i, da - i, proviso=True) for i in range(1, da // 2 + 1)),
              ZERO)
    return lhs, rhs


def so_per_lattice(profile: GammaProfile, k) -> QValue:
    """Contribution of a single lattice of type ``k``: ``SO / c(k)``."""
    from .lattices import count_lattices_of_type

    k = as_type(k)
    value = so_hecke_geometric(profile, k)
    if value.is_zero():
        return ZERO
    return value / count_lattices_of_type(None, k.k)
