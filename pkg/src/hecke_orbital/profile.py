"""Invariants of an elliptic characteristic polynomial.

For an irreducible monic ``chi`` of degree ``n`` with root ``alpha`` in
``E = F[x]/(chi)`` we have ``ord(chi(a)) = n * v(a - alpha)`` for every
``a`` in ``o`` (all conjugates of ``alpha`` are equidistant from ``a``).
So ``d_a`` is maximised by the integral ``a`` closest to ``alpha``, and
the set of ``a`` with ``v(a - alpha) >= m`` is a single residue class mod
``pi^m``.  :func:`find_witness` walks that class digit by digit.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Iterator, Optional

from .errors import (
    DegenerateInput,
    NotElliptic,
    ParityViolation,
    ProfileInconsistent,
    RootSearchInconclusive,
    WitnessNotFound,
)
from .exact_base import (
    INF,
    CharPoly,
    FieldSpec,
    Scalar,
    disc_valuation,
    eval_descending,
    poly_eval,
    reduce_mod,
    rescale_poly,
    residue_irreducible,
    translate,
)

log = logging.getLogger(__name__)

UNRAMIFIED = "unramified"
RAMIFIED = "ramified"


# ---------------------------------------------------------------------------
# Ellipticity
# ---------------------------------------------------------------------------


def assert_elliptic(chi: CharPoly, fs: Optional[FieldSpec] = None) -> bool:
    """True iff ``chi`` has no root in ``o``.

    Roots are searched digit by digit up to depth ``2*ord(disc)+1``.  A
    candidate ``r`` with ``ord chi(r) > 2 ord chi'(r)`` lifts to a root by
    Hensel's lemma, which certifies reducibility.
    """
    fs = fs or chi.fs
    dv = disc_valuation(chi)
    bound = 2 * dv + 1
    deriv = chi.derivative()
    frontier = [fs.zero]
    for m in range(bound):
        nxt = []
        step = fs.pi_pow(m)
        for r in frontier:
            for digit in range(fs.p):
                cand = r + fs.from_int(digit) * step
                val = fs.ord(poly_eval(chi, cand))
                if val < m + 1:
                    continue
                dval = fs.ord(eval_descending(deriv, cand, fs.zero))
                if val == INF or val > 2 * dval:
                    log.debug("Hensel certificate for a root near %r", cand)
                    return False
                nxt.append(cand)
        frontier = nxt
        if not frontier:
            return True
    raise RootSearchInconclusive(
        f"{len(frontier)} root candidate(s) survive to depth {bound} without a Hensel certificate"
    )


# ---------------------------------------------------------------------------
# Translation witness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessSearchReport:
    depth: int
    frontier_sizes: tuple
    digits: tuple
    d_a: int
    residual: Optional[tuple]

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "frontier_sizes": list(self.frontier_sizes),
            "digits": list(self.digits),
            "d_a": self.d_a,
            "residual": None if self.residual is None else list(self.residual),
        }


def find_witness(chi: CharPoly, fs: Optional[FieldSpec] = None):
    """Return ``(a, d_a, ram, report)`` for an elliptic ``chi``.

    Ties between residues reaching the same ``d_a`` are broken by the
    smallest digit string.
    """
    fs = fs or chi.fs
    n = chi.n
    cap = disc_valuation(chi) + 2
    prefix: list[int] = []
    sizes = [1]
    for m in range(cap + 1):
        step = fs.pi_pow(m)
        base = fs.from_digits(prefix) if prefix else fs.zero
        best = None
        survivor = None
        for digit in range(fs.p):
            cand = base + fs.from_int(digit) * step
            val = fs.ord(poly_eval(chi, cand))
            if val == INF:
                raise WitnessNotFound("chi has a root in o (not elliptic)")
            if val >= n * (m + 1):
                if survivor is not None:
                    raise WitnessNotFound("frontier split; chi is not elliptic")
                survivor = digit
            if best is None or val > best[0]:
                best = (int(val), digit)
        if survivor is None:
            d_a, digit = best
            digits = tuple(prefix + [digit])
            a = fs.from_digits(digits)
            ram, residual = _classify(chi, a, d_a)
            report = WitnessSearchReport(m + 1, tuple(sizes), digits, d_a, residual)
            return a, d_a, ram, report
        prefix.append(survivor)
        sizes.append(1)
    raise WitnessNotFound(f"witness search reached depth cap {cap} undecided")


def _classify(chi: CharPoly, a: Scalar, d_a: int):
    n = chi.n
    shifted = translate(chi, a)
    residual = reduce_mod(rescale_poly(shifted, d_a // n))
    if d_a % n:
        return RAMIFIED, residual
    if not residue_irreducible(residual, chi.fs.p):
        raise WitnessNotFound(
            f"maximal d_a={d_a} is divisible by n but the rescaled reduction {residual} is reducible"
        )
    return UNRAMIFIED, residual


def serre_invariant(witness_da: int, ram: str, n: int) -> int:
    top = witness_da * (n - 1) if ram == UNRAMIFIED else (witness_da - 1) * (n - 1)
    if top % 2:
        raise ParityViolation(f"S = {top}/2 is not an integer")
    return top // 2


def serre_crosscheck(chi: CharPoly, ram: str, fs: Optional[FieldSpec] = None) -> Optional[int]:
    """Serre invariant from the discriminant (tame case only).

    ``ord(disc chi) = ord(disc E/F) + 2 S`` and a tamely ramified extension
    of degree ``n`` with ramification ``e`` has ``ord(disc E/F) = n - n/e``,
    which for ``n`` prime is ``e - 1``.  Returns ``None`` when ``p <= n``.
    """
    fs = fs or chi.fs
    n = chi.n
    if fs.p <= n:
        return None
    e = 1 if ram == UNRAMIFIED else n
    top = disc_valuation(chi) - (e - 1)
    if top % 2 or top < 0:
        raise ParityViolation(f"discriminant route gives S = {top}/2")
    return top // 2


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------


def _derived_n3(S: int, ram: str):
    d_prime = S // 3
    r = S - 3 * d_prime
    if ram == UNRAMIFIED:
        if r != 0:
            raise ProfileInconsistent("unramified cubic needs 3 | S")
        return d_prime, 0
    if r == 2:
        raise ProfileInconsistent("ramified cubic cannot have S = 2 mod 3")
    return d_prime, 1 + r


@dataclass(frozen=True)
class GammaProfile:
    """Every invariant of ``gamma`` the closed formulas read."""

    n: int
    d: int
    ram: str
    S: int
    witness_da: int
    q: Optional[int] = None
    delta_ord: Optional[int] = None
    d_prime: Optional[int] = None
    epsilon: Optional[int] = None
    witness_a: Optional[Scalar] = None
    characteristic: Optional[int] = None
    chi: Optional[CharPoly] = field(default=None, compare=False)
    report: Optional[WitnessSearchReport] = field(default=None, compare=False)

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ProfileInconsistent("n must be 2 or 3")
        if self.ram not in (UNRAMIFIED, RAMIFIED):
            raise ProfileInconsistent(f"bad ramification class {self.ram!r}")
        if self.d < 0 or self.S < 0:
            raise ProfileInconsistent("d and S must be nonnegative")
        if self.witness_da < self.d:
            raise ProfileInconsistent("witness d_a must be >= d")
        divisible = self.witness_da % self.n == 0
        if divisible != (self.ram == UNRAMIFIED):
            raise ProfileInconsistent("n | d_a must hold exactly in the unramified case")
        if serre_invariant(self.witness_da, self.ram, self.n) != self.S:
            raise ProfileInconsistent("S disagrees with the witness d_a")
        if self.ram == UNRAMIFIED and self.d % self.n:
            raise ProfileInconsistent("unramified gamma has n | d")
        if self.ram == RAMIFIED and self.d % self.n and self.witness_da != self.d:
            raise ProfileInconsistent("ramified gamma with n not dividing d has d_a = d")
        if self.n == 3:
            dp, eps = _derived_n3(self.S, self.ram)
            if self.d_prime is None or self.epsilon is None:
                object.__setattr__(self, "d_prime", dp)
                object.__setattr__(self, "epsilon", eps)
            elif (self.d_prime, self.epsilon) != (dp, eps):
                raise ProfileInconsistent("d' / epsilon disagree with S")

    @property
    def symbolic(self) -> bool:
        return self.q is None

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "q": self.q,
            "d": self.d,
            "delta_ord": self.delta_ord,
            "ram": self.ram,
            "S": self.S,
            "d_prime": self.d_prime,
            "epsilon": self.epsilon,
            "witness_da": self.witness_da,
        }
        if self.chi is not None and self.witness_a is not None:
            out["witness_a"] = self.chi.fs.format_scalar(self.witness_a)
        if self.report is not None:
            out["witness_search"] = self.report.to_json()
        return out


def symbolic_profile(n: int, d: int, ram: str, witness_da: Optional[int] = None,
                     q: Optional[int] = None, characteristic: Optional[int] = None) -> GammaProfile:
    """A profile without an underlying polynomial; ``witness_da`` defaults to
    the smallest value consistent with ``(n, d, ram)``."""
    if witness_da is None:
        witness_da = d
        if ram == RAMIFIED and d % n == 0:
            witness_da = d + 1
    S = serre_invariant(witness_da, ram, n)
    return GammaProfile(n=n, d=d, ram=ram, S=S, witness_da=witness_da, q=q,
                        characteristic=characteristic)


def profile_from_serre(n: int, d: int, ram: str, S: int, **kw) -> GammaProfile:
    if ram == UNRAMIFIED:
        top = 2 * S
        if top % (n - 1):
            raise ProfileInconsistent("S incompatible with an unramified witness")
        da = top // (n - 1)
    else:
        top = 2 * S
        if top % (n - 1):
            raise ProfileInconsistent("S incompatible with a ramified witness")
        da = top // (n - 1) + 1
    return symbolic_profile(n, d, ram, witness_da=da, **kw)


def profile_grid(max_d: int = 9, extra: int = 9) -> Iterator[GammaProfile]:
    """All consistent symbolic profiles with ``d <= max_d`` and ``d_a <= d + extra``."""
    for n in (2, 3):
        for d in range(max_d + 1):
            for da in range(d, d + extra + 1):
                for ram in (UNRAMIFIED, RAMIFIED):
                    try:
                        yield symbolic_profile(n, d, ram, witness_da=da)
                    except (ProfileInconsistent, ParityViolation):
                        continue


def build_profile(chi: CharPoly, fs: Optional[FieldSpec] = None) -> GammaProfile:
    fs = fs or chi.fs
    if not assert_elliptic(chi, fs):
        raise NotElliptic(f"{chi} has a root in o")
    a, d_a, ram, report = find_witness(chi, fs)
    S = serre_invariant(d_a, ram, chi.n)
    d = fs.ord(chi.coeffs[-1])
    if d == INF:
        raise DegenerateInput("constant coefficient vanishes")
    return GammaProfile(
        n=chi.n, d=int(d), ram=ram, S=S, witness_da=d_a, q=fs.q,
        delta_ord=disc_valuation(chi), witness_a=a,
        characteristic=fs.characteristic, chi=chi, report=report,
    )


def with_q(profile: GammaProfile, q: Optional[int]) -> GammaProfile:
    return replace(profile, q=q)
