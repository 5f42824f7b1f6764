"""Conditioning, the zero-location bound, and the well-posedness verdict.

A problem is well-posed for a direction ``a`` iff it is well-conditioned
for ``a`` and its nonzero zeros approach

    E(a) = {rho : Re(a rho^3) >= 0}

at rate ``O(k^-2)``. ``E`` is taken closed, so zeros on its boundary rays
have distance zero. ``E(+i)`` and ``E(-i)`` are each a union of three
closed sectors of opening ``pi/3``; together they cover the plane.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .chardet import OMEGA, CanonicalForm, bracket_eval, canonical_form, relative_residual
from .problem import COUPLED, LEFT, PLUS_I, MINUS_I, RIGHT, Direction, ProblemSpec
from .zeros import DEFAULT_RESIDUAL_TOL, ZeroRecord, zero_table


class ClassLabel(str, Enum):
    I = "I"
    II = "II"
    III = "III"
    IVa = "IVa"
    IVb = "IVb"
    IVc = "IVc"

    def __str__(self):
        return self.value


# (conditioned, bound) per direction, straight from the class definitions
CLASS_TABLE = {
    ClassLabel.I: {"+i": (False, True), "-i": (False, True)},
    ClassLabel.II: {"+i": (True, True), "-i": (False, False)},
    ClassLabel.III: {"+i": (False, False), "-i": (True, True)},
    ClassLabel.IVa: {"+i": (True, True), "-i": (True, False)},
    ClassLabel.IVb: {"+i": (True, True), "-i": (True, True)},
    ClassLabel.IVc: {"+i": (True, False), "-i": (True, True)},
}


def classify(cf: CanonicalForm) -> ClassLabel:
    if cf.form != "IV":
        return ClassLabel(cf.form)
    y = abs(cf.Y)
    if y < 1:
        return ClassLabel.IVa
    return ClassLabel.IVb if y == 1 else ClassLabel.IVc


def conditioning(cf: CanonicalForm) -> tuple[bool, bool]:
    """``(conditioned for a = +i, conditioned for a = -i)`` by form."""
    return {
        "I": (False, False),
        "II": (True, False),
        "III": (False, True),
        "IV": (True, True),
    }[cf.form]


# -- zero-location bound ---------------------------------------------------------

def distance_to_E(z: complex, a: Direction) -> float:
    """Distance from ``z`` to the closed region ``Re(a rho^3) >= 0``."""
    a = Direction.parse(a)
    r = abs(z)
    if r == 0:
        return 0.0
    theta = math.atan2(z.imag, z.real) % (2 * math.pi)
    if -a.sign * math.sin(3 * theta) >= 0:
        return 0.0
    sixth = math.pi / 3
    phi = theta % sixth
    # boundary rays sit at multiples of pi/3; phi < pi/3 so projections are positive
    return r * math.sin(min(phi, sixth - phi))


@dataclass(frozen=True)
class BoundConfig:
    """Finite-sample thresholds standing in for the asymptotic ``O(k^-2)`` test."""

    tail_start: int = 3
    small_start: int = 5
    small_tol: float = 1e-6
    slack: float = 1e-9
    min_zeros: int = 5


def _indexed(zeros: Iterable[ZeroRecord]) -> dict[str, dict[int, list[complex]]]:
    out: dict[str, dict[int, list[complex]]] = {}
    for z in zeros:
        if z.k < 1:
            continue
        out.setdefault(z.family, {}).setdefault(z.k, []).append(z.value)
    return out


def bound_sequence(zeros: Iterable[ZeroRecord], a: Direction) -> dict[str, list[tuple[int, float]]]:
    """Per family, ``(k, d_k)`` with ``d_k`` the largest distance over rotations."""
    a = Direction.parse(a)
    return {
        fam: [(k, max(distance_to_E(v, a) for v in vals)) for k, vals in sorted(byk.items())]
        for fam, byk in _indexed(zeros).items()
    }


def zero_bound_check(zeros: Sequence[ZeroRecord], a: Direction, config: BoundConfig = BoundConfig()) -> bool:
    """Whether the zeros approach ``E(a)`` at rate ``O(k^-2)``.

    Passes when ``k^2 d_k`` is non-increasing for ``k >= tail_start``,
    or when ``d_k < small_tol`` for every ``k >= small_start``. Each family
    is tested separately, using its own index ``k``.

    Raises
    ------
    ValueError
        If some family has fewer than ``config.min_zeros`` indexed zeros.
    """
    seqs = bound_sequence(zeros, a)
    if not seqs:
        raise ValueError("no indexed zeros supplied")
    for fam, seq in seqs.items():
        if len(seq) < config.min_zeros:
            raise ValueError(f"family {fam} has {len(seq)} indexed zeros; need {config.min_zeros}")
        tail = [k * k * d for k, d in seq if k >= config.tail_start]
        monotone = all(b <= a_ * (1 + config.slack) + config.slack for a_, b in zip(tail, tail[1:]))
        small = all(d < config.small_tol for k, d in seq if k >= config.small_start)
        if not (monotone or small):
            return False
    return True


# -- conditioning audit ------------------------------------------------------------

@dataclass(frozen=True)
class SectorGrowth:
    sector: tuple[float, float]
    growth: str
    angle: float
    radii: tuple[float, ...]
    ratios: tuple[float, ...]

    @property
    def decays(self) -> bool:
        return self.growth == "decays"


_REPRESENTATIVE = {
    "II": (LEFT, LEFT, RIGHT),
    "III": (LEFT, RIGHT, RIGHT),
    "IV": (LEFT, RIGHT, COUPLED),
}


def _numerator_exponents(sides: Sequence[str]) -> set[tuple[frozenset, int]]:
    """Exponent structure of the initial-data numerators.

    With the determinant written as det[(left e^{-i w^c rho} + right) ...],
    replacing one row by ``(e^{-i w^b rho x})_b`` yields terms
    ``exp(-i (sum_{c in S} w^c + w^b x) rho)``. Here ``S`` is the set of
    columns that the other two rows fill with their left-end part.
    """
    out = set()
    for k in range(3):
        rest = [s for i, s in enumerate(sides) if i != k]
        for b in range(3):
            cols = [c for c in range(3) if c != b]
            for perm in (cols, cols[::-1]):
                options = [[]]
                for side, col in zip(rest, perm):
                    if side == LEFT:
                        options = [o + [col] for o in options]
                    elif side == COUPLED:
                        options = [o + [col] for o in options] + options
                out.update((frozenset(o), b) for o in options)
    return out


def _log_envelope(terms, rho: complex) -> float:
    best = -math.inf
    for S, b in terms:
        lead = sum((OMEGA**c for c in S), 0j) * rho
        A = lead.imag
        B = (OMEGA**b * rho).imag
        # log of int_0^1 exp(A + B x) dx
        if abs(B) < 1e-12:
            val = A
        elif B > 0:
            val = A + B + math.log(-math.expm1(-B) / B)
        else:
            val = A + math.log(math.expm1(B) / B)
        best = max(best, val)
    return best


def sector_growth_audit(problem: ProblemSpec | CanonicalForm, samples: int = 16,
                        r_min: float = 4.0, r_max: float = 40.0) -> list[SectorGrowth]:
    """Numerical witness of conditioning, one entry per sector of opening pi/3.

    Along a ray through each sector the ratio of the numerator envelope to
    ``|B(rho)|`` is sampled at radii spaced geometrically between ``r_min``
    and ``r_max``. A sector decays iff that ratio falls off. The bisecting
    ray is jittered when it passes near zeros of the bracket.
    """
    if samples < 8:
        raise ValueError("need at least 8 radii per sector")
    if isinstance(problem, ProblemSpec):
        cf = canonical_form(problem)
        sides = [r.side for r in problem.rows]
    else:
        cf = problem
        if cf.form == "I":
            raise ValueError("form I has no bracket to audit")
        sides = list(_REPRESENTATIVE[cf.form])
    if cf.form == "I":
        raise ValueError("form I has no bracket to audit")
    terms = _numerator_exponents(sides)
    radii = np.geomspace(r_min, r_max, samples)
    out = []
    for m in range(6):
        sector = (m * math.pi / 3, (m + 1) * math.pi / 3)
        mid = sector[0] + math.pi / 6
        for jitter in (0.0, 0.07, -0.07, 0.15, -0.15):
            angle = mid + jitter
            rho = radii * np.exp(1j * angle)
            if np.min(relative_residual(cf, rho)) > 1e-3:
                break
        denom = np.log(np.abs(bracket_eval(cf, rho)))
        logs = np.array([_log_envelope(terms, complex(p)) for p in rho]) - denom
        slope = np.polyfit(np.log(radii), logs, 1)[0]
        growth = "decays" if slope < -0.25 and logs[-1] < logs[0] else "blows_up"
        out.append(SectorGrowth(sector, growth, angle, tuple(radii), tuple(np.exp(logs))))
    return out


def _in_D(sector: tuple[float, float], a: Direction) -> bool:
    mid = 0.5 * (sector[0] + sector[1])
    return Direction.parse(a).sign * math.sin(3 * mid) > 0


def audit_conditioning(audit: Sequence[SectorGrowth]) -> tuple[bool, bool]:
    """Conditioning implied by an audit: every sector of ``D(a)`` decays.

    ``D(a) = {Re(a rho^3) < 0}`` is the complement of ``E(a)``.
    """
    return tuple(all(s.decays for s in audit if _in_D(s.sector, a)) for a in (PLUS_I, MINUS_I))


# -- verdict -------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    label: ClassLabel
    form: CanonicalForm
    conditioned_plus: bool
    conditioned_minus: bool
    bound_plus: bool
    bound_minus: bool

    @property
    def wellposed_plus(self) -> bool:
        return self.conditioned_plus and self.bound_plus

    @property
    def wellposed_minus(self) -> bool:
        return self.conditioned_minus and self.bound_minus

    def for_direction(self, a) -> dict:
        plus = Direction.parse(a).sign > 0
        return {
            "conditioned": self.conditioned_plus if plus else self.conditioned_minus,
            "bound": self.bound_plus if plus else self.bound_minus,
            "wellposed": self.wellposed_plus if plus else self.wellposed_minus,
        }


def verdict(spec: ProblemSpec, k_max: int = 12, residual_tol: float = DEFAULT_RESIDUAL_TOL,
            config: BoundConfig = BoundConfig(), zeros: Sequence[ZeroRecord] | None = None) -> Verdict:
    """Classify ``spec`` and decide well-posedness for both directions.

    Conditioning comes from the form. The zero bound is checked on
    refined zeros up to ``k_max``. Form I has no nonzero zeros, so the
    bound holds vacuously.
    """
    cf = canonical_form(spec)
    cond_p, cond_m = conditioning(cf)
    if cf.form == "I":
        bound_p = bound_m = True
    else:
        if zeros is None:
            zeros = zero_table(cf, k_max, residual_tol, rotations=False)
        bound_p = zero_bound_check(zeros, PLUS_I, config)
        bound_m = zero_bound_check(zeros, MINUS_I, config)
    return Verdict(classify(cf), cf, cond_p, cond_m, bound_p, bound_m)
