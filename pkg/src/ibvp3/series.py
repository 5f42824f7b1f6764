"""Growth of the residue series and its instantaneous blow-up.

Each nonzero zero ``sigma`` contributes a term carrying the time factor
``exp(-a sigma^3 t)``. The series can converge for ``t > 0`` only when
``Re(-a sigma_k^3)`` is bounded above. The coefficients ``f_k`` depend
on the initial datum and are supplied by the caller.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .chardet import canonical_form
from .exceptions import BoundaryTieWarning
from .problem import Direction, ProblemSpec
from .wellposed import BoundConfig
from .zeros import DEFAULT_RESIDUAL_TOL, ZeroRecord, zero_table


@dataclass(frozen=True)
class GrowthEntry:
    family: str
    j: int
    k: int
    exponent: float


@dataclass(frozen=True)
class GrowthProfile:
    a: Direction
    t: float
    entries: tuple[GrowthEntry, ...]
    bounded_above: bool

    def by_family(self, family: str = "lambda", j: int = 0) -> list[tuple[int, float]]:
        return [(e.k, e.exponent) for e in self.entries if e.family == family and e.j == j]


def exponent(sigma: complex, a: Direction, t: float = 1.0) -> float:
    """``Re(-a sigma^3) t``."""
    return float((-Direction.parse(a).value * sigma**3).real) * t


def _bounded(seqs: dict[str, list[tuple[int, float]]], config: BoundConfig) -> bool:
    for seq in seqs.values():
        tail = [g for k, g in seq if k >= config.tail_start]
        monotone = all(b <= a + config.slack * (1 + abs(a)) for a, b in zip(tail, tail[1:]))
        small = all(g <= config.small_tol for k, g in seq if k >= config.small_start)
        if not (monotone or small):
            return False
    return True


def growth_profile(zeros: Sequence[ZeroRecord], a: Direction, t: float,
                   config: BoundConfig = BoundConfig()) -> GrowthProfile:
    """Real parts of the time exponents, and whether they stay bounded above.

    Boundedness is judged on the unit-time exponents, per family, with the
    thresholds of the zero-location test: the tail must be non-increasing,
    or every exponent from ``small_start`` on must be at most ``small_tol``.
    Unindexed zeros (the origin and strays) are skipped.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    a = Direction.parse(a)
    indexed = sorted((z for z in zeros if z.k >= 1), key=lambda z: (z.family, z.k, z.j))
    entries = tuple(GrowthEntry(z.family, z.j, z.k, exponent(z.value, a, t)) for z in indexed)
    if t == 0:
        return GrowthProfile(a, t, entries, True)
    unit: dict[str, dict[int, float]] = {}
    for z in indexed:
        g = exponent(z.value, a)
        fam = unit.setdefault(z.family, {})
        fam[z.k] = max(g, fam.get(z.k, -np.inf))
    seqs = {f: sorted(d.items()) for f, d in unit.items()}
    return GrowthProfile(a, t, entries, _bounded(seqs, config))


def divergence_check(spec: ProblemSpec, k_max: int = 12, residual_tol: float = DEFAULT_RESIDUAL_TOL) -> bool:
    """True iff the series solution of ``spec`` blows up for every ``t > 0``."""
    cf = canonical_form(spec)
    if cf.form == "I":
        return False
    zeros = zero_table(cf, k_max, residual_tol, rotations=False)
    return not growth_profile(zeros, spec.a, 1.0).bounded_above


def evaluate_truncated(zeros: Sequence[ZeroRecord], coeffs: Mapping[int, complex], a: Direction,
                       x: float, t: float, K: int) -> complex:
    """Partial sum of the series over zeros with ``1 <= k <= K``.

    Upper half-plane zeros use ``exp(i sigma x)`` and lower half-plane
    zeros ``exp(i sigma (x - 1))``. A zero with ``Im sigma == 0`` is given
    the upper-half-plane factor and reported with a BoundaryTieWarning.
    Pass one record per ``k``; ``coeffs`` is keyed by ``k``.
    """
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    if t < 0:
        raise ValueError("t must be non-negative")
    av = Direction.parse(a).value
    total = 0j
    terms = sorted((z for z in zeros if 1 <= z.k <= K and z.k in coeffs), key=lambda z: (z.k, z.family, z.j))
    with np.errstate(over="ignore", invalid="ignore"):
        for z in terms:
            s = z.value
            if s.imag == 0:
                warnings.warn(f"zero {s} lies on the real axis; assigned to K+", BoundaryTieWarning, stacklevel=2)
            shift = x if s.imag >= 0 else x - 1
            total += complex(coeffs[z.k]) * complex(np.exp(1j * s * shift - av * s**3 * t))
    return total
