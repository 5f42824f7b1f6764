"""Zeros of the determinant bracket: asymptotic formulas and certified roots.

Numerical roots are located by recursive bisection of a rectangle. Each
piece is certified by the argument principle, and Newton's method with
the analytic derivative then refines every isolated zero. Residuals are
relative: ``|B(rho)|`` over the sum of the moduli of the bracket's terms.
Absolute residuals are meaningless once the exponentials reach ``e^40``.

The zero set is invariant under ``rho -> w rho``. Records carry the
rotation index ``j`` and the asymptotic index ``k``. Family ``lambda``
holds the zeros near the positive real axis (form IV) or the imaginary
axis (forms II and III). Family ``mu`` holds the form IV zeros near the
negative real axis.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .chardet import (
    OMEGA,
    CanonicalForm,
    bracket_derivative,
    bracket_eval,
    relative_residual,
)
from .exceptions import MissingZeroWarning, MultipleZeroWarning, NewtonError, WindingNumberError

LAMBDA, MU, ORIGIN = "lambda", "mu", "origin"
SQRT3 = math.sqrt(3.0)

DEFAULT_RESIDUAL_TOL = 1e-12
NEWTON_MAXITER = 50
INTEGER_TOL = 1e-3
ORIGIN_SNAP = 1e-6

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W
# deterministic, irregular offsets so retries never land on the same grid.
# No exact halving: symmetric boxes would put an edge on the axes, where
# the zeros of several forms (and the origin) sit.
_SPLITS = (0.4637, 0.5412, 0.4218, 0.5794, 0.3871, 0.6133, 0.5)
_NUDGES = (0.0, 1.3e-3, 2.9e-3, 5.3e-3, 9.7e-3, 1.71e-2, 3.1e-2)


@dataclass(frozen=True)
class ZeroRecord:
    family: str
    j: int
    k: int
    value: complex
    provenance: str
    residual: float = 0.0

    @property
    def key(self):
        return (self.family, self.j, self.k)


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle ``[re_min, re_max] x [im_min, im_max]``."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError(f"degenerate box {self}")

    @classmethod
    def around(cls, center: complex, half_re: float, half_im: float | None = None) -> "Box":
        half_im = half_re if half_im is None else half_im
        c = complex(center)
        return cls(c.real - half_re, c.real + half_re, c.imag - half_im, c.imag + half_im)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    @property
    def size(self) -> float:
        return max(self.re_max - self.re_min, self.im_max - self.im_min)

    def contains(self, z: complex) -> bool:
        return self.re_min <= z.real <= self.re_max and self.im_min <= z.imag <= self.im_max

    def corners(self):
        return (
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        )

    def grow(self, d: float) -> "Box":
        return Box(self.re_min - d, self.re_max + d, self.im_min - d, self.im_max + d)

    def split(self, frac: float = 0.5) -> tuple["Box", "Box"]:
        if self.re_max - self.re_min >= self.im_max - self.im_min:
            m = self.re_min + frac * (self.re_max - self.re_min)
            return Box(self.re_min, m, self.im_min, self.im_max), Box(m, self.re_max, self.im_min, self.im_max)
        m = self.im_min + frac * (self.im_max - self.im_min)
        return Box(self.re_min, self.re_max, self.im_min, m), Box(self.re_min, self.re_max, m, self.im_max)


# -- asymptotics ---------------------------------------------------------------

def families(cf: CanonicalForm) -> tuple[str, ...]:
    if cf.form == "I":
        return ()
    return (LAMBDA, MU) if cf.form == "IV" else (LAMBDA,)


def spacing(cf: CanonicalForm) -> float:
    """Asymptotic gap between consecutive zeros of one family."""
    return 2 * math.pi if cf.form == "IV" else 2 * math.pi / SQRT3


def error_rate(cf: CanonicalForm) -> float:
    """Exponential rate ``r`` of the ``O(e^{-r k})`` correction term."""
    if cf.form == "I":
        raise ValueError("form I has no nonzero zeros")
    if cf.form in ("II", "III") and cf.X != 0:
        return math.pi / SQRT3
    return SQRT3 * math.pi


def _w_prime(W: int) -> int:
    return {0: 0, 1: -2, -1: -1}[W]


def asymptotic_zero(cf: CanonicalForm, family: str, k: int) -> complex:
    """Leading-order location of the ``k``-th zero of a family (``j = 0``).

    Forms II and III put the zeros on the imaginary axis; form IV puts
    them on horizontal lines at height ``log|Y|``.
    """
    if cf.form == "I":
        raise ValueError("form I has no nonzero zeros")
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    if family not in families(cf):
        raise ValueError(f"form {cf.form} has no {family!r} zeros")
    W = cf.W
    if cf.form in ("II", "III"):
        y = (2 * k - 1 - 2 * W / 3) * math.pi / SQRT3
        return complex(0, y if cf.form == "II" else -y)
    Y = float(cf.Y)
    if Y > 0:
        x = (2 * k - 1 + 2 * W / 3) * math.pi
    else:
        x = (2 * k + 2 * _w_prime(W) / 3) * math.pi
    if family == MU:
        x = -x
    return complex(x, math.log(abs(Y)))


def _ray_direction(cf: CanonicalForm, family: str) -> complex:
    if cf.form == "II":
        return 1j
    if cf.form == "III":
        return -1j
    return 1.0 if family == LAMBDA else -1.0


def label_zero(cf: CanonicalForm, z: complex) -> tuple[str, int, int, float]:
    """Nearest asymptotic prediction to ``z``: ``(family, j, k, distance)``.

    Ties go to the smaller ``k``. A zero farther than half a spacing from
    every prediction is unmatched and gets ``(lambda, 0, 0, distance)``.
    """
    best = None
    gap = spacing(cf)
    for fam in families(cf):
        direction = _ray_direction(cf, fam)
        p1 = asymptotic_zero(cf, fam, 1)
        for j in range(3):
            zr = z * OMEGA ** (-j)
            along = (zr * direction.conjugate()).real
            k0 = int(round((along - (p1 * direction.conjugate()).real) / gap)) + 1
            for k in (k0 - 1, k0, k0 + 1):
                if k < 1:
                    continue
                d = abs(zr - asymptotic_zero(cf, fam, k))
                cand = (d, k, fam, j)
                if best is None or cand[:2] < best[:2]:
                    best = cand
    if best is None or best[0] > 0.5 * gap:
        return LAMBDA, 0, 0, (best[0] if best else math.inf)
    d, k, fam, j = best
    return fam, j, k, d


# -- argument principle ----------------------------------------------------------

def _edge_integral(cf, a: complex, b: complex, tol: float = 1e-9, depth: int = 0) -> complex:
    z = a + (b - a) * _GL_X
    f = bracket_eval(cf, z)
    if np.min(relative_residual(cf, z)) < 1e-10:
        raise WindingNumberError(f"edge {a}..{b} passes too close to a zero")
    whole = np.sum(_GL_W * bracket_derivative(cf, z) / f) * (b - a)
    m = 0.5 * (a + b)
    halves = []
    for lo, hi in ((a, m), (m, b)):
        zz = lo + (hi - lo) * _GL_X
        ff = bracket_eval(cf, zz)
        if np.min(relative_residual(cf, zz)) < 1e-10:
            raise WindingNumberError(f"edge {lo}..{hi} passes too close to a zero")
        halves.append(np.sum(_GL_W * bracket_derivative(cf, zz) / ff) * (hi - lo))
    refined = halves[0] + halves[1]
    if abs(refined - whole) <= tol:
        return refined
    if depth >= 40:
        raise WindingNumberError("adaptive quadrature did not settle; edge is near a zero")
    return _edge_integral(cf, a, m, tol, depth + 1) + _edge_integral(cf, m, b, tol, depth + 1)


def _raw_count(cf: CanonicalForm, box: Box) -> int:
    c = box.corners()
    total = sum(_edge_integral(cf, c[i], c[(i + 1) % 4]) for i in range(4))
    n = total / (2j * math.pi)
    nearest = round(n.real)
    if abs(n - nearest) > INTEGER_TOL:
        raise WindingNumberError(f"winding number {n} is not an integer")
    return int(nearest)


def _on_boundary(box: Box, z: complex, eps: float) -> bool:
    inside_x = box.re_min - eps <= z.real <= box.re_max + eps
    inside_y = box.im_min - eps <= z.imag <= box.im_max + eps
    near_x = min(abs(z.real - box.re_min), abs(z.real - box.re_max)) <= eps
    near_y = min(abs(z.imag - box.im_min), abs(z.imag - box.im_max)) <= eps
    return (near_x and inside_y) or (near_y and inside_x)


def certify_box(cf: CanonicalForm, box: Box) -> tuple[Box, int]:
    """Zero count inside ``box``, nudging its edges outward when needed.

    Returns the box actually used together with the count.
    """
    scale = max(box.size, 1.0)
    last = None
    origin_zero = float(relative_residual(cf, 0j)) <= 1e-12
    for nudge in _NUDGES:
        trial = box.grow(nudge * scale) if nudge else box
        if origin_zero and _on_boundary(trial, 0j, 1e-9 * scale):
            last = WindingNumberError(f"{trial} passes through the zero at the origin")
            continue
        try:
            return trial, _raw_count(cf, trial)
        except WindingNumberError as exc:
            last = exc
    raise WindingNumberError(f"could not certify {box} after {len(_NUDGES)} attempts: {last}")


def winding_number(cf: CanonicalForm, box: Box) -> int:
    """Argument-principle zero count of the bracket inside ``box``."""
    return certify_box(cf, box)[1]


# -- Newton refinement -------------------------------------------------------------

def newton(cf: CanonicalForm, z0: complex, residual_tol: float = DEFAULT_RESIDUAL_TOL,
           maxiter: int = NEWTON_MAXITER) -> complex:
    """Refine ``z0`` to a zero of the bracket. Raises NewtonError."""
    z = complex(z0)
    for _ in range(maxiter):
        f = complex(bracket_eval(cf, z))
        df = complex(bracket_derivative(cf, z))
        if df == 0:
            raise NewtonError(f"vanishing derivative at {z}")
        step = f / df
        z -= step
        if not math.isfinite(abs(z)):
            raise NewtonError("Newton iterate diverged")
        if abs(step) <= 4e-16 * max(1.0, abs(z)):
            break
    res = float(relative_residual(cf, z))
    if res > residual_tol:
        raise NewtonError(f"Newton stalled at {z} with relative residual {res:.3g}")
    return z


def _predictions_in(cf: CanonicalForm, box: Box) -> list[complex]:
    out = []
    gap = spacing(cf)
    rmax = abs(box.center) + box.size
    kmax = int(rmax / gap) + 2
    for fam in families(cf):
        for k in range(1, kmax + 1):
            p = asymptotic_zero(cf, fam, k)
            for j in range(3):
                q = p * OMEGA**j
                if box.contains(q):
                    out.append(q)
    return out


def _origin_record():
    return ZeroRecord(ORIGIN, 0, 0, 0j, "exact", 0.0)


def _origin_multiplicity(cf: CanonicalForm) -> int:
    """Order of the bracket's zero at the origin (0 when B(0) != 0)."""
    if float(relative_residual(cf, 0j)) > 1e-12:
        return 0
    for r in (0.05, 0.037, 0.061):
        try:
            return _raw_count(cf, Box.around(0j, r))
        except WindingNumberError:
            continue
    raise WindingNumberError("cannot isolate the zero at the origin")


def _solve(cf, box: Box, n: int, tol: float, depth: int, m0: int) -> list[complex]:
    if n == 0:
        return []
    if m0 and n == m0 and box.size <= 0.2 and box.contains(0j):
        return [0j] * n
    if n == 1:
        seeds = _predictions_in(cf, box) + [box.center]
        for s in seeds:
            try:
                z = newton(cf, s, tol)
            except NewtonError:
                continue
            if box.contains(z):
                return [z]
    if box.size < 1e-9 * max(1.0, abs(box.center)) or depth > 200:
        z = box.center
        warnings.warn(
            f"possible multiple zero: {n} zeros unresolved near {z}", MultipleZeroWarning, stacklevel=3
        )
        try:
            z = newton(cf, z, max(tol, 1e-8))
        except NewtonError:
            pass
        return [z] * n
    for frac in _SPLITS:
        lo, hi = box.split(frac)
        if m0 and box.contains(0j) and _on_boundary(lo, 0j, 1e-9 * max(1.0, box.size)) \
                and _on_boundary(hi, 0j, 1e-9 * max(1.0, box.size)):
            continue
        try:
            n_lo = _raw_count(cf, lo)
            n_hi = _raw_count(cf, hi)
        except WindingNumberError:
            continue
        if n_lo + n_hi != n:
            continue
        return _solve(cf, lo, n_lo, tol, depth + 1, m0) + _solve(cf, hi, n_hi, tol, depth + 1, m0)
    raise WindingNumberError(f"could not bisect {box} consistently")


def _record_for(cf: CanonicalForm, z: complex) -> ZeroRecord:
    if z == 0:
        return _origin_record()
    fam, j, k, _ = label_zero(cf, z)
    return ZeroRecord(fam, j, k, z, "refined", float(relative_residual(cf, z)))


def find_zeros(cf: CanonicalForm, box: Box, residual_tol: float = DEFAULT_RESIDUAL_TOL) -> list[ZeroRecord]:
    """All zeros of the bracket inside ``box``, refined and labelled.

    Parameters
    ----------
    cf : CanonicalForm
        Form II, III or IV.
    box : Box
        Search rectangle. Its edges are nudged outward when they pass too
        close to a zero; the count refers to the nudged box.
    residual_tol : float
        Bound on the relative residual of every returned zero.

    Returns
    -------
    list of ZeroRecord
        Exactly as many records as the argument-principle count. A zero of
        the bracket at the origin is reported with family ``origin``.

    Raises
    ------
    WindingNumberError
        The boundary integral cannot be made integer-valued.
    """
    if cf.form == "I":
        raise ValueError("form I has no bracket zeros")
    used, n = certify_box(cf, box)
    m0 = _origin_multiplicity(cf) if used.contains(0j) else 0
    roots = _solve(cf, used, n, residual_tol, 0, m0)
    if m0:
        # bisection through a multiple zero leaves Newton iterates just off it
        roots = [0j if abs(z) < ORIGIN_SNAP else z for z in roots]
    return sorted((_record_for(cf, z) for z in roots), key=lambda r: (abs(r.value), r.value.real, r.value.imag))


# -- zero tables ---------------------------------------------------------------------

def _strip(cf: CanonicalForm, k_max: int) -> Box:
    gap = spacing(cf)
    half = 1.5
    reach = max(abs(asymptotic_zero(cf, f, k_max)) for f in families(cf)) + 0.5 * gap
    if cf.form == "IV":
        h = math.log(abs(float(cf.Y)))
        return Box(-reach, reach, h - half, h + half)
    if cf.form == "II":
        return Box(-half, half, -half, reach)
    return Box(-half, half, -reach, half)


def _central(cf: CanonicalForm) -> Box:
    r = max(abs(asymptotic_zero(cf, f, 1)) for f in families(cf)) + 0.5 * spacing(cf)
    return Box(-r, r, -r, r)


def _dedupe(values: Iterable[complex]) -> list[complex]:
    out: list[complex] = []
    for z in values:
        if all(abs(z - w) > 1e-7 * max(1.0, abs(z)) for w in out):
            out.append(z)
    return out


def zero_table(cf: CanonicalForm, k_max: int = 12, residual_tol: float = DEFAULT_RESIDUAL_TOL,
               rotations: bool = True) -> list[ZeroRecord]:
    """Refined zeros of ``Delta`` with ``k <= k_max`` for every family.

    The first record is the origin. Zeros that match no asymptotic
    prediction are kept with ``k = 0``. With ``rotations`` the ``j = 1, 2``
    copies are included, each re-polished by Newton.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    if rotations and not cf.rotation_invariant:
        raise ValueError(f"zeros of {cf.describe()} are not closed under rotation; use rotations=False")
    records = [_origin_record()]
    if cf.form == "I":
        return records
    found = []
    for region in (_strip(cf, k_max), _central(cf)):
        found += [r.value for r in find_zeros(cf, region, residual_tol) if r.family != ORIGIN]
    if cf.rotation_invariant:
        reps = _dedupe(z * OMEGA ** (-label_zero(cf, z)[1]) for z in found)
    else:
        reps = _dedupe(z for z in found if label_zero(cf, z)[1] == 0)

    owned: dict[tuple[str, int], complex] = {}
    stray: list[complex] = []
    for z in reps:
        fam, j, k, d = label_zero(cf, z)
        if k == 0:
            stray.append(z)
            continue
        key = (fam, k)
        if key in owned:
            prev = owned[key]
            if d < abs(prev - asymptotic_zero(cf, fam, k)):
                owned[key], z = z, prev
            stray.append(z)
        else:
            owned[key] = z
    for fam in families(cf):
        for k in range(1, k_max + 1):
            if (fam, k) not in owned:
                p = asymptotic_zero(cf, fam, k)
                near = [r.value for r in find_zeros(cf, Box.around(p, 0.5 * spacing(cf), 2.5), residual_tol)
                        if r.family == fam and r.k == k and r.j == 0]
                if not near:
                    warnings.warn(f"no zero near the prediction for {fam}_{k} of form {cf.describe()}",
                                  MissingZeroWarning, stacklevel=2)
                    continue
                owned[(fam, k)] = near[0]

    def emit(fam, k, z0):
        for j in range(3 if rotations else 1):
            z = z0 * OMEGA**j
            if j:
                z = newton(cf, z, residual_tol)
            records.append(ZeroRecord(fam, j, k, z, "refined", float(relative_residual(cf, z))))

    for fam in families(cf):
        for k in range(1, k_max + 1):
            if (fam, k) in owned:
                emit(fam, k, owned[(fam, k)])
    for z in sorted(stray, key=abs):
        if abs(z) > 0.5 * spacing(cf) + max(abs(asymptotic_zero(cf, f, k_max)) for f in families(cf)):
            continue
        emit(LAMBDA, 0, z)
    return records


@dataclass(frozen=True)
class AsymptoticValidation:
    family: str
    errors: list[tuple[int, float]]
    rate: float | None
    predicted: list[complex]
    refined: list[complex]


def fit_decay_rate(errors: list[tuple[int, float]], values: list[complex] | None = None) -> float | None:
    """Least-squares rate ``r`` in ``error(k) ~ C e^{-r k}`` over ``k >= 2``.

    Points below the rounding floor of the refined zero are dropped.
    """
    pts = []
    for i, (k, e) in enumerate(errors):
        floor = 2e-13 * max(1.0, abs(values[i]) if values else 1.0)
        if k >= 2 and e > floor:
            pts.append((k, math.log(e)))
    if len(pts) < 2:
        return None
    ks = np.array([p[0] for p in pts], float)
    ls = np.array([p[1] for p in pts])
    slope = np.polyfit(ks, ls, 1)[0]
    return float(-slope)


def validate_asymptotics(cf: CanonicalForm, k_max: int, family: str = LAMBDA,
                         residual_tol: float = DEFAULT_RESIDUAL_TOL) -> AsymptoticValidation:
    """Compare refined zeros with their leading-order predictions."""
    if cf.form == "I":
        return AsymptoticValidation(family, [], None, [], [])
    if k_max < 3:
        raise ValueError("k_max must be at least 3")
    table = {r.k: r.value for r in zero_table(cf, k_max, residual_tol, rotations=False)
             if r.family == family and r.j == 0 and r.k >= 1}
    ks = sorted(table)
    predicted = [asymptotic_zero(cf, family, k) for k in ks]
    refined = [table[k] for k in ks]
    errors = [(k, abs(z - p)) for k, z, p in zip(ks, refined, predicted)]
    return AsymptoticValidation(family, errors, fit_decay_rate(errors, refined), predicted, refined)
