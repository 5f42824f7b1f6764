"""Canonical form of the characteristic determinant of a 3rd-order problem.

For non-Robin boundary conditions the determinant is ``M(rho) * B(rho)``,
where ``M`` is a monomial and the bracket ``B`` takes one of four shapes::

    I    B = 1
    II   B = X + sum_r w^(W r) exp(i w^r rho)
    III  B = X + sum_r w^(W r) exp(-i w^r rho)
    IV   B = X + sum_r w^(W r) (exp(i w^r rho) + Y exp(-i w^r rho))

with ``w = exp(2 pi i / 3)`` and ``r = 0, 1, 2``. :func:`canonical_form`
reads ``(form, W, X, Y)`` off the boundary rows by the classification
tables; only the degree of ``M`` is tracked since ``M`` vanishes only at
the origin.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exceptions import SpecError, TableMismatchError, UnsupportedCouplingError
from .problem import COUPLED, LEFT, RIGHT, ProblemSpec

OMEGA = cmath.exp(2j * cmath.pi / 3)
FORMS = ("I", "II", "III", "IV")


@dataclass(frozen=True)
class CanonicalForm:
    """Shape and parameters of the determinant bracket.

    ``X`` and ``Y`` are exact Fractions when produced from a problem with
    real couplings; any complex ``X`` is accepted for hand-built forms.
    """

    form: str
    W: int | None = None
    X: Fraction | complex | None = None
    Y: Fraction | float | None = None
    mdeg: int = 3
    table_row: tuple[int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValueError(f"form must be one of {FORMS}, got {self.form!r}")
        if not 1 <= self.mdeg <= 5:
            raise ValueError(f"monomial degree must lie in 1..5, got {self.mdeg}")
        if self.form == "I":
            if (self.W, self.X, self.Y) != (None, None, None):
                raise ValueError("form I carries no W, X, Y")
            return
        if self.W not in (-1, 0, 1):
            raise ValueError(f"W must be -1, 0 or 1, got {self.W!r}")
        if self.X is None:
            raise ValueError(f"form {self.form} needs X")
        if self.form == "IV":
            if self.Y is None or isinstance(self.Y, complex) or self.Y == 0:
                raise ValueError("form IV needs a real nonzero Y")
        elif self.Y is not None:
            raise ValueError(f"form {self.form} carries no Y")

    @property
    def rotation_invariant(self) -> bool:
        """Whether the zero set is closed under ``rho -> w rho``.

        ``B(w rho) - X = w^-W (B(rho) - X)``, so closure needs ``W = 0`` or
        ``X = 0``. Every form produced by :func:`canonical_form` has it.
        """
        return self.form == "I" or self.W == 0 or self.X == 0

    def describe(self) -> str:
        if self.form == "I":
            return "I"
        parts = [f"W={self.W}", f"X={self.X}"]
        if self.form == "IV":
            parts.append(f"Y={self.Y}")
        return f"{self.form} ({', '.join(parts)})"


@dataclass(frozen=True)
class PseudoPeriodicParams:
    beta: Fraction
    beta_prime: Fraction
    beta_dprime: Fraction


@dataclass(frozen=True)
class TableRow:
    table: int
    row: int
    couplings: int
    description: str
    form: str
    W: str
    X: str
    Y: str


TABLE_ROWS = (
    TableRow(1, 1, 0, "all BC at one side", "I", "", "", ""),
    TableRow(1, 2, 0, "2 BC at left, 1 at right, all BC of different orders", "II", "0", "0", ""),
    TableRow(1, 3, 0, "2 BC at left, 1 at right, 2 of same order, order(shared) = order(other left) - 1 (mod 3)", "II", "1", "0", ""),
    TableRow(1, 4, 0, "2 BC at left, 1 at right, 2 of same order, order(shared) = order(other left) + 1 (mod 3)", "II", "-1", "0", ""),
    TableRow(1, 5, 0, "1 BC at left, 2 at right, all BC of different orders", "III", "0", "0", ""),
    TableRow(1, 6, 0, "1 BC at left, 2 at right, 2 of same order, order(shared) = order(other right) - 1 (mod 3)", "III", "1", "0", ""),
    TableRow(1, 7, 0, "1 BC at left, 2 at right, 2 of same order, order(shared) = order(other right) + 1 (mod 3)", "III", "-1", "0", ""),
    TableRow(1, 8, 1, "2 BC at left", "II", "0", "3/b1", ""),
    TableRow(1, 9, 1, "2 BC at right", "III", "0", "3 b1", ""),
    TableRow(1, 10, 1, "1 BC at left, 1 at right, all BC of different orders", "IV", "0", "0", "b1"),
    TableRow(1, 11, 1, "1 BC at left, 1 at right of same order, order(uncoupled) = order(coupled) - 1 (mod 3)", "IV", "1", "0", "-b1"),
    TableRow(1, 12, 1, "1 BC at left, 1 at right of same order, order(uncoupled) = order(coupled) + 1 (mod 3)", "IV", "-1", "0", "-b1"),
    TableRow(2, 1, 2, "1 BC at right and b1 + b2 = 0", "II", "0", "3 b1 b2", ""),
    TableRow(2, 2, 2, "1 BC at left and b1 + b2 = 0", "III", "0", "3/(b1 b2)", ""),
    TableRow(2, 3, 2, "1 BC at right and b1 + b2 != 0", "IV", "0", "3 b1 b2", "b1 + b2"),
    TableRow(2, 4, 2, "1 BC at left and b1 + b2 != 0", "IV", "0", "3/(b1 + b2)", "b1 b2/(b1 + b2)"),
    TableRow(2, 5, 3, "beta = 0", "II", "0", "beta''/beta'", ""),
    TableRow(2, 6, 3, "beta' = 0", "III", "0", "beta''/beta", ""),
    TableRow(2, 7, 3, "beta, beta' != 0", "IV", "0", "beta''/beta'", "beta/beta'"),
)


def table_row(table: int, row: int) -> TableRow:
    for t in TABLE_ROWS:
        if (t.table, t.row) == (table, row):
            return t
    raise KeyError((table, row))


def pseudo_periodic_params(b1, b2, b3) -> PseudoPeriodicParams:
    """Symmetric functions of three pseudo-periodic coupling constants."""
    bs = [Fraction(b) if not isinstance(b, Fraction) else b for b in (b1, b2, b3)]
    if any(b == 0 for b in bs):
        raise SpecError("pseudo-periodic coupling constants must be nonzero")
    b1, b2, b3 = bs
    params = PseudoPeriodicParams(
        beta=b1 * b2 + b2 * b3 + b3 * b1,
        beta_prime=b1 + b2 + b3,
        beta_dprime=3 * (b1 * b2 * b3 + 1),
    )
    zeros = sum(v == 0 for v in (params.beta, params.beta_prime, params.beta_dprime))
    if zeros > 1:
        raise SpecError(f"at most one of beta, beta', beta'' may vanish for real couplings; got {params}")
    return params


def _shift_W(shared: int, other: int) -> int:
    # W = 1 when the shared order sits one below the remaining one (mod 3)
    if (shared - other) % 3 == 2:
        return 1
    if (shared - other) % 3 == 1:
        return -1
    raise TableMismatchError(f"orders {shared} and {other} coincide")


def _real_couplings(spec: ProblemSpec) -> list[Fraction]:
    out = []
    for b in spec.couplings:
        if isinstance(b, complex):
            raise UnsupportedCouplingError(
                f"coupling constant {b} is not real; the classification covers real couplings only"
            )
        out.append(b)
    return out


def canonical_form(spec: ProblemSpec) -> CanonicalForm:
    """Canonical determinant form of a problem, read off the tables.

    Parameters
    ----------
    spec : ProblemSpec
        A validated problem whose coupling constants are real.

    Returns
    -------
    CanonicalForm
        With ``table_row`` naming the matching ``(table, row)``.

    Raises
    ------
    UnsupportedCouplingError
        If a coupling constant is not real.
    """
    betas = _real_couplings(spec)
    mdeg = sum(r.order for r in spec.rows)
    by_side: dict[str, list[int]] = {LEFT: [], RIGHT: [], COUPLED: []}
    for r in spec.rows:
        by_side[r.side].append(r.order)
    left, right, coupled = by_side[LEFT], by_side[RIGHT], by_side[COUPLED]
    c = len(coupled)

    def cf(tbl, row, form, W=None, X=None, Y=None):
        return CanonicalForm(form, W, X, Y, mdeg=mdeg, table_row=(tbl, row))

    zero = Fraction(0)
    if c == 0:
        if len(left) == 3 or len(right) == 3:
            return cf(1, 1, "I")
        pair, single = (left, right[0]) if len(left) == 2 else (right, left[0])
        form, base = ("II", 2) if len(left) == 2 else ("III", 5)
        if single not in pair:
            return cf(1, base, form, 0, zero)
        other = pair[0] if pair[1] == single else pair[1]
        W = _shift_W(single, other)
        return cf(1, base + (1 if W == 1 else 2), form, W, zero)
    if c == 1:
        (b1,) = betas
        if len(left) == 2:
            return cf(1, 8, "II", 0, 3 / b1)
        if len(right) == 2:
            return cf(1, 9, "III", 0, 3 * b1)
        if left[0] != right[0]:
            return cf(1, 10, "IV", 0, zero, b1)
        W = _shift_W(left[0], coupled[0])
        return cf(1, 11 if W == 1 else 12, "IV", W, zero, -b1)
    if c == 2:
        b1, b2 = betas
        s = b1 + b2
        if right:
            if s == 0:
                return cf(2, 1, "II", 0, 3 * b1 * b2)
            return cf(2, 3, "IV", 0, 3 * b1 * b2, s)
        if s == 0:
            return cf(2, 2, "III", 0, 3 / (b1 * b2))
        return cf(2, 4, "IV", 0, 3 / s, b1 * b2 / s)
    if c == 3:
        p = pseudo_periodic_params(*betas)
        if p.beta == 0:
            return cf(2, 5, "II", 0, p.beta_dprime / p.beta_prime)
        if p.beta_prime == 0:
            return cf(2, 6, "III", 0, p.beta_dprime / p.beta)
        return cf(2, 7, "IV", 0, p.beta_dprime / p.beta_prime, p.beta / p.beta_prime)
    raise TableMismatchError(f"no table row for {spec}")  # pragma: no cover


# -- bracket evaluation ----------------------------------------------------

def _parts(cf: CanonicalForm):
    if cf.form == "I":
        raise ValueError("form I has no bracket")
    W = cf.W
    X = complex(cf.X)
    weights = np.array([OMEGA ** (W * r) for r in range(3)])
    roots = np.array([OMEGA**r for r in range(3)])
    plus = 1.0 if cf.form in ("II", "IV") else 0.0
    if cf.form == "IV":
        minus = float(cf.Y)
    elif cf.form == "III":
        minus = 1.0
    else:
        minus = 0.0
    return X, weights, roots, plus, minus


def _exps(cf: CanonicalForm, rho):
    X, weights, roots, plus, minus = _parts(cf)
    rho = np.asarray(rho, dtype=complex)
    z = 1j * rho[..., None] * roots
    ep = plus * weights * np.exp(z) if plus else np.zeros(rho.shape + (3,), complex)
    em = minus * weights * np.exp(-z) if minus else np.zeros(rho.shape + (3,), complex)
    return X, roots, ep, em


def bracket_eval(cf: CanonicalForm, rho):
    """Evaluate the bracket factor at ``rho`` (scalar or array)."""
    X, _, ep, em = _exps(cf, rho)
    out = X + ep.sum(axis=-1) + em.sum(axis=-1)
    return out[()] if out.ndim == 0 else out


def bracket_derivative(cf: CanonicalForm, rho):
    _, roots, ep, em = _exps(cf, rho)
    out = (1j * roots * (ep - em)).sum(axis=-1)
    return out[()] if out.ndim == 0 else out


def bracket_scale(cf: CanonicalForm, rho):
    """Sum of the moduli of the bracket's terms; the size of rounding error."""
    X, _, ep, em = _exps(cf, rho)
    out = abs(X) + np.abs(ep).sum(axis=-1) + np.abs(em).sum(axis=-1)
    return out[()] if out.ndim == 0 else out


def relative_residual(cf: CanonicalForm, rho):
    """``|B(rho)|`` divided by :func:`bracket_scale`."""
    return np.abs(bracket_eval(cf, rho)) / bracket_scale(cf, rho)


# -- fourth order pseudo-periodic criterion ----------------------------------

def fourth_order_beta(b: Sequence) -> Fraction | float | None:
    """Discriminant of a 4th-order pseudo-periodic problem; None if undefined."""
    if len(b) != 4:
        raise SpecError(f"need four coupling constants, got {len(b)}")
    b = [x if isinstance(x, (Fraction, float)) else Fraction(x) for x in b]
    if any(x == 0 for x in b):
        raise SpecError("coupling constants must be nonzero")
    b1, b2, b3, b4 = b
    prod = b1 * b2 * b3 * b4
    num = b1 + b2 + b3 + b4 + prod * (1 / b1 + 1 / b2 + 1 / b3 + 1 / b4)
    den = b1 * b2 + b2 * b3 + b3 * b4 + b4 * b1 + 2 * (b1 * b3 + b2 * b4)
    if den == 0:
        return None
    return num / den


def fourth_order_pseudoperiodic_illposed(b: Sequence) -> bool:
    """True iff the 4th-order pseudo-periodic problem is ill-posed."""
    beta = fourth_order_beta(b)
    return beta is None or abs(beta) > Fraction(1, 2)
