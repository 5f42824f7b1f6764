"""Third-order two-point problems with non-Robin boundary conditions.

A problem is three boundary conditions, each of the form

    left * d^o q/dx^o (0, t) + right * d^o q/dx^o (1, t) = 0,

plus the direction coefficient ``a = +i`` or ``a = -i`` of
``q_t + a (-i d/dx)^3 q = 0``.

Rows are stored in a canonical normal form. A row touching both ends is
*coupled* and becomes ``(1, beta)``, so the coupling constant is
``beta = right / left``. This matches the rows ``(1, beta)`` of the
pseudo-periodic boundary matrix. A row touching one end becomes a single
unit coefficient. Two rows of the same order always span both endpoint
values, so they are replaced by one left and one right row. Real
coefficients are kept as :class:`fractions.Fraction` so the
classification formulas stay exact.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number
from typing import Any, Iterable, Union

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

from .exceptions import RankError, RobinConditionError, SpecError

Coefficient = Union[Fraction, complex]

LEFT, RIGHT, COUPLED = "left", "right", "coupled"
_SIDE_RANK = {LEFT: 0, RIGHT: 1, COUPLED: 2}


def coerce_coefficient(value: Any) -> Coefficient:
    """Convert an input scalar to a Fraction (real) or complex.

    Accepts ints, floats, Fractions, complex numbers, ``[re, im]`` pairs
    and strings such as ``"3/4"``, ``"-0.5"`` or ``"1+2j"``. Floats are
    read through their shortest decimal representation.
    """
    if isinstance(value, bool):
        raise SpecError(f"boolean is not a coefficient: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise SpecError(f"non-finite coefficient: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, complex):
        if value.imag == 0:
            return coerce_coefficient(value.real)
        return value
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise SpecError(f"complex coefficient must be [re, im], got {value!r}")
        re, im = (coerce_coefficient(v) for v in value)
        if isinstance(re, complex) or isinstance(im, complex):
            raise SpecError(f"[re, im] parts must be real: {value!r}")
        if im == 0:
            return re
        return complex(float(re), float(im))
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except ValueError:
            pass
        try:
            return coerce_coefficient(complex(text.replace("i", "j")))
        except ValueError:
            raise SpecError(f"cannot parse coefficient {value!r}") from None
    if isinstance(value, Number):
        return coerce_coefficient(complex(value))
    raise SpecError(f"unsupported coefficient type: {type(value).__name__}")


def _div(num: Coefficient, den: Coefficient) -> Coefficient:
    q = num / den
    if isinstance(q, complex) and q.imag == 0:
        return coerce_coefficient(q.real)
    return q


@dataclass(frozen=True)
class BoundaryRow:
    """One non-Robin boundary condition of a given derivative order."""

    order: int
    left: Coefficient
    right: Coefficient

    def __post_init__(self):
        if isinstance(self.order, bool) or not isinstance(self.order, int):
            raise SpecError(f"derivative order must be an integer, got {self.order!r}")
        if self.order not in (0, 1, 2):
            raise SpecError(f"derivative order must be 0, 1 or 2, got {self.order}")
        object.__setattr__(self, "left", coerce_coefficient(self.left))
        object.__setattr__(self, "right", coerce_coefficient(self.right))
        if self.left == 0 and self.right == 0:
            raise SpecError(f"boundary row of order {self.order} has no nonzero coefficient")

    @property
    def side(self) -> str:
        if self.left != 0 and self.right != 0:
            return COUPLED
        return LEFT if self.left != 0 else RIGHT

    @property
    def coupled(self) -> bool:
        return self.side == COUPLED

    @property
    def beta(self) -> Coefficient | None:
        """Coupling constant ``right / left`` of a coupled row."""
        return _div(self.right, self.left) if self.coupled else None

    def normalized(self) -> "BoundaryRow":
        if self.coupled:
            return BoundaryRow(self.order, Fraction(1), _div(self.right, self.left))
        if self.side == LEFT:
            return BoundaryRow(self.order, Fraction(1), Fraction(0))
        return BoundaryRow(self.order, Fraction(0), Fraction(1))


@dataclass(frozen=True)
class Direction:
    """Direction coefficient ``a = sign * i``."""

    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise SpecError(f"direction sign must be +1 or -1, got {self.sign!r}")

    @property
    def value(self) -> complex:
        return complex(0, self.sign)

    @property
    def label(self) -> str:
        return "+i" if self.sign > 0 else "-i"

    @classmethod
    def parse(cls, text: Any) -> "Direction":
        if isinstance(text, Direction):
            return text
        if isinstance(text, int) and not isinstance(text, bool):
            return cls(text)
        key = str(text).strip().lower().replace(" ", "").replace("j", "i")
        if key in ("+i", "i", "1i", "+1i", "plus"):
            return cls(1)
        if key in ("-i", "-1i", "minus"):
            return cls(-1)
        raise SpecError(f"direction must be '+i' or '-i', got {text!r}")

    def __str__(self):
        return self.label


PLUS_I = Direction(1)
MINUS_I = Direction(-1)


def normalize_rows(rows: Iterable[BoundaryRow]) -> tuple[BoundaryRow, ...]:
    """Reduce rows to the canonical form described in the module docstring.

    Raises :class:`RankError` when the rows are linearly dependent. Rows of
    different orders touch disjoint columns of the 3x6 boundary matrix, so
    the rank is the sum of per-order ranks.
    """
    by_order: dict[int, list[BoundaryRow]] = {}
    for row in rows:
        by_order.setdefault(row.order, []).append(row)
    out = []
    for order, group in sorted(by_order.items()):
        if len(group) > 2:
            raise RankError(
                f"{len(group)} conditions of order {order} on two endpoints are dependent"
            )
        if len(group) == 2:
            a, b = group
            if a.left * b.right - a.right * b.left == 0:
                raise RankError(f"the two conditions of order {order} are proportional")
            out += [BoundaryRow(order, 1, 0), BoundaryRow(order, 0, 1)]
        else:
            out.append(group[0].normalized())
    out.sort(key=lambda r: (r.order, _SIDE_RANK[r.side]))
    return tuple(out)


@dataclass(frozen=True)
class ProblemSpec:
    """A validated third-order problem: three boundary rows and a direction.

    Construction normalizes the rows, so two specs describing the same
    boundary conditions compare equal regardless of row order or scaling.
    """

    rows: tuple[BoundaryRow, ...]
    a: Direction = field(default=PLUS_I)

    def __post_init__(self):
        rows = tuple(self.rows)
        if len(rows) != 3:
            raise SpecError(f"a third-order problem needs exactly 3 boundary rows, got {len(rows)}")
        for r in rows:
            if not isinstance(r, BoundaryRow):
                raise SpecError(f"expected BoundaryRow, got {type(r).__name__}")
        object.__setattr__(self, "rows", normalize_rows(rows))
        object.__setattr__(self, "a", Direction.parse(self.a))

    @property
    def couplings(self) -> tuple[Coefficient, ...]:
        return tuple(r.beta for r in self.rows if r.coupled)

    def with_direction(self, a) -> "ProblemSpec":
        return ProblemSpec(self.rows, Direction.parse(a))

    def boundary_matrix(self):
        """The 3x6 matrix with columns q(0), q(1), q'(0), q'(1), q''(0), q''(1)."""
        mat = [[0j] * 6 for _ in range(3)]
        for i, r in enumerate(self.rows):
            mat[i][2 * r.order] = complex(r.left)
            mat[i][2 * r.order + 1] = complex(r.right)
        return mat


def coupling_count(spec: ProblemSpec) -> int:
    """Number of boundary rows linking both endpoints."""
    return sum(1 for r in spec.rows if r.coupled)


# -- document format -------------------------------------------------------

def _row_from_mapping(entry: Any, index: int) -> BoundaryRow:
    if not isinstance(entry, dict):
        raise SpecError(f"bc[{index}] must be a table/object")
    missing = {"order", "left", "right"} - entry.keys()
    if missing:
        raise SpecError(f"bc[{index}] missing field(s): {', '.join(sorted(missing))}")
    order = entry["order"]
    if isinstance(order, (list, tuple)):
        orders = set(order)
        if len(orders) > 1:
            raise RobinConditionError(
                f"bc[{index}] mixes derivative orders {sorted(orders)}; Robin conditions are unsupported"
            )
        (order,) = orders
    if isinstance(order, Fraction) and order.denominator == 1:
        order = int(order)
    return BoundaryRow(order, entry["left"], entry["right"])


def spec_from_mapping(doc: Any) -> ProblemSpec:
    if not isinstance(doc, dict):
        raise SpecError("problem document must be a table/object")
    if "direction" not in doc:
        raise SpecError("problem document has no 'direction'")
    bc = doc.get("bc")
    if not isinstance(bc, list):
        raise SpecError("problem document needs a list 'bc' of boundary rows")
    rows = [_row_from_mapping(entry, i) for i, entry in enumerate(bc)]
    return ProblemSpec(tuple(rows), Direction.parse(doc["direction"]))


def parse_spec(text: str, fmt: str | None = None) -> ProblemSpec:
    """Parse a problem document in JSON or TOML.

    ``fmt`` is ``"json"``, ``"toml"`` or None to sniff (a leading ``{``
    means JSON). Decimal literals are read exactly.
    """
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else "toml"
    try:
        if fmt == "json":
            doc = json.loads(text, parse_float=Fraction)
        elif fmt == "toml":
            doc = tomllib.loads(text, parse_float=Fraction)
        else:
            raise SpecError(f"unknown document format {fmt!r}")
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise SpecError(f"malformed {fmt} document: {exc}") from exc
    return spec_from_mapping(doc)


def _render_coefficient(c: Coefficient):
    if isinstance(c, complex):
        return [c.real, c.imag]
    if c.denominator == 1:
        return int(c)
    den = c.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    if den == 1:
        # terminating decimal: exact as a JSON number
        return float(c) if Fraction(repr(float(c))) == c else str(c)
    return str(c)


def spec_to_mapping(spec: ProblemSpec) -> dict:
    return {
        "direction": spec.a.label,
        "bc": [
            {"order": r.order, "left": _render_coefficient(r.left), "right": _render_coefficient(r.right)}
            for r in spec.rows
        ],
    }


def render_spec(spec: ProblemSpec) -> str:
    """Serialize to the JSON document format; ``parse_spec`` inverts it."""
    return json.dumps(spec_to_mapping(spec), indent=2)
