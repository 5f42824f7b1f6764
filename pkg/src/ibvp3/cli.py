"""Command-line front end.

    ibvp3 classify problem.toml
    ibvp3 zeros problem.toml --k-max 4 --format json
    ibvp3 verdict problem.json --direction both
    ibvp3 pseudo4 1 1 1 1

Exit codes: 0 ok, 2 parse or usage error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction
from pathlib import Path

from . import __version__
from .chardet import CanonicalForm, canonical_form, fourth_order_beta, fourth_order_pseudoperiodic_illposed
from .exceptions import NumericalError, SpecError
from .problem import MINUS_I, PLUS_I, Direction, ProblemSpec, coerce_coefficient, parse_spec, spec_to_mapping
from .series import growth_profile
from .wellposed import classify, verdict
from .zeros import DEFAULT_RESIDUAL_TOL, ORIGIN, asymptotic_zero, families, fit_decay_rate, zero_table

SCHEMA = 1
DEFAULTS = {"k_max": 12, "residual_tol": DEFAULT_RESIDUAL_TOL, "format": "text", "direction": None}
VERDICT_MIN_K = 8
EXIT_OK, EXIT_PARSE, EXIT_NUMERICAL = 0, 2, 3

NO_ZEROS_NOTE = "No such λ_k or μ_k"
COUPLING_NOTE = "coupled rows are normalized to (1, beta) with beta = right/left"


class _Usage(Exception):
    pass


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _exact(x):
    """JSON form of a scalar parameter: exact ``p/q`` string plus its float value."""
    if x is None:
        return None
    if isinstance(x, complex):
        return {"exact": None, "value": [x.real, x.imag]}
    if isinstance(x, Fraction):
        return {"exact": str(x), "value": float(x)}
    return {"exact": None, "value": float(x)}


def _form_dict(cf: CanonicalForm) -> dict:
    return {
        "form": cf.form,
        "W": cf.W,
        "X": _exact(cf.X),
        "Y": _exact(cf.Y),
        "table_row": list(cf.table_row) if cf.table_row else None,
        "description": cf.describe(),
    }


def _directions(choice: str | None, spec: ProblemSpec) -> list[Direction]:
    if choice is None:
        return [spec.a]
    if choice == "both":
        return [PLUS_I, MINUS_I]
    return [Direction.parse(choice)]


def _zero_rows(cf: CanonicalForm, zeros, k_max: int) -> tuple[list[dict], list[dict], dict]:
    rows, strays, rates = [], [], {}
    for fam in families(cf):
        recs = sorted((z for z in zeros if z.family == fam and z.j == 0 and 1 <= z.k <= k_max), key=lambda z: z.k)
        errs = []
        for z in recs:
            p = asymptotic_zero(cf, fam, z.k)
            err = abs(z.value - p)
            errs.append((z.k, err))
            rows.append({
                "family": fam, "j": 0, "k": z.k,
                "re": z.value.real, "im": z.value.imag, "residual": z.residual,
                "predicted_re": p.real, "predicted_im": p.imag, "error": err,
            })
        rates[fam] = fit_decay_rate(errs, [z.value for z in recs])
    for z in zeros:
        if z.k == 0 and z.family != ORIGIN and z.j == 0:
            strays.append({"re": z.value.real, "im": z.value.imag, "residual": z.residual})
    return rows, strays, rates


def _base(command: str, spec: ProblemSpec, cf: CanonicalForm) -> dict:
    rep = {
        "schema": SCHEMA,
        "command": command,
        "spec": spec_to_mapping(spec),
        "canonical_form": _form_dict(cf),
        "class": str(classify(cf)),
        "notes": [],
    }
    if spec.couplings:
        rep["notes"].append(COUPLING_NOTE)
    return rep


def _classify(spec: ProblemSpec, opts: dict) -> dict:
    cf = canonical_form(spec)
    return _base("classify", spec, cf)


def _zeros(spec: ProblemSpec, opts: dict) -> dict:
    cf = canonical_form(spec)
    rep = _base("zeros", spec, cf)
    if cf.form == "I":
        rep["zeros"], rep["unmatched"], rep["decay_rate"] = [], [], {}
        rep["notes"].append(NO_ZEROS_NOTE)
        return rep
    zeros = zero_table(cf, opts["k_max"], opts["residual_tol"], rotations=False)
    rep["zeros"], rep["unmatched"], rep["decay_rate"] = _zero_rows(cf, zeros, opts["k_max"])
    return rep


def _verdict(spec: ProblemSpec, opts: dict) -> dict:
    cf = canonical_form(spec)
    rep = _base("verdict", spec, cf)
    # the bound test needs a tail; the table still shows only k_max rows
    k_bound = max(opts["k_max"], VERDICT_MIN_K)
    zeros = [] if cf.form == "I" else zero_table(cf, k_bound, opts["residual_tol"], rotations=False)
    v = verdict(spec, zeros=zeros) if zeros else verdict(spec)
    rep["verdict"], rep["growth"] = {}, {}
    for a in _directions(opts["direction"], spec):
        rep["verdict"][a.label] = v.for_direction(a)
        if zeros:
            gp = growth_profile(zeros, a, 1.0)
            rep["growth"][a.label] = {
                "bounded_above": gp.bounded_above,
                "max_exponent": max(e.exponent for e in gp.entries),
                "divergent": not gp.bounded_above,
            }
        else:
            rep["growth"][a.label] = {"bounded_above": True, "max_exponent": None, "divergent": False}
    if zeros:
        rep["zeros"], rep["unmatched"], rep["decay_rate"] = _zero_rows(cf, zeros, opts["k_max"])
    else:
        rep["zeros"], rep["unmatched"], rep["decay_rate"] = [], [], {}
        rep["notes"].append(NO_ZEROS_NOTE)
    return rep


def _pseudo4(consts: list[str]) -> dict:
    try:
        b = [coerce_coefficient(c) for c in consts]
    except SpecError as exc:
        raise _Usage(str(exc)) from None
    beta = fourth_order_beta(b)
    return {
        "schema": SCHEMA,
        "command": "pseudo4",
        "constants": [str(c) for c in b],
        "beta": _exact(beta),
        "illposed": fourth_order_pseudoperiodic_illposed(b),
        "notes": [] if beta is not None else ["denominator vanishes; beta undefined"],
    }


# -- rendering -----------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    if isinstance(x, dict) and "value" in x:
        return x["exact"] if x["exact"] is not None else str(x["value"])
    return str(x)


def render_text(rep: dict) -> str:
    lines = []
    if rep["command"] == "pseudo4":
        lines.append(f"constants: {' '.join(rep['constants'])}")
        lines.append(f"beta: {_fmt(rep['beta']) if rep['beta'] else 'undefined'}")
        lines.append(f"ill-posed: {'yes' if rep['illposed'] else 'no'}")
    else:
        cf = rep["canonical_form"]
        lines.append(f"direction: {rep['spec']['direction']}")
        for r in rep["spec"]["bc"]:
            lines.append(f"  order {r['order']}: left={r['left']} right={r['right']}")
        lines.append(f"form: {cf['description']}")
        if cf["table_row"]:
            lines.append(f"table row: {cf['table_row'][0]}.{cf['table_row'][1]}")
        lines.append(f"class: {rep['class']}")
        for a, d in rep.get("verdict", {}).items():
            g = rep["growth"][a]
            lines.append(
                f"a={a}: conditioned={d['conditioned']} bound={d['bound']} wellposed={d['wellposed']}"
                f" series bounded={g['bounded_above']}"
            )
        if "zeros" in rep and rep["zeros"]:
            lines.append(f"{'fam':<7}{'k':>3}  {'refined':>36}  {'predicted':>36}  {'error':>10}  {'resid':>9}")
            for z in rep["zeros"]:
                ref = f"{z['re']:.12g}{z['im']:+.12g}j"
                pre = f"{z['predicted_re']:.12g}{z['predicted_im']:+.12g}j"
                lines.append(f"{z['family']:<7}{z['k']:>3}  {ref:>36}  {pre:>36}  {z['error']:10.3e}  {z['residual']:9.2e}")
            for fam, r in rep["decay_rate"].items():
                lines.append(f"decay rate ({fam}): {'n/a' if r is None else f'{r:.4f}'}")
            for s in rep["unmatched"]:
                lines.append(f"unmatched zero: {s['re']:.12g}{s['im']:+.12g}j")
    for n in rep["notes"]:
        lines.append(f"note: {n}")
    for w in rep.get("warnings", []):
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


def render_json(rep: dict) -> str:
    return json.dumps(rep, indent=2, sort_keys=True) + "\n"


# -- entry point ---------------------------------------------------------------

def _load_config(path: str) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    from .problem import tomllib
    try:
        doc = json.loads(text) if text.lstrip().startswith("{") else tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise _Usage(f"malformed config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise _Usage("config must be a table/object")
    cfg = {}
    for key, val in doc.items():
        k = key.replace("-", "_")
        if k not in DEFAULTS:
            raise _Usage(f"unknown config key {key!r}")
        cfg[k] = val
    try:
        if "k_max" in cfg:
            cfg["k_max"] = _positive_int(str(cfg["k_max"]))
        if "residual_tol" in cfg:
            cfg["residual_tol"] = _positive_float(str(cfg["residual_tol"]))
    except argparse.ArgumentTypeError as exc:
        raise _Usage(f"config: {exc}") from None
    if cfg.get("format", "text") not in ("text", "json"):
        raise _Usage("config: format must be text or json")
    if cfg.get("direction") not in (None, "+i", "-i", "both"):
        raise _Usage("config: direction must be +i, -i or both")
    return cfg


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k-max", type=_positive_int, default=None, help="zeros per family (default 12)")
    common.add_argument("--residual-tol", type=_positive_float, default=None,
                        help="relative residual accepted for a refined zero (default 1e-12)")
    common.add_argument("--format", choices=("text", "json"), default=None, help="output format (default text)")
    common.add_argument("--direction", choices=("+i", "-i", "both"), default=None,
                        help="direction(s) to report (default: the spec's own)")
    common.add_argument("--config", default=None, help="TOML or JSON file of defaults; flags win")

    ap = argparse.ArgumentParser(prog="ibvp3", description="Well-posedness classes of third-order two-point problems.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("classify", "canonical form and class"),
                        ("zeros", "zero table with asymptotic predictions"),
                        ("verdict", "full well-posedness report")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("spec", help="problem document (JSON or TOML), '-' for stdin")
    p = sub.add_parser("pseudo4", parents=[common], help="fourth-order pseudo-periodic criterion")
    p.add_argument("constants", nargs=4, metavar="b", help="the four coupling constants")
    return ap


def _options(args) -> dict:
    opts = dict(DEFAULTS)
    if args.config:
        opts.update(_load_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key)
        if val is not None:
            opts[key] = val
    return opts


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        opts = _options(args)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if args.command == "pseudo4":
                rep = _pseudo4(args.constants)
            else:
                text = sys.stdin.read() if args.spec == "-" else Path(args.spec).read_text(encoding="utf-8")
                spec = parse_spec(text)
                rep = {"classify": _classify, "zeros": _zeros, "verdict": _verdict}[args.command](spec, opts)
        msgs = []
        for w in caught:
            m = f"{w.category.__name__}: {w.message}"
            if m not in msgs:
                msgs.append(m)
        rep["warnings"] = msgs
    except (SpecError, _Usage, OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        print(f"ibvp3: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NumericalError, ValueError, ArithmeticError) as exc:
        print(f"ibvp3: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    out.write(render_json(rep) if opts["format"] == "json" else render_text(rep))
    return EXIT_OK


def main() -> int:
    return run()


if __name__ == "__main__":
    raise SystemExit(main())
