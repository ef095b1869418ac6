"""Command line surface: magnus-lab <gen-minimal|certify|bounds|magnus|gain-test>.

Reports are deterministic JSON (or flattened CSV with --csv): rationals are
emitted as exact "p/q" strings, floats as decimals with MAGNUS_LAB_PRECISION
significant digits (default 15), and there are no timestamps.  Exit codes:
0 success / verdict true, 1 verdict false, 2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from fractions import Fraction

import mpmath

from . import __version__
from .errors import MagnusLabError, NotNilpotent, ParseError
from .linalg import FloatMatrix, NormKind, RationalMatrix, op_norm
from . import bounds as bounds_mod
from .counterexamples import (
    MinimalPair,
    certify_divergence,
    minimal_magnus_terms,
    minimal_pair_matrices,
    minimal_term_asymptote,
    psi_measure,
)
from .measures import (
    cumulative_norm,
    load_measure,
    magnus_terms,
    rexp_exact,
    rexp_float,
    weighted_second_term,
)

_NORMS = {"l1": NormKind.L1_OP, "linf": NormKind.LINF_OP, "l2": NormKind.L2_OP}

_PI_FORM = re.compile(r"^([+-]?)(\d+(?:/\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+))?$")


def _digits() -> int:
    raw = os.environ.get("MAGNUS_LAB_PRECISION", "15")
    try:
        return max(1, min(30, int(raw)))
    except ValueError:
        return 15


def _fmt(x, digits=None):
    digits = digits or _digits()
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, digits)
    if isinstance(x, float):
        return format(x, f".{digits}g")
    return x


def _fmt_matrix(m):
    if isinstance(m, RationalMatrix):
        return [[_fmt(v) for v in row] for row in m.entries]
    if isinstance(m, FloatMatrix):
        return [[_fmt(float(v)) for v in row] for row in m.array.tolist()]
    return m


def _parse_alpha(text: str):
    """Angle parser: 'pi', '-pi', 'pi/3', '2pi/5', '3/4 pi', or a float."""
    s = text.strip().lower().replace(" ", "")
    m = _PI_FORM.match(s)
    if m:
        sign = -1 if m.group(1) == "-" else 1
        coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        if m.group(3):
            coef /= int(m.group(3))
        return sign * coef
    try:
        val = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"cannot parse angle {text!r}") from exc
    if val == 0:
        return Fraction(0)
    return float(val)


def _minimal_pair_from_args(args) -> MinimalPair:
    alpha = _parse_alpha(args.alpha)
    eps = Fraction(args.eps)
    if isinstance(alpha, Fraction):
        return MinimalPair.of_pi(alpha, eps)
    return MinimalPair(alpha, float(eps), eps_exact=eps)


def _report(command: str, inputs: dict, outputs: dict) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "outputs": outputs,
        "versions": f"magnus-lab {__version__}",
    }


def _emit(report: dict, args, csv_rows=None) -> None:
    if getattr(args, "csv", False) and csv_rows is not None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in csv_rows:
            writer.writerow(row)
        text = buf.getvalue()
    else:
        text = json.dumps(report, indent=2) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen_minimal(args) -> int:
    pair = _minimal_pair_from_args(args)
    kind = _NORMS[args.norm]
    m1, m2 = minimal_pair_matrices(pair)
    n1, n2 = float(op_norm(m1, kind)), float(op_norm(m2, kind))
    if kind is NormKind.L2_OP:
        a, e = pair.alpha, abs(pair.eps)
        formula = (
            0.5 * math.pi * e
            + math.hypot((math.pi - a) / 2, (math.pi + a) / 2 * e / 2)
            + math.hypot((math.pi + a) / 2, (math.pi - a) / 2 * e / 2)
        )
    else:
        formula = math.pi + math.pi * abs(pair.eps)
    terms = minimal_magnus_terms(pair, args.order)
    rows = []
    for k, term in enumerate(terms, start=1):
        entry = {
            "k": k,
            "matrix": _fmt_matrix(term),
            "norm": _fmt(float(op_norm(term, kind))),
            "offdiag": _fmt(term[0, 1]),
        }
        if k >= 2:
            asym = minimal_term_asymptote(pair, k)[0, 1]
            entry["asymptote"] = _fmt(asym)
            entry["abs_error"] = _fmt(abs(term[0, 1] - asym))
        rows.append(entry)
    outputs = {
        "m1": _fmt_matrix(m1),
        "m2": _fmt_matrix(m2),
        "norm_m1": _fmt(n1),
        "norm_m2": _fmt(n2),
        "cumulative_norm_direct": _fmt(n1 + n2),
        "cumulative_norm_formula": _fmt(formula),
        "exact_pi_path": pair.exact,
        "terms": rows,
    }
    report = _report(
        "gen-minimal",
        {"alpha": args.alpha, "eps": args.eps, "order": args.order, "norm": args.norm},
        outputs,
    )
    csv_rows = [["k", "offdiag", "asymptote", "abs_error", "norm"]] + [
        [r["k"], r["offdiag"], r.get("asymptote", ""), r.get("abs_error", ""), r["norm"]]
        for r in rows
    ]
    _emit(report, args, csv_rows)
    return 0


def cmd_certify(args) -> int:
    n = args.n
    phi = psi_measure(n)
    p = rexp_exact(phi)
    cert = certify_divergence(n)
    outputs = {
        "rexp": _fmt_matrix(p),
        "cumulative_norm": _fmt(cumulative_norm(phi, NormKind.L1_OP)),
        "certificate": cert.to_json(),
    }
    report = _report("certify", {"n": n}, outputs)
    csv_rows = [["key", "value"], ["n", n]] + [
        [k, v] for k, v in cert.to_json().items() if k != "n"
    ]
    _emit(report, args, csv_rows)
    return 0 if cert.parity_verdict else 1


def cmd_bounds(args) -> int:
    if args.d_min < 3 or args.d_min > args.d_max:
        raise ParseError("need 3 <= d-min <= d-max")
    rows = []
    for d in range(args.d_min, args.d_max + 1):
        profile = bounds_mod.dimension_profile(d, args.theta)
        rows.append(profile.to_json(digits=_digits(), variant=args.theta))
    report = _report(
        "bounds",
        {"d_min": args.d_min, "d_max": args.d_max, "theta": args.theta},
        {"rows": rows},
    )
    header = list(rows[0].keys())
    csv_rows = [header] + [[r[h] for h in header] for r in rows]
    _emit(report, args, csv_rows)
    return 0


def cmd_magnus(args) -> int:
    phi = load_measure(args.measure)
    kind = _NORMS[args.norm]
    terms = magnus_terms(phi, args.order)
    outputs = {
        "n": phi.n,
        "steps": len(phi.steps),
        "cumulative_norm": _fmt(cumulative_norm(phi, kind)),
        "mu": [
            {"k": k, "matrix": _fmt_matrix(t), "norm": _fmt(op_norm(t, kind))}
            for k, t in enumerate(terms.terms, start=1)
        ],
    }
    try:
        outputs["rexp"] = _fmt_matrix(rexp_exact(phi))
        outputs["rexp_kind"] = "exact"
    except NotNilpotent:
        outputs["rexp"] = _fmt_matrix(rexp_float(phi))
        outputs["rexp_kind"] = "float"
        outputs["warning"] = "non-nilpotent steps: ordered exponential computed in floating point"
    if args.lam:
        outputs["weighted_second_term"] = {
            str(lam): _fmt_matrix(weighted_second_term(phi, lam)) for lam in args.lam
        }
    report = _report(
        "magnus",
        {
            "measure": args.measure,
            "order": args.order,
            "norm": args.norm,
            "lambda": [str(l) for l in args.lam or []],
        },
        outputs,
    )
    csv_rows = [["k", "norm"]] + [[m["k"], m["norm"]] for m in outputs["mu"]]
    _emit(report, args, csv_rows)
    return 0


def cmd_gain_test(args) -> int:
    lambdas = args.lam or [Fraction(1, 10), Fraction(1, 4), Fraction(1, 2)]
    summary = bounds_mod.gain_bound_trials(
        args.trials, args.seed, lambdas, optimal_r=args.optimal_r
    )
    summary["max_ratio"] = _fmt(summary["max_ratio"])
    report = _report(
        "gain-test",
        {"trials": args.trials, "seed": args.seed, "lambda": summary["lambdas"]},
        summary,
    )
    csv_rows = [["key", "value"]] + [[k, v] for k, v in summary.items()]
    _emit(report, args, csv_rows)
    return 0 if summary["all_dominated"] else 1


# ---------------------------------------------------------------------------


def _lambda_list(text: str):
    try:
        return [Fraction(part) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad lambda list {text!r}") from exc


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _nonzero_fraction(text: str) -> str:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad rational {text!r}") from exc
    if value == 0:
        raise argparse.ArgumentTypeError("eps must be nonzero")
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magnus-lab",
        description="Divergent Magnus/BCH counterexamples, exact certificates, "
        "expansion terms and dimension-dependent convergence bounds.",
    )
    parser.add_argument("--version", action="version", version=f"magnus-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-minimal", help="2x2 minimal pair: matrices, norms, terms")
    p.add_argument("--alpha", default="0", help="angle: float, or pi forms like pi/3, -pi")
    p.add_argument("--eps", type=_nonzero_fraction, default="1", help="nonzero coupling")
    p.add_argument("--order", type=_positive_int, default=40, metavar="K")
    p.add_argument("--norm", choices=sorted(_NORMS), default="l1")
    p.set_defaults(func=cmd_gen_minimal)

    p = sub.add_parser("certify", help="exact divergence certificate for the n-step family")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("bounds", help="per-dimension bound profiles")
    p.add_argument("--d-min", type=int, required=True)
    p.add_argument("--d-max", type=int, required=True)
    p.add_argument("--theta", choices=bounds_mod.THETA_VARIANTS, default="r1")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("magnus", help="expansion terms of a step measure from JSON")
    p.add_argument("measure", help="path to a step-measure JSON file")
    p.add_argument("--order", type=_positive_int, default=40, metavar="K")
    p.add_argument("--norm", choices=sorted(_NORMS), default="l1")
    p.add_argument("--lambda", dest="lam", type=_lambda_list, default=None,
                   help="comma-separated weights for the second-order integral")
    p.set_defaults(func=cmd_magnus)

    p = sub.add_parser("gain-test", help="seeded dominance trials for the gain bound")
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda", dest="lam", type=_lambda_list, default=None)
    p.add_argument("--optimal-r", action="store_true",
                   help="use the gain-maximizing covering ratio instead of 1 - 2/n")
    p.set_defaults(func=cmd_gain_test)

    for sp in sub.choices.values():
        sp.add_argument("--csv", action="store_true", help="flatten tables to CSV")
        sp.add_argument("--out", default=None, help="write the report to a file")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "certify" and args.n < 2:
        parser.error("--n must be >= 2")
    if args.command == "bounds" and (args.d_min < 3 or args.d_min > args.d_max):
        parser.error("need 3 <= d-min <= d-max")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MagnusLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
