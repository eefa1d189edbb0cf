"""Command-line interface.

Exact subcommands (enumerate, wg, mu, mu2, moment, cumulant, k2-limit, ds)
print exact values: integers stay JSON integers and non-integral rationals
become "p/q" strings.  Monte Carlo subcommands (mc ds / mc words /
mc chebyshev) print a JSON report embedding the full run configuration.

Exit status: 0 on success, 2 on a validation error, 3 when a size cap
would be exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import montecarlo, noncrossing, second_order, weingarten
from .caps import CapExceeded
from .permutations import Permutation
from .second_order import HaarLetterSpace, TraceWordSpec, UnitLetterSpace


def _scalar(value) -> object:
    f = Fraction(value)
    return int(f) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _emit(payload: dict, args) -> None:
    fmt = getattr(args, "format", "json")
    if fmt == "json":
        text = json.dumps(payload)
    elif fmt == "csv":
        text = _to_csv(payload)
    else:
        text = _to_pretty(payload)
    print(text)
    out = getattr(args, "json_path", None)
    if out:
        with open(out, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")


def _to_csv(payload: dict) -> str:
    rows = payload.get("entries")
    if rows is None:
        keys = list(payload)
        return ",".join(keys) + "\n" + ",".join(str(payload[k]) for k in keys)
    keys = list(rows[0]) if rows else []
    lines = [",".join(keys)]
    lines += [",".join(str(r.get(k, "")) for k in keys) for r in rows]
    return "\n".join(lines)


def _to_pretty(payload: dict) -> str:
    rows = payload.get("entries")
    if rows is None:
        return "\n".join(f"{k} = {v}" for k, v in payload.items())
    lines = [f"{k}: {v}" for k, v in payload.items() if k not in ("entries", "gaussianity")]
    for r in rows:
        lines.append("  " + "  ".join(f"{k}={v}" for k, v in r.items()))
    for d in payload.get("gaussianity", []):
        lines.append("  " + "  ".join(f"{k}={v}" for k, v in d.items()))
    return "\n".join(lines)


def _parse_cycle_type(text: str) -> tuple[int, ...]:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise ValueError(f"bad cycle type {text!r}; expected e.g. 2,1")
    if any(p < 1 for p in parts):
        raise ValueError("cycle lengths must be positive")
    return tuple(sorted(parts, reverse=True))


def _parse_eps(text: str) -> noncrossing.EpsilonVector:
    signs = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok in ("+", "+1", "1"):
            signs.append(1)
        elif tok in ("-", "-1"):
            signs.append(-1)
        else:
            raise ValueError(f"bad sign token {tok!r}; expected + or -")
    return noncrossing.EpsilonVector(tuple(signs))


def _parse_word(text: str) -> list[int]:
    """Comma-separated U / U* tokens into a sign list."""
    signs = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok == "U":
            signs.append(1)
        elif tok == "U*":
            signs.append(-1)
        else:
            raise ValueError(f"bad word token {tok!r}; expected U or U*")
    return signs


def _parse_entry(x) -> Fraction:
    return Fraction(x)


def _load_spec_groups(data: dict) -> TraceWordSpec:
    return TraceWordSpec.from_groups(
        [[(int(letter["d"]), int(letter["eps"])) for letter in group] for group in data["groups"]]
    )


def _load_matrices(data: dict) -> list:
    return [
        [[_parse_entry(x) for x in row] for row in mat] for mat in data.get("D", [])
    ]


def _parse_reduced_word(text: str) -> second_order.ReducedWord:
    letters = []
    for tok in text.split():
        if not tok.startswith("U"):
            raise ValueError(f"bad reduced-word token {tok!r}; expected like U1 or U2^-1")
        body = tok[1:]
        if "^" in body:
            fam, exp = body.split("^", 1)
        else:
            fam, exp = body, "1"
        letters.append((int(fam), int(exp)))
    return second_order.ReducedWord(tuple(letters))


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_enumerate(args) -> None:
    if args.what == "nc":
        stream = noncrossing.enumerate_nc(args.n)
    elif args.what == "snc":
        stream = noncrossing.enumerate_snc(args.m, args.n)
    else:
        stream = noncrossing.s_epsilon(_parse_eps(args.eps))
    count = 0
    for p in stream:
        count += 1
        if not args.count_only:
            print(json.dumps(p.to_json()))
    print(json.dumps({"count": count}))


def _cmd_wg(args) -> None:
    ctype = _parse_cycle_type(args.cycle_type)
    if sum(ctype) != args.n:
        raise ValueError(f"cycle type {ctype} does not sum to n = {args.n}")
    f = weingarten.weingarten_by_type(ctype)
    if args.at is not None:
        _emit({"value": _scalar(f.eval_at(args.at))}, args)
    elif args.series is not None:
        from .ratfunc import series

        s = series(f, args.series)
        _emit({"offset": s.offset, "coeffs": [_scalar(c) for c in s.coeffs]}, args)
    else:
        _emit(f.to_json(), args)


def _cmd_mu(args) -> None:
    ctype = _parse_cycle_type(args.cycle_type)
    p = weingarten.permutation_of_type(ctype)
    _emit({"value": weingarten.mu(p)}, args)


def _cmd_mu2(args) -> None:
    p1 = weingarten.permutation_of_type(_parse_cycle_type(args.cycle_type1))
    p2 = weingarten.permutation_of_type(_parse_cycle_type(args.cycle_type2))
    _emit({"value": _scalar(weingarten.mu2(p1, p2))}, args)


def _cmd_moment(args) -> None:
    with open(args.spec) as fh:
        data = json.load(fh)
    spec = _load_spec_groups(data)
    value = second_order.exact_mixed_moment(spec, _load_matrices(data), args.N)
    _emit({"value": _scalar(value)}, args)


def _cmd_cumulant(args) -> None:
    with open(args.spec) as fh:
        data = json.load(fh)
    specs = [_load_spec_groups(obs) for obs in data["observables"]]
    value = second_order.exact_cumulant(specs, _load_matrices(data), args.N)
    _emit({"value": _scalar(value)}, args)


def _cmd_k2_limit(args) -> None:
    left = _parse_word(args.left)
    right = _parse_word(args.right)
    spec_l = TraceWordSpec.from_groups([[(0, e) for e in left]])
    spec_r = TraceWordSpec.from_groups([[(0, e) for e in right]])
    letters = (0,) * (len(left) + len(right))
    value = second_order.limit_k2(spec_l, spec_r, letters, HaarLetterSpace())
    _emit({"value": _scalar(value)}, args)


def _cmd_ds(args) -> None:
    _emit({"value": second_order.ds_covariance(args.r, args.s)}, args)


def _cmd_mc(args) -> None:
    cfg = montecarlo.RngConfig(seed=args.seed)
    if args.mc_what == "ds":
        report = montecarlo.experiment_ds(
            args.max_power, args.N, args.samples, cfg, threads=args.threads
        )
    elif args.mc_what == "words":
        words = (
            [_parse_reduced_word(w) for w in args.words.split(",")]
            if args.words
            else list(montecarlo.DEFAULT_WORD_SUITE)
        )
        report = montecarlo.experiment_reduced_words(
            words, args.N, args.samples, cfg, threads=args.threads
        )
    else:
        report = montecarlo.experiment_chebyshev(
            args.max_degree, args.N, args.samples, cfg, threads=args.threads
        )
    _emit(report, args)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="haarfluct",
        description="Exact Weingarten calculus and trace-fluctuation statistics "
        "for Haar unitary and GUE random matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
        p.add_argument("--json", dest="json_path", metavar="PATH",
                       help="also write the payload to this file")

    p = sub.add_parser("enumerate", help="stream permutation families as JSON lines")
    se = p.add_subparsers(dest="what", required=True)
    q = se.add_parser("nc", help="non-crossing permutations of [1,n]")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--count-only", action="store_true")
    q = se.add_parser("snc", help="annular non-crossing permutations on circles (m,n)")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--count-only", action="store_true")
    q = se.add_parser("s-eps", help="permutations swapping the +/- camps of a sign pattern")
    q.add_argument("--eps", required=True, help="comma-separated signs, e.g. +,+,-,-")
    q.add_argument("--count-only", action="store_true")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("wg", help="Weingarten function of a cycle type, exact in N")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cycle-type", required=True, help="e.g. 2,1")
    p.add_argument("--at", type=int, help="evaluate at this integer N")
    p.add_argument("--series", type=int, metavar="K", help="expand to K coefficients in 1/N")
    add_format(p)
    p.set_defaults(func=_cmd_wg)

    p = sub.add_parser("mu", help="leading 1/N coefficient of the Weingarten function")
    p.add_argument("--cycle-type", required=True)
    add_format(p)
    p.set_defaults(func=_cmd_mu)

    p = sub.add_parser("mu2", help="leading coefficient of Wg(p1 x p2) - Wg(p1)Wg(p2)")
    p.add_argument("--cycle-type1", required=True)
    p.add_argument("--cycle-type2", required=True)
    add_format(p)
    p.set_defaults(func=_cmd_mu2)

    p = sub.add_parser("moment", help="exact Haar expectation of a product of trace words")
    p.add_argument("--spec", required=True, help="JSON file with groups and D matrices")
    p.add_argument("--N", type=int, required=True)
    add_format(p)
    p.set_defaults(func=_cmd_moment)

    p = sub.add_parser("cumulant", help="exact joint cumulant of trace observables")
    p.add_argument("--spec", required=True, help="JSON file with observables and D matrices")
    p.add_argument("--N", type=int, required=True)
    add_format(p)
    p.set_defaults(func=_cmd_cumulant)

    p = sub.add_parser("k2-limit", help="limiting covariance of two unit-letter trace words")
    p.add_argument("--left", required=True, help='comma-separated word, e.g. "U,U"')
    p.add_argument("--right", required=True, help='e.g. "U*,U*"')
    add_format(p)
    p.set_defaults(func=_cmd_k2_limit)

    p = sub.add_parser("ds", help="limiting covariance of Tr(U^r) and Tr(U^s)")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    add_format(p)
    p.set_defaults(func=_cmd_ds)

    p = sub.add_parser("mc", help="Monte Carlo experiments")
    sm = p.add_subparsers(dest="mc_what", required=True)
    q = sm.add_parser("ds", help="sampled covariance table of Tr(U^r)")
    q.add_argument("--N", type=int, default=50)
    q.add_argument("--samples", type=int, default=200_000)
    q.add_argument("--max-power", type=int, default=3)
    q = sm.add_parser("words", help="sampled covariances of reduced-word traces")
    q.add_argument("--N", type=int, default=50)
    q.add_argument("--samples", type=int, default=100_000)
    q.add_argument("--words", help='comma-separated words like "U1 U2,U2^-1 U1^-1"')
    q = sm.add_parser("chebyshev", help="sampled GUE Chebyshev covariance table")
    q.add_argument("--N", type=int, default=200)
    q.add_argument("--samples", type=int, default=5_000)
    q.add_argument("--max-degree", type=int, default=4)
    for q in sm.choices.values():
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--threads", type=int, default=1)
        add_format(q)
    p.set_defaults(func=_cmd_mc)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
