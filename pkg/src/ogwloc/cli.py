"""Command-line front end.

Subcommands:
  welschinger     one Welschinger number via the localization engine
  ogw             one equivariant invariant, any route
  correlator      a specialized correlator series
  bracket         one open descendent integral
  relation-check  the degree-two vanishing identity for a range of ranks
  selftest        run the packaged acceptance suite

Exact numbers are printed as integer or "p/q" strings, never floats.
Exit codes: 0 success, 1 invalid key/usage value, 2 internal failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .algebra import lambda_space
from .descendents import bracket
from .errors import EvalSingular, InvalidKey, NonPolynomialResult, OgwlocError, SubstitutionSingular
from .invariants import InvariantValue, expected_degree, ogw, welschinger, welschinger_key
from .profiles import InvariantKey
from .rationals import rat_to_str


def _poly_json(value: InvariantValue) -> object:
    if value.poly.is_constant():
        return rat_to_str(value.poly.constant_value()) if not value.is_zero() else "0"
    return [[list(e), rat_to_str(c)] for e, c in sorted(value.poly.terms.items())]


def _emit(report: dict, fmt: str, csv_columns=None) -> None:
    if fmt == "json":
        print(json.dumps(report, sort_keys=True))
    elif fmt == "csv":
        cols = csv_columns or list(report)
        print(",".join(str(report.get(c, "")) for c in cols))
    else:
        for k, v in report.items():
            print(f"{k}: {v}")


def _cmd_welschinger(args) -> int:
    t0 = time.time()
    value = welschinger(args.k, args.l)
    key = welschinger_key(args.k, args.l)
    report = {
        "k": args.k,
        "l": args.l,
        "beta": key.beta,
        "value": value,
        "route": "orbits",
        "seconds": round(time.time() - t0, 3),
    }
    _emit(report, args.format, ["k", "l", "beta", "value", "route", "seconds"])
    return 0


def _cmd_ogw(args) -> int:
    lvec = tuple(int(x) for x in args.lvec.split(",")) if args.lvec else (0,) * (2 * args.m + 1)
    key = InvariantKey(args.m, args.k, lvec, args.beta)
    t0 = time.time()
    value = ogw(key, route=args.route)
    report = {
        "key": {"m": key.m, "k": key.k, "lvec": list(key.lvec), "beta": key.beta},
        "expected_degree": expected_degree(key),
        "value": _poly_json(value),
        "route": args.route,
        "timing": round(time.time() - t0, 3),
    }
    _emit(report, args.format)
    return 0


def _cmd_correlator(args) -> int:
    from .correlators import correlator_at
    from .rationals import rat_from_str

    eta_caps = tuple(int(x) for x in args.eta_caps.split(",")) if args.eta_caps else (0,) * (2 * args.m + 1)
    d = rat_from_str(args.d)
    series = correlator_at(args.m, args.a, d, args.q_cap, eta_caps)
    names = lambda_space(args.m)
    coeffs = []
    for e, c in sorted(series.coeffs.items()):
        coeffs.append({"exponent": list(e), "value": c.to_json()})
    report = {
        "m": args.m,
        "a": args.a,
        "d": args.d,
        "q_cap": args.q_cap,
        "eta_caps": list(eta_caps),
        "lambda_vars": list(names),
        "coefficients": coeffs,
    }
    _emit(report, args.format)
    return 0


def _cmd_bracket(args) -> int:
    a_list = [int(x) for x in args.a_list.split(",")] if args.a_list else []
    value = bracket(a_list, args.k)
    _emit({"a_list": a_list, "k": args.k, "value": value}, args.format)
    return 0


def _relation_value(m: int) -> bool:
    key = InvariantKey(m, 1, (0,) * (2 * m + 1), 2)
    return ogw(key).is_zero()


def _cmd_relation_check(args) -> int:
    ms = list(range(1, args.m_max + 1))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_relation_value, ms))
    else:
        results = [_relation_value(m) for m in ms]
    ok = sum(1 for r in results if r)
    print(f"{'OK' if ok == len(ms) else 'FAIL'}: {ok}/{len(ms)} vanish")
    return 0 if ok == len(ms) else 2


def _cmd_selftest(args) -> int:
    import pytest

    here = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    target = os.path.join(here, "tests", "test_acceptance.py")
    if not os.path.exists(target):
        print("acceptance suite not found; run pytest from a source checkout", file=sys.stderr)
        return 2
    return pytest.main(["-v", target])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ogwloc", description=__doc__)
    parser.add_argument("--format", choices=["json", "csv", "text"], default="json")
    parser.add_argument("--cache-dir", default=None, help="override the correlator cache directory")
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("welschinger")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.set_defaults(func=_cmd_welschinger)

    p = sub.add_parser("ogw")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lvec", default="")
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--route", choices=["labeled", "orbits", "diagrams"], default="orbits")
    p.set_defaults(func=_cmd_ogw)

    p = sub.add_parser("correlator")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--d", required=True, help="positive rational p or p/q with q in {1,2}")
    p.add_argument("--q-cap", type=int, default=0)
    p.add_argument("--eta-caps", default="")
    p.set_defaults(func=_cmd_correlator)

    p = sub.add_parser("bracket")
    p.add_argument("--a-list", default="", help="comma-separated interior indices")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=_cmd_bracket)

    p = sub.add_parser("relation-check")
    p.add_argument("--m-max", type=int, default=8)
    p.set_defaults(func=_cmd_relation_check)

    p = sub.add_parser("selftest")
    p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cache_dir:
        os.environ["OGWLOC_CACHE_DIR"] = args.cache_dir
    try:
        return args.func(args)
    except InvalidKey as exc:
        print(f"invalid key: {exc}", file=sys.stderr)
        return 1
    except (SubstitutionSingular, NonPolynomialResult, EvalSingular, AssertionError) as exc:
        print(f"internal failure: {exc}", file=sys.stderr)
        return 2
    except OgwlocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
