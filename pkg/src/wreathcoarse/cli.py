"""Command-line entry point.

Exit codes: 0 pass, 1 verification failure, 2 bad configuration,
3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .decomposition import (
    MetricFamily,
    depth,
    leaf_bound,
    strategy_axes_tree,
    strategy_Z_tree,
    tree_from_json,
    tree_to_json,
    verify_tree,
)
from .errors import BudgetExceeded, CertificationError
from .fixtures import GENERATOR_NAME, KINDS, generate_fixture
from .group import LamplighterPower, parse_group
from .linrep import (
    ball_sampler,
    generator_pairs,
    homomorphism_check,
    injectivity_check,
    psi,
    psi_tilde,
)
from .metric import (
    FiniteMetricSpace,
    ball_space,
    covers,
    d_multiplicity,
    family_diam,
    lebesgue_exceeds,
    lebesgue_number,
    metric_violations,
    multiplicity,
)
from .pipeline import parse_steps, run_pipeline
from .serialize import (
    decode_element,
    dumps_canonical,
    encode_element,
    format_rational,
    parse_rational,
    write_atomic,
)
from .wordmetric import growth_series, word_length

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3


def _load_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _load_space(path: str) -> FiniteMetricSpace:
    return FiniteMetricSpace.from_json(_load_json(path))


def _load_cover(path: str) -> list[frozenset]:
    obj = _load_json(path)
    if "pieces" not in obj:
        raise ValueError("cover JSON needs 'pieces'")
    return [frozenset(int(i) for i in p) for p in obj["pieces"]]


def _rational(text: str) -> Fraction:
    q = parse_rational(text)
    if not isinstance(q, Fraction):
        raise argparse.ArgumentTypeError(f"expected a finite rational, got {text!r}")
    return q


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _emit(args, payload: dict, verdict: bool, started: float) -> int:
    report = {
        "command": args.command,
        "argv": list(args.argv),
        "seed": getattr(args, "seed", None),
        "generator": GENERATOR_NAME,
        "version": __version__,
        "verdict": "pass" if verdict else "fail",
        "result": payload,
        "elapsed_seconds": round(time.perf_counter() - started, 3),
    }
    if getattr(args, "report", None):
        write_atomic(args.report, dumps_canonical(report))
    else:
        print(json.dumps(payload, sort_keys=True))
    return EXIT_PASS if verdict else EXIT_FAIL


# -- commands -------------------------------------------------------------

def cmd_wordlen(args, started):
    group = parse_group(args.group)
    x = decode_element(json.loads(args.element))
    if isinstance(group, LamplighterPower) and len(x) != group.m:
        raise ValueError(f"element has {len(x)} coordinates, group has {group.m}")
    print(word_length(x))
    return EXIT_PASS


def cmd_ball(args, started):
    space = ball_space(parse_group(args.group), args.radius)
    write_atomic(args.out, dumps_canonical(space.to_json()))
    print(f"{len(space)} points -> {args.out}")
    return EXIT_PASS


def cmd_growth(args, started):
    sizes = growth_series(parse_group(args.group), args.radius)
    text = "radius,ball_size\n" + "".join(f"{n},{s}\n" for n, s in enumerate(sizes))
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def cmd_decompose(args, started):
    space = _load_space(args.space)
    if args.strategy == "z":
        tree = strategy_Z_tree(space, args.r)
    else:
        tree = strategy_axes_tree(space, args.r, args.axes)
    write_atomic(args.out, dumps_canonical(tree_to_json(tree)))
    print(f"depth {depth(tree)}, leaf bound {format_rational(leaf_bound(tree))} -> {args.out}")
    return EXIT_PASS


def cmd_verify_witness(args, started):
    space = _load_space(args.space)
    tree = tree_from_json(_load_json(args.witness))
    rep = verify_tree(MetricFamily.whole(space), tree, args.min_scale)
    payload = rep.to_json()
    for c in rep.failures:
        print(f"FAIL {c.name}: {c.detail}", file=sys.stderr)
    return _emit(args, payload, rep.verdict, started)


def cmd_cover_pipeline(args, started):
    space = _load_space(args.space)
    steps = parse_steps(args.steps)
    try:
        payload = run_pipeline(space, args.r, args.d, args.lam, steps)
    except CertificationError as exc:
        return _emit(args, {"error": str(exc)}, False, started)
    return _emit(args, payload, True, started)


def cmd_rep_check(args, started):
    group = parse_group(args.group)
    rep_fn = psi_tilde if isinstance(group, LamplighterPower) else psi
    if args.mode == "hom":
        sampled = homomorphism_check(ball_sampler(group, args.radius), args.samples,
                                     seed=args.seed, rep=rep_fn)
        gens = homomorphism_check(generator_pairs(group), rep=rep_fn)
        failures = sampled.failures + gens.failures
        payload = {"mode": "hom", "group": group.name, "radius": args.radius,
                   "sampled_pairs": sampled.checked, "generator_pairs": gens.checked,
                   "failures": [_describe(f) for f in failures]}
    else:
        t = _rational(args.specialize) if args.specialize is not None else None
        res = injectivity_check(args.radius, group, specialize=t)
        failures = res.failures
        payload = {"mode": "inj", "group": group.name, "radius": args.radius,
                   "specialize": None if t is None else format_rational(t),
                   "elements": res.checked,
                   "collisions": [_describe(f) for f in failures]}
    return _emit(args, payload, not failures, started)


def _describe(failure: dict) -> dict:
    out = {}
    for k, v in failure.items():
        try:
            out[k] = encode_element(v)
        except TypeError:
            out[k] = v.to_json() if hasattr(v, "to_json") else repr(v)
    return out


def cmd_stats(args, started):
    space = _load_space(args.space)
    cover = _load_cover(args.cover)
    payload = {
        "points": len(space),
        "pieces": len(cover),
        "metric_violations": len(metric_violations(space)),
        "is_cover": covers(space, cover),
        "diameter_bound": format_rational(family_diam(space, [p for p in cover if p]) if any(cover) else 0),
        "multiplicity": multiplicity(space, cover),
    }
    if args.d is not None:
        payload["d_multiplicity"] = d_multiplicity(space, cover, args.d)
    if payload["is_cover"]:
        payload["lebesgue_number"] = format_rational(lebesgue_number(space, cover))
        if args.lam is not None:
            payload["lebesgue_exceeds_lambda"] = lebesgue_exceeds(space, cover, args.lam)
    return _emit(args, payload, payload["metric_violations"] == 0, started)


def cmd_fixture(args, started):
    params = {
        "grid": lambda: {"sizes": args.sizes},
        "interval": lambda: {"lo": args.lo, "hi": args.hi},
        "ball": lambda: {"group": args.group, "radius": args.radius},
        "weighted-sum": lambda: {"max_index": args.max_index, "bound": args.bound},
        "random-metric": lambda: {"n": args.n},
    }[args.kind]()
    if any(v is None for v in params.values()):
        raise ValueError(f"fixture {args.kind} needs {', '.join(params)}")
    space = generate_fixture(args.kind, params, args.seed)
    write_atomic(args.out, dumps_canonical(space.to_json()))
    print(f"{len(space)} points -> {args.out}")
    return EXIT_PASS


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wreathcoarse", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--max-ball", type=_positive_int, help="cap on BFS ball size")
    p.add_argument("--max-points", type=_positive_int, help="cap on finite space size")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("wordlen", help="word length of one element")
    s.add_argument("--group", default="zwz")
    s.add_argument("--element", required=True, help="element JSON")
    s.set_defaults(func=cmd_wordlen)

    s = sub.add_parser("ball", help="write a word-metric ball as a space JSON")
    s.add_argument("--group", default="zwz")
    s.add_argument("--radius", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_ball)

    s = sub.add_parser("growth", help="ball sizes as CSV")
    s.add_argument("--group", default="zwz")
    s.add_argument("--radius", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_growth)

    s = sub.add_parser("decompose", help="build a witness tree")
    s.add_argument("--space", required=True)
    s.add_argument("--strategy", choices=("z", "product"), default="z")
    s.add_argument("--r", type=_rational, required=True)
    s.add_argument("--axes", type=_positive_int, default=2, help="coordinates cut by the product strategy")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("verify-witness", help="check a witness tree against a space")
    s.add_argument("--space", required=True)
    s.add_argument("--witness", required=True)
    s.add_argument("--min-scale", type=_rational)
    s.add_argument("--report")
    s.set_defaults(func=cmd_verify_witness)

    s = sub.add_parser("cover-pipeline", help="run the cover transforms and certify each step")
    s.add_argument("--space", required=True)
    s.add_argument("--r", type=_rational, required=True)
    s.add_argument("--d", type=_rational, required=True)
    s.add_argument("--lambda", dest="lam", type=_rational, required=True)
    s.add_argument("--steps", default="12,23,34,41")
    s.add_argument("--report")
    s.set_defaults(func=cmd_cover_pipeline)

    s = sub.add_parser("rep-check", help="homomorphism or injectivity of the matrix representation")
    s.add_argument("--mode", choices=("hom", "inj"), required=True)
    s.add_argument("--group", default="zwz")
    s.add_argument("--radius", type=int, default=10)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--specialize", help="substitute this number for t (inj mode)")
    s.add_argument("--report")
    s.set_defaults(func=cmd_rep_check)

    s = sub.add_parser("stats", help="scalar statistics of a cover")
    s.add_argument("--space", required=True)
    s.add_argument("--cover", required=True)
    s.add_argument("--d", type=_rational)
    s.add_argument("--lambda", dest="lam", type=_rational)
    s.add_argument("--report")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("fixture", help="write a fixture space")
    s.add_argument("--kind", choices=KINDS, required=True)
    s.add_argument("--sizes", type=int, nargs="+")
    s.add_argument("--lo", type=int, default=0)
    s.add_argument("--hi", type=int)
    s.add_argument("--group", default="zwz")
    s.add_argument("--radius", type=int)
    s.add_argument("--max-index", type=int)
    s.add_argument("--bound", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_fixture)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    saved = dict(os.environ)
    if args.max_ball:
        os.environ["WREATHCOARSE_MAX_BALL"] = str(args.max_ball)
    if args.max_points:
        os.environ["WREATHCOARSE_MAX_POINTS"] = str(args.max_points)
    started = time.perf_counter()
    try:
        return args.func(args, started)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CertificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        # PreconditionError is a ValueError: inputs that cannot be processed
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    finally:
        os.environ.clear()
        os.environ.update(saved)


if __name__ == "__main__":
    sys.exit(main())
