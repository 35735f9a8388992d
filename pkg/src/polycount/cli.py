"""Command-line front end.

Subcommands: count (approximate), exact (oracle enumeration), sample
(lattice point dump), gen (benchmark instances), bench (bound experiment).

Exit codes: 0 success, 1 usage, 2 input error (parse / unbounded /
infeasible / degenerate), 3 resource cap (rounds, attempts, disturbs,
chain length, LP pivots, oracle limit).

Input rows may carry explicit relational operators (<=, <, >=, >, =);
they are rewritten to <= rows on load: >= and > flip sign, = splits into
two rows, and strict inequalities on all-integer rows tighten the bound
by one (non-integer strict rows are kept non-strict, with a warning and a
flag in the JSON metadata).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .bench import BenchInstance, bound_experiment, gen_random, gen_thin_rect, suite_instances
from .errors import (
    DegenerateBodyError,
    InfeasibleError,
    OracleLimitError,
    ParseError,
    PolycountError,
    ResourceCapError,
    UnboundedError,
)
from .estimator import RunConfig, estimate
from .oracle import exact_count
from .polytope import LoadResult, load_constraints, serialize_polytope
from .rng import Rng
from .sampler import sample_lattice, shift_facets


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _load(path: str, fmt: str) -> LoadResult:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from e
    res = load_constraints(text, format=fmt)
    for warning in res.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return res


def _add_input_args(p: _Parser):
    p.add_argument("file")
    p.add_argument(
        "--format",
        choices=["native", "dense-matrix"],
        default="native",
        help="input grammar (default: native, with an 'm n' header line)",
    )


def _build_parser() -> _Parser:
    top = _Parser(prog="polycount", description=__doc__.split("\n\n")[0])
    sub = top.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", parents=[], help="approximate lattice count")
    _add_input_args(c)
    c.add_argument("--epsilon", type=float, default=0.2)
    c.add_argument("--delta", type=float, default=0.1)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--s", type=int, default=None, help="samples per level per round")
    c.add_argument("--gamma", type=int, default=10)
    c.add_argument("--walk-len", type=int, default=None, help="walk steps (default n)")
    c.add_argument("--rmin", type=float, default=0.4)
    c.add_argument("--rmax", type=float, default=0.6)
    c.add_argument("--mu", type=float, default=0.005)
    c.add_argument("--max-rounds", type=int, default=64)
    c.add_argument(
        "--threads",
        type=int,
        default=1,
        help="reserved; counting is sequential because samples flow between levels",
    )
    c.add_argument("--json", action="store_true")

    e = sub.add_parser("exact", help="exact count by enumeration")
    _add_input_args(e)
    e.add_argument("--limit", type=int, default=10**8)
    e.add_argument("--dump-points", action="store_true")

    s = sub.add_parser("sample", help="dump near-uniform lattice samples")
    _add_input_args(s)
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--walk-len", type=int, default=None)

    g = sub.add_parser("gen", help="generate benchmark instances")
    gsub = g.add_subparsers(dest="family", required=True)
    gr = gsub.add_parser("random")
    gr.add_argument("--m", type=int, required=True)
    gr.add_argument("--n", type=int, required=True)
    gr.add_argument("--lambda", dest="lam", type=int, required=True)
    gr.add_argument("--seed", type=int, default=0)
    gr.add_argument("-o", "--output", required=True)
    gt = gsub.add_parser("thinrect")
    gt.add_argument("--n", type=int, required=True)
    gt.add_argument("--tau", type=float, required=True)
    gt.add_argument("--no-rotate", action="store_true", help="debug: skip rotation")
    gt.add_argument("--seed", type=int, default=0)
    gt.add_argument("-o", "--output", required=True)

    b = sub.add_parser("bench", help="(epsilon, delta) bound experiment")
    b.add_argument("--family", choices=["random", "thinrect", "mixed"], default=None)
    b.add_argument("--config", default=None, help="JSON file with experiment settings")
    b.add_argument("--epsilon", type=float, default=None)
    b.add_argument("--delta", type=float, default=None)
    b.add_argument("--repeats", type=int, default=None)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("-o", "--output", required=True, help="report path (.csv or .json)")
    return top


def _cmd_count(args) -> int:
    res = _load(args.file, args.format)
    if args.threads < 1:
        raise ParseError("--threads must be >= 1")
    cfg = RunConfig(
        epsilon=args.epsilon,
        delta=args.delta,
        s=args.s,
        gamma=args.gamma,
        walk_len=args.walk_len,
        r_min=args.rmin,
        r_max=args.rmax,
        mu=args.mu,
        seed=args.seed,
        max_rounds=args.max_rounds,
    )
    t0 = time.perf_counter()
    est = estimate(res.polytope, cfg)
    wall_ms = (time.perf_counter() - t0) * 1000.0

    if args.json:
        doc = {
            "estimate": est.count,
            "r": est.r,
            "v": est.v,
            "rect_count": str(est.rect_count),
            "chain_length": est.chain_length,
            "rounds": est.rounds,
            "total_samples": est.total_samples,
            "levels": [
                {"r_i": st.r_i, "v_i": st.v_i, "groups": st.N} for st in est.levels
            ],
            "metadata": {
                **est.metadata,
                "strict_tightened_rows": res.strict_tightened_rows,
                "equality_split_rows": res.equality_split_rows,
            },
            "config": {
                "epsilon": cfg.epsilon,
                "delta": cfg.delta,
                "s": cfg.s,
                "gamma": cfg.gamma,
                "walk_len": cfg.walk_len,
                "r_min": cfg.r_min,
                "r_max": cfg.r_max,
                "mu": cfg.mu,
                "seed": cfg.seed,
                "max_rounds": cfg.max_rounds,
                "threads": args.threads,
            },
        }
        print(json.dumps(doc, sort_keys=True))
    else:
        print(f"estimate        {est.count:.6g}")
        print(f"r               {est.r:.9g}")
        print(f"v               {est.v:.6g}")
        print(f"rect_count      {est.rect_count}")
        print(f"chain_length    {est.chain_length}")
        print(f"rounds          {est.rounds}")
        print(f"total_samples   {est.total_samples}")
        print(f"time_ms         {wall_ms:.1f}")
        if est.metadata.get("weak_rounding"):
            print("note: weak rounding fallback was used on some level")
    return 0


def _cmd_exact(args) -> int:
    res = _load(args.file, args.format)
    out = exact_count(res.polytope, limit=args.limit, want_points=args.dump_points)
    print(out.count)
    if args.dump_points and out.points is not None:
        for row in out.points:
            print(" ".join(str(int(v)) for v in row))
    return 0


def _cmd_sample(args) -> int:
    res = _load(args.file, args.format)
    P = res.polytope
    if args.count < 1:
        raise ParseError("--count must be >= 1")
    shifted = shift_facets(P)
    w = args.walk_len if args.walk_len is not None else P.n
    S = sample_lattice(shifted, args.count, Rng(args.seed), w)
    for row in S.points:
        print(" ".join(str(int(v)) for v in row))
    return 0


def _cmd_gen(args) -> int:
    if args.family == "random":
        P = gen_random(args.m, args.n, args.lam, Rng(args.seed))
    else:
        P = gen_thin_rect(args.n, args.tau, Rng(args.seed), rotate=not args.no_rotate)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(serialize_polytope(P))
    print(f"wrote {args.output}", file=sys.stderr)
    return 0


def _cmd_bench(args) -> int:
    settings = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            settings = json.load(fh)
    family = args.family or settings.get("family")
    epsilon = args.epsilon if args.epsilon is not None else settings.get("epsilon", 0.2)
    delta = args.delta if args.delta is not None else settings.get("delta", 0.1)
    repeats = args.repeats if args.repeats is not None else settings.get("repeats", 10)
    seed = args.seed if args.seed is not None else settings.get("seed", 0)
    oracle_limit = int(settings.get("oracle_limit", 2 * 10**14))

    instances: list[BenchInstance] = []
    for item in settings.get("instances", []):
        res = _load(item["file"], item.get("format", "native"))
        exact = item.get("exact")
        if exact is None:
            exact = exact_count(res.polytope, limit=oracle_limit).count
        instances.append(BenchInstance(item.get("id", item["file"]), res.polytope, exact))
    if family:
        instances.extend(suite_instances(family, settings.get("suite_seed", 0), oracle_limit))
    if not instances:
        raise ParseError("bench needs --family or a config with instances")

    cfg = RunConfig(epsilon=epsilon, delta=delta, seed=seed)
    report = bound_experiment(instances, cfg, repeats)
    text = report.to_json() if args.output.endswith(".json") else report.to_csv()
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(
        f"{len(report.rows)} runs, within-bound frequency "
        f"{report.aggregate_frequency:.3f}",
        file=sys.stderr,
    )
    return 0


_HANDLERS = {
    "count": _cmd_count,
    "exact": _cmd_exact,
    "sample": _cmd_sample,
    "gen": _cmd_gen,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ParseError, UnboundedError, InfeasibleError, DegenerateBodyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ResourceCapError, OracleLimitError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except PolycountError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
