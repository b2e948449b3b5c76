"""Command line entry point: ``pathrank <command> ...``.

Exit codes: 0 success, 2 input or parse error, 3 schema violation,
4 non-convergence.
"""

from __future__ import annotations

import argparse
import contextlib
import os
import sys
from pathlib import Path

from .corank import COUNT_MODES, PathSet, corank_paths
from .errors import NotSymmetricError, ParseError, PathError, SchemaError
from .evaluation import bench_strategies, distance
from .io import (
    bibliographic_schema,
    generate_records,
    ingest,
    load_bundle,
    read_schema,
    write_bundle,
    write_network_files,
)
from .linalg import STRATEGIES, MonCParams, TruncParams
from .paths import parse_path
from .rank import RankParams, rank_asymmetric, rank_symmetric

EXIT_OK, EXIT_INPUT, EXIT_SCHEMA, EXIT_NONCONVERGED = 0, 2, 3, 4
DEFAULT_SEED = 42


class CommandError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _load(path):
    try:
        return load_bundle(path).graph
    except (OSError, ParseError, ValueError) as exc:
        raise CommandError(f"cannot load bundle {path}: {exc}") from exc


def _parse(expr, schema, where=""):
    try:
        return parse_path(expr, schema)
    except (ParseError, PathError) as exc:
        raise CommandError(f"{where}{exc}") from exc


def _strategy_params(args):
    if args.strategy == "trunc":
        return TruncParams(W=args.W, beta=args.beta, gamma=args.gamma, seed=args.seed)
    if args.strategy == "monc":
        return MonCParams(K=args.K, seed=args.seed)
    return None


def cmd_gen(args):
    schema = read_schema(args.schema) if args.schema else bibliographic_schema()
    if "=" in args.nodes_per_type:
        counts = {}
        for item in args.nodes_per_type.split(","):
            t, _, n = item.partition("=")
            counts[t.strip()] = int(n)
        missing = set(schema.object_types) - set(counts)
        if missing:
            raise CommandError(f"no node count for type(s) {sorted(missing)}")
    else:
        counts = int(args.nodes_per_type)
    labels = [s for s in args.labels.split(",") if s]
    nodes, edges = generate_records(schema, counts, args.density, labels=labels, seed=args.seed)
    paths = write_network_files(args.out_dir, schema, nodes, edges)
    print(f"seed={args.seed} nodes={len(nodes)} edges={len(edges)}")
    for k, p in paths.items():
        print(f"{k}\t{p}")
    return EXIT_OK


def cmd_ingest(args):
    try:
        bundle = ingest(args.schema, args.nodes, args.edges)
    except ParseError as exc:
        raise CommandError(f"parse error: {exc}") from exc
    except SchemaError as exc:
        raise CommandError(f"schema violation: {exc}", EXIT_SCHEMA) from exc
    write_bundle(bundle, args.out)
    g = bundle.graph
    for t, n in g.node_counts().items():
        print(f"type\t{t}\t{n}")
    for r, n in g.edge_counts().items():
        print(f"relation\t{r}\t{n}")
    return EXIT_OK


def _write_ranking(vec, path):
    with open(path, "w", encoding="utf-8") as fh:
        vec.write_tsv(fh)


def cmd_rank(args):
    g = _load(args.bundle)
    path = _parse(args.path, g.schema)
    params = RankParams(alpha=args.alpha, tol=args.tol, max_iters=args.max_iter)
    sparams = _strategy_params(args)
    print(
        f"# path={path} mode={args.mode} alpha={args.alpha} tol={args.tol} "
        f"max_iter={args.max_iter} strategy={args.strategy} seed={args.seed}"
    )
    if args.mode == "sy":
        try:
            vec = rank_symmetric(g, path, params, args.strategy, sparams)
        except NotSymmetricError as exc:
            raise CommandError(f"{exc} (hint: use --mode as)") from exc
        _write_ranking(vec, args.out)
        outputs = [(vec, args.out)]
    else:
        src, tgt = rank_asymmetric(g, path, params, args.strategy, sparams)
        outputs = [(src, f"{args.out}.src"), (tgt, f"{args.out}.tgt")]
        for vec, out in outputs:
            _write_ranking(vec, out)
    converged = True
    for vec, out in outputs:
        converged &= vec.converged
        print(f"{vec.object_type}\titerations={vec.iterations_used}\tconverged={vec.converged}\t{out}")
    if not converged and not args.allow_nonconverged:
        print("error: ranking did not converge", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_corank(args):
    g = _load(args.bundle)
    try:
        text = Path(args.paths).read_text(encoding="utf-8")
    except OSError as exc:
        raise CommandError(str(exc)) from exc
    paths = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        paths.append(_parse(line.strip(), g.schema, f"{args.paths}: line {lineno}: "))
    try:
        ps = PathSet(tuple(paths))
    except PathError as exc:
        raise CommandError(f"{args.paths}: {exc}") from exc
    res = corank_paths(
        g, ps, args.count_mode, tol=args.tol, max_iters=args.max_iter, theta=args.theta
    )
    for vec, suffix in ((res.x, "src"), (res.y, "paths"), (res.z, "tgt")):
        _write_ranking(vec, f"{args.out}.{suffix}")
    print(f"iterations={res.iterations_used}\tconverged={res.converged}\tpaths={len(ps.paths)}")
    if not res.converged and not args.allow_nonconverged:
        print("error: co-ranking did not converge", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_bench(args):
    g = _load(args.bundle)
    base = _parse(args.path, g.schema)
    if args.strategies == "all":
        strategies = list(STRATEGIES)
    else:
        strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
        bad = [s for s in strategies if s not in STRATEGIES]
        if bad:
            raise CommandError(f"unknown strategies {bad}; choose from {', '.join(STRATEGIES)}")
    try:
        report = bench_strategies(
            g,
            base,
            args.max_l,
            strategies,
            TruncParams(W=args.W, beta=args.beta, gamma=args.gamma, seed=args.seed),
            MonCParams(K=args.K, seed=args.seed),
            repeats=args.repeats,
        )
    except PathError as exc:
        raise CommandError(str(exc)) from exc
    with open(args.out, "w", encoding="utf-8") as fh:
        report.write_csv(fh)
    print(f"records={len(report)}\tseed={args.seed}\t{args.out}")
    return EXIT_OK


def _read_ranked_ids(path):
    ids = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) == 3:
            ids.append(parts[1])
        elif len(parts) == 1:
            ids.append(parts[0])
        else:
            raise CommandError(f"{path}: line {lineno}: expected a ranking TSV or one id per line")
    return ids


def cmd_distance(args):
    cand, truth = _read_ranked_ids(args.candidate), _read_ranked_ids(args.truth)
    try:
        d = distance(cand, truth, args.top_k)
    except ValueError as exc:
        raise CommandError(str(exc)) from exc
    print(f"{d!r}")
    return EXIT_OK


def _add_strategy_flags(p, with_strategy=True):
    if with_strategy:
        p.add_argument("--strategy", choices=STRATEGIES, default="naive")
    p.add_argument("--W", type=int, default=200, help="truncation: top-object count")
    p.add_argument("--beta", type=float, default=0.5, help="truncation: exponent")
    p.add_argument("--gamma", type=float, default=0.02, help="truncation: sample ratio")
    p.add_argument("--K", type=int, default=500, help="Monte Carlo: walkers per source")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathrank", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a random network as schema/nodes/edges files")
    p.add_argument("--schema", help="schema JSON (default: bundled bibliographic schema)")
    p.add_argument("--nodes-per-type", default="50", help="N or T=N,T=N,...")
    p.add_argument("--density", type=float, default=0.05)
    p.add_argument("--labels", default="DM,IR,DB", help="comma separated label values")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("ingest", help="build a binary bundle from text files")
    p.add_argument("--schema", required=True)
    p.add_argument("--nodes", required=True)
    p.add_argument("--edges", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("rank", help="rank objects along one constrained path")
    p.add_argument("--bundle", required=True)
    p.add_argument("--path", required=True)
    p.add_argument("--mode", choices=("sy", "as"), default="sy")
    p.add_argument("--alpha", type=float, default=0.15)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=100)
    _add_strategy_flags(p)
    p.add_argument("--allow-nonconverged", action="store_true")
    p.add_argument("--out", required=True, help="output TSV (mode as: prefix for .src/.tgt)")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("corank", help="co-rank objects and a set of paths")
    p.add_argument("--bundle", required=True)
    p.add_argument("--paths", required=True, help="file with one path expression per line")
    p.add_argument("--count-mode", choices=COUNT_MODES, default="path_count")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--theta", type=float, default=0.0, help="uniform smoothing weight")
    p.add_argument("--allow-nonconverged", action="store_true")
    p.add_argument("--out", required=True, help="prefix for .src/.paths/.tgt outputs")
    p.set_defaults(func=cmd_corank)

    p = sub.add_parser("bench", help="time chain strategies on repeated paths")
    p.add_argument("--bundle", required=True)
    p.add_argument("--path", required=True)
    p.add_argument("--max-l", type=int, default=5)
    p.add_argument("--strategies", default="all", help="'all' or a comma separated list")
    _add_strategy_flags(p, with_strategy=False)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("distance", help="compare a candidate ranking with a reference")
    p.add_argument("--candidate", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--top-k", type=int, default=10)
    p.set_defaults(func=cmd_distance)
    return parser


def _thread_limit():
    n = os.environ.get("HRANK_THREADS")
    if not n:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=int(n))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with _thread_limit():
            return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ParseError, PathError, NotSymmetricError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
