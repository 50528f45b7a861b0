"""Command-line surface: ingest, search, bench, agent-predict, instance-gen.

Exit codes: 0 on success, 2 for validation problems (bad inputs, malformed
files), 1 for unexpected internal errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .agent import load_weights, predict, predict_config
from .bench import BenchOptions, STRATEGIES, run_bench, write_rows
from .corpus import (
    DEFAULT_DIMENSION,
    chunk_corpus,
    load_documents,
    load_queries,
    make_query,
)
from .errors import CoragError
from .instances import FAMILIES, generate_instances, read_instances, write_instances
from .mcts import (
    DEFAULT_CANDIDATES,
    DEFAULT_COST_COEFFICIENT,
    DEFAULT_EXPLORATION,
    DEFAULT_ITERATIONS,
    SearchConfig,
    search,
)
from .scorers import SCORER_NAMES, make_scorer
from .store import VectorStore


def _add_search_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--budget", type=int, default=1024, help="token budget")
    parser.add_argument("--c", type=float, default=DEFAULT_EXPLORATION,
                        help="exploration coefficient")
    parser.add_argument("--lambda", dest="lam", type=float,
                        default=DEFAULT_COST_COEFFICIENT, help="cost coefficient")
    parser.add_argument("--iterations", type=int, default=DEFAULT_ITERATIONS)
    parser.add_argument("--candidates", type=int, default=DEFAULT_CANDIDATES,
                        help="retrieved candidates fed to the search")
    parser.add_argument("--scorer", choices=SCORER_NAMES, default="additive")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--rho", type=float, default=0.05,
                        help="coverage scorer redundancy penalty")
    parser.add_argument("--gamma", type=float, default=0.9,
                        help="order scorer position discount")


def cmd_ingest(args) -> int:
    documents = load_documents(args.input)
    chunks = chunk_corpus(documents, args.chunk_size, args.dimension)
    store = VectorStore(args.dimension)
    store.insert_many(chunks)
    store.save(args.out)
    print(f"ingested {len(documents)} documents into {len(chunks)} chunks -> {args.out}")
    return 0


def _run_one_query(query, store, args, weights):
    candidates = store.top_n(query, args.candidates)
    config = SearchConfig(
        budget=args.budget,
        c=args.c,
        lam=args.lam,
        iterations=args.iterations,
        candidates=args.candidates,
        seed=args.seed,
        scorer_name=args.scorer,
    )
    if weights is not None:
        config = predict_config(weights, query, config)
    scorer = make_scorer(config.scorer_name, args.rho, args.gamma)
    result = search(query, candidates, config, scorer)
    chunk_texts = {c.id: c.text for c in candidates}
    payload = {"query": query.id, "scorer": config.scorer_name}
    payload.update(result.to_dict())
    payload["chunks"] = [
        {"id": cid, "text": chunk_texts[cid]} for cid in result.best.chunk_ids
    ]
    return payload


def cmd_search(args) -> int:
    store = VectorStore.load(args.store)
    weights = load_weights(args.agent) if args.agent else None
    if args.query_text is not None:
        queries = [make_query("q0", args.query_text, None, store.dimension)]
    else:
        queries = load_queries(args.queries, store.dimension)
        if not queries:
            raise CoragError(f"{args.queries}: no queries found")
    for query in queries:
        payload = _run_one_query(query, store, args, weights)
        print(json.dumps(payload, separators=(",", ":")))
    return 0


def cmd_bench(args) -> int:
    instances = generate_instances(
        args.seed, args.instances, tuple(args.families), args.dimension
    )
    if args.max_chunks is not None:
        instances = [
            inst for inst in instances if len(inst.candidates) <= args.max_chunks
        ]
    strategies = STRATEGIES if args.strategies == "all" else tuple(args.strategies.split(","))
    unknown = set(strategies) - set(STRATEGIES)
    if unknown:
        raise CoragError(f"unknown strategies: {sorted(unknown)}")
    config = SearchConfig(
        budget=args.budget or 1,  # replaced per instance
        c=args.c,
        lam=args.lam,
        iterations=args.iterations,
        seed=args.seed,
        scorer_name="additive",
    )
    options = BenchOptions(
        strategies=strategies,
        config=config,
        scorer_override=args.force_scorer,
        budget_override=args.budget,
        agent=load_weights(args.agent) if args.agent else None,
        rho=args.rho,
        gamma=args.gamma,
        include_timing=args.timing,
    )
    report = run_bench(instances, options)
    if args.out:
        write_rows(report.rows, args.out)
    else:
        for row in report.rows:
            print(json.dumps(row, separators=(",", ":")))
    print(f"# {len(report.rows)} rows over {len(instances)} instances", file=sys.stderr)
    header = f"{'family':<10} {'strategy':<8} {'n':>4} {'ratio':>7} {'value':>7} {'cost':>8}"
    print(header, file=sys.stderr)
    for agg in report.aggregates():
        print(
            f"{agg['family']:<10} {agg['strategy']:<8} {agg['instances']:>4} "
            f"{agg['mean_oracle_ratio']:>7.4f} {agg['mean_value']:>7.4f} "
            f"{agg['mean_cost']:>8.1f}",
            file=sys.stderr,
        )
    for strategy, lat in report.latency_summary().items():
        print(
            f"# latency {strategy}: p50 {lat['p50_ms']:.2f} ms, "
            f"p95 {lat['p95_ms']:.2f} ms",
            file=sys.stderr,
        )
    return 0


def cmd_agent_predict(args) -> int:
    weights = load_weights(args.agent)
    query = make_query("q0", args.query_text, None, args.dimension)
    prediction = predict(weights, query.embedding)
    print(
        json.dumps(
            {
                "label": prediction.label,
                "label_scores": list(prediction.label_scores),
                "iterations": prediction.iterations,
                "lambda": prediction.lam,
            },
            separators=(",", ":"),
        )
    )
    return 0


def cmd_instance_gen(args) -> int:
    instances = generate_instances(
        args.seed, args.count, tuple(args.families), args.dimension
    )
    write_instances(instances, args.out)
    print(f"wrote {len(instances)} instances -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corag",
        description="Budget-constrained chunk-combination search",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="chunk and embed a JSONL corpus into a store file")
    p.add_argument("--input", required=True, help="corpus JSONL ({id, text} per line)")
    p.add_argument("--chunk-size", type=int, default=256)
    p.add_argument("--dimension", type=int, default=DEFAULT_DIMENSION)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("search", help="search the best chunk combination for queries")
    p.add_argument("--store", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--query-text")
    group.add_argument("--queries", help="queries JSONL file")
    p.add_argument("--agent", help="agent weight file; overrides scorer/iterations/lambda")
    _add_search_flags(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("bench", help="run strategies over generated instances")
    p.add_argument("--instances", type=int, default=20, help="instances per family")
    p.add_argument("--families", nargs="+", default=list(FAMILIES), choices=FAMILIES)
    p.add_argument("--max-chunks", type=int, default=None,
                   help="drop instances with more candidates than this")
    p.add_argument("--strategies", default="all",
                   help="comma-separated subset of mcts,greedy,oracle")
    p.add_argument("--force-scorer", choices=SCORER_NAMES, default=None,
                   help="search with this scorer instead of each family's own")
    p.add_argument("--agent", help="agent weight file for per-query settings")
    p.add_argument("--dimension", type=int, default=DEFAULT_DIMENSION)
    p.add_argument("--timing", action="store_true",
                   help="include wall_time_ms in rows (breaks byte-level determinism)")
    p.add_argument("--out", help="write rows to this JSONL file instead of stdout")
    _add_search_flags(p)
    p.set_defaults(func=cmd_bench, budget=None)

    p = sub.add_parser("agent-predict", help="print the agent's prediction for a query")
    p.add_argument("--agent", required=True)
    p.add_argument("--query-text", required=True)
    p.add_argument("--dimension", type=int, default=DEFAULT_DIMENSION)
    p.set_defaults(func=cmd_agent_predict)

    p = sub.add_parser("instance-gen", help="write generated instances as JSONL")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20, help="instances per family")
    p.add_argument("--families", nargs="+", default=list(FAMILIES), choices=FAMILIES)
    p.add_argument("--dimension", type=int, default=DEFAULT_DIMENSION)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_instance_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CoragError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - report, then fail with code 1
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
