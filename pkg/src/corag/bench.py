"""Benchmark harness: run strategies over seeded instances, emit JSONL rows.

Rows are deterministic for a fixed seed and configuration: instances are
processed in id order and timing is kept out of the row payload unless
explicitly requested, so reports are byte-identical across runs and across
thread counts. Latency aggregates are measured and printed separately.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import mean, quantiles
from typing import Optional, Sequence

from .agent import AgentWeights, predict_config
from .baselines import exhaustive_oracle, greedy_topk
from .instances import Instance
from .mcts import SearchConfig, SearchResult, search
from .scorers import make_scorer

STRATEGIES = ("mcts", "greedy", "oracle")


def thread_count() -> int:
    """Worker cap: CORAG_THREADS when set, else up to 4."""
    env = os.environ.get("CORAG_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


@dataclass
class BenchOptions:
    strategies: tuple[str, ...] = STRATEGIES
    config: SearchConfig = field(default_factory=lambda: SearchConfig(budget=1))
    scorer_override: Optional[str] = None  # force one search scorer for all rows
    budget_override: Optional[int] = None  # replace each instance's own budget
    agent: Optional[AgentWeights] = None  # per-query predicted settings
    rho: float = 0.05
    gamma: float = 0.9
    include_timing: bool = False


def run_instance(instance: Instance, options: BenchOptions) -> list[dict]:
    """All requested strategy rows for one instance.

    Each row reports the value of the chosen combination under the
    instance's evaluation scorer and its ratio to the evaluation-scorer
    oracle, so runs with different search scorers stay comparable.
    """
    chunks = instance.chunk_lookup()
    budget = options.budget_override or instance.budget
    eval_scorer = make_scorer(instance.eval_scorer, options.rho, options.gamma)
    oracle_eval = exhaustive_oracle(
        instance.query, instance.candidates, budget, eval_scorer
    )
    oracle_value = oracle_eval.scorer_value

    base = options.config.replace(
        budget=budget,
        scorer_name=options.scorer_override or instance.eval_scorer,
    )
    if options.agent is not None:
        config = predict_config(options.agent, instance.query, base)
    else:
        config = base
    search_scorer = make_scorer(config.scorer_name, options.rho, options.gamma)

    rows = []
    for strategy in options.strategies:
        if strategy == "mcts":
            result = search(instance.query, instance.candidates, config, search_scorer)
        elif strategy == "greedy":
            result = greedy_topk(
                instance.query, instance.candidates, budget, search_scorer
            )
        elif strategy == "oracle":
            if config.scorer_name == instance.eval_scorer:
                result = oracle_eval
            else:
                result = exhaustive_oracle(
                    instance.query, instance.candidates, budget, search_scorer
                )
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        value_eval = (
            result.scorer_value
            if config.scorer_name == instance.eval_scorer
            else eval_scorer.score_one(instance.query, result.best, chunks)
        )
        if oracle_value > 0.0:
            ratio = value_eval / oracle_value
        else:
            ratio = 1.0 if value_eval == 0.0 else float("inf")
        row = {
            "instance": instance.id,
            "family": instance.family,
            "strategy": strategy,
            "scorer": config.scorer_name,
            "eval_scorer": instance.eval_scorer,
            "budget": budget,
            "scorer_value": result.scorer_value,
            "value_eval": value_eval,
            "oracle_value": oracle_value,
            "oracle_ratio": ratio,
            "cost_used": result.cost_used,
            "chunk_ids": list(result.best.chunk_ids),
            "nodes_materialized": result.nodes_materialized,
            "scorer_calls": result.scorer_calls,
            "iterations_run": result.iterations_run,
        }
        if options.include_timing:
            row["wall_time_ms"] = result.wall_time * 1000.0
        rows.append((row, result))
    return rows


@dataclass
class BenchReport:
    rows: list[dict]
    latencies: dict[str, list[float]]  # strategy -> wall times (seconds)

    def aggregates(self) -> list[dict]:
        out = []
        keys = sorted({(r["family"], r["strategy"]) for r in self.rows})
        for family, strategy in keys:
            sub = [
                r for r in self.rows
                if r["family"] == family and r["strategy"] == strategy
            ]
            entry = {
                "family": family,
                "strategy": strategy,
                "instances": len(sub),
                "mean_oracle_ratio": mean(r["oracle_ratio"] for r in sub),
                "mean_value": mean(r["value_eval"] for r in sub),
                "mean_cost": mean(r["cost_used"] for r in sub),
            }
            out.append(entry)
        return out

    def latency_summary(self) -> dict[str, dict[str, float]]:
        summary = {}
        for strategy, times in sorted(self.latencies.items()):
            if not times:
                continue
            ms = sorted(t * 1000.0 for t in times)
            if len(ms) >= 2:
                cuts = quantiles(ms, n=20)
                p50, p95 = cuts[9], cuts[18]
            else:
                p50 = p95 = ms[0]
            summary[strategy] = {"p50_ms": p50, "p95_ms": p95, "mean_ms": mean(ms)}
        return summary


def run_bench(instances: Sequence[Instance], options: BenchOptions) -> BenchReport:
    """Run every instance (optionally in parallel) and collect rows in
    instance order regardless of completion order."""
    workers = thread_count()
    if workers > 1 and len(instances) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_instance = list(pool.map(lambda i: run_instance(i, options), instances))
    else:
        per_instance = [run_instance(i, options) for i in instances]
    rows: list[dict] = []
    latencies: dict[str, list[float]] = {s: [] for s in options.strategies}
    for result_rows in per_instance:
        for row, result in result_rows:
            rows.append(row)
            latencies[row["strategy"]].append(result.wall_time)
    return BenchReport(rows=rows, latencies=latencies)


def write_rows(rows: list[dict], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, separators=(",", ":")) + "\n")
