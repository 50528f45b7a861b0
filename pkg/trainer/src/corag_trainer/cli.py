"""Trainer command line.

Two input modes: --corpus/--queries (engine JSONL schemas; candidates come
from top-n retrieval over the ingested chunks) or --synth N (the built-in
three-cluster dataset). Generated labels can be persisted as JSONL for
reproducibility, and the trained weights are written in the engine's
weight-file format.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from corag import CoragError, load_documents, load_queries, chunk_corpus

from .labels import TrainingExample, generate_labels, label_example
from .pairs import make_pairs
from .synth import generate_clusters, labeling_scorers, write_dataset
from .train import TrainHyper, export_weights, train

log = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corag-trainer",
        description="Train the configuration agent and export engine weights",
    )
    source = parser.add_argument_group("data source")
    source.add_argument("--queries", help="queries JSONL ({id, text, relevant_terms})")
    source.add_argument("--corpus", help="corpus JSONL ({id, text})")
    source.add_argument("--synth", type=int, metavar="N",
                        help="use the built-in 3-cluster dataset, N examples per cluster")
    parser.add_argument("--out", required=True, help="output weight file (JSON)")
    parser.add_argument("--labels-out", help="persist generated labels as JSONL")
    parser.add_argument("--emit-dataset", nargs=2, metavar=("CORPUS", "QUERIES"),
                        help="with --synth: also write the dataset in engine JSONL form")
    parser.add_argument("--budget", type=int, default=96,
                        help="token budget used during label generation (corpus mode)")
    parser.add_argument("--candidates", type=int, default=8,
                        help="retrieved candidates per query (corpus mode)")
    parser.add_argument("--chunk-size", type=int, default=32,
                        help="chunking window for corpus ingestion")
    parser.add_argument("--dimension", type=int, default=1024)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epochs", type=int, default=60)
    parser.add_argument("--lr", type=float, default=0.001)
    parser.add_argument("--margin", type=float, default=1.0)
    parser.add_argument("--batch", type=int, default=32)
    return parser


def _examples_from_corpus(args) -> list[TrainingExample]:
    documents = load_documents(args.corpus)
    queries = load_queries(args.queries, args.dimension)
    if not queries:
        raise CoragError(f"{args.queries}: no queries found")
    chunks = chunk_corpus(documents, args.chunk_size, args.dimension)
    return generate_labels(
        queries, chunks, labeling_scorers(), args.budget,
        candidates_per_query=args.candidates, dimension=args.dimension,
    )


def _examples_from_synth(args) -> list[TrainingExample]:
    instances = generate_clusters(args.seed, args.synth, args.dimension)
    if args.emit_dataset:
        write_dataset(instances, args.emit_dataset[0], args.emit_dataset[1])
    scorers = labeling_scorers()
    examples = []
    for inst in instances:
        example = label_example(inst.query, inst.candidates, inst.budget, scorers)
        if example is not None:
            examples.append(example)
    return examples


def _write_labels(examples, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(
                json.dumps(
                    {
                        "query": ex.query_id,
                        "y_true": ex.y_true,
                        "p_true": list(ex.p_true),
                        "scorer_values": list(ex.scorer_values),
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )


def run(args) -> int:
    if args.synth is not None and (args.queries or args.corpus):
        raise CoragError("--synth and --queries/--corpus are mutually exclusive")
    if args.synth is None and not (args.queries and args.corpus):
        raise CoragError("provide --queries and --corpus, or --synth N")

    examples = _examples_from_synth(args) if args.synth is not None else _examples_from_corpus(args)
    if not examples:
        raise CoragError("label generation produced no usable examples")
    if args.labels_out:
        _write_labels(examples, args.labels_out)

    pairs = make_pairs(examples, seed=args.seed)
    labels = tuple(s.name for s in labeling_scorers())
    hyper = TrainHyper(
        labels=labels,
        dims=(args.dimension, 512, 256, 128),
        margin=args.margin,
        lr=args.lr,
        batch=args.batch,
        epochs=args.epochs,
        seed=args.seed,
    )
    outcome = train(examples, pairs, hyper)
    export_weights(outcome.weights, args.out)
    final = outcome.history[-1]
    print(
        f"trained on {len(examples)} examples / {len(pairs)} pairs: "
        f"loss {final.total:.4f}, accuracy {final.accuracy:.3f} -> {args.out}"
    )
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except CoragError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
