"""Trainer acceptance: convergence on the 3-cluster dataset and
cross-component parity with the engine's weight loader.

Run with `pytest -s tests/test_acceptance.py` for one PASS/FAIL line per
criterion.
"""

import time

import numpy as np
import pytest

from corag import load_weights
from corag.agent import forward as engine_forward

from corag_trainer.labels import label_example
from corag_trainer.pairs import make_pairs
from corag_trainer.synth import generate_clusters, labeling_scorers
from corag_trainer.train import TrainHyper, _features, export_weights, train

SEED = 2025
PER_CLUSTER = 50


def report(name, ok, detail):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")


@pytest.fixture(scope="module")
def trained():
    start = time.perf_counter()
    instances = generate_clusters(SEED, PER_CLUSTER)
    scorers = labeling_scorers()
    examples = []
    for inst in instances:
        example = label_example(inst.query, inst.candidates, inst.budget, scorers)
        if example is not None:
            examples.append(example)
    pairs = make_pairs(examples, seed=SEED)
    hyper = TrainHyper(labels=tuple(s.name for s in scorers), seed=SEED)
    outcome = train(examples, pairs, hyper)
    elapsed = time.perf_counter() - start
    return instances, examples, outcome, elapsed


class TestTrainerConvergence:
    def test_classification_accuracy(self, trained):
        _, examples, outcome, elapsed = trained
        accuracy = outcome.history[-1].accuracy
        ok = accuracy >= 0.90
        report("trainer-accuracy", ok, f"{accuracy:.3f} on {len(examples)} examples")
        assert ok

    def test_contrastive_geometry(self, trained):
        _, examples, outcome, _ = trained
        X = np.stack([e.x for e in examples])
        y = np.array([e.y_true for e in examples])
        F = _features(outcome.params, X)
        intra, inter = [], []
        for i in range(len(examples)):
            for j in range(i + 1, len(examples)):
                d = float(np.linalg.norm(F[i] - F[j]))
                (intra if y[i] == y[j] else inter).append(d)
        ok = np.mean(intra) < np.mean(inter)
        report(
            "trainer-geometry", ok,
            f"intra {np.mean(intra):.3f} < inter {np.mean(inter):.3f}",
        )
        assert ok

    def test_runtime_under_five_minutes(self, trained):
        *_, elapsed = trained
        ok = elapsed < 300.0
        report("trainer-runtime", ok, f"{elapsed:.1f}s end to end")
        assert ok

    def test_loss_decreases_over_first_five_epochs(self, trained):
        _, _, outcome, _ = trained
        first5 = [e.total for e in outcome.history[:5]]
        ok = all(a >= b for a, b in zip(first5, first5[1:]))
        report("trainer-loss-decrease", ok, " -> ".join(f"{v:.4f}" for v in first5))
        assert ok

    def test_each_cluster_keeps_its_own_scorer(self, trained):
        instances, examples, _, _ = trained
        names = [s.name for s in labeling_scorers()]
        by_cluster = {}
        cluster_of = {inst.query.id: inst.cluster for inst in instances}
        for example in examples:
            cluster = cluster_of[example.query_id]
            by_cluster.setdefault(cluster, []).append(names[example.y_true])
        ok = all(
            sum(1 for l in labels if l == cluster) >= 0.9 * len(labels)
            for cluster, labels in by_cluster.items()
        )
        detail = "; ".join(
            f"{c}:{sum(1 for l in ls if l == c)}/{len(ls)}" for c, ls in sorted(by_cluster.items())
        )
        report("trainer-label-purity", ok, detail)
        assert ok


class TestCrossComponentParity:
    def test_engine_matches_fixtures_and_roundtrip(self, trained, tmp_path):
        _, _, outcome, _ = trained
        path = str(tmp_path / "weights.json")
        export_weights(outcome.weights, path)
        loaded = load_weights(path)

        worst = 0.0
        for fx in loaded.fixtures:
            _, label_scores, regression_raw = engine_forward(
                loaded, np.asarray(fx["embedding"])
            )
            worst = max(
                worst,
                float(np.max(np.abs(label_scores - np.asarray(fx["label_scores"])))),
                float(np.max(np.abs(regression_raw - np.asarray(fx["regression_raw"])))),
            )
        parity_ok = worst <= 1e-5

        p2 = str(tmp_path / "weights2.json")
        export_weights(loaded, p2)
        bytes_ok = open(path, "rb").read() == open(p2, "rb").read()

        ok = parity_ok and bytes_ok
        report(
            "cross-component-parity", ok,
            f"max fixture deviation {worst:.2e}; re-export byte-identical: {bytes_ok}",
        )
        assert ok
