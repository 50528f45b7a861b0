"""Joint training loop and weight export.

The total objective is the unweighted sum of the contrastive,
classification, and regression losses. Each step draws one batch of
labeled examples (driving the two heads) and one batch of contrastive
pairs (driving the shared encoder), computes analytic gradients, and
applies gradient descent. Exported weights embed inference fixtures so the
consuming engine can verify forward-pass parity.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from corag import save_weights
from corag.agent import AgentWeights

from .labels import LAMBDA_MAX_SCALE, MAX_ITERATIONS_SCALE, TrainingExample
from .network import (
    SGD,
    PARAM_NAMES,
    StepLosses,
    encode_single,
    evaluate_losses,
    init_params,
    joint_step_gradients,
)
from .pairs import ContrastivePair

log = logging.getLogger(__name__)


@dataclass
class TrainHyper:
    labels: tuple[str, ...]
    dims: tuple[int, int, int, int] = (1024, 512, 256, 128)
    margin: float = 1.0
    lr: float = 0.001
    batch: int = 32
    epochs: int = 60
    momentum: float = 0.9
    seed: int = 0
    fixture_count: int = 3


@dataclass
class EpochStats:
    total: float
    classification: float
    regression: float
    contrastive: float
    accuracy: float


@dataclass
class TrainOutcome:
    weights: AgentWeights
    params: dict[str, np.ndarray]
    history: list[EpochStats] = field(default_factory=list)


class NonFiniteLoss(RuntimeError):
    pass


def _batches(indices: np.ndarray, size: int):
    for start in range(0, len(indices), size):
        yield indices[start : start + size]


def train(
    examples: Sequence[TrainingExample],
    pairs: Sequence[ContrastivePair],
    hyper: TrainHyper,
) -> TrainOutcome:
    if not examples:
        raise ValueError("no training examples")
    X = np.stack([ex.x for ex in examples])
    y = np.array([ex.y_true for ex in examples], dtype=np.int64)
    targets = np.array([ex.p_true for ex in examples], dtype=np.float64)
    if y.max(initial=0) >= len(hyper.labels):
        raise ValueError("label index outside the configured label list")

    rng = np.random.RandomState(hyper.seed)
    params = init_params(hyper.dims, len(hyper.labels), rng)
    optimizer = SGD(lr=hyper.lr, momentum=hyper.momentum)
    pair_cursor = 0
    history: list[EpochStats] = []

    # Fixed evaluation set for the per-epoch objective: minibatch means
    # fluctuate with shuffle composition and would hide early progress.
    eval_pairs = list(pairs[:512])
    Xa_eval = X[[p.a for p in eval_pairs]]
    Xb_eval = X[[p.b for p in eval_pairs]]
    pos_eval = np.array([p.is_positive for p in eval_pairs], dtype=bool)

    for epoch in range(hyper.epochs):
        order = rng.permutation(len(examples))
        for batch_no, batch_idx in enumerate(_batches(order, hyper.batch)):
            if pairs:
                take = [pairs[(pair_cursor + k) % len(pairs)] for k in range(hyper.batch)]
                pair_cursor = (pair_cursor + hyper.batch) % len(pairs)
                Xa = X[[p.a for p in take]]
                Xb = X[[p.b for p in take]]
                is_pos = np.array([p.is_positive for p in take])
            else:
                Xa = Xb = np.zeros((0, hyper.dims[0]))
                is_pos = np.zeros(0, dtype=bool)
            losses, grads = joint_step_gradients(
                params, X[batch_idx], y[batch_idx], targets[batch_idx],
                Xa, Xb, is_pos, hyper.margin,
            )
            if not math.isfinite(losses.total):
                raise NonFiniteLoss(f"non-finite loss at epoch {epoch}, batch {batch_no}")
            assert losses.classification >= 0 and losses.regression >= 0 and losses.contrastive >= 0
            optimizer.update(params, grads)
        epoch_losses = evaluate_losses(
            params, X, y, targets, Xa_eval, Xb_eval, pos_eval, hyper.margin
        )
        accuracy = training_accuracy(params, X, y)
        history.append(
            EpochStats(
                total=epoch_losses.total,
                classification=epoch_losses.classification,
                regression=epoch_losses.regression,
                contrastive=epoch_losses.contrastive,
                accuracy=accuracy,
            )
        )
        if epoch == 0 or (epoch + 1) % 10 == 0:
            h = history[-1]
            log.info(
                "epoch %d: total %.4f (cla %.4f reg %.4f con %.4f) acc %.3f",
                epoch + 1, h.total, h.classification, h.regression, h.contrastive, accuracy,
            )

    weights = build_weights(params, hyper, X)
    return TrainOutcome(weights=weights, params=params, history=history)


def training_accuracy(params, X: np.ndarray, y: np.ndarray) -> float:
    logits = _features(params, X) @ params["Wc"].T + params["bc"]
    return float(np.mean(np.argmax(logits, axis=1) == y))


def _features(params, X: np.ndarray) -> np.ndarray:
    H1 = np.maximum(0.0, X @ params["W1"].T + params["b1"])
    H2 = np.maximum(0.0, H1 @ params["W2"].T + params["b2"])
    return np.maximum(0.0, H2 @ params["W3"].T + params["b3"])


def feature_map(params, x: np.ndarray) -> np.ndarray:
    return encode_single(params, x)[0]


def build_weights(params, hyper: TrainHyper, X: np.ndarray) -> AgentWeights:
    """Package parameters in the engine's weight schema, embedding forward
    fixtures computed with the trainer's own single-vector pass."""
    count = min(hyper.fixture_count, X.shape[0])
    step = max(1, X.shape[0] // count) if count else 1
    fixtures = []
    for i in range(0, step * count, step):
        x = X[i]
        _, label_scores, regression_raw = encode_single(params, x)
        fixtures.append(
            {
                "embedding": [float(v) for v in x],
                "label_scores": [float(v) for v in label_scores],
                "regression_raw": [float(v) for v in regression_raw],
            }
        )
    return AgentWeights(
        dims=tuple(hyper.dims),
        labels=tuple(hyper.labels),
        max_iterations=MAX_ITERATIONS_SCALE,
        lambda_max=LAMBDA_MAX_SCALE,
        fixtures=tuple(fixtures),
        **{name: params[name].copy() for name in PARAM_NAMES},
    )


def export_weights(weights: AgentWeights, path: str) -> None:
    """Write the engine's canonical JSON weight format."""
    save_weights(weights, path)
