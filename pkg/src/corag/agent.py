"""Configuration-agent inference: load trained weights, predict per-query
search settings.

The weight file is a single JSON document holding a three-layer ReLU
encoder (1024 -> 512 -> 256 -> 128 by default), a classification head over
scorer names, a two-output regression head for (iterations, cost
coefficient), and embedded inference fixtures used for cross-component
parity checks. Weights are immutable after load; every function here is
pure.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .corpus import Query
from .errors import WeightsError
from .mcts import SearchConfig

WEIGHTS_VERSION = 1
DEFAULT_DIMS = (1024, 512, 256, 128)

_TENSOR_NAMES = ("W1", "b1", "W2", "b2", "W3", "b3", "Wc", "bc", "Wr", "br")


@dataclass(frozen=True)
class AgentWeights:
    dims: tuple[int, int, int, int]
    labels: tuple[str, ...]
    max_iterations: int
    lambda_max: float
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray
    W3: np.ndarray
    b3: np.ndarray
    Wc: np.ndarray
    bc: np.ndarray
    Wr: np.ndarray
    br: np.ndarray
    fixtures: tuple[dict, ...] = ()


@dataclass(frozen=True)
class AgentPrediction:
    label: str
    label_scores: tuple[float, ...]
    iterations: int
    lam: float


def expected_shapes(dims, n_labels: int) -> dict[str, tuple[int, ...]]:
    d0, d1, d2, d3 = dims
    return {
        "W1": (d1, d0),
        "b1": (d1,),
        "W2": (d2, d1),
        "b2": (d2,),
        "W3": (d3, d2),
        "b3": (d3,),
        "Wc": (n_labels, d3),
        "bc": (n_labels,),
        "Wr": (2, d3),
        "br": (2,),
    }


def load_weights(path: str) -> AgentWeights:
    """Parse and validate a weight file; any inconsistency names the culprit."""
    if not os.path.exists(path):
        raise WeightsError(f"weight file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise WeightsError(f"{path}: cannot parse weight file: {exc}") from exc
    if not isinstance(doc, dict):
        raise WeightsError(f"{path}: weight file must be a JSON object")
    version = doc.get("version")
    if version != WEIGHTS_VERSION:
        raise WeightsError(f"{path}: unsupported weights version {version!r}")
    dims = doc.get("dims")
    if (
        not isinstance(dims, list)
        or len(dims) != 4
        or not all(isinstance(d, int) and d >= 1 for d in dims)
    ):
        raise WeightsError(f"{path}: dims must be four positive integers, got {dims!r}")
    labels = doc.get("labels")
    if not isinstance(labels, list) or len(labels) < 2:
        raise WeightsError(f"{path}: labels must list at least 2 scorer names")
    scale = doc.get("regression_scale")
    if not isinstance(scale, dict):
        raise WeightsError(f"{path}: missing regression_scale")
    max_iterations = scale.get("max_iterations")
    lambda_max = scale.get("lambda_max")
    if not isinstance(max_iterations, int) or max_iterations < 1:
        raise WeightsError(f"{path}: regression_scale.max_iterations must be >= 1")
    if not isinstance(lambda_max, (int, float)) or lambda_max < 0:
        raise WeightsError(f"{path}: regression_scale.lambda_max must be >= 0")
    tensors_doc = doc.get("tensors")
    if not isinstance(tensors_doc, dict):
        raise WeightsError(f"{path}: missing tensors")

    shapes = expected_shapes(dims, len(labels))
    tensors: dict[str, np.ndarray] = {}
    for name in _TENSOR_NAMES:
        entry = tensors_doc.get(name)
        if not isinstance(entry, dict) or "shape" not in entry or "data" not in entry:
            raise WeightsError(f"{path}: tensor {name}: missing or malformed")
        shape = tuple(entry["shape"])
        if shape != shapes[name]:
            raise WeightsError(
                f"{path}: tensor {name}: expected shape {shapes[name]}, got {shape}"
            )
        data = np.asarray(entry["data"], dtype=np.float64)
        if data.size != int(np.prod(shape)):
            raise WeightsError(
                f"{path}: tensor {name}: expected {int(np.prod(shape))} values, "
                f"got {data.size}"
            )
        if not np.all(np.isfinite(data)):
            raise WeightsError(f"{path}: tensor {name}: contains non-finite values")
        tensors[name] = data.reshape(shape)

    fixtures = doc.get("fixtures", [])
    if not isinstance(fixtures, list):
        raise WeightsError(f"{path}: fixtures must be a list")
    for i, fx in enumerate(fixtures):
        if not isinstance(fx, dict) or "embedding" not in fx:
            raise WeightsError(f"{path}: fixture {i}: missing embedding")
        if len(fx["embedding"]) != dims[0]:
            raise WeightsError(
                f"{path}: fixture {i}: embedding length {len(fx['embedding'])} != {dims[0]}"
            )

    return AgentWeights(
        dims=tuple(dims),
        labels=tuple(str(l) for l in labels),
        max_iterations=max_iterations,
        lambda_max=float(lambda_max),
        fixtures=tuple(fixtures),
        **tensors,
    )


def save_weights(weights: AgentWeights, path: str) -> None:
    """Write the canonical JSON form: fixed key order, compact separators,
    floats with full round-trip precision. Re-export of a loaded file is
    byte-identical."""
    doc = {
        "version": WEIGHTS_VERSION,
        "dims": list(weights.dims),
        "labels": list(weights.labels),
        "regression_scale": {
            "max_iterations": weights.max_iterations,
            "lambda_max": float(weights.lambda_max),
        },
        "tensors": {
            name: {
                "shape": list(getattr(weights, name).shape),
                "data": [float(x) for x in getattr(weights, name).ravel()],
            }
            for name in _TENSOR_NAMES
        },
        "fixtures": list(weights.fixtures),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, separators=(",", ":"))


def forward(
    weights: AgentWeights, embedding: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Run the encoder and both heads on one query embedding.

    Returns (feature, label_scores, regression_raw); all math in float64.
    """
    x = np.asarray(embedding, dtype=np.float64)
    if x.shape != (weights.dims[0],):
        raise WeightsError(
            f"embedding has shape {x.shape}, expected ({weights.dims[0]},)"
        )
    h1 = np.maximum(0.0, weights.W1 @ x + weights.b1)
    h2 = np.maximum(0.0, weights.W2 @ h1 + weights.b2)
    feature = np.maximum(0.0, weights.W3 @ h2 + weights.b3)
    label_scores = weights.Wc @ feature + weights.bc
    regression_raw = weights.Wr @ feature + weights.br
    return feature, label_scores, regression_raw


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def predict(weights: AgentWeights, embedding: np.ndarray) -> AgentPrediction:
    """Map one embedding to a scorer label and bounded search settings."""
    _, label_scores, regression_raw = forward(weights, embedding)
    label_idx = int(np.argmax(label_scores))  # ties resolve to lowest index
    raw_iters = _sigmoid(float(regression_raw[0])) * weights.max_iterations
    iterations = min(weights.max_iterations, max(1, math.floor(raw_iters + 0.5)))
    lam = min(weights.lambda_max, max(0.0, _sigmoid(float(regression_raw[1])) * weights.lambda_max))
    return AgentPrediction(
        label=weights.labels[label_idx],
        label_scores=tuple(float(s) for s in label_scores),
        iterations=iterations,
        lam=lam,
    )


def predict_config(weights: AgentWeights, query: Query, base: SearchConfig) -> SearchConfig:
    """Per-query search settings: predicted scorer, iterations and cost
    coefficient; budget and exploration coefficient come from the base."""
    prediction = predict(weights, query.embedding)
    return base.replace(
        scorer_name=prediction.label,
        iterations=prediction.iterations,
        lam=prediction.lam,
    )
