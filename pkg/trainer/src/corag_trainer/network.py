"""The agent network and its gradients, in plain numpy.

A three-layer ReLU encoder (1024 -> 512 -> 256 -> 128 by default) feeds a
classification head over scorer labels and a two-output sigmoid regression
head for the normalized (iterations, cost coefficient) targets. The same
encoder weights embed both sides of every contrastive pair, so one
backward pass accumulates gradients from all three objectives.

Everything is float64 and explicitly seeded; a finite-difference check in
the tests pins the analytic gradients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PARAM_NAMES = ("W1", "b1", "W2", "b2", "W3", "b3", "Wc", "bc", "Wr", "br")


def init_params(dims, n_labels: int, rng: np.random.RandomState) -> dict[str, np.ndarray]:
    """He-initialized weights, zero biases."""
    d0, d1, d2, d3 = dims
    def he(rows, cols):
        return rng.randn(rows, cols) * np.sqrt(2.0 / cols)

    return {
        "W1": he(d1, d0), "b1": np.zeros(d1),
        "W2": he(d2, d1), "b2": np.zeros(d2),
        "W3": he(d3, d2), "b3": np.zeros(d3),
        "Wc": he(n_labels, d3), "bc": np.zeros(n_labels),
        "Wr": he(2, d3), "br": np.zeros(2),
    }


def encode(params, X: np.ndarray):
    """Shared encoder: returns the activation cache for backprop."""
    H1 = np.maximum(0.0, X @ params["W1"].T + params["b1"])
    H2 = np.maximum(0.0, H1 @ params["W2"].T + params["b2"])
    F = np.maximum(0.0, H2 @ params["W3"].T + params["b3"])
    return {"X": X, "H1": H1, "H2": H2, "F": F}


def encode_single(params, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Single-vector forward matching the engine's inference contract:
    returns (feature, label_scores, regression_raw)."""
    h1 = np.maximum(0.0, params["W1"] @ x + params["b1"])
    h2 = np.maximum(0.0, params["W2"] @ h1 + params["b2"])
    f = np.maximum(0.0, params["W3"] @ h2 + params["b3"])
    return f, params["Wc"] @ f + params["bc"], params["Wr"] @ f + params["br"]


def encoder_backward(params, cache, dF: np.ndarray) -> dict[str, np.ndarray]:
    """Gradients of the encoder parameters given dLoss/dF."""
    dZ3 = dF * (cache["F"] > 0)
    grads = {
        "W3": dZ3.T @ cache["H2"],
        "b3": dZ3.sum(axis=0),
    }
    dH2 = dZ3 @ params["W3"]
    dZ2 = dH2 * (cache["H2"] > 0)
    grads["W2"] = dZ2.T @ cache["H1"]
    grads["b2"] = dZ2.sum(axis=0)
    dH1 = dZ2 @ params["W2"]
    dZ1 = dH1 * (cache["H1"] > 0)
    grads["W1"] = dZ1.T @ cache["X"]
    grads["b1"] = dZ1.sum(axis=0)
    return grads


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ez = np.exp(x[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def classification_loss(logits: np.ndarray, y: np.ndarray):
    """Mean cross-entropy between predicted and true labels."""
    n = logits.shape[0]
    probs = softmax(logits)
    loss = float(-np.mean(np.log(probs[np.arange(n), y] + 1e-300)))
    dlogits = probs.copy()
    dlogits[np.arange(n), y] -= 1.0
    return loss, dlogits / n


def regression_loss(reg_raw: np.ndarray, targets: np.ndarray):
    """MSE between sigmoid(raw) and normalized parameter targets."""
    s = sigmoid(reg_raw)
    diff = s - targets
    loss = float(np.mean(diff**2))
    draw = (2.0 / diff.size) * diff * s * (1.0 - s)
    return loss, draw


def contrastive_loss(Fa: np.ndarray, Fb: np.ndarray, is_positive: np.ndarray, margin: float):
    """Margin contrastive loss on feature maps.

    Positive pairs contribute d^2, negative pairs max(0, margin - d)^2,
    with d the Euclidean distance between the two features; mean over the
    pair batch.
    """
    n = Fa.shape[0]
    delta = Fa - Fb
    d = np.sqrt((delta**2).sum(axis=1))
    pos = is_positive.astype(bool)
    hinge = np.maximum(0.0, margin - d)
    per_pair = np.where(pos, d**2, hinge**2)
    loss = float(per_pair.mean())

    dFa = np.zeros_like(Fa)
    dFa[pos] = 2.0 * delta[pos]
    neg_active = (~pos) & (d > 1e-12) & (hinge > 0.0)
    if neg_active.any():
        coeff = (-2.0 * hinge[neg_active] / d[neg_active])[:, None]
        dFa[neg_active] = coeff * delta[neg_active]
    dFa /= n
    return loss, dFa, -dFa


@dataclass
class StepLosses:
    total: float
    classification: float
    regression: float
    contrastive: float


def joint_step_gradients(
    params,
    X: np.ndarray,
    y: np.ndarray,
    targets: np.ndarray,
    Xa: np.ndarray,
    Xb: np.ndarray,
    is_positive: np.ndarray,
    margin: float,
) -> tuple[StepLosses, dict[str, np.ndarray]]:
    """One joint objective evaluation: total loss and analytic gradients.

    The example batch and both pair sides share one encoder pass; the
    contrastive gradient flows only through the encoder, the two head
    losses also populate the head gradients.
    """
    n_ex, n_pair = X.shape[0], Xa.shape[0]
    stacked = np.vstack([X, Xa, Xb]) if n_pair else X
    cache = encode(params, stacked)
    F = cache["F"]
    F_ex, Fa, Fb = F[:n_ex], F[n_ex : n_ex + n_pair], F[n_ex + n_pair :]

    logits = F_ex @ params["Wc"].T + params["bc"]
    reg_raw = F_ex @ params["Wr"].T + params["br"]
    l_cla, dlogits = classification_loss(logits, y)
    l_reg, draw = regression_loss(reg_raw, targets)
    if n_pair:
        l_con, dFa, dFb = contrastive_loss(Fa, Fb, is_positive, margin)
    else:
        l_con, dFa, dFb = 0.0, np.zeros((0, F.shape[1])), np.zeros((0, F.shape[1]))

    grads = {
        "Wc": dlogits.T @ F_ex,
        "bc": dlogits.sum(axis=0),
        "Wr": draw.T @ F_ex,
        "br": draw.sum(axis=0),
    }
    dF_ex = dlogits @ params["Wc"] + draw @ params["Wr"]
    dF = np.vstack([dF_ex, dFa, dFb]) if n_pair else dF_ex
    grads.update(encoder_backward(params, cache, dF))
    losses = StepLosses(
        total=l_cla + l_reg + l_con,
        classification=l_cla,
        regression=l_reg,
        contrastive=l_con,
    )
    return losses, grads


def evaluate_losses(
    params,
    X: np.ndarray,
    y: np.ndarray,
    targets: np.ndarray,
    Xa: np.ndarray,
    Xb: np.ndarray,
    is_positive: np.ndarray,
    margin: float,
) -> StepLosses:
    """Forward-only objective value on a fixed evaluation set."""
    F_ex = encode(params, X)["F"]
    logits = F_ex @ params["Wc"].T + params["bc"]
    reg_raw = F_ex @ params["Wr"].T + params["br"]
    l_cla, _ = classification_loss(logits, y)
    l_reg, _ = regression_loss(reg_raw, targets)
    if Xa.shape[0]:
        Fa = encode(params, Xa)["F"]
        Fb = encode(params, Xb)["F"]
        l_con, _, _ = contrastive_loss(Fa, Fb, is_positive, margin)
    else:
        l_con = 0.0
    return StepLosses(
        total=l_cla + l_reg + l_con,
        classification=l_cla,
        regression=l_reg,
        contrastive=l_con,
    )


@dataclass
class SGD:
    """Gradient descent with optional momentum."""

    lr: float
    momentum: float = 0.0
    velocity: dict[str, np.ndarray] = field(default_factory=dict)

    def update(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        for name, grad in grads.items():
            if self.momentum > 0.0:
                v = self.velocity.get(name)
                v = grad if v is None else self.momentum * v + grad
                self.velocity[name] = v
                params[name] -= self.lr * v
            else:
                params[name] -= self.lr * grad
