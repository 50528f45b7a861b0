"""Build the checked-in fixture weight file for agent tests.

The encoder is hand-crafted rather than trained: the first three rows of
W1 sum the embedding buckets of one family lexicon each (with the hashing
sign folded in, so aligned terms always contribute positively), W2/W3 pass
those three detector activations through, and the classification head maps
detector 0 -> additive, 1 -> coverage, 2 -> order with a small additive
bias as the no-signal default. The regression head is constant: sigmoid
outputs 0.4 and 0.2, i.e. 20 iterations and lambda 0.1 at the default
scale. Queries drawn from the redundant lexicon therefore route to the
coverage scorer deterministically.

Run from the repository root:  python3 tools/make_fixture_weights.py
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from corag.agent import AgentWeights, expected_shapes, forward, save_weights
from corag.corpus import fnv1a64, make_query
from corag.instances import MONOTONE_TERMS, ORDERED_TERMS, REDUNDANT_TERMS

OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "data", "agent_router_weights.json")

DIMS = (1024, 512, 256, 128)
LABELS = ("additive", "coverage", "order")
LEXICONS = (MONOTONE_TERMS, REDUNDANT_TERMS, ORDERED_TERMS)


def main():
    shapes = expected_shapes(DIMS, len(LABELS))
    tensors = {name: np.zeros(shape) for name, shape in shapes.items()}

    for row, lexicon in enumerate(LEXICONS):
        for term in lexicon:
            h = fnv1a64(term.encode("utf-8"))
            sign = 1.0 if (h >> 63) == 0 else -1.0
            tensors["W1"][row, h % DIMS[0]] += sign

    for name, k in (("W2", 3), ("W3", 3)):
        for i in range(k):
            tensors[name][i, i] = 1.0

    for i in range(len(LABELS)):
        tensors["Wc"][i, i] = 4.0
    tensors["bc"][0] = 0.05  # additive wins when no lexicon signal is present

    # sigmoid(raw) * scale: iterations = 0.4 * 50 = 20, lambda = 0.2 * 0.5.
    tensors["br"][0] = float(np.log(0.4 / 0.6))
    tensors["br"][1] = float(np.log(0.2 / 0.8))

    weights = AgentWeights(
        dims=DIMS,
        labels=LABELS,
        max_iterations=50,
        lambda_max=0.5,
        fixtures=(),
        **{k: v for k, v in tensors.items()},
    )

    sample_queries = [
        ("redundant", " ".join(REDUNDANT_TERMS[3:11]) + " tour guide"),
        ("monotone", " ".join(MONOTONE_TERMS[0:7]) + " survey report"),
        ("ordered", " ".join(ORDERED_TERMS[5:12]) + " recipe kitchen"),
    ]
    fixtures = []
    for family, text in sample_queries:
        query = make_query(f"fixture-{family}", text, None, DIMS[0])
        feature, label_scores, regression_raw = forward(weights, query.embedding)
        fixtures.append(
            {
                "embedding": [float(x) for x in query.embedding],
                "label_scores": [float(x) for x in label_scores],
                "regression_raw": [float(x) for x in regression_raw],
            }
        )
        winner = LABELS[int(np.argmax(label_scores))]
        print(f"{family:10s} -> {winner:9s} scores={np.round(label_scores, 3)}")
        expected = {"redundant": "coverage", "monotone": "additive", "ordered": "order"}[family]
        assert winner == expected, f"router misroutes {family}: {label_scores}"

    weights = AgentWeights(
        dims=DIMS,
        labels=LABELS,
        max_iterations=50,
        lambda_max=0.5,
        fixtures=tuple(fixtures),
        **{k: v for k, v in tensors.items()},
    )
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    save_weights(weights, OUT)
    print(f"wrote {OUT} ({os.path.getsize(OUT) / 1e6:.2f} MB)")


if __name__ == "__main__":
    main()
