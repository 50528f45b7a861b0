"""Training pipeline for the corag configuration agent.

Generates per-query labels by running the engine's exhaustive oracle under
each candidate scorer, prepares contrastive pairs from queries that share
an optimal scorer, trains the shared encoder with a joint contrastive +
classification + regression loss, and exports weights in the engine's
portable JSON format.
"""

from .labels import TrainingExample, generate_labels, label_example
from .pairs import ContrastivePair, make_pairs
from .synth import LabeledInstance, generate_clusters, labeling_scorers, write_dataset
from .train import TrainHyper, TrainOutcome, export_weights, train

__version__ = "0.1.0"

__all__ = [
    "ContrastivePair",
    "LabeledInstance",
    "TrainHyper",
    "TrainOutcome",
    "TrainingExample",
    "export_weights",
    "generate_clusters",
    "generate_labels",
    "label_example",
    "labeling_scorers",
    "make_pairs",
    "train",
    "write_dataset",
]
