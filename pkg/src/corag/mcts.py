"""Policy-tree search for the best ordered chunk combination under a budget.

The tree's root is the empty combination; every child extends its parent's
sequence with one unused candidate whose addition stays within the token
budget. Each search iteration selects the most promising node by a
UCB-style utility, materializes all feasible children of an unexpanded
node at once (scoring them in a single batch call), and propagates the new
node's scorer value back up the tree.

Counting rules, pinned because they define every statistic downstream:

* A child is born with ``w = n = 1 * V0`` style stats: its scorer value V0,
  one visit. That birth already accounts for the child's own visit, so the
  back-propagation that follows in the same iteration updates only its
  ancestors; a node's n grows past 1 only when a later iteration's update
  path touches it again.
* The tree-wide visit total N starts at 1 and grows by 1 per iteration, so
  after k iterations N == 1 + k == root.n.
* Back-propagated value F is always the selected node's V0, never its UCB
  utility (which would double-count the exploration bonus).
* Final extraction ranks every materialized node by its own scorer value
  minus the cost penalty. Exploration bonus and visit statistics are
  search heuristics, not quality estimates: a shallow node's visit mean
  absorbs its descendants' values, so ranking by mean at extraction time
  would systematically prefer cheap ancestors of good combinations over
  the combinations themselves.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .corpus import Chunk, Query, tokenize
from .scorers import Combination, CountingScorer, UtilityScorer

DEFAULT_EXPLORATION = 2.4
DEFAULT_COST_COEFFICIENT = 0.1
DEFAULT_ITERATIONS = 10
DEFAULT_CANDIDATES = 10


@dataclass(frozen=True)
class SearchConfig:
    budget: int
    c: float = DEFAULT_EXPLORATION
    lam: float = DEFAULT_COST_COEFFICIENT
    iterations: int = DEFAULT_ITERATIONS
    candidates: int = DEFAULT_CANDIDATES
    seed: int = 0
    scorer_name: str = "additive"

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.c < 0 or self.lam < 0:
            raise ValueError("c and lam must be non-negative")

    def replace(self, **kwargs) -> "SearchConfig":
        data = {
            "budget": self.budget,
            "c": self.c,
            "lam": self.lam,
            "iterations": self.iterations,
            "candidates": self.candidates,
            "seed": self.seed,
            "scorer_name": self.scorer_name,
        }
        data.update(kwargs)
        return SearchConfig(**data)


class PolicyTreeNode:
    """One ordered chunk combination plus its search statistics."""

    __slots__ = (
        "ids",
        "total_cost",
        "v0",
        "w",
        "n",
        "parent",
        "children",
        "expanded",
        "terminal",
        "fully_explored",
        "fresh",
    )

    def __init__(
        self,
        ids: tuple[str, ...],
        total_cost: int,
        v0: float,
        parent: Optional["PolicyTreeNode"],
    ):
        self.ids = ids
        self.total_cost = total_cost
        self.v0 = v0
        self.w = v0
        self.n = 1
        self.parent = parent
        self.children: list[PolicyTreeNode] = []
        self.expanded = False
        self.terminal = False
        self.fully_explored = False
        # True until this node first appears on an update path; its birth
        # stats already count its own visit, so the first back-propagation
        # that ends here must not double-count it.
        self.fresh = parent is not None

    @property
    def combination(self) -> Combination:
        return Combination(self.ids, self.total_cost)

    def depth(self) -> int:
        return len(self.ids)


def node_utility(node: PolicyTreeNode, total_visits: int, config: SearchConfig) -> float:
    """UCB-style utility: mean value + exploration bonus - cost penalty.

    Requires node.n >= 1 and total_visits >= 1, which materialization and
    the visit counter guarantee.
    """
    return (
        node.w / node.n
        + config.c * math.sqrt(math.log(total_visits) / node.n)
        - config.lam * node.total_cost / config.budget
    )


def exploitation_utility(node: PolicyTreeNode, config: SearchConfig) -> float:
    """Extraction-time utility: the node's scorer value minus the cost
    penalty, with no exploration term and no visit statistics."""
    return node.v0 - config.lam * node.total_cost / config.budget


@dataclass
class SearchResult:
    best: Combination
    utility: float
    scorer_value: float
    cost_used: int
    nodes_materialized: int
    scorer_calls: int
    iterations_run: int
    wall_time: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        return {
            "chunk_ids": list(self.best.chunk_ids),
            "utility": self.utility,
            "scorer_value": self.scorer_value,
            "cost_used": self.cost_used,
            "nodes_materialized": self.nodes_materialized,
            "scorer_calls": self.scorer_calls,
            "iterations_run": self.iterations_run,
        }


class PolicyTreeSearch:
    """Owns one policy tree for one (query, candidate set, config) triple.

    Single-writer: the tree is mutated only by this object. Independent
    searches over shared read-only chunks may run concurrently.
    """

    def __init__(
        self,
        query: Query,
        candidates: Sequence[Chunk],
        config: SearchConfig,
        scorer: UtilityScorer,
    ):
        ids = [c.id for c in candidates]
        if len(set(ids)) != len(ids):
            raise ValueError("candidate chunk ids must be unique")
        self.query = query
        self.candidates = list(candidates)
        self.config = config
        self.scorer = CountingScorer(scorer)
        self.chunks: dict[str, Chunk] = {c.id: c for c in candidates}
        self.root = PolicyTreeNode((), 0, 0.0, None)
        self.total_visits = 1
        self.nodes_materialized = 0
        self.iterations_run = 0

    # -- selection ---------------------------------------------------------

    def _selection_key(self, node: PolicyTreeNode):
        # max utility; ties -> lower cost, then lexicographically smaller
        # id sequence (min over this key).
        return (-node_utility(node, self.total_visits, self.config), node.total_cost, node.ids)

    def _expand(self, node: PolicyTreeNode) -> list[PolicyTreeNode]:
        budget = self.config.budget
        used = set(node.ids)
        extensions = [
            cand
            for cand in self.candidates
            if cand.id not in used and node.total_cost + cand.token_count <= budget
        ]
        node.expanded = True
        if not extensions:
            node.terminal = True
            self._mark_fully_explored(node)
            return []
        combos = [
            Combination(node.ids + (cand.id,), node.total_cost + cand.token_count)
            for cand in extensions
        ]
        values = self.scorer.score_batch(self.query, combos, self.chunks)
        for combo, value in zip(combos, values):
            child = PolicyTreeNode(combo.chunk_ids, combo.total_cost, value, node)
            node.children.append(child)
        self.nodes_materialized += len(node.children)
        return node.children

    def _mark_fully_explored(self, node: PolicyTreeNode) -> None:
        node.fully_explored = True
        parent = node.parent
        while parent is not None and parent.expanded:
            if all(child.fully_explored for child in parent.children):
                parent.fully_explored = True
                parent = parent.parent
            else:
                break

    def node_selection(self) -> tuple[PolicyTreeNode, bool]:
        """Descend to the next node to evaluate.

        Returns (node, fresh): fresh is True when the node was materialized
        by this call (its birth stats already count its visit).
        """
        node = self.root
        while True:
            if not node.expanded:
                children = self._expand(node)
                if not children:
                    return node, False
                return min(children, key=self._selection_key), True
            if not node.children:
                return node, False  # terminal revisit
            node = min(node.children, key=self._selection_key)

    # -- back-propagation ---------------------------------------------------

    def utility_update(self, leaf: PolicyTreeNode, fresh: bool = False) -> None:
        """Propagate F(leaf) = leaf.V0 up the tree and bump visit counts."""
        value = leaf.v0
        node = leaf.parent if fresh else leaf
        leaf.fresh = False
        while node is not None:
            node.w += value
            node.n += 1
            node = node.parent
        self.total_visits += 1

    # -- extraction ----------------------------------------------------------

    def _all_nodes(self) -> list[PolicyTreeNode]:
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(reversed(node.children))
        return out

    def extract_best(self) -> tuple[PolicyTreeNode, float]:
        """Best materialized node by exploitation utility.

        Scans every non-root node; ties prefer lower cost, then the
        lexicographically smaller id sequence. The root is returned only
        when nothing else was materialized.
        """
        best = None
        best_key = None
        for node in self._all_nodes():
            if node is self.root:
                continue
            key = (-exploitation_utility(node, self.config), node.total_cost, node.ids)
            if best_key is None or key < best_key:
                best, best_key = node, key
        if best is None:
            return self.root, exploitation_utility(self.root, self.config)
        return best, -best_key[0]

    # -- main loop -----------------------------------------------------------

    def run(self) -> SearchResult:
        start = time.perf_counter()
        for _ in range(self.config.iterations):
            if self.root.fully_explored:
                break
            leaf, fresh = self.node_selection()
            self.utility_update(leaf, fresh)
            self.iterations_run += 1
        best, utility = self.extract_best()
        cost_used = self._verify_cost(best)
        return SearchResult(
            best=best.combination,
            utility=utility,
            scorer_value=best.v0,
            cost_used=cost_used,
            nodes_materialized=self.nodes_materialized,
            scorer_calls=self.scorer.batch_calls,
            iterations_run=self.iterations_run,
            wall_time=time.perf_counter() - start,
        )

    def _verify_cost(self, node: PolicyTreeNode) -> int:
        # Chunk costs were estimated from ingested token counts; re-tokenize
        # the selected texts so the reported cost is the exact one.
        exact = sum(len(tokenize(self.chunks[i].text)) for i in node.ids)
        if exact > self.config.budget:
            raise RuntimeError(
                f"exact tokenization cost {exact} exceeds budget "
                f"{self.config.budget} for {node.ids}"
            )
        return exact


def search(
    query: Query,
    candidates: Sequence[Chunk],
    config: SearchConfig,
    scorer: UtilityScorer,
) -> SearchResult:
    """Run the policy-tree search and return the best combination found.

    Degenerate inputs (no candidates, or none that fit the budget) yield an
    empty combination with utility 0. The result's cost is re-verified with
    exact tokenization and never exceeds the budget.
    """
    return PolicyTreeSearch(query, candidates, config, scorer).run()
