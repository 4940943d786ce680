"""Backward query structure for one vertex's opinion: the voting DAG.

Levels index time: the root at level T is the queried vertex, each node at
level t+1 holds an ordered multiset of exactly three child references at
level t (its samples, multiplicity preserved), and nodes for the same graph
vertex within one level coalesce. Colouring the leaves and folding majority
upward reproduces the forward process's opinion distribution at the root.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

from .errors import InvalidInputError, InvalidParameterError, ResourceLimitError
from .graph import Graph
from .opinions import BLUE
from .rng import make_rng
from .stats import MonteCarloEstimate, wilson_interval

__all__ = [
    "DagNode",
    "VotingDag",
    "CollisionStats",
    "build_voting_dag",
    "colour_dag",
    "random_leaf_colours",
    "root_colour_probability",
    "collision_stats",
    "dump_dag",
]

DEFAULT_NODE_BUDGET = 10_000_000

# Pseudo vertex index used by forced synthetic leaves.
SYNTHETIC_VERTEX = -1


class DagNode:
    """One (vertex, level) node. `children` is an ordered list of 0 or 3 refs."""

    __slots__ = ("vertex", "level", "children", "forced_colour")

    def __init__(self, vertex: int, level: int, forced_colour: int | None = None):
        self.vertex = vertex
        self.level = level
        self.children: list[DagNode] = []
        self.forced_colour = forced_colour

    def __repr__(self):
        forced = f" forced={self.forced_colour}" if self.forced_colour is not None else ""
        return f"DagNode(v={self.vertex}, t={self.level}{forced})"


@dataclass
class VotingDag:
    """Levelled DAG with a single root at level T.

    `levels[t]` lists the level-t nodes in creation order; together with each
    node's child slot order this records the reveal order that the sprinkling
    transformation replays.
    """

    T: int
    levels: list[list[DagNode]]

    @property
    def root(self) -> DagNode:
        return self.levels[self.T][0]

    @property
    def level_sizes(self) -> list[int]:
        return [len(level) for level in self.levels]

    def nodes(self) -> Iterator[DagNode]:
        for level in self.levels:
            yield from level

    def leaves(self) -> Iterator[DagNode]:
        """All zero-out-degree nodes (level 0 plus any forced synthetic leaves)."""
        for node in self.nodes():
            if not node.children:
                yield node


@dataclass(frozen=True)
class CollisionStats:
    """Per-level collision accounting for one DAG.

    Index i of the per-level vectors refers to level i (reveals from level i
    into level i-1); index 0 is unused and zero. A repeated child reference
    within a single node's own slots counts as a collision.
    """

    level_sizes: tuple[int, ...]
    per_level_count: tuple[int, ...]
    per_level_indicator: tuple[int, ...]
    total_levels_with_collision: int


def _node_budget_needed(n: int, T: int) -> int:
    total = 0
    for t in range(T + 1):
        total += min(3 ** (T - t), n)
    return total


def build_voting_dag(g: Graph, v0: int, T: int, rng: np.random.Generator,
                     node_budget: int = DEFAULT_NODE_BUDGET) -> VotingDag:
    """Sample the random voting DAG of height T rooted at (v0, T).

    Level by level (top down), each node reveals three uniform neighbour
    samples in slot order; repeated vertices within a level coalesce into one
    node while parents keep repeated child references.
    """
    if not (0 <= v0 < g.n):
        raise InvalidParameterError(f"root vertex {v0} out of range for n={g.n}")
    if T < 0:
        raise InvalidParameterError(f"height must be >= 0, got {T}")
    if _node_budget_needed(g.n, T) > node_budget:
        raise ResourceLimitError(
            f"height {T} may require more than {node_budget} nodes before coalescence")
    levels: list[list[DagNode]] = [[] for _ in range(T + 1)]
    levels[T] = [DagNode(v0, T)]
    for t in range(T - 1, -1, -1):
        parents = levels[t + 1]
        m = len(parents)
        u = rng.random((m, 3))
        if g.complete:
            idx = (u * (g.n - 1)).astype(np.int64)
            np.minimum(idx, g.n - 2, out=idx)
            vs = np.fromiter((p.vertex for p in parents), dtype=np.int64, count=m)
            targets = idx + (idx >= vs[:, None])
        else:
            vs = np.fromiter((p.vertex for p in parents), dtype=np.int64, count=m)
            deg = g.degrees[vs]
            idx = (u * deg[:, None]).astype(np.int64)
            np.minimum(idx, (deg - 1)[:, None], out=idx)
            targets = g.indices[g.indptr[vs][:, None] + idx]
        by_vertex: dict[int, DagNode] = {}
        level_nodes: list[DagNode] = []
        for parent, row in zip(parents, targets.tolist()):
            for w in row:
                node = by_vertex.get(w)
                if node is None:
                    node = DagNode(w, t)
                    by_vertex[w] = node
                    level_nodes.append(node)
                parent.children.append(node)
        levels[t] = level_nodes
    return VotingDag(T=T, levels=levels)


def colour_dag(dag: VotingDag, leaf_colours: Mapping[DagNode, int]) -> dict[DagNode, int]:
    """Fold majority upward from the leaves; forced nodes keep their colour.

    `leaf_colours` must cover every zero-out-degree node without a forced
    colour. Deterministic given its inputs.
    """
    colours: dict[DagNode, int] = {}
    for level in dag.levels:
        for node in level:
            if node.forced_colour is not None:
                colours[node] = node.forced_colour
            elif not node.children:
                try:
                    c = leaf_colours[node]
                except KeyError:
                    raise InvalidInputError(f"missing leaf colour for {node!r}") from None
                if c not in (0, 1):
                    raise InvalidInputError(f"leaf colour must be 0 or 1, got {c!r}")
                colours[node] = c
            else:
                s = sum(colours[child] for child in node.children)
                colours[node] = 1 if s >= 2 else 0
    return colours


def random_leaf_colours(dag: VotingDag, blue_prob: float,
                        rng: np.random.Generator) -> dict[DagNode, int]:
    """I.i.d. leaf colouring (blue with `blue_prob`) over unforced leaves."""
    if not (0.0 <= blue_prob <= 1.0):
        raise InvalidParameterError(f"blue_prob must be in [0, 1], got {blue_prob}")
    leaves = [node for node in dag.leaves() if node.forced_colour is None]
    draws = rng.random(len(leaves))
    return {node: int(d < blue_prob) for node, d in zip(leaves, draws)}


def root_colour_probability(g: Graph, v0: int, T: int, leaf_blue_prob: float,
                            trials: int, seed: int,
                            confidence: float = 0.95) -> MonteCarloEstimate:
    """Monte Carlo estimate of P(root = blue): fresh DAG and leaves per trial."""
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    blue = 0
    for trial in range(trials):
        rng = make_rng(seed, trial)
        dag = build_voting_dag(g, v0, T, rng)
        leaf_colours = random_leaf_colours(dag, leaf_blue_prob, rng)
        if colour_dag(dag, leaf_colours)[dag.root] == BLUE:
            blue += 1
    low, high = wilson_interval(blue, trials, confidence)
    return MonteCarloEstimate(successes=blue, trials=trials, estimate=blue / trials,
                              ci_low=low, ci_high=high, confidence=confidence)


def collision_stats(dag: VotingDag) -> CollisionStats:
    """Replay each level's reveal order and count collided samples.

    A sample collides when its target node was already revealed at the lower
    level, whether by an earlier node or by an earlier slot of the same node.
    Targets are keyed by node identity, so forced synthetic leaves (which all
    share the pseudo vertex index) are never spuriously collided.
    """
    sizes = tuple(dag.level_sizes)
    counts = [0] * (dag.T + 1)
    for t in range(1, dag.T + 1):
        seen: set[int] = set()
        hits = 0
        for node in dag.levels[t]:
            for child in node.children:
                key = id(child)
                if key in seen:
                    hits += 1
                else:
                    seen.add(key)
        counts[t] = hits
    indicators = tuple(1 if c > 0 else 0 for c in counts)
    return CollisionStats(
        level_sizes=sizes,
        per_level_count=tuple(counts),
        per_level_indicator=indicators,
        total_levels_with_collision=sum(indicators),
    )


def dump_dag(dag: VotingDag) -> str:
    """Debug text dump, root first: `level vertex [child child child]` per node.

    Forced synthetic leaves print vertex -1 and a `forced=B` flag.
    """
    lines = []
    for t in range(dag.T, -1, -1):
        for node in dag.levels[t]:
            fields = [str(node.level), str(node.vertex)]
            fields.extend(str(child.vertex) for child in node.children)
            if node.forced_colour is not None:
                fields.append("forced=B" if node.forced_colour == BLUE else "forced=R")
            lines.append(" ".join(fields))
    return "\n".join(lines) + "\n"
