"""Rewriting a coloured voting DAG into a perfect ternary tree.

The rewrite preserves the root colour exactly. Whenever a node's slots
reference one child twice or more, that child's subtree is duplicated into
two disjoint copies padded with an all-red tree; red-rooted subtrees are
emitted as all-red padding outright, which never changes the root colour and
keeps the blue leaf count as small as the construction allows.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .dual_dag import DagNode, VotingDag, collision_stats, colour_dag
from .errors import InvalidParameterError, ResourceLimitError
from .opinions import BLUE, OPINION_DTYPE, RED

__all__ = [
    "TernaryTree",
    "ReductionReport",
    "tree_root_colour",
    "check_blue_threshold",
    "reduce_to_ternary",
    "collision_tail_bound",
    "TailBound",
]

DEFAULT_LEAF_BUDGET = 10_000_000


@dataclass
class TernaryTree:
    """Perfect 3-ary tree of the given height, stored as its leaf colours."""

    height: int
    leaf_colours: np.ndarray

    def __post_init__(self):
        if self.height < 0:
            raise InvalidParameterError(f"height must be >= 0, got {self.height}")
        expected = 3 ** self.height
        if self.leaf_colours.shape != (expected,):
            raise InvalidParameterError(
                f"height {self.height} needs {expected} leaves, got {self.leaf_colours.shape}")
        if self.leaf_colours.dtype != OPINION_DTYPE:
            raise InvalidParameterError(f"leaf colours must be {OPINION_DTYPE}")
        if self.leaf_colours.size and self.leaf_colours.max() > 1:
            raise InvalidParameterError("leaf colours must be 0 or 1")

    @property
    def blue_leaves(self) -> int:
        return int(self.leaf_colours.sum())


@dataclass(frozen=True)
class ReductionReport:
    """Certificate for one rewrite: budgets, collision level count, root colours."""

    blue_leaves_in: int
    blue_leaves_out: int
    collision_levels: int
    bound: int
    root_colour_in: int
    root_colour_out: int

    def to_json(self) -> str:
        return json.dumps({
            "blue_leaves_in": self.blue_leaves_in,
            "blue_leaves_out": self.blue_leaves_out,
            "collision_levels": self.collision_levels,
            "bound": self.bound,
            "root_colour_in": self.root_colour_in,
            "root_colour_out": self.root_colour_out,
        })


def tree_root_colour(tree: TernaryTree) -> int:
    """Bottom-up majority evaluation of the tree's root."""
    level = tree.leaf_colours.astype(np.int64)
    while level.size > 1:
        level = (level.reshape(-1, 3).sum(axis=1) >= 2).astype(np.int64)
    return int(level[0])


def check_blue_threshold(tree: TernaryTree) -> bool:
    """True unless the tree has fewer than 2^h blue leaves yet a blue root.

    Contrapositive of: a blue root forces at least 2^h blue leaves.
    """
    if tree.blue_leaves < 2 ** tree.height:
        return tree_root_colour(tree) == RED
    return True


def _shared_child(children: list[DagNode]) -> DagNode | None:
    a, b, c = children
    if a is b or a is c:
        return a
    if b is c:
        return b
    return None


def reduce_to_ternary(dag: VotingDag, leaf_colours,
                      leaf_budget: int = DEFAULT_LEAF_BUDGET) -> tuple[TernaryTree, ReductionReport]:
    """Rewrite (DAG, leaf colouring) into a ternary tree with the same root colour.

    Returns the tree and a report with the blue-leaf budget B0 * 2^C, where B0
    counts blue leaves of the input and C the number of levels involving at
    least one collision.
    """
    h = dag.T
    if 3 ** h > leaf_budget:
        raise ResourceLimitError(f"3^{h} leaves exceed the budget of {leaf_budget}")
    colours = colour_dag(dag, leaf_colours)

    def build(node: DagNode) -> np.ndarray:
        size = 3 ** node.level
        colour = colours[node]
        if colour == RED:
            return np.zeros(size, dtype=OPINION_DTYPE)
        if not node.children:
            return np.ones(size, dtype=OPINION_DTYPE)
        shared = _shared_child(node.children)
        if shared is not None:
            sub = build(shared)
            pad = np.zeros(size // 3, dtype=OPINION_DTYPE)
            return np.concatenate([sub, sub, pad])
        return np.concatenate([build(child) for child in node.children])

    tree = TernaryTree(height=h, leaf_colours=build(dag.root))
    stats = collision_stats(dag)
    blue_in = sum(1 for node in dag.leaves() if colours[node] == BLUE)
    report = ReductionReport(
        blue_leaves_in=blue_in,
        blue_leaves_out=tree.blue_leaves,
        collision_levels=stats.total_levels_with_collision,
        bound=blue_in * 2 ** stats.total_levels_with_collision,
        root_colour_in=colours[dag.root],
        root_colour_out=tree_root_colour(tree),
    )
    return tree, report


@dataclass(frozen=True)
class TailBound:
    """Value of (2e * 9^h / d)^(h/2) and whether its precondition failed."""

    value: float
    vacuous: bool


def collision_tail_bound(h: int, d: int) -> TailBound:
    """Tail bound on seeing more than h/2 collision levels (and on the blue-leaf tail).

    Vacuous unless 2e * 9^h / d <= 1/2.
    """
    if h < 0:
        raise InvalidParameterError(f"h must be >= 0, got {h}")
    if d < 1:
        raise InvalidParameterError(f"d must be >= 1, got {d}")
    try:
        ratio = 2.0 * math.e * float(9 ** h) / d
    except OverflowError:
        return TailBound(value=math.inf, vacuous=True)
    value = ratio ** (h / 2.0)
    return TailBound(value=value, vacuous=ratio > 0.5)
