"""The sprinkling transformation and its majorisation coupling.

Replaying each level's reveal order from the cut level down to level 1, every
collided sample slot is redirected to a fresh forced-blue leaf. The result is
collision-free below the cut (every node there has in-degree one, so the
structure below the cut is a forest), and colouring both structures with the
same leaf colours can only make nodes bluer in the transformed copy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dual_dag import SYNTHETIC_VERTEX, DagNode, VotingDag, colour_dag
from .errors import InvalidInputError, InvalidParameterError
from .opinions import BLUE

__all__ = [
    "SprinkledDag",
    "IndependenceCertificate",
    "sprinkle",
    "coupled_colouring",
    "check_majorisation",
    "leaf_supports",
    "independence_certificate",
]


@dataclass
class SprinkledDag:
    """Transformed copy of a voting DAG with forced-blue leaves below the cut.

    `redirected_edges` lists (parent, slot, displaced child, synthetic leaf)
    in reveal order, with parent/children referring to nodes of `dag`.
    `node_map` sends every node of `base` to its copy in `dag`.
    """

    base: VotingDag
    dag: VotingDag
    cut_level: int
    redirected_edges: list[tuple[DagNode, int, DagNode, DagNode]] = field(default_factory=list)
    synthetic_leaves: list[DagNode] = field(default_factory=list)
    node_map: dict[DagNode, DagNode] = field(default_factory=dict)


@dataclass(frozen=True)
class IndependenceCertificate:
    """Reachable-leaf supports of one level's nodes, plus their disjointness."""

    level: int
    supports: dict[DagNode, frozenset[DagNode]]
    pairwise_disjoint: bool


def _copy_dag(dag: VotingDag) -> tuple[VotingDag, dict[DagNode, DagNode]]:
    node_map: dict[DagNode, DagNode] = {}
    levels: list[list[DagNode]] = []
    for level in dag.levels:
        copies = []
        for node in level:
            twin = DagNode(node.vertex, node.level, node.forced_colour)
            node_map[node] = twin
            copies.append(twin)
        levels.append(copies)
    for node, twin in node_map.items():
        twin.children = [node_map[child] for child in node.children]
    return VotingDag(T=dag.T, levels=levels), node_map


def sprinkle(dag: VotingDag, t_cut: int) -> SprinkledDag:
    """Redirect every collided slot at levels t_cut..1 to a forced-blue leaf.

    The reveal order replayed here is the construction order (node creation
    order, then slot order), so the result is a deterministic function of the
    input. t_cut = 0 is the identity transformation.
    """
    if not (0 <= t_cut <= dag.T):
        raise InvalidParameterError(f"t_cut must be in [0, {dag.T}], got {t_cut}")
    out, node_map = _copy_dag(dag)
    redirected: list[tuple[DagNode, int, DagNode, DagNode]] = []
    synthetic: list[DagNode] = []
    for t in range(t_cut, 0, -1):
        seen: set[int] = set()
        for node in list(out.levels[t]):
            for slot, child in enumerate(node.children):
                key = id(child)
                if key in seen:
                    leaf = DagNode(SYNTHETIC_VERTEX, t - 1, forced_colour=BLUE)
                    out.levels[t - 1].append(leaf)
                    node.children[slot] = leaf
                    redirected.append((node, slot, child, leaf))
                    synthetic.append(leaf)
                else:
                    seen.add(key)
    return SprinkledDag(base=dag, dag=out, cut_level=t_cut,
                        redirected_edges=redirected, synthetic_leaves=synthetic,
                        node_map=node_map)


def coupled_colouring(s: SprinkledDag, leaf_colours) -> tuple[dict[DagNode, int], dict[DagNode, int]]:
    """Colour original and transformed DAGs from the same leaf colours.

    `leaf_colours` is keyed by the base DAG's unforced leaves; synthetic
    leaves take their forced blue. Returns (colours_base, colours_transformed).
    """
    for node in leaf_colours:
        if node not in s.node_map:
            raise InvalidInputError(f"{node!r} is not a node of the base DAG")
    colours_base = colour_dag(s.base, leaf_colours)
    mapped = {s.node_map[node]: colour for node, colour in leaf_colours.items()}
    colours_out = colour_dag(s.dag, mapped)
    return colours_base, colours_out


def check_majorisation(s: SprinkledDag, colours_base: dict[DagNode, int],
                       colours_out: dict[DagNode, int]) -> bool:
    """True iff the transformed colouring dominates on every original node."""
    return all(colours_base[node] <= colours_out[s.node_map[node]]
               for node in colours_base)


def leaf_supports(dag: VotingDag, level: int) -> tuple[dict[DagNode, frozenset[DagNode]], bool]:
    """Reachable-leaf set of each level-`level` node, plus pairwise disjointness.

    Works on any DAG (diagnostic mode): running it on an un-sprinkled DAG
    shows exactly where supports overlap.
    """
    if not (0 <= level <= dag.T):
        raise InvalidParameterError(f"level must be in [0, {dag.T}], got {level}")
    support: dict[DagNode, frozenset[DagNode]] = {}
    for t in range(level + 1):
        for node in dag.levels[t]:
            if not node.children:
                support[node] = frozenset((node,))
            else:
                support[node] = frozenset().union(*(support[c] for c in node.children))
    result = {node: support[node] for node in dag.levels[level]}
    total = sum(len(v) for v in result.values())
    union = set().union(*result.values()) if result else set()
    return result, total == len(union)


def independence_certificate(s: SprinkledDag, t: int) -> IndependenceCertificate:
    """Partition level-t nodes of the transformed DAG by leaf support.

    Only defined at and below the cut, where disjointness is guaranteed.
    """
    if t > s.cut_level:
        raise InvalidParameterError(f"level {t} is above the cut {s.cut_level}")
    supports, disjoint = leaf_supports(s.dag, t)
    return IndependenceCertificate(level=t, supports=supports, pairwise_disjoint=disjoint)
