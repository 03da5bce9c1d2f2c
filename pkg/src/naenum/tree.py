"""Materialized transversal trees for inspection, exhaustive-ordering runs,
and structural invariant sweeps.

The search engine normally keeps only path-local state; this module holds the
fully expanded tree it can optionally record (small n only), together with the
per-shoot accounting: markings, defect, weight, mass, effective width.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .selection import FREE, StageProfile
from .matching import TWOMARK


@dataclass
class TreeNode:
    id: int
    depth: int
    parent: int | None
    label: int | None               # edge label from the parent, None at root
    markers: tuple[int, ...]        # ancestors with a child edge of this label
    falsifying: bool
    stage: str | None = None        # stage of the clause expanding this node
    clause: tuple[int, ...] | None = None  # residual variables used to expand
    children: list[int] = field(default_factory=list)
    leaf_kind: str | None = None    # None (internal) | "falsified" | "viable"
    is_transversal: bool = False
    ell: int | None = None          # set on end-of-onemark nodes
    heavy_budget: int | None = None
    u0: int | None = None           # owning depth-t0 node on the controlled route

    @property
    def marks(self) -> int:
        return len(self.markers)


@dataclass
class DebugTree:
    n: int
    t: int
    route: str
    t0: int
    nodes: list[TreeNode]
    profiles: list[StageProfile] = field(default_factory=list)
    stats: object | None = None

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]

    def child_nodes(self, u: TreeNode) -> list[TreeNode]:
        return [self.nodes[i] for i in u.children]

    def path_ids(self, v: TreeNode) -> list[int]:
        out = []
        node: TreeNode | None = v
        while node is not None:
            out.append(node.id)
            node = self.nodes[node.parent] if node.parent is not None else None
        return out[::-1]

    def q_of(self, v: TreeNode) -> tuple[int, ...]:
        labels = []
        node = v
        while node.parent is not None:
            labels.append(node.label)
            node = self.nodes[node.parent]
        return tuple(labels[::-1])

    def leaves(self) -> Iterator[TreeNode]:
        return (u for u in self.nodes if u.leaf_kind is not None)

    def internal(self) -> Iterator[TreeNode]:
        return (u for u in self.nodes if u.children)


def effective_width(tree: DebugTree, u: TreeNode) -> int:
    """Children that actually need exploring: clause width at the node minus
    its falsifying child edges."""
    kids = tree.child_nodes(u)
    return len(kids) - sum(1 for k in kids if k.falsifying)


def mass(tree: DebugTree, u: TreeNode) -> Fraction:
    """Expected number of surviving children given the node survives."""
    return sum((Fraction(1, 2 ** k.marks) for k in tree.child_nodes(u)
                if not k.falsifying), start=Fraction(0))


def marked_child_count(tree: DebugTree, u: TreeNode) -> int:
    return sum(1 for k in tree.child_nodes(u) if k.marks > 0)


@dataclass(frozen=True)
class ShootStats:
    marked_edge_count: int
    defect: int

    @property
    def weight(self) -> int:
        return self.marked_edge_count + self.defect


def shoot_stats(tree: DebugTree, top: TreeNode, bottom: TreeNode) -> ShootStats:
    """Stats over the shoot from ``top`` to its descendant ``bottom``: the path
    edges plus all child edges of path nodes other than ``bottom``."""
    path = tree.path_ids(bottom)
    if top.id not in path:
        raise ValueError("top is not an ancestor of bottom")
    path = path[path.index(top.id):]
    marked = 0
    defect = 0
    for nid in path[:-1]:
        node = tree.nodes[nid]
        defect += 3 - len(node.children)
        marked += sum(1 for k in tree.child_nodes(node) if k.marks > 0)
    return ShootStats(marked, defect)


def sigma_edge(node: TreeNode) -> Fraction:
    """Survival probability of the edge into ``node`` under uniformly random
    sibling orderings (0 for falsifying edges)."""
    return Fraction(0) if node.falsifying else Fraction(1, 2 ** node.marks)


def psi_exact(tree: DebugTree) -> Fraction:
    """Exact expected surviving-leaf count: sum over depth-t non-falsified
    leaves of the product of edge survival probabilities along the path."""
    total = Fraction(0)
    for leaf in tree.leaves():
        if leaf.leaf_kind != "viable":
            continue
        marks = 0
        node = leaf
        while node.parent is not None:
            marks += node.marks
            node = tree.nodes[node.parent]
        total += Fraction(1, 2 ** marks)
    return total


def psi_of_node(tree: DebugTree, u: TreeNode) -> Fraction:
    """Recursive survival value: 1 at viable leaves, 0 at falsified ones, and
    the sigma-weighted child sum at internal nodes."""
    if u.leaf_kind == "viable":
        return Fraction(1)
    if u.leaf_kind == "falsified":
        return Fraction(0)
    return sum((sigma_edge(k) * psi_of_node(tree, k)
                for k in tree.child_nodes(u)), start=Fraction(0))


def export_lines(tree: DebugTree) -> list[str]:
    """Line-oriented dump: one node per line with depth, parent edge label,
    mark count, stage, and leaf kind."""
    out = []
    for u in tree.nodes:
        out.append(f"{u.depth} {u.label if u.label is not None else '-'} "
                   f"{u.marks} {u.stage or u.leaf_kind or '-'} "
                   f"{u.leaf_kind or 'internal'}")
    return out


def check_invariants(tree: DebugTree) -> list[str]:
    """Structural sweep over a materialized tree.  Returns human-readable
    violation strings; an empty list means the tree is clean.

    Checks: disjoint marking of non-falsifying edges (a marker shared with an
    ancestor edge forces a falsified child), at-least-one mark on every
    width-3 expansion past the disjoint prefix, the shoot weight floor
    3t - n on depth-t shoots, per-mark mass ceilings, the twomark-stage shape
    (a designated falsifying edge, effective width at most 2, mass at most
    3/2), the 9/4 mass ceiling for once-marked free-stage nodes on the
    controlled route, and the per-shoot heavy-clause budget.
    """
    bad: list[str] = []
    n, t = tree.n, tree.t

    def walk(u: TreeNode, path_marker_ids: set[int], heavy: int,
             budget: int | None):
        if u.children:
            m = mass(tree, u)
            j = marked_child_count(tree, u)
            if m > Fraction(6 - j, 2):
                bad.append(f"node {u.id}: {j}-marked mass {m} > {Fraction(6-j,2)}")
            if u.depth >= tree.t0 and u.clause is not None and len(u.clause) == 3 \
                    and j == 0:
                bad.append(f"node {u.id}: width-3 expansion at depth {u.depth} unmarked")
            if u.stage == TWOMARK:
                if not any(k.falsifying and k.marks > 0 for k in tree.child_nodes(u)):
                    bad.append(f"node {u.id}: twomark node lacks a marked falsifying edge")
                if effective_width(tree, u) > 2:
                    bad.append(f"node {u.id}: twomark node effective width > 2")
                if m > Fraction(3, 2):
                    bad.append(f"node {u.id}: twomark node mass {m} > 3/2")
            if u.stage == FREE and tree.route == "controlled" and j == 1:
                if m > Fraction(9, 4):
                    bad.append(f"node {u.id}: once-marked free node mass {m} > 9/4")
        if u.heavy_budget is not None:
            budget = u.heavy_budget
            heavy = 0
        if u.stage == FREE and tree.route == "controlled" and u.children:
            kids = tree.child_nodes(u)
            if (len(kids) == 3 and not any(k.falsifying for k in kids)
                    and sorted(k.marks for k in kids) == [0, 1, 1]):
                heavy += 1
                if budget is not None and heavy > budget:
                    bad.append(f"node {u.id}: heavy count {heavy} exceeds budget {budget}")
        for k in tree.child_nodes(u):
            shared = set(k.markers) & path_marker_ids
            if shared and not k.falsifying:
                bad.append(f"edge into {k.id}: marker {sorted(shared)[0]} shared "
                           f"with an ancestor edge but child not falsified")
            walk(k, path_marker_ids | set(k.markers), heavy, budget)

    walk(tree.root, set(), 0, None)

    for leaf in tree.leaves():
        if leaf.depth == t:
            st = shoot_stats(tree, tree.root, leaf)
            if st.weight < 3 * t - n:
                bad.append(f"leaf {leaf.id}: shoot weight {st.weight} < {3*t-n}")
    return bad
