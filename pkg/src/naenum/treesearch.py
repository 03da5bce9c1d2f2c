"""Pruned depth-first enumeration of weight-t transversals.

The tree shape is fixed by the staged clause selection (it never depends on
sibling orderings); the traversal order does.  Before the search crosses an
edge it checks whether the edge's label already appeared on a child edge to
the left of the current path — crossing such an edge could only revisit
solution sets already reachable further left, so it is skipped.  With that
rule every weight-t transversal is emitted exactly once, at its leftmost leaf.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

from .cnf import Clause, Formula, clause_vars, is_negation_closed
from .errors import (BudgetExceeded, InputNotClosed, InternalInvariantError,
                     ParameterError, PreconditionViolated, WidthError)
from .matching import (BASE, ONEMARK, TWOMARK, DisjointCollection,
                       attempt_reset, greedy_maximal)
from .selection import (FREE, BaseResetSignal, OnemarkResetSignal,
                        StageProfile, TwomarkContext, TwomarkResetSignal,
                        branch_on_t0, build_stage_profile, canonical_pick,
                        twomark_context)
from .tree import DebugTree, TreeNode

PROFILE_CAP = 512
DEBUG_TREE_MAX_N = 24


@dataclass(frozen=True)
class OrderingSource:
    """How sibling edges are ordered during traversal.  ``random`` draws each
    node's ordering from a stream keyed by (seed, path labels), so the order
    at a node never depends on how sibling subtrees were explored."""

    kind: str = "fixed"
    seed: int = 0

    @classmethod
    def fixed(cls) -> "OrderingSource":
        return cls("fixed", 0)

    @classmethod
    def random(cls, seed: int) -> "OrderingSource":
        return cls("random", seed)

    @classmethod
    def exhaustive(cls) -> "OrderingSource":
        return cls("exhaustive", 0)


@dataclass
class SearchStats:
    nodes_visited: int = 0
    leaves_visited: int = 0          # surviving depth-t leaves
    falsified_leaves: int = 0
    superfluous_skips: int = 0
    solutions_emitted: int = 0
    route: str = ""
    t0: int = 0
    resets: dict = field(default_factory=lambda: {BASE: 0, ONEMARK: 0, TWOMARK: 0})
    reset_events: list = field(default_factory=list)
    profiles: list = field(default_factory=list)
    profiles_truncated: bool = False

    def as_dict(self) -> dict:
        return {"nodes_visited": self.nodes_visited,
                "leaves_visited": self.leaves_visited,
                "falsified_leaves": self.falsified_leaves,
                "superfluous_skips": self.superfluous_skips,
                "solutions_emitted": self.solutions_emitted,
                "route": self.route, "t0": self.t0,
                "resets": dict(self.resets),
                "reset_events": list(self.reset_events),
                "profiles": list(self.profiles),
                "profiles_truncated": self.profiles_truncated}


@dataclass(frozen=True)
class _Frame:
    """Path-local controlled-stage bookkeeping below one depth-t0 node."""

    prof: StageProfile
    took: frozenset[int]             # base levels entered via the marked X var
    k2: TwomarkContext | None
    heavy: int
    heavies: tuple[Clause, ...]
    u0_id: int | None = None


def validate_engine_input(f: Formula, t: int) -> None:
    if f.max_width > 3:
        raise WidthError(f"engine accepts width <= 3, found width {f.max_width}")
    if not 0 <= t <= f.n:
        raise ParameterError(f"target weight t={t} outside 0..{f.n}")
    if not is_negation_closed(f):
        raise InputNotClosed("formula is not negation-closed; close it first")


class _Engine:
    def __init__(self, f: Formula, t: int, ordering: OrderingSource,
                 *, debug_assertions: bool | None = None,
                 record: bool = False,
                 base: DisjointCollection | None = None):
        validate_engine_input(f, t)
        if ordering.kind == "exhaustive":
            raise ParameterError("use enumerate_all_orderings for exhaustive mode")
        self.f = f
        self.n = f.n
        self.t = t
        self.ordering = ordering
        self.record = record
        if debug_assertions is None:
            debug_assertions = f.n <= 32
        self.debug_assertions = debug_assertions
        self.seed_bytes = (ordering.seed & (2 ** 64 - 1)).to_bytes(8, "little")

        self.lits = list(f.clauses)
        self.posvars = [tuple(l for l in c if l > 0) for c in self.lits]
        self.pos_occ: list[list[int]] = [[] for _ in range(self.n + 1)]
        self.neg_occ: list[list[int]] = [[] for _ in range(self.n + 1)]
        for i, c in enumerate(self.lits):
            for l in c:
                (self.pos_occ[l] if l > 0 else self.neg_occ[-l]).append(i)
        self.mono3 = f.monotone_clauses(3)
        self.has_empty_clause = any(len(c) == 0 for c in self.lits)

        self.base = base if base is not None else greedy_maximal(self.mono3, BASE)
        self.stats = SearchStats()
        self.buffer: list[tuple[int, ...]] = []
        self.tree_nodes: list[TreeNode] = []
        self.tree_profiles: list[StageProfile] = []
        self._seen: set[tuple[int, ...]] = set()

    # ------------------------------------------------------------------
    # incremental residual-formula state

    def _reset_state(self) -> None:
        m = len(self.lits)
        self.sat = [False] * m
        self.size = [len(c) for c in self.lits]
        self.nneg = [sum(1 for l in c if l < 0) for c in self.lits]
        self.poslive = sum(1 for i in range(m)
                           if self.size[i] > 0 and self.nneg[i] == 0)
        self.neg_unit = [0] * (self.n + 1)
        for i in range(m):
            if self.size[i] == 1 and self.lits[i][0] < 0:
                self.neg_unit[-self.lits[i][0]] += 1
        self.in_q = [False] * (self.n + 1)
        self.q: list[int] = []
        self.label_cnt = [0] * (self.n + 1)
        self.left_cnt = [0] * (self.n + 1)
        self.label_nodes: list[list[int]] = [[] for _ in range(self.n + 1)]

    def _remaining_lit(self, cid: int) -> int:
        for l in self.lits[cid]:
            if not self.in_q[abs(l)]:
                return l
        raise InternalInvariantError("no remaining literal in live clause")

    def _assign(self, x: int) -> list[tuple[int, int]]:
        self.q.append(x)
        self.in_q[x] = True
        trail: list[tuple[int, int]] = []
        for cid in self.pos_occ[x]:
            if not self.sat[cid]:
                self.sat[cid] = True
                trail.append((0, cid))
                if self.nneg[cid] == 0:
                    self.poslive -= 1
        for cid in self.neg_occ[x]:
            if not self.sat[cid]:
                self.size[cid] -= 1
                self.nneg[cid] -= 1
                trail.append((1, cid))
                if self.nneg[cid] == 0:
                    self.poslive += 1
                if self.size[cid] == 1:
                    l = self._remaining_lit(cid)
                    if l < 0:
                        self.neg_unit[-l] += 1
                        trail.append((2, -l))
                elif self.size[cid] == 0:
                    raise InternalInvariantError("entered a falsified child")
        return trail

    def _unassign(self, x: int, trail: list[tuple[int, int]]) -> None:
        self.in_q[x] = False
        self.q.pop()
        for kind, v in reversed(trail):
            if kind == 0:
                self.sat[v] = False
                if self.nneg[v] == 0:
                    self.poslive += 1
            elif kind == 1:
                if self.nneg[v] == 0:
                    self.poslive -= 1
                self.size[v] += 1
                self.nneg[v] += 1
            else:
                self.neg_unit[v] -= 1

    # ------------------------------------------------------------------
    # drivers

    def run(self) -> None:
        while True:
            self.t0 = len(self.base)
            self.route = branch_on_t0(self.t0, self.n)
            self._reset_state()
            self.buffer.clear()
            self._seen.clear()
            self.tree_nodes = [TreeNode(0, 0, None, None, (), False)]
            self.tree_profiles = []
            try:
                if self.has_empty_clause:
                    self.stats.falsified_leaves += 1
                    self.tree_nodes[0].leaf_kind = "falsified"
                else:
                    self._node(0, None, 0)
                break
            except BaseResetSignal as sig:
                self._apply_base_reset(sig)
        self.stats.route = self.route
        self.stats.t0 = self.t0
        self.stats.solutions_emitted = len(self.buffer)

    def run_from_prefix(self, prefix: Sequence[int]) -> None:
        """Search only the subtree under the given disjoint-stage path; used by
        the parallel driver.  Sibling edges left of the prefix still feed the
        left-label bookkeeping of deeper superfluous checks."""
        self.t0 = len(self.base)
        self.route = branch_on_t0(self.t0, self.n)
        self._reset_state()
        self.buffer.clear()
        self.tree_nodes = [TreeNode(0, 0, None, None, (), False)]
        if self.has_empty_clause:
            return
        try:
            self._descend_prefix(list(prefix), 0)
        except BaseResetSignal as sig:
            raise sig
        self.stats.route = self.route
        self.stats.t0 = self.t0
        self.stats.solutions_emitted = len(self.buffer)

    def _descend_prefix(self, prefix: list[int], depth: int) -> None:
        if depth == len(prefix):
            self._node(depth, None, 0)
            return
        labels = clause_vars(self.base.members[depth])
        order = self._order_children(labels)
        if prefix[depth] not in labels:
            raise InternalInvariantError("prefix label not at this level")
        for x in order:
            if x == prefix[depth]:
                break
            self.left_cnt[x] += 1
        pushed = [y for y in order[:order.index(prefix[depth])]]
        for y in labels:
            self.label_cnt[y] += 1
        x = prefix[depth]
        if self.neg_unit[x] > 0:
            raise InternalInvariantError("falsifying edge inside a valid prefix")
        trail = self._assign(x)
        try:
            self._descend_prefix(prefix, depth + 1)
        finally:
            self._unassign(x, trail)
            for y in labels:
                self.label_cnt[y] -= 1
            for y in pushed:
                self.left_cnt[y] -= 1

    def _apply_base_reset(self, sig: BaseResetSignal) -> None:
        event = attempt_reset(self.base, sig.removed, sig.added,
                              extend_from=self.mono3)
        if event is None:
            raise InternalInvariantError(
                f"base reset did not grow the collection: {sig.reason}")
        if self.base.reset_count > self.n:
            raise InternalInvariantError("base collection reset more than n times")
        self.stats.resets[BASE] += 1
        self.stats.reset_events.append({**event.as_dict(), "reason": sig.reason})

    # ------------------------------------------------------------------
    # recursion

    def _node(self, depth: int, fr: _Frame | None, node_id: int) -> None:
        self.stats.nodes_visited += 1
        if depth == self.t:
            self.stats.leaves_visited += 1
            node = self.tree_nodes[node_id] if self.record else None
            if node is not None:
                node.leaf_kind = "viable"
            if self.poslive == 0:
                self._emit(node)
            return
        if self.poslive == 0:
            raise PreconditionViolated(
                f"{sorted(self.q)} is a transversal of weight {depth} < t={self.t}")
        if self.route == "controlled" and depth == self.t0 and fr is None:
            self._run_u0(depth, node_id)
            return
        if fr is None:
            labels, stage, fals_var = self._select(depth, fr)
            self._expand(depth, labels, stage, fals_var, fr, node_id)
        else:
            self._node_tail(depth, fr, node_id)

    def _run_u0(self, depth: int, node_id: int) -> None:
        c1_keep: tuple[Clause, ...] = ()
        cr_keep: tuple[Clause, ...] = ()
        one_resets = two_resets = 0
        buf_mark = len(self.buffer)
        tree_mark = len(self.tree_nodes)
        while True:
            prof = build_stage_profile(self.f, self.base, tuple(self.q),
                                       c1_keep, cr_keep)
            fr = _Frame(prof, frozenset(), None, 0, (), node_id)
            try:
                self._node_tail(depth, fr, node_id)
                self._record_profile(prof)
                return
            except OnemarkResetSignal as sig:
                event = attempt_reset(prof.c1, [], [sig.clause],
                                      extend_from=prof.f1)
                if event is None:
                    raise InternalInvariantError(
                        f"onemark reset did not grow: {sig.reason}")
                one_resets += 1
                if one_resets > self.n:
                    raise InternalInvariantError("onemark collection reset more than n times")
                self.stats.resets[ONEMARK] += 1
                self.stats.reset_events.append({**event.as_dict(), "reason": sig.reason})
                c1_keep = tuple(prof.c1.members)
                cr_keep = ()
            except TwomarkResetSignal as sig:
                event = attempt_reset(prof.cr, list(prof.cr.members), sig.family,
                                      extend_from=prof.f2r)
                if event is None:
                    raise InternalInvariantError(
                        f"twomark reset did not grow: {sig.reason}")
                two_resets += 1
                if two_resets > self.n:
                    raise InternalInvariantError("twomark collection reset more than n times")
                self.stats.resets[TWOMARK] += 1
                self.stats.reset_events.append({**event.as_dict(), "reason": sig.reason})
                cr_keep = tuple(prof.cr.members)
            del self.buffer[buf_mark:]
            self._seen = set(self.buffer)
            if self.record:
                del self.tree_nodes[tree_mark:]
                u0 = self.tree_nodes[node_id]
                u0.children.clear()
                u0.ell = u0.heavy_budget = None
                u0.stage = u0.clause = None

    def _node_tail(self, depth: int, fr: _Frame, node_id: int) -> None:
        if fr.k2 is None and depth - self.t0 >= fr.prof.t1:
            k2 = twomark_context(fr.prof, fr.took)
            fr.prof.ell_histogram[k2.ell] = fr.prof.ell_histogram.get(k2.ell, 0) + 1
            fr = replace(fr, k2=k2, heavy=0)
            if self.record:
                self.tree_nodes[node_id].ell = k2.ell
                self.tree_nodes[node_id].heavy_budget = k2.heavy_budget
        labels, stage, fals_var = self._select(depth, fr)
        self._expand(depth, labels, stage, fals_var, fr, node_id)

    def _record_profile(self, prof: StageProfile) -> None:
        if self.record:
            self.tree_profiles.append(prof)
        if len(self.stats.profiles) < PROFILE_CAP:
            self.stats.profiles.append(prof.as_dict())
        else:
            self.stats.profiles_truncated = True

    def _select(self, depth: int, fr: _Frame | None):
        if depth < self.t0:
            c = self.base.members[depth]
            return clause_vars(c), BASE, None
        if fr is None:
            return self._free_labels(), FREE, None
        k = depth - self.t0
        if k < fr.prof.t1:
            return clause_vars(fr.prof.c1.members[k]), ONEMARK, None
        j = k - fr.prof.t1
        if fr.k2 is not None and j < fr.k2.ell:
            return clause_vars(fr.k2.clauses[j]), TWOMARK, fr.k2.fals_vars[j]
        return self._free_labels(), FREE, None

    def _free_labels(self) -> tuple[int, ...]:
        cands = [self.posvars[i] for i in range(len(self.lits))
                 if not self.sat[i] and self.nneg[i] == 0]
        if not cands:
            raise InternalInvariantError("no positive clause despite live count")
        return canonical_pick(cands)

    # ------------------------------------------------------------------
    # expansion

    def _order_children(self, labels: tuple[int, ...]) -> list[int]:
        order = list(labels)
        if self.ordering.kind == "random":
            h = hashlib.blake2b(digest_size=8)
            h.update(self.seed_bytes)
            h.update(b"".join(v.to_bytes(3, "little") for v in self.q))
            random.Random(int.from_bytes(h.digest(), "big")).shuffle(order)
        return order

    def _expand(self, depth: int, labels: tuple[int, ...], stage: str,
                fals_var: int | None, fr: _Frame | None, node_id: int) -> None:
        kids = [(x, self.label_cnt[x], self.neg_unit[x] > 0) for x in labels]
        fr = self._stage_checks(depth, labels, stage, fals_var, kids, fr)

        node = self.tree_nodes[node_id] if self.record else None
        if node is not None:
            node.stage = stage
            node.clause = labels
            if fr is not None and fr.u0_id is not None:
                node.u0 = fr.u0_id

        order = labels if self.record else self._order_children(labels)
        for x in labels:
            self.label_cnt[x] += 1
            if self.record:
                self.label_nodes[x].append(node_id)
        processed: list[int] = []
        try:
            for x in order:
                m, fals = next((mm, ff) for (xx, mm, ff) in kids if xx == x)
                child_id = 0
                if node is not None:
                    child_id = len(self.tree_nodes)
                    child = TreeNode(child_id, depth + 1, node_id, x,
                                     tuple(self.label_nodes[x][:-1]), fals)
                    if fr is not None and fr.u0_id is not None:
                        child.u0 = fr.u0_id
                    self.tree_nodes.append(child)
                    node.children.append(child_id)
                if not self.record and self.left_cnt[x] > 0:
                    self.stats.superfluous_skips += 1
                elif fals:
                    self.stats.falsified_leaves += 1
                    if node is not None:
                        self.tree_nodes[child_id].leaf_kind = "falsified"
                else:
                    child_fr = fr
                    if fr is not None and stage == ONEMARK:
                        k = depth - self.t0
                        lvl = fr.prof.c1_levels[k]
                        if x == fr.prof.x_tilde[lvl]:
                            child_fr = replace(fr, took=fr.took | {lvl})
                    trail = self._assign(x)
                    try:
                        self._node(depth + 1, child_fr, child_id)
                    finally:
                        self._unassign(x, trail)
                self.left_cnt[x] += 1
                processed.append(x)
        finally:
            for x in labels:
                self.label_cnt[x] -= 1
                if self.record:
                    self.label_nodes[x].pop()
            for x in processed:
                self.left_cnt[x] -= 1

    def _stage_checks(self, depth: int, labels: tuple[int, ...], stage: str,
                      fals_var: int | None,
                      kids: list[tuple[int, int, bool]],
                      fr: _Frame | None) -> _Frame | None:
        if depth >= self.t0 and len(labels) == 3 and all(m == 0 for _, m, _ in kids):
            # a width-3 monotone clause untouched by every earlier level beats
            # the maximal base collection: grow it and rebuild
            raise BaseResetSignal([], [labels],
                                  "unmarked width-3 expansion past the disjoint prefix")
        if stage == TWOMARK:
            if not self.debug_assertions:
                return fr
            des = next(((m, f) for x, m, f in kids if x == fals_var), None)
            if des is None or not des[1]:
                raise InternalInvariantError(
                    f"twomark clause {labels}: designated edge {fals_var} not falsifying")
            nonfals = [(x, m) for x, m, f in kids if not f]
            if len(nonfals) > 2:
                raise InternalInvariantError(
                    f"twomark clause {labels}: effective width {len(nonfals)} > 2")
            mass = sum(Fraction(1, 2 ** m) for _, m in nonfals)
            if mass > Fraction(3, 2):
                raise InternalInvariantError(
                    f"twomark clause {labels}: mass {mass} > 3/2")
            return fr
        if stage == FREE and fr is not None:
            marked = [(x, m) for x, m, f in kids if m > 0]
            clean3 = len(kids) == 3 and not any(f for _, _, f in kids)
            if clean3 and len(marked) == 1 and marked[0][1] == 1:
                clause = tuple(labels)
                if clause not in fr.prof.f1 or \
                        set(labels) & fr.prof.c1.variables():
                    raise InternalInvariantError(
                        f"mass-5/2 clause {clause} is not an onemark witness")
                raise OnemarkResetSignal(
                    clause, "once-marked free-stage node of mass 5/2")
            if clean3 and len(marked) == 2 and all(m == 1 for _, m in marked):
                clause = tuple(labels)
                if fr.k2 is not None and fr.heavy + 1 > fr.k2.heavy_budget:
                    self._heavy_overflow(fr, clause)
                fr = replace(fr, heavy=fr.heavy + 1,
                             heavies=fr.heavies + (clause,))
        return fr

    def _heavy_overflow(self, fr: _Frame, clause: Clause) -> None:
        prof = fr.prof
        heavies = fr.heavies + (clause,)
        r = [c for c in heavies if c in prof.f2r_set]
        b = [c for c in heavies if c in prof.f2b_set]
        if len(r) + fr.k2.ell > prof.m_r_prime:
            raise TwomarkResetSignal(
                list(fr.k2.clauses) + r,
                f"{len(r)} heavy twomark-pool clauses on one shoot")
        if len(b) > prof.m_b:
            t_side = [prof.base.members[i] for i in prof.v1]
            raise BaseResetSignal(
                list(prof.base.members), b + t_side,
                f"{len(b)} disjoint heavy clauses outside the twomark pool")
        raise InternalInvariantError(
            f"heavy budget {fr.k2.heavy_budget} exceeded without a witness: "
            f"{len(r)} pool heavies, {len(b)} outside")

    def _emit(self, node: TreeNode | None) -> None:
        sol = tuple(sorted(self.q))
        if self.debug_assertions and not self.record:
            # the pruned traversal reaches each transversal exactly once; the
            # unpruned debug tree legitimately repeats them
            if sol in self._seen:
                raise InternalInvariantError(f"solution {sol} emitted twice")
            self._seen.add(sol)
        if node is not None:
            node.is_transversal = True
        self.buffer.append(sol)


# ----------------------------------------------------------------------
# public entry points


def enumerate_solutions(f: Formula, t: int,
                        ordering: OrderingSource | None = None,
                        sink: Callable[[tuple[int, ...]], None] | None = None,
                        *, debug_assertions: bool | None = None,
                        parallel: int = 1,
                        base: DisjointCollection | None = None) -> SearchStats:
    """Emit every weight-t satisfying assignment of a negation-closed 3-CNF
    exactly once, assuming no satisfying assignment has weight below t
    (violations are detected and raised when the search trips over them)."""
    ordering = ordering or OrderingSource.fixed()
    if parallel > 1:
        return _parallel_enumerate(f, t, ordering, sink, parallel)
    eng = _Engine(f, t, ordering, debug_assertions=debug_assertions, base=base)
    eng.run()
    if sink is not None:
        for sol in eng.buffer:
            sink(sol)
    return eng.stats


def count_solutions(f: Formula, t: int,
                    ordering: OrderingSource | None = None,
                    **kw) -> tuple[int, SearchStats]:
    stats = enumerate_solutions(f, t, ordering, None, **kw)
    return stats.solutions_emitted, stats


def collect_solutions(f: Formula, t: int,
                      ordering: OrderingSource | None = None,
                      **kw) -> tuple[list[tuple[int, ...]], SearchStats]:
    out: list[tuple[int, ...]] = []
    stats = enumerate_solutions(f, t, ordering, out.append, **kw)
    return out, stats


def build_debug_tree(f: Formula, t: int,
                     base: DisjointCollection | None = None) -> DebugTree:
    """Materialize the full transversal tree (no ordering, no pruning) for
    invariant sweeps and exhaustive-ordering analysis.  Small n only."""
    if f.n > DEBUG_TREE_MAX_N:
        raise ParameterError(f"debug trees limited to n <= {DEBUG_TREE_MAX_N}")
    eng = _Engine(f, t, OrderingSource.fixed(), record=True,
                  debug_assertions=True, base=base)
    eng.run()
    tree = DebugTree(f.n, t, eng.route, eng.t0, eng.tree_nodes,
                     eng.tree_profiles)
    tree.stats = eng.stats
    return tree


# ----------------------------------------------------------------------
# exhaustive orderings


@dataclass
class ExhaustiveReport:
    """Aggregate of a full sweep over every joint sibling ordering."""

    orderings: int
    total_surviving: int
    edge_survival: dict[int, Fraction]   # node id of a non-falsifying edge
    predicted_psi: Fraction              # sum over viable leaves of 2^-marks
    tree: DebugTree
    per_ordering: list[tuple[tuple, int]] | None = None

    @property
    def mean_surviving(self) -> Fraction:
        return Fraction(self.total_surviving, self.orderings)


def count_orderings(tree: DebugTree) -> int:
    total = 1
    for u in tree.internal():
        k = len(u.children)
        for i in range(2, k + 1):
            total *= i
    return total


def enumerate_all_orderings(f: Formula, t: int, budget: int = 10 ** 6,
                            keep_per_ordering: bool = False) -> ExhaustiveReport:
    """Evaluate every joint sibling ordering of the transversal tree: exact
    per-edge survival frequencies and the exact average surviving-leaf count.
    Refuses when the ordering product exceeds ``budget``."""
    from .tree import psi_exact

    tree = build_debug_tree(f, t)
    total = count_orderings(tree)
    if total > budget:
        raise BudgetExceeded(f"{total} orderings exceed budget {budget}")

    nodes = tree.nodes
    n_nodes = len(nodes)
    paths: list[list[int]] = [[] for _ in range(n_nodes)]
    for u in nodes:
        paths[u.id] = (paths[u.parent] + [u.id]) if u.parent is not None else [u.id]
    # per-edge constraints: (marker id, its same-label child, its path child)
    cons: list[list[tuple[int, int, int]]] = [[] for _ in range(n_nodes)]
    for v in nodes[1:]:
        for w_id in v.markers:
            w = nodes[w_id]
            x_child = next(c for c in w.children if nodes[c].label == v.label)
            path_child = paths[v.id][w.depth + 1]
            cons[v.id].append((w_id, x_child, path_child))

    internal = [u for u in nodes if u.children]
    perm_lists = [list(itertools.permutations(u.children)) for u in internal]
    rank = [0] * n_nodes
    survived_count = [0] * n_nodes
    total_surviving = 0
    per_ordering: list[tuple[tuple, int]] | None = [] if keep_per_ordering else None

    alive = [False] * n_nodes
    alive[0] = not tree.root.leaf_kind == "falsified"
    for combo in itertools.product(*perm_lists):
        for ordered in combo:
            for pos, cid in enumerate(ordered):
                rank[cid] = pos
        LL = 0
        for v in nodes[1:]:
            superf = any(rank[xc] < rank[pc] for _, xc, pc in cons[v.id])
            edge_ok = (not superf) and (not v.falsifying)
            if edge_ok:
                survived_count[v.id] += 1
            alive[v.id] = alive[v.parent] and edge_ok
            if v.leaf_kind == "viable" and alive[v.id] and v.depth == t:
                LL += 1
        if t == 0 and tree.root.leaf_kind == "viable":
            LL = 1
        total_surviving += LL
        if per_ordering is not None:
            per_ordering.append((combo, LL))

    edge_survival = {v.id: Fraction(survived_count[v.id], total)
                     for v in nodes[1:] if not v.falsifying}
    return ExhaustiveReport(total, total_surviving, edge_survival,
                            psi_exact(tree), tree, per_ordering)


# ----------------------------------------------------------------------
# parallel driver


def _subtree_worker(args):
    f, t, ordering, base_members, prefix = args
    base = DisjointCollection(list(base_members), BASE)
    eng = _Engine(f, t, ordering, base=base)
    try:
        eng.run_from_prefix(prefix)
    except BaseResetSignal as sig:
        return ("reset", sig.removed, sig.added, sig.reason)
    except PreconditionViolated as exc:
        return ("precondition", str(exc))
    return ("ok", eng.buffer, eng.stats.as_dict())


def _valid_prefixes(eng: _Engine, depth_limit: int) -> tuple[list[tuple[int, ...]], int]:
    """All non-falsified disjoint-stage paths to depth_limit, plus the count
    of falsified leaves encountered among them."""
    eng._reset_state()
    prefixes: list[tuple[int, ...]] = []
    falsified = 0

    def rec(depth: int) -> None:
        nonlocal falsified
        if depth == depth_limit:
            prefixes.append(tuple(eng.q))
            return
        labels = clause_vars(eng.base.members[depth])
        for x in eng._order_children(labels):
            if eng.neg_unit[x] > 0:
                falsified += 1
                continue
            trail = eng._assign(x)
            try:
                rec(depth + 1)
            finally:
                eng._unassign(x, trail)

    rec(0)
    return prefixes, falsified


def _parallel_enumerate(f: Formula, t: int, ordering: OrderingSource,
                        sink, workers: int) -> SearchStats:
    from concurrent.futures import ProcessPoolExecutor

    master = _Engine(f, t, ordering)
    while True:
        t0 = len(master.base)
        depth = min(t0, t)
        if depth == 0:
            stats = enumerate_solutions(f, t, ordering, sink, base=master.base)
            for k, v in master.stats.resets.items():
                stats.resets[k] += v
            stats.reset_events = master.stats.reset_events + stats.reset_events
            return stats
        prefixes, falsified = _valid_prefixes(master, depth)
        tasks = [(f, t, ordering, tuple(master.base.members), p) for p in prefixes]
        reset = None
        results = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for res in pool.map(_subtree_worker, tasks):
                results.append(res)
        for res in results:
            if res[0] == "reset":
                reset = res
                break
            if res[0] == "precondition":
                raise PreconditionViolated(res[1])
        if reset is not None:
            master._apply_base_reset(BaseResetSignal(reset[1], reset[2], reset[3]))
            continue
        stats = master.stats
        stats.route = branch_on_t0(t0, f.n)
        stats.t0 = t0
        stats.falsified_leaves += falsified
        # prefix-internal nodes, visited once each in a sequential run
        seen_prefix: set[tuple[int, ...]] = set()
        for p in prefixes:
            for k in range(len(p)):
                seen_prefix.add(p[:k])
        stats.nodes_visited += len(seen_prefix)
        solutions: list[tuple[int, ...]] = []
        for res in results:
            _, buf, st = res
            solutions.extend(tuple(s) for s in buf)
            stats.leaves_visited += st["leaves_visited"]
            stats.nodes_visited += st["nodes_visited"]
            stats.falsified_leaves += st["falsified_leaves"]
            stats.superfluous_skips += st["superfluous_skips"]
            for k, v in st["resets"].items():
                stats.resets[k] += v
            stats.reset_events.extend(st["reset_events"])
            stats.profiles.extend(st["profiles"][:max(0, PROFILE_CAP - len(stats.profiles))])
        if len(set(solutions)) != len(solutions):
            raise InternalInvariantError("duplicate solutions across subtrees")
        stats.solutions_emitted = len(solutions)
        if sink is not None:
            for s in solutions:
                sink(s)
        return stats
