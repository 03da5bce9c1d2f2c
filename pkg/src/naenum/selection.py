"""Staged clause selection for the transversal-tree search.

Levels are expanded in three phases:

* ``base`` (disjoint) stage: a greedily-maximal collection of pairwise
  variable-disjoint monotone width-3 clauses, one clause per level.
* controlled stage, entered only when the base collection has fewer than n/4
  clauses.  It has two substages below each depth-t0 node u0: ``onemark``
  expands a maximal disjoint family of once-marked monotone clauses, then
  ``twomark`` expands twice-marked clauses that carry a built-in falsifying
  edge, for a path-dependent number of levels.
* ``free`` stage: any live clause with a positive simplification, in canonical
  order (smallest residual width, then lexicographic).

Structural checks during the controlled stage can discover strictly larger
disjoint families; они are raised as reset signals, the affected collection is
grown, and the affected subtree is rebuilt.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cnf import Clause, Formula, clause_vars
from .errors import InternalInvariantError
from .matching import (BASE, ONEMARK, TWOMARK, DisjointCollection,
                       greedy_maximal)

FREE = "free"
DISJOINT = BASE  # stage tag of the disjoint prefix


class ResetSignal(Exception):
    """Internal control flow: a strictly larger disjoint family was found."""


class BaseResetSignal(ResetSignal):
    def __init__(self, removed: Sequence[Clause], added: Sequence[Clause],
                 reason: str):
        super().__init__(reason)
        self.removed = list(removed)
        self.added = list(added)
        self.reason = reason


class OnemarkResetSignal(ResetSignal):
    def __init__(self, clause: Clause, reason: str):
        super().__init__(reason)
        self.clause = clause
        self.reason = reason


class TwomarkResetSignal(ResetSignal):
    def __init__(self, family: Sequence[Clause], reason: str):
        super().__init__(reason)
        self.family = list(family)  # replacement collection, pairwise disjoint
        self.reason = reason


def disjoint_stage(f: Formula) -> tuple[DisjointCollection, int]:
    """Greedily-maximal disjoint collection of monotone width-3 clauses."""
    coll = greedy_maximal(f.monotone_clauses(3), BASE)
    return coll, len(coll)


def branch_on_t0(t0: int, n: int) -> str:
    """Route selection: skip the controlled stage when the disjoint prefix
    already covers a quarter of the variables (ties go to the free route)."""
    return FREE if 4 * t0 >= n else "controlled"


@dataclass
class StageProfile:
    """Controlled-stage bookkeeping for one depth-t0 node u0.

    Level i of the base collection is split, relative to u0's path, into the
    path label p_i and the sibling pair X_i.  V1 holds the levels whose X-pair
    feeds the onemark collection; VB the rest.  The twomark collection is a
    maximal disjoint family among the twice-marked clauses that reuse an X
    variable from a V1 level.
    """

    n: int
    t0: int
    base: DisjointCollection
    q_u0: frozenset[int]
    p: tuple[int, ...]                    # path label per base level
    x_pairs: tuple[tuple[int, int], ...]  # sibling pair per base level
    x_index: dict[int, int]               # X variable -> base level
    f1: tuple[Clause, ...]
    c1: DisjointCollection                # onemark collection, |c1| = t1
    c1_levels: tuple[int, ...]            # base level per c1 member, aligned
    x_tilde: dict[int, int]               # level in V1 -> X var used by c1
    x_hat: dict[int, int]                 # level in V1 -> the other X var
    y_index: dict[int, int]               # tail var of a c1 clause -> level
    v1: tuple[int, ...]
    vb: tuple[int, ...]
    f2r: tuple[Clause, ...]
    f2b: tuple[Clause, ...]
    cr: DisjointCollection                # twomark collection, |cr| = m'_R
    cr_level: dict[Clause, int]           # twomark clause -> its V1 level
    vr: tuple[int, ...]
    vr_prime: tuple[int, ...]
    ell_histogram: dict[int, int] = field(default_factory=dict)

    @property
    def t1(self) -> int:
        return len(self.c1)

    @property
    def m_b(self) -> int:
        return self.t0 - self.t1

    @property
    def m_r(self) -> int:
        return len(self.vr)

    @property
    def m_i(self) -> int:
        return self.t1 - self.m_r

    @property
    def m_r_prime(self) -> int:
        return len(self.cr)

    @property
    def i_value(self) -> int:
        return 3 * self.t0 + 2 * self.t1 + self.m_r_prime + self.m_b

    @property
    def f2r_set(self) -> frozenset[Clause]:
        return frozenset(self.f2r)

    @property
    def f2b_set(self) -> frozenset[Clause]:
        return frozenset(self.f2b)

    def as_dict(self) -> dict:
        return {"q_u0": sorted(self.q_u0), "t0": self.t0, "t1": self.t1,
                "m_b": self.m_b, "m_r": self.m_r, "m_i": self.m_i,
                "m_r_prime": self.m_r_prime, "I": self.i_value,
                "ell_histogram": {str(k): v for k, v in
                                  sorted(self.ell_histogram.items())}}


def build_stage_profile(f: Formula, base: DisjointCollection,
                        path_labels: Sequence[int],
                        c1_keep: Sequence[Clause] = (),
                        cr_keep: Sequence[Clause] = ()) -> StageProfile:
    """Compute the controlled-stage profile for the node reached along
    ``path_labels`` (one label per base level).

    Raises a reset signal whenever the classification uncovers a disjoint
    family that beats one of the maintained collections.  ``c1_keep`` and
    ``cr_keep`` seed the collections after such resets.
    """
    t0 = len(base)
    if len(path_labels) != t0:
        raise InternalInvariantError("path does not cover the disjoint prefix")
    mono3 = f.monotone_clauses(3)
    q0 = frozenset(path_labels)
    p: list[int] = []
    x_pairs: list[tuple[int, int]] = []
    x_index: dict[int, int] = {}
    for i, (c, lab) in enumerate(zip(base.members, path_labels)):
        vs = clause_vars(c)
        if lab not in vs:
            raise InternalInvariantError("path label not in base clause")
        rest = tuple(v for v in vs if v != lab)
        p.append(lab)
        x_pairs.append(rest)
        for v in rest:
            x_index[v] = i

    # exactly one marked variable at u0, live at u0
    f1 = tuple(c for c in mono3
               if not (set(clause_vars(c)) & q0)
               and sum(v in x_index for v in clause_vars(c)) == 1)
    c1 = greedy_maximal(f1, ONEMARK, keep=c1_keep)

    x_tilde: dict[int, int] = {}
    x_hat: dict[int, int] = {}
    y_index: dict[int, int] = {}
    c1_of_level: dict[int, Clause] = {}
    for c in c1.members:
        xs = [v for v in clause_vars(c) if v in x_index]
        i = x_index[xs[0]]
        if i in c1_of_level:
            # two onemark clauses on the same sibling pair with disjoint
            # tails: swapping them in for base level i grows the base family
            raise BaseResetSignal([base.members[i]], [c1_of_level[i], c],
                                  f"onemark clauses on both X variables of level {i}")
        c1_of_level[i] = c
        x_tilde[i] = xs[0]
        x_hat[i] = x_pairs[i][0] if x_pairs[i][1] == xs[0] else x_pairs[i][1]
        for v in clause_vars(c):
            if v != xs[0]:
                y_index[v] = i
    v1 = tuple(sorted(c1_of_level))
    vb = tuple(i for i in range(t0) if i not in c1_of_level)
    c1_levels = tuple(x_index[next(v for v in clause_vars(c) if v in x_index)]
                      for c in c1.members)

    # marking multiplicity at the end of the onemark stage
    c1_vars = c1.variables()
    qstar = q0 | {x_tilde[i] for i in v1}

    def _count(v: int) -> int:
        return (1 if v in x_index else 0) + (1 if v in c1_vars else 0)

    f2r: list[Clause] = []
    f2b: list[Clause] = []
    for c in mono3:
        vs = clause_vars(c)
        if set(vs) & qstar:
            continue
        counts = [_count(v) for v in vs]
        if sorted(counts) != [0, 1, 1]:
            continue
        marked = [v for v in vs if _count(v) == 1]
        v1_x = [v for v in marked if v in x_index and x_index[v] in c1_of_level]
        if len(v1_x) >= 2:
            i, j = sorted(x_index[v] for v in v1_x[:2])
            raise BaseResetSignal(
                [base.members[i], base.members[j]],
                [c1_of_level[i], c1_of_level[j], c],
                f"twice-marked clause spans the X pairs of levels {i} and {j}")
        if len(v1_x) == 1:
            i = x_index[v1_x[0]]
            other = next(v for v in marked if v != v1_x[0])
            if other in x_index:
                f2r.append(c)  # second mark on a VB sibling pair
            else:
                j = y_index[other]
                if j != i:
                    raise BaseResetSignal(
                        [base.members[i]], [c1_of_level[i], c],
                        f"twice-marked clause pairs level {i} with a tail of level {j}")
                f2r.append(c)  # second mark on the same level's tail
        else:
            if not any(v in x_index for v in marked):
                raise BaseResetSignal(
                    [], [c],
                    "twice-marked clause disjoint from the base collection")
            f2b.append(c)

    cr = greedy_maximal(f2r, TWOMARK, keep=cr_keep)
    cr_level = {}
    for c in cr.members:
        lv = next(x_index[v] for v in clause_vars(c)
                  if v in x_index and x_index[v] in c1_of_level)
        cr_level[c] = lv
    vr = tuple(sorted({next(x_index[v] for v in clause_vars(c)
                            if v in x_index and x_index[v] in c1_of_level)
                       for c in f2r}))
    vr_prime = tuple(sorted(cr_level.values()))
    return StageProfile(f.n, t0, base, q0, tuple(p), tuple(x_pairs), x_index,
                        f1, c1, c1_levels, x_tilde, x_hat, y_index, v1, vb,
                        tuple(f2r), tuple(f2b), cr, cr_level, vr, vr_prime)


@dataclass(frozen=True)
class TwomarkContext:
    """Path-dependent twomark plan below one end-of-onemark node u: the
    clauses to expand (one level each), the designated falsifying variable per
    clause, and the heavy-clause budget for the free stage underneath."""

    clauses: tuple[Clause, ...]
    fals_vars: tuple[int, ...]
    ell: int
    heavy_budget: int


def twomark_context(profile: StageProfile, took_marked: frozenset[int]) -> TwomarkContext:
    """``took_marked``: base levels whose onemark edge on the path used the
    marked X variable.  The twomark stage replays the matching collection
    clauses; its length equals the overlap with the collection's levels."""
    clauses = tuple(c for c in profile.cr.members
                    if profile.cr_level[c] in took_marked)
    fals = tuple(profile.x_hat[profile.cr_level[c]] for c in clauses)
    ell = len(clauses)
    budget = profile.m_r_prime + profile.m_b - ell
    return TwomarkContext(clauses, fals, ell, budget)


def canonical_pick(candidates: Sequence[tuple[int, ...]]) -> tuple[int, ...]:
    """Free-stage selection: among positive residual clauses pick the smallest
    width, ties broken lexicographically on the variable tuple."""
    return min(candidates, key=lambda vs: (len(vs), vs))


def node_mass(kids: Sequence[tuple[int, int, bool]]) -> Fraction:
    """Expected surviving children: sum of 2^-marks over non-falsifying child
    edges.  ``kids`` holds (label, mark count, falsifying) triples."""
    return sum((Fraction(1, 2 ** m) for _, m, fals in kids if not fals),
               start=Fraction(0))
