"""Pseudomaximum collections of pairwise variable-disjoint clauses.

Maximum 3-set packing is NP-hard, so the search keeps greedily-maximal
collections instead and grows them whenever a structural check exposes a
strictly larger disjoint family ("reset").  Each reset enlarges the collection
by at least one clause, so a collection resets at most n times.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cnf import Clause, clause_vars
from .errors import InternalInvariantError

# Stage tags, by what the stage expands with: the pairwise-disjoint prefix,
# once-marked clauses, twice-marked width-reduced clauses.
BASE = "base"
ONEMARK = "onemark"
TWOMARK = "twomark"


@dataclass(frozen=True)
class ResetEvent:
    stage: str
    old_size: int
    new_size: int
    witness: tuple[Clause, ...]

    def as_dict(self) -> dict:
        return {"stage": self.stage, "old_size": self.old_size,
                "new_size": self.new_size,
                "witness": [list(c) for c in self.witness]}


@dataclass
class DisjointCollection:
    """Ordered list of pairwise variable-disjoint clauses plus reset history.

    The order is the expansion order of tree levels, so it is kept canonical
    (sorted) for reproducibility."""

    members: list[Clause]
    universe_tag: str = BASE
    reset_count: int = 0
    events: list[ResetEvent] = field(default_factory=list)

    def __post_init__(self):
        _check_disjoint(self.members, self.universe_tag)

    def __len__(self) -> int:
        return len(self.members)

    def variables(self) -> frozenset[int]:
        return frozenset(v for c in self.members for v in clause_vars(c))


def _check_disjoint(clauses: Sequence[Clause], tag: str) -> None:
    seen: set[int] = set()
    for c in clauses:
        vs = clause_vars(c)
        if any(v in seen for v in vs):
            raise InternalInvariantError(
                f"{tag}: clauses not pairwise variable-disjoint: {clauses}")
        seen.update(vs)


def greedy_maximal(candidates: Iterable[Clause], tag: str = BASE,
                   keep: Sequence[Clause] = ()) -> DisjointCollection:
    """Scan candidates in canonical order, adding every clause disjoint from
    the collection so far.  ``keep`` seeds the collection (used after resets).
    The result is maximal: no candidate is disjoint from all members."""
    members = list(keep)
    used = {v for c in members for v in clause_vars(c)}
    for c in sorted(set(candidates)):
        vs = clause_vars(c)
        if c not in members and not any(v in used for v in vs):
            members.append(c)
            used.update(vs)
    members.sort()
    return DisjointCollection(members, tag)


def is_maximal(coll: DisjointCollection, candidates: Iterable[Clause]) -> bool:
    used = coll.variables()
    return all(set(clause_vars(c)) & used for c in set(candidates) - set(coll.members))


def attempt_reset(coll: DisjointCollection, removed: Iterable[Clause],
                  added: Iterable[Clause],
                  extend_from: Iterable[Clause] = ()) -> ResetEvent | None:
    """Replace ``removed`` members by ``added`` clauses if that strictly grows
    the collection; afterwards re-extend greedily over ``extend_from`` so the
    collection stays maximal.  Returns the event, or None for a no-op.

    The caller guarantees disjointness of the witness; a violation means the
    structural argument that produced it is wrong, and is raised as an
    internal error rather than an input error.
    """
    removed = list(removed)
    added = list(added)
    for c in removed:
        if c not in coll.members:
            raise InternalInvariantError(f"reset removes non-member {c}")
    survivors = [c for c in coll.members if c not in removed]
    new_members = survivors + [c for c in added if c not in survivors]
    if len(new_members) <= len(coll.members):
        return None
    _check_disjoint(new_members, coll.universe_tag)
    grown = greedy_maximal(extend_from, coll.universe_tag, keep=new_members)
    event = ResetEvent(coll.universe_tag, len(coll.members), len(grown),
                       tuple(sorted(added)))
    coll.members = grown.members
    coll.reset_count += 1
    coll.events.append(event)
    return event
