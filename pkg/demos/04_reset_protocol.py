"""Watching the disjoint collections grow.

Maximum disjoint clause packing is NP-hard, so the search settles for
greedily-maximal collections and lets its own structural checks act as
improving oracles: whenever a check would fail, it hands over a strictly
larger disjoint family, the collection is replaced and re-extended, and the
affected subtree is rebuilt.  Each reset grows a collection by at least one
clause, so there are at most n of them per collection.
"""

import naenum as ne

# two once-marked clauses sit on both spare variables of one base clause with
# disjoint tails; swapping them in for that clause grows the base collection
f = ne.negation_closure(ne.Formula.of(8, [(1, 2, 3), (2, 4, 5), (3, 6, 7)]))
base, t0 = ne.disjoint_stage(f)
print(f"greedy base collection: {base.members} (size {t0})")

tau = ne.brute_force(f).tau
sols, stats = ne.collect_solutions(f, tau)
print(f"t = {tau}: {len(sols)} solutions, route = {stats.route}, "
      f"final t0 = {stats.t0}")
for ev in stats.reset_events:
    print(f"  reset[{ev['stage']}] {ev['old_size']} -> {ev['new_size']}: "
          f"{ev['reason']}")
assert ne.verify_enumeration(f, tau, sols).passed

# a twice-marked clause pairing one level's spare variable with another
# level's tail variable is a 1-for-2 swap witness
g = ne.negation_closure(ne.Formula.of(
    12, [(1, 8, 9), (2, 3, 8), (4, 10, 11), (5, 6, 10), (5, 7, 9)]))
tau = ne.brute_force(g).tau
sols, stats = ne.collect_solutions(g, tau)
print(f"\nsecond instance, t = {tau}: {len(sols)} solutions, "
      f"resets = {stats.resets}")
for ev in stats.reset_events:
    print(f"  reset[{ev['stage']}] {ev['old_size']} -> {ev['new_size']}: "
          f"{ev['reason']}")
assert ne.verify_enumeration(g, tau, sols).passed

# controlled-stage bookkeeping is exposed per depth-t0 node
h = ne.random_negation_closed(10, 11, seed=9)
tau = ne.brute_force(h).tau
_, stats = ne.collect_solutions(h, tau)
print(f"\nrandom controlled-route instance (n=10): t = {tau}")
for prof in stats.profiles[:3]:
    print(f"  u0 at {prof['q_u0']}: t1={prof['t1']} m_B={prof['m_b']} "
          f"m_R={prof['m_r']} m'_R={prof['m_r_prime']} I={prof['I']} "
          f"twomark lengths {prof['ell_histogram']}")
