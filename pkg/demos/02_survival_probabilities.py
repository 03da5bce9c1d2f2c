"""Survival probabilities, exactly and by sampling.

Under uniformly random sibling orderings, a non-falsifying edge whose label
is already carried by k ancestor child edges survives with probability
exactly 2^-k, and (for negation-closed inputs) the marker sets along any
surviving path are pairwise disjoint, so leaf survival probabilities multiply.
Enumerating *every* joint ordering of a small tree confirms both facts with
exact rational arithmetic; Monte Carlo estimates converge to the same value.
"""

from fractions import Fraction

import naenum as ne
from naenum.analysis import estimate_psi

f = ne.random_negation_closed(6, 4, seed=2006)
tau = ne.brute_force(f).tau
report = ne.enumerate_all_orderings(f, tau)

print(f"instance: n={f.n}, {len(f.clauses)} clauses, t={tau}")
print(f"joint orderings enumerated: {report.orderings}")
print(f"average surviving leaves  : {report.mean_surviving} "
      f"(~{float(report.mean_surviving):.4f})")
print(f"sum over leaves of 2^-marks: {report.predicted_psi}")
assert report.mean_surviving == report.predicted_psi

print("\nper-edge survival frequencies (all exactly 2^-marks):")
shown = 0
for v in report.tree.nodes[1:]:
    if v.falsifying:
        continue
    freq = report.edge_survival[v.id]
    assert freq == Fraction(1, 2 ** v.marks)
    if v.marks and shown < 5:
        print(f"  edge into node {v.id:3d} (label {v.label}, {v.marks} marks): {freq}")
        shown += 1

est = estimate_psi(f, tau, samples=20_000, seed=1)
print(f"\nMonte Carlo: {est.mean:.4f} +- {est.std_error:.4f} "
      f"({est.samples} samples, method={est.method})")

# the extremal family pins the budget with zero variance
for n in (8, 12):
    g = ne.negation_closure(ne.maj(n, 3))
    est = estimate_psi(g, n // 2, samples=2000, seed=3)
    print(f"majority n={n:2d}: psi = {est.mean:.1f} +- {est.std_error:.3f} "
          f"(budget 6^{n//4} = {6 ** (n // 4)})")
