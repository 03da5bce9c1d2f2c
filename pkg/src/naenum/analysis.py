"""Closed-form bound functions, exact-rational DP tables, grid verification of
the crossover/upper-bound claims, and survival-value estimation.

Half-integer exponents of 27/8 are kept exact in the quadratic extension
Q[sqrt(6)] (sqrt(27/8) = 3*sqrt(6)/4), so every comparison in the claim grids
and profile sweeps is decided by integer arithmetic, never floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cnf import Formula
from .errors import ParameterError

Rat = Fraction


class QSqrt6:
    """Exact a + b*sqrt(6) with rational a, b.  Supports ring operations and
    total ordering (signs resolved by squaring, never by floating point)."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def of(cls, x) -> "QSqrt6":
        return x if isinstance(x, QSqrt6) else cls(x)

    def __add__(self, other):
        o = QSqrt6.of(other)
        return QSqrt6(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = QSqrt6.of(other)
        return QSqrt6(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return QSqrt6.of(other) - self

    def __mul__(self, other):
        o = QSqrt6.of(other)
        return QSqrt6(self.a * o.a + 6 * self.b * o.b,
                      self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __neg__(self):
        return QSqrt6(-self.a, -self.b)

    def sign(self) -> int:
        a, b = self.a, self.b
        if a == 0 and b == 0:
            return 0
        if a >= 0 and b >= 0:
            return 1
        if a <= 0 and b <= 0:
            return -1
        if a > 0:  # b < 0: positive iff a^2 > 6 b^2
            return 1 if a * a > 6 * b * b else (0 if a * a == 6 * b * b else -1)
        return 1 if 6 * b * b > a * a else (0 if a * a == 6 * b * b else -1)

    def _cmp(self, other) -> int:
        return (self - other).sign()

    def __eq__(self, other):
        return self._cmp(other) == 0

    def __hash__(self):
        return hash((self.a, self.b))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(6)

    def __repr__(self):
        if self.b == 0:
            return f"{self.a}"
        return f"{self.a} + {self.b}*sqrt(6)"

    def as_json(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a}+{self.b}*sqrt(6)"


SQRT_27_8 = QSqrt6(0, Fraction(3, 4))  # sqrt(27/8) = 3*sqrt(6)/4


def _pow_cache(base: Fraction):
    cache: dict[int, Fraction] = {0: Fraction(1)}

    def power(e: int) -> Fraction:
        v = cache.get(e)
        if v is None:
            v = base ** e
            cache[e] = v
        return v

    return power

_P52 = _pow_cache(Fraction(5, 2))
_P2 = _pow_cache(Fraction(2))
_P32 = _pow_cache(Fraction(3, 2))
_P94 = _pow_cache(Fraction(9, 4))
_P278 = _pow_cache(Fraction(27, 8))


def pow_half_27_8(e: int) -> QSqrt6:
    """Exact (27/8)^(e/2) for any integer e."""
    k, r = divmod(e, 2)
    v = QSqrt6(_P278(k))
    return v * SQRT_27_8 if r else v


# ----------------------------------------------------------------------
# closed forms


def f_large(w: int, d: int) -> Fraction:
    """Survival-value ceiling for a depth-d subtree whose every root-to-leaf
    shoot weighs at least w, when every node has a marked edge."""
    if d < 0:
        raise ParameterError("d must be nonnegative")
    if w <= 2 * d:
        return _P52(2 * d - w) * _P2(w - d)
    return _P2(3 * d - w) * _P32(w - 2 * d)


def g1_large(w: int, d: int) -> Fraction:
    return _P52(2 * d - w) * _P2(w - d)


def g2_large(w: int, d: int) -> Fraction:
    return _P2(3 * d - w) * _P32(w - 2 * d)


def f_small(w: int, d: int, h: int) -> QSqrt6:
    """Four-case ceiling with the extra parameter h bounding, per shoot, the
    twice-marked full-mass nodes ("heavy" nodes)."""
    if d < 0:
        raise ParameterError("d must be nonnegative")
    if h < 0:
        raise ParameterError("h must be nonnegative")
    if w <= d:
        return QSqrt6(_P94(d))
    if w <= d + h:
        return QSqrt6(_P94(2 * d - w) * _P2(w - d))
    if w <= 3 * d - h:
        return QSqrt6(_P94(2 * d - w) * _P2(h)) * pow_half_27_8(w - d - h)
    return QSqrt6(_P2(3 * d - w) * _P32(w - 2 * d))


def f_small_alt_case3(w: int, d: int, h: int) -> QSqrt6:
    """The algebraically equal second form of the third case; asserted equal
    to the first as a self-test."""
    return QSqrt6(_P2(h) * _P32(w - 2 * d)) * pow_half_27_8(3 * d - w - h)


def g1_small(w: int, d: int, h: int) -> QSqrt6:
    return QSqrt6(_P94(d))


def g2_small(w: int, d: int, h: int) -> QSqrt6:
    return QSqrt6(_P94(2 * d - w) * _P2(w - d))


def g3_small(w: int, d: int, h: int) -> QSqrt6:
    return QSqrt6(_P94(2 * d - w) * _P2(h)) * pow_half_27_8(w - d - h)


def g4_small(w: int, d: int, h: int) -> QSqrt6:
    return QSqrt6(_P2(3 * d - w) * _P32(w - 2 * d))


# ----------------------------------------------------------------------
# DP recurrences


@dataclass
class BoundTable:
    """Exact DP table over a (w,d) or (w,d,h) grid."""

    kind: str                   # "large" or "small"
    grid: dict
    wmin: int
    wmax: int
    dmax: int
    hmax: int | None = None

    def value(self, *key) -> Fraction:
        return self.grid[key]

    def csv_lines(self) -> list[str]:
        if self.kind == "large":
            head = ["w,d,value"]
            rows = [f"{w},{d},{v}" for (w, d), v in sorted(self.grid.items())]
        else:
            head = ["w,d,h,value"]
            rows = [f"{w},{d},{h},{v}" for (w, d, h), v in sorted(self.grid.items())]
        return head + rows


def dp_m_large(wmax: int, dmax: int, wmin: int = -3) -> BoundTable:
    """Worst-case survival-value recurrence on (shoot weight, depth): each
    level spends one depth and 1..3 weight for factors 5/2, 2, 3/2."""
    memo: dict[tuple[int, int], Fraction] = {}

    def m(w: int, d: int) -> Fraction:
        if d == 0:
            return Fraction(1) if w <= 0 else Fraction(0)
        key = (w, d)
        v = memo.get(key)
        if v is None:
            v = max(Fraction(5, 2) * m(w - 1, d - 1),
                    2 * m(w - 2, d - 1),
                    Fraction(3, 2) * m(w - 3, d - 1))
            memo[key] = v
        return v

    grid = {(w, d): m(w, d) for d in range(dmax + 1)
            for w in range(wmin, wmax + 1)}
    return BoundTable("large", grid, wmin, wmax, dmax)


def dp_m_small(wmax: int, dmax: int, hmax: int, wmin: int = -3) -> BoundTable:
    """Recurrence with the heavy budget h: a full-mass twice-marked level
    costs (2, 1) in (weight, budget); other levels leave h alone."""
    memo: dict[tuple[int, int, int], Fraction] = {}

    def m(w: int, d: int, h: int) -> Fraction:
        if h < 0:
            return Fraction(0)
        if d == 0:
            return Fraction(1) if w <= 0 else Fraction(0)
        key = (w, d, h)
        v = memo.get(key)
        if v is None:
            v = max(Fraction(9, 4) * m(w - 1, d - 1, h),
                    2 * m(w - 2, d - 1, h - 1),
                    Fraction(7, 4) * m(w - 2, d - 1, h),
                    Fraction(3, 2) * m(w - 3, d - 1, h))
            memo[key] = v
        return v

    grid = {(w, d, h): m(w, d, h) for d in range(dmax + 1)
            for w in range(wmin, wmax + 1) for h in range(hmax + 1)}
    return BoundTable("small", grid, wmin, wmax, dmax, hmax)


# ----------------------------------------------------------------------
# claim verification


@dataclass
class ClaimCheck:
    name: str
    ok: bool
    points: int
    witness: tuple | None = None

    def as_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "points": self.points,
                "witness": list(self.witness) if self.witness else None}


@dataclass
class ClaimReport:
    checks: list[ClaimCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "checks": [c.as_dict() for c in self.checks]}


def _run_check(report: ClaimReport, name: str, points: Iterable, pred) -> None:
    count = 0
    witness = None
    for p in points:
        count += 1
        if witness is None and not pred(*p):
            witness = p
    report.checks.append(ClaimCheck(name, witness is None, count, witness))


def _multi_check(report: ClaimReport, points: Iterable, preds, names) -> None:
    """Evaluate a tuple of predicates per point in one grid pass."""
    count = 0
    witnesses: list[tuple | None] = [None] * len(names)
    for p in points:
        count += 1
        for i, ok in enumerate(preds(*p)):
            if witnesses[i] is None and not ok:
                witnesses[i] = p
    for name, w in zip(names, witnesses):
        report.checks.append(ClaimCheck(name, w is None, count, w))


def verify_appendix_claims(grid2_w: tuple[int, int] = (-3, 60),
                           grid2_d: int = 30,
                           grid3_w: tuple[int, int] = (-3, 40),
                           grid3_d: int = 20,
                           grid3_h: int = 20) -> ClaimReport:
    """Pointwise exact verification of the DP-vs-closed-form ceilings and the
    crossover order of the closed forms, with equality exactly on boundaries.

    The two-parameter min identity min(G1,G2) = F holds everywhere.  The
    three-parameter ladder identity min(G1..G4) = F needs the case boundaries
    ordered, i.e. h <= d; it is checked on that region, while the piecewise F
    itself is verified to dominate the DP everywhere on the grid.
    """
    rep = ClaimReport()
    t2 = dp_m_large(grid2_w[1], grid2_d, grid2_w[0])
    pts2 = [(w, d) for d in range(grid2_d + 1)
            for w in range(grid2_w[0], grid2_w[1] + 1)]

    def large_all(w, d):
        m, gg1, gg2, ff = t2.grid[w, d], g1_large(w, d), g2_large(w, d), f_large(w, d)
        return (m <= gg1, m <= gg2, m <= ff, min(gg1, gg2) == ff,
                ((gg1 <= gg2) == (w <= 2 * d)) and ((gg1 == gg2) == (w == 2 * d)))

    _multi_check(rep, pts2, large_all,
                 ["large: M(w,d) <= G1",
                  "large: M(w,d) <= G2",
                  "large: M(w,d) <= F",
                  "large: min(G1,G2) = F",
                  "large: G1 <= G2 iff w <= 2d, equality iff w = 2d"])

    t3 = dp_m_small(grid3_w[1], grid3_d, grid3_h, grid3_w[0])
    pts3 = [(w, d, h) for d in range(grid3_d + 1)
            for w in range(grid3_w[0], grid3_w[1] + 1)
            for h in range(grid3_h + 1)]

    def small_all(w, d, h):
        m = QSqrt6(t3.grid[w, d, h])
        gg = (g1_small(w, d, h), g2_small(w, d, h),
              g3_small(w, d, h), g4_small(w, d, h))
        ff = f_small(w, d, h)
        case3 = d + h <= w <= 3 * d - h
        return (all(m <= g for g in gg),
                m <= ff,
                ((gg[0] <= gg[1]) == (w <= d)) and ((gg[0] == gg[1]) == (w == d)),
                ((gg[1] <= gg[2]) == (w <= d + h)) and ((gg[1] == gg[2]) == (w == d + h)),
                ((gg[2] <= gg[3]) == (w <= 3 * d - h)) and ((gg[2] == gg[3]) == (w == 3 * d - h)),
                h > d or min(gg) == ff,
                any(ff == g for g in gg),
                not case3 or ff == f_small_alt_case3(w, d, h))

    _multi_check(rep, pts3, small_all,
                 ["small: M(w,d,h) <= G_i for i=1..4",
                  "small: M(w,d,h) <= F",
                  "small: G1 <= G2 iff w <= d, equality iff w = d",
                  "small: G2 <= G3 iff w <= d+h, equality iff w = d+h",
                  "small: G3 <= G4 iff w <= 3d-h, equality iff w = 3d-h",
                  "small: min(G1..G4) = F on the ordered region h <= d",
                  "small: F equals one of G1..G4 everywhere",
                  "small: third-case forms agree"])
    return rep


# ----------------------------------------------------------------------
# per-node certificates and global sweeps


@dataclass
class NodeCertificate:
    """Evaluation of the survival-value ceiling for one controlled-route
    profile (t0, t1, m'_R, m_B): the per-term (w, d, h) triples, the exact
    value N, the regime index I, and the regime classification."""

    n: int
    t0: int
    t1: int
    m_r_prime: int
    m_b: int
    terms: list[dict]
    value: QSqrt6
    i_value: int
    regime: str              # "inner" (I < n), "boundary" (I = n), "outer"

    def scaled(self) -> QSqrt6:
        return QSqrt6(Fraction(3) ** self.t0) * self.value

    def as_dict(self) -> dict:
        return {"n": self.n, "t0": self.t0, "t1": self.t1,
                "m_r_prime": self.m_r_prime, "m_b": self.m_b,
                "N": self.value.as_json(), "N_float": float(self.value),
                "I": self.i_value, "regime": self.regime,
                "terms": self.terms}


def n_of_u0(n: int, t0: int, t1: int, m_r_prime: int, m_b: int) -> NodeCertificate:
    """Exact survival ceiling N for a controlled-route profile, with the
    regime index I = 3*t0 + 2*t1 + m'_R + m_B.

    Feasibility: nonnegative parameters, m'_R <= t1, m_B + t1 <= t0,
    4*t0 <= n, and depth room t0 + t1 + m'_R <= n/2 (the controlled stage
    cannot outrun the tree depth).
    """
    if n % 2:
        raise ParameterError("n must be even")
    if min(t0, t1, m_r_prime, m_b) < 0:
        raise ParameterError("profile parameters must be nonnegative")
    if m_r_prime > t1 or m_b + t1 > t0 or 4 * t0 > n:
        raise ParameterError(
            f"infeasible profile (t0={t0}, t1={t1}, m'_R={m_r_prime}, m_B={m_b})")
    if t0 + t1 + m_r_prime > n // 2:
        raise ParameterError("profile deeper than the tree")
    half = n // 2
    i_value = 3 * t0 + 2 * t1 + m_r_prime + m_b
    regime = "boundary" if i_value == n else ("inner" if i_value < n else "outer")
    # every term satisfies d + h <= w, so only the last two cases of the
    # ceiling apply; which one is uniform over the terms and decided by the
    # regime index (both agree when I = n, where w = 3d - h exactly)
    case = g3_small if i_value <= n else g4_small
    total = QSqrt6(0)
    terms = []
    for i in range(m_r_prime + 1):
        w = half - 2 * i - t1
        d = half - t0 - t1 - i
        h = m_r_prime + m_b - i
        coef = (Fraction(math.comb(m_r_prime, i)) * Fraction(3, 8) ** i)
        fv = case(w, d, h)
        total = total + QSqrt6(coef) * fv
        terms.append({"i": i, "w": w, "d": d, "h": h,
                      "coef": str(coef), "F": fv.as_json()})
    scale = Fraction(5, 2) ** t1 * Fraction(4, 5) ** m_r_prime
    value = QSqrt6(scale) * total
    return NodeCertificate(n, t0, t1, m_r_prime, m_b, terms, value,
                           i_value, regime)


def feasible_profiles(n: int) -> Iterable[tuple[int, int, int, int]]:
    for t0 in range(0, n // 4 + 1):
        for t1 in range(0, t0 + 1):
            for m_b in range(0, t0 - t1 + 1):
                for m_r in range(0, min(t1, n // 2 - t0 - t1) + 1):
                    yield (t0, t1, m_r, m_b)


@dataclass
class BoundReport:
    checks: list[ClaimCheck] = field(default_factory=list)
    details: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "checks": [c.as_dict() for c in self.checks],
                "details": self.details}


def global_bound_check(ns_large: Sequence[int] = tuple(range(8, 65, 4)),
                       ns_controlled: Sequence[int] = (8, 12, 16, 20)) -> BoundReport:
    """Exact global sweeps of the survival ceiling against 6^(n/4).

    Large-prefix route: 3^(n/4+D) * F(n/2, n/4-D) equals 6^(n/4) * (27/32)^D
    and never exceeds 6^(n/4).  Controlled route: 3^t0 * N <= 6^(n/4) over the
    full feasible profile grid, together with d + h <= w at every term and the
    regime equivalence (w <= 3d-h iff I <= n).
    """
    rep = BoundReport()

    def large_ok(n: int, delta: int) -> bool:
        lhs = Fraction(3) ** (n // 4 + delta) * f_large(n // 2, n // 4 - delta)
        bound = Fraction(6) ** (n // 4)
        return lhs == bound * Fraction(27, 32) ** delta and lhs <= bound

    _run_check(rep, "large route: 3^(n/4+D) F(n/2, n/4-D) = 6^(n/4) (27/32)^D <= 6^(n/4)",
               [(n, delta) for n in ns_large for delta in range(n // 4 + 1)],
               large_ok)

    def controlled_ok(n: int, t0: int, t1: int, m_r: int, m_b: int) -> bool:
        cert = n_of_u0(n, t0, t1, m_r, m_b)
        bound = QSqrt6(Fraction(6) ** (n // 4))
        if not cert.scaled() <= bound:
            return False
        for term in cert.terms:
            w, d, h = term["w"], term["d"], term["h"]
            if d + h > w:
                return False
            if (w <= 3 * d - h) != (cert.i_value <= n):
                return False
        return True

    for n in ns_controlled:
        pts = [(n, *p) for p in feasible_profiles(n)]
        _run_check(rep, f"controlled route n={n}: 3^t0 N <= 6^(n/4), d+h <= w, regime iff",
                   pts, controlled_ok)
        best = max((n_of_u0(n, *p) for p in feasible_profiles(n)),
                   key=lambda c: c.scaled())
        rep.details.append({"n": n, "max_scaled_float": float(best.scaled()),
                            "bound": float(Fraction(6) ** (n // 4)),
                            "argmax": {"t0": best.t0, "t1": best.t1,
                                       "m_r_prime": best.m_r_prime,
                                       "m_b": best.m_b, "I": best.i_value}})
    return rep


# ----------------------------------------------------------------------
# survival-value estimation


@dataclass
class PsiEstimate:
    mean: float
    std_error: float
    samples: int
    method: str

    def as_dict(self) -> dict:
        return {"mean": self.mean, "std_error": self.std_error,
                "samples": self.samples, "method": self.method}


def estimate_psi(f: Formula, t: int, samples: int, seed: int,
                 method: str = "auto") -> PsiEstimate:
    """Monte Carlo estimate of the expected surviving-leaf count under
    uniformly random sibling orderings.

    ``tree`` samples orderings over the materialized tree (fast, small n);
    ``engine`` reruns the actual pruned search per seed.  Both count the
    depth-t non-falsified leaves whose path survives.
    """
    if method == "auto":
        method = "tree" if f.n <= 24 else "engine"
    if method == "engine":
        from .treesearch import OrderingSource, enumerate_solutions

        counts = np.empty(samples, dtype=np.int64)
        for k in range(samples):
            stats = enumerate_solutions(f, t, OrderingSource.random(seed + k),
                                        debug_assertions=False)
            counts[k] = stats.leaves_visited
    elif method == "tree":
        counts = _tree_survival_samples(f, t, samples, seed)
    else:
        raise ParameterError(f"unknown method {method!r}")
    mean = float(counts.mean())
    se = float(counts.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return PsiEstimate(mean, se, samples, method)


def _tree_survival_samples(f: Formula, t: int, samples: int, seed: int,
                           batch: int = 256) -> np.ndarray:
    """Vectorized sampling on the materialized tree: each edge draws an i.i.d.
    uniform priority; a sibling ordering reads priorities ascending, so a leaf
    survives iff every marker's same-label child edge draws a higher priority
    than the marker's path child edge."""
    from .treesearch import build_debug_tree

    tree = build_debug_tree(f, t)
    nodes = tree.nodes
    n_nodes = len(nodes)
    paths: list[list[int]] = [[] for _ in range(n_nodes)]
    for u in nodes:
        paths[u.id] = (paths[u.parent] + [u.id]) if u.parent is not None else [u.id]

    pairs_x: list[int] = []
    pairs_p: list[int] = []
    ptr: list[int] = []
    free_leaves = 0
    for leaf in nodes:
        if leaf.leaf_kind != "viable":
            continue
        cons: list[tuple[int, int]] = []
        for v_id in paths[leaf.id][1:]:
            v = nodes[v_id]
            for w_id in v.markers:
                w = nodes[w_id]
                x_child = next(c for c in w.children if nodes[c].label == v.label)
                cons.append((x_child, paths[v.id][w.depth + 1]))
        if not cons:
            free_leaves += 1
            continue
        ptr.append(len(pairs_x))
        for xc, pc in cons:
            pairs_x.append(xc)
            pairs_p.append(pc)

    rng = np.random.default_rng(seed)
    out = np.empty(samples, dtype=np.int64)
    ax = np.array(pairs_x, dtype=np.int64)
    ap = np.array(pairs_p, dtype=np.int64)
    aptr = np.array(ptr, dtype=np.int64)
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        prio = rng.random((n_nodes, b))
        if len(aptr):
            ok = prio[ax] > prio[ap]
            surv = np.logical_and.reduceat(ok, aptr, axis=0)
            counts = surv.sum(axis=0) + free_leaves
        else:
            counts = np.full(b, free_leaves, dtype=np.int64)
        out[done:done + b] = counts
        done += b
    return out
