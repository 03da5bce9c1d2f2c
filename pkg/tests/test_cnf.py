import pytest
from hypothesis import given, settings, strategies as st

from naenum import (DimacsError, Formula, TautologyError, canonical_clause,
                    is_falsified, is_negation_closed, live_clauses, nae_check,
                    negation_closure, parse_dimacs, satisfies, simplify)


# ---------------------------------------------------------------- strategies

@st.composite
def formulas(draw, max_n=9, max_m=8, max_width=3):
    n = draw(st.integers(3, max_n))
    m = draw(st.integers(0, max_m))
    clauses = []
    for _ in range(m):
        width = draw(st.integers(1, max_width))
        vs = draw(st.permutations(range(1, n + 1)))[:width]
        signs = draw(st.lists(st.booleans(), min_size=width, max_size=width))
        clauses.append(tuple(v if s else -v for v, s in zip(vs, signs)))
    return Formula.of(n, clauses)


# ---------------------------------------------------------------- parsing

def test_parse_basic():
    f = parse_dimacs("p cnf 3 1\n1 2 3 0")
    assert f == Formula.of(3, [(1, 2, 3)])


def test_parse_negative_literal():
    f = parse_dimacs("p cnf 2 1\n1 -2 0")
    assert f == Formula.of(2, [(1, -2)])


def test_parse_out_of_range():
    with pytest.raises(DimacsError) as ei:
        parse_dimacs("p cnf 2 1\n3 0")
    assert ei.value.line == 2


def test_parse_comments_and_multiline_clauses():
    f = parse_dimacs("c hello\np cnf 4 2\n1 2\n3 0\nc mid\n-4 1 0\n")
    assert f == Formula.of(4, [(1, 2, 3), (1, -4)])


def test_parse_unterminated_clause():
    with pytest.raises(DimacsError, match="unterminated"):
        parse_dimacs("p cnf 3 1\n1 2 3")


def test_parse_malformed_header():
    with pytest.raises(DimacsError, match="header"):
        parse_dimacs("p dnf 3 1\n1 0")
    with pytest.raises(DimacsError, match="header"):
        parse_dimacs("1 2 0")


def test_parse_tautology_rejected():
    with pytest.raises(DimacsError):
        parse_dimacs("p cnf 3 1\n1 -1 2 0")


def test_parse_wide_clause_accepted():
    f = parse_dimacs("p cnf 5 1\n1 2 3 4 0")
    assert f.max_width == 4


def test_canonical_clause_dedupes_and_sorts():
    assert canonical_clause([3, 1, 3]) == (1, 3)
    with pytest.raises(TautologyError):
        canonical_clause([1, -1])


def test_dimacs_roundtrip():
    f = Formula.of(5, [(1, -3), (2, 4, 5), (-1, -2, -4)])
    assert parse_dimacs(f.to_dimacs()) == f


# ---------------------------------------------------------------- closure

def test_closure_examples():
    f = Formula.of(3, [(1, 2, 3)])
    assert negation_closure(f) == Formula.of(3, [(1, 2, 3), (-1, -2, -3)])
    g = Formula.of(2, [(1, -2)])
    assert negation_closure(g) == Formula.of(2, [(1, -2), (-1, 2)])


@given(formulas())
@settings(max_examples=60, deadline=None)
def test_closure_idempotent(f):
    once = negation_closure(f)
    assert negation_closure(once) == once
    assert is_negation_closed(once)


@given(formulas(max_n=7, max_m=5))
@settings(max_examples=40, deadline=None)
def test_nae_equals_closure_sat(f):
    closed = negation_closure(f)
    for mask in range(1 << f.n):
        ones = {v for v in range(1, f.n + 1) if mask >> (v - 1) & 1}
        assert nae_check(f, ones) == satisfies(closed, ones)


# ---------------------------------------------------------------- simplify

def test_simplify_examples():
    f = Formula.of(3, [(1, 2, 3)])
    assert simplify(f, {1}).clauses == ()
    g = Formula.of(2, [(-1, 2)])
    assert simplify(g, {1}).clauses == ((2,),)
    h = Formula.of(1, [(-1,)])
    assert is_falsified(simplify(h, {1}))


def test_simplify_keeps_universe():
    f = Formula.of(5, [(1, 2, 3)])
    assert simplify(f, {1}).n == 5


@given(formulas(), st.data())
@settings(max_examples=60, deadline=None)
def test_simplify_composes(f, data):
    all_vars = list(range(1, f.n + 1))
    a = set(data.draw(st.lists(st.sampled_from(all_vars), unique=True)))
    rest = [v for v in all_vars if v not in a]
    b = set(data.draw(st.lists(st.sampled_from(rest), unique=True))) if rest else set()
    assert simplify(simplify(f, a), b) == simplify(f, a | b)


# ---------------------------------------------------------------- liveness

def test_is_falsified_examples():
    assert not is_falsified(Formula.of(3, []))
    assert is_falsified(Formula(3, ((),)))
    assert not is_falsified(Formula.of(3, [(1,)]))


def test_live_clauses_examples():
    f = Formula.of(3, [(1, 2, 3)])
    assert live_clauses(f, {1}) == ()
    g = Formula.of(3, [(-1, 2, 3)])
    assert live_clauses(g, {1}) == ((-1, 2, 3),)
    assert live_clauses(g, set()) == g.clauses


@given(formulas(), st.data())
@settings(max_examples=40, deadline=None)
def test_live_clauses_never_positive_on_q(f, data):
    q = set(data.draw(st.lists(st.sampled_from(range(1, f.n + 1)), unique=True)))
    for c in live_clauses(f, q):
        assert not any(l > 0 and l in q for l in c)


# ---------------------------------------------------------------- NAE check

def test_nae_check_examples():
    f = Formula.of(3, [(1, 2, 3)])
    assert nae_check(f, {1})
    assert not nae_check(f, {1, 2, 3})
    assert nae_check(Formula.of(3, []), {2})
