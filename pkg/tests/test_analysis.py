from fractions import Fraction

import pytest

from naenum import (Formula, brute_force, enumerate_all_orderings, maj,
                    negation_closure, random_negation_closed)
from naenum.analysis import (QSqrt6, SQRT_27_8, dp_m_large, dp_m_small,
                             estimate_psi, f_large, f_small,
                             f_small_alt_case3, feasible_profiles,
                             g3_small, g4_small, global_bound_check, n_of_u0,
                             pow_half_27_8, verify_appendix_claims)
from naenum.errors import ParameterError


# ---------------------------------------------------------------- numbers

def test_qsqrt6_arithmetic():
    x = QSqrt6(1, 1)
    assert x * x == QSqrt6(7, 2)
    assert (x - x).sign() == 0
    assert QSqrt6(0, 1) * QSqrt6(0, 1) == QSqrt6(6)


def test_qsqrt6_ordering_near_sqrt6():
    root6 = QSqrt6(0, 1)
    assert QSqrt6(Fraction(49, 20)) > root6      # 2.45 > sqrt(6)
    assert QSqrt6(Fraction(22, 9)) < root6       # 2.444.. < sqrt(6)
    assert root6 > 0 and -root6 < 0


def test_sqrt_27_8_square():
    assert SQRT_27_8 * SQRT_27_8 == QSqrt6(Fraction(27, 8))


@pytest.mark.parametrize("e", range(-6, 7))
def test_pow_half_consistency(e):
    v = pow_half_27_8(e)
    assert v * v == QSqrt6(Fraction(27, 8) ** e)
    assert v > 0


# ---------------------------------------------------------------- closed forms

def test_f_large_examples():
    assert f_large(2, 1) == 2
    assert f_large(0, 1) == Fraction(25, 8)
    assert f_large(3, 1) == Fraction(3, 2)


def test_f_large_branches_agree_at_boundary():
    for d in range(0, 12):
        w = 2 * d
        assert (Fraction(5, 2) ** (2 * d - w) * Fraction(2) ** (w - d)
                == Fraction(2) ** (3 * d - w) * Fraction(3, 2) ** (w - 2 * d))


def test_f_small_examples():
    assert f_small(1, 1, 0) == QSqrt6(Fraction(9, 4))
    assert f_small(4, 2, 0) == QSqrt6(Fraction(27, 8))
    assert f_small(6, 2, 0) == QSqrt6(Fraction(9, 4))


def test_f_small_case3_forms_agree():
    for d in range(0, 8):
        for h in range(0, d + 1):
            for w in range(d + h, 3 * d - h + 1):
                assert f_small(w, d, h) == f_small_alt_case3(w, d, h)


def test_f_rejects_negative_depth():
    with pytest.raises(ParameterError):
        f_large(1, -1)
    with pytest.raises(ParameterError):
        f_small(1, -1, 0)
    with pytest.raises(ParameterError):
        f_small(1, 1, -1)


# ---------------------------------------------------------------- DP tables

def test_dp_large_base_and_one_step():
    t = dp_m_large(6, 2)
    assert t.grid[1, 1] == Fraction(5, 2)
    assert all(t.grid[w, 0] == 1 for w in range(-3, 1))
    assert all(t.grid[w, 0] == 0 for w in range(1, 7))
    assert t.grid[5, 1] == 0


def test_dp_small_base_and_one_step():
    t = dp_m_small(4, 1, 2)
    assert t.grid[1, 1, 0] == Fraction(9, 4)
    assert t.grid[2, 1, 1] == 2
    assert t.grid[2, 1, 0] == Fraction(7, 4)


def test_dp_small_negative_budget_is_zero():
    from naenum.analysis import dp_m_small
    t = dp_m_small(2, 2, 1)
    # reachable only through the budget-spending branch; exhausting it kills
    assert t.grid[2, 1, 0] == Fraction(7, 4)  # cannot take the 2-branch


def test_csv_lines():
    t = dp_m_large(1, 1)
    lines = t.csv_lines()
    assert lines[0] == "w,d,value"
    assert any(line.startswith("1,1,5/2") for line in lines)


# ---------------------------------------------------------------- claims

def test_claim_grids_small():
    rep = verify_appendix_claims(grid2_w=(-3, 16), grid2_d=8,
                                 grid3_w=(-3, 12), grid3_d=6, grid3_h=6)
    assert rep.ok, [c.name for c in rep.checks if not c.ok]
    assert len(rep.checks) == 13


# ---------------------------------------------------------------- certificates

def test_certificate_single_term():
    cert = n_of_u0(8, 2, 0, 0, 0)
    assert cert.value == QSqrt6(Fraction(27, 8))
    assert cert.i_value == 6 and cert.regime == "inner"


def test_certificate_i_value_example():
    assert n_of_u0(12, 2, 1, 1, 1).i_value == 10


def test_certificate_term_inequalities():
    for n in (8, 12):
        for prof in feasible_profiles(n):
            cert = n_of_u0(n, *prof)
            for term in cert.terms:
                assert term["d"] + term["h"] <= term["w"]


def test_certificate_boundary_regime_forms_agree():
    # at I = n the two candidate ceilings coincide (w = 3d - h exactly)
    found = 0
    for prof in feasible_profiles(12):
        cert = n_of_u0(12, *prof)
        if cert.regime == "boundary":
            for term in cert.terms:
                w, d, h = term["w"], term["d"], term["h"]
                assert g3_small(w, d, h) == g4_small(w, d, h)
            found += 1
    assert found


def test_certificate_refuses_inconsistency():
    with pytest.raises(ParameterError):
        n_of_u0(8, 2, 3, 0, 0)       # t1 > t0
    with pytest.raises(ParameterError):
        n_of_u0(8, 2, 1, 2, 0)       # m'_R > t1
    with pytest.raises(ParameterError):
        n_of_u0(9, 2, 0, 0, 0)       # odd n
    with pytest.raises(ParameterError):
        n_of_u0(8, 3, 0, 0, 0)       # 4 t0 > n


def test_global_bound_check_fast():
    rep = global_bound_check(ns_large=(8, 12), ns_controlled=(8, 12))
    assert rep.ok
    assert rep.details[0]["max_scaled_float"] <= rep.details[0]["bound"]


# ---------------------------------------------------------------- psi

def test_psi_deterministic_tree():
    f = negation_closure(Formula.of(3, [(1, 2, 3)]))
    est = estimate_psi(f, 1, samples=50, seed=0, method="tree")
    assert est.mean == 3.0 and est.std_error == 0.0


def test_psi_estimators_agree_with_exhaustive():
    f = random_negation_closed(6, 4, seed=2006)
    rep = brute_force(f)
    exact = float(enumerate_all_orderings(f, rep.tau).mean_surviving)
    tree = estimate_psi(f, rep.tau, samples=3000, seed=1, method="tree")
    engine = estimate_psi(f, rep.tau, samples=400, seed=2, method="engine")
    assert abs(tree.mean - exact) <= 4 * tree.std_error + 1e-9
    assert abs(engine.mean - exact) <= 4 * engine.std_error + 1e-9


def test_psi_maj_extremal_no_variance():
    f = negation_closure(maj(8, 3))
    est = estimate_psi(f, 4, samples=200, seed=0, method="tree")
    assert est.mean == 36.0 and est.std_error == 0.0


@pytest.mark.parametrize("n", [4, 8, 12])
def test_exact_psi_at_most_headline_budget(n):
    # expected surviving-leaf count of the extremal trees meets the budget
    # with equality
    from naenum import build_debug_tree, psi_exact

    f = negation_closure(maj(n, 3))
    tree = build_debug_tree(f, n // 2)
    assert psi_exact(tree) == Fraction(6) ** (n // 4)


def test_psi_meta_trial_within_three_se():
    # repeated independent estimates land within three standard errors of the
    # exhaustive value in (essentially) every trial
    f = random_negation_closed(6, 4, seed=2006)
    rep = brute_force(f)
    exact = float(enumerate_all_orderings(f, rep.tau).mean_surviving)
    trials, hits = 60, 0
    for k in range(trials):
        est = estimate_psi(f, rep.tau, samples=400, seed=10_000 + k,
                           method="tree")
        if abs(est.mean - exact) <= 3 * est.std_error:
            hits += 1
    assert hits >= int(0.95 * trials)
