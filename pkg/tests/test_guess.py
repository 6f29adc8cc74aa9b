from fractions import Fraction

import pytest

from permstat.guess import (
    EVEN_EVEN,
    ODD_ODD,
    REFUTED,
    VALIDATED,
    SingularSystem,
    _select_unisolvent,
    alpha_spec,
    bareiss_solve,
    check_alpha_asymptotics,
    degree_bound,
    finale_ratios,
    guess_bivariate,
    guess_univariate,
    leading_check,
    leading_form,
    leading_form_all,
    monomials,
    newton_interpolate,
    spot_audit,
    triangular_points,
    validation_count,
)
from permstat.moments import MomentError, moment_table
from permstat.oracle import brute_moment


def test_bareiss_solve():
    A = [[2, 1, -1], [-3, -1, 2], [-2, 1, 2]]
    assert bareiss_solve(A, [8, -11, -3]) == [2, 3, -1]
    assert bareiss_solve([[Fraction(1, 2), 1], [1, 3]], [1, 1]) == [4, -1]
    with pytest.raises(SingularSystem):
        bareiss_solve([[1, 2], [2, 4]], [1, 2])


def test_newton_interpolate():
    xs = [1, 2, 3, 4]
    ys = [x**3 - 2 * x + Fraction(1, 3) for x in xs]
    assert newton_interpolate(xs, ys) == [Fraction(1, 3), -2, 0, 1]


def test_degree_bound_and_validation_count():
    assert [degree_bound(r, s) for r, s in [(0, 0), (1, 1), (2, 2), (3, 1), (8, 8)]] == [2, 5, 8, 8, 26]
    assert [validation_count(k) for k in (1, 5, 15, 16, 100)] == [3, 3, 3, 4, 20]


def test_covariance_from_five_points(sn_moments):
    g = guess_univariate(sn_moments.oracle("central_power", 1, 1), 4, 1)
    assert g.status == VALIDATED
    assert g.coefficients == {(2,): Fraction(1, 8), (1,): Fraction(-1, 8)}
    assert [p[0] for p in g.fit_points] == [1, 2, 3, 4, 5]
    assert [p[0] for p in g.validation_points] == [6, 7, 8]


def test_exponential_is_refuted():
    g = guess_univariate(lambda n: 2**n, 4, 1, degree_cap=8)
    assert g.status == REFUTED and g.mismatches
    assert g.degree_bound == 8


def test_escalation_finds_higher_degree():
    g = guess_univariate(lambda n: n**6, 2, 1, degree_cap=6)
    assert g.validated and g.degree_bound == 6


def test_greedy_points_are_row_major_prefix():
    for d in range(0, 9):
        monos = monomials(d, 2)
        chosen, seen = _select_unisolvent(monos, triangular_points(2))
        pts = triangular_points(2)
        assert chosen == [next(pts) for _ in range(len(monos))]
        assert seen == len(monos)


def test_bivariate_recovers_polynomial():
    g = guess_bivariate(lambda n, i: n * n * i - Fraction(3, 2) * i + 7, 3)
    assert g.validated
    assert g.coefficients == {(2, 1): 1, (0, 1): Fraction(-3, 2), (0, 0): 7}


def test_end_in_mean_is_bivariate_polynomial(last_moments):
    g = guess_bivariate(last_moments.oracle("raw_power", 1, 0), 2)
    assert g.validated
    assert g(9, 4) == 9 - 4 + Fraction(8 * 7, 4)


def test_spot_audit_fm11(last_moments):
    oracle = last_moments.oracle("central_factorial", 1, 1)
    g = guess_bivariate(oracle, degree_bound(1, 1))
    assert g.validated
    cands = [(n, i) for n in range(2, 26) for i in range(1, n + 1)]
    assert spot_audit(g, oracle, cands, 100, seed=1) == []


def test_guessed_fm_matches_enumeration(last_moments):
    g = guess_bivariate(last_moments.oracle("central_factorial", 2, 1), degree_bound(2, 1), 2, degree_bound(2, 1) + 4)
    assert g.validated
    for n, i in [(6, 1), (7, 4), (8, 8)]:
        assert g(n, i) == brute_moment(n, 2, 1, last=i, central=True, falling=True)


def test_leading_form_families():
    assert leading_form(2, 2).form == (((6, 0), Fraction(1, 36**2)),)
    assert leading_form(1, 1).parity == "odd-odd" and leading_form(1, 1).degree == 2
    # (1/36) (9/2) (n - 2i)^2
    assert dict(leading_form(1, 1).form) == {(2, 0): Fraction(1, 8), (1, 1): Fraction(-1, 2), (0, 2): Fraction(1, 2)}
    assert leading_form(3, 2).parity == "odd-even"
    assert leading_form(2, 1).degree == 3
    assert dict(leading_form(2, 1).form)[(0, 3)] == Fraction(-12, 36)
    assert leading_form_all(1, 1).form == (((2,), Fraction(1, 8)),)


@pytest.mark.parametrize("a,b", [(a, b) for a in range(3) for b in range(3)])
def test_leading_terms_last_scope(last_moments, a, b):
    rep = leading_check(last_moments, a, b)
    assert rep.guess.validated
    assert rep.passed, rep.to_json()


@pytest.mark.parametrize("a,b", [(a, b) for a in range(4) for b in range(4)])
def test_leading_terms_sn_scope(sn_moments, a, b):
    rep = leading_check(sn_moments, a, b)
    assert rep.passed, rep.to_json()


def test_alpha_spec_values():
    assert alpha_spec(EVEN_EVEN, 1, 1).coefficients == (1, 0)
    assert alpha_spec(EVEN_EVEN, 2, 1).coefficients == (3, Fraction(-54, 25))
    assert alpha_spec(EVEN_EVEN, 2, 2).coefficients == (9, Fraction(-324, 25))
    assert alpha_spec(ODD_ODD, 1, 1).coefficients == (0, Fraction(9, 2), Fraction(-45, 4))
    with pytest.raises(ValueError):
        alpha_spec("even-odd", 1, 1)


def test_alpha_exact_expansions(sn_moments):
    rows = check_alpha_asymptotics(EVEN_EVEN, [(1, 1), (2, 1), (1, 2), (2, 2)], source=sn_moments)
    rows += check_alpha_asymptotics(ODD_ODD, [(1, 1)], c2_tolerance=0.05, source=sn_moments)
    for row in rows:
        assert row.exact_passed, row.to_json()
    assert rows[0].exact[:3] == [1, 0, Fraction(81, 2)]
    assert rows[1].exact[:3] == [3, Fraction(-54, 25), Fraction(6102, 25)]
    assert rows[-1].exact[:3] == [0, Fraction(9, 2), Fraction(-45, 4)]


def test_finale_ratios_against_enumeration():
    f = finale_ratios(1, 1, 5, 3)
    v = brute_moment(5, 2, 0, last=3, central=True, falling=True)
    fm22 = brute_moment(5, 2, 2, last=3, central=True, falling=True)
    fm11 = brute_moment(5, 1, 1, last=3, central=True, falling=True)
    assert f.even_even == fm22 / v**2
    assert f.odd_odd == fm11 / v


def test_finale_ratios_undefined_at_n2():
    with pytest.raises(MomentError):
        finale_ratios(1, 1, 2, 1, moment_table(2, 2, last=1))
