import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctdwells.asymptotics import (
    A,
    OutOfRange,
    SeparatedWellsModel,
    beta_for_n_max,
    convexity_check,
    f_paper,
    f_tilde,
    n_max_closed,
    offset_free_energy,
    offset_table,
    ratio_exponent,
    rows_to_csv,
)
from ctdwells.bond import argmax_well, beta_schedule, bond_distribution
from ctdwells.oracles import golden_section_argmin, separated_free_energy_mp
from ctdwells.potential import Mode, ModelParams, build_ledger

LN10 = math.log(10)
MODEL = SeparatedWellsModel.from_epsilon(0.1)


@pytest.fixture
def paper():
    return build_ledger(ModelParams(0.1, 42, Mode.PAPER))


def test_f_paper_value(paper):
    with mpmath.workdps(40):
        expect = -mpmath.log(mpmath.mpf("1e-3") - mpmath.mpf("1e-27"))
    assert f_paper(1, 0.0, paper) == pytest.approx(float(expect), rel=1e-15)
    assert f_paper(1, 0.0, paper) == pytest.approx(6.90776, abs=5e-6)


@pytest.mark.parametrize("n", [1, 3, 10])
def test_f_paper_is_minus_log_probability_up_to_ln2(paper, n):
    # region measure counts both sides of the centre, so the identity carries ln 2
    beta = 37.0
    d = bond_distribution(paper, beta)
    lhs = f_paper(n, beta, paper)
    rhs = -d.log_probability(n) - d.log_partition + math.log(2)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_f_paper_beta_shift(paper):
    n, dbeta = 4, 2.5
    diff = f_paper(n, 10.0 + dbeta, paper) - f_paper(n, 10.0, paper)
    assert diff == pytest.approx(3 * dbeta / 2 ** (n + 1), rel=1e-12)


def test_f_paper_range(paper):
    with pytest.raises(ValueError):
        f_paper(41, 0.0, paper)


def test_f_tilde_value():
    assert f_tilde(1, 0.0, MODEL) == pytest.approx(3 * LN10, rel=1e-15)


def test_f_tilde_minus_f_paper_vanishes(paper):
    for n in range(1, 10):
        ft = f_tilde(n, 5.0, MODEL)
        diff = ft - f_paper(n, 5.0, paper)
        # exact difference is ln(1 - eps**(8 * 3**n)), far below rounding of ft
        assert diff == pytest.approx(math.log1p(-(0.1 ** (8 * 3**n))), abs=1e-14 * ft)


@pytest.mark.parametrize("n", range(1, 30))
def test_f_tilde_zero_beta_scaling(n):
    assert f_tilde(n, 0.0, MODEL) / 3**n == pytest.approx(MODEL.c_eps, rel=1e-14)


@pytest.mark.parametrize("m", range(1, 25))
def test_n_max_round_trip(m):
    assert n_max_closed(beta_for_n_max(m, MODEL), MODEL).continuous == pytest.approx(m, abs=1e-12)


def test_n_max_example():
    r = n_max_closed(87.58, MODEL)
    assert r.continuous == pytest.approx(2.0, abs=1e-3)
    assert r.best == 2


def test_n_max_matches_golden_section():
    for beta in (87.58, 1e4, 1e12):
        x = golden_section_argmin(separated_free_energy_mp(MODEL.c_eps, beta), -5, 60)
        assert n_max_closed(beta, MODEL).continuous == pytest.approx(float(x), rel=1e-12)


def test_n_max_out_of_range():
    with pytest.raises(OutOfRange):
        n_max_closed(1.0, MODEL)
    with pytest.raises(OutOfRange):
        n_max_closed(0.0, MODEL)


def test_integer_selection_agrees_with_paper_argmax(paper):
    for e in beta_schedule(paper, 1, 40):
        assert n_max_closed(e.beta, MODEL).best == argmax_well(paper, e.beta).index == e.n


def test_offset_zero_both_sides():
    for n in (1, 5, 20):
        v = 3.0**n * MODEL.c_eps * (A + 1)
        assert offset_free_energy(n, 0, MODEL, +1) == pytest.approx(v, rel=1e-15)
        assert offset_free_energy(n, 0, MODEL, -1) == pytest.approx(v, rel=1e-15)


def test_offset_example():
    v = offset_free_energy(3, 2, MODEL, +1)
    assert v == pytest.approx(27 * LN10 * (A / 4 + 9), rel=1e-15)
    assert v == pytest.approx(584.1, abs=0.1)
    assert v == pytest.approx(f_tilde(5, beta_for_n_max(3, MODEL), MODEL), rel=1e-13)


def test_offset_table_equality():
    rows = offset_table(MODEL, range(1, 31), range(0, 7))
    for r in rows:
        assert r["closed_form"] == pytest.approx(r["direct"], rel=1e-12)
    csv_text = rows_to_csv(rows)
    assert csv_text.splitlines()[0] == "n_max,k,side,closed_form,direct,abs_diff"


def test_ratio_exponent_grows_by_three():
    for n in range(1, 30):
        assert ratio_exponent(n + 1, MODEL) / ratio_exponent(n, MODEL) == pytest.approx(3.0, rel=1e-13)
        assert ratio_exponent(n, MODEL) > 0


def test_ratio_exponent_is_binding_gap():
    for n in range(1, 20):
        beta = beta_for_n_max(n, MODEL)
        f0 = f_tilde(n, beta, MODEL)
        gaps = [(f_tilde(n + s * k, beta, MODEL) - f0) / k for k in range(1, 7) for s in (1, -1) if n + s * k >= 1]
        assert min(gaps) >= ratio_exponent(n, MODEL) * (1 - 1e-12)


def test_paper_probabilities_obey_ratio_bound(paper):
    for e in beta_schedule(paper, 2, 30):
        lp = bond_distribution(paper, e.beta).log_probabilities
        c = ratio_exponent(e.n, MODEL)
        for k in range(1, 7):
            for m in (e.n - k, e.n + k):
                if 1 <= m <= 42:
                    assert lp[m] - lp[e.n] <= -c * k * (1 - 1e-9)


def test_convexity_at_zero_beta():
    rep = convexity_check(MODEL, 0.0, range(1, 61))
    expect = (4.0 / 3.0) * MODEL.c_eps * 3.0 ** rep.n.astype(float)
    assert np.allclose(rep.second_differences, expect, rtol=1e-12)


def test_convexity_beta_term_alone():
    n = np.arange(2, 30)
    f = lambda m: 3 * 50.0 * 2.0 ** -(m + 1.0)
    d2 = f(n + 1) - 2 * f(n) + f(n - 1)
    assert np.allclose(d2, 3 * 50.0 * 2.0 ** -(n + 2.0), rtol=1e-12)
    assert np.all(d2 > 0)


@settings(max_examples=100, deadline=None)
@given(beta=st.floats(0.0, 1e40), n=st.integers(2, 60), eps=st.floats(1e-6, 0.9))
def test_convexity_random(beta, n, eps):
    model = SeparatedWellsModel.from_epsilon(eps)
    rep = convexity_check(model, beta, [n - 1, n, n + 1])
    assert rep.all_positive


@settings(max_examples=100, deadline=None)
@given(m=st.floats(1.0, 40.0), eps=st.floats(1e-8, 0.9))
def test_closed_form_is_stationary(m, eps):
    model = SeparatedWellsModel.from_epsilon(eps)
    beta = beta_for_n_max(m, model)
    h = 1e-4
    left, mid, right = (f_tilde(x, beta, model) for x in (m - h, m, m + h))
    assert mid <= left and mid <= right
