import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctdwells.oracles import coefficient_potential
from ctdwells.potential import (
    Character,
    InvalidParams,
    Mode,
    ModelParams,
    build_ledger,
    deepest_containing_well,
    evaluate_potential,
    well_depth_fraction,
)


@pytest.fixture
def ledger():
    return build_ledger(ModelParams(0.1, 6))


def test_well_one_is_antiferro_quarter(ledger):
    w = ledger[1]
    assert w.character is Character.ANTIFERRO
    assert w.center == math.pi
    assert w.depth == 0.25


def test_well_two_is_ferro_three_eighths(ledger):
    w = ledger[2]
    assert w.character is Character.FERRO
    assert w.center == 0.0
    assert w.depth == 0.375


def test_well_five_depth(ledger):
    assert ledger[5].depth == 31 / 64
    assert well_depth_fraction(5) == Fraction(31, 64)


def test_depths_match_coefficient_partial_sums(ledger):
    # oracle: sum the series coefficients of every well that contains the centre
    for w in ledger:
        direct = coefficient_potential(0.1, w.index, w.center)
        assert w.depth == direct


def test_log_widths_stay_finite_far_below_underflow():
    led = build_ledger(ModelParams(0.1, 42))
    lw = led[42].log_half_width
    assert math.isfinite(lw)
    assert lw == pytest.approx(3**42 * math.log(0.1), rel=1e-15)
    assert led[42].half_width() == 0.0


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.1, 0.95])
def test_invalid_epsilon(eps):
    with pytest.raises(InvalidParams):
        ModelParams(eps, 4)


def test_invalid_truncation():
    with pytest.raises(InvalidParams):
        ModelParams(0.1, 1)


def test_potential_point_values(ledger):
    assert evaluate_potential(ledger, math.pi / 2) == 0.0
    assert evaluate_potential(ledger, math.pi) == 31 / 64
    assert evaluate_potential(ledger, 0.0) == 63 / 128


@pytest.mark.parametrize("N", [4, 5, 6, 7])
def test_centre_zero_is_in_deepest_even_well(N):
    led = build_ledger(ModelParams(0.1, N))
    assert deepest_containing_well(led, 0.0) == (N if N % 2 == 0 else N - 1)


def test_inside_well_one_outside_well_three():
    led = build_ledger(ModelParams(0.25, 4))
    x = math.pi - 0.25**3 * 0.99
    assert deepest_containing_well(led, x) == 1


def test_outside_every_well(ledger):
    assert deepest_containing_well(ledger, math.pi / 2) is None


def test_ledger_serialises_exact_depths(ledger):
    d = ledger.to_dict()
    assert d["wells"][4]["depth"] in ("31/64", "0.484375")
    assert "\"epsilon\"" in ledger.to_json()


def test_paper_mode_copy():
    led = build_ledger(ModelParams(0.1, 6)).with_mode(Mode.PAPER)
    assert led.mode is Mode.PAPER


@settings(max_examples=200, deadline=None)
@given(
    eps=st.floats(0.1, 0.6),
    N=st.integers(2, 6),
    x=st.floats(-10.0, 10.0, allow_nan=False),
)
def test_potential_matches_coefficient_series(eps, N, x):
    led = build_ledger(ModelParams(eps, N))
    assert evaluate_potential(led, x) == pytest.approx(coefficient_potential(eps, N, x), abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(x=st.floats(0.0, 2 * math.pi, allow_nan=False))
def test_potential_is_even_and_periodic(x):
    led = build_ledger(ModelParams(0.3, 4))
    u = evaluate_potential(led, x)
    assert evaluate_potential(led, -x) == u
    # shifting by 2 pi rounds x; only compare where that rounding cannot cross a well edge
    edges = np.array([w.half_width() for w in led])
    gaps = np.abs(np.concatenate([np.abs(x) - edges, np.abs(x - math.pi) - edges, np.abs(x - 2 * math.pi) - edges]))
    if gaps.min() > 1e-12:
        assert evaluate_potential(led, x + 2 * math.pi) == u


def test_vectorised_matches_scalar(ledger):
    xs = np.linspace(-4, 4, 101)
    vec = evaluate_potential(ledger, xs)
    assert np.array_equal(vec, [evaluate_potential(ledger, float(x)) for x in xs])
