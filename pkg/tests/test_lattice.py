import math

import numpy as np
import pytest
from scipy import stats

from ctdwells.bond import TemperatureSchedule, beta_schedule, bond_distribution, order_parameter
from ctdwells.lattice import (
    InvalidDims,
    RegimeViolation,
    aggregate_histogram,
    ctd_demo,
    init_lattice,
    metropolis_sweep,
    observe,
    recompute_energy,
    run_chain,
    sample_chain_batch,
    sample_chain_exact,
    simulated_wells,
    topology,
    total_variation,
    unresolved_mass,
)
from ctdwells.oracles import quadrature_region_probabilities
from ctdwells.potential import Mode, ModelParams, build_ledger


@pytest.fixture
def ledger():
    return build_ledger(ModelParams(0.25, 4))


# -- geometry and initial states ---------------------------------------------


def test_free_chain_has_length_minus_one_bonds():
    assert topology((10,)).bonds.shape == (9, 2)


def test_torus_has_two_bonds_per_site():
    t = topology((4, 6))
    assert t.bonds.shape == (48, 2)
    assert np.all(t.deg == 4)


@pytest.mark.parametrize("dims", [(1,), (2, 2, 2), (3, 1)])
def test_bad_dims(dims):
    with pytest.raises(InvalidDims):
        topology(dims)


def test_aligned_init(ledger):
    st = init_lattice((8, 8), 1.0, 0, "aligned")
    assert np.all(st.angles == 0)
    assert observe(st, ledger).nn_bond_order == 1.0


def test_neel_init(ledger):
    st = init_lattice((8, 8), 1.0, 0, "neel")
    a = st.angles
    assert set(np.unique(a)) == {0.0, math.pi}
    assert np.all(a[::2, ::2] == 0) and np.all(a[1::2, ::2] == math.pi)
    assert observe(st, ledger).nn_bond_order == pytest.approx(-1.0, abs=1e-15)


def test_random_init_depends_on_seed():
    assert not np.array_equal(init_lattice((50,), 1.0, 1).angles, init_lattice((50,), 1.0, 2).angles)


def test_seed_required():
    with pytest.raises(ValueError):
        init_lattice((10,), 1.0, None)


# -- regime ------------------------------------------------------------------


def test_regime_rejects_small_epsilon():
    led = build_ledger(ModelParams(0.1, 4))
    with pytest.raises(RegimeViolation, match="half-width"):
        simulated_wells(led)


def test_regime_rejects_deep_truncation():
    led = build_ledger(ModelParams(0.25, 8))
    with pytest.raises(RegimeViolation, match="well 8"):
        simulated_wells(led)


def test_unresolved_wells_carry_negligible_mass(ledger):
    sim = simulated_wells(ledger)
    assert sim.resolved == 2
    assert unresolved_mass(ledger, 20.0) < 1e-12


# -- Metropolis --------------------------------------------------------------


def test_uniform_proposal_always_accepted_at_zero_beta(ledger):
    st = init_lattice((200,), 0.0, 4)
    metropolis_sweep(st, ledger, w_uniform=1.0, n_sweeps=100)
    assert st.acceptance_rate == 1.0


def test_zero_beta_rate_with_default_mixture(ledger):
    # the well jumps are proposed far more often than their arc length, so the
    # Hastings correction rejects many of them; record the rate
    st = init_lattice((200,), 0.0, 4)
    metropolis_sweep(st, ledger, n_sweeps=100)
    print(f"beta=0 acceptance rate with w_uniform=0.2: {st.acceptance_rate:.4f}")
    assert 0.2 < st.acceptance_rate < 1.0


def test_zero_beta_mcmc_is_uniform(ledger):
    st = init_lattice((2,), 0.0, 12)
    recs = run_chain(st, ledger, 40_000, thin=4, burn_in=100)
    h = aggregate_histogram(recs)
    assert total_variation(h, bond_distribution(ledger, 0.0).probabilities) < 0.01


def test_two_site_detailed_balance(ledger):
    beta = 20.0
    st = init_lattice((2,), beta, 2024)
    recs = run_chain(st, ledger, 1_000_000, thin=10, burn_in=1000)
    h = aggregate_histogram(recs)
    exact = quadrature_region_probabilities(0.25, 4, beta)
    tv = total_variation(h, exact)
    print(f"two-site TV = {tv:.5f}")
    assert tv <= 0.02


def test_energy_bookkeeping(ledger):
    st = init_lattice((16, 16), 60.0, 7)
    for _ in range(5):
        metropolis_sweep(st, ledger, n_sweeps=20)
        assert st.energy == recompute_energy(st, ledger)


def test_run_chain_record_count(ledger):
    st = init_lattice((20,), 5.0, 1)
    recs = run_chain(st, ledger, 37, thin=1, burn_in=0)
    assert len(recs) == 37
    assert [r.sweep for r in recs] == list(range(1, 38))


def test_run_chain_replay(ledger):
    def go():
        st = init_lattice((12, 12), 30.0, 99)
        recs = run_chain(st, ledger, 300, thin=7, burn_in=50)
        return st, recs

    (s1, r1), (s2, r2) = go(), go()
    assert np.array_equal(s1.angles, s2.angles)
    assert [x.to_row() for x in r1] == [x.to_row() for x in r2]


def test_run_chain_rejects_bad_burn_in(ledger):
    with pytest.raises(ValueError):
        run_chain(init_lattice((10,), 1.0, 1), ledger, 10, burn_in=10)


def test_d1_histogram_converges(ledger):
    beta = 20.0
    st = init_lattice((500,), beta, 3)
    recs = run_chain(st, ledger, 6000, thin=20, burn_in=1000)
    tv = total_variation(aggregate_histogram(recs), bond_distribution(ledger, beta).probabilities)
    assert tv < 0.02


def test_paper_mode_simulates_triple_beta(ledger):
    paper = ledger.with_mode(Mode.PAPER)
    a = init_lattice((30,), 4.0, 5)
    b = init_lattice((30,), 12.0, 5)
    metropolis_sweep(a, paper, n_sweeps=50)
    metropolis_sweep(b, ledger, n_sweeps=50)
    assert np.array_equal(a.angles, b.angles)


# -- exact d = 1 sampling ----------------------------------------------------


def test_exact_chain_histogram(ledger):
    beta = 20.0
    n = 1_000_000
    _, regs = sample_chain_batch(1000, n // 1000 + 1, ledger, beta, np.random.default_rng(21))
    counts = np.bincount(regs.ravel(), minlength=5)
    p = bond_distribution(ledger, beta).probabilities
    sd = np.sqrt(n * p * (1 - p))
    assert np.all(np.abs(counts - n * p) <= 4 * sd + 1e-9)


def test_exact_chain_correlations_factorise(ledger):
    beta = 20.0
    angles, _ = sample_chain_batch(40_000, 6, ledger, beta, np.random.default_rng(31))
    m = order_parameter(ledger, beta)
    for r in range(1, 6):
        c = np.cos(angles[:, 0] - angles[:, r])
        se = c.std(ddof=1) / math.sqrt(len(c))
        assert abs(c.mean() - m**r) <= 3 * se


def test_exact_chain_zero_beta_uniform_bonds(ledger):
    st = sample_chain_exact(20_001, ledger, 0.0, np.random.default_rng(2))
    d = np.mod(np.diff(st.angles), 2 * math.pi)
    assert stats.kstest(d / (2 * math.pi), "uniform").pvalue > 0.01
    assert len(st.bond_regions) == 20_000


# -- demonstration -----------------------------------------------------------


def test_d1_demo_flips_ferro_to_antiferro(ledger):
    sched = beta_schedule(ledger, 2, 3)
    rep = ctd_demo(ledger, sched, (200,), 200, seeds=(1, 2))
    assert rep.sampler == "exact"
    for s in rep.seeds():
        es = rep.by_seed(s)
        assert [e.dominant_character for e in es] == ["ferromagnetic", "antiferromagnetic"]
    assert rep.alternation and rep.consistent_sign_change


def test_single_entry_schedule_flags_no_alternation(ledger):
    sched = beta_schedule(ledger, 2, 3)
    one = TemperatureSchedule(sched.entries[:1], sched.epsilon, sched.mode)
    rep = ctd_demo(ledger, one, (50,), 50, seeds=(0,))
    assert not rep.alternation


def test_mcmc_demo_refuses_unresolved_well(ledger):
    with pytest.raises(RegimeViolation, match="well 3"):
        ctd_demo(ledger, beta_schedule(ledger, 2, 3), (8, 8), 10, seeds=(0,))


def test_d2_demo_small(ledger):
    rep = ctd_demo(ledger, beta_schedule(ledger, 1, 2), (16, 16), 1500, seeds=(1, 2))
    for s in rep.seeds():
        lo, hi = rep.by_seed(s)
        assert lo.nn_bond_order < 0 < hi.nn_bond_order
