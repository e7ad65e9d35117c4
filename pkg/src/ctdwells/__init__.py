"""Nested wells-in-wells circle potential and its low-temperature Gibbs measures."""
from .asymptotics import (
    SeparatedWellsModel,
    convexity_check,
    f_paper,
    f_tilde,
    n_max_closed,
    offset_free_energy,
    ratio_exponent,
)
from .bond import (
    BondDistribution,
    ScheduleInfeasible,
    TemperatureSchedule,
    argmax_well,
    beta_schedule,
    bond_distribution,
    order_parameter,
    regions,
    sample_bond,
    sample_bonds,
    transition_beta,
)
from .lattice import (
    RegimeViolation,
    ctd_demo,
    init_lattice,
    metropolis_sweep,
    run_chain,
    sample_chain_exact,
)
from .potential import (
    Character,
    InvalidParams,
    Mode,
    ModelParams,
    WellLedger,
    build_ledger,
    deepest_containing_well,
    evaluate_potential,
)

__version__ = "0.1.0"
