"""``ctdwells`` command line: analyze, schedule, verify, sample, mcmc, ctd-demo.

Exit codes: 0 success, 1 acceptance criterion failed, 2 configuration error,
3 sampler regime violation, 4 schedule infeasible.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import acceptance
from .bond import ScheduleInfeasible, beta_schedule, bond_distribution, sample_bonds
from .config import COMMANDS, ConfigError, ExperimentConfig, apply, read_config_file, validate
from .io import render, write_output
from .lattice import (
    TWO_PI,
    RegimeViolation,
    check_regime,
    ctd_demo,
    init_lattice,
    run_chain,
    unresolved_mass,
)
from .logmath import wrap_angle
from .potential import InvalidParams

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_REGIME, EXIT_INFEASIBLE = 0, 1, 2, 3, 4


# ---------------------------------------------------------------------------
# commands; each returns (rows, extra json fields, exit code)


def cmd_analyze(cfg: ExperimentConfig):
    ledger = cfg.ledger()
    betas = list(cfg.beta)
    if cfg.schedule is not None:
        betas += [float(b) for b in beta_schedule(ledger, *cfg.schedule).betas]
    rows = []
    for beta in betas:
        d = bond_distribution(ledger, beta)
        am = d.argmax()
        m = d.order_parameter
        for i, r in enumerate(d.regions):
            rows.append(
                {
                    "beta": beta,
                    "region": r.label,
                    "log_weight": float(d.log_weights[i]),
                    "log_probability": float(d.log_probabilities[i]),
                    "probability": float(d.probabilities[i]),
                    "argmax": am.index,
                    "degenerate": am.degenerate,
                    "order_parameter": m,
                }
            )
    return rows, {}, EXIT_OK


def cmd_schedule(cfg: ExperimentConfig):
    ledger = cfg.ledger()
    sched = beta_schedule(ledger, *cfg.schedule)
    rows = []
    prev = None
    for e in sched:
        d = bond_distribution(ledger, e.beta)
        am = d.argmax()
        rows.append(
            {
                "n": e.n,
                "beta": e.beta,
                "character": e.character.value,
                "corrected": e.corrected,
                "argmax": am.index,
                "pins_n": am.index == e.n and not am.degenerate,
                "probability": d.probability(e.n),
                "log_one_minus_probability": d.log_complement(e.n),
                "order_parameter": d.order_parameter,
                "ratio_to_previous": e.beta / prev if prev else float("nan"),
            }
        )
        prev = e.beta
    return rows, {}, EXIT_OK


def cmd_verify(cfg: ExperimentConfig):
    suite = cfg.suite_config()
    acceptance.check_preconditions(suite)
    results = acceptance.run_suite(suite, echo=lambda s: print(s, file=sys.stderr))
    verdict = acceptance.verdict(results, suite)
    rows = [
        {
            "criterion": r.number,
            "name": r.name,
            "passed": r.passed,
            "gating": r.gating,
            "runtime_s": r.runtime_s,
            "expected": r.expected,
            "actual": r.actual,
        }
        for r in results
    ]
    if verdict["first_failure"] is not None:
        f = verdict["first_failure"]
        print(
            f"first failing criterion {f['criterion']} ({f['name']}): expected {f['expected']}; actual {f['actual']}",
            file=sys.stderr,
        )
    extra = {"verdict": verdict}
    return rows, extra, EXIT_OK if verdict["passed"] else EXIT_FAIL


def cmd_sample(cfg: ExperimentConfig):
    """One exact free-boundary chain: bonds are i.i.d. from the single-bond measure."""
    ledger = cfg.ledger()
    beta = cfg.beta[0]
    length = cfg.dims[0]
    rng = np.random.default_rng(cfg.seed)
    theta0 = TWO_PI * rng.random()
    bonds = sample_bonds(ledger, beta, rng, length - 1)
    theta = wrap_angle(theta0 + np.cumsum(bonds.numeric_angle))
    rows = [
        {
            "bond": i + 1,
            "region": int(bonds.region[i]),
            "side": int(bonds.side[i]),
            "fraction": float(bonds.fraction[i]),
            "log_offset": float(bonds.log_offset[i]),
            "bond_angle": float(bonds.numeric_angle[i]),
            "theta_next": float(theta[i]),
        }
        for i in range(length - 1)
    ]
    return rows, {"theta_1": theta0}, EXIT_OK


def cmd_mcmc(cfg: ExperimentConfig):
    ledger = cfg.ledger()
    beta = cfg.beta[0]
    state = init_lattice(cfg.dims, beta, cfg.seed, cfg.init)
    recs = run_chain(state, ledger, cfg.sweeps, cfg.thin, cfg.burn_in, cfg.w_uniform)
    rows = [r.to_row() for r in recs]
    extra = {
        "acceptance_rate": state.acceptance_rate,
        "final_energy": state.energy,
        "unresolved_mass": unresolved_mass(ledger, beta),
        "exact_probabilities": bond_distribution(ledger, beta).probabilities,
    }
    print(f"acceptance rate {state.acceptance_rate:.4f}", file=sys.stderr)
    return rows, extra, EXIT_OK


def cmd_ctd_demo(cfg: ExperimentConfig):
    ledger = cfg.ledger()
    sched = beta_schedule(ledger, *cfg.schedule)
    rep = ctd_demo(
        ledger, sched, cfg.dims, cfg.sweeps, seeds=cfg.seeds(), sampler=cfg.sampler,
        burn_in=cfg.burn_in, thin=cfg.thin, init=cfg.init, w_uniform=cfg.w_uniform,
    )
    rows = [dict(e.__dict__) for e in rep.entries]
    extra = {
        "sampler": rep.sampler,
        "alternation": rep.alternation,
        "consistent_sign_change": rep.consistent_sign_change,
    }
    print(
        f"alternation={rep.alternation} consistent_sign_change={rep.consistent_sign_change}",
        file=sys.stderr,
    )
    return rows, extra, EXIT_OK


HANDLERS = {
    "analyze": cmd_analyze,
    "schedule": cmd_schedule,
    "verify": cmd_verify,
    "sample": cmd_sample,
    "mcmc": cmd_mcmc,
    "ctd-demo": cmd_ctd_demo,
}


# ---------------------------------------------------------------------------
# argument handling

FLAG_FIELDS = (
    "epsilon", "truncation", "mode", "beta", "schedule", "dims", "sweeps", "burn_in", "thin",
    "seed", "replicas", "sampler", "init", "w_uniform", "out", "format", "criteria",
)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file, or an earlier output file to rerun")
    common.add_argument("--epsilon")
    common.add_argument("--truncation")
    common.add_argument("--mode", choices=["exact", "paper"])
    common.add_argument("--beta", help="comma-separated inverse temperatures")
    common.add_argument("--schedule", help="well range n_lo..n_hi")
    common.add_argument("--dims", help="lattice sides, e.g. 1000 or 32x32")
    common.add_argument("--sweeps")
    common.add_argument("--burn-in", dest="burn_in")
    common.add_argument("--thin")
    common.add_argument("--seed")
    common.add_argument("--replicas", help="ctd-demo: number of seeds, starting at --seed")
    common.add_argument("--sampler", choices=["auto", "exact", "mcmc"])
    common.add_argument("--init", choices=["random", "aligned", "neel"])
    common.add_argument("--w-uniform", dest="w_uniform")
    common.add_argument("--criteria", help="verify: comma-separated criterion numbers")
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="verify: override a tolerance")
    common.add_argument("--suite", action="append", default=[], metavar="NAME=VALUE", help="verify: override a run size")
    common.add_argument("--out", help="output path ('-' for stdout)")
    common.add_argument("--format", choices=["csv", "json"])
    p = argparse.ArgumentParser(prog="ctdwells", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for c in COMMANDS:
        sub.add_parser(c, parents=[common])
    return p


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        read_config_file(args.config, cfg)
    cfg.command = args.command
    for key in FLAG_FIELDS:
        v = getattr(args, key, None)
        if v is not None:
            apply(cfg, key, str(v), f"--{key.replace('_', '-')}")
    for kind in ("tol", "suite"):
        for item in getattr(args, kind):
            k, sep, v = item.partition("=")
            if not sep:
                raise ConfigError(f"--{kind}: expected NAME=VALUE, got {item!r}")
            apply(cfg, f"{kind}.{k}", v, f"--{kind}")
    return validate(cfg)


def preflight(cfg: ExperimentConfig) -> None:
    """Checks that need the ledger but no heavy computation."""
    if cfg.command == "mcmc" or (cfg.command == "ctd-demo" and (cfg.sampler == "mcmc" or len(cfg.dims) > 1)):
        check_regime(cfg.ledger())
    if cfg.command == "verify":
        acceptance.check_preconditions(cfg.suite_config())


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        preflight(cfg)
        rows, extra, code = HANDLERS[cfg.command](cfg)
    except RegimeViolation as exc:
        print(f"regime violation: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except ScheduleInfeasible as exc:
        print(f"schedule infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, InvalidParams, acceptance.PreconditionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    write_output(render(cfg, rows, extra), cfg.out)
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
