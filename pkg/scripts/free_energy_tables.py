"""Separated-wells free energy: offset table and convexity margins as CSV."""
import argparse
import sys

import numpy as np

from ctdwells.asymptotics import SeparatedWellsModel, convexity_check, offset_table, rows_to_csv


def convexity_rows(model, betas, n_range):
    rows = []
    for beta in betas:
        rep = convexity_check(model, beta, n_range)
        rows.append(
            {
                "beta": float(beta),
                "min_second_difference": rep.min_second_difference,
                "at_n": rep.argmin,
                "all_positive": rep.all_positive,
            }
        )
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--table", choices=["offsets", "convexity"], default="offsets")
    a = p.parse_args()
    model = SeparatedWellsModel.from_epsilon(a.epsilon)
    if a.table == "offsets":
        rows = offset_table(model, range(1, 31), range(0, 7))
    else:
        rows = convexity_rows(model, np.logspace(-3, 50, 40), range(1, 61))
    sys.stdout.write(rows_to_csv(rows))


if __name__ == "__main__":
    main()
