"""Separated-wells approximation of the well free energy.

Ignoring that wells sit inside each other, the free energy of well ``n`` at
inverse temperature ``beta`` is

    f(n) = 3 beta / 2**(n+1) + c_eps * 3**n,     c_eps = -ln(eps),

a sum of two convex exponentials in ``n``.  Its continuous minimiser solves
``beta = c_eps * (2/3) * a * 6**n`` with ``a = ln 3 / ln 2``.  At that beta the
free energy ``k`` wells away is ``3**n c_eps (2**-k a + 3**k)`` (and the mirror
expression below), so the gap to the neighbours grows like ``3**n``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .logmath import LN2, LN3, log1mexp
from .potential import WellLedger

A = LN3 / LN2


@dataclass(frozen=True)
class SeparatedWellsModel:
    c_eps: float
    a: float = A

    def __post_init__(self):
        if not self.c_eps > 0:
            raise ValueError(f"c_eps must be positive, got {self.c_eps}")

    @classmethod
    def from_epsilon(cls, epsilon: float) -> "SeparatedWellsModel":
        return cls(-math.log(epsilon))

    @classmethod
    def from_ledger(cls, ledger: WellLedger) -> "SeparatedWellsModel":
        return cls.from_epsilon(ledger.epsilon)


def f_paper(n: int, beta: float, ledger: WellLedger) -> float:
    """3 beta / 2**(n+1) - ln(eps_n - eps_{n+2}); nested widths kept in log form."""
    if not 1 <= n <= ledger.truncation - 2:
        raise ValueError(f"need 1 <= n <= truncation - 2, got {n}")
    ln = ledger[n].log_half_width
    ln2 = ledger[n + 2].log_half_width
    return 3.0 * beta * 2.0 ** -(n + 1) - (ln + float(log1mexp(ln2 - ln)))


def f_tilde(n, beta, model: SeparatedWellsModel):
    """Separated-wells free energy; ``n`` may be real or an array."""
    n = np.asarray(n, dtype=float)
    out = 3.0 * beta * np.exp(-(n + 1.0) * LN2) + model.c_eps * np.exp(n * LN3)
    return out[()] if out.ndim == 0 else out


def beta_for_n_max(n_max: float, model: SeparatedWellsModel) -> float:
    return model.c_eps * (2.0 / 3.0) * model.a * 6.0**n_max


class OutOfRange(ValueError):
    pass


class NMax(NamedTuple):
    continuous: float
    floor: int
    ceil: int
    f_floor: float
    f_ceil: float

    @property
    def best(self) -> int:
        return self.floor if self.f_floor <= self.f_ceil else self.ceil


def n_max_closed(beta: float, model: SeparatedWellsModel) -> NMax:
    """Stationary point log_6(3 beta ln2 / (2 c_eps ln3)) and its integer neighbours."""
    if not beta > 0:
        raise OutOfRange(f"beta must be positive, got {beta}")
    x = math.log(3.0 * beta * LN2 / (2.0 * model.c_eps * LN3)) / math.log(6.0)
    # allow rounding at the n_max = 1 end of the range
    if x < 1.0 - 1e-9:
        raise OutOfRange(f"continuous n_max = {x:.6g} < 1 at beta={beta}")
    lo, hi = max(1, math.floor(x)), max(1, math.ceil(x))
    return NMax(x, lo, hi, float(f_tilde(lo, beta, model)), float(f_tilde(hi, beta, model)))


def offset_free_energy(n_max: int, k: int, model: SeparatedWellsModel, side: int = +1) -> float:
    """Closed form of f(n_max + side*k) at the beta pinning n_max."""
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    s = side * k
    return 3.0**n_max * model.c_eps * (2.0**-s * model.a + 3.0**s)


def ratio_exponent(n_max: int, model: SeparatedWellsModel) -> float:
    """Largest c with f(n_max +- k) - f(n_max) >= c k for every k >= 1.

    By convexity the binding case is k = 1 on the cheaper side.
    """
    a = model.a
    return 3.0**n_max * model.c_eps * (min(a / 2.0 + 3.0, 2.0 * a + 1.0 / 3.0) - (a + 1.0))


@dataclass(frozen=True)
class ConvexityReport:
    n: np.ndarray
    second_differences: np.ndarray

    @property
    def all_positive(self) -> bool:
        return bool(np.all(self.second_differences > 0))

    @property
    def min_second_difference(self) -> float:
        return float(self.second_differences.min())

    @property
    def argmin(self) -> int:
        return int(self.n[np.argmin(self.second_differences)])


def convexity_check(model: SeparatedWellsModel, beta: float, n_range) -> ConvexityReport:
    """Discrete second differences f(n+1) - 2 f(n) + f(n-1) at interior points of n_range."""
    n = np.asarray(list(n_range), dtype=float)
    if n.size < 3:
        raise ValueError("n_range needs at least three points")
    f = f_tilde(n, beta, model)
    return ConvexityReport(n[1:-1].astype(int), f[2:] - 2.0 * f[1:-1] + f[:-2])


def offset_table(model: SeparatedWellsModel, n_max_values, k_values) -> list[dict]:
    """Rows comparing the offset closed form with direct evaluation."""
    rows = []
    for n in n_max_values:
        beta = beta_for_n_max(n, model)
        for k in k_values:
            for side in (1, -1):
                if n + side * k < 1:
                    continue
                closed = offset_free_energy(n, k, model, side)
                direct = float(f_tilde(n + side * k, beta, model))
                rows.append(
                    {
                        "n_max": n,
                        "k": k,
                        "side": "+" if side > 0 else "-",
                        "closed_form": closed,
                        "direct": direct,
                        "abs_diff": abs(closed - direct),
                    }
                )
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.17g}" if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()
