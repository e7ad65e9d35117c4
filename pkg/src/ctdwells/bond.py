"""Exact single-bond Gibbs measure on the circle.

In one dimension with free boundaries the bond angles are i.i.d. with density
proportional to ``exp(beta * U(x))``.  ``U`` is piecewise constant, so the
measure is a finite mixture over regions: the annulus of well ``n`` (inside
well ``n`` but outside well ``n + 2``) and the background outside wells 1 and 2.
Everything is carried in the log domain.

Region arrays are indexed so that position ``n`` is annulus ``n`` and position
0 is the background.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .logmath import LN2, LN3, log1mexp, lse, wrap_angle
from .potential import Character, Mode, WellLedger, well_character

#: Absolute log-weight gap (scaled by magnitude) below which two wells count as tied.
DEGENERACY_TOL = 1e-9


class RegionKind(str, Enum):
    ANNULUS = "annulus"
    BACKGROUND = "background"


@dataclass(frozen=True)
class Region:
    kind: RegionKind
    index: int
    log_measure: float
    energy: float
    # energy minus the supremum of region energies; keeps beta * energy exact
    # and small when beta is astronomically large
    offset_energy: float
    center: float
    log_inner: float
    log_outer: float

    @property
    def label(self) -> str:
        if self.kind is RegionKind.BACKGROUND:
            return "background"
        return f"annulus({self.index})"

    @property
    def character(self) -> Character | None:
        if self.kind is RegionKind.BACKGROUND:
            return None
        return well_character(self.index)


def _energies(mode: Mode, n: int | None) -> tuple[float, float]:
    """(energy, offset from the supremum) for annulus n, or background if None."""
    if mode is Mode.EXACT:
        if n is None:
            return 0.0, -0.5
        off = -(2.0 ** -(n + 1))
        return 0.5 + off, off
    off = -1.5 if n is None else -3.0 * 2.0 ** -(n + 1)
    return off, off


def _sup_energy(mode: Mode) -> float:
    return 0.5 if mode is Mode.EXACT else 0.0


@lru_cache(maxsize=64)
def regions(ledger: WellLedger) -> tuple[Region, ...]:
    """Background followed by annuli 1..truncation."""
    N = ledger.truncation
    L = [None] + [w.log_half_width for w in ledger.wells]
    eps1, eps2 = math.exp(L[1]), math.exp(L[2])
    e, off = _energies(ledger.mode, None)
    out = [
        Region(
            RegionKind.BACKGROUND,
            0,
            math.log(2.0 * math.pi) + math.log1p(-(eps1 + eps2) / math.pi),
            e,
            off,
            0.0,
            L[2],
            math.log(math.pi - eps1),
        )
    ]
    for w in ledger.wells:
        n = w.index
        if n + 2 <= N:
            log_inner = L[n + 2]
            log_measure = LN2 + L[n] + float(log1mexp(L[n + 2] - L[n]))
        else:
            log_inner = -math.inf
            log_measure = LN2 + L[n]
        e, off = _energies(ledger.mode, n)
        out.append(Region(RegionKind.ANNULUS, n, log_measure, e, off, w.center, log_inner, L[n]))
    return tuple(out)


@lru_cache(maxsize=64)
def _region_mean_cos(ledger: WellLedger) -> np.ndarray:
    """Exact average of cos(x) over each region (uniform on the region)."""
    regs = regions(ledger)
    out = np.empty(len(regs))
    eps1, eps2 = ledger[1].half_width(), ledger[2].half_width()
    bg = regs[0]
    out[0] = (2.0 * math.sin(eps1) - 2.0 * math.sin(eps2)) / math.exp(bg.log_measure)
    for r in regs[1:]:
        # (sin a - sin b) / (a - b) = cos((a+b)/2) * sinc((a-b)/2); equals 1 once a underflows
        a = math.exp(r.log_outer)
        b = math.exp(r.log_inner)
        h = 0.5 * math.exp(r.log_measure - LN2)
        corr = math.cos(0.5 * (a + b)) * float(np.sinc(h / math.pi))
        out[r.index] = (1.0 if r.center == 0.0 else -1.0) * corr
    return out


def log_region_weight(ledger: WellLedger, region: Region, beta: float) -> float:
    """ln(arc length) + beta * energy for one region."""
    return region.log_measure + beta * region.energy


class ArgmaxResult(NamedTuple):
    index: int
    degenerate: bool
    background_dominates: bool
    runner_up: int


@dataclass(frozen=True)
class BondDistribution:
    beta: float
    mode: Mode
    regions: tuple[Region, ...]
    log_weights: np.ndarray
    log_partition: float
    log_probabilities: np.ndarray
    probabilities: np.ndarray
    mean_cos: np.ndarray

    @property
    def truncation(self) -> int:
        return len(self.regions) - 1

    def probability(self, n: int) -> float:
        return float(self.probabilities[n])

    def log_probability(self, n: int) -> float:
        return float(self.log_probabilities[n])

    @property
    def background_probability(self) -> float:
        return float(self.probabilities[0])

    def log_complement(self, n: int) -> float:
        """ln(1 - P_n), summed over the other regions so it stays exact near P_n = 1."""
        others = np.delete(self.log_probabilities, n)
        return lse(others)

    def argmax(self) -> ArgmaxResult:
        lp = self.log_probabilities[1:]
        order = np.argsort(-lp, kind="stable")
        top, second = int(order[0]), int(order[1])
        a, b = lp[top], lp[second]
        # compare shifted log weights; the magnitude scale absorbs rounding at huge beta
        shifted = np.array([r.log_measure for r in self.regions[1:]])
        shifted = shifted + self.beta * np.array([r.offset_energy for r in self.regions[1:]])
        scale = max(1.0, abs(shifted[top]), abs(shifted[second]))
        degenerate = bool(a - b < DEGENERACY_TOL * scale)
        return ArgmaxResult(
            index=top + 1,
            degenerate=degenerate,
            background_dominates=bool(self.log_probabilities[0] > a),
            runner_up=second + 1,
        )

    @property
    def order_parameter(self) -> float:
        return float(np.dot(self.probabilities, self.mean_cos))


def bond_distribution(ledger: WellLedger, beta: float) -> BondDistribution:
    if not beta >= 0.0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    regs = regions(ledger)
    log_measure = np.array([r.log_measure for r in regs])
    energy = np.array([r.energy for r in regs])
    offset = np.array([r.offset_energy for r in regs])
    with np.errstate(over="ignore", invalid="ignore"):
        shifted = log_measure + beta * offset
        log_weights = log_measure + beta * energy
    if not np.all(np.isfinite(shifted)):
        raise OverflowError(f"log weights overflow at beta={beta!r}")
    log_z_shift = lse(shifted)
    log_partition = log_z_shift + beta * _sup_energy(ledger.mode)
    if not math.isfinite(log_partition) or not np.all(np.isfinite(log_weights)):
        raise OverflowError(f"log partition function overflows at beta={beta!r}")
    log_p = shifted - log_z_shift
    return BondDistribution(
        beta=float(beta),
        mode=ledger.mode,
        regions=regs,
        log_weights=log_weights,
        log_partition=log_partition,
        log_probabilities=log_p,
        probabilities=np.exp(log_p),
        mean_cos=_region_mean_cos(ledger),
    )


def argmax_well(ledger: WellLedger, beta: float) -> ArgmaxResult:
    """Most probable annulus; the background never wins but is flagged if it dominates."""
    return bond_distribution(ledger, beta).argmax()


def order_parameter(ledger: WellLedger, beta: float) -> float:
    """E[cos x] under the bond measure; positive means ferromagnetic bonds."""
    return bond_distribution(ledger, beta).order_parameter


def transition_beta(ledger: WellLedger, n: int) -> float:
    """Inverse temperature at which annuli n and n+1 carry equal weight.

    Log weights are affine in beta, so the crossing is solved directly.
    """
    if not 1 <= n < ledger.truncation:
        raise ValueError(f"need 1 <= n < truncation={ledger.truncation}, got n={n}")
    regs = regions(ledger)
    lo, hi = regs[n], regs[n + 1]
    beta = (lo.log_measure - hi.log_measure) / (hi.energy - lo.energy)
    if beta < 0:
        raise ValueError(f"annulus {n + 1} outweighs annulus {n} at every beta")
    return beta


# ---------------------------------------------------------------------------
# Temperature schedules


class ScheduleInfeasible(RuntimeError):
    pass


def stationary_beta(ledger: WellLedger, n: float) -> float:
    """Closed-form beta placing the free-energy minimum of the separated wells at n."""
    c_eps = -math.log(ledger.epsilon)
    k = 2.0 * LN3 / LN2
    if ledger.mode is Mode.PAPER:
        k /= 3.0
    return k * c_eps * 6.0**n


@dataclass(frozen=True)
class ScheduleEntry:
    n: int
    beta: float
    character: Character
    corrected: bool = False


@dataclass(frozen=True)
class TemperatureSchedule:
    entries: tuple[ScheduleEntry, ...]
    epsilon: float
    mode: Mode

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def betas(self) -> np.ndarray:
        return np.array([e.beta for e in self.entries])

    @property
    def indices(self) -> list[int]:
        return [e.n for e in self.entries]


def _pins(ledger: WellLedger, n: int, beta: float) -> bool:
    res = argmax_well(ledger, beta)
    return res.index == n and not res.degenerate


def _correct(ledger: WellLedger, n: int, depth: int = 6) -> float | None:
    """Search between the transitions bounding well n, bisecting in log-beta."""
    lo = transition_beta(ledger, n - 1) if n > 1 else 0.0
    hi = transition_beta(ledger, n) if n < ledger.truncation else None
    if hi is None:
        hi = 4.0 * max(lo, 1.0)
    if not hi > lo:
        return None
    intervals = [(lo, hi)]
    for _ in range(depth):
        nxt = []
        for a, b in intervals:
            mid = math.sqrt(a * b) if a > 0 else 0.5 * b
            if _pins(ledger, n, mid):
                return mid
            nxt += [(a, mid), (mid, b)]
        intervals = nxt
    return None


def beta_schedule(ledger: WellLedger, n_lo: int, n_hi: int) -> TemperatureSchedule:
    """Inverse temperatures pinning the dominant annulus to each n in n_lo..n_hi.

    Starts from the closed-form stationary beta; entries whose argmax check fails
    are corrected by a bisection search between neighbouring transitions.
    """
    if not 1 <= n_lo < n_hi <= ledger.truncation:
        raise ValueError(
            f"need 1 <= n_lo < n_hi <= truncation={ledger.truncation}, got {n_lo}..{n_hi}"
        )
    entries = []
    for n in range(n_lo, n_hi + 1):
        beta = stationary_beta(ledger, n)
        corrected = False
        try:
            if not math.isfinite(beta):
                raise OverflowError(f"stationary beta overflows at n={n}")
            if not _pins(ledger, n, beta):
                beta = _correct(ledger, n)
                corrected = True
        except OverflowError as exc:
            raise ScheduleInfeasible(f"well {n} is out of floating-point range: {exc}") from None
        if beta is None:
            raise ScheduleInfeasible(
                f"no beta makes well {n} the unique most probable annulus at epsilon={ledger.epsilon}"
            )
        if entries and beta <= entries[-1].beta:
            raise ScheduleInfeasible(f"schedule not increasing at n={n}")
        entries.append(ScheduleEntry(n, beta, well_character(n), corrected))
    return TemperatureSchedule(tuple(entries), ledger.epsilon, ledger.mode)


# ---------------------------------------------------------------------------
# Sampling


@dataclass(frozen=True)
class BondSample:
    """A bond angle located symbolically: region, side of the centre, and fraction
    of the way from the inner to the outer radius.  ``numeric_angle`` collapses to
    the centre once the offset underflows."""

    region: int
    side: int
    fraction: float
    log_offset: float
    numeric_angle: float

    @property
    def kind(self) -> RegionKind:
        return RegionKind.BACKGROUND if self.region == 0 else RegionKind.ANNULUS


@dataclass(frozen=True)
class BondSamples:
    region: np.ndarray
    side: np.ndarray
    fraction: np.ndarray
    log_offset: np.ndarray
    numeric_angle: np.ndarray

    def __len__(self) -> int:
        return len(self.region)

    def __getitem__(self, i: int) -> BondSample:
        return BondSample(
            int(self.region[i]),
            int(self.side[i]),
            float(self.fraction[i]),
            float(self.log_offset[i]),
            float(self.numeric_angle[i]),
        )


def sample_bonds(
    ledger: WellLedger, beta: float, rng: np.random.Generator, size: int,
    dist: BondDistribution | None = None,
) -> BondSamples:
    """Draw ``size`` i.i.d. bonds by inverse CDF over regions, then uniformly within."""
    if dist is None:
        dist = bond_distribution(ledger, beta)
    regs = dist.regions
    u = rng.random(size)
    side = np.where(rng.random(size) < 0.5, 1, -1).astype(np.int8)
    frac = rng.random(size)
    cdf = np.cumsum(dist.probabilities)
    cdf[-1] = 1.0
    region = np.minimum(np.searchsorted(cdf, u, side="right"), len(regs) - 1)
    log_width = np.array([r.log_measure - LN2 for r in regs])[region]
    log_inner = np.array([r.log_inner for r in regs])[region]
    center = np.array([r.center for r in regs])[region]
    with np.errstate(divide="ignore"):
        log_offset = np.logaddexp(np.log(frac) + log_width, log_inner)
    angle = wrap_angle(center + side * np.exp(log_offset))
    return BondSamples(region, side, frac, log_offset, angle)


def sample_bond(ledger: WellLedger, beta: float, rng: np.random.Generator) -> BondSample:
    return sample_bonds(ledger, beta, rng, 1)[0]
