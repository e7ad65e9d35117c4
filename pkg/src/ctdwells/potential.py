"""Nested "wells-in-wells" potential on the circle.

The bond potential is a sum of step functions.  Well ``n`` has half-width
``eps ** (3 ** n)``; even wells are centred at 0 (ferromagnetic), odd wells at
pi (antiferromagnetic).  Same-character wells nest, so the potential at ``x``
is the cumulative depth ``1/2 - 2**-(n+1)`` of the deepest well containing it.

Widths are stored only as logarithms: ``eps ** (3 ** 6)`` already underflows
for ``eps = 0.1``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from fractions import Fraction

import numpy as np

from .logmath import circle_distance


class Mode(str, Enum):
    """Well-energy convention.

    ``exact`` integrates the step potential (annulus energy ``1/2 - 2**-(n+1)``),
    ``paper`` uses the effective energy ``-3 / 2**(n+1)``.  Paper mode at ``beta``
    is the exact mode at ``3 * beta`` with the constant ``3 beta / 2`` removed.
    """

    EXACT = "exact"
    PAPER = "paper"


class Character(str, Enum):
    FERRO = "ferromagnetic"
    ANTIFERRO = "antiferromagnetic"

    @property
    def sign(self) -> int:
        return 1 if self is Character.FERRO else -1


class InvalidParams(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    epsilon: float
    truncation: int
    mode: Mode = Mode.EXACT

    def __post_init__(self):
        eps = self.epsilon
        if not isinstance(eps, (int, float)) or not math.isfinite(eps):
            raise InvalidParams(f"epsilon must be a finite real, got {eps!r}")
        if not 0.0 < eps < 1.0:
            raise InvalidParams(f"epsilon must lie in (0, 1), got {eps}")
        if eps**3 >= math.pi / 4:
            raise InvalidParams(f"epsilon**3 = {eps**3:.6g} must be below pi/4")
        if isinstance(self.truncation, bool) or int(self.truncation) != self.truncation:
            raise InvalidParams(f"truncation must be an integer, got {self.truncation!r}")
        if self.truncation < 2:
            raise InvalidParams(f"truncation must be >= 2, got {self.truncation}")
        object.__setattr__(self, "truncation", int(self.truncation))
        object.__setattr__(self, "mode", Mode(self.mode))

    @property
    def log_epsilon(self) -> float:
        return math.log(self.epsilon)


def well_character(n: int) -> Character:
    return Character.FERRO if n % 2 == 0 else Character.ANTIFERRO


def well_depth(n: int) -> float:
    """Cumulative depth of well ``n``; exact in binary floating point for n < 52."""
    return 0.5 - 2.0 ** -(n + 1)


def well_depth_fraction(n: int) -> Fraction:
    return Fraction(1, 2) - Fraction(1, 2 ** (n + 1))


def log_half_width(epsilon: float, n: int) -> float:
    return float(3**n) * math.log(epsilon)


@dataclass(frozen=True)
class Well:
    index: int
    character: Character
    center: float
    log_half_width: float
    depth: float

    def half_width(self) -> float:
        """Floating half-width; 0.0 once it underflows."""
        return math.exp(self.log_half_width)


@dataclass(frozen=True)
class WellLedger:
    params: ModelParams
    wells: tuple[Well, ...] = field(repr=False)

    @property
    def epsilon(self) -> float:
        return self.params.epsilon

    @property
    def truncation(self) -> int:
        return self.params.truncation

    @property
    def mode(self) -> Mode:
        return self.params.mode

    def __getitem__(self, n: int) -> Well:
        if not 1 <= n <= len(self.wells):
            raise IndexError(f"well index {n} outside 1..{len(self.wells)}")
        return self.wells[n - 1]

    def __iter__(self):
        return iter(self.wells)

    def __len__(self) -> int:
        return len(self.wells)

    def with_mode(self, mode: Mode | str) -> "WellLedger":
        return build_ledger(ModelParams(self.epsilon, self.truncation, Mode(mode)))

    def depth_truncation_error(self) -> float:
        """Bound on the depth lost by truncating the infinite series."""
        return 2.0 ** -(self.truncation + 1)

    def to_dict(self) -> dict:
        return {
            "epsilon": repr(self.epsilon),
            "truncation": self.truncation,
            "mode": self.mode.value,
            "wells": [
                {
                    "index": w.index,
                    "character": w.character.value,
                    "center": repr(w.center),
                    "log_half_width": repr(w.log_half_width),
                    "depth": str(Decimal(w.depth)),
                }
                for w in self.wells
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def build_ledger(params: ModelParams) -> WellLedger:
    wells = tuple(
        Well(
            index=n,
            character=well_character(n),
            center=0.0 if n % 2 == 0 else math.pi,
            log_half_width=log_half_width(params.epsilon, n),
            depth=well_depth(n),
        )
        for n in range(1, params.truncation + 1)
    )
    return WellLedger(params, wells)


def _log_distances(x):
    """ln of circle distance to 0 and to pi (``-inf`` at the centre)."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(circle_distance(x, 0.0)), np.log(circle_distance(x, math.pi))


def deepest_containing_well(ledger: WellLedger, x):
    """Largest well index containing ``x``; ``None`` (scalar) or 0 (array) if none.

    Membership is ``ln dist(x, centre) <= log_half_width`` (closed wells).
    """
    l0, lpi = _log_distances(x)
    idx = np.zeros(np.shape(l0), dtype=np.int64)
    for w in ledger.wells:
        ld = l0 if w.character is Character.FERRO else lpi
        idx = np.where(ld <= w.log_half_width, w.index, idx)
    if idx.ndim == 0:
        n = int(idx)
        return n if n > 0 else None
    return idx


def evaluate_potential(ledger: WellLedger, x):
    """U(x): depth of the deepest well containing ``x``, 0 outside every well."""
    idx = deepest_containing_well(ledger, x)
    if idx is None:
        return 0.0
    if np.ndim(idx) == 0:
        return ledger[int(idx)].depth
    depths = np.concatenate([[0.0], [w.depth for w in ledger.wells]])
    return depths[idx]
