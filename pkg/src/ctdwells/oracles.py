"""Independent reference computations used to cross-check the log-domain engine.

Nothing here touches the ledger's depth formula or log widths: the potential is
summed term by term from the series coefficients with raw widths
``eps ** 3 ** n``, region masses come from adaptive quadrature, and the free
energy minimiser is found by derivative-free search in extended precision.
"""
from __future__ import annotations

import math

import mpmath
import numpy as np
from scipy import integrate


def _coefficients(N: int) -> list[tuple[int, float, bool]]:
    """(well index, coefficient, centred at pi) for every term of the series with index <= N."""
    terms = [(1, 0.25, True)]
    n = 1
    while 2 * n <= N:
        terms.append((2 * n, 2.0 ** (-2 * n) + 2.0 ** (-2 * n - 1), False))
        if 2 * n + 1 <= N:
            terms.append((2 * n + 1, 2.0 ** (-2 * n - 1) + 2.0 ** (-2 * n - 2), True))
        n += 1
    return sorted(terms)


def coefficient_potential_from_distances(eps: float, N: int, d0, dpi):
    """Series value given circle distances to 0 and to pi."""
    d0 = np.asarray(d0, dtype=float)
    dpi = np.asarray(dpi, dtype=float)
    u = np.zeros(np.broadcast(d0, dpi).shape)
    for n, coef, at_pi in _coefficients(N):
        width = eps ** (3**n)
        u = u + coef * ((dpi if at_pi else d0) <= width)
    return u[()] if u.ndim == 0 else u


def coefficient_potential(eps: float, N: int, x):
    x = np.asarray(x, dtype=float)
    d0 = np.abs(np.vectorize(math.remainder)(x, 2 * math.pi))
    dpi = np.abs(np.vectorize(math.remainder)(x - math.pi, 2 * math.pi))
    return coefficient_potential_from_distances(eps, N, d0, dpi)


def quadrature_region_masses(eps: float, N: int, beta: float) -> np.ndarray:
    """Integrals of exp(beta U) over [background, annulus 1..N] by adaptive quadrature.

    Integration runs in the distance-from-centre variable on each side, so wells
    far below the angle resolution are still integrated over correctly.
    """
    widths = [None] + [eps ** (3**n) for n in range(1, N + 1)]

    def integrand(at_pi):
        def g(t):
            d_here, d_other = t, math.pi - t
            d0, dpi = (d_other, d_here) if at_pi else (d_here, d_other)
            return math.exp(beta * float(coefficient_potential_from_distances(eps, N, d0, dpi)))

        return g

    def quad(g, a, b):
        val, _ = integrate.quad(g, a, b, epsabs=0.0, epsrel=1e-13, limit=200)
        return val

    masses = np.empty(N + 1)
    masses[0] = 2.0 * (
        quad(integrand(False), widths[2], math.pi / 2) + quad(integrand(True), widths[1], math.pi / 2)
    )
    for n in range(1, N + 1):
        inner = widths[n + 2] if n + 2 <= N else 0.0
        masses[n] = 2.0 * quad(integrand(n % 2 == 1), inner, widths[n])
    return masses


def quadrature_region_probabilities(eps: float, N: int, beta: float) -> np.ndarray:
    m = quadrature_region_masses(eps, N, beta)
    return m / m.sum()


def quadrature_partition(eps: float, N: int, beta: float) -> float:
    """Whole-circle integral of exp(beta U), splitting only at the well edges."""
    widths = [eps ** (3**n) for n in range(1, N + 1)]
    total = 0.0
    for at_pi in (False, True):
        own = sorted(w for n, w in enumerate(widths, 1) if (n % 2 == 1) == at_pi)

        def g(t, at_pi=at_pi):
            d0, dpi = (math.pi - t, t) if at_pi else (t, math.pi - t)
            return math.exp(beta * float(coefficient_potential_from_distances(eps, N, d0, dpi)))

        edges = [0.0] + own + [math.pi / 2]
        for a, b in zip(edges, edges[1:]):
            total += integrate.quad(g, a, b, epsabs=0.0, epsrel=1e-13, limit=200)[0]
    return 2.0 * total


def golden_section_argmin(f, lo, hi, tol=1e-30, dps=50, max_iter=500):
    """Minimiser of a unimodal f on [lo, hi] by golden-section search in mpmath."""
    with mpmath.workdps(dps):
        lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
        invphi = (mpmath.sqrt(5) - 1) / 2
        c = hi - invphi * (hi - lo)
        d = lo + invphi * (hi - lo)
        fc, fd = f(c), f(d)
        for _ in range(max_iter):
            if hi - lo < tol:
                break
            if fc < fd:
                hi, d, fd = d, c, fc
                c = hi - invphi * (hi - lo)
                fc = f(c)
            else:
                lo, c, fc = c, d, fd
                d = lo + invphi * (hi - lo)
                fd = f(d)
        return (lo + hi) / 2


def separated_free_energy_mp(c_eps: float, beta: float):
    """f(n) = 3 beta 2^-(n+1) + c_eps 3^n as an mpmath function of real n."""
    c = mpmath.mpf(c_eps)
    b = mpmath.mpf(beta)
    return lambda n: 3 * b * mpmath.power(2, -(n + 1)) + c * mpmath.power(3, n)
