"""Closed-form reference solutions with exact derivative oracles.

Both families solve i psi_t + (1/2) psi_xx = 0 exactly:

* ``ExpSolution``: psi(x, t) = exp(kappa x + i kappa^2 t / 2), whose
  derivatives are D^(jx, jt) psi = kappa^jx (i kappa^2 / 2)^jt psi.
* ``SquareWellSeries``: the sine eigenfunction expansion of the parabolic
  initial profile sqrt(30) x (1 - x) on (0, 1) with homogeneous Dirichlet
  data, truncated to a fixed number of odd modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .poly import MultiIndex


@dataclass(frozen=True)
class ExpSolution:
    """psi(x, t) = exp(kappa x + i kappa^2 t / 2) in one space dimension."""

    kappa: float

    def value(self, x, t):
        return np.exp(self.kappa * np.asarray(x) + 0.5j * self.kappa ** 2 * np.asarray(t))

    def dx(self, x, t):
        return self.kappa * self.value(x, t)

    def dt(self, x, t):
        return 0.5j * self.kappa ** 2 * self.value(x, t)

    def derivative(self, j: MultiIndex, point) -> complex:
        x, t = point
        jx = j.jx[0] if isinstance(j, MultiIndex) else j[0]
        jt = j.jt if isinstance(j, MultiIndex) else j[1]
        return complex(self.kappa ** jx * (0.5j * self.kappa ** 2) ** jt
                       * np.exp(self.kappa * x + 0.5j * self.kappa ** 2 * t))


@dataclass(frozen=True)
class ExpSolutionND:
    """psi(x, t) = exp(kappa . x + i |kappa|^2 t / 2) in d space dimensions."""

    kappa: tuple[float, ...]

    @property
    def d(self) -> int:
        return len(self.kappa)

    def value(self, x, t) -> complex:
        phase = sum(k * xi for k, xi in zip(self.kappa, x))
        return complex(np.exp(phase + 0.5j * sum(k * k for k in self.kappa) * t))

    def derivative(self, j: MultiIndex, point) -> complex:
        x, t = point
        fac = math.prod(k ** e for k, e in zip(self.kappa, j.jx))
        fac *= (0.5j * sum(k * k for k in self.kappa)) ** j.jt
        return fac * self.value(x, t)


SQUARE_WELL_AMPLITUDE = math.sqrt(30.0)


def square_well_initial(x):
    """The parabolic initial profile sqrt(30) x (1 - x)."""
    x = np.asarray(x)
    return SQUARE_WELL_AMPLITUDE * x * (1.0 - x) + 0.0j


@dataclass(frozen=True)
class SquareWellSeries:
    """Truncated eigenfunction series for the particle-in-a-box evolution.

    psi(x, t) = sqrt(30) (2/pi)^3 sum_{m=0}^{n_trunc-1} (2m+1)^-3
                sin((2m+1) pi x) exp(-i (2m+1)^2 pi^2 t / 2).

    Each retained mode solves the free equation exactly; at t = 0 the sum
    converges to the parabolic profile with cubically decaying coefficients.
    """

    n_trunc: int = 250

    def _modes(self) -> np.ndarray:
        return 2.0 * np.arange(self.n_trunc) + 1.0

    def value(self, x, t):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        x, t = np.broadcast_arrays(x, t)
        n = self._modes()
        amp = SQUARE_WELL_AMPLITUDE * (2.0 / math.pi) ** 3 / n ** 3
        phase = np.exp(-0.5j * np.pi ** 2 * np.outer(t, n * n))
        vals = (np.sin(np.pi * np.outer(x, n)) * phase) @ amp
        return vals

    def dx(self, x, t):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        x, t = np.broadcast_arrays(x, t)
        n = self._modes()
        amp = SQUARE_WELL_AMPLITUDE * (2.0 / math.pi) ** 3 / n ** 3 * (np.pi * n)
        phase = np.exp(-0.5j * np.pi ** 2 * np.outer(t, n * n))
        return (np.cos(np.pi * np.outer(x, n)) * phase) @ amp


def series_eval(sol: SquareWellSeries, point, deriv: int = 0):
    """Value (deriv = 0) or spatial derivative (deriv = 1) at (x, t)."""
    x, t = point
    if deriv == 0:
        out = sol.value(x, t)
    elif deriv == 1:
        out = sol.dx(x, t)
    else:
        raise ValueError("series supports spatial derivative order <= 1")
    return complex(out[0]) if np.isscalar(x) else out
