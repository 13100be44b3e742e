"""Uniform time grids and the record format shared by every solver."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import SystemParams, complex_rabi

__all__ = ["TimeGrid", "TimeSeries", "make_grid"]

# hard validity bound: steps must resolve the fastest scale this much
GRID_SAFETY = 0.05


@dataclass(frozen=True)
class TimeGrid:
    """n_steps uniform steps of length dt (ps); t_max = dt * n_steps."""

    dt: float
    n_steps: int

    def __post_init__(self):
        if self.dt <= 0.0 or self.n_steps < 1:
            raise ValueError("need dt > 0 and n_steps >= 1")

    @property
    def t_max(self) -> float:
        return self.dt * self.n_steps

    def times(self, record_every: int = 1) -> np.ndarray:
        n_rec = self.n_steps // record_every
        return np.arange(n_rec + 1) * (self.dt * record_every)


def make_grid(params: SystemParams, t_max: float, *, dt: float | None = None,
              ensemble=None, couplings=None, target_error: float = 1e-9) -> TimeGrid:
    """Build a grid resolving the fastest scale of the problem.

    The step satisfies dt <= 0.05·min(2π/|Ω|, 1/Γ, 1/(2γ_c), 2π/(|ε|+3|δ|σ))
    (noise scales only when an ensemble is given) and additionally targets a
    global RK4 error ~``target_error`` via dt ~ (tol·120/(t_max·λ⁵))^(1/4)
    with λ the fastest rate.  Pass ``dt`` to override (still validated
    against the hard bound by the propagators).
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if dt is not None:
        if dt <= 0 or dt > t_max:
            raise ValueError("need 0 < dt <= t_max")
        n = max(1, int(round(t_max / dt)))
        return TimeGrid(dt=t_max / n, n_steps=n)
    mag = abs(complex_rabi(params).omega)
    scales = []
    rates = [mag]
    if mag > 0:
        scales.append(2.0 * math.pi / mag)
    if params.gamma > 0:
        scales.append(1.0 / params.gamma)
        rates.append(params.gamma)
    if ensemble is not None:
        scales.append(1.0 / (2.0 * ensemble.gamma_c))
        rates.append(2.0 * ensemble.gamma_c)
        delta = abs(couplings.delta) if couplings is not None else 0.0
        noisy = abs(params.epsilon) + 3.0 * delta * ensemble.sigma
        if noisy > 0:
            scales.append(2.0 * math.pi / noisy)
            rates.append(noisy)
    bound = GRID_SAFETY * min(scales) if scales else t_max / 100.0
    lam = max(rates)
    if lam > 0:
        dt_err = (target_error * 120.0 / (t_max * lam ** 5)) ** 0.25
        bound = min(bound, dt_err)
    n = max(1, int(math.ceil(t_max / bound)))
    return TimeGrid(dt=t_max / n, n_steps=n)


@dataclass
class TimeSeries:
    """(t, ρ₁₁, ρ₂₂, ρ₁₂, η) records on a uniform grid, plus optional
    Monte Carlo standard errors for the populations.

    η is the cumulative sink population; for a single coherent evolution
    η + ρ₁₁ + ρ₂₂ = 1 to integrator accuracy.
    """

    t: np.ndarray
    rho11: np.ndarray
    rho22: np.ndarray
    rho12: np.ndarray
    eta: np.ndarray
    se_rho11: np.ndarray | None = None
    se_rho22: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.t)
        for name in ("rho11", "rho22", "rho12", "eta"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"column {name} length mismatch")

    def density_matrix(self, k: int):
        from .model import DensityMatrix2

        return DensityMatrix2(
            rho11=float(self.rho11[k]),
            rho22=float(self.rho22[k]),
            rho12=complex(self.rho12[k]),
        )

    @property
    def trace(self) -> np.ndarray:
        return self.rho11 + self.rho22

    def conservation_defect(self) -> np.ndarray:
        """|1 - ρ₁₁ - ρ₂₂ - η| per record."""
        return np.abs(1.0 - self.trace - self.eta)
