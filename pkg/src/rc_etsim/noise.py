"""Spin-fluctuator noise: ensembles, telegraph trajectories, χ(τ) and S(ω).

The noise ξ(t) is a sum of N two-state telegraph processes with equal
amplitudes σ/sqrt(N) and switching rates drawn log-uniformly (density ∝ 1/γ)
from [γ_m, γ_c].  A single telegraph of rate γ has correlation a²e^(-2γτ);
the log-uniform rate average turns this into

    χ(τ) = σ² A (E1(2γ_m τ) - E1(2γ_c τ)),   A = 1/ln(γ_c/γ_m),  χ(0) = σ²,

whose cosine transform S(ω) = (1/π)∫₀^∞ χ(τ) cos(ωτ) dτ is

    S(ω) = σ²/(πω ln(γ_c/γ_m)) (arctan(ω/2γ_m) - arctan(ω/2γ_c)):

white below 2γ_m, 1/f in between, Lorentzian 1/ω² above 2γ_c.

Sampling is exact: per-fluctuator switching events with exponential waiting
times (stationary ±1 start), merged and read out at the grid points.  All
sampling is seeded and reproducible; Monte Carlo callers derive per-trajectory
sub-seeds with ``trajectory_seed``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import exp_integral_e1

__all__ = [
    "FluctuatorEnsemble",
    "NoiseCouplings",
    "NoiseTrajectory",
    "CorrelationEstimate",
    "build_ensemble",
    "trajectory_seed",
    "sample_trajectory",
    "correlation_analytic",
    "spectral_density",
    "spectral_asymptotics",
    "empirical_correlation",
]


@dataclass(frozen=True)
class FluctuatorEnsemble:
    """N telegraph fluctuators with rates in [gamma_m, gamma_c] (ps⁻¹).

    Equal per-fluctuator amplitudes sigma/sqrt(N) normalize the total
    variance to χ(0) = σ².
    """

    n_fluctuators: int
    gamma_m: float
    gamma_c: float
    sigma: float
    rates: np.ndarray = field(repr=False)
    amplitude_per_fluctuator: float = 0.0

    def __post_init__(self):
        if self.n_fluctuators < 1:
            raise ValueError("need at least one fluctuator")
        if not (0.0 < self.gamma_m < self.gamma_c):
            raise ValueError("require 0 < gamma_m < gamma_c")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")
        rates = np.asarray(self.rates, dtype=float)
        if rates.shape != (self.n_fluctuators,):
            raise ValueError("rates must have one entry per fluctuator")
        if np.any(rates < self.gamma_m) or np.any(rates > self.gamma_c):
            raise ValueError("fluctuator rates outside [gamma_m, gamma_c]")

    @property
    def log_norm(self) -> float:
        """A = 1/ln(gamma_c/gamma_m)."""
        return 1.0 / math.log(self.gamma_c / self.gamma_m)


@dataclass(frozen=True)
class NoiseCouplings:
    """Site-energy noise couplings λ₁ = g₁ξ(t), λ₂ = g₂ξ(t).

    Only the difference shifts the gap; d = |g₁ - g₂| is the amplitude D
    entering every rate formula.
    """

    g1: float
    g2: float

    @property
    def d(self) -> float:
        return abs(self.g1 - self.g2)

    @property
    def delta(self) -> float:
        """Signed difference g₁ - g₂ as it enters the gap noise."""
        return self.g1 - self.g2


@dataclass(frozen=True)
class NoiseTrajectory:
    """One sampled realization ξ(t_k) on a uniform grid t_k = k·dt."""

    dt: float
    values: np.ndarray
    seed: int

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if len(self.values) < 2:
            raise ValueError("trajectory needs at least two grid points")

    @property
    def t_max(self) -> float:
        return self.dt * (len(self.values) - 1)


@dataclass(frozen=True)
class CorrelationEstimate:
    """Empirical ⟨ξ(t)ξ(t+τ)⟩ with per-lag standard errors."""

    tau: np.ndarray
    value: np.ndarray
    stderr: np.ndarray


def build_ensemble(n: int, gamma_m: float, gamma_c: float, sigma: float,
                   seed: int) -> FluctuatorEnsemble:
    """Draw an ensemble of n fluctuators with log-uniform switching rates.

    The 1/γ rate density is the unique choice whose telegraph average
    reproduces χ(τ) = σ²A(E1(2γ_m τ) - E1(2γ_c τ)) exactly.
    """
    if n < 1:
        raise ValueError("need at least one fluctuator")
    if not (0.0 < gamma_m < gamma_c):
        raise ValueError("require 0 < gamma_m < gamma_c")
    rng = np.random.default_rng(seed)
    if n == 1:
        rates = np.array([math.sqrt(gamma_m * gamma_c)])
        amp = sigma
    else:
        rates = gamma_m * (gamma_c / gamma_m) ** rng.random(n)
        amp = sigma / math.sqrt(n)
    return FluctuatorEnsemble(
        n_fluctuators=n, gamma_m=gamma_m, gamma_c=gamma_c, sigma=sigma,
        rates=rates, amplitude_per_fluctuator=amp,
    )


def trajectory_seed(seed: int, index: int) -> np.random.SeedSequence:
    """Sub-seed for trajectory ``index``: SeedSequence(seed, spawn_key=(index,)).

    The documented splitting function: streams are statistically independent
    and depend only on (seed, index), never on execution order or the number
    of workers.
    """
    return np.random.SeedSequence(entropy=seed, spawn_key=(index,))


def _switch_times(rng, rate, t_max):
    # exponential waiting times, extended in blocks until t_max is covered
    block = max(4, int(rate * t_max + 6.0 * math.sqrt(rate * t_max) + 4))
    times = np.cumsum(rng.exponential(1.0 / rate, block))
    while times[-1] < t_max:
        more = times[-1] + np.cumsum(rng.exponential(1.0 / rate, block))
        times = np.concatenate([times, more])
    return times[times < t_max]


def sample_trajectory(ensemble: FluctuatorEnsemble, dt: float, t_max: float,
                      seed) -> NoiseTrajectory:
    """Sample ξ(t) = Σᵢ aᵢ sᵢ(t) on the uniform grid {k·dt, k = 0..n}.

    Each sᵢ is a ±1 telegraph with exponential waiting times of rate γᵢ and
    an equiprobable (stationary) initial sign.  The grid values are the
    exact process state at the grid times.

    ``seed`` may be an int or a ``numpy.random.SeedSequence``.
    """
    if dt <= 0.0 or t_max <= dt:
        raise ValueError("need dt > 0 and t_max > dt")
    if isinstance(seed, np.random.SeedSequence):
        seed_repr = seed.entropy if isinstance(seed.entropy, int) else 0
        rng = np.random.default_rng(seed)
    else:
        seed_repr = int(seed)
        rng = np.random.default_rng(seed)
    n_steps = int(round(t_max / dt))
    grid = np.arange(n_steps + 1) * dt
    amp = ensemble.amplitude_per_fluctuator

    signs = rng.integers(0, 2, ensemble.n_fluctuators) * 2 - 1
    all_times = []
    all_deltas = []
    for i in range(ensemble.n_fluctuators):
        times = _switch_times(rng, ensemble.rates[i], t_max)
        if len(times) == 0:
            continue
        flips = np.empty(len(times))
        flips[0::2] = -2.0 * amp * signs[i]
        flips[1::2] = 2.0 * amp * signs[i]
        all_times.append(times)
        all_deltas.append(flips)

    xi0 = amp * float(np.sum(signs))
    if all_times:
        times = np.concatenate(all_times)
        deltas = np.concatenate(all_deltas)
        order = np.argsort(times, kind="stable")
        cum = np.cumsum(deltas[order])
        idx = np.searchsorted(times[order], grid, side="right")
        values = xi0 + np.where(idx > 0, cum[idx - 1], 0.0)
    else:
        values = np.full(n_steps + 1, xi0)
    return NoiseTrajectory(dt=dt, values=values, seed=seed_repr)


def correlation_analytic(ensemble: FluctuatorEnsemble, tau):
    """χ(τ) = σ² A (E1(2γ_m τ) - E1(2γ_c τ)); χ(0) = σ² by analytic limit."""
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0):
        raise ValueError("tau must be >= 0")
    out = np.empty_like(tau_arr, dtype=float)
    zero = tau_arr == 0.0
    out[zero] = ensemble.sigma ** 2
    if np.any(~zero):
        tz = tau_arr[~zero]
        out[~zero] = (
            ensemble.sigma ** 2
            * ensemble.log_norm
            * (exp_integral_e1(2.0 * ensemble.gamma_m * tz)
               - exp_integral_e1(2.0 * ensemble.gamma_c * tz))
        )
    return float(out) if tau_arr.ndim == 0 else out


def spectral_density(ensemble: FluctuatorEnsemble, omega):
    """Noise spectral density S(ω) (one-sided cosine-transform convention).

    S(ω) = σ²/(πω ln(γ_c/γ_m)) (arctan(ω/2γ_m) - arctan(ω/2γ_c)); the ω → 0
    limit is the white-noise plateau σ²(1 - γ_m/γ_c)/(2πγ_m ln(γ_c/γ_m)).
    """
    om = np.asarray(omega, dtype=float)
    if np.any(om < 0):
        raise ValueError("omega must be >= 0")
    sig2 = ensemble.sigma ** 2
    a = ensemble.log_norm
    gm, gc = ensemble.gamma_m, ensemble.gamma_c
    plateau = sig2 * a * (1.0 - gm / gc) / (2.0 * math.pi * gm)
    small = om < 1e-8 * gm
    om_safe = np.where(small, 1.0, om)
    general = (
        sig2 * a / (math.pi * om_safe)
        * (np.arctan(om_safe / (2.0 * gm)) - np.arctan(om_safe / (2.0 * gc)))
    )
    out = np.where(small, plateau, general)
    return float(out) if om.ndim == 0 else out


def spectral_asymptotics(ensemble: FluctuatorEnsemble, omega: float):
    """Matching branch of the three-regime approximation to S(ω).

    Returns (tag, value) with tag in {"white", "one_over_f", "lorentzian"}:
    white plateau for ω <= 2γ_m, σ²/(2ω ln r) in the 1/f band, and the
    Lorentzian tail 2σ²γ_c(1 - γ_m/γ_c)/(πω² ln r) for ω >= 2γ_c.
    """
    if omega < 0:
        raise ValueError("omega must be >= 0")
    sig2 = ensemble.sigma ** 2
    a = ensemble.log_norm
    gm, gc = ensemble.gamma_m, ensemble.gamma_c
    if omega <= 2.0 * gm:
        return "white", sig2 * a * (1.0 - gm / gc) / (2.0 * math.pi * gm)
    if omega >= 2.0 * gc:
        return "lorentzian", 2.0 * sig2 * gc * (1.0 - gm / gc) * a / (math.pi * omega ** 2)
    return "one_over_f", sig2 * a / (2.0 * omega)


def empirical_correlation(trajectories, max_lag: float) -> CorrelationEstimate:
    """Unbiased lag-average estimate of ⟨ξ(t)ξ(t+τ)⟩ across trajectories.

    The process mean is zero by construction, so raw lagged products are
    averaged (FFT accelerated) and normalized per lag by the number of
    contributing pairs.  Standard errors are the trajectory-to-trajectory
    scatter of the per-trajectory estimates / sqrt(n_traj).

    Raises ValueError on fewer than two trajectories or mismatched grids.
    """
    if len(trajectories) < 2:
        raise ValueError("need at least two trajectories")
    dt = trajectories[0].dt
    n = len(trajectories[0].values)
    for tr in trajectories[1:]:
        if abs(tr.dt - dt) > 1e-12 * dt or len(tr.values) != n:
            raise ValueError("trajectories must share one grid")
    n_lags = min(n - 1, int(math.floor(max_lag / dt + 1e-9)))
    if n_lags < 0:
        raise ValueError("max_lag must be >= 0")
    counts = n - np.arange(n_lags + 1)
    nfft = 1 << int(math.ceil(math.log2(2 * n)))
    per_traj = np.empty((len(trajectories), n_lags + 1))
    for i, tr in enumerate(trajectories):
        f = np.fft.rfft(tr.values, nfft)
        acov = np.fft.irfft(f * np.conj(f), nfft)[: n_lags + 1]
        per_traj[i] = acov / counts
    value = per_traj.mean(axis=0)
    stderr = per_traj.std(axis=0, ddof=1) / math.sqrt(len(trajectories))
    return CorrelationEstimate(
        tau=np.arange(n_lags + 1) * dt, value=value, stderr=stderr
    )
