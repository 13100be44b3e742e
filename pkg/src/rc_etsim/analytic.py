"""Closed-form, noise-free dynamics of the donor-acceptor-sink model.

Everything here evaluates exact solutions of the non-Hermitian Liouville
equation  iρ̇ = [H, ρ] - i{W, ρ},  W = Γ|2⟩⟨2|,  for a pure initial state
(C₁, C₂).  The evolved amplitudes are

    a₁(t) = e^(-Γt/2) [(cos(Ωt/2) - i cosθ sin(Ωt/2)) C₁ - i sinθ sin(Ωt/2) C₂]
    a₂(t) = e^(-Γt/2) [-i sinθ sin(Ωt/2) C₁ + (cos(Ωt/2) + i cosθ sin(Ωt/2)) C₂]

with Ω = sqrt(V² + (ε + iΓ)²), cosθ = (ε + iΓ)/Ω, sinθ = V/Ω, and
ρ₁₁ = |a₁|², ρ₂₂ = |a₂|², ρ₁₂ = a₁ a₂*.  The transfer efficiency is the
integrated sink flux η(t) = 2Γ ∫₀ᵗ ρ₂₂ dτ = 1 - ρ₁₁ - ρ₂₂.

All formulas are evaluated in regrouped forms that stay accurate at the
exceptional point (Ω → 0, removable singularities via sinc/expm1 series)
and at large Γt (every exponential written with a non-positive exponent,
using Γ >= |Ω₂|, which holds for all parameters).

Functions accept scalar or ndarray ``t``; units ps and ps⁻¹ throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import RabiDecomposition, Regime, SystemParams, classify_regime, complex_rabi

__all__ = [
    "InitialAmplitudes",
    "DONOR_START",
    "rho_closed_form",
    "closed_form_arrays",
    "rho22_spectral_form",
    "efficiency_closed_form",
    "efficiency_flat",
    "efficiency_asymptotic",
    "ep_populations",
    "coherent_incoherent_populations",
]


@dataclass(frozen=True)
class InitialAmplitudes:
    """Pure initial state (C₁, C₂) with |C₁|² + |C₂|² = 1.

    ρ₁₁(0) = |C₁|², ρ₂₂(0) = |C₂|², ρ₁₂(0) = C₁ C₂*.
    """

    c1: complex
    c2: complex

    NORM_TOL = 1e-12

    def __post_init__(self):
        norm = abs(self.c1) ** 2 + abs(self.c2) ** 2
        if abs(norm - 1.0) > self.NORM_TOL:
            raise ValueError(f"|c1|^2 + |c2|^2 = {norm!r}, must be 1")


DONOR_START = InitialAmplitudes(1.0 + 0j, 0.0j)


def _sinc(w):
    """sin(w)/w for complex array w, series below |w| = 1e-4."""
    w = np.asarray(w)
    small = np.abs(w) < 1e-4
    w_safe = np.where(small, 1.0, w)
    w2 = w * w
    return np.where(small, 1.0 - w2 / 6.0 + w2 * w2 / 120.0, np.sin(w_safe) / w_safe)


def _damped_half_trig(rabi: RabiDecomposition, gamma: float, t):
    """e^(-Γt/2)·cos(Ωt/2) and e^(-Γt/2)·sin(Ωt/2)/Ω, overflow-free.

    Splits e^(±iΩt/2) into decaying exponentials using Γ >= |Ω₂|.
    """
    t = np.asarray(t, dtype=float)
    o1, o2 = rabi.omega1, rabi.omega2
    x = 0.5 * o1 * t
    # e^(iΩt/2)e^(-Γt/2) and e^(-iΩt/2)e^(-Γt/2), both with |exponent| <= 0
    ep = np.exp(-0.5 * (gamma + o2) * t) * (np.cos(x) + 1j * np.sin(x))
    em = np.exp(-0.5 * (gamma - o2) * t) * (np.cos(x) - 1j * np.sin(x))
    half_cos = 0.5 * (ep + em)
    # half_sinc = e^(-Γt/2) sin(Ωt/2)/Ω; series in w = Ωt/2 where |w| is tiny
    w = 0.5 * rabi.omega * t
    series = np.exp(-0.5 * gamma * t) * (0.5 * t) * (1.0 - w * w / 6.0 + w ** 4 / 120.0)
    if rabi.omega == 0:
        half_sinc = series
    else:
        half_sinc = np.where(np.abs(w) < 1e-4, series, (ep - em) / (2j * rabi.omega))
    return half_cos, half_sinc


def closed_form_arrays(params: SystemParams, init: InitialAmplitudes, t, rabi=None):
    """Exact (ρ₁₁, ρ₂₂, ρ₁₂) at times ``t`` for a pure initial state.

    Parameters
    ----------
    params : SystemParams
    init : InitialAmplitudes
    t : float or ndarray
        Times >= 0 (ps).
    rabi : RabiDecomposition, optional
        Precomputed decomposition; either square-root branch gives
        identical output.

    Returns
    -------
    (rho11, rho22, rho12) : ndarrays (or scalars for scalar t)
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be >= 0")
    if rabi is None:
        rabi = complex_rabi(params)
    half_cos, half_sinc = _damped_half_trig(rabi, params.gamma, t_arr)
    eg = params.epsilon + 1j * params.gamma
    diag = 1j * eg * half_sinc
    off = -1j * params.v * half_sinc
    a1 = (half_cos - diag) * init.c1 + off * init.c2
    a2 = off * init.c1 + (half_cos + diag) * init.c2
    rho11 = np.abs(a1) ** 2
    rho22 = np.abs(a2) ** 2
    rho12 = a1 * np.conj(a2)
    if t_arr.ndim == 0:
        return float(rho11), float(rho22), complex(rho12)
    return rho11, rho22, rho12


def rho_closed_form(params: SystemParams, init: InitialAmplitudes, t: float):
    """Closed-form density matrix at a single time (see module docstring)."""
    from .model import DensityMatrix2

    rho11, rho22, rho12 = closed_form_arrays(params, init, float(t))
    return DensityMatrix2(rho11=rho11, rho22=rho22, rho12=rho12)


def rho22_spectral_form(params: SystemParams, t, rabi=None):
    """Acceptor population for a donor start, in split spectral form:

        ρ₂₂(t) = V² e^(-Γt) (cosh Ω₂t - cos Ω₁t) / (2 (Ω₁² + Ω₂²)),

    evaluated as a sum of two nonnegative, overflow-free pieces.  The Ω → 0
    limit is (Γt/2)² e^(-Γt)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    if rabi is None:
        rabi = complex_rabi(params)
    gamma = params.gamma
    mag2 = rabi.magnitude_sq
    if mag2 < 1e-280:
        out = (0.5 * params.v * t) ** 2 * np.exp(-gamma * t)
        return float(out) if t.ndim == 0 else out
    u = abs(rabi.omega2) * t
    mm = -np.expm1(-u)
    hyper = 0.5 * mm * mm * np.exp(-(gamma - abs(rabi.omega2)) * t)
    trig = 2.0 * np.sin(0.5 * rabi.omega1 * t) ** 2 * np.exp(-gamma * t)
    out = params.v ** 2 * (hyper + trig) / (2.0 * mag2)
    return float(out) if t.ndim == 0 else out


def efficiency_closed_form(params: SystemParams, t, rabi=None):
    """Transfer efficiency η(t) = 2Γ∫₀ᵗρ₂₂ dτ for a donor start, Γ > 0.

    Closed form (all pieces individually proportional to Ω₁² + Ω₂², so the
    exceptional-point limit is cancellation-free):

        1 - η = e^(-Γt) [ (Γ²+Ω₁²)(Γ cosh Ω₂t + Ω₂ sinh Ω₂t)
                          - (Γ²-Ω₂²)(Γ cos Ω₁t - Ω₁ sin Ω₁t) ] / (Γ(Ω₁²+Ω₂²))

    η(0) = 0, η is nondecreasing, η(∞) = 1.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    if params.gamma <= 0:
        raise ValueError("efficiency requires gamma > 0")
    if rabi is None:
        rabi = complex_rabi(params)
    g = params.gamma
    o1 = rabi.omega1
    o2 = rabi.omega2
    mag2 = rabi.magnitude_sq
    if mag2 < 1e-280 * g * g:
        gt = g * t
        out = -np.expm1(-gt) - (gt + 0.5 * gt * gt) * np.exp(-gt)
        return float(out) if t.ndim == 0 else out
    a2 = abs(o2)
    u = a2 * t
    em_slow = np.exp(-(g - a2) * t)   # e^(-(Γ-|Ω₂|)t) <= 1
    em_fast = np.exp(-(g + a2) * t)
    e0 = np.exp(-g * t)
    mm = -np.expm1(-u)
    mm2 = -np.expm1(-2.0 * u)
    s_half = np.sin(0.5 * o1 * t)
    # Γ²(f₂ - f₁) + Ω₁² f₂ + Ω₂² f₁, each as positive damped pieces:
    bracket = (
        g ** 3 * 0.5 * mm * mm * em_slow            # Γ³ (cosh Ω₂t - 1) e^(-Γt)
        + g ** 3 * 2.0 * s_half * s_half * e0       # Γ³ (1 - cos Ω₁t) e^(-Γt)
        + g * g * a2 * 0.5 * mm2 * em_slow          # Γ² Ω₂ sinh Ω₂t e^(-Γt)
        + g * g * o1 * np.sin(o1 * t) * e0          # Γ² Ω₁ sin Ω₁t e^(-Γt)
        + o1 * o1 * (0.5 * g * (em_slow + em_fast) + a2 * 0.5 * mm2 * em_slow)
        + o2 * o2 * (g * np.cos(o1 * t) - o1 * np.sin(o1 * t)) * e0
    )
    out = 1.0 - bracket / (g * mag2)
    return float(out) if t.ndim == 0 else out


def efficiency_flat(params: SystemParams, t):
    """Flat-gap (ε = 0) efficiency, branch-selected on V vs Γ.

    V > Γ (oscillatory, Ω₁ = sqrt(V²-Γ²)):
        1 - η = e^(-Γt) [Γ²(1 - cos Ω₁t) + Ω₁(Ω₁ + Γ sin Ω₁t)] / Ω₁²
    V = Γ:
        1 - η = (1 + Γt + (Γt)²/2) e^(-Γt)
    V < Γ (monotone, Ω₂ = sqrt(Γ²-V²)):
        1 - η = e^(-Γt) [Γ²(cosh Ω₂t - 1) + Ω₂(Ω₂ + Γ sinh Ω₂t)] / Ω₂²

    The three branches agree in the V → Γ± limits.
    """
    if abs(params.epsilon) > 1e-12 * max(abs(params.v), params.gamma, 1.0):
        raise ValueError("efficiency_flat requires epsilon = 0")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    g = params.gamma
    if g <= 0:
        raise ValueError("efficiency requires gamma > 0")
    regime = classify_regime(params)
    gt = g * t
    if regime is Regime.EXCEPTIONAL_POINT:
        out = 1.0 - (1.0 + gt + 0.5 * gt * gt) * np.exp(-gt)
    elif regime is Regime.COHERENT:
        o1 = math.sqrt(params.v ** 2 - g ** 2)
        w = o1 * t
        sinc = np.real(_sinc(w))
        # 2 Γ² sin²(w/2)/Ω₁² = Γ²t²/2 · sinc²(w/2)
        half = np.real(_sinc(0.5 * w))
        bracket = 0.5 * gt * gt * half * half + 1.0 + gt * sinc
        out = 1.0 - bracket * np.exp(-gt)
    else:
        o2 = math.sqrt(g ** 2 - params.v ** 2)
        u = o2 * t
        mm = -np.expm1(-u)
        mm2 = -np.expm1(-2.0 * u)
        em_slow = np.exp(-(g - o2) * t)
        # Γ²(cosh u - 1)e^(-Γt)/Ω₂² = (Γ mm / Ω₂)² e^(-(Γ-Ω₂)t)/2, etc.
        bracket = (
            0.5 * (g / o2) ** 2 * mm * mm * em_slow
            + np.exp(-gt)
            + 0.5 * (g / o2) * mm2 * em_slow
        )
        out = 1.0 - bracket
    return float(out) if t.ndim == 0 else out


def efficiency_asymptotic(params: SystemParams, t, rabi=None):
    """Large-time (Γt >> 1) efficiency approximation.

    Generic gap: the dominant decay channel gives

        1 - η ≈ (Γ+Ω₂)(Γ²+Ω₁²) / (2Γ(Ω₁²+Ω₂²)) · e^(-(Γ-Ω₂)t),   Ω₂ >= 0.

    Flat gap (ε = 0): branch forms
        V > Γ:  1 - η ≈ Γ²/(2Ω₁²) · e^(-Γt)        (mean-level envelope)
        V = Γ:  1 - η ≈ (Γt)²/2 · e^(-Γt)
        V < Γ:  1 - η ≈ Γ(Γ+Ω₂)/(2Ω₂²) · e^(-(Γ-Ω₂)t)

    Valid for Γt >> 1; converges to ``efficiency_closed_form`` relative to
    1 - η as t grows whenever Ω₂ > 0 (for the oscillatory flat branch the
    residual oscillates at the same e^(-Γt) order).
    """
    t = np.asarray(t, dtype=float)
    g = params.gamma
    if g <= 0:
        raise ValueError("efficiency requires gamma > 0")
    regime = classify_regime(params)
    if regime is Regime.EXCEPTIONAL_POINT:
        gt = g * t
        out = 1.0 - 0.5 * gt * gt * np.exp(-gt)
    elif regime is Regime.COHERENT:
        o1sq = params.v ** 2 - g ** 2
        out = 1.0 - 0.5 * g * g / o1sq * np.exp(-g * t)
    elif regime is Regime.INCOHERENT:
        o2 = math.sqrt(g ** 2 - params.v ** 2)
        out = 1.0 - 0.5 * g * (g + o2) / (o2 * o2) * np.exp(-(g - o2) * t)
    else:
        if rabi is None:
            rabi = complex_rabi(params)
        o1, o2 = rabi.omega1, abs(rabi.omega2)
        pref = (g + o2) * (g * g + o1 * o1) / (2.0 * g * rabi.magnitude_sq)
        out = 1.0 - pref * np.exp(-(g - o2) * t)
    return float(out) if t.ndim == 0 else out


def ep_populations(gamma: float, t):
    """Populations exactly at the exceptional point (ε = 0, V = Γ):

        ρ₁₁ = e^(-Γt)(1 + Γt/2)²,   ρ₂₂ = e^(-Γt)(Γt/2)².
    """
    if gamma <= 0:
        raise ValueError("gamma must be > 0 at the exceptional point")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    half = 0.5 * gamma * t
    damp = np.exp(-gamma * t)
    rho11 = damp * (1.0 + half) ** 2
    rho22 = damp * half * half
    if t.ndim == 0:
        return float(rho11), float(rho22)
    return rho11, rho22


def coherent_incoherent_populations(params: SystemParams, t):
    """Flat-gap populations for a donor start, V ≠ Γ.

    Coherent branch (V > Γ), Ω₀ = sqrt(V² - Γ²):
        ρ₁₁ = e^(-Γt) (cos(Ω₀t/2) + (Γ/Ω₀) sin(Ω₀t/2))²
        ρ₂₂ = e^(-Γt) (V²/Ω₀²) sin²(Ω₀t/2)
    Incoherent branch (V < Γ): the hyperbolic counterparts with
    Ω₀ = sqrt(Γ² - V²).  Both tend to the exceptional-point forms as V → Γ.
    """
    if abs(params.epsilon) > 1e-12 * max(abs(params.v), params.gamma, 1.0):
        raise ValueError("flat-gap populations require epsilon = 0")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    g = params.gamma
    v = abs(params.v)
    regime = classify_regime(params)
    if regime is Regime.EXCEPTIONAL_POINT:
        raise ValueError("V = Γ is the exceptional point; use ep_populations")
    if regime is Regime.COHERENT:
        o0 = math.sqrt(v * v - g * g)
        w = 0.5 * o0 * t
        damp = np.exp(-g * t)
        amp = np.cos(w) + 0.5 * g * t * np.real(_sinc(w))
        rho11 = damp * amp * amp
        s = 0.5 * v * t * np.real(_sinc(w))
        rho22 = damp * s * s
    else:
        o0 = math.sqrt(g * g - v * v)
        w = 0.5 * o0 * t
        # e^(-Γt/2) cosh w and e^(-Γt/2) sinh(w)/w, decaying split (Γ > Ω₀)
        ep_ = np.exp(-0.5 * (g - o0) * t)
        em_ = np.exp(-0.5 * (g + o0) * t)
        dcosh = 0.5 * (ep_ + em_)
        small = np.abs(w) < 1e-4
        w_safe = np.where(small, 1.0, w)
        sinhc = np.where(
            small,
            (1.0 + w * w / 6.0 + w ** 4 / 120.0) * np.exp(-0.5 * g * t),
            0.5 * (ep_ - em_) / w_safe,
        )
        amp = dcosh + 0.5 * g * t * sinhc
        rho11 = amp * amp
        s = 0.5 * v * t * sinhc
        rho22 = s * s
    if t.ndim == 0:
        return float(rho11), float(rho22)
    return rho11, rho22
