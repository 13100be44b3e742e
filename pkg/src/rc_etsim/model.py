"""Shared domain types for the donor-acceptor-sink two-level model.

Units: ħ = 1, all energies and rates in ps⁻¹, times in ps (60 ps⁻¹ ≈ 40 meV).
The dressed model is a two-level system (donor |1⟩, acceptor |2⟩) with gap
ε = ε₁ - ε₂, coupling matrix element V/2, and an acceptor-to-sink decay
half-rate Γ (the full acceptor relaxation rate is 2Γ), generated by

    H_eff = [[ε/2, V/2], [V/2, -ε/2]] - iΓ|2⟩⟨2|   (up to a scalar shift).

The complex Rabi frequency Ω = sqrt(V² + (ε + iΓ)²) = Ω₁ + iΩ₂ controls
oscillation (Ω₁) and the splitting of the two decay rates Γ ∓ Ω₂.
"""

from __future__ import annotations

import cmath
import enum
import json
import math
from dataclasses import dataclass

__all__ = [
    "SystemParams",
    "DensityMatrix2",
    "RabiDecomposition",
    "Regime",
    "complex_rabi",
    "classify_regime",
]

# Relative tolerance for detecting the exceptional point; exact degeneracy
# is unattainable in floating point.
EP_RTOL = 1e-12


@dataclass(frozen=True)
class SystemParams:
    """Dressed two-level + sink parameters (ps⁻¹).

    Attributes
    ----------
    epsilon : float
        Donor-acceptor gap ε = ε₁ - ε₂.
    v : float
        Donor-acceptor coupling V (the Hamiltonian matrix element is V/2).
    gamma : float
        Acceptor→sink half-rate Γ >= 0 (populations on the acceptor decay
        at 2Γ when V = 0).
    """

    epsilon: float
    v: float
    gamma: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and math.isfinite(self.v)):
            raise ValueError("epsilon and v must be finite")
        if not (math.isfinite(self.gamma) and self.gamma >= 0.0):
            raise ValueError("gamma must be finite and >= 0")

    def to_json(self) -> str:
        """Serialize to the JSON sub-object consumed by the CLI config."""
        return json.dumps(
            {"epsilon": self.epsilon, "v": self.v, "gamma": self.gamma}
        )

    @classmethod
    def from_dict(cls, obj: dict) -> "SystemParams":
        unknown = set(obj) - {"epsilon", "v", "gamma"}
        if unknown:
            raise ValueError(f"unknown system keys: {sorted(unknown)}")
        for key in ("epsilon", "v", "gamma"):
            if key not in obj:
                raise ValueError(f"system parameters missing required key '{key}'")
            if not isinstance(obj[key], (int, float)) or isinstance(obj[key], bool):
                raise ValueError(f"system key '{key}' must be a number")
        return cls(
            epsilon=float(obj["epsilon"]),
            v=float(obj["v"]),
            gamma=float(obj["gamma"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "SystemParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class DensityMatrix2:
    """2x2 density matrix of the projected donor-acceptor subsystem.

    Only the upper triangle is stored (rho21 = conj(rho12) structurally);
    rho12 uses the convention ρ₁₂ = ⟨1|ρ|2⟩ = a₁ a₂* for amplitudes a_i.
    The trace may be below one: the deficit is population lost to the sink.
    """

    rho11: float
    rho22: float
    rho12: complex = 0j

    # validation tolerances: trace never grows, positivity up to roundoff
    TRACE_TOL = 1e-9
    PSD_TOL = 1e-9

    def __post_init__(self):
        vals = (self.rho11, self.rho22, self.rho12.real, self.rho12.imag)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("density-matrix entries must be finite")

    def validate(self) -> "DensityMatrix2":
        """Check positivity and trace invariants; return self if valid."""
        if self.rho11 < -self.PSD_TOL or self.rho22 < -self.PSD_TOL:
            raise ValueError("negative population beyond tolerance")
        if self.rho11 + self.rho22 > 1.0 + self.TRACE_TOL:
            raise ValueError("trace exceeds one beyond tolerance")
        if self.rho11 * self.rho22 - abs(self.rho12) ** 2 < -self.PSD_TOL:
            raise ValueError("density matrix not positive semidefinite")
        return self

    @property
    def rho21(self) -> complex:
        return self.rho12.conjugate()

    @property
    def trace(self) -> float:
        return self.rho11 + self.rho22


@dataclass(frozen=True)
class RabiDecomposition:
    """Complex Rabi frequency Ω = Ω₁ + iΩ₂ = sqrt(p + iq) and its parts.

    p = V² + ε² - Γ² and q = 2εΓ, so that Ω₁² - Ω₂² = p and Ω₁Ω₂ = q/2 = εΓ.
    """

    omega: complex
    omega1: float
    omega2: float
    p: float
    q: float

    @property
    def magnitude_sq(self) -> float:
        """|Ω|² = Ω₁² + Ω₂² = sqrt(p² + q²)."""
        return self.omega1 ** 2 + self.omega2 ** 2

    def flipped(self) -> "RabiDecomposition":
        """The other square-root branch (Ω → -Ω); physics is invariant."""
        return RabiDecomposition(-self.omega, -self.omega1, -self.omega2, self.p, self.q)


class Regime(enum.Enum):
    """Tunneling regime at flat gap, classified by V vs Γ."""

    COHERENT = "coherent"
    INCOHERENT = "incoherent"
    EXCEPTIONAL_POINT = "exceptional_point"
    GENERIC = "generic"


def complex_rabi(params: SystemParams) -> RabiDecomposition:
    """Complex Rabi frequency Ω = sqrt(V² + (ε + iΓ)²), principal branch.

    The principal branch gives Ω₁ >= 0 and sign(Ω₁Ω₂) = sign(εΓ); every
    closed form downstream is invariant under Ω → -Ω, so the branch choice
    is a pure convention.
    """
    z = params.v ** 2 + (params.epsilon + 1j * params.gamma) ** 2
    omega = cmath.sqrt(z)
    return RabiDecomposition(
        omega=omega,
        omega1=omega.real,
        omega2=omega.imag,
        p=params.v ** 2 + params.epsilon ** 2 - params.gamma ** 2,
        q=2.0 * params.epsilon * params.gamma,
    )


def classify_regime(params: SystemParams) -> Regime:
    """Classify the dynamics: flat-gap coherent/incoherent/EP, else generic.

    With ε = 0 the coupling dominates for |V| > Γ (oscillatory populations)
    and the sink dominates for |V| < Γ (monotone decay); |V| = Γ is the
    exceptional point where the non-Hermitian eigensystem degenerates
    (Ω = 0).  Comparisons use relative tolerance 1e-12.
    """
    scale = max(abs(params.v), params.gamma, abs(params.epsilon), 1e-300)
    if abs(params.epsilon) > EP_RTOL * scale:
        return Regime.GENERIC
    absv = abs(params.v)
    if abs(absv - params.gamma) <= EP_RTOL * max(absv, params.gamma, 1e-300):
        return Regime.EXCEPTIONAL_POINT
    if absv > params.gamma:
        return Regime.COHERENT
    return Regime.INCOHERENT
