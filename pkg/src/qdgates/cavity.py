"""Reflection of a single photon off a QD in a single-side microcavity.

All rates are in units of the cavity decay rate kappa. Frequencies are
measured from an arbitrary origin; the default puts cavity, exciton and
photon on resonance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator

SIGNED_MODULI = "signed-moduli"
FULL_COMPLEX = "full-complex"
CONVENTIONS = (SIGNED_MODULI, FULL_COMPLEX)


@dataclass(frozen=True)
class CavityParams:
    g: float
    kappa: float = 1.0
    kappa_s: float = 0.0
    gamma: float = 0.1
    omega_c: float = 0.0
    omega_x: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.kappa_s < 0 or self.gamma < 0 or self.g < 0:
            raise ValueError("g, kappa_s and gamma must be non-negative")

    @classmethod
    def from_ratios(
        cls,
        g_ratio: float,
        ks_ratio: float = 0.0,
        gamma_ratio: float = 0.1,
    ) -> "CavityParams":
        """Build parameters from g/(kappa+kappa_s), kappa_s/kappa and gamma/kappa."""
        return cls(g=g_ratio * (1.0 + ks_ratio), kappa=1.0, kappa_s=ks_ratio, gamma=gamma_ratio)


@dataclass(frozen=True)
class ReflectionPair:
    r0: complex
    rh: complex

    @property
    def moduli(self) -> tuple[float, float]:
        return abs(self.r0), abs(self.rh)

    @classmethod
    def from_moduli(cls, m0: float, mh: float) -> "ReflectionPair":
        """Resonant pair with the phases of the ideal limit: r0 = -m0, rh = +mh."""
        return cls(complex(-m0), complex(mh))


@dataclass(frozen=True)
class DephasingParams:
    tau: float
    t2: float

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError(f"tau must be non-negative, got {self.tau}")
        if not self.t2 > 0:
            raise ValueError(f"T2 must be positive, got {self.t2}")


def reflection_coefficient(params: CavityParams, omega: float = 0.0, coupled: bool = True) -> complex:
    g = params.g if coupled else 0.0
    dipole = 1j * (params.omega_x - omega) + params.gamma / 2
    cavity = 1j * (params.omega_c - omega) + params.kappa / 2 + params.kappa_s / 2
    denom = dipole * cavity + g * g
    if abs(denom) < 1e-30:
        raise DegenerateDenominator(f"reflection denominator vanishes for {params}")
    return complex(1 - params.kappa * dipole / denom)


def reflection_pair(params: CavityParams, omega: float = 0.0) -> ReflectionPair:
    return ReflectionPair(
        r0=reflection_coefficient(params, omega, coupled=False),
        rh=reflection_coefficient(params, omega, coupled=True),
    )


def ideal_reflection_pair() -> ReflectionPair:
    return ReflectionPair(complex(-1.0), complex(1.0))


def scattering_operator(pair: ReflectionPair, convention: str = SIGNED_MODULI) -> np.ndarray:
    """Cavity action in the ordered basis (R↑, L↑, R↓, L↓).

    R↑ and L↓ are the uncoupled transitions, L↑ and R↓ the coupled ones.
    ``signed-moduli`` keeps only |r0| and |rh| with the resonant signs;
    ``full-complex`` uses the complex coefficients as given.
    """
    if convention == SIGNED_MODULI:
        cold, hot = -abs(pair.r0), abs(pair.rh)
    elif convention == FULL_COMPLEX:
        cold, hot = pair.r0, pair.rh
    else:
        raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")
    return np.diag([cold, hot, hot, cold]).astype(complex)


def dephasing_factor(dp: DephasingParams) -> float:
    if math.isinf(dp.t2):
        return 1.0
    return math.exp(-dp.tau / dp.t2)
