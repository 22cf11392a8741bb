"""Two-site Bose-Hubbard dimer mapped onto a pair of coupled oscillators.

In the large-filling semiclassical regime the dimer with on-site frequency
``omega_bh`` and hopping ``J`` behaves as two unit-mass oscillators with

    omega = omega_bh - J        (on-site frequency)
    k     = 2 * omega_bh * J    (spring coupling)

on an open two-site chain.  The normal-mode frequencies are then
``omega_plus = omega_bh - J`` and ``omega_minus = omega_bh + J``, which is
the identity ``omega_minus**2 = omega**2 + 2 k``.  A quench of the dimer
changes ``omega_bh`` at fixed ``J``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ChainSpec


def to_oscillator(omega_bh: float, hop: float, *, allow_gapless: bool = False) -> tuple[float, float]:
    """Map dimer parameters (omega_bh, J) to oscillator parameters (omega, k).

    Requires ``omega_bh > J >= 0``; with ``allow_gapless=True`` the marginal
    case ``omega_bh == J`` (vanishing on-site frequency) is accepted, which
    is legitimate for the post-quench phase only.
    """
    if hop < 0:
        raise ValueError("hopping J must be non-negative")
    if omega_bh < hop or (omega_bh == hop and not allow_gapless):
        raise ValueError(
            f"need omega_bh > J (got omega_bh={omega_bh}, J={hop}); "
            "omega_bh == J is allowed post-quench only"
        )
    return omega_bh - hop, 2.0 * omega_bh * hop


def from_oscillator(omega: float, k: float) -> tuple[float, float]:
    """Inverse map: oscillator parameters (omega, k) back to (omega_bh, J)."""
    if omega < 0 or k < 0:
        raise ValueError("omega and k must be non-negative")
    omega_minus = np.sqrt(omega**2 + 2.0 * k)
    return 0.5 * (omega + omega_minus), 0.5 * (omega_minus - omega)


def mode_frequencies(omega_bh: float, hop: float) -> tuple[float, float]:
    """Normal-mode frequencies (omega_plus, omega_minus) of the dimer."""
    return omega_bh - hop, omega_bh + hop


@dataclass(frozen=True)
class BoseHubbardSpec:
    """Dimer quench: omega_bh jumps from ``omega_bh_i`` to ``omega_bh_f``
    at fixed hopping ``hop``."""

    omega_bh_i: float
    omega_bh_f: float
    hop: float

    def __post_init__(self):
        to_oscillator(self.omega_bh_i, self.hop)
        to_oscillator(self.omega_bh_f, self.hop, allow_gapless=True)

    def chain_spec(self) -> ChainSpec:
        """Equivalent open two-site oscillator chain."""
        omega_i, k_i = to_oscillator(self.omega_bh_i, self.hop)
        omega_f, k_f = to_oscillator(self.omega_bh_f, self.hop, allow_gapless=True)
        return ChainSpec(
            n=2, omega_i=omega_i, k_i=k_i, omega_f=omega_f, k_f=k_f, boundary="open"
        )
