"""Phantom-channel Hamiltonian model of the lossy ring.

Scattering loss is a coupling into one fictitious ("phantom") waveguide,
so the linear dynamics are unitary and lost photons remain in the state
space. Each channel X contributes a decay rate Gamma_J^(X) to the total
ring linewidth Gbar_J, and the steady-state scattering solutions are
captured by the complex enhancement factors

    F_(J,+-)^(X)(k) = (1/sqrt(L)) gamma_J^(X) / (v_J (K_J - k) -+ i Gbar_J)

with gamma_J^(X) = sqrt(2 v_J Gamma_J^(X)) the amplitude coupling (taken
real). The minus branch belongs to incoming-type solutions, the plus
branch to outgoing-type ones. CW pair rates come out in closed form as a
product of enhancement factors and the fluctuating vacuum power; the
Fermi-golden-rule frequency integral is kept alongside as a brute-force
oracle for that closed form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping

from .constants import EPS0, HBAR
from .model import Band, ChannelKind, CwPump, SystemSpec
from .numerics import integrate_adaptive

TWO_PI = 2.0 * math.pi


class Branch(enum.Enum):
    """Sign of i Gbar in the enhancement denominator."""

    MINUS = "in"  # incoming-type solutions
    PLUS = "out"  # outgoing-type solutions


@dataclass(frozen=True)
class EnhancementFactor:
    value: complex
    branch: Branch
    channel_id: str
    band: Band
    k: float


def _strategy2_detuning(system: SystemSpec, band: Band, k: float) -> float:
    p = system.bands[band]
    return p.v * (p.k_ref - k)  # = omega_J - omega(k)


def enhancement_factor(system: SystemSpec, channel_id: str, band: Band, k: float,
                       branch: Branch) -> EnhancementFactor:
    """Complex field enhancement factor of one channel at wavenumber k."""
    gamma_amp = system.amplitude_coupling(channel_id, band)
    gbar = system.gamma_bar(band)
    sign = -1.0 if branch is Branch.MINUS else 1.0
    den = _strategy2_detuning(system, band, k) + sign * 1j * gbar
    value = gamma_amp / (math.sqrt(system.ring.circumference) * den)
    return EnhancementFactor(value=value, branch=branch, channel_id=channel_id,
                             band=band, k=k)


def enhancement_peak_abs2(system: SystemSpec, channel_id: str, band: Band) -> float:
    """|F|^2 on resonance: 2 v Gamma^(X) / (L Gbar^2)."""
    p = system.bands[band]
    gbar = system.gamma_bar(band)
    return 2.0 * p.v * system.channel(channel_id).gamma(band) / (
        system.ring.circumference * gbar * gbar)


# ---------------------------------------------------------------------------
# Asymptotic field amplitudes (piecewise over the waveguide regions + ring)
# ---------------------------------------------------------------------------

class Region(enum.Enum):
    INPUT = "input"
    OUTPUT = "output"
    RING = "ring"


@dataclass(frozen=True)
class PiecewiseAmplitude:
    """Amplitude of an asymptotic field in one region of the structure.

    For waveguide regions the amplitude multiplies the bare running wave
    e^{i k z}; in the ring it multiplies the mode profile e^{i kappa_J zeta}.
    """

    region: Region
    channel_id: str | None  # None for the ring
    amplitude: complex


def asy_in_amplitude(system: SystemSpec, input_channel: str, band: Band,
                     k: float) -> list[PiecewiseAmplitude]:
    """Incoming-type solution: unit wave entering via one channel."""
    chan = system.channel(input_channel)
    if chan.kind is not ChannelKind.PHYSICAL:
        raise ValueError(f"asymptotic-in fields are driven through physical channels, "
                         f"{input_channel!r} is {chan.kind.value}")
    F = enhancement_factor(system, input_channel, band, k, Branch.MINUS).value
    v = system.bands[band].v
    sqrt_l = math.sqrt(system.ring.circumference)
    pieces = []
    for c in system.channels:
        own = c.channel_id == input_channel
        pieces.append(PiecewiseAmplitude(Region.INPUT, c.channel_id,
                                         1.0 if own else 0.0))
    pieces.append(PiecewiseAmplitude(Region.RING, None, -F))
    for c in system.channels:
        gamma_amp = system.amplitude_coupling(c.channel_id, band)
        out = 1j * gamma_amp * sqrt_l * F / v
        if c.channel_id == input_channel:
            out = 1.0 + out
        pieces.append(PiecewiseAmplitude(Region.OUTPUT, c.channel_id, out))
    return pieces


def asy_out_amplitude(system: SystemSpec, output_channel: str, band: Band,
                      k: float) -> list[PiecewiseAmplitude]:
    """Outgoing-type solution: unit wave leaving via one channel."""
    system.channel(output_channel)
    F = enhancement_factor(system, output_channel, band, k, Branch.PLUS).value
    v = system.bands[band].v
    sqrt_l = math.sqrt(system.ring.circumference)
    pieces = []
    for c in system.channels:
        own = c.channel_id == output_channel
        pieces.append(PiecewiseAmplitude(Region.OUTPUT, c.channel_id,
                                         1.0 if own else 0.0))
    pieces.append(PiecewiseAmplitude(Region.RING, None, -F))
    for c in system.channels:
        gamma_amp = system.amplitude_coupling(c.channel_id, band)
        inc = -1j * gamma_amp * sqrt_l * F / v
        if c.channel_id == output_channel:
            inc = 1.0 + inc
        pieces.append(PiecewiseAmplitude(Region.INPUT, c.channel_id, inc))
    return pieces


def flux(system: SystemSpec, pieces: list[PiecewiseAmplitude], region: Region,
         band: Band) -> float:
    """Power-like flux sum v |amplitude|^2 over one region type."""
    v = system.bands[band].v
    return sum(v * abs(p.amplitude) ** 2 for p in pieces if p.region is region)


# ---------------------------------------------------------------------------
# CW rates
# ---------------------------------------------------------------------------

def vacuum_power(gamma_bar_s: float, gamma_bar_i: float, omega_s: float,
                 omega_i: float, detuning: float = 0.0) -> float:
    """Fluctuating vacuum power [W] entering the closed-form pair rate.

    detuning is the two-photon offset 2 omega_o - omega_S - omega_I.
    """
    if gamma_bar_s <= 0 or gamma_bar_i <= 0:
        raise ValueError("linewidths must be positive")
    gsum = gamma_bar_s + gamma_bar_i
    return (HBAR / 2.0) * math.sqrt(omega_s * omega_i) * gamma_bar_s * gamma_bar_i \
        * gsum / (detuning ** 2 + gsum ** 2)


def _pump_k(system: SystemSpec, pump: CwPump) -> float:
    p = system.bands[Band.PUMP]
    return p.k_ref + pump.detuning / p.v


def pair_rate_cw(system: SystemSpec, pump: CwPump, signal_exit: str,
                 idler_exit: str) -> float:
    """Closed-form CW rate [pairs/s] of pairs with the signal leaving via
    signal_exit and the idler via idler_exit."""
    pb = system.bands[Band.PUMP]
    sb = system.bands[Band.SIGNAL]
    ib = system.bands[Band.IDLER]
    omega_o = pb.omega + pump.detuning
    gnl_l = system.ring.gamma_nl * system.ring.circumference
    f_pump = enhancement_factor(system, system.pump_input_channel, Band.PUMP,
                                _pump_k(system, pump), Branch.MINUS).value
    f_s2 = enhancement_peak_abs2(system, signal_exit, Band.SIGNAL)
    f_i2 = enhancement_peak_abs2(system, idler_exit, Band.IDLER)
    p_vac = vacuum_power(system.gamma_bar(Band.SIGNAL), system.gamma_bar(Band.IDLER),
                         sb.omega, ib.omega,
                         detuning=2.0 * omega_o - sb.omega - ib.omega)
    return (math.sqrt(sb.omega * ib.omega) / omega_o) \
        * (pb.v ** 2 / (sb.v * ib.v)) * gnl_l ** 2 \
        * pump.power ** 2 * p_vac / (HBAR * omega_o) \
        * abs(f_pump) ** 4 * f_s2 * f_i2


@dataclass(frozen=True)
class RateMatrix:
    """CW pair rates for every (signal exit, idler exit) channel pair."""

    channel_ids: tuple[str, ...]
    rates: Mapping[tuple[str, str], float]  # [pairs/s]
    p_vac: float  # [W]
    eta: Mapping[Band, Mapping[str, float]]  # escape efficiencies per band

    def rate(self, signal_exit: str, idler_exit: str) -> float:
        return self.rates[(signal_exit, idler_exit)]

    @property
    def total(self) -> float:
        return sum(self.rates.values())


def rate_matrix(system: SystemSpec, pump: CwPump) -> RateMatrix:
    sb = system.bands[Band.SIGNAL]
    ib = system.bands[Band.IDLER]
    omega_o = system.bands[Band.PUMP].omega + pump.detuning
    rates = {(x, y): pair_rate_cw(system, pump, x, y)
             for x in system.channel_ids for y in system.channel_ids}
    p_vac = vacuum_power(system.gamma_bar(Band.SIGNAL), system.gamma_bar(Band.IDLER),
                         sb.omega, ib.omega,
                         detuning=2.0 * omega_o - sb.omega - ib.omega)
    eta = {b: {c.channel_id: system.escape_efficiency(c.channel_id, b)
               for c in system.channels} for b in Band}
    return RateMatrix(channel_ids=system.channel_ids, rates=rates, p_vac=p_vac, eta=eta)


def rate_ratio(matrix: RateMatrix, signal_exit: str, idler_exit: str,
               ref_signal_exit: str, ref_idler_exit: str) -> float:
    """Ratio of two rate-matrix entries; the reference entry must be nonzero."""
    ref = matrix.rate(ref_signal_exit, ref_idler_exit)
    if ref == 0.0:
        raise ZeroDivisionError(
            f"reference rate R[{ref_signal_exit},{ref_idler_exit}] is zero")
    return matrix.rate(signal_exit, idler_exit) / ref


def fgr_rate_oracle(system: SystemSpec, pump: CwPump, signal_exit: str,
                    idler_exit: str, *, rel_tol: float = 1e-8,
                    window_halfwidths: float = 500.0) -> float:
    """Brute-force frequency integral of the golden-rule pair rate.

    Builds the interaction kernel from the enhancement factors and
    integrates it numerically; serves as the anti-drift oracle for the
    closed-form pair_rate_cw.
    """
    pb = system.bands[Band.PUMP]
    sb = system.bands[Band.SIGNAL]
    ib = system.bands[Band.IDLER]
    omega_o = pb.omega + pump.detuning
    k_o = _pump_k(system, pump)
    gnl_l = system.ring.gamma_nl * system.ring.circumference
    kernel_scale = HBAR ** 2 * EPS0 * pb.v ** 2 / (12.0 * math.pi ** 2) \
        * math.sqrt(sb.omega * ib.omega) * gnl_l
    f_pump = enhancement_factor(system, system.pump_input_channel, Band.PUMP,
                                k_o, Branch.MINUS).value

    def kernel_abs2(omega1: float) -> float:
        omega2 = 2.0 * omega_o - omega1
        f_s = enhancement_factor(system, signal_exit, Band.SIGNAL,
                                 sb.k_of_omega(omega1), Branch.PLUS).value
        f_i = enhancement_factor(system, idler_exit, Band.IDLER,
                                 ib.k_of_omega(omega2), Branch.PLUS).value
        return abs(kernel_scale * f_s.conjugate() * f_i.conjugate()
                   * f_pump * f_pump) ** 2

    gmax = max(system.gamma_bar(Band.SIGNAL), system.gamma_bar(Band.IDLER))
    mirror = 2.0 * omega_o - ib.omega  # omega1 at which the idler is resonant
    lo = min(sb.omega, mirror) - window_halfwidths * gmax
    hi = max(sb.omega, mirror) + window_halfwidths * gmax
    quad = integrate_adaptive(kernel_abs2, lo, hi, rel_tol=rel_tol,
                              points=[sb.omega, mirror])
    prefactor = 72.0 * math.pi ** 3 / (EPS0 ** 2 * HBAR ** 4 * omega_o ** 2) \
        * pump.power ** 2 / (sb.v * ib.v * pb.v ** 2)
    return prefactor * quad.value
