"""Joint spectral amplitude of photon pairs from a pulsed pump.

For a weak transform-limited Gaussian pump pulse the two-photon term of
the output state carries a biphoton wave function per channel pair,

    phi^(XX')(k1, k2) = (alpha^2 / beta) (i hbar / 2 pi) sqrt(wS wI) vP^2
                        gnl L  F_S+^(X)*(k1) F_I+^(X')*(k2) g(k1, k2),

normalized so the squared moduli summed over channel pairs integrate to
one; |beta|^2 is then the pair generation probability. The pump factor
g depends on k1, k2 only through the two-photon energy E = w1 + w2:
after eliminating the energy delta function,

    g(E) = (gP^2 / (L vP)) (tau / sqrt(pi)) exp(-tau^2 (E/2 - w_o)^2)
           * Integral dx exp(-tau^2 x^2) / (b^2 - x^2),   b = (wP - E/2) - i GbarP,

where the Gaussian prefactor is pulled out analytically and the
remaining smooth integral is evaluated by adaptive quadrature. Because
the ring-channel couplings are frequency independent, every channel
pair shares one spectral shape; a single reference-pair grid plus
per-pair complex weights represents the full wave function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .constants import HBAR
from .model import Band, PulsedPump, SystemSpec
from .numerics import grid_integrate_2d, integrate_adaptive, integrate_adaptive_complex
from .phantom import Branch, enhancement_factor

TWO_PI = 2.0 * math.pi

G_QUAD_RTOL = 1e-8
# pump-bandwidth multiples covered by the pump-factor quadrature window
_G_WINDOW_BANDWIDTHS = 6.0


class GridTooCoarseError(ValueError):
    """The JSA grid missed too much of the normalization."""

    def __init__(self, residual: float, tolerance: float):
        super().__init__(
            f"JSA grid normalization residual {residual:.3e} exceeds tolerance "
            f"{tolerance:.1e}; increase the grid extent or resolution")
        self.residual = residual
        self.tolerance = tolerance


def pump_bandwidth(pump: PulsedPump) -> float:
    """Intensity FWHM of the pump power spectrum [rad/s]."""
    return 2.0 * math.sqrt(math.log(2.0)) / pump.tau


def pulse_spectral_amplitude(omega, omega_center: float, pump: PulsedPump):
    """Spectral amplitude with unit integrated squared modulus (over omega)."""
    tau = pump.tau
    return (tau * tau / math.pi) ** 0.25 * np.exp(-0.5 * tau * tau
                                                  * (omega - omega_center) ** 2)


def _pump_g_factor(system: SystemSpec, pump: PulsedPump, rel_tol: float = G_QUAD_RTOL):
    """Returns g(E): the pump-pair spectral factor at two-photon energy E."""
    pb = system.bands[Band.PUMP]
    omega_o = pb.omega + pump.detuning
    gbar_p = system.gamma_bar(Band.PUMP)
    gamma_p2 = system.amplitude_coupling(system.pump_input_channel, Band.PUMP) ** 2
    tau = pump.tau
    L = system.ring.circumference
    scale = gamma_p2 / (L * pb.v) * tau / math.sqrt(math.pi)
    half = _G_WINDOW_BANDWIDTHS * pump_bandwidth(pump)

    def g(E: float) -> complex:
        delta = pb.omega - E / 2.0
        b = delta - 1j * gbar_p

        def integrand(x: float) -> complex:
            return math.exp(-(tau * x) ** 2) / (b * b - x * x)

        # integrand is even in x; resolve the |x| = |delta| structure if inside
        quad = integrate_adaptive_complex(integrand, 0.0, half, rel_tol=rel_tol,
                                          points=[abs(delta)])
        envelope = math.exp(-(tau * (E / 2.0 - omega_o)) ** 2)
        return scale * envelope * 2.0 * quad.value

    return g


def _lorentzian_pair_integral(system: SystemSpec, s: float, gamma_s: float,
                              gamma_i: float) -> float:
    """Exact integral over omega1 of |F_S|^2 |F_I|^2 at fixed two-photon
    energy s, for channel decay rates gamma_s, gamma_i."""
    sb = system.bands[Band.SIGNAL]
    ib = system.bands[Band.IDLER]
    L = system.ring.circumference
    gbs = system.gamma_bar(Band.SIGNAL)
    gbi = system.gamma_bar(Band.IDLER)
    amp = (2.0 * sb.v * gamma_s / L) * (2.0 * ib.v * gamma_i / L)
    mismatch = s - sb.omega - ib.omega
    return amp * math.pi * (gbs + gbi) / (gbs * gbi * (mismatch ** 2 + (gbs + gbi) ** 2))


def _jsa_prefactor(system: SystemSpec) -> float:
    sb = system.bands[Band.SIGNAL]
    ib = system.bands[Band.IDLER]
    pb = system.bands[Band.PUMP]
    return (HBAR / TWO_PI) * math.sqrt(sb.omega * ib.omega) * pb.v ** 2 \
        * system.ring.gamma_nl * system.ring.circumference


def _energy_mass_integral(system: SystemSpec, pump: PulsedPump, gamma_s: float,
                          gamma_i: float, *, half_window: float | None = None,
                          rel_tol: float = 1e-7) -> float:
    """Integral over two-photon energy of |g|^2 times the signal/idler
    Lorentzian pair integral, i.e. the squared-modulus mass of one channel
    pair's (unnormalized) biphoton amplitude up to the common prefactor."""
    pb = system.bands[Band.PUMP]
    sb = system.bands[Band.SIGNAL]
    ib = system.bands[Band.IDLER]
    omega_o = pb.omega + pump.detuning
    g = _pump_g_factor(system, pump, rel_tol=1e-10)  # inner noise below outer goal
    gsum = system.gamma_bar(Band.SIGNAL) + system.gamma_bar(Band.IDLER)
    center = 2.0 * omega_o
    if half_window is None:
        half_window = 16.0 / pump.tau + 8.0 * gsum

    def integrand(s: float) -> float:
        return abs(g(s)) ** 2 * _lorentzian_pair_integral(system, s, gamma_s, gamma_i)

    quad = integrate_adaptive(integrand, center - half_window, center + half_window,
                              rel_tol=rel_tol,
                              points=[center, sb.omega + ib.omega])
    return quad.value


def pair_mass(system: SystemSpec, pump: PulsedPump, signal_exit: str,
              idler_exit: str) -> float:
    """Integrated squared modulus of one channel pair's unnormalized
    biphoton amplitude (before dividing by beta)."""
    sb = system.bands[Band.SIGNAL]
    ib = system.bands[Band.IDLER]
    pref = _jsa_prefactor(system)
    m = _energy_mass_integral(system, pump,
                              system.channel(signal_exit).gamma(Band.SIGNAL),
                              system.channel(idler_exit).gamma(Band.IDLER))
    return pref ** 2 / (sb.v * ib.v) * m


def total_mass(system: SystemSpec, pump: PulsedPump) -> float:
    """Sum of pair_mass over all channel pairs (the decay-rate sums
    factorize, so the total uses the full linewidths)."""
    sb = system.bands[Band.SIGNAL]
    ib = system.bands[Band.IDLER]
    pref = _jsa_prefactor(system)
    m = _energy_mass_integral(system, pump, system.gamma_bar(Band.SIGNAL),
                              system.gamma_bar(Band.IDLER))
    return pref ** 2 / (sb.v * ib.v) * m


def antidiagonal_mass_fraction(system: SystemSpec, pump: PulsedPump,
                               half_width: float) -> float:
    """Fraction of the biphoton squared-modulus mass with two-photon energy
    within +- half_width of the energy-conservation line 2 omega_o."""
    total = _energy_mass_integral(system, pump, system.gamma_bar(Band.SIGNAL),
                                  system.gamma_bar(Band.IDLER))
    inside = _energy_mass_integral(system, pump, system.gamma_bar(Band.SIGNAL),
                                   system.gamma_bar(Band.IDLER),
                                   half_window=half_width)
    return inside / total


@dataclass(frozen=True)
class JsaGrid:
    """Discretized biphoton wave function for one reference channel pair.

    kappa axes are the dimensionless detunings v (k - K) / Gbar per band;
    values hold the normalized phi for the reference pair (k-space units,
    m); every other pair is weight * values with the complex weights
    keyed by (signal exit, idler exit). beta2 is the pair generation
    probability |beta|^2 for the pulse amplitude alpha.
    """

    kappa1: np.ndarray
    kappa2: np.ndarray
    values: np.ndarray  # complex, shape (len(kappa1), len(kappa2))
    reference_pair: tuple[str, str]
    weights: Mapping[tuple[str, str], complex]
    beta2: float
    normalization_residual: float
    dk1: float  # k-space grid steps [1/m]
    dk2: float

    def pair_values(self, signal_exit: str, idler_exit: str) -> np.ndarray:
        return self.weights[(signal_exit, idler_exit)] * self.values

    @property
    def abs2(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    @property
    def phase(self) -> np.ndarray:
        return np.angle(self.values)


def _direct_pair_grid(system: SystemSpec, pump: PulsedPump, signal_exit: str,
                      idler_exit: str, kappa1: np.ndarray,
                      kappa2: np.ndarray) -> np.ndarray:
    """Unnormalized biphoton amplitude of one channel pair on the grid,
    evaluated directly from its own enhancement factors."""
    sb = system.bands[Band.SIGNAL]
    ib = system.bands[Band.IDLER]
    gbs = system.gamma_bar(Band.SIGNAL)
    gbi = system.gamma_bar(Band.IDLER)
    omega1 = sb.omega + gbs * kappa1
    omega2 = ib.omega + gbi * kappa2
    k1 = sb.k_of_omega(omega1)
    k2 = ib.k_of_omega(omega2)
    f_s = np.array([enhancement_factor(system, signal_exit, Band.SIGNAL, k,
                                       Branch.PLUS).value for k in k1])
    f_i = np.array([enhancement_factor(system, idler_exit, Band.IDLER, k,
                                       Branch.PLUS).value for k in k2])
    g = _pump_g_factor(system, pump)

    d1 = gbs * (kappa1[1] - kappa1[0]) if len(kappa1) > 1 else 0.0
    d2 = gbi * (kappa2[1] - kappa2[0]) if len(kappa2) > 1 else 0.0
    commensurate = d1 > 0 and d2 > 0 and abs(d1 - d2) <= 1e-9 * d1
    if commensurate:
        # two-photon energy is constant along grid anti-diagonals
        n1, n2 = len(omega1), len(omega2)
        e_base = omega1[0] + omega2[0]
        g_diag = np.array([g(e_base + m * d1) for m in range(n1 + n2 - 1)])
        g_grid = g_diag[np.arange(n1)[:, None] + np.arange(n2)[None, :]]
    else:
        g_grid = np.array([[g(w1 + w2) for w2 in omega2] for w1 in omega1])
    return 1j * _jsa_prefactor(system) * np.conj(f_s)[:, None] * np.conj(f_i)[None, :] \
        * g_grid


def _pair_weight(system: SystemSpec, signal_exit: str, idler_exit: str,
                 ref: tuple[str, str]) -> float:
    return (system.amplitude_coupling(signal_exit, Band.SIGNAL)
            * system.amplitude_coupling(idler_exit, Band.IDLER)) / (
        system.amplitude_coupling(ref[0], Band.SIGNAL)
        * system.amplitude_coupling(ref[1], Band.IDLER))


def build_jsa(system: SystemSpec, pump: PulsedPump, *, n: int = 512,
              kappa_max: float = 8.0, reference_pair: tuple[str, str] | None = None,
              residual_tol: float = 2.5e-3) -> JsaGrid:
    """Normalized biphoton wave function on an n x n grid.

    The grid spans kappa in [-kappa_max, kappa_max] on both axes
    (kappa_max >= 8 resolves the Lorentzian wings); the trapezoidal
    normalization over all channel pairs must agree with the adaptive
    quadrature normalization within residual_tol, else
    GridTooCoarseError is raised.
    """
    if kappa_max < 8.0:
        raise ValueError(f"grid must cover at least 8 linewidths, got {kappa_max}")
    if n < 2:
        raise ValueError(f"grid needs at least 2 points per axis, got {n}")
    if reference_pair is None:
        phys = system.physical_channels
        reference_pair = (phys[0].channel_id, phys[0].channel_id)
    kappa1 = np.linspace(-kappa_max, kappa_max, n)
    kappa2 = np.linspace(-kappa_max, kappa_max, n)

    mass_total = total_mass(system, pump)
    beta = math.sqrt(mass_total) * pump.alpha ** 2
    raw = _direct_pair_grid(system, pump, reference_pair[0], reference_pair[1],
                            kappa1, kappa2)
    values = raw * (pump.alpha ** 2 / beta)

    weights = {(x, y): complex(_pair_weight(system, x, y, reference_pair))
               for x in system.channel_ids for y in system.channel_ids}
    dk1 = system.gamma_bar(Band.SIGNAL) * (kappa1[1] - kappa1[0]) / system.bands[Band.SIGNAL].v
    dk2 = system.gamma_bar(Band.IDLER) * (kappa2[1] - kappa2[0]) / system.bands[Band.IDLER].v
    sum_w2 = sum(abs(w) ** 2 for w in weights.values())
    grid_norm = sum_w2 * grid_integrate_2d(np.abs(values) ** 2, dk1, dk2)
    residual = abs(grid_norm - 1.0)
    if residual > residual_tol:
        raise GridTooCoarseError(residual, residual_tol)
    return JsaGrid(kappa1=kappa1, kappa2=kappa2, values=values,
                   reference_pair=reference_pair, weights=weights,
                   beta2=pump.alpha ** 4 * mass_total,
                   normalization_residual=residual, dk1=dk1, dk2=dk2)


def direct_pair_grid(system: SystemSpec, pump: PulsedPump, signal_exit: str,
                     idler_exit: str, grid: JsaGrid) -> np.ndarray:
    """Normalized biphoton amplitude of one pair evaluated from scratch on
    the grid's axes (for checking shape constancy against the weights)."""
    raw = _direct_pair_grid(system, pump, signal_exit, idler_exit,
                            grid.kappa1, grid.kappa2)
    return raw / (math.sqrt(total_mass(system, pump)))
