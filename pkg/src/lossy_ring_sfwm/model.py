"""Domain model for a lossy microring coupled to bus waveguides.

A system is a ring (geometry, propagation loss, effective nonlinearity)
plus three frequency bands (pump, signal, idler, each with linear
dispersion omega(k) = omega_J + v_J (k - K_J)) and an ordered list of
coupling channels. Each channel couples the ring to one waveguide; the
canonical coupling strength is the decay rate Gamma_J^(X) [rad/s] the
channel contributes to the ring linewidth in band J. One channel may be
a "phantom": a fictitious waveguide whose decay rate stands in for
scattering loss so that lost photons remain trackable.

Equivalent parameterizations and the conversions between them:

    sigma      point-coupler self-coupling,     Gamma = (1 - sigma) v / L
    Q          coupling quality factor,         Gamma = omega / (2 Q)
    xi         power attenuation [1/m],         Gamma_phantom = xi v / 2
    eta        escape efficiency,               eta^(X) = Gamma^(X) / sum_Y Gamma^(Y)

xi is the *power* attenuation constant: field amplitude decays as
exp(-xi l / 2) over length l, so the round-trip amplitude factor is
a = exp(-xi L / 2).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Mapping

from .constants import C_VACUUM

TWO_PI = 2.0 * math.pi

# dB/cm -> 1/m for a power attenuation coefficient
_DB_PER_CM_TO_NP_PER_M = 100.0 * math.log(10.0) / 10.0


class Band(enum.Enum):
    """Frequency band of a field participating in the four-wave mixing."""

    PUMP = "pump"
    SIGNAL = "signal"
    IDLER = "idler"


class ChannelKind(enum.Enum):
    PHYSICAL = "physical"
    PHANTOM = "phantom"


@dataclass(frozen=True)
class BandParams:
    """Linear dispersion data for one frequency band.

    omega(k) = omega + v * (k - k_ref); no group-velocity dispersion term
    is stored: dispersion is strictly linear within the band.
    """

    band: Band
    omega: float  # band center angular frequency [rad/s]
    v: float  # group velocity [m/s]
    k_ref: float  # wavenumber at the band center [1/m]

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError(f"band center frequency must be positive, got {self.omega}")
        if self.v <= 0:
            raise ValueError(f"group velocity must be positive, got {self.v}")
        if self.k_ref <= 0:
            raise ValueError(f"reference wavenumber must be positive, got {self.k_ref}")

    def k_of_omega(self, omega: float) -> float:
        """Wavenumber at angular frequency omega under the linear dispersion."""
        return self.k_ref + (omega - self.omega) / self.v

    def omega_of_k(self, k: float) -> float:
        return self.omega + self.v * (k - self.k_ref)


def band_from_wavelength(band: Band, wavelength_m: float, group_velocity: float,
                         effective_index: float, circumference: float) -> BandParams:
    """Build band parameters from a vacuum wavelength.

    The reference wavenumber is snapped to the nearest ring resonance
    (k_ref * L = 2 pi m, integer m) so that the band center sits exactly
    on a resonance of the ring with the given circumference.
    """
    if wavelength_m <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength_m}")
    omega = TWO_PI * C_VACUUM / wavelength_m
    m = round(effective_index * circumference / wavelength_m)
    if m < 1:
        raise ValueError(
            f"no ring resonance near wavelength {wavelength_m} m for circumference "
            f"{circumference} m and effective index {effective_index}")
    return BandParams(band=band, omega=omega, v=group_velocity,
                      k_ref=TWO_PI * m / circumference)


@dataclass(frozen=True)
class RingSpec:
    """Ring geometry, scattering loss, and effective nonlinearity."""

    radius: float  # [m]
    loss_db_per_cm: float  # power attenuation [dB/cm]
    gamma_nl: float  # effective nonlinear parameter [1/(W m)]
    delta_kappa: float = 0.0  # ring-mode wavenumber mismatch 2 kappa_P - kappa_S - kappa_I [1/m]

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"ring radius must be positive, got {self.radius}")
        if self.loss_db_per_cm < 0:
            raise ValueError(f"loss must be non-negative, got {self.loss_db_per_cm}")
        if self.gamma_nl < 0:
            raise ValueError(f"nonlinear parameter must be non-negative, got {self.gamma_nl}")

    @property
    def circumference(self) -> float:
        """L = 2 pi R [m]."""
        return TWO_PI * self.radius

    @property
    def xi(self) -> float:
        """Power attenuation constant [1/m]."""
        return xi_from_db_per_cm(self.loss_db_per_cm)

    @property
    def roundtrip_amplitude(self) -> float:
        """Field amplitude factor a = exp(-xi L / 2) per round trip."""
        return roundtrip_amplitude(self.xi, self.circumference)


@dataclass(frozen=True)
class ChannelCoupling:
    """Coupling of the ring to one waveguide, one decay rate per band."""

    channel_id: str
    gammas: Mapping[Band, float]  # decay rate Gamma_J^(X) [rad/s] per band
    kind: ChannelKind = ChannelKind.PHYSICAL

    def __post_init__(self):
        if not self.channel_id:
            raise ValueError("channel id must be non-empty")
        for b in Band:
            if b not in self.gammas:
                raise ValueError(f"channel {self.channel_id!r}: missing decay rate for {b.value}")
            if self.gammas[b] < 0:
                raise ValueError(
                    f"channel {self.channel_id!r}: decay rate must be non-negative, "
                    f"got {self.gammas[b]} for {b.value}")

    def gamma(self, band: Band) -> float:
        return self.gammas[band]


def uniform_gammas(gamma: float) -> dict[Band, float]:
    """The same decay rate for pump, signal, and idler bands."""
    return {b: gamma for b in Band}


@dataclass(frozen=True)
class CwPump:
    """Continuous-wave pump: power and detuning from the pump band center."""

    power: float  # [W]
    detuning: float = 0.0  # omega_o - omega_P [rad/s]

    def __post_init__(self):
        if self.power <= 0:
            raise ValueError(f"pump power must be positive, got {self.power}")


@dataclass(frozen=True)
class PulsedPump:
    """Transform-limited Gaussian pump pulse.

    duration_fwhm is the full width at half maximum of the *intensity*
    envelope; alpha is the dimensionless classical amplitude (mean photon
    number |alpha|^2 in the pulse).
    """

    duration_fwhm: float  # [s]
    alpha: float = 1.0
    detuning: float = 0.0  # pulse carrier offset from the pump band center [rad/s]

    def __post_init__(self):
        if self.duration_fwhm <= 0:
            raise ValueError(f"pulse duration must be positive, got {self.duration_fwhm}")

    @property
    def tau(self) -> float:
        """Gaussian amplitude parameter: envelope exp(-t^2 / (2 tau^2))."""
        return self.duration_fwhm / (2.0 * math.sqrt(math.log(2.0)))


@dataclass(frozen=True)
class SystemSpec:
    """A ring, its three bands, and its ordered coupling channels."""

    ring: RingSpec
    bands: Mapping[Band, BandParams]
    channels: tuple[ChannelCoupling, ...]
    pump_input_channel: str

    def __post_init__(self):
        for b in Band:
            if b not in self.bands:
                raise ValueError(f"missing band parameters for {b.value}")
            if self.bands[b].band is not b:
                raise ValueError(f"band parameters for {b.value} carry label "
                                 f"{self.bands[b].band.value}")
        if not self.channels:
            raise ValueError("system needs at least one coupling channel")
        ids = [c.channel_id for c in self.channels]
        if len(set(ids)) != len(ids):
            raise ValueError(f"channel ids must be unique, got {ids}")
        if sum(c.kind is ChannelKind.PHANTOM for c in self.channels) > 1:
            raise ValueError("at most one phantom channel is allowed")
        pump_in = self.channel(self.pump_input_channel)
        if pump_in.kind is not ChannelKind.PHYSICAL:
            raise ValueError(
                f"pump input channel {self.pump_input_channel!r} must be a physical channel")
        for b in Band:
            if self.gamma_bar(b) <= 0:
                raise ValueError(f"total linewidth must be positive in band {b.value}")

    def channel(self, channel_id: str) -> ChannelCoupling:
        for c in self.channels:
            if c.channel_id == channel_id:
                return c
        raise KeyError(f"unknown channel id {channel_id!r}")

    @property
    def channel_ids(self) -> tuple[str, ...]:
        return tuple(c.channel_id for c in self.channels)

    @property
    def physical_channels(self) -> tuple[ChannelCoupling, ...]:
        return tuple(c for c in self.channels if c.kind is ChannelKind.PHYSICAL)

    @property
    def phantom_channel(self) -> ChannelCoupling | None:
        for c in self.channels:
            if c.kind is ChannelKind.PHANTOM:
                return c
        return None

    def gamma_bar(self, band: Band) -> float:
        """Total ring linewidth (HWHM) in the band: sum of channel decay rates."""
        return sum(c.gamma(band) for c in self.channels)

    def amplitude_coupling(self, channel_id: str, band: Band) -> float:
        """Amplitude coupling |gamma_J^(X)| = sqrt(2 v_J Gamma_J^(X)) [sqrt(m)/s]."""
        return math.sqrt(2.0 * self.bands[band].v * self.channel(channel_id).gamma(band))

    def sigma_view(self, channel_id: str, band: Band) -> float:
        """Point-coupler self-coupling equivalent to this channel's decay rate."""
        return sigma_from_gamma(self.channel(channel_id).gamma(band),
                                self.bands[band].v, self.ring.circumference)

    def escape_efficiency(self, channel_id: str, band: Band) -> float:
        return self.channel(channel_id).gamma(band) / self.gamma_bar(band)

    def with_channel_gamma(self, channel_id: str, gammas: Mapping[Band, float]) -> "SystemSpec":
        """A copy of the system with one channel's decay rates replaced."""
        self.channel(channel_id)  # raise KeyError early on unknown id
        new = tuple(replace(c, gammas=dict(gammas)) if c.channel_id == channel_id else c
                    for c in self.channels)
        return replace(self, channels=new)


# ---------------------------------------------------------------------------
# Conversions
# ---------------------------------------------------------------------------

def xi_from_db_per_cm(loss_db_per_cm: float) -> float:
    """Power attenuation constant [1/m] from a loss figure in dB/cm."""
    if loss_db_per_cm < 0:
        raise ValueError(f"loss must be non-negative, got {loss_db_per_cm}")
    return loss_db_per_cm * _DB_PER_CM_TO_NP_PER_M


def roundtrip_amplitude(xi: float, circumference: float) -> float:
    """Round-trip field amplitude a = exp(-xi L / 2)."""
    if xi < 0:
        raise ValueError(f"attenuation must be non-negative, got {xi}")
    if circumference <= 0:
        raise ValueError(f"circumference must be positive, got {circumference}")
    return math.exp(-xi * circumference / 2.0)


def gamma_from_sigma(sigma: float, v: float, circumference: float) -> float:
    """Decay rate [rad/s] of a point coupler with self-coupling sigma.

    Valid in the high-finesse limit where the coupler removes a fraction
    (1 - sigma) of the circulating amplitude per round trip.
    """
    if not 0.0 < sigma <= 1.0:
        raise ValueError(f"self-coupling must be in (0, 1], got {sigma}")
    return (1.0 - sigma) * v / circumference


def sigma_from_gamma(gamma: float, v: float, circumference: float) -> float:
    """Inverse of gamma_from_sigma."""
    if gamma < 0:
        raise ValueError(f"decay rate must be non-negative, got {gamma}")
    sigma = 1.0 - gamma * circumference / v
    if sigma <= 0.0:
        raise ValueError(f"decay rate {gamma} exceeds the point-coupling regime "
                         f"(would need self-coupling {sigma} <= 0)")
    return sigma


def phantom_gamma_from_xi(xi: float, v: float) -> float:
    """Phantom-channel decay rate reproducing a propagation loss xi.

    Chosen so the intrinsic quality factor comes out as
    Q_int = omega / (2 Gamma) = omega / (xi v).
    """
    if xi < 0:
        raise ValueError(f"attenuation must be non-negative, got {xi}")
    return xi * v / 2.0


@dataclass(frozen=True)
class QualityFactors:
    """Loaded Q, per-channel coupling Qs, and escape efficiencies for one band."""

    q_load: float
    q_coupling: Mapping[str, float]  # infinite for a decoupled channel
    eta: Mapping[str, float]


def q_and_eta(system: SystemSpec, band: Band) -> QualityFactors:
    """Quality factors and escape efficiencies of every channel in one band."""
    omega = system.bands[band].omega
    gbar = system.gamma_bar(band)
    q_coupling = {}
    eta = {}
    for c in system.channels:
        g = c.gamma(band)
        q_coupling[c.channel_id] = omega / (2.0 * g) if g > 0 else math.inf
        eta[c.channel_id] = g / gbar
    return QualityFactors(q_load=omega / (2.0 * gbar), q_coupling=q_coupling, eta=eta)


def finesse(system: SystemSpec, band: Band = Band.PUMP) -> float:
    """Free spectral range over resonance linewidth (FWHM) in the band."""
    p = system.bands[band]
    fsr = TWO_PI * p.v / system.ring.circumference
    return fsr / (2.0 * system.gamma_bar(band))


# ---------------------------------------------------------------------------
# Builders for the systems exercised throughout: one bus waveguide
# (+ phantom), and the add-drop geometry (two bus waveguides + phantom).
# ---------------------------------------------------------------------------

def shared_bands(wavelength_m: float, group_velocity: float, effective_index: float,
                 circumference: float) -> dict[Band, BandParams]:
    """Pump, signal, and idler bands collapsed onto one ring resonance.

    Adequate when the three resonances are spectrally close; per-band
    overrides can be made with dataclasses.replace on the entries.
    """
    base = band_from_wavelength(Band.PUMP, wavelength_m, group_velocity,
                                effective_index, circumference)
    return {b: replace(base, band=b) for b in Band}


def ring_system(radius: float, loss_db_per_cm: float, gamma_nl: float,
                wavelength_m: float, group_velocity: float, effective_index: float,
                *, sigma: float | None = None, eta: float | None = None,
                bus_id: str = "O", phantom_id: str = "P") -> SystemSpec:
    """One bus waveguide plus a phantom channel carrying the ring loss.

    The bus coupling is given either as a point-coupler self-coupling
    sigma or as the escape efficiency eta into the bus.
    """
    ring = RingSpec(radius=radius, loss_db_per_cm=loss_db_per_cm, gamma_nl=gamma_nl)
    bands = shared_bands(wavelength_m, group_velocity, effective_index, ring.circumference)
    g_phantom = {b: phantom_gamma_from_xi(ring.xi, bands[b].v) for b in Band}
    if (sigma is None) == (eta is None):
        raise ValueError("give exactly one of sigma or eta")
    if sigma is not None:
        g_bus = {b: gamma_from_sigma(sigma, bands[b].v, ring.circumference) for b in Band}
    else:
        if not 0.0 < eta < 1.0:
            raise ValueError(f"escape efficiency must be in (0, 1), got {eta}")
        g_bus = {b: eta * g_phantom[b] / (1.0 - eta) for b in Band}
    channels = (ChannelCoupling(bus_id, g_bus),
                ChannelCoupling(phantom_id, g_phantom, ChannelKind.PHANTOM))
    return SystemSpec(ring=ring, bands=bands, channels=channels,
                      pump_input_channel=bus_id)


def add_drop_system(radius: float, loss_db_per_cm: float, gamma_nl: float,
                    wavelength_m: float, group_velocity: float, effective_index: float,
                    *, gamma_through_ratio: float, gamma_drop_ratio: float,
                    through_id: str = "T", drop_id: str = "D",
                    phantom_id: str = "P") -> SystemSpec:
    """Through and drop waveguides plus a phantom channel.

    The bus couplings are given as ratios to the phantom decay rate set
    by the ring loss; the pump enters via the through waveguide.
    """
    if gamma_through_ratio <= 0 or gamma_drop_ratio < 0:
        raise ValueError("through coupling must be positive and drop coupling non-negative")
    ring = RingSpec(radius=radius, loss_db_per_cm=loss_db_per_cm, gamma_nl=gamma_nl)
    bands = shared_bands(wavelength_m, group_velocity, effective_index, ring.circumference)
    g_phantom = {b: phantom_gamma_from_xi(ring.xi, bands[b].v) for b in Band}
    channels = (
        ChannelCoupling(through_id, {b: gamma_through_ratio * g_phantom[b] for b in Band}),
        ChannelCoupling(drop_id, {b: gamma_drop_ratio * g_phantom[b] for b in Band}),
        ChannelCoupling(phantom_id, g_phantom, ChannelKind.PHANTOM),
    )
    return SystemSpec(ring=ring, bands=bands, channels=channels,
                      pump_input_channel=through_id)
