"""Enhancement factors, asymptotic amplitudes, vacuum power, and CW rates
of the phantom-channel model."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lossy_ring_sfwm import phantom as ph
from lossy_ring_sfwm.constants import HBAR
from lossy_ring_sfwm.model import (Band, ChannelCoupling, ChannelKind, CwPump,
                                   RingSpec, SystemSpec, phantom_gamma_from_xi,
                                   ring_system, shared_bands, uniform_gammas)

V = 1e8


def sample_system(q_int=2e4, eta=0.5, radius=1e-5, wavelength=1550e-9):
    """Single bus + phantom with the phantom decay set by a quality factor."""
    ring = RingSpec(radius=radius, loss_db_per_cm=26.0, gamma_nl=100.0)
    bands = shared_bands(wavelength, V, 2.4, ring.circumference)
    omega = bands[Band.PUMP].omega
    g_ph = omega / (2.0 * q_int)
    g_bus = eta * g_ph / (1.0 - eta)
    channels = (ChannelCoupling("O", uniform_gammas(g_bus)),
                ChannelCoupling("P", uniform_gammas(g_ph), ChannelKind.PHANTOM))
    return SystemSpec(ring=ring, bands=bands, channels=channels,
                      pump_input_channel="O")


def random_system(rng: random.Random, n_physical: int) -> SystemSpec:
    radius = rng.uniform(5e-6, 5e-5)
    ring = RingSpec(radius=radius, loss_db_per_cm=rng.uniform(1.0, 50.0),
                    gamma_nl=rng.uniform(10.0, 500.0))
    wavelength = rng.uniform(1.2e-6, 1.6e-6)
    v = rng.uniform(0.7e8, 1.5e8)
    bands = shared_bands(wavelength, v, 2.4, ring.circumference)
    channels = []
    for i in range(n_physical):
        gammas = {b: rng.uniform(0.3, 3.0) * phantom_gamma_from_xi(ring.xi, v)
                  for b in Band}
        channels.append(ChannelCoupling(f"C{i}", gammas))
    channels.append(ChannelCoupling(
        "P", {b: phantom_gamma_from_xi(ring.xi, bands[b].v) for b in Band},
        ChannelKind.PHANTOM))
    return SystemSpec(ring=ring, bands=bands, channels=tuple(channels),
                      pump_input_channel="C0")


class TestEnhancementFactor:
    def test_reference_peak(self):
        system = sample_system()
        f2 = ph.enhancement_peak_abs2(system, "O", Band.PUMP)
        assert f2 == pytest.approx(26.19275943319821, rel=1e-12)
        assert f2 == pytest.approx(26.2, rel=0.01)
        k = system.bands[Band.PUMP].k_ref
        f = ph.enhancement_factor(system, "O", Band.PUMP, k, ph.Branch.MINUS)
        assert abs(f.value) ** 2 == pytest.approx(f2, rel=1e-12)

    def test_decoupled_channel_vanishes(self):
        ring = RingSpec(radius=1e-5, loss_db_per_cm=26.0, gamma_nl=100.0)
        bands = shared_bands(1550e-9, V, 2.4, ring.circumference)
        channels = (ChannelCoupling("O", uniform_gammas(1e10)),
                    ChannelCoupling("P", uniform_gammas(0.0), ChannelKind.PHANTOM))
        system = SystemSpec(ring=ring, bands=bands, channels=channels,
                            pump_input_channel="O")
        f = ph.enhancement_factor(system, "P", Band.SIGNAL,
                                  bands[Band.SIGNAL].k_ref, ph.Branch.PLUS)
        assert f.value == 0.0

    def test_half_width(self):
        # tolerance reflects the detuning round trip through absolute omegas
        system = sample_system()
        band = system.bands[Band.SIGNAL]
        gbar = system.gamma_bar(Band.SIGNAL)
        peak = ph.enhancement_peak_abs2(system, "O", Band.SIGNAL)
        k_half = band.k_of_omega(band.omega + gbar)
        f = ph.enhancement_factor(system, "O", Band.SIGNAL, k_half, ph.Branch.PLUS)
        assert abs(f.value) ** 2 == pytest.approx(peak / 2.0, rel=1e-8)

    def test_fwhm_is_full_linewidth(self):
        # |F|^2 halves one half-linewidth away on either side
        system = sample_system(eta=0.37)
        band = system.bands[Band.IDLER]
        gbar = system.gamma_bar(Band.IDLER)
        peak = ph.enhancement_peak_abs2(system, "O", Band.IDLER)
        lo = ph.enhancement_factor(system, "O", Band.IDLER,
                                   band.k_of_omega(band.omega - gbar), ph.Branch.MINUS)
        hi = ph.enhancement_factor(system, "O", Band.IDLER,
                                   band.k_of_omega(band.omega + gbar), ph.Branch.MINUS)
        assert abs(lo.value) ** 2 == pytest.approx(peak / 2.0, rel=1e-8)
        assert abs(hi.value) ** 2 == pytest.approx(peak / 2.0, rel=1e-8)


class TestAsymptoticAmplitudes:
    def test_extinction_at_critical_coupling(self):
        system = sample_system(eta=0.5)
        k = system.bands[Band.PUMP].k_ref
        pieces = ph.asy_in_amplitude(system, "O", Band.PUMP, k)
        own_out = next(p for p in pieces
                       if p.region is ph.Region.OUTPUT and p.channel_id == "O")
        assert abs(own_out.amplitude) < 1e-12

    def test_input_boundary_conditions(self):
        system = sample_system(eta=0.3)
        k = system.bands[Band.SIGNAL].k_ref + 1e3
        pieces = ph.asy_in_amplitude(system, "O", Band.SIGNAL, k)
        inputs = {p.channel_id: p.amplitude for p in pieces
                  if p.region is ph.Region.INPUT}
        assert inputs["O"] == 1.0
        assert inputs["P"] == 0.0

    def test_output_boundary_conditions(self):
        system = sample_system(eta=0.3)
        k = system.bands[Band.SIGNAL].k_ref - 4e2
        pieces = ph.asy_out_amplitude(system, "P", Band.SIGNAL, k)
        outputs = {p.channel_id: p.amplitude for p in pieces
                   if p.region is ph.Region.OUTPUT}
        assert outputs["P"] == 1.0
        assert outputs["O"] == 0.0

    def test_ring_amplitude_is_minus_enhancement(self):
        system = sample_system(eta=0.44)
        k = system.bands[Band.IDLER].k_ref + 7e2
        f = ph.enhancement_factor(system, "O", Band.IDLER, k, ph.Branch.PLUS)
        pieces = ph.asy_out_amplitude(system, "O", Band.IDLER, k)
        ring = next(p for p in pieces if p.region is ph.Region.RING)
        assert ring.amplitude == pytest.approx(-f.value, rel=1e-15)

    def test_transparent_ring_limit(self):
        ring = RingSpec(radius=1e-5, loss_db_per_cm=0.0, gamma_nl=100.0)
        bands = shared_bands(1550e-9, V, 2.4, ring.circumference)
        channels = (ChannelCoupling("A", uniform_gammas(1e-3)),
                    ChannelCoupling("B", uniform_gammas(1e-3)),
                    ChannelCoupling("P", uniform_gammas(0.0), ChannelKind.PHANTOM))
        system = SystemSpec(ring=ring, bands=bands, channels=channels,
                            pump_input_channel="A")
        k = bands[Band.PUMP].k_ref + 1e2  # off resonance
        pieces = ph.asy_in_amplitude(system, "A", Band.PUMP, k)
        outputs = {p.channel_id: p.amplitude for p in pieces
                   if p.region is ph.Region.OUTPUT}
        assert outputs["A"] == pytest.approx(1.0, abs=1e-10)
        assert abs(outputs["B"]) < 1e-10

    @pytest.mark.parametrize("n_physical", [1, 2, 3])
    def test_flux_conservation(self, n_physical):
        rng = random.Random(20_000 + n_physical)
        system = random_system(rng, n_physical)
        for band in Band:
            p = system.bands[band]
            gbar = system.gamma_bar(band)
            for _ in range(40):
                k = p.k_of_omega(p.omega + rng.uniform(-6.0, 6.0) * gbar)
                entry = rng.choice(system.physical_channels).channel_id
                pieces = ph.asy_in_amplitude(system, entry, band, k)
                out_flux = ph.flux(system, pieces, ph.Region.OUTPUT, band)
                assert out_flux == pytest.approx(p.v, rel=1e-12)
                exit_ = rng.choice(system.channels).channel_id
                pieces = ph.asy_out_amplitude(system, exit_, band, k)
                in_flux = ph.flux(system, pieces, ph.Region.INPUT, band)
                assert in_flux == pytest.approx(p.v, rel=1e-12)

    def test_phantom_cannot_drive(self):
        system = sample_system()
        with pytest.raises(ValueError):
            ph.asy_in_amplitude(system, "P", Band.PUMP,
                                system.bands[Band.PUMP].k_ref)


class TestVacuumPower:
    def test_reference_value(self):
        system = sample_system()
        omega = system.bands[Band.PUMP].omega
        gbar = system.gamma_bar(Band.SIGNAL)
        p_vac = ph.vacuum_power(gbar, gbar, omega, omega)
        assert p_vac == pytest.approx(1.946811576430854e-09, rel=1e-12)
        assert p_vac == pytest.approx(1.9e-9, rel=0.03)

    def test_detuning_suppression(self):
        p0 = ph.vacuum_power(1e10, 1e10, 1.2e15, 1.2e15, detuning=0.0)
        p_far = ph.vacuum_power(1e10, 1e10, 1.2e15, 1.2e15, detuning=1e14)
        assert p_far < 1e-7 * p0

    def test_symmetric_reduction(self):
        gbar, omega = 7.3e10, 1.215e15
        p_vac = ph.vacuum_power(gbar, gbar, omega, omega)
        assert p_vac == pytest.approx(HBAR * omega * gbar / 4.0, rel=1e-12)


class TestClosedFormRate:
    def test_reference_rate(self):
        system = sample_system()
        rate = ph.pair_rate_cw(system, CwPump(1e-3), "O", "O")
        assert rate == pytest.approx(282269.29568073363, rel=1e-12)

    def test_lossless_ring_keeps_all_pairs(self):
        ring = RingSpec(radius=1e-5, loss_db_per_cm=0.0, gamma_nl=100.0)
        bands = shared_bands(1550e-9, V, 2.4, ring.circumference)
        channels = (ChannelCoupling("O", uniform_gammas(3e10)),
                    ChannelCoupling("P", uniform_gammas(0.0), ChannelKind.PHANTOM))
        system = SystemSpec(ring=ring, bands=bands, channels=channels,
                            pump_input_channel="O")
        pump = CwPump(1e-3)
        assert ph.pair_rate_cw(system, pump, "O", "P") == 0.0
        assert ph.pair_rate_cw(system, pump, "P", "O") == 0.0
        assert ph.pair_rate_cw(system, pump, "P", "P") == 0.0
        assert ph.pair_rate_cw(system, pump, "O", "O") > 0.0

    def test_all_rates_equal_at_critical_coupling(self):
        matrix = ph.rate_matrix(sample_system(eta=0.5), CwPump(1e-3))
        rates = list(matrix.rates.values())
        for r in rates[1:]:
            assert r == pytest.approx(rates[0], rel=1e-12)

    def test_linewidth_scaling_at_fixed_eta(self):
        # all linewidths doubled at fixed escape efficiency: rate falls 8x
        r1 = ph.pair_rate_cw(sample_system(q_int=2e4), CwPump(1e-3), "O", "O")
        r2 = ph.pair_rate_cw(sample_system(q_int=1e4), CwPump(1e-3), "O", "O")
        assert r2 == pytest.approx(r1 / 8.0, rel=1e-12)


class TestRateRatios:
    def test_broken_pair_ratio(self):
        matrix = ph.rate_matrix(sample_system(eta=0.6), CwPump(1e-3))
        assert ph.rate_ratio(matrix, "O", "P", "O", "O") == pytest.approx(
            (1.0 - 0.6) / 0.6, rel=1e-12)

    def test_double_loss_ratio(self):
        eta = 0.6
        matrix = ph.rate_matrix(sample_system(eta=eta), CwPump(1e-3))
        expected = ((1.0 - eta) / eta) ** 2
        assert ph.rate_ratio(matrix, "P", "P", "O", "O") == pytest.approx(
            expected, rel=1e-12)

    def test_ratios_match_escape_efficiencies(self):
        rng = random.Random(7)
        system = random_system(rng, 2)
        matrix = ph.rate_matrix(system, CwPump(2e-3))
        eta_s = matrix.eta[Band.SIGNAL]
        eta_i = matrix.eta[Band.IDLER]
        ids = matrix.channel_ids
        ref = (ids[0], ids[0])
        for x in ids:
            for y in ids:
                expected = (eta_s[x] * eta_i[y]) / (eta_s[ref[0]] * eta_i[ref[1]])
                assert ph.rate_ratio(matrix, x, y, *ref) == pytest.approx(
                    expected, rel=1e-12)

    def test_zero_reference_rejected(self):
        system = sample_system()
        zeroed = system.with_channel_gamma("O", uniform_gammas(0.0))
        # no bus coupling: everything decays via the phantom channel
        matrix = ph.rate_matrix(zeroed, CwPump(1e-3))
        with pytest.raises(ZeroDivisionError):
            ph.rate_ratio(matrix, "P", "P", "O", "O")


class TestGoldenRuleOracle:
    def test_matches_closed_form_on_reference(self):
        system = sample_system()
        pump = CwPump(1e-3)
        closed = ph.pair_rate_cw(system, pump, "O", "O")
        oracle = ph.fgr_rate_oracle(system, pump, "O", "O")
        assert abs(oracle - closed) / closed < 1e-6

    def test_matches_with_detuned_pump(self):
        system = sample_system(eta=0.62)
        pump = CwPump(1e-3, detuning=1.7 * system.gamma_bar(Band.PUMP))
        closed = ph.pair_rate_cw(system, pump, "O", "P")
        oracle = ph.fgr_rate_oracle(system, pump, "O", "P")
        assert abs(oracle - closed) / closed < 1e-6

    def test_zero_nonlinearity(self):
        system = sample_system()
        system = SystemSpec(
            ring=RingSpec(radius=system.ring.radius, loss_db_per_cm=26.0, gamma_nl=0.0),
            bands=system.bands, channels=system.channels, pump_input_channel="O")
        assert ph.fgr_rate_oracle(system, CwPump(1e-3), "O", "O") == 0.0

    @pytest.mark.parametrize("seed", [11, 12, 13])
    def test_matches_on_random_systems(self, seed):
        rng = random.Random(seed)
        system = random_system(rng, rng.randint(1, 3))
        pump = CwPump(rng.uniform(1e-4, 5e-3),
                      detuning=rng.uniform(-2.0, 2.0) * system.gamma_bar(Band.PUMP))
        ids = system.channel_ids
        x, y = rng.choice(ids), rng.choice(ids)
        closed = ph.pair_rate_cw(system, pump, x, y)
        oracle = ph.fgr_rate_oracle(system, pump, x, y)
        assert abs(oracle - closed) / closed < 1e-6
