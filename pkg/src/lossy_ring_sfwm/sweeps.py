"""Parameter studies: coupling sweeps, strategy comparison, add-drop grids.

Every sweep point is evaluated independently (optionally on a thread
pool); results are aggregated in axis order so output is identical for
any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import attenuation, phantom
from .model import (Band, ChannelKind, CwPump, SystemSpec, finesse,
                    gamma_from_sigma, uniform_gammas)


@dataclass(frozen=True)
class SweepResult:
    axes: Mapping[str, np.ndarray]
    values: Mapping[str, np.ndarray]
    metadata: Mapping[str, object]

    def __post_init__(self):
        for name, ax in self.axes.items():
            d = np.diff(ax)
            if not (np.all(d > 0) or np.all(d < 0)):
                raise ValueError(f"axis {name!r} must be strictly monotone")


def _map_points(func: Callable, items: Sequence, workers: int = 1) -> list:
    if workers <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def quadratic_argmax(x: np.ndarray, y: np.ndarray, *, log_axis: bool = False) -> float:
    """Axis location of the maximum, refined by a parabola through the best
    grid point and its neighbours. Falls back to the grid point on edges."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i = int(np.argmax(y))
    if i == 0 or i == len(y) - 1:
        return float(x[i])
    u = np.log(x) if log_axis else x
    denom = y[i - 1] - 2.0 * y[i] + y[i + 1]
    if denom >= 0.0:
        return float(x[i])
    offset = 0.5 * (y[i - 1] - y[i + 1]) / denom
    u_star = u[i] + offset * (u[i + 1] - u[i - 1]) / 2.0
    return float(np.exp(u_star)) if log_axis else float(u_star)


def quadratic_argmax_2d(x: np.ndarray, y: np.ndarray, grid: np.ndarray,
                        *, log_axes: bool = False) -> tuple[float, float]:
    """Location of a 2-D grid maximum, refined by a least-squares quadratic
    surface through the 3 x 3 neighbourhood of the best point (a separable
    per-axis parabola is biased when the surface's axes are coupled)."""
    grid = np.asarray(grid, dtype=float)
    i, j = np.unravel_index(int(np.argmax(grid)), grid.shape)
    if i in (0, grid.shape[0] - 1) or j in (0, grid.shape[1] - 1):
        return float(x[i]), float(y[j])
    u = np.log(x) if log_axes else np.asarray(x, dtype=float)
    v = np.log(y) if log_axes else np.asarray(y, dtype=float)
    uu, vv = np.meshgrid(u[i - 1:i + 2] - u[i], v[j - 1:j + 2] - v[j], indexing="ij")
    z = grid[i - 1:i + 2, j - 1:j + 2].ravel()
    a = np.column_stack([np.ones(9), uu.ravel(), vv.ravel(), uu.ravel() ** 2,
                         (uu * vv).ravel(), vv.ravel() ** 2])
    c = np.linalg.lstsq(a, z, rcond=None)[0]
    hess = np.array([[2.0 * c[3], c[4]], [c[4], 2.0 * c[5]]])
    if np.linalg.det(hess) <= 0.0 or hess[0, 0] >= 0.0:
        return float(x[i]), float(y[j])
    du, dv = np.linalg.solve(hess, [-c[1], -c[2]])
    u_star, v_star = u[i] + du, v[j] + dv
    if log_axes:
        return float(np.exp(u_star)), float(np.exp(v_star))
    return float(u_star), float(v_star)


def _rescaled_coupling_system(system: SystemSpec, scale: float) -> SystemSpec:
    """All channel decay rates and the ring loss scaled by one factor,
    leaving escape efficiencies (and the resonance structure) unchanged."""
    ring = replace(system.ring, loss_db_per_cm=system.ring.loss_db_per_cm * scale)
    channels = tuple(replace(c, gammas={b: g * scale for b, g in c.gammas.items()})
                     for c in system.channels)
    return replace(system, ring=ring, channels=channels)


def _single_bus(system: SystemSpec) -> str:
    phys = system.physical_channels
    if len(phys) != 1 or system.phantom_channel is None:
        raise ValueError("sweep needs a single bus waveguide plus the phantom channel")
    return phys[0].channel_id


def sweep_sigma(system: SystemSpec, sigma_values: Iterable[float], pump: CwPump,
                *, workers: int = 1, window_linewidths: float = 40.0,
                rel_tol: float = 1e-6) -> SweepResult:
    """Attenuation-model pair rate versus the bus self-coupling, at fixed
    ring loss."""
    bus = _single_bus(system)
    sigmas = np.asarray(list(sigma_values), dtype=float)
    L = system.ring.circumference

    def rate_at(sigma: float) -> float:
        gammas = {b: gamma_from_sigma(sigma, system.bands[b].v, L) for b in Band}
        sys_s = system.with_channel_gamma(bus, gammas)
        return attenuation.pair_rate_cw(sys_s, pump,
                                        window_linewidths=window_linewidths,
                                        rel_tol=rel_tol)

    rates = np.array(_map_points(rate_at, sigmas, workers))
    return SweepResult(
        axes={"sigma": sigmas},
        values={"rate": rates},
        metadata={
            "argmax_sigma": quadratic_argmax(sigmas, rates),
            "sigma_critical": system.ring.roundtrip_amplitude,
        })


def sweep_eta(system: SystemSpec, eta_values: Iterable[float], pump: CwPump,
              *, workers: int = 1) -> SweepResult:
    """Phantom-model rates of all four channel-pair trajectories versus the
    bus escape efficiency, at fixed ring loss."""
    bus = _single_bus(system)
    ph = system.phantom_channel.channel_id
    etas = np.asarray(list(eta_values), dtype=float)
    if np.any((etas <= 0) | (etas >= 1)):
        raise ValueError("escape efficiency must lie strictly inside (0, 1)")
    g_ph = system.phantom_channel.gammas

    def matrix_at(eta: float) -> phantom.RateMatrix:
        gammas = {b: eta * g_ph[b] / (1.0 - eta) for b in Band}
        return phantom.rate_matrix(system.with_channel_gamma(bus, gammas), pump)

    matrices = _map_points(matrix_at, etas, workers)
    pairs = [(bus, bus), (bus, ph), (ph, bus), (ph, ph)]
    values = {f"R_{x}{y}": np.array([m.rate(x, y) for m in matrices])
              for x, y in pairs}
    return SweepResult(
        axes={"eta": etas},
        values=values,
        metadata={"argmax_eta": quadratic_argmax(etas, values[f"R_{bus}{bus}"])})


def compare_finesse(system: SystemSpec, finesse_values: Iterable[float], pump: CwPump,
                    *, workers: int = 1, window_linewidths: float = 40.0,
                    rel_tol: float = 1e-6) -> SweepResult:
    """Single-bus pair rate from both loss models versus resonator finesse.

    Finesse is varied by scaling all couplings and the loss together, so
    the escape efficiency stays fixed while the linewidth shrinks."""
    bus = _single_bus(system)
    fins = np.asarray(list(finesse_values), dtype=float)
    f0 = finesse(system)

    def rates_at(f: float) -> tuple[float, float]:
        sys_f = _rescaled_coupling_system(system, f0 / f)
        r1 = attenuation.pair_rate_cw(sys_f, pump,
                                      window_linewidths=window_linewidths,
                                      rel_tol=rel_tol)
        r2 = phantom.pair_rate_cw(sys_f, pump, bus, bus)
        return r1, r2

    both = _map_points(rates_at, fins, workers)
    r_att = np.array([r[0] for r in both])
    r_pha = np.array([r[1] for r in both])
    rel = np.abs(r_att - r_pha) / r_pha
    return SweepResult(
        axes={"finesse": fins},
        values={"rate_attenuation": r_att, "rate_phantom": r_pha,
                "rel_difference": rel},
        metadata={"max_rel_difference": float(rel.max()),
                  "final_rel_difference": float(rel[np.argmax(fins)])})


def compare_finesse_add_drop(system: SystemSpec, sigma2_values: Iterable[float],
                             pump: CwPump, *, workers: int = 1,
                             window_linewidths: float = 40.0,
                             rel_tol: float = 1e-6) -> SweepResult:
    """Add-drop through-pair rate from both loss models, scanned over the
    add/drop self-coupling (which sets the finesse)."""
    phys = system.physical_channels
    if len(phys) != 2 or system.phantom_channel is None:
        raise ValueError("add-drop comparison needs two bus waveguides plus the phantom")
    through = system.pump_input_channel
    drop = next(c.channel_id for c in phys if c.channel_id != through)
    sigmas = np.asarray(list(sigma2_values), dtype=float)
    L = system.ring.circumference

    def rates_at(sigma2: float) -> tuple[float, float, float]:
        gammas = {b: gamma_from_sigma(sigma2, system.bands[b].v, L) for b in Band}
        sys_s = system.with_channel_gamma(drop, gammas)
        r1 = attenuation.pair_rate_cw_add_drop(sys_s, pump, through, through,
                                               window_linewidths=window_linewidths,
                                               rel_tol=rel_tol)
        r2 = phantom.pair_rate_cw(sys_s, pump, through, through)
        return finesse(sys_s), r1, r2

    rows = _map_points(rates_at, sigmas, workers)
    fins = np.array([r[0] for r in rows])
    r_att = np.array([r[1] for r in rows])
    r_pha = np.array([r[2] for r in rows])
    rel = np.abs(r_att - r_pha) / r_pha
    return SweepResult(
        axes={"sigma2": sigmas},
        values={"finesse": fins, "rate_attenuation": r_att, "rate_phantom": r_pha,
                "rel_difference": rel},
        metadata={"sigma1": system.sigma_view(through, Band.PUMP)})


def add_drop_grid(system: SystemSpec, gamma_t_ratios: Iterable[float],
                  gamma_d_ratios: Iterable[float], pump: CwPump,
                  *, workers: int = 1) -> SweepResult:
    """Phantom-model rate of every channel-pair trajectory on a grid of
    through and drop couplings, in units of the phantom decay rate."""
    phys = system.physical_channels
    if len(phys) != 2 or system.phantom_channel is None:
        raise ValueError("add-drop grid needs two bus waveguides plus the phantom")
    through = system.pump_input_channel
    drop = next(c.channel_id for c in phys if c.channel_id != through)
    ph = system.phantom_channel.channel_id
    g_ph = system.phantom_channel.gammas
    t_ratios = np.asarray(list(gamma_t_ratios), dtype=float)
    d_ratios = np.asarray(list(gamma_d_ratios), dtype=float)
    if np.any(t_ratios <= 0) or np.any(d_ratios <= 0):
        raise ValueError("coupling ratios must be positive")
    ids = (through, drop, ph)

    def matrices_for_t(t: float) -> list[phantom.RateMatrix]:
        sys_t = system.with_channel_gamma(through, {b: t * g for b, g in g_ph.items()})
        out = []
        for d in d_ratios:
            sys_td = sys_t.with_channel_gamma(drop, {b: d * g for b, g in g_ph.items()})
            out.append(phantom.rate_matrix(sys_td, pump))
        return out

    rows = _map_points(matrices_for_t, t_ratios, workers)
    values = {}
    for x in ids:
        for y in ids:
            values[f"R_{x}{y}"] = np.array([[m.rate(x, y) for m in row] for row in rows])

    log_spaced = _looks_log_spaced(t_ratios) and _looks_log_spaced(d_ratios)
    argmax = {key: quadratic_argmax_2d(t_ratios, d_ratios, grid, log_axes=log_spaced)
              for key, grid in values.items()}
    return SweepResult(
        axes={"gamma_t_ratio": t_ratios, "gamma_d_ratio": d_ratios},
        values=values,
        metadata={"argmax": argmax, "channel_ids": ids})


def _looks_log_spaced(x: np.ndarray) -> bool:
    if len(x) < 3 or np.any(x <= 0):
        return False
    r = np.diff(np.log(x))
    return bool(np.allclose(r, r[0], rtol=1e-6, atol=0.0))


def default_log_ratio_axis(n: int = 81, lo: float = 0.05, hi: float = 5.0) -> np.ndarray:
    """Log-spaced coupling-ratio axis resolving the flat add-drop optimum."""
    return np.logspace(math.log10(lo), math.log10(hi), n)
