"""Run configuration: JSON ingestion, validation, and normalization.

Boundary units are declarative (wavelengths in nm, loss in dB/cm, power
in mW, durations in ps, lengths in m); everything behind parse_config is
SI. Channel couplings may be given in any one representation (sigma,
Gamma, Q, eta, or from_loss for the phantom); they are normalized to
decay rates internally and echoed back as derived quantities.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace
from typing import Any, Mapping

from .model import (Band, BandParams, ChannelCoupling, ChannelKind, CwPump,
                    PulsedPump, RingSpec, SystemSpec, band_from_wavelength,
                    finesse, gamma_from_sigma, q_and_eta)

_BAND_KEYS = {"pump": Band.PUMP, "signal": Band.SIGNAL, "idler": Band.IDLER}
_COUPLING_KEYS = ("sigma", "gamma_rad_per_s", "q_factor", "eta", "from_loss")


class ConfigError(ValueError):
    """Invalid run configuration; the message carries the field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _require(d: Mapping, key: str, path: str) -> Any:
    if key not in d:
        raise ConfigError(f"{path}.{key}", "missing required field")
    return d[key]


def _number(d: Mapping, key: str, path: str, *, default=None,
            minimum=None, positive=False) -> float:
    if key not in d:
        if default is None:
            raise ConfigError(f"{path}.{key}", "missing required field")
        return float(default)
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {v!r}")
    v = float(v)
    if positive and v <= 0:
        raise ConfigError(f"{path}.{key}", f"must be positive, got {v}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{path}.{key}", f"must be >= {minimum}, got {v}")
    return v


def _check_keys(d: Mapping, allowed: set[str], path: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(path, f"unknown fields {sorted(unknown)}")


@dataclass(frozen=True)
class RunConfig:
    system: SystemSpec
    pump: CwPump | PulsedPump
    strategy: str  # attenuation | phantom | both
    options: Mapping[str, Any]  # per-command blocks, normalized
    normalized: Mapping[str, Any]  # canonical dict for hashing / round-trips

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.normalized, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _parse_band_block(block: Mapping, path: str, defaults: Mapping | None = None):
    base = dict(defaults or {})
    _check_keys(block, {"wavelength_nm", "effective_index", "group_velocity_m_per_s",
                        "group_index"}, path)
    base.update(block)
    wavelength = _number(base, "wavelength_nm", path, positive=True) * 1e-9
    n_eff = _number(base, "effective_index", path, positive=True)
    if "group_velocity_m_per_s" in base and "group_index" in base:
        raise ConfigError(path, "give either group_velocity_m_per_s or group_index")
    if "group_index" in base:
        from .constants import C_VACUUM
        v = C_VACUUM / _number(base, "group_index", path, positive=True)
    else:
        v = _number(base, "group_velocity_m_per_s", path, positive=True)
    return wavelength, v, n_eff, base


def _parse_bands(block: Mapping, ring: RingSpec, path: str) -> dict[Band, BandParams]:
    shared_keys = {k: v for k, v in block.items() if k not in _BAND_KEYS}
    bands: dict[Band, BandParams] = {}
    for name, band in _BAND_KEYS.items():
        sub = block.get(name, {})
        if not isinstance(sub, Mapping):
            raise ConfigError(f"{path}.{name}", "expected an object")
        wavelength, v, n_eff, _ = _parse_band_block(sub, f"{path}.{name}", shared_keys)
        bands[band] = band_from_wavelength(band, wavelength, v, n_eff,
                                           ring.circumference)
    return bands


def _parse_channels(entries, ring: RingSpec, bands: Mapping[Band, BandParams],
                    path: str) -> tuple[ChannelCoupling, ...]:
    if not isinstance(entries, list) or not entries:
        raise ConfigError(path, "expected a non-empty list of channels")
    parsed = []
    for i, entry in enumerate(entries):
        epath = f"{path}[{i}]"
        if not isinstance(entry, Mapping):
            raise ConfigError(epath, "expected an object")
        _check_keys(entry, {"id", "kind", "coupling"}, epath)
        cid = _require(entry, "id", epath)
        if not isinstance(cid, str) or not cid:
            raise ConfigError(f"{epath}.id", "expected a non-empty string")
        kind_str = entry.get("kind", "physical")
        try:
            kind = ChannelKind(kind_str)
        except ValueError:
            raise ConfigError(f"{epath}.kind",
                              f"expected 'physical' or 'phantom', got {kind_str!r}")
        coupling = _require(entry, "coupling", epath)
        if not isinstance(coupling, Mapping):
            raise ConfigError(f"{epath}.coupling", "expected an object")
        given = [k for k in _COUPLING_KEYS if k in coupling]
        unknown = set(coupling) - set(_COUPLING_KEYS)
        if unknown:
            raise ConfigError(f"{epath}.coupling", f"unknown fields {sorted(unknown)}")
        if len(given) == 0:
            raise ConfigError(f"{epath}.coupling",
                              f"give one of {list(_COUPLING_KEYS)}")
        if len(given) > 1:
            raise ConfigError(f"{epath}.coupling",
                              f"over-specified coupling: got {given}, give exactly one")
        parsed.append((cid, kind, given[0], coupling[given[0]], epath))

    # absolute representations first, escape efficiencies afterwards
    gammas: dict[str, dict[Band, float]] = {}
    eta_requests = []
    for cid, kind, rep, value, epath in parsed:
        cpath = f"{epath}.coupling.{rep}"
        if rep == "sigma":
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(cpath, f"expected a number, got {value!r}")
            gammas[cid] = {b: gamma_from_sigma(float(value), bands[b].v,
                                               ring.circumference) for b in Band}
        elif rep == "gamma_rad_per_s":
            if not isinstance(value, (int, float)) or isinstance(value, bool) or value < 0:
                raise ConfigError(cpath, f"expected a non-negative number, got {value!r}")
            gammas[cid] = {b: float(value) for b in Band}
        elif rep == "q_factor":
            if not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
                raise ConfigError(cpath, f"expected a positive number, got {value!r}")
            gammas[cid] = {b: bands[b].omega / (2.0 * float(value)) for b in Band}
        elif rep == "from_loss":
            if value is not True:
                raise ConfigError(cpath, "from_loss must be true when present")
            if kind is not ChannelKind.PHANTOM:
                raise ConfigError(cpath, "from_loss is reserved for the phantom channel")
            gammas[cid] = {b: ring.xi * bands[b].v / 2.0 for b in Band}
        else:  # eta
            if not isinstance(value, (int, float)) or isinstance(value, bool) \
                    or not 0 < value < 1:
                raise ConfigError(cpath, f"expected a number in (0, 1), got {value!r}")
            eta_requests.append((cid, float(value), cpath))

    if eta_requests:
        eta_sum = sum(e for _, e, _ in eta_requests)
        if eta_sum >= 1.0:
            raise ConfigError(path, f"escape efficiencies sum to {eta_sum}, need < 1")
        if not gammas:
            raise ConfigError(path, "at least one channel needs an absolute coupling "
                                    "(sigma, gamma, Q, or from_loss) to anchor eta values")
        anchored = list(gammas.values())
        for b in Band:
            gbar = sum(g[b] for g in anchored) / (1.0 - eta_sum)
            for cid, eta, _ in eta_requests:
                gammas.setdefault(cid, {})[b] = eta * gbar

    return tuple(ChannelCoupling(cid, gammas[cid], kind)
                 for cid, kind, _, _, _ in parsed)


def _parse_pump(block: Mapping, path: str) -> CwPump | PulsedPump:
    if not isinstance(block, Mapping):
        raise ConfigError(path, "expected an object")
    kind = block.get("kind", "cw")
    if kind == "cw":
        _check_keys(block, {"kind", "power_mw", "detuning_rad_per_s"}, path)
        return CwPump(power=_number(block, "power_mw", path, positive=True) * 1e-3,
                      detuning=_number(block, "detuning_rad_per_s", path, default=0.0))
    if kind == "pulsed":
        _check_keys(block, {"kind", "duration_fwhm_ps", "alpha", "detuning_rad_per_s"},
                    path)
        return PulsedPump(
            duration_fwhm=_number(block, "duration_fwhm_ps", path, positive=True) * 1e-12,
            alpha=_number(block, "alpha", path, default=1.0, positive=True),
            detuning=_number(block, "detuning_rad_per_s", path, default=0.0))
    raise ConfigError(f"{path}.kind", f"expected 'cw' or 'pulsed', got {kind!r}")


def parse_config(source: str | Mapping) -> RunConfig:
    """Parse a JSON document (text or already-decoded mapping)."""
    if isinstance(source, str):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as e:
            raise ConfigError("$", f"invalid JSON: {e}") from e
    else:
        doc = source
    if not isinstance(doc, Mapping):
        raise ConfigError("$", "top level must be an object")
    _check_keys(doc, {"system", "pump", "strategy", "options"}, "$")

    sys_block = _require(doc, "system", "$")
    if not isinstance(sys_block, Mapping):
        raise ConfigError("system", "expected an object")
    _check_keys(sys_block, {"ring", "bands", "channels", "pump_input_channel"}, "system")

    ring_block = _require(sys_block, "ring", "system")
    _check_keys(ring_block, {"radius_m", "loss_db_per_cm", "gamma_nl_per_w_m",
                             "delta_kappa_per_m"}, "system.ring")
    ring = RingSpec(
        radius=_number(ring_block, "radius_m", "system.ring", positive=True),
        loss_db_per_cm=_number(ring_block, "loss_db_per_cm", "system.ring", minimum=0.0),
        gamma_nl=_number(ring_block, "gamma_nl_per_w_m", "system.ring", minimum=0.0),
        delta_kappa=_number(ring_block, "delta_kappa_per_m", "system.ring", default=0.0),
    )
    bands = _parse_bands(_require(sys_block, "bands", "system"), ring, "system.bands")
    channels = _parse_channels(_require(sys_block, "channels", "system"), ring, bands,
                               "system.channels")
    pump_in = _require(sys_block, "pump_input_channel", "system")
    try:
        system = SystemSpec(ring=ring, bands=bands, channels=channels,
                            pump_input_channel=pump_in)
    except (ValueError, KeyError) as e:
        raise ConfigError("system", str(e)) from e

    pump = _parse_pump(doc.get("pump", {"kind": "cw", "power_mw": 1.0}), "pump")
    strategy = doc.get("strategy", "both")
    if strategy not in ("attenuation", "phantom", "both"):
        raise ConfigError("strategy",
                          f"expected attenuation, phantom, or both, got {strategy!r}")
    options = doc.get("options", {})
    if not isinstance(options, Mapping):
        raise ConfigError("options", "expected an object")

    normalized = _normalize(doc)
    return RunConfig(system=system, pump=pump, strategy=strategy,
                     options=options, normalized=normalized)


def _normalize(doc: Mapping) -> dict:
    """Canonical plain-dict form of the configuration document."""
    return json.loads(json.dumps(doc, sort_keys=True))


def serialize_config(config: RunConfig) -> str:
    """Canonical JSON text whose parse equals this configuration."""
    return json.dumps(config.normalized, sort_keys=True, indent=2)


def derived_echo(config: RunConfig) -> dict:
    """Derived quantities echoed into run metadata."""
    system = config.system
    ring = system.ring
    pump_band = system.bands[Band.PUMP]
    echo: dict[str, Any] = {
        "xi_per_m": ring.xi,
        "roundtrip_amplitude": ring.roundtrip_amplitude,
        "q_intrinsic": (pump_band.omega / (ring.xi * pump_band.v)
                        if ring.xi > 0 else math.inf),
        "finesse": finesse(system),
    }
    for name, band in _BAND_KEYS.items():
        qe = q_and_eta(system, band)
        echo[f"q_load_{name}"] = qe.q_load
        echo[f"gamma_bar_{name}_rad_per_s"] = system.gamma_bar(band)
    qe = q_and_eta(system, Band.PUMP)
    for c in system.channels:
        echo[f"eta_{c.channel_id}"] = qe.eta[c.channel_id]
        g = c.gamma(Band.PUMP)
        echo[f"gamma_{c.channel_id}_rad_per_s"] = g
        try:
            echo[f"sigma_{c.channel_id}"] = system.sigma_view(c.channel_id, Band.PUMP)
        except ValueError:
            pass  # outside the point-coupling regime; no sigma view
    return _jsonable(echo)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    return obj
