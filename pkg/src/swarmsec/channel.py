"""Elevation-dependent air-to-ground path loss and small-scale fading draws.

Large-scale loss follows the sigmoid line-of-sight-probability model: the
LoS/NLoS excess losses are blended by the elevation angle, on top of free-space
attenuation. Small-scale fading is unit-variance circularly-symmetric complex
Gaussian, drawn from seeded substreams so every experiment is replayable.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .geometry import Position3D, SlotGeometry, distance, elevation_angle_deg

LIGHT_SPEED_M_S = 3.0e8


@dataclass(frozen=True)
class EnvironmentParams:
    """Propagation constants of one deployment environment."""

    eta_los_db: float
    eta_nlos_db: float
    a: float = 5.0188
    b: float = 0.3511
    carrier_freq_hz: float = 2.4e9
    light_speed_m_s: float = LIGHT_SPEED_M_S

    def __post_init__(self):
        for name in ("a", "b", "carrier_freq_hz", "light_speed_m_s"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {v}")
        for name in ("eta_los_db", "eta_nlos_db"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


ENVIRONMENT_PRESETS = {
    "suburban": EnvironmentParams(eta_los_db=0.1, eta_nlos_db=21.0),
    "urban": EnvironmentParams(eta_los_db=1.0, eta_nlos_db=20.0),
    "dense-urban": EnvironmentParams(eta_los_db=1.6, eta_nlos_db=23.0),
    "highrise-urban": EnvironmentParams(eta_los_db=2.3, eta_nlos_db=34.0),
}


def environment_preset(name: str) -> EnvironmentParams:
    """Look up a named preset; raises ValueError on unknown names."""
    try:
        return ENVIRONMENT_PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown environment {name!r}; choose one of {sorted(ENVIRONMENT_PRESETS)}"
        ) from None


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0.0:
        raise ValueError(f"power must be positive, got {watts}")
    return 10.0 * math.log10(watts) + 30.0


def path_loss_db(env: EnvironmentParams, uav: Position3D, ground: Position3D) -> float:
    """Air-to-ground path loss in dB between one transmitter and one ground node."""
    d = distance(uav, ground)
    rho = elevation_angle_deg(uav, ground)
    excess_span = env.eta_los_db - env.eta_nlos_db
    blended = excess_span / (1.0 + env.a * math.exp(-env.b * (rho - env.a)))
    free_space = 20.0 * math.log10(d) + 20.0 * math.log10(
        4.0 * math.pi * env.carrier_freq_hz / env.light_speed_m_s)
    return blended + free_space + env.eta_nlos_db


def power_loss_linear(env: EnvironmentParams, uav: Position3D, ground: Position3D) -> float:
    """Absolute power attenuation factor, 10**(path_loss_db / 10)."""
    return 10.0 ** (path_loss_db(env, uav, ground) / 10.0)


@dataclass(frozen=True)
class LossVector:
    """Per-transmitter linear power losses toward one receiver."""

    q: np.ndarray
    receiver_antennas: int

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.ndim != 1 or q.size == 0:
            raise ValueError("losses must form a non-empty 1-D vector")
        if not np.all(np.isfinite(q)) or np.any(q <= 0.0):
            raise ValueError("losses must be positive and finite")
        object.__setattr__(self, "q", q)
        if int(self.receiver_antennas) < 1:
            raise ValueError("receiver needs at least one antenna")

    def __len__(self) -> int:
        return self.q.size


def loss_vector(env: EnvironmentParams, slot: SlotGeometry, receiver: str,
                n_antennas: int) -> LossVector:
    """Linear losses from every swarm member to the slot's chosen receiver."""
    if receiver == "bob":
        target = slot.bob_position
    elif receiver == "eve":
        target = slot.eve_position
    else:
        raise ValueError(f"receiver must be 'bob' or 'eve', got {receiver!r}")
    q = np.array([power_loss_linear(env, uav, target) for uav in slot.uav_positions])
    return LossVector(q=q, receiver_antennas=n_antennas)


def _entropy_word(part) -> int:
    """Map one key part (int or str) to a stable 64-bit entropy word."""
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFFFFFFFFFF
    if isinstance(part, str):
        return int.from_bytes(hashlib.sha256(part.encode()).digest()[:8], "big")
    raise TypeError(f"substream key parts must be int or str, got {type(part).__name__}")


def substream(seed: int, *key) -> np.random.Generator:
    """Independent generator derived from a base seed and a key path.

    The same (seed, key) always yields the same stream; distinct keys give
    statistically independent streams. Keys mix ints and short strings, e.g.
    ``substream(7, "uav", slot, member)``.
    """
    words = [_entropy_word(seed)] + [_entropy_word(k) for k in key]
    return np.random.default_rng(np.random.SeedSequence(words))


def derive_seed(seed: int, *key) -> int:
    """Collapse (seed, key) to a plain integer seed for child scenarios."""
    words = [_entropy_word(seed)] + [_entropy_word(k) for k in key]
    return int(np.random.SeedSequence(words).generate_state(1, np.uint64)[0])


def sample_small_scale(rng: np.random.Generator, n_antennas: int, n_tx: int,
                       samples: int | None = None) -> np.ndarray:
    """Unit-variance circularly-symmetric complex Gaussian fading matrices.

    Returns shape (n_antennas, n_tx), or (samples, n_antennas, n_tx) when a
    batch size is given. Real and imaginary parts each carry variance 1/2.
    """
    if n_antennas < 1 or n_tx < 1:
        raise ValueError("matrix dimensions must be positive")
    shape = (n_antennas, n_tx) if samples is None else (int(samples), n_antennas, n_tx)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return math.sqrt(0.5) * (re + 1j * im)
