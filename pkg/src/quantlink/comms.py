"""Constellations, Rayleigh channels, noise calibration, and the transmit path."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quantization import QuantizerSpec, quantize_complex_vector

__all__ = [
    "Constellation",
    "LinkScenario",
    "make_constellation",
    "rayleigh_channel",
    "noise_variance_from_ebn0",
    "statistical_gain",
    "transmit",
    "draw_symbols",
    "hard_decide",
]

CONSTELLATION_NAMES = ("qpsk", "psk8", "qam16", "qam64")


@dataclass(frozen=True)
class Constellation:
    """Unit-energy alphabet with a Gray bit map.

    ``points[i]`` is the symbol for the bit pattern with integer value i
    (MSB first); ``bit_patterns[i]`` spells that pattern out.
    """

    name: str
    points: np.ndarray
    bits_per_symbol: int
    bit_patterns: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=complex)
        if abs(float(np.mean(np.abs(pts) ** 2)) - 1.0) > 1e-12:
            raise ValueError("constellation must have unit average energy")
        if abs(complex(np.mean(pts))) > 1e-12:
            raise ValueError("constellation must have zero mean")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def order(self) -> int:
        return len(self.points)


def _gray_positions(nbits: int) -> np.ndarray:
    """positions[code] = rank of Gray code ``code`` along the level axis."""
    size = 1 << nbits
    positions = np.empty(size, dtype=int)
    for pos in range(size):
        positions[pos ^ (pos >> 1)] = pos
    return positions


def _pam_levels(nbits: int) -> np.ndarray:
    size = 1 << nbits
    return 2.0 * np.arange(size) - (size - 1)


def _bit_matrix(order: int, nbits: int) -> np.ndarray:
    idx = np.arange(order)
    return ((idx[:, None] >> np.arange(nbits - 1, -1, -1)[None, :]) & 1).astype(np.uint8)


def make_constellation(name: str) -> Constellation:
    """Gray-mapped unit-energy alphabet: qpsk, psk8, qam16, or qam64."""
    key = name.strip().lower()
    if key not in CONSTELLATION_NAMES:
        raise ValueError(f"unsupported constellation {name!r}; pick one of {CONSTELLATION_NAMES}")

    if key in ("qpsk", "qam16", "qam64"):
        half = {"qpsk": 1, "qam16": 2, "qam64": 3}[key]
        pos = _gray_positions(half)
        levels = _pam_levels(half)
        size = 1 << (2 * half)
        points = np.empty(size, dtype=complex)
        for i in range(size):
            code_i, code_q = i >> half, i & ((1 << half) - 1)
            points[i] = levels[pos[code_i]] + 1j * levels[pos[code_q]]
        points /= math.sqrt(float(np.mean(np.abs(points) ** 2)))
        nbits = 2 * half
    else:  # psk8: Gray codes around the unit circle
        nbits = 3
        pos = _gray_positions(nbits)
        points = np.exp(2j * math.pi * pos / 8.0)

    return Constellation(
        name=key,
        points=points,
        bits_per_symbol=nbits,
        bit_patterns=_bit_matrix(len(points), nbits),
    )


@dataclass(frozen=True)
class LinkScenario:
    """One uplink configuration: channel, noise level, quantizer, alphabet."""

    n_tx: int
    n_rx: int
    h: np.ndarray
    n0: float
    quantizer: QuantizerSpec
    constellation: Constellation

    def __post_init__(self) -> None:
        if not self.n_rx >= self.n_tx >= 1:
            raise ValueError("need n_rx >= n_tx >= 1")
        if not self.n0 > 0:
            raise ValueError("noise level must be positive")
        h = np.asarray(self.h, dtype=complex)
        if h.shape != (self.n_rx, self.n_tx):
            raise ValueError(f"channel shape {h.shape} != ({self.n_rx}, {self.n_tx})")
        object.__setattr__(self, "h", h)


def rayleigh_channel(k: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. unit-variance complex Gaussian channel matrix (K x N)."""
    if k < 1 or n < 1:
        raise ValueError("channel dimensions must be >= 1")
    re = rng.standard_normal((k, n))
    im = rng.standard_normal((k, n))
    return (re + 1j * im) / math.sqrt(2.0)


def noise_variance_from_ebn0(ebn0_db: float, constellation: Constellation, n_tx: int) -> float:
    """Thermal noise level for a given per-antenna received Eb/N0.

    Each user's received symbol energy per antenna is E|h|^2 E|s|^2 = 1, so
    Eb = 1/bits_per_symbol regardless of the user count.
    """
    if not math.isfinite(ebn0_db):
        raise ValueError("Eb/N0 must be finite")
    del n_tx  # bit energy is defined per user; kept for interface stability
    return 1.0 / (constellation.bits_per_symbol * 10.0 ** (ebn0_db / 10.0))


def statistical_gain(h: np.ndarray, n0: float) -> float:
    """Ideal AGC gain normalizing the mean per-antenna complex variance to 1."""
    h = np.asarray(h, dtype=complex)
    mean_var = float(np.mean(np.sum(np.abs(h) ** 2, axis=1))) + n0
    return 1.0 / math.sqrt(mean_var)


def draw_symbols(constellation: Constellation, n: int, rng: np.random.Generator):
    """Uniform symbol draw; returns (indices, symbols)."""
    idx = rng.integers(0, constellation.order, size=n)
    return idx, constellation.points[idx]


def transmit(scenario: LinkScenario, s: np.ndarray, rng: np.random.Generator):
    """Push one symbol vector through channel, noise, AGC, and quantizer.

    Returns (r, y): the unquantized receive vector and the quantizer output
    taken on the AGC-scaled input g*r, with g the ideal statistical gain.
    """
    s = np.asarray(s, dtype=complex)
    k = scenario.n_rx
    noise = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) * math.sqrt(scenario.n0 / 2.0)
    r = scenario.h @ s + noise
    g = statistical_gain(scenario.h, scenario.n0)
    y = quantize_complex_vector(scenario.quantizer, g * r)
    return r, y


def hard_decide(s_hat: np.ndarray, constellation: Constellation):
    """Nearest-point decision (ties to the lowest point index) plus Gray bits."""
    s_hat = np.asarray(s_hat, dtype=complex)
    dist = np.abs(s_hat[..., None] - constellation.points[None, :])
    idx = np.argmin(dist, axis=-1)
    return constellation.points[idx], constellation.bit_patterns[idx]
