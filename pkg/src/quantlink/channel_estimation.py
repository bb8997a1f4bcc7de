"""Pilot-based channel estimation from quantized training observations.

All users transmit orthogonal unit-modulus pilots; the stacked training model
is r_p = (Phi^T kron I_K) vec(H) + noise, quantized like any other receive
vector.  The estimators reuse the equalizer builders with the vectorized
channel playing the signal role (prior vec(H) ~ CN(0, I)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equalizers import lmmse_aqnm, lmmse_bussgang_1bit, lmmse_sohe
from .hermite import hermite_expansion
from .quantization import QuantizerSpec, distortion_for_bits, quantize_complex_vector

__all__ = [
    "ESTIMATOR_KINDS",
    "PilotBlock",
    "dft_pilots",
    "stacked_pilot_matrix",
    "training_gain",
    "training_observation",
    "estimate_channel",
    "empirical_rate",
    "sum_spectral_efficiency",
]

ESTIMATOR_KINDS = ("aqnm", "n-aqnm", "b1bit", "sohe")

SINR_CAP = 1e4  # 40 dB guard for degenerate noiseless cells


@dataclass(frozen=True)
class PilotBlock:
    """Unit-modulus pilot matrix with pairwise-orthogonal rows."""

    phi: np.ndarray
    p_len: int
    coherence: int = 200

    def __post_init__(self) -> None:
        phi = np.asarray(self.phi, dtype=complex)
        n, p = phi.shape
        if p != self.p_len:
            raise ValueError("pilot length disagrees with matrix width")
        if p < n:
            raise ValueError("need at least as many pilot symbols as users")
        if self.coherence <= p:
            raise ValueError("coherence interval must exceed the pilot length")
        if not np.allclose(np.abs(phi), 1.0, atol=1e-12):
            raise ValueError("pilot entries must be unit modulus")
        gram = phi @ phi.conj().T
        if not np.allclose(gram, p * np.eye(n), atol=1e-9):
            raise ValueError("pilot rows must be pairwise orthogonal")
        object.__setattr__(self, "phi", phi)

    @property
    def n_users(self) -> int:
        return self.phi.shape[0]


def dft_pilots(n: int, p: int, coherence: int = 200) -> PilotBlock:
    """First n rows of the p-point DFT matrix, entries exp(-2j pi n p / P)."""
    if p < n:
        raise ValueError(f"pilot length {p} shorter than user count {n}")
    rows = np.arange(n)[:, None]
    cols = np.arange(p)[None, :]
    phi = np.exp(-2j * math.pi * rows * cols / p)
    return PilotBlock(phi=phi, p_len=p, coherence=coherence)


def stacked_pilot_matrix(pilot: PilotBlock, k: int) -> np.ndarray:
    """(Phi^T kron I_K): maps vec(H) to the stacked KP training observation."""
    return np.kron(pilot.phi.T, np.eye(k))


def training_gain(pilot: PilotBlock, n0: float) -> float:
    """AGC gain during training; per-sample variance is exactly N + N0."""
    return 1.0 / math.sqrt(pilot.n_users + n0)


def training_observation(
    h: np.ndarray,
    pilot: PilotBlock,
    n0: float,
    spec: QuantizerSpec,
    rng: np.random.Generator,
) -> np.ndarray:
    """Quantized stacked training vector of length K*P."""
    h = np.asarray(h, dtype=complex)
    k = h.shape[0]
    if h.shape[1] != pilot.n_users:
        raise ValueError("channel width must match the pilot user count")
    r_p = (h @ pilot.phi).flatten(order="F")
    kp = k * pilot.p_len
    noise = (rng.standard_normal(kp) + 1j * rng.standard_normal(kp)) * math.sqrt(n0 / 2.0)
    r_p = r_p + noise
    return quantize_complex_vector(spec, training_gain(pilot, n0) * r_p)


def estimate_channel(
    kind: str,
    y_p: np.ndarray,
    pilot: PilotBlock,
    n0: float,
    spec: QuantizerSpec,
) -> np.ndarray:
    """LMMSE-family channel estimate, unvectorized back to K x N.

    The sign-quantizer estimator consumes the raw ±1 training output and is
    scale invariant; the others consume the de-gained observation so the
    builders see the channel prior's natural units.
    """
    if kind not in ESTIMATOR_KINDS:
        raise ValueError(f"unknown estimator kind {kind!r}")
    y_p = np.asarray(y_p, dtype=complex)
    n = pilot.n_users
    k = y_p.size // pilot.p_len
    if k * pilot.p_len != y_p.size:
        raise ValueError("observation length must be K * P")
    phi_bar = stacked_pilot_matrix(pilot, k)
    g = training_gain(pilot, n0)

    if kind == "b1bit":
        if spec.bits != 1:
            raise ValueError("the sign-quantizer estimator requires a 1-bit front end")
        w = lmmse_bussgang_1bit(phi_bar, n0).g
        h_vec = w @ y_p
    elif kind == "sohe":
        exp = hermite_expansion(spec)
        w = lmmse_sohe(phi_bar, n0, exp, sigma_r2=n + n0).g
        h_vec = w @ (y_p / g)
    else:
        rho = distortion_for_bits(spec.bits)
        w = lmmse_aqnm(phi_bar, n0, rho).g
        h_vec = w @ (y_p / g)
        if kind == "n-aqnm":
            nrm = float(np.linalg.norm(h_vec))
            if nrm == 0.0:
                raise ValueError("cannot normalize a zero channel estimate")
            h_vec = math.sqrt(k * n) * h_vec / nrm

    return h_vec.reshape((k, n), order="F")


def empirical_rate(equalized: np.ndarray, sent: np.ndarray) -> float:
    """Gaussian-worst-case rate from empirical per-user moments.

    Signal power |E[s_hat s*]|^2 against total residual power
    E|s_hat|^2 - |E[s_hat s*]|^2; the SINR is capped at 40 dB so degenerate
    noiseless cells stay finite.  Needs at least 1e4 samples.
    """
    equalized = np.asarray(equalized, dtype=complex).ravel()
    sent = np.asarray(sent, dtype=complex).ravel()
    if equalized.size != sent.size:
        raise ValueError("sample vectors must have equal length")
    if equalized.size < 10_000:
        raise ValueError("need at least 1e4 samples for a stable rate estimate")
    cross = complex(np.mean(equalized * sent.conj()))
    power = float(np.mean(np.abs(equalized) ** 2))
    signal = abs(cross) ** 2
    denom = power - signal
    sinr = SINR_CAP if denom <= signal / SINR_CAP else min(signal / denom, SINR_CAP)
    return math.log2(1.0 + sinr)


def sum_spectral_efficiency(per_user_rates, coherence: int, p_len: int) -> float:
    """((T - P)/T) * sum of per-user rates."""
    if coherence < p_len:
        raise ValueError("coherence interval cannot be shorter than the pilots")
    rates = np.asarray(per_user_rates, dtype=float)
    return float((coherence - p_len) / coherence * np.sum(rates))
