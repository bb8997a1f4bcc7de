"""Covariance algebra of the linear quantizer approximations.

Three families are covered: the additive-noise model (distortion treated as
extra Gaussian noise correlated with the input), its modified form (distortion
decorrelated from the input), and the exact 1-bit arcsine-law form obtained
from the Bussgang decomposition of a sign quantizer driven by Gaussian input.
"""
from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .quantization import QuantizerSpec

__all__ = [
    "ModelCovariances",
    "c_rr",
    "nondiag",
    "complex_arcsine",
    "aqnm_covariances",
    "bussgang_covariances",
    "generalized_lambda_matrix",
]


@dataclass(frozen=True)
class ModelCovariances:
    """Auto/cross covariances a linear model hands to the equalizer builders."""

    c_rr: np.ndarray
    c_yr: np.ndarray
    c_ee: np.ndarray
    lambda_matrix: np.ndarray | None = None


def c_rr(h: np.ndarray, n0: float) -> np.ndarray:
    """Receive covariance H H^H + N0 I for unit-power uncorrelated symbols."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2:
        raise ValueError("channel must be a 2-D matrix")
    k, n = h.shape
    if not k >= n >= 1:
        raise ValueError(f"expected K >= N >= 1, got K={k}, N={n}")
    if not n0 > 0:
        raise ValueError("noise level must be positive")
    return h @ h.conj().T + n0 * np.eye(k)


def nondiag(m: np.ndarray) -> np.ndarray:
    """Off-diagonal part of a square matrix."""
    m = np.asarray(m)
    return m - np.diag(np.diag(m))


def complex_arcsine(m: np.ndarray) -> np.ndarray:
    """arcsin applied separately to real and imaginary parts.

    The standard correlation law for sign-quantized proper Gaussian vectors;
    arguments are clipped to [-1, 1] to absorb rounding on the diagonal.
    """
    m = np.asarray(m, dtype=complex)
    return np.arcsin(np.clip(m.real, -1.0, 1.0)) + 1j * np.arcsin(np.clip(m.imag, -1.0, 1.0))


def aqnm_covariances(c_rr_mat: np.ndarray, rho: float, n0: float) -> ModelCovariances:
    """Additive-noise-model covariances under the Gaussian-distortion assumption."""
    if not 0.0 < rho < 1.0:
        raise ValueError(f"distortion factor must lie in (0, 1), got {rho}")
    c = np.asarray(c_rr_mat, dtype=complex)
    k = c.shape[0]
    c_yr = (1.0 - rho) * c
    c_ee = (1.0 - rho) ** 2 * n0 * np.eye(k) + (1.0 - rho) * rho * np.diag(np.diag(c).real)
    return ModelCovariances(c_rr=c, c_yr=c_yr, c_ee=c_ee)


def bussgang_covariances(c_rr_mat: np.ndarray, n0: float) -> ModelCovariances:
    """Exact covariances for the symmetric 1-bit (sign) quantizer.

    C_yr = sqrt(2/pi) D^{-1/2} C_rr and
    C_ee = (2/pi) [asin(S) - S + N0 D^{-1}] with S the diagonally normalized
    receive covariance; asin acts per real/imaginary part.
    """
    c = np.asarray(c_rr_mat, dtype=complex)
    d = np.diag(c).real
    if np.any(d <= 0):
        raise ValueError("receive covariance must have a positive diagonal")
    try:
        np.linalg.cholesky(c)
    except np.linalg.LinAlgError as exc:
        raise ValueError("receive covariance must be positive definite") from exc
    d_inv_sqrt = 1.0 / np.sqrt(d)
    s = d_inv_sqrt[:, None] * c * d_inv_sqrt[None, :]
    c_yr = math.sqrt(2.0 / math.pi) * d_inv_sqrt[:, None] * c
    c_ee = (2.0 / math.pi) * (complex_arcsine(s) - s + n0 * np.diag(1.0 / d))
    return ModelCovariances(c_rr=c, c_yr=c_yr, c_ee=c_ee)


def generalized_lambda_matrix(spec: QuantizerSpec, c_rr_mat: np.ndarray) -> np.ndarray:
    """Per-antenna linear gain of the quantizer given per-antenna variances.

    Diagonal matrix with entries
    d^{-1/2} sum_m x_m (exp(-tau_m^2/d) - exp(-tau_{m+1}^2/d)) / sqrt(pi)
    where d is the corresponding complex receive variance; infinite
    thresholds contribute nothing.
    """
    d = np.diag(np.asarray(c_rr_mat)).real
    if np.any(d <= 0):
        raise ValueError("receive covariance must have a positive diagonal")
    t = spec.finite_thresholds
    # weight(tau_j, d) * level-jump, telescoped over the finite thresholds
    w = np.exp(-np.square(t)[None, :] / d[:, None])
    jumps = np.diff(spec.levels)
    gains = (w @ jumps) / (math.sqrt(math.pi) * np.sqrt(d))
    return np.diag(gains)
