"""The linear channel-equalizer family for quantized receive vectors.

Every builder returns the cross-covariance-over-auto-covariance solution of
its model, G = C_sy C_yy^{-1}; they differ only in which linear approximation
of the quantizer supplies the covariances.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hermite import HermiteExpansion, cqq_closed_form
from .linear_models import c_rr as receive_covariance
from .linear_models import complex_arcsine, nondiag

__all__ = [
    "KINDS",
    "DegenerateDiagonal",
    "EqualizerMatrix",
    "lmmse_aqnm",
    "lmmse_modified",
    "lmmse_bussgang_1bit",
    "lmmse_sohe",
    "elmmse",
    "model_transform_theta",
    "equalize",
    "zf",
]

KINDS = ("aqnm", "modified", "b1bit", "n-aqnm", "nb1bit", "sohe", "elmmse", "zf")


class DegenerateDiagonal(ValueError):
    """diag(G H) has a (numerically) zero entry: per-symbol rescale undefined."""


@dataclass(frozen=True)
class EqualizerMatrix:
    """An N x K equalizer with its model tag and normalization flag."""

    g: np.ndarray
    kind: str
    normalize: bool = False
    lam: float | None = None

    def __post_init__(self) -> None:
        g = np.asarray(self.g, dtype=complex)
        if g.ndim != 2:
            raise ValueError("equalizer matrix must be 2-D")
        if self.kind == "elmmse" and self.lam is None:
            raise ValueError("elmmse equalizers must carry the gain they divide out")
        object.__setattr__(self, "g", g)

    @property
    def n_tx(self) -> int:
        return self.g.shape[0]


def _gram_solve(h: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """H^H gram^{-1} for Hermitian gram, via one linear solve."""
    try:
        return np.linalg.solve(gram, h).conj().T
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular model covariance; cannot build equalizer") from exc


def lmmse_aqnm(h: np.ndarray, n0: float, rho: float) -> EqualizerMatrix:
    """Additive-noise-model equalizer: H^H (N0 I + HH^H - rho nondiag(HH^H))^{-1}.

    The subtracted off-diagonal term is the sign under which the Gram is
    provably positive definite for every N0 > 0 (it equals
    (1-rho)(HH^H + N0 I) + rho (diag(HH^H) + N0 I)) and under which this
    matrix coincides with the decorrelated-distortion variant.  The published
    form with the opposite sign goes indefinite once rho * ||h_k||^2 exceeds
    N0, which the K >> N regime hits at any useful SNR.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError(f"distortion factor must lie in (0, 1), got {rho}")
    h = np.asarray(h, dtype=complex)
    k = h.shape[0]
    hh = h @ h.conj().T
    gram = n0 * np.eye(k) + hh - rho * nondiag(hh)
    return EqualizerMatrix(g=_gram_solve(h, gram), kind="aqnm")


def lmmse_modified(h: np.ndarray, n0: float, rho: float) -> EqualizerMatrix:
    """Decorrelated-distortion variant:
    (1-rho)^{-1} H^H (C_rr + rho/(1-rho) diag(C_rr))^{-1}."""
    if not 0.0 < rho < 1.0:
        raise ValueError(f"distortion factor must lie in (0, 1), got {rho}")
    h = np.asarray(h, dtype=complex)
    c = receive_covariance(h, n0)
    gram = c + (rho / (1.0 - rho)) * np.diag(np.diag(c))
    return EqualizerMatrix(g=_gram_solve(h, gram) / (1.0 - rho), kind="modified")


def lmmse_bussgang_1bit(h: np.ndarray, n0: float) -> EqualizerMatrix:
    """Arcsine-law equalizer for the symmetric sign quantizer.

    C_sy = sqrt(2/pi) H^H D^{-1/2} and C_yy = (2/pi) asin(S) with S the
    diagonally normalized receive covariance; both are invariant to any
    common AGC scaling of the receive chain.
    """
    h = np.asarray(h, dtype=complex)
    c = receive_covariance(h, n0)
    d = np.diag(c).real
    d_inv_sqrt = 1.0 / np.sqrt(d)
    s = d_inv_sqrt[:, None] * c * d_inv_sqrt[None, :]
    c_yy = (2.0 / math.pi) * complex_arcsine(s)
    c_sy = math.sqrt(2.0 / math.pi) * (h.conj().T * d_inv_sqrt[None, :])
    try:
        g = np.linalg.solve(c_yy.conj().T, c_sy.conj().T).conj().T
    except np.linalg.LinAlgError as exc:
        raise ValueError("sign-output covariance is singular") from exc
    return EqualizerMatrix(g=g, kind="b1bit")


def lmmse_sohe(
    h: np.ndarray, n0: float, exp: HermiteExpansion, sigma_r2: float
) -> EqualizerMatrix:
    """Second-order-expansion equalizer:
    lam^{-1} H^H (HH^H + N0 I + lam^{-2} C_qq)^{-1}."""
    if not exp.lam > 0:
        raise ValueError("expansion gain must be positive")
    h = np.asarray(h, dtype=complex)
    k = h.shape[0]
    cqq = cqq_closed_form(exp.omega2, sigma_r2, k)
    gram = h @ h.conj().T + n0 * np.eye(k) + cqq / exp.lam ** 2
    return EqualizerMatrix(g=_gram_solve(h, gram) / exp.lam, kind="sohe")


def elmmse(g_aqnm: EqualizerMatrix, h: np.ndarray, lam: float) -> EqualizerMatrix:
    """Per-symbol rescaled equalizer: (1/lam) diag(G H)^{-1} G.

    Removes both the combining shrinkage (diag(G H)) and the quantizer gain,
    so diag(G_e H) = I/lam exactly wherever defined.
    """
    if g_aqnm.kind != "aqnm":
        raise ValueError("the rescaled equalizer is built from the additive-noise one")
    if not lam > 0:
        raise ValueError("gain must be positive")
    h = np.asarray(h, dtype=complex)
    d = np.diag(g_aqnm.g @ h)
    if np.any(np.abs(d) < 1e-300):
        raise DegenerateDiagonal("diag(G H) has a zero entry")
    g = (1.0 / (lam * d))[:, None] * g_aqnm.g
    return EqualizerMatrix(g=g, kind="elmmse", lam=lam)


def model_transform_theta(g_sohe: EqualizerMatrix, g_aqnm: EqualizerMatrix) -> np.ndarray:
    """N x N bridge Theta with Theta G_aqnm = G_sohe (pseudo-inverse route)."""
    ga = g_aqnm.g
    n, k = ga.shape
    sv = np.linalg.svd(ga, compute_uv=False)
    tol = max(n, k) * np.finfo(float).eps * sv[0]
    if np.sum(sv > tol) < n:
        raise ValueError("additive-noise equalizer is rank deficient")
    return g_sohe.g @ np.linalg.pinv(ga, rcond=max(n, k) * np.finfo(float).eps)


def equalize(em: EqualizerMatrix, y: np.ndarray) -> np.ndarray:
    """Apply the equalizer; block-energy renormalize when the flag is set.

    The normalized output is sqrt(N) G y / ||G y||, restoring E||s||^2 = N for
    unit-energy constellations.
    """
    y = np.asarray(y, dtype=complex)
    s_hat = em.g @ y
    if em.normalize:
        nrm = float(np.linalg.norm(s_hat))
        if nrm == 0.0:
            raise ValueError("cannot normalize a zero equalizer output")
        s_hat = math.sqrt(em.n_tx) * s_hat / nrm
    return s_hat


def zf(h_est: np.ndarray) -> EqualizerMatrix:
    """Zero-forcing left inverse: (H^H H)^{-1} H^H, so that G H = I."""
    h_est = np.asarray(h_est, dtype=complex)
    gram = h_est.conj().T @ h_est
    try:
        np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise ValueError("channel estimate is rank deficient") from exc
    g = np.linalg.solve(gram, h_est.conj().T)
    return EqualizerMatrix(g=g, kind="zf")
