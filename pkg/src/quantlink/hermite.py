"""Gauss-weighted polynomial expansion of a staircase quantizer.

Expanding Q against the weight exp(-x^2) yields a linear gain lam = 2*omega_1
plus a quadratic distortion term driven by omega_2.  The weight corresponds to
a Gaussian of variance 1/2 per real dimension, i.e. the expansion linearizes
the quantizer for a complex input of unit variance per antenna, exactly the
operating point the ideal AGC establishes.  All coefficients come from the
closed-form boundary sums (derivative of the weight evaluated at the
thresholds); no numeric integration is involved.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .quantization import QuantizerSpec, receiver_quantizer

__all__ = [
    "HermiteExpansion",
    "hermite_coefficient",
    "lambda_closed_form",
    "lambda_half_sum",
    "hermite_expansion",
    "sohe_distortion",
    "sohe_predict",
    "cqq_closed_form",
    "truncation_residual",
    "offset_thresholds",
    "CoefficientRow",
    "coefficient_limit_report",
    "assert_expansion_trends",
    "write_report_csv",
]

MAX_ORDER = 12

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class HermiteExpansion:
    """Second-order expansion coefficients of one quantizer spec."""

    bits: int
    omega1: float
    omega2: float
    lam: float
    source_spec: QuantizerSpec

    def __post_init__(self) -> None:
        if self.lam != 2.0 * self.omega1:
            raise ValueError("lam must equal 2 * omega1")


def _hermite_values(order: int, x: np.ndarray) -> np.ndarray:
    """Physicists' Hermite polynomial H_order evaluated by recurrence."""
    h_prev = np.ones_like(x)
    if order == 0:
        return h_prev
    h = 2.0 * x
    for n in range(1, order):
        h, h_prev = 2.0 * x * h - 2.0 * n * h_prev, h
    return h


def _jump_sum(spec: QuantizerSpec, weight: np.ndarray) -> float:
    """fsum of weight(tau_j) * (level jump at tau_j) over finite thresholds.

    fsum keeps the sum exactly zero for exactly antisymmetric integrands,
    which is what makes even coefficients vanish identically for symmetric
    quantizers instead of merely small.
    """
    jumps = np.diff(spec.levels)
    return math.fsum(w * j for w, j in zip(weight, jumps))


def hermite_coefficient(spec: QuantizerSpec, order: int) -> float:
    """Expansion coefficient omega_l of the quantizer against exp(-x^2).

    Integrating the l-th derivative of the weight over each bin telescopes to
    boundary terms H_{l-1}(tau) exp(-tau^2) at the finite thresholds (infinite
    endpoints contribute nothing).
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if order > MAX_ORDER:
        raise ValueError(f"order {order} > {MAX_ORDER}: factorial/derivative overflow guard")
    t = spec.finite_thresholds
    weight = _hermite_values(order - 1, t) * np.exp(-t * t)
    return _jump_sum(spec, weight) / (_SQRT_PI * 2.0 ** order * math.factorial(order))


def lambda_closed_form(spec: QuantizerSpec) -> float:
    """Linear gain of the quantizer at unit complex input variance.

    Equals sum_m x_m (exp(-tau_m^2) - exp(-tau_{m+1}^2)) / sqrt(pi), evaluated
    in the telescoped jump form.
    """
    t = spec.finite_thresholds
    return _jump_sum(spec, np.exp(-t * t)) / _SQRT_PI


def lambda_half_sum(spec: QuantizerSpec) -> float:
    """The same gain via the positive-half sum available for symmetric specs."""
    if not spec.is_symmetric():
        raise ValueError("half-sum form requires a symmetric quantizer")
    m = spec.n_levels
    terms = []
    for i in range(m // 2, m):
        lo, hi = spec.thresholds[i], spec.thresholds[i + 1]
        e_lo = math.exp(-lo * lo) if np.isfinite(lo) else 0.0
        e_hi = math.exp(-hi * hi) if np.isfinite(hi) else 0.0
        terms.append(spec.levels[i] * (e_lo - e_hi))
    return 2.0 * math.fsum(terms) / _SQRT_PI


def hermite_expansion(spec: QuantizerSpec) -> HermiteExpansion:
    omega1 = hermite_coefficient(spec, 1)
    omega2 = hermite_coefficient(spec, 2)
    return HermiteExpansion(
        bits=spec.bits, omega1=omega1, omega2=omega2, lam=2.0 * omega1, source_spec=spec
    )


def sohe_distortion(exp: HermiteExpansion, r) -> np.ndarray:
    """Quadratic distortion term: 4 w2 (Re(r)^2 + j Im(r)^2) - 2 w2 (1 + j).

    The constant acts on both real parts so each real dimension follows the
    scalar expansion independently, matching per-dimension quantization.
    """
    r = np.asarray(r, dtype=complex)
    w2 = exp.omega2
    return 4.0 * w2 * (r.real ** 2 + 1j * r.imag ** 2) - 2.0 * w2 * (1.0 + 1.0j)


def sohe_predict(exp: HermiteExpansion, r) -> np.ndarray:
    """Second-order prediction of the quantizer output: lam * r + distortion."""
    r = np.asarray(r, dtype=complex)
    return exp.lam * r + sohe_distortion(exp, r)


def cqq_closed_form(omega2: float, sigma_r2: float, k: int) -> np.ndarray:
    """Asymptotic closed form of the distortion auto-covariance.

    4 w2^2 (4 s^4 I + (2 s^4 - s^2 + 1) 1 1^T) for per-antenna complex
    variance s^2.  Valid in the large-array regime where the quantizer input
    is Gaussian; exact agreement with the second moment of the quadratic
    distortion holds at s^2 = 1/3 and asymptotically as s^2 grows.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not sigma_r2 > 0:
        raise ValueError("sigma_r2 must be positive")
    s2 = float(sigma_r2)
    s4 = s2 * s2
    eye = np.eye(k)
    ones = np.ones((k, k))
    return 4.0 * omega2 ** 2 * (4.0 * s4 * eye + (2.0 * s4 - s2 + 1.0) * ones)


def truncation_residual(spec: QuantizerSpec, upto: int = 10) -> float:
    """Fraction of expansion energy beyond the second-order term.

    Energy of term l under the weight is omega_l^2 * 2^l * l!; the residual is
    the l >= 3 share of the l = 1..upto total (in amplitude).
    """
    if not 2 <= upto <= MAX_ORDER:
        raise ValueError(f"upto must be in [2, {MAX_ORDER}]")
    energies = [
        hermite_coefficient(spec, l) ** 2 * 2.0 ** l * math.factorial(l)
        for l in range(1, upto + 1)
    ]
    total = math.fsum(energies)
    if total == 0.0:
        return 0.0
    return math.sqrt(math.fsum(energies[2:]) / total)


def offset_thresholds(spec: QuantizerSpec, offset: float) -> QuantizerSpec:
    """Shift all comparison thresholds by a DC offset, keeping the levels.

    Breaks odd symmetry, giving omega_2 != 0.  (Shifting the *levels* by a
    constant would not: constants have zero overlap with every kernel of
    order >= 1.)
    """
    finite = spec.finite_thresholds + offset
    thresholds = np.concatenate(([-np.inf], finite, [np.inf]))
    return QuantizerSpec(bits=spec.bits, levels=spec.levels.copy(), thresholds=thresholds)


@dataclass(frozen=True)
class CoefficientRow:
    bits: int
    omega1: float
    omega2: float
    lam: float
    residual_l2: float
    max_abs_distortion: float


def coefficient_limit_report(
    bits_list, threshold_offset: float = 0.0, samples: int = 4096
) -> list[CoefficientRow]:
    """Coefficient table across resolutions for the deployed quantizer family.

    threshold_offset != 0 reports the asymmetric (comparator-offset) variant
    whose omega_2 is nonzero and shrinks with resolution.  max_abs_distortion
    is taken over a fixed unit-complex-variance Gaussian sample.
    """
    rng = np.random.default_rng(0)
    r = (rng.standard_normal(samples) + 1j * rng.standard_normal(samples)) / math.sqrt(2.0)
    rows = []
    for bits in bits_list:
        spec = receiver_quantizer(bits)
        if threshold_offset != 0.0:
            spec = offset_thresholds(spec, threshold_offset)
        exp = hermite_expansion(spec)
        rows.append(
            CoefficientRow(
                bits=bits,
                omega1=exp.omega1,
                omega2=exp.omega2,
                lam=exp.lam,
                residual_l2=truncation_residual(spec),
                max_abs_distortion=float(np.max(np.abs(sohe_distortion(exp, r)))),
            )
        )
    return rows


def assert_expansion_trends(rows: list[CoefficientRow], check_gain: bool = True) -> None:
    """Check |omega_2| is non-increasing toward 0 and the gain approaches 1.

    check_gain=False limits the check to the distortion coefficient, which is
    the meaningful trend for threshold-offset diagnostic variants (their gain
    is perturbed nonmonotonically by the offset at the coarsest resolutions).
    """
    tol = 1e-12
    for prev, cur in zip(rows, rows[1:]):
        if abs(cur.omega2) > abs(prev.omega2) + tol:
            raise AssertionError(
                f"|omega2| increased from bits={prev.bits} ({prev.omega2:.3e}) "
                f"to bits={cur.bits} ({cur.omega2:.3e})"
            )
        if check_gain and abs(cur.lam - 1.0) > abs(prev.lam - 1.0) + tol:
            raise AssertionError(
                f"|lam - 1| increased from bits={prev.bits} ({prev.lam:.6f}) "
                f"to bits={cur.bits} ({cur.lam:.6f})"
            )


def write_report_csv(rows: list[CoefficientRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["b", "omega1", "omega2", "lambda", "residual_l2"])
        for row in rows:
            writer.writerow([row.bits, repr(row.omega1), repr(row.omega2), repr(row.lam), repr(row.residual_l2)])
