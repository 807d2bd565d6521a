"""Achievable-rate and capacity formulas for the MIMO broadcast setup.

Rates are in bits per complex channel use (base-2 logs); SNR is the linear
total-power to unit-noise ratio.  The central quantity is the computation
rate of a (effective channel, integer coefficient vector) pair; everything
else is assembled from it or from the broadcast sum-capacity program.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .gaussint import IntegerCoeffMatrix

POWER_TOL = 1e-9


def log2_pos(x: float) -> float:
    """max(0, log2(x))."""
    if x <= 1.0:
        return 0.0
    return math.log2(x)


@dataclass(frozen=True)
class ChannelMatrix:
    """K x M complex downlink channel with its operating SNR (linear)."""

    h: np.ndarray
    snr: float

    def __post_init__(self):
        h = linalg.cmatrix(self.h)
        if h.shape[0] > h.shape[1]:
            raise ValueError("need at least as many transmit antennas as users")
        if not (self.snr > 0 and math.isfinite(self.snr)):
            raise ValueError("snr must be positive and finite")
        object.__setattr__(self, "h", h)

    @property
    def k(self) -> int:
        return self.h.shape[0]

    @property
    def m(self) -> int:
        return self.h.shape[1]

    def with_snr(self, snr: float) -> "ChannelMatrix":
        return ChannelMatrix(self.h, snr)


@dataclass(frozen=True)
class RateReport:
    """Per-user achievable rates and their sum, tagged with a scheme label."""

    scheme: str
    per_user: np.ndarray
    sum_rate: float = field(init=False)

    def __post_init__(self):
        per_user = np.asarray(self.per_user, dtype=np.float64)
        if per_user.ndim != 1 or np.any(per_user < 0) or not np.all(np.isfinite(per_user)):
            raise ValueError("per-user rates must be finite and nonnegative")
        object.__setattr__(self, "per_user", per_user)
        object.__setattr__(self, "sum_rate", float(per_user.sum()))


@dataclass(frozen=True)
class DiagonalScale:
    """Diagonal scaling bundle: base entries d, scalar c; full scale is c*d.

    With unit_det set, d is the |det| = 1 normalized part and c carries the
    power normalization.
    """

    d: np.ndarray
    c: float = 1.0
    unit_det: bool = False

    def __post_init__(self):
        d = np.asarray(self.d, dtype=np.complex128).reshape(-1)
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError("c must be positive and finite")
        if self.unit_det:
            if np.any(d == 0):
                raise ValueError("unit-det scale requires nonzero entries")
            prod = float(np.prod(np.abs(d)))
            if abs(prod - 1.0) > 1e-12:
                raise ValueError(f"|det| = {prod} but unit-det scale requires 1")
        object.__setattr__(self, "d", d)

    @property
    def k(self) -> int:
        return self.d.shape[0]

    def final_entries(self) -> np.ndarray:
        return self.c * self.d


def optimal_alpha(h_eff: np.ndarray, a: np.ndarray, snr: float) -> complex:
    """MMSE scalar minimizing the effective-noise variance.

    alpha = snr * (a h'^H) / (1 + snr ||h'||^2), where x y^H is the row inner
    product sum_k x_k conj(y_k).
    """
    h_eff = np.asarray(h_eff, dtype=np.complex128)
    a = np.asarray(a, dtype=np.complex128)
    return complex(snr * np.vdot(h_eff, a) / (1.0 + snr * np.vdot(h_eff, h_eff).real))


def effective_noise_var(alpha: complex, h_eff: np.ndarray, a: np.ndarray, snr: float) -> float:
    """snr ||alpha h' - a||^2 + |alpha|^2."""
    h_eff = np.asarray(h_eff, dtype=np.complex128)
    a = np.asarray(a, dtype=np.complex128)
    diff = alpha * h_eff - a
    return float(snr * np.vdot(diff, diff).real + abs(alpha) ** 2)


def comp_rate(h_eff: np.ndarray, a: np.ndarray, snr: float) -> float:
    """Computation rate of the pair (h', a) at the given SNR.

    log2+ [ (1 + ||h'||^2 snr) / (||a||^2 + (||a||^2 ||h'||^2 - |h' a^H|^2) snr) ].
    """
    h_eff = np.asarray(h_eff, dtype=np.complex128)
    a = np.asarray(a, dtype=np.complex128)
    a_sq = np.vdot(a, a).real
    if a_sq == 0:
        raise ValueError("coefficient vector must be nonzero")
    h_sq = np.vdot(h_eff, h_eff).real
    cross = abs(np.vdot(a, h_eff)) ** 2
    num = 1.0 + h_sq * snr
    den = a_sq + (a_sq * h_sq - cross) * snr
    return log2_pos(num / den)


def if_sum_rate(
    h: ChannelMatrix, t: np.ndarray, a: IntegerCoeffMatrix, scheme: str = "if"
) -> RateReport:
    """Sum of per-user computation rates for beamforming t and coefficients a."""
    t = linalg.cmatrix(t)
    if t.shape != (h.m, h.k):
        raise ValueError(f"beamforming matrix must be {h.m} x {h.k}")
    power = linalg.frob_norm_sq(t)
    if power > 1.0 + POWER_TOL:
        raise ValueError(f"power constraint violated: trace(T^H T) = {power}")
    if not a.is_full_rank():
        raise ValueError("coefficient matrix is rank deficient")
    h_eff = h.h @ t
    rates = [comp_rate(h_eff[i], a.row(i), h.snr) for i in range(h.k)]
    return RateReport(scheme, np.array(rates))


def dif_rate(a: IntegerCoeffMatrix, d: DiagonalScale, snr: float, scheme: str = "dif") -> RateReport:
    """Closed-form rate when the precoded channel is exactly diag(d) A:

    sum_i log2+ (1/||a_i||^2 + |d_i|^2 snr).
    """
    entries = d.final_entries()
    if np.any(entries == 0):
        raise ValueError("diagonal entries must be nonzero")
    if entries.shape[0] != a.k:
        raise ValueError("diagonal size must match coefficient matrix")
    norms = (a.re.astype(np.float64) ** 2 + a.im.astype(np.float64) ** 2).sum(axis=1)
    rates = [log2_pos(1.0 / n + abs(e) ** 2 * snr) for n, e in zip(norms, entries)]
    return RateReport(scheme, np.array(rates))


def _dpc_objective_2x2(g: np.ndarray, snr: float):
    g11 = g[0, 0].real
    g22 = g[1, 1].real
    cross = abs(g[0, 1]) ** 2

    def f(q1: float) -> float:
        q2 = 1.0 - q1
        d = (1.0 + snr * q1 * g11) * (1.0 + snr * q2 * g22) - snr * snr * q1 * q2 * cross
        return math.log2(d)

    return f


def _golden_max(f, lo: float, hi: float, tol: float):
    """Golden-section maximization of a unimodal function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
    x = 0.5 * (a + b)
    return x, f(x)


def _project_capped_simplex(q: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {q >= 0, sum(q) <= 1}."""
    q = np.maximum(q, 0.0)
    s = q.sum()
    if s <= 1.0:
        return q
    # project onto the simplex sum(q) = 1
    u = np.sort(q)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, len(q) + 1)
    cond = u - (css - 1.0) / idx > 0
    rho = idx[cond][-1]
    theta = (css[cond][-1] - 1.0) / rho
    return np.maximum(q - theta, 0.0)


def dpc_sum_capacity(h: ChannelMatrix) -> float:
    """Broadcast sum capacity: sup over diagonal Q, trace <= 1, of
    log2 det(I + snr H^H Q H).

    K = 1 is closed form; K = 2 uses golden-section over the power split
    (the trace constraint is active); larger K uses projected gradient
    ascent on the capped simplex with step halving.
    """
    g = linalg.gram(h.h)
    snr = h.snr
    if h.k == 1:
        return math.log2(1.0 + snr * g[0, 0].real)
    if h.k == 2:
        _, val = _golden_max(_dpc_objective_2x2(g, snr), 0.0, 1.0, 1e-12)
        return val
    k = h.k
    eye = np.eye(k)

    def value(q: np.ndarray) -> float:
        d = linalg.det(eye + snr * (q[:, None] * g))
        return math.log2(abs(d))

    q = np.full(k, 1.0 / k)
    best = value(q)
    step = 1.0
    for _ in range(5000):
        grad = snr * np.real(
            np.diag(g @ linalg.inverse(eye + snr * (q[:, None] * g)))
        ) / math.log(2.0)
        prev = best
        while step > 1e-14:
            cand = _project_capped_simplex(q + step * grad)
            cand_val = value(cand)
            if cand_val > best:
                q, best = cand, cand_val
                break
            step *= 0.5
        else:
            break
        if best - prev < 1e-10:
            break
        step = min(step * 2.0, 1.0)
    return best


def hi_snr_sum_capacity(h: ChannelMatrix) -> float:
    """K log2(snr/K) + log2 det(H H^H); the high-SNR capacity expansion.

    May be negative at low SNR; returned unclamped.
    """
    g = linalg.gram(h.h)
    d = linalg.det(g).real
    return h.k * math.log2(h.snr / h.k) + math.log2(d)


def gap_to_capacity(report: RateReport, h: ChannelMatrix) -> float:
    return dpc_sum_capacity(h) - report.sum_rate
