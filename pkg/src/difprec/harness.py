"""Monte-Carlo harness: Rayleigh trials, per-scheme rates, CSV emission.

One channel is drawn per trial (keyed by (seed, trial), so trials parallelize
deterministically) and shared across every SNR point and scheme: the paired
design makes per-trial gap comparisons meaningful.  Records are normalized to
(scheme, snr, trial) order before writing, so output does not depend on the
number of worker processes.
"""

from __future__ import annotations

import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .baselines import design_rzf, design_zf, design_zfdp
from .designer import asymptotic_gap, design_dif_2user, design_dif_generalk, rho_of_channel
from .rates import ChannelMatrix, dpc_sum_capacity

ALL_SCHEMES = ("dif", "rdif", "zf", "rzf", "zfdp", "dpc", "dif_real")

TRIALS_HEADER = "scheme,snr_db,trial,rho,sum_rate_bits,gap_bits,wall_ms"
AGGREGATE_HEADER = "scheme,snr_db,mean_sum_rate_bits,mean_gap_bits,stderr_gap_bits"


@dataclass(frozen=True)
class ExperimentConfig:
    k: int = 2
    m: int = 2
    snr_db: tuple[float, ...] = tuple(np.arange(-10.0, 40.0 + 1e-9, 2.5))
    trials: int = 1000
    seed: int = 1
    schemes: tuple[str, ...] = ("dif", "rdif", "zf", "rzf", "zfdp", "dpc")
    restarts: int = 8
    out: str | None = None

    def __post_init__(self):
        if not 1 <= self.k <= self.m:
            raise ValueError("need 1 <= k <= m")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if len(self.snr_db) == 0:
            raise ValueError("snr list must be nonempty")
        unknown = set(self.schemes) - set(ALL_SCHEMES)
        if unknown:
            raise ValueError(f"unknown schemes: {sorted(unknown)}")
        object.__setattr__(self, "snr_db", tuple(float(s) for s in self.snr_db))
        object.__setattr__(self, "schemes", tuple(self.schemes))


@dataclass(frozen=True)
class TrialRecord:
    scheme: str
    snr_db: float
    trial: int
    rho: float
    sum_rate_bits: float
    gap_bits: float
    wall_ms: float


def draw_channel(rng: np.random.Generator, k: int, m: int) -> np.ndarray:
    """K x M matrix with i.i.d. entries (g1 + j g2)/sqrt(2), unit variance."""
    return (rng.standard_normal((k, m)) + 1j * rng.standard_normal((k, m))) / math.sqrt(2.0)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Per-trial stream keyed by (master seed, trial index)."""
    return np.random.default_rng([seed, trial])


def _design_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, trial, 0x5EED]).generate_state(1)[0])


def _scheme_sum_rate(scheme: str, ch: ChannelMatrix, cfg: ExperimentConfig, trial: int, csum: float) -> float:
    if scheme == "dpc":
        return csum
    if scheme == "zf":
        return design_zf(ch).rates.sum_rate
    if scheme == "rzf":
        return design_rzf(ch).rates.sum_rate
    if scheme == "zfdp":
        return design_zfdp(ch).sum_rate
    if scheme == "dif_real":
        if ch.k != 2:
            raise _Infeasible("dif_real needs exactly two users")
        return design_dif_2user(ch, regularized=False, real_constraint=True).rates.sum_rate
    regularized = scheme == "rdif"
    if ch.k == 2:
        return design_dif_2user(ch, regularized).rates.sum_rate
    return design_dif_generalk(
        ch, regularized, restarts=cfg.restarts, seed=_design_seed(cfg.seed, trial)
    ).rates.sum_rate


class _Infeasible(ValueError):
    pass


def run_trial(cfg: ExperimentConfig, trial: int) -> list[TrialRecord]:
    """All (snr, scheme) records for one channel realization."""
    h = draw_channel(trial_rng(cfg.seed, trial), cfg.k, cfg.m)
    records = []
    for snr_db in cfg.snr_db:
        ch = ChannelMatrix(h, 10.0 ** (snr_db / 10.0))
        csum = dpc_sum_capacity(ch)
        rho = rho_of_channel(ch) if cfg.k == 2 else math.nan
        for scheme in cfg.schemes:
            start = time.perf_counter()
            try:
                sum_rate = _scheme_sum_rate(scheme, ch, cfg, trial, csum)
                gap = csum - sum_rate
            except _Infeasible as exc:
                print(f"warning: {scheme} infeasible for K={cfg.k}: {exc}", file=sys.stderr)
                sum_rate = math.nan
                gap = math.nan
            wall_ms = (time.perf_counter() - start) * 1e3
            records.append(
                TrialRecord(scheme, snr_db, trial, rho, sum_rate, gap, wall_ms)
            )
    return records


def _run_trial_args(args) -> list[TrialRecord]:
    return run_trial(*args)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1):
    """Run all trials; returns (records, aggregate rows).

    Records are sorted by (scheme, snr_db, trial); aggregate rows are
    (scheme, snr_db, mean sum rate, mean gap, stderr of the gap).  The
    scientific content depends only on cfg, not on the job count.
    """
    if jobs <= 1:
        per_trial = [run_trial(cfg, t) for t in range(cfg.trials)]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_trial = list(
                pool.map(_run_trial_args, [(cfg, t) for t in range(cfg.trials)])
            )
    records = [rec for batch in per_trial for rec in batch]
    records.sort(key=lambda r: (r.scheme, r.snr_db, r.trial))
    aggregate = []
    for scheme in sorted(cfg.schemes):
        for snr_db in cfg.snr_db:
            rows = [r for r in records if r.scheme == scheme and r.snr_db == snr_db]
            sums = np.array([r.sum_rate_bits for r in rows])
            gaps = np.array([r.gap_bits for r in rows])
            stderr = float(gaps.std(ddof=1) / math.sqrt(len(gaps))) if len(gaps) > 1 else 0.0
            aggregate.append(
                (scheme, snr_db, float(sums.mean()), float(gaps.mean()), stderr)
            )
    return records, aggregate


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def write_trials_csv(path, records) -> None:
    lines = [TRIALS_HEADER]
    for r in records:
        lines.append(
            f"{r.scheme},{_fmt(r.snr_db)},{r.trial},{_fmt(r.rho)},"
            f"{_fmt(r.sum_rate_bits)},{_fmt(r.gap_bits)},{_fmt(r.wall_ms)}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_aggregate_csv(path, aggregate) -> None:
    lines = [AGGREGATE_HEADER]
    for scheme, snr_db, mean_sum, mean_gap, stderr in aggregate:
        lines.append(
            f"{scheme},{_fmt(snr_db)},{_fmt(mean_sum)},{_fmt(mean_gap)},{_fmt(stderr)}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def gap_curve(resolution: int, real_constraint: bool = False) -> np.ndarray:
    """(rho, gap) samples of the high-SNR gap on a uniform grid over [0, 0.999]."""
    if resolution < 2:
        raise ValueError("need at least two grid points")
    rhos = np.linspace(0.0, 0.999, resolution)
    gaps = np.array([asymptotic_gap(r, real_constraint) for r in rhos])
    return np.column_stack([rhos, gaps])
