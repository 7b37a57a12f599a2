"""Seeded Monte-Carlo campaigns over the channel ``y = c + eps + e``.

Each campaign draws a codeword, a disturbance ``eps`` with ``|eps_i| <= delta``
and an error ``e`` of weight at most one, decodes, and tallies the outcome
against the correction contract.  Trials are generated in fixed blocks whose
random streams derive from ``(seed, block index)``, so results do not depend
on how many workers run the blocks.

Every trial is also audited against the per-trial inequalities that underpin
the decoder guarantee; failures are counted in ``TrialStats.audit``.
"""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .code import AnalogCode, decoder_thresholds
from .decoder import classify_batch, locate_batch
from .errors import DomainError

BLOCK = 2048
AUDIT_SLACK = 1e-9
CSV_HEADER = (
    "label", "n", "k", "rho", "delta", "Delta", "trials",
    "exact", "safe_subset", "violation_d1", "violation_d2", "seed",
)
AUDIT_KEYS = ("strong_peak", "peak_dominates", "rivals_quiet", "rival_bound")


@dataclass(frozen=True)
class FixedAbove:
    """Error magnitude ``factor * Delta``."""

    factor: float


@dataclass(frozen=True)
class UniformRange:
    """Error magnitude uniform on ``[lo, hi]`` (absolute units)."""

    lo: float
    hi: float


@dataclass(frozen=True)
class NoError:
    pass


Magnitude = Union[FixedAbove, UniformRange, NoError]


@dataclass(frozen=True)
class TrialConfig:
    code: AnalogCode
    trials: int
    seed: int = 0
    delta: float = 1.0
    magnitude: Magnitude = field(default_factory=NoError)
    amplitude: float = 1.0
    adversarial: bool = False
    classify_delta: Optional[float] = None

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials}")
        if not self.delta > 0:
            raise DomainError(f"delta must be positive, got {self.delta}")
        if isinstance(self.magnitude, UniformRange) and not (
            0 <= self.magnitude.lo <= self.magnitude.hi
        ):
            raise DomainError(f"invalid magnitude range {self.magnitude}")
        if isinstance(self.magnitude, FixedAbove) and self.magnitude.factor < 0:
            raise DomainError("magnitude factor must be nonnegative")
        if not isinstance(self.magnitude, (FixedAbove, UniformRange, NoError)):
            raise DomainError(f"unknown magnitude law {self.magnitude!r}")


@dataclass
class TrialStats:
    label: str
    n: int
    k: int
    rho: float
    delta: float
    Delta: float
    seed: int
    trials: int = 0
    exact: int = 0
    safe_subset: int = 0
    violation_d1: int = 0
    violation_d2: int = 0
    max_xi_no_error: Optional[float] = None
    wall_time: float = 0.0
    audit: dict = field(default_factory=lambda: dict.fromkeys(AUDIT_KEYS, 0))

    @property
    def violations(self) -> int:
        return self.violation_d1 + self.violation_d2

    def merge(self, other: "TrialStats") -> None:
        self.trials += other.trials
        self.exact += other.exact
        self.safe_subset += other.safe_subset
        self.violation_d1 += other.violation_d1
        self.violation_d2 += other.violation_d2
        if other.max_xi_no_error is not None:
            self.max_xi_no_error = max(self.max_xi_no_error or 0.0, other.max_xi_no_error)
        for key, val in other.audit.items():
            self.audit[key] = self.audit.get(key, 0) + val

    def csv_row(self) -> dict:
        return {
            "label": self.label, "n": self.n, "k": self.k, "rho": repr(self.rho),
            "delta": repr(self.delta), "Delta": repr(self.Delta), "trials": self.trials,
            "exact": self.exact, "safe_subset": self.safe_subset,
            "violation_d1": self.violation_d1, "violation_d2": self.violation_d2,
            "seed": self.seed,
        }


def append_csv(path, stats: TrialStats) -> None:
    """Append one campaign row, writing the header when the file is new or empty."""
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    with path.open("a", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_HEADER)
        if fresh:
            writer.writeheader()
        writer.writerow(stats.csv_row())


def read_csv(path) -> list:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def sample_disturbance(n: int, delta: float, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. entries uniform on ``[-delta, delta]``."""
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    if delta == 0:
        return np.zeros(n)
    return rng.uniform(-delta, delta, size=n)


def sample_single_error(n: int, magnitude: float, rng: np.random.Generator):
    """Error of weight at most one with uniform position and sign.

    Returns ``(e, j0)``; ``e`` is zero when ``magnitude`` is 0.
    """
    if magnitude < 0:
        raise DomainError("magnitude must be nonnegative")
    j0 = int(rng.integers(n))
    sign = 1.0 if rng.random() < 0.5 else -1.0
    e = np.zeros(n)
    e[j0] = sign * magnitude
    return e, j0


def _competitor(gram: np.ndarray, j0: int) -> int:
    row = np.abs(gram[j0]).copy()
    row[j0] = -1.0
    return int(np.argmax(row))


def adversarial_epsilon(code: AnalogCode, j0: int, delta: float, error_sign: float = 1.0,
                        competitor: Optional[int] = None) -> np.ndarray:
    """Extreme-point disturbance inflating the correlation at a competitor column.

    The competitor defaults to the column most coherent with ``h_j0``.  Each
    ``eps_l = +-delta`` is signed so that its contribution to ``xi`` at the
    competitor adds to the contribution of an error of sign ``error_sign``
    at ``j0``.
    """
    if delta <= 0:
        return np.zeros(code.n)
    gram = code.H.T @ code.H
    j = _competitor(gram, j0) if competitor is None else int(competitor)
    return _adversarial(gram, j0, j, delta, error_sign)


def _adversarial(gram, j0, j, delta, error_sign):
    push = 1.0 if error_sign * gram[j, j0] >= 0 else -1.0
    s = np.sign(gram[j])
    s[s == 0] = 1.0
    return delta * push * s


def _run_block(cfg: TrialConfig, block: int, start: int, size: int, Delta: float,
               theta: float, classify_delta: float) -> TrialStats:
    code = cfg.code
    n, k = code.n, code.k
    H = np.asarray(code.H)
    G = np.asarray(code.G)
    gram = H.T @ H
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(block,)))

    X = rng.standard_normal((size, k)) * cfg.amplitude
    C = X @ G
    j0 = rng.integers(n, size=size)
    sign = np.where(rng.random(size) < 0.5, 1.0, -1.0)
    mag = cfg.magnitude
    if isinstance(mag, FixedAbove):
        size_err = np.full(size, mag.factor * Delta)
    elif isinstance(mag, UniformRange):
        size_err = rng.uniform(mag.lo, mag.hi, size=size)
    else:
        size_err = np.zeros(size)
    err = sign * size_err
    if cfg.adversarial:
        eps = np.empty((size, n))
        for t in range(size):
            g = int(j0[t])
            eps[t] = _adversarial(gram, g, _competitor(gram, g), cfg.delta, sign[t])
    else:
        eps = rng.uniform(-cfg.delta, cfg.delta, size=(size, n))

    Y = C + eps
    rows = np.arange(size)
    Y[rows, j0] += err
    located, Xi = locate_batch(H, Y, theta)
    exact, safe, v1, v2 = classify_batch(located, j0, err, classify_delta)

    stats = TrialStats(code.label, n, k, code.rho, cfg.delta, Delta, cfg.seed)
    stats.trials = size
    stats.exact = int(exact.sum())
    stats.safe_subset = int(safe.sum())
    stats.violation_d1 = int(v1.sum())
    stats.violation_d2 = int(v2.sum())
    A = np.abs(Xi)
    clean = err == 0
    if clean.any():
        stats.max_xi_no_error = float(A[clean].max())
    stats.audit = _audit(A, gram, j0, err, theta, Delta, cfg.delta, n)
    return stats


def _audit(A, gram, j0, err, theta, Delta, delta, n) -> dict:
    """Count trials breaking the inequalities that imply the decoder guarantee."""
    rows = np.arange(A.shape[0])
    xi0 = A[rows, j0]
    others = np.ones_like(A, dtype=bool)
    others[rows, j0] = False
    rho = gram[j0]  # rho_{j, j0} per trial
    # only off-diagonal entries matter; clip guards the sqrt against round-off
    claim_bound = xi0[:, None] * np.abs(rho) + np.sqrt(np.clip(1.0 - rho**2, 0.0, None)) * delta * n
    claim_bad = ((A > claim_bound + AUDIT_SLACK) & others).any(axis=1)
    rival = np.where(others, A, -np.inf).max(axis=1)
    l1_bad = (np.abs(err) > Delta) & ~(xi0 > theta)
    l2_bad = (xi0 > theta) & ~(xi0 > rival - AUDIT_SLACK)
    l3_bad = (xi0 <= theta) & (rival > theta + AUDIT_SLACK)
    return {
        "strong_peak": int(l1_bad.sum()),
        "peak_dominates": int(l2_bad.sum()),
        "rivals_quiet": int(l3_bad.sum()),
        "rival_bound": int(claim_bad.sum()),
    }


def _run_block_args(args):
    return _run_block(*args)


def run_campaign(cfg: TrialConfig, workers: Optional[int] = None) -> TrialStats:
    """Run ``cfg.trials`` decoding trials and aggregate the outcomes.

    ``workers`` (default ``ANALOG_ECC_THREADS`` or 1) only changes how blocks
    are scheduled, never the result.
    """
    t0 = time.perf_counter()
    code = cfg.code
    bounds = decoder_thresholds(code.n, code.rho, cfg.delta)
    Delta = bounds.delta_threshold
    classify_delta = Delta if cfg.classify_delta is None else float(cfg.classify_delta)
    jobs = [
        (cfg, b, start, min(BLOCK, cfg.trials - start), Delta, bounds.theta, classify_delta)
        for b, start in enumerate(range(0, cfg.trials, BLOCK))
    ]
    if workers is None:
        env = os.environ.get("ANALOG_ECC_THREADS")
        workers = int(env) if env else 1
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_block_args, jobs))
    else:
        parts = [_run_block(*job) for job in jobs]
    total = TrialStats(code.label, code.n, code.k, code.rho, cfg.delta, Delta, cfg.seed)
    for part in parts:
        total.merge(part)
    total.wall_time = time.perf_counter() - t0
    return total


def parse_magnitude(spec: str, Delta: Optional[float] = None) -> Magnitude:
    """Parse ``"KxDelta"``, ``"uniform:lo:hi"`` or ``"none"``.

    Range bounds are plain numbers or themselves ``"KxDelta"``, which needs
    ``Delta``.
    """
    spec = spec.strip()
    if spec.lower() == "none":
        return NoError()
    if spec.lower().startswith("uniform:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise DomainError(f"expected uniform:lo:hi, got {spec!r}")
        return UniformRange(_parse_amount(parts[1], Delta), _parse_amount(parts[2], Delta))
    factor = _delta_factor(spec)
    if factor is None:
        raise DomainError(f"unrecognized magnitude spec {spec!r}")
    return FixedAbove(factor)


def _delta_factor(token: str) -> Optional[float]:
    low = token.strip().lower()
    if not low.endswith("xdelta"):
        return None
    try:
        return float(low[: -len("xdelta")])
    except ValueError:
        raise DomainError(f"bad multiplier in {token!r}") from None


def _parse_amount(token: str, Delta: Optional[float]) -> float:
    factor = _delta_factor(token)
    if factor is None:
        try:
            return float(token)
        except ValueError:
            raise DomainError(f"bad number {token!r}") from None
    if Delta is None:
        raise DomainError(f"{token!r} refers to Delta but no code thresholds are known")
    return factor * Delta


__all__ = [
    "FixedAbove", "UniformRange", "NoError", "TrialConfig", "TrialStats",
    "sample_disturbance", "sample_single_error", "adversarial_epsilon",
    "run_campaign", "append_csv", "read_csv", "parse_magnitude", "CSV_HEADER",
]
