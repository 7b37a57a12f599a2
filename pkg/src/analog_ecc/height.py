"""m-heights of vectors and of codes.

The exact code height is the maximum over a finite family of linear programs.
Fix the set ``B`` of the ``m`` positions meant to hold the largest magnitudes,
the position ``a`` of the maximum and the signs on ``B``.  Scaling so the
largest magnitude outside ``B`` is at most 1, the program

    maximize c_a  subject to  sign_j c_j >= 1 (j in B),  |c_j| <= 1 (j not in B),
    c = x G

returns the best ratio for that pattern, and is unbounded exactly when some
nonzero codeword is supported inside ``B``.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .code import AnalogCode
from .errors import BudgetExceededError, DomainError
from .numerics import LpProblem, LpStatus, as_vector, lp_solve

DEFAULT_LP_BUDGET = 10**6
SAMPLE_CHUNK = 4096
REFINE_CANDIDATES = 8


def m_height_vector(c, m: int) -> float:
    """Ratio of the largest to the ``(m+1)``-th largest magnitude of ``c``.

    The zero vector has height 0; otherwise the height is infinite when fewer
    than ``m + 1`` entries are nonzero.
    """
    c = as_vector(c, "c")
    if m < 0:
        raise DomainError("m must be nonnegative")
    mags = np.sort(np.abs(c))[::-1]
    if mags.size == 0 or mags[0] == 0.0:
        return 0.0
    if m >= mags.size or mags[m] == 0.0:
        return math.inf
    return float(mags[0] / mags[m])


def gamma_of(h: float) -> float:
    """``2 (h + 1)``; infinity stays infinite."""
    h = float(h)
    if math.isnan(h) or h < 0:
        raise DomainError(f"height must be nonnegative, got {h}")
    return math.inf if math.isinf(h) else 2.0 * (h + 1.0)


@dataclass
class HeightReport:
    m: int
    value: float
    method: str
    certificate: np.ndarray
    lps_solved: int = 0
    unbounded: int = 0
    pattern: tuple = field(default=None, repr=False)

    @property
    def gamma(self) -> float:
        return gamma_of(self.value)

    def to_dict(self) -> dict:
        def num(v):
            return "inf" if math.isinf(v) else v

        return {
            "m": self.m,
            "value": num(self.value),
            "gamma": num(self.gamma),
            "method": self.method,
            "certificate": [float(v) for v in self.certificate],
            "lps_solved": self.lps_solved,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HeightReport":
        return cls(
            m=int(data["m"]),
            value=float(data["value"]),
            method=str(data["method"]),
            certificate=np.array(data["certificate"], dtype=float),
            lps_solved=int(data.get("lps_solved", 0)),
        )


def height_lp(G: np.ndarray, B, a: int, signs) -> LpProblem:
    """The pattern LP over message variables ``x`` (free) for one ``(B, a, signs)``."""
    k, n = G.shape
    B = list(B)
    out = [j for j in range(n) if j not in set(B)]
    GB = G[:, B].T * np.asarray(signs, dtype=float)[:, None]
    Gout = G[:, out].T
    A = np.vstack([GB, Gout, -Gout])
    rhs = np.concatenate([np.ones(len(B)), np.ones(len(out)), np.ones(len(out))])
    senses = (">=",) * len(B) + ("<=",) * (2 * len(out))
    return LpProblem(
        objective=G[:, a],
        A=A,
        rhs=rhs,
        senses=senses,
        bounds=((-math.inf, math.inf),) * k,
    )


def enumeration_size(n: int, m: int) -> int:
    return math.comb(n, m) * m * 2 ** (m - 1)


def _patterns(n: int, m: int):
    for B in itertools.combinations(range(n), m):
        for a in B:
            others = [j for j in B if j != a]
            for tail in itertools.product((1.0, -1.0), repeat=m - 1):
                sign = dict(zip(others, tail))
                sign[a] = 1.0
                yield B, a, tuple(sign[j] for j in B)


def _support_certificate(c: np.ndarray) -> np.ndarray:
    """Clear round-off entries of a codeword found along an unbounded ray."""
    c = np.array(c)
    c[np.abs(c) <= 1e-9 * np.abs(c).max()] = 0.0
    return c


def _solve_patterns(G, patterns):
    """Best finite optimum over ``patterns``; stops at the first unbounded one."""
    best = (-math.inf, None, None)
    solved = 0
    for B, a, signs in patterns:
        out = lp_solve(height_lp(G, B, a, signs))
        solved += 1
        if out.status is LpStatus.UNBOUNDED:
            return ("unbounded", (B, a, signs), _support_certificate(out.ray @ G), solved)
        if out.status is LpStatus.OPTIMAL and out.value > best[0]:
            best = (out.value, (B, a, signs), out.solution @ G)
    return ("finite", best[1], best, solved)


def _worker_count(workers):
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("ANALOG_ECC_THREADS")
    return max(1, int(env)) if env else 1


def _check_m(code: AnalogCode, m: int):
    if m < 1:
        raise DomainError("m must be at least 1")
    if m > code.r:
        raise DomainError(
            f"m = {m} exceeds the redundancy r = {code.r}; the height is infinite by definition"
        )


def m_height_exact(code: AnalogCode, m: int, budget: int = DEFAULT_LP_BUDGET, workers=None) -> HeightReport:
    """Exact ``h_m`` of ``code`` by solving every pattern LP.

    Parameters
    ----------
    code : AnalogCode
    m : int
        Height index, ``1 <= m <= r``.
    budget : int
        Maximum number of LPs; larger enumerations raise
        :class:`BudgetExceededError` before any work is done.
    workers : int, optional
        Worker processes for the enumeration (default: ``ANALOG_ECC_THREADS``
        or 1).  The result does not depend on this value.
    """
    _check_m(code, m)
    total = enumeration_size(code.n, m)
    if total > budget:
        raise BudgetExceededError(
            f"exact m-height needs {total} LPs, budget is {budget}", count=total
        )
    G = np.array(code.G)
    patterns = list(_patterns(code.n, m))
    nw = min(_worker_count(workers), max(1, len(patterns)))
    if nw == 1:
        results = [_solve_patterns(G, patterns)]
    else:
        size = math.ceil(len(patterns) / nw)
        chunks = [patterns[i : i + size] for i in range(0, len(patterns), size)]
        with ProcessPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(_solve_patterns, [G] * len(chunks), chunks))

    solved = 0
    best_val, best_pat, best_c = -math.inf, None, None
    for kind, pat, payload, count in results:
        solved += count
        if kind == "unbounded":
            return HeightReport(m, math.inf, "ExactLP", payload, solved, 1, pat)
        val, _, c = payload
        if val > best_val:
            best_val, best_pat, best_c = val, pat, c
    if best_c is None:
        raise DomainError("no pattern LP was feasible")
    # the optimum codeword attains the LP value; report the height it realizes
    value = m_height_vector(best_c, m)
    return HeightReport(m, value, "ExactLP", best_c, solved, 0, best_pat)


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _batch_heights(C: np.ndarray, m: int) -> np.ndarray:
    mags = -np.sort(-np.abs(C), axis=1)
    top = mags[:, 0]
    ref = mags[:, m] if m < C.shape[1] else np.zeros(C.shape[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        h = np.where(ref > 0, top / np.where(ref > 0, ref, 1.0), np.inf)
    return np.where(top == 0, 0.0, h)


def _pattern_of(c: np.ndarray, m: int):
    order = np.argsort(-np.abs(c), kind="stable")
    B = tuple(sorted(int(j) for j in order[:m]))
    a = int(order[0])
    s0 = 1.0 if c[a] >= 0 else -1.0
    signs = tuple(s0 * (1.0 if c[j] >= 0 else -1.0) for j in B)
    return B, a, signs


def m_height_sample(code: AnalogCode, m: int, trials: int, seed: int = 0, refine: bool = True) -> HeightReport:
    """Lower bound on ``h_m`` from random codewords plus LP refinement.

    Messages are i.i.d. standard normal, drawn in fixed-size chunks whose
    seeds derive from ``seed`` and the chunk index.  The best few sampled
    codewords are then improved by solving the pattern LP of their own
    support and sign pattern.  The reported value is the height of the
    returned certificate, so it never exceeds the exact height.
    """
    _check_m(code, m)
    if trials < 1:
        raise DomainError("trials must be at least 1")
    G = np.array(code.G)
    keep_h = np.empty(0)
    keep_c = np.empty((0, code.n))
    for index, start in enumerate(range(0, trials, SAMPLE_CHUNK)):
        size = min(SAMPLE_CHUNK, trials - start)
        X = _chunk_rng(seed, index).standard_normal((size, code.k))
        C = X @ G
        h = _batch_heights(C, m)
        keep_h = np.concatenate([keep_h, h])
        keep_c = np.vstack([keep_c, C])
        order = np.argsort(-keep_h, kind="stable")[:REFINE_CANDIDATES]
        keep_h, keep_c = keep_h[order], keep_c[order]

    best_c = keep_c[0]
    best_val = m_height_vector(best_c, m)
    pattern = None
    lps = 0
    if refine and math.isfinite(best_val):
        for c in keep_c:
            B, a, signs = _pattern_of(c, m)
            out = lp_solve(height_lp(G, B, a, signs))
            lps += 1
            if out.status is LpStatus.UNBOUNDED:
                cand = _support_certificate(out.ray @ G)
            elif out.status is LpStatus.OPTIMAL:
                cand = out.solution @ G
            else:
                continue
            val = m_height_vector(cand, m)
            if val > best_val:
                best_val, best_c, pattern = val, cand, (B, a, signs)
    return HeightReport(m, best_val, "Sampled", best_c, lps, 0, pattern)
