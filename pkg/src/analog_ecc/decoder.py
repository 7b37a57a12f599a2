"""Single-error decoding by syndrome correlation.

The decoder computes ``s = H y^T`` and the correlations ``xi_j = <s, h_j>``.
If no ``|xi_j|`` exceeds ``theta`` nothing is located; otherwise the position
of the largest ``|xi_j|`` (smallest index on ties) is returned.  It never
outputs the detection symbol.

:func:`check_contract` classifies an outcome against the correction contract
``Supp_Delta(e) <= D(y) <= Supp(e)``.  :func:`decode_feasibility` is an
LP-based reference decoder used to probe the threshold pair ``(delta,
Gamma * delta)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .code import AnalogCode, decoder_thresholds
from .errors import DimensionError
from .numerics import LpProblem, LpStatus, as_vector, lp_solve


@dataclass(frozen=True)
class DecodeResult:
    located: frozenset
    correlations: np.ndarray
    theta: float
    syndrome_norm: float


class ContractOutcome(str, enum.Enum):
    EXACT_WITHIN_SUPPORT = "ExactWithinSupport"
    VIOLATION_D1 = "ViolationD1"
    VIOLATION_D2 = "ViolationD2"


def syndrome(code: AnalogCode, y) -> np.ndarray:
    y = as_vector(y, "y")
    if y.size != code.n:
        raise DimensionError(f"received word has length {y.size}, code length is {code.n}")
    return code.H @ y


def correlations(code: AnalogCode, s) -> np.ndarray:
    s = as_vector(s, "s")
    if s.size != code.r:
        raise DimensionError(f"syndrome has length {s.size}, redundancy is {code.r}")
    return code.H.T @ s


def locate_batch(H: np.ndarray, Y: np.ndarray, theta: float):
    """Vectorized decoder over the rows of ``Y``.

    Returns the located position per row (``-1`` for none) and the
    correlation matrix.
    """
    S = Y @ H.T
    Xi = S @ H
    A = np.abs(Xi)
    j0 = np.argmax(A, axis=1)
    peak = A[np.arange(A.shape[0]), j0]
    located = np.where(peak > theta, j0, -1)
    return located, Xi


def decode_d1(code: AnalogCode, y, delta: float = 1.0) -> DecodeResult:
    """Locate at most one outlying error in ``y`` for disturbance bound ``delta``."""
    s = syndrome(code, y)
    xi = correlations(code, s)
    theta = decoder_thresholds(code.n, code.rho, delta).theta
    A = np.abs(xi)
    j0 = int(np.argmax(A))
    located = frozenset({j0}) if A[j0] > theta else frozenset()
    xi.setflags(write=False)
    return DecodeResult(located, xi, theta, float(np.linalg.norm(s)))


def check_contract(e, Delta: float, result) -> ContractOutcome:
    """Classify a decoder output against the error vector ``e``.

    ``result`` may be a :class:`DecodeResult` or any iterable of positions.
    """
    e = as_vector(e, "e")
    located = set(result.located if isinstance(result, DecodeResult) else result)
    support = set(np.flatnonzero(e != 0).tolist())
    big = set(np.flatnonzero(np.abs(e) > Delta).tolist())
    if not located <= support:
        return ContractOutcome.VIOLATION_D1
    if not big <= located:
        return ContractOutcome.VIOLATION_D2
    return ContractOutcome.EXACT_WITHIN_SUPPORT


def classify_batch(located: np.ndarray, j0: np.ndarray, err: np.ndarray, Delta: float):
    """Contract outcomes for single-error trials in bulk.

    ``err`` is the signed error value at ``j0`` (0 for no error).  Returns
    boolean masks ``(exact, safe_subset, violation_d1, violation_d2)`` which
    partition the trials; ``exact`` means ``D(y) == Supp(e)``.
    """
    has_err = err != 0
    big = np.abs(err) > Delta
    found = located >= 0
    v1 = found & (~has_err | (located != j0))
    v2 = ~v1 & big & (located != j0)
    ok = ~v1 & ~v2
    exact = ok & (found == has_err)
    safe = ok & ~exact
    return exact, safe, v1, v2


def decode_feasibility(code: AnalogCode, y, delta: float) -> frozenset:
    """Reference single-error decoder based on LP feasibility.

    Position ``j`` is a candidate when ``y = c + eps + z * 1_j`` has a solution
    with ``c`` in the code and ``|eps_i| <= delta``.  The output is the
    intersection of all candidate supports: empty if ``y`` is already within
    ``delta`` of the code or if two positions are candidates, otherwise the
    single candidate.  The true support is always a candidate, so the output
    never leaves ``Supp(e)``; it locates every error larger than
    ``2 (h_2 + 1) delta``.
    """
    y = as_vector(y, "y")
    if y.size != code.n:
        raise DimensionError(f"received word has length {y.size}, code length is {code.n}")
    if _within_box(code, y, delta, None):
        return frozenset()
    found = []
    for j in range(code.n):
        if _within_box(code, y, delta, j):
            found.append(j)
            if len(found) > 1:
                return frozenset()
    return frozenset(found)


def _within_box(code: AnalogCode, y: np.ndarray, delta: float, j) -> bool:
    # variables: message x (k, free) and optionally the error value z (free)
    G = code.G
    cols = [G.T]
    if j is not None:
        unit = np.zeros((code.n, 1))
        unit[j, 0] = 1.0
        cols.append(unit)
    M = np.hstack(cols)
    A = np.vstack([M, M])
    rhs = np.concatenate([y + delta, y - delta])
    senses = ("<=",) * code.n + (">=",) * code.n
    nv = M.shape[1]
    out = lp_solve(
        LpProblem(np.zeros(nv), A, rhs, senses, bounds=((-math.inf, math.inf),) * nv)
    )
    return out.status is LpStatus.OPTIMAL
