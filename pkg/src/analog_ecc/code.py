"""Real linear codes described by a parity-check matrix with unit-norm columns.

Besides the :class:`AnalogCode` container this module holds the coherence
measures of the parity-check columns and the closed-form threshold and bound
formulas that depend only on ``n`` and the coherence.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionError, DomainError, RankError
from .numerics import RANK_TOL, as_matrix, as_vector, orthonormal_basis, systematic_nullspace

UNIT_NORM_TOL = 1e-10


def validate_unit_columns(H, tol: float = UNIT_NORM_TOL) -> list:
    """Indices of the columns of ``H`` whose Euclidean norm is not 1 within ``tol``."""
    H = as_matrix(H, "H")
    norms = np.linalg.norm(H, axis=0)
    return [int(j) for j in np.flatnonzero(np.abs(norms - 1.0) > tol)]


def pairwise_coherence(H):
    """Largest ``|<h_j, h_j'>|`` over distinct columns, with the first pair attaining it.

    Returns
    -------
    rho : float
    pair : tuple of int
        Lexicographically smallest ``(j, j')``, ``j < j'``, reaching ``rho``.
    """
    H = as_matrix(H, "H")
    n = H.shape[1]
    if n < 2:
        raise DomainError("coherence needs at least two columns")
    gram = np.abs(H.T @ H)
    iu = np.triu_indices(n, k=1)
    vals = gram[iu]
    idx = int(np.argmax(vals))  # row-major order of triu is lexicographic
    return float(vals[idx]), (int(iu[0][idx]), int(iu[1][idx]))


def subspace_coherence(H, j: int, Jprime) -> float:
    """Norm of the orthogonal projection of column ``j`` onto the span of ``Jprime``.

    This is the cosine of the principal angle between ``h_j`` and that span,
    i.e. the supremum of ``|<h_j, u>| / ||u||`` over nonzero ``u`` in it.  An
    empty ``Jprime`` gives 0.
    """
    H = as_matrix(H, "H")
    Jprime = list(Jprime)
    if j in Jprime:
        raise DomainError(f"column {j} must not belong to the spanning set")
    if not Jprime:
        return 0.0
    try:
        Q = orthonormal_basis(H[:, Jprime])
    except RankError as exc:
        raise RankError(str(exc), subset=Jprime) from None
    return float(np.linalg.norm(Q.T @ H[:, j]))


def coherence_profile(H, m: int) -> float:
    """Largest principal-angle cosine between a column and any ``m - 1`` others.

    For ``m = 2`` this is the pairwise coherence; for ``m = 1`` there is no
    subspace and the value is 0 by convention.  A dependent set of ``m``
    columns raises :class:`RankError` carrying that subset.
    """
    H = as_matrix(H, "H")
    n = H.shape[1]
    if m < 1:
        raise DomainError("m must be at least 1")
    if m == 1:
        return 0.0
    if m - 1 >= n:
        raise DomainError(f"m = {m} needs more than {n} columns")
    if m == 2:
        return pairwise_coherence(H)[0]
    best = 0.0
    for Jprime in itertools.combinations(range(n), m - 1):
        try:
            Q = orthonormal_basis(H[:, Jprime])
        except RankError:
            raise RankError(f"columns {Jprime} are linearly dependent", subset=Jprime) from None
        rest = np.setdiff1d(np.arange(n), Jprime)
        proj = np.linalg.norm(Q.T @ H[:, rest], axis=0)
        i = int(np.argmax(proj))
        if proj[i] >= 1.0 - RANK_TOL:
            subset = tuple(sorted(Jprime + (int(rest[i]),)))
            raise RankError(f"columns {subset} are linearly dependent", subset=subset)
        best = max(best, float(proj[i]))
    return best


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not (0.0 <= rho < 1.0):
        raise DomainError(f"coherence must lie in [0, 1), got {rho}")
    return rho


def gamma_upper_bound(n: int, rho_m: float) -> float:
    """Upper bound ``2n / sqrt(1 - rho_m^2)`` on the height-profile quantity."""
    rho = _check_rho(rho_m)
    return 2.0 * n / math.sqrt(1.0 - rho * rho)


@dataclass(frozen=True)
class BoundSet:
    """Thresholds of the single-error decoder for one code and noise bound."""

    m: int
    gamma_bound: float
    theta: float
    delta_threshold: float
    delta_unit: float


def decoder_thresholds(n: int, rho: float, delta: float = 1.0) -> BoundSet:
    """Decision threshold ``theta`` and outlier bound ``Delta`` for noise bound ``delta``.

    ``theta = delta * n * sqrt((1 + rho) / (1 - rho))`` and
    ``Delta = theta + delta * n``; both scale linearly with ``delta``.
    """
    rho = _check_rho(rho)
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    theta = delta * math.sqrt((1.0 + rho) / (1.0 - rho)) * n
    return BoundSet(
        m=2,
        gamma_bound=gamma_upper_bound(n, rho),
        theta=theta,
        delta_threshold=theta + delta * n,
        delta_unit=float(delta),
    )


@dataclass(frozen=True, eq=False)
class AnalogCode:
    """An ``[n, k]`` real code given by an ``r x n`` parity-check matrix.

    The generator ``G`` (rows spanning the null space of ``H``) and the
    pairwise column coherence ``rho`` are derived on construction.  The
    instance is immutable.
    """

    H: np.ndarray
    label: str = ""
    G: np.ndarray = field(init=False, repr=False)
    perm: tuple = field(init=False, repr=False)
    rho: float = field(init=False)
    rho_pair: tuple = field(init=False, repr=False)

    def __post_init__(self):
        H = as_matrix(self.H, "H")
        bad = validate_unit_columns(H)
        if bad:
            raise DomainError(f"columns {bad} of H do not have unit norm")
        rho, pair = pairwise_coherence(H)
        if rho >= 1.0:
            raise DomainError(f"columns {pair} are parallel (coherence {rho})")
        G, perm = systematic_nullspace(H)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "rho_pair", pair)

    @property
    def n(self) -> int:
        return self.H.shape[1]

    @property
    def r(self) -> int:
        return self.H.shape[0]

    @property
    def k(self) -> int:
        return self.n - self.r

    def thresholds(self, delta: float = 1.0) -> BoundSet:
        return decoder_thresholds(self.n, self.rho, delta)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "n": self.n,
            "k": self.k,
            "H": self.H.tolist(),
            "rho": self.rho,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnalogCode":
        code = cls(np.array(data["H"], dtype=float), label=str(data.get("label", "")))
        if "n" in data and int(data["n"]) != code.n:
            raise DimensionError(f"file says n = {data['n']} but H has {code.n} columns")
        if "k" in data and int(data["k"]) != code.k:
            raise DimensionError(f"file says k = {data['k']} but H gives k = {code.k}")
        if "rho" in data and abs(float(data["rho"]) - code.rho) > 1e-12:
            raise DomainError(f"stored rho {data['rho']} disagrees with H ({code.rho})")
        return code

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "AnalogCode":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def encode(code: AnalogCode, u) -> np.ndarray:
    """Codeword ``u @ G`` for a message ``u`` of length ``k``."""
    u = as_vector(u, "u")
    if u.size != code.k:
        raise DimensionError(f"message has length {u.size}, code dimension is {code.k}")
    return u @ code.G


def simplex_code(n: int, label: str | None = None) -> AnalogCode:
    """The ``[n, 1]`` repetition code.

    Its parity-check columns are the ``n`` vertices of a regular simplex
    centred at the origin in ``R^(n-1)``, which are unit vectors summing to
    zero, so the all-ones vector spans the null space.
    """
    if n < 2:
        raise DomainError("repetition code needs n >= 2")
    E = np.eye(n) - 1.0 / n  # centred standard basis, rank n-1
    U, s, _ = np.linalg.svd(E)
    V = (U[:, : n - 1] * s[: n - 1]).T  # coordinates in an orthonormal basis
    V /= np.linalg.norm(V, axis=0)
    return AnalogCode(V, label=label or f"repetition-n{n}")
