"""Dense real linear algebra and a small two-phase simplex solver.

Vectors and matrices are plain ``numpy`` float arrays.  The ``as_vector`` and
``as_matrix`` helpers are the single entry point for external data: they copy,
check the shape and reject NaN/Inf so that poisoned values fail immediately.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, DomainError, LpSolverError, RankError

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8
RANK_TOL = 1e-10


def as_vector(x, name: str = "vector") -> np.ndarray:
    """Return ``x`` as a finite 1-D float array (a read-only copy)."""
    arr = np.array(x, dtype=float)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D float array (a read-only copy).

    A 1-D input is read as a single row.
    """
    arr = np.array(a, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


def dot(x, z) -> float:
    x = as_vector(x, "x")
    z = as_vector(z, "z")
    if x.shape != z.shape:
        raise DimensionError(f"length mismatch: {x.size} vs {z.size}")
    return float(np.dot(x, z))


def euclidean_norm(x) -> float:
    x = as_vector(x, "x")
    return math.sqrt(float(np.dot(x, x)))


def systematic_nullspace(H, tol: float = RANK_TOL):
    """Null-space basis of a full-row-rank ``H`` in systematic form.

    Pivot columns are chosen scanning from the rightmost column leftwards with
    partial pivoting inside each column, so a parity-check matrix of the form
    ``[A | I]`` keeps the identity permutation.

    Parameters
    ----------
    H : array_like, shape (r, n)
        Parity-check matrix with rank ``r < n``.
    tol : float
        Relative threshold below which a candidate pivot counts as zero.

    Returns
    -------
    G : ndarray, shape (n - r, n)
        Rows span the null space of ``H``; ``H @ G.T`` vanishes.
    perm : tuple of int
        Column order (information positions first, then the pivot columns)
        under which ``G[:, perm] == [I_k | G']``.
    """
    H = as_matrix(H, "H")
    r, n = H.shape
    if r >= n:
        raise DomainError(f"need fewer rows than columns, got {r}x{n}")
    W = np.array(H, dtype=float)
    scale = float(np.max(np.abs(W))) if W.size else 0.0
    if scale == 0.0:
        raise RankError("H is the zero matrix")
    used = np.zeros(r, dtype=bool)
    pivot_cols = []
    for col in range(n - 1, -1, -1):
        if len(pivot_cols) == r:
            break
        cand = np.where(used, -1.0, np.abs(W[:, col]))
        i = int(np.argmax(cand))
        if cand[i] <= tol * scale:
            continue
        used[i] = True
        pivot_cols.append(col)
        W[i] /= W[i, col]
        others = np.arange(r) != i
        W[others] -= np.outer(W[others, col], W[i])
    if len(pivot_cols) < r:
        raise RankError(f"H has rank {len(pivot_cols)} < {r} rows")

    P = sorted(pivot_cols)
    F = [c for c in range(n) if c not in set(P)]
    HP = H[:, P]
    HF = H[:, F]
    R = np.linalg.solve(HP, HF)
    # one step of iterative refinement
    R = R + np.linalg.solve(HP, HF - HP @ R)
    k = n - r
    G = np.zeros((k, n))
    G[:, F] = np.eye(k)
    G[:, P] = -R.T
    G.setflags(write=False)
    return G, tuple(F + P)


# ---------------------------------------------------------------------------
# Linear programming
# ---------------------------------------------------------------------------

SENSES = ("<=", "=", ">=")


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LpProblem:
    """``maximize objective @ x`` subject to ``A @ x (senses) rhs`` and bounds.

    ``bounds`` is one ``(lower, upper)`` pair per variable, either side may be
    infinite.  The default bound is ``(0, inf)``.
    """

    objective: np.ndarray
    A: np.ndarray
    rhs: np.ndarray
    senses: tuple
    bounds: Optional[tuple] = None

    def __post_init__(self):
        c = as_vector(self.objective, "objective")
        A = np.array(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, c.size)
        if A.ndim != 2:
            raise DimensionError("A must be two-dimensional")
        if not np.all(np.isfinite(A)):
            raise DomainError("A has non-finite entries")
        A.setflags(write=False)
        b = np.array(self.rhs, dtype=float).reshape(-1)
        if not np.all(np.isfinite(b)):
            raise DomainError("rhs has non-finite entries")
        senses = tuple(self.senses)
        if A.shape[1] != c.size:
            raise DimensionError(f"A has {A.shape[1]} columns for {c.size} variables")
        if A.shape[0] != b.size or b.size != len(senses):
            raise DimensionError("A, rhs and senses disagree on the number of rows")
        bad = [s for s in senses if s not in SENSES]
        if bad:
            raise DomainError(f"unknown constraint sense {bad[0]!r}")
        if self.bounds is None:
            bounds = tuple((0.0, math.inf) for _ in range(c.size))
        else:
            bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
            if len(bounds) != c.size:
                raise DimensionError("one bound pair per variable required")
            for lo, hi in bounds:
                if math.isnan(lo) or math.isnan(hi) or lo > hi or lo == math.inf or hi == -math.inf:
                    raise DomainError(f"invalid bound ({lo}, {hi})")
        b.setflags(write=False)
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "rhs", b)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "bounds", bounds)

    @property
    def nvars(self) -> int:
        return self.objective.size


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    value: Optional[float] = None
    solution: Optional[np.ndarray] = None
    ray: Optional[np.ndarray] = None
    iterations: int = 0


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    factor = T[:, col].copy()
    factor[row] = 0.0
    T -= np.outer(factor, T[row])
    basis[row] = col


class _Tableau:
    """Dense simplex tableau; the last row holds reduced costs, last column rhs."""

    def __init__(self, A, b, basis):
        m, N = A.shape
        self.T = np.zeros((m + 1, N + 1))
        self.T[:m, :N] = A
        self.T[:m, N] = b
        self.basis = list(basis)
        self.iterations = 0

    @property
    def m(self):
        return self.T.shape[0] - 1

    def set_cost(self, cost):
        N = self.T.shape[1] - 1
        row = np.zeros(N + 1)
        row[:N] = cost
        cb = cost[self.basis]
        row -= cb @ self.T[: self.m]
        self.T[-1] = row

    def run(self, allowed, max_iter):
        """Minimize with Bland's rule; return ``None`` or an unbounded column."""
        T = self.T
        m = self.m
        while True:
            d = T[-1, :-1]
            cand = np.flatnonzero((d < -FEAS_TOL) & allowed)
            if cand.size == 0:
                return None
            col = int(cand[0])
            column = T[:m, col]
            pos = np.flatnonzero(column > PIVOT_TOL)
            if pos.size == 0:
                return col
            ratios = T[pos, -1] / column[pos]
            best = ratios.min()
            ties = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
            row = int(min(ties, key=lambda i: self.basis[i]))
            _pivot(T, self.basis, row, col)
            self.iterations += 1
            rhs = T[:m, -1]
            if rhs.min() < -FEAS_TOL * max(1.0, float(np.abs(rhs).max())):
                raise LpSolverError("basic solution lost feasibility during pivoting")
            np.maximum(rhs, 0.0, out=rhs)
            if self.iterations > max_iter:
                raise LpSolverError(f"no convergence after {max_iter} pivots")

    def drop_row(self, i):
        self.T = np.delete(self.T, i, axis=0)
        del self.basis[i]


def _standard_form(p: LpProblem):
    """Rewrite ``p`` over nonnegative variables ``z`` with ``x = offset + M z``."""
    nv = p.nvars
    offset = np.zeros(nv)
    cols = []  # (variable, coefficient)
    extra = []  # (z column, upper limit)
    for i, (lo, hi) in enumerate(p.bounds):
        if math.isfinite(lo):
            offset[i] = lo
            cols.append((i, 1.0))
            if math.isfinite(hi):
                extra.append((len(cols) - 1, hi - lo))
        elif math.isfinite(hi):
            offset[i] = hi
            cols.append((i, -1.0))
        else:
            cols.append((i, 1.0))
            cols.append((i, -1.0))
    M = np.zeros((nv, len(cols)))
    for j, (i, s) in enumerate(cols):
        M[i, j] = s
    A = p.A @ M
    b = p.rhs - p.A @ offset
    senses = list(p.senses)
    if extra:
        B = np.zeros((len(extra), len(cols)))
        for r, (j, up) in enumerate(extra):
            B[r, j] = 1.0
        A = np.vstack([A, B])
        b = np.concatenate([b, [up for _, up in extra]])
        senses += ["<="] * len(extra)
    return M, offset, A, b, senses


def _residuals(p: LpProblem, x):
    """Constraint violations of ``x`` together with per-row tolerances."""
    ax = p.A @ x
    viol = np.zeros(p.rhs.size)
    for i, s in enumerate(p.senses):
        if s == "<=":
            viol[i] = max(0.0, ax[i] - p.rhs[i])
        elif s == ">=":
            viol[i] = max(0.0, p.rhs[i] - ax[i])
        else:
            viol[i] = abs(ax[i] - p.rhs[i])
    tol = FEAS_TOL * (1.0 + np.abs(p.rhs) + np.abs(p.A) @ np.abs(x))
    lo = np.array([b[0] for b in p.bounds])
    hi = np.array([b[1] for b in p.bounds])
    bviol = np.maximum(np.maximum(lo - x, x - hi), 0.0)
    btol = FEAS_TOL * (1.0 + np.abs(x))
    return np.concatenate([viol, bviol]), np.concatenate([tol, btol])


def lp_solve(p: LpProblem, max_iter: Optional[int] = None) -> LpOutcome:
    """Solve ``p`` with a dense two-phase simplex using Bland's rule.

    The method is deterministic.  Optimal solutions are recomputed from the
    final basis and checked against the original constraints; unbounded rays
    are checked likewise.  A failed check raises :class:`LpSolverError`.
    """
    M, offset, A, b, senses = _standard_form(p)
    m, nz = A.shape
    neg = b < 0
    A = np.where(neg[:, None], -A, A)
    b = np.abs(b)
    senses = [
        {"<=": ">=", ">=": "<=", "=": "="}[s] if flip else s for s, flip in zip(senses, neg)
    ]
    n_slack = sum(s != "=" for s in senses)
    n_art = sum(s != "<=" for s in senses)
    N = nz + n_slack + n_art
    full = np.zeros((m, N))
    full[:, :nz] = A
    basis = []
    si, ai = nz, nz + n_slack
    for i, s in enumerate(senses):
        if s == "<=":
            full[i, si] = 1.0
            basis.append(si)
            si += 1
        elif s == ">=":
            full[i, si] = -1.0
            si += 1
            full[i, ai] = 1.0
            basis.append(ai)
            ai += 1
        else:
            full[i, ai] = 1.0
            basis.append(ai)
            ai += 1
    if max_iter is None:
        max_iter = 5000 + 50 * (m + N)

    tab = _Tableau(full, b, basis)
    artificial = np.zeros(N, dtype=bool)
    artificial[nz + n_slack:] = True
    rows_kept = list(range(m))

    if n_art:
        tab.set_cost(artificial.astype(float))
        tab.run(np.ones(N, dtype=bool), max_iter)
        infeas = -tab.T[-1, -1]
        if infeas > FEAS_TOL * max(1.0, float(b.max(initial=0.0))):
            return LpOutcome(LpStatus.INFEASIBLE, iterations=tab.iterations)
        i = 0
        while i < tab.m:
            if artificial[tab.basis[i]]:
                row = tab.T[i, :N]
                cand = np.flatnonzero((np.abs(row) > PIVOT_TOL) & ~artificial)
                if cand.size:
                    col = int(cand[np.argmax(np.abs(row[cand]))])
                    _pivot(tab.T, tab.basis, i, col)
                else:
                    tab.drop_row(i)
                    del rows_kept[i]
                    continue
            i += 1

    cost = np.zeros(N)
    cost[:nz] = -(p.objective @ M)
    tab.set_cost(cost)
    col = tab.run(~artificial, max_iter)

    if col is not None:
        dz = np.zeros(N)
        dz[col] = 1.0
        for i, bcol in enumerate(tab.basis):
            dz[bcol] = -tab.T[i, col]
        dx = M @ dz[:nz]
        dx = dx / max(float(np.abs(dx).max()), 1e-300)
        _check_ray(p, dx)
        return LpOutcome(LpStatus.UNBOUNDED, ray=dx, iterations=tab.iterations)

    z_tab = np.zeros(N)
    z_tab[tab.basis] = tab.T[:-1, -1]
    candidates = [z_tab]
    try:
        zb = np.linalg.solve(full[np.ix_(rows_kept, tab.basis)], b[rows_kept])
        z_re = np.zeros(N)
        z_re[tab.basis] = np.maximum(zb, 0.0)
        candidates.insert(0, z_re)
    except np.linalg.LinAlgError:
        pass
    best_x, best_excess = None, math.inf
    for z in candidates:
        x = offset + M @ z[:nz]
        viol, tol = _residuals(p, x)
        excess = float(np.max(viol / tol, initial=0.0))
        if excess < best_excess:
            best_x, best_excess = x, excess
    if best_excess > 1.0:
        raise LpSolverError("optimal basis does not satisfy the constraints to tolerance")
    best_x.setflags(write=False)
    value = float(np.dot(p.objective, best_x))
    return LpOutcome(LpStatus.OPTIMAL, value=value, solution=best_x, iterations=tab.iterations)


def _check_ray(p: LpProblem, dx):
    ad = p.A @ dx
    tol = 1e-7 * (1.0 + np.abs(p.A) @ np.abs(dx))
    for i, s in enumerate(p.senses):
        if (s == "<=" and ad[i] > tol[i]) or (s == ">=" and ad[i] < -tol[i]) or (
            s == "=" and abs(ad[i]) > tol[i]
        ):
            raise LpSolverError("unbounded direction violates a constraint")
    for (lo, hi), d in zip(p.bounds, dx):
        if (math.isfinite(lo) and d < -1e-7) or (math.isfinite(hi) and d > 1e-7):
            raise LpSolverError("unbounded direction violates a variable bound")
    if float(np.dot(p.objective, dx)) <= 0.0:
        raise LpSolverError("unbounded direction does not improve the objective")


def orthonormal_basis(V, tol: float = RANK_TOL):
    """Orthonormal basis for the span of the columns of ``V`` (QR based).

    Raises :class:`RankError` when the columns are linearly dependent.
    """
    V = np.asarray(V, dtype=float)
    if V.shape[1] == 0:
        return np.zeros((V.shape[0], 0))
    if V.shape[1] > V.shape[0]:
        raise RankError("more vectors than the ambient dimension")
    Q, R = np.linalg.qr(V)
    diag = np.abs(np.diag(R))
    scale = max(float(np.max(np.linalg.norm(V, axis=0))), 1e-300)
    if np.any(diag <= tol * scale):
        raise RankError("spanning vectors are linearly dependent")
    return Q


__all__: Sequence[str] = [
    "as_vector",
    "as_matrix",
    "dot",
    "euclidean_norm",
    "systematic_nullspace",
    "orthonormal_basis",
    "LpStatus",
    "LpProblem",
    "LpOutcome",
    "lp_solve",
    "PIVOT_TOL",
    "FEAS_TOL",
]
