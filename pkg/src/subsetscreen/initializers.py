"""Classical screeners used as entry points for the thresholded search.

Marginal-correlation ranking (single-shot and iterated against the
running residual) and exact greedy forward stepwise selection.  Each
returns least-squares refits so the iterative drivers can start from
them directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SparseCoef, refit_subset, rss
from .numerics import StandardizedProblem

__all__ = ["FsStep", "FsPath", "sis", "isis", "forward_stepwise"]

# A residualized column whose remaining squared norm falls below this
# fraction of its original one is numerically inside the selected span.
SPAN_RTOL2 = 1e-20

# Downdated squared norms below this fraction of the original are
# recomputed exactly: the running subtraction accumulates rounding noise
# of roughly eps * n per step, far above SPAN_RTOL2.
NORM_RECOMPUTE_RTOL2 = 1e-8


@dataclass(frozen=True, eq=False)
class FsStep:
    """One stepwise addition: the index added, the active set after it,
    the dense least-squares refit, and its residual sum of squares."""

    added: int
    active: tuple[int, ...]
    coef: np.ndarray
    rss: float


@dataclass(frozen=True, eq=False)
class FsPath:
    """Nested forward-stepwise submodels of sizes 1..len(steps).

    ``truncated`` is set when the rank budget ran out before reaching
    ``max_size``.
    """

    steps: tuple[FsStep, ...]
    max_size: int
    truncated: bool

    def coef_at(self, size: int) -> SparseCoef:
        """Least-squares estimator of the size-``size`` prefix."""
        step = self.steps[size - 1]
        return SparseCoef.from_dense(step.coef, size)


def _eligible_scores(problem: StandardizedProblem, scores: np.ndarray) -> np.ndarray:
    scores = scores.astype(float, copy=True)
    scores[problem.degenerate] = -np.inf
    return scores


def sis(problem: StandardizedProblem, M: int) -> SparseCoef:
    """Marginal-correlation screening: top-M |X'y| with a refit.

    The active set holds the M indices of largest |X'y| (ties toward the
    smaller index, flagged degenerate columns excluded); coefficients are
    the minimum-norm least-squares refit on that set.
    """
    if not 1 <= M <= problem.p:
        raise ValueError("M must be in [1, p]")
    scores = _eligible_scores(problem, np.abs(problem.xty))
    order = np.argsort(-scores, kind="stable")
    take = min(M, int(np.sum(np.isfinite(scores))))
    active = np.sort(order[:take])
    return refit_subset(problem, active, M)


def isis(problem: StandardizedProblem, M: int, batch: int | None = None) -> SparseCoef:
    """Iterated marginal screening against the running residual.

    Repeatedly ranks the not-yet-selected columns by |X'r| for the
    current residual r, admits the top ``batch`` (fewer on the last
    round), and refits least squares on the union, until exactly M
    columns are active.  ``batch=None`` uses max(1, ceil(M/5));
    ``batch=M`` reduces to single-shot screening.
    """
    if not 1 <= M <= problem.p:
        raise ValueError("M must be in [1, p]")
    if batch is None:
        batch = max(1, math.ceil(M / 5))
    if not 1 <= batch <= M:
        raise ValueError("batch must be in [1, M]")

    active = np.zeros(0, dtype=int)
    residual = problem.y
    coef = SparseCoef.zeros(problem.p, M)
    while active.size < M:
        scores = _eligible_scores(problem, np.abs(problem.X.T @ residual))
        if active.size:
            scores[active] = -np.inf
        eligible = int(np.sum(np.isfinite(scores)))
        take = min(batch, M - active.size, eligible)
        if take == 0:
            break
        order = np.argsort(-scores, kind="stable")
        active = np.sort(np.concatenate([active, order[:take]]))
        coef = refit_subset(problem, active, M)
        residual = problem.y - problem.X[:, active] @ coef.beta[active]
    return coef


def forward_stepwise(problem: StandardizedProblem, max_size: int) -> FsPath:
    """Exact greedy stepwise selection, recorded as a nested path.

    Each step adds the column giving the largest drop in the residual sum
    of squares given the current set, computed exactly by residualizing
    the remaining candidates against the selected span (ties toward the
    smaller index).  Every prefix is recorded with its least-squares
    refit.  If the candidates run out of numerical rank before
    ``max_size`` the path truncates and is flagged.
    """
    n, p = problem.n, problem.p
    if not 1 <= max_size <= min(n - 1, p):
        raise ValueError("max_size must be in [1, min(n - 1, p)]")

    Z = problem.X.copy()
    norms2 = np.einsum("ij,ij->j", Z, Z)
    residual = problem.y.copy()
    selected = np.zeros(p, dtype=bool)
    active: list[int] = []
    steps: list[FsStep] = []
    truncated = False
    thresh = SPAN_RTOL2 * n

    for k in range(1, max_size + 1):
        eligible = (~selected) & (norms2 > thresh)
        if not eligible.any():
            truncated = True
            break
        gains = Z.T @ residual
        denom = np.where(eligible, norms2, 1.0)
        scores = np.where(eligible, gains * gains / denom, -np.inf)
        j = int(np.argmax(scores))

        q = Z[:, j] / np.linalg.norm(Z[:, j])
        w = q @ Z
        Z -= np.outer(q, w)
        norms2 = np.maximum(norms2 - w * w, 0.0)
        Z[:, j] = 0.0
        norms2[j] = 0.0
        residual -= q * (q @ residual)
        selected[j] = True
        stale = (~selected) & (norms2 < NORM_RECOMPUTE_RTOL2 * n)
        if stale.any():
            norms2[stale] = np.einsum("ij,ij->j", Z[:, stale], Z[:, stale])

        active.append(j)
        snapshot = np.sort(np.asarray(active))
        coef = refit_subset(problem, snapshot, k)
        steps.append(
            FsStep(
                added=j,
                active=tuple(int(i) for i in snapshot),
                coef=coef.beta,
                rss=rss(problem, coef),
            )
        )

    return FsPath(steps=tuple(steps), max_size=max_size, truncated=truncated)
