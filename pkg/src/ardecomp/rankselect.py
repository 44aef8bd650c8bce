"""Embedding rank selection by Gabriel-style bi-cross-validation."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DegenerateBlock, FoldTooLarge, RankOutOfRange
from .netcore import as_matrix

PINV_RTOL = 1e-10


@dataclass(frozen=True)
class LossRow:
    k: int
    mean_loss: float
    skipped_folds: int


class BcvResult(NamedTuple):
    k_best: int
    loss_table: list


def fold_assignment(n: int, folds: int, seed: int, repeat: int = 0) -> list:
    """Random partition of ``range(n)`` into ``folds`` near-equal groups.

    ``repeat > 0`` draws an independent extra partition from the same seed.
    """
    rng = np.random.default_rng(seed if repeat == 0 else [seed, repeat])
    perm = rng.permutation(n)
    return [np.sort(f) for f in np.array_split(perm, folds)]


def max_rank(n: int, folds: int) -> int:
    return n - math.ceil(n / folds) - 1


class HeldOutBlock:
    """Gabriel estimator for one held-out (row fold, column fold) pair.

    The estimate of ``X[I, J]`` is ``X[I, J^c] pinv_k(X[I^c, J^c]) X[I^c, J]``.
    Only the kept entries are read; ``X[I, J]`` never enters the fit.
    """

    def __init__(self, x: np.ndarray, rows: np.ndarray, cols: np.ndarray):
        n = x.shape[0]
        keep_r = np.setdiff1d(np.arange(n), rows)
        keep_c = np.setdiff1d(np.arange(n), cols)
        self.left = x[np.ix_(rows, keep_c)]
        self.right = x[np.ix_(keep_r, cols)]
        u, s, vt = np.linalg.svd(x[np.ix_(keep_r, keep_c)], full_matrices=False)
        self.u, self.s, self.vt = u, s, vt
        cutoff = PINV_RTOL * s[0] if s.size and s[0] > 0 else np.inf
        self.rank = int((s > cutoff).sum())
        # factor the products once; each k is then a cheap partial sum
        self._lv = self.left @ vt.T
        self._ur = u.T @ self.right

    def estimate(self, k: int) -> np.ndarray:
        if k > self.rank:
            raise ValueError(f"kept block has rank {self.rank} < {k}")
        return (self._lv[:, :k] / self.s[:k]) @ self._ur[:k]


def bcv_select_rank(
    net,
    folds: int = 10,
    k_grid: Optional[Sequence[int]] = None,
    seed: int = 0,
    repeats: int = 1,
) -> BcvResult:
    """Pick the rank with the lowest mean held-out squared error.

    Rows and columns share one random partition of the nodes. Every ordered
    pair of folds is held out in turn; diagonal cells of the matrix are
    excluded from the loss. The matrix is used as stored (including whatever
    diagonal it carries). A fold pair whose kept block has numerical rank
    below ``k`` is skipped for that ``k`` and counted in ``skipped_folds``;
    a ``k`` skipped everywhere gets ``mean_loss = nan``.

    ``repeats > 1`` pools the losses over that many independent partitions,
    which lowers the variance of the loss curve. The default is one.

    Returns
    -------
    BcvResult
        ``(k_best, loss_table)`` where ``loss_table`` is a list of
        :class:`LossRow`. Ties in loss go to the smaller ``k``.
    """
    x = as_matrix(net)
    n = x.shape[0]
    if folds < 2:
        raise FoldTooLarge("need at least 2 folds")
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    if folds > n / 2:
        raise FoldTooLarge(f"{folds} folds is more than n/2 = {n / 2:g}")
    kmax = max_rank(n, folds)
    ks = list(range(1, kmax + 1)) if k_grid is None else sorted({int(k) for k in k_grid})
    if not ks or ks[0] < 1 or ks[-1] > kmax:
        raise RankOutOfRange(f"k_grid must lie in [1, {kmax}]")

    sse = np.zeros(len(ks))
    cells = np.zeros(len(ks))
    skipped = np.zeros(len(ks), dtype=int)
    for rep in range(repeats):
        parts = fold_assignment(n, folds, seed, rep)
        for rows in parts:
            for cols in parts:
                block = HeldOutBlock(x, rows, cols)
                truth = x[np.ix_(rows, cols)]
                mask = rows[:, None] != cols[None, :]
                ncells = int(mask.sum())
                for t, k in enumerate(ks):
                    if k > block.rank:
                        skipped[t] += 1
                        continue
                    diff = (truth - block.estimate(k))[mask]
                    sse[t] += float(diff @ diff)
                    cells[t] += ncells

    if skipped.any():
        warnings.warn(
            DegenerateBlock(
                f"{int(skipped.sum())} (fold pair, k) evaluations skipped "
                "for rank-deficient kept blocks"
            ),
            stacklevel=2,
        )
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(cells > 0, sse / np.where(cells > 0, cells, 1), np.nan)
    table = [LossRow(k, float(m), int(s)) for k, m, s in zip(ks, mean, skipped)]
    finite = [r for r in table if math.isfinite(r.mean_loss)]
    if not finite:
        raise RankOutOfRange("no k could be evaluated on any fold")
    best = min(finite, key=lambda r: (r.mean_loss, r.k))
    return BcvResult(best.k, table)


def normalized_rank(k: int, n: int) -> float:
    return k / n


def save_loss_table(path, table) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "mean_loss", "skipped_folds"])
        for row in table:
            w.writerow([row.k, repr(row.mean_loss), row.skipped_folds])
