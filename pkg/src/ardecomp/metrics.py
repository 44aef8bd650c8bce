"""Heterophily scores and first/second-order similarity on AR embeddings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllZeroSpectrum, EmptyRepelSpace, IndexOutOfRange, RankOutOfRange
from .netcore import ARDecomposition, Spectrum
from .spectral import ZERO_TOL


@dataclass(frozen=True, eq=False)
class HeterophilyReport:
    network_score: float
    node_scores: np.ndarray
    k_used: int


def network_heterophily(spec: Spectrum, k: int) -> float:
    """Share of the top-k absolute eigenvalue mass that is negative.

    Uses the |eigenvalue| ordering of ``spec``; the numerator sums
    magnitudes so the score lies in [0, 1]. Eigenvalues treated as zero by
    :func:`split_ar` count for neither sign.
    """
    if not 1 <= k <= spec.n:
        raise RankOutOfRange(f"k must lie in [1, {spec.n}], got {k}")
    top = np.abs(spec.eigenvalues).max()
    d = spec.eigenvalues[:k]
    d = d[np.abs(d) > ZERO_TOL * top]
    total = np.abs(d).sum()
    if total == 0.0:
        raise AllZeroSpectrum("top-k eigenvalues are all zero")
    return float(np.abs(d[d < 0]).sum() / total)


def embedding_heterophily(ar: ARDecomposition) -> float:
    """Network heterophily recovered from embeddings alone.

    Column ``j`` of an embedding is ``q_j sqrt(|d_j|)`` with unit ``q_j``,
    so its squared norm is ``|d_j|``.
    """
    pos = float((ar.attract**2).sum())
    neg = float((ar.repel**2).sum())
    if pos + neg == 0.0:
        raise AllZeroSpectrum("decomposition is empty")
    return neg / (pos + neg)


def node_heterophily(ar: ARDecomposition) -> np.ndarray:
    """Per-node ``||r_i|| / (||a_i|| + ||r_i||)``; 0 for all-zero rows."""
    a = np.linalg.norm(ar.attract, axis=1)
    r = np.linalg.norm(ar.repel, axis=1)
    den = a + r
    out = np.zeros(ar.n)
    nz = den > 0
    out[nz] = r[nz] / den[nz]
    return out


def heterophily_report(spec: Spectrum, ar: ARDecomposition, k: int) -> HeterophilyReport:
    return HeterophilyReport(network_heterophily(spec, k), node_heterophily(ar), k)


def _check_pair(ar, i, j):
    for t in (i, j):
        if not 0 <= t < ar.n:
            raise IndexOutOfRange(f"node {t} outside [0, {ar.n})")
    if i == j:
        raise ValueError("similarities are defined for distinct nodes")


def sim1(ar: ARDecomposition, i: int, j: int) -> float:
    """First-order similarity ``a_i.a_j - r_i.r_j`` (the implied edge weight)."""
    _check_pair(ar, i, j)
    return float(ar.attract[i] @ ar.attract[j] - ar.repel[i] @ ar.repel[j])


def sim2(ar: ARDecomposition, i: int, j: int) -> float:
    """Second-order similarity ``a_i.a_j + r_i.r_j``."""
    _check_pair(ar, i, j)
    return float(ar.attract[i] @ ar.attract[j] + ar.repel[i] @ ar.repel[j])


def substitute_score(ar: ARDecomposition, i: int, j: int) -> float:
    """``sim2 - sim1``: high for nodes sharing neighbours but not linked."""
    _check_pair(ar, i, j)
    return float(2.0 * (ar.repel[i] @ ar.repel[j]))


def repel_neighbors(ar: ARDecomposition, i: int, top_m: int = 3, metric: str = "cosine"):
    """Top ``top_m`` nodes by similarity of repel vectors to node ``i``.

    Returns a list of ``(node, score)``. Under ``cosine``, nodes with a zero
    repel vector are skipped. Ties go to the lower node index.
    """
    if ar.q == 0:
        raise EmptyRepelSpace("decomposition has no repel dimensions")
    if top_m < 1:
        raise ValueError("top_m must be at least 1")
    if not 0 <= i < ar.n:
        raise IndexOutOfRange(f"node {i} outside [0, {ar.n})")
    r = ar.repel
    scores = r @ r[i]
    valid = np.ones(ar.n, dtype=bool)
    valid[i] = False
    if metric == "cosine":
        norms = np.linalg.norm(r, axis=1)
        if norms[i] == 0.0:
            raise EmptyRepelSpace(f"node {i} has a zero repel vector")
        valid &= norms > 0
        with np.errstate(invalid="ignore", divide="ignore"):
            scores = scores / (norms * norms[i])
    elif metric != "dot":
        raise ValueError(f"metric must be 'cosine' or 'dot', not {metric!r}")
    cand = np.flatnonzero(valid)
    order = np.lexsort((cand, -scores[cand]))
    return [(int(cand[t]), float(scores[cand[t]])) for t in order[:top_m]]
