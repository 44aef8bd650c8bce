"""Signed eigendecomposition of a completed matrix into attract/repel parts."""

from __future__ import annotations

import csv
from typing import Iterable, Optional, Sequence

import numpy as np

from .complete import CompletionResult, SvtOptions, complete
from .errors import NumericalFailure, RankOutOfRange, ZeroNetwork
from .netcore import ARDecomposition, Spectrum, SymmetricNetwork, as_matrix

ZERO_TOL = 1e-8
TIE_TOL = 1e-10


def _order(w: np.ndarray) -> np.ndarray:
    """Descending |w|; near-equal magnitudes put positive first, then lower index."""
    mags = np.abs(w)
    top = mags.max() if mags.size else 0.0
    rough = np.argsort(-mags, kind="stable")
    out = []
    i = 0
    while i < len(rough):
        j = i + 1
        while j < len(rough) and mags[rough[i]] - mags[rough[j]] <= TIE_TOL * top:
            j += 1
        group = sorted(rough[i:j], key=lambda t: (w[t] < 0, t))
        out.extend(group)
        i = j
    return np.asarray(out, dtype=int)


def eigendecompose(completed) -> Spectrum:
    """Eigenpairs of a symmetric matrix, sorted by descending |eigenvalue|.

    Each eigenvector is signed so its first non-negligible component is
    positive.
    """
    if isinstance(completed, CompletionResult):
        completed = completed.completed
    m = as_matrix(completed)
    scale = max(np.abs(m).max(), 1.0)
    if np.abs(m - m.T).max() > 1e-10 * scale:
        raise ValueError("eigendecompose needs a symmetric matrix")
    m = (m + m.T) / 2.0
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(str(exc)) from None
    if not np.all(np.isfinite(w)):
        raise NumericalFailure("non-finite eigenvalues")
    order = _order(w)
    w = w[order]
    v = v[:, order]
    for j in range(v.shape[1]):
        col = v[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12 * np.abs(col).max())
        if nz.size and col[nz[0]] < 0:
            v[:, j] = -col
    return Spectrum(w, v)


def split_ar(spec: Spectrum, rank: Optional[int] = None) -> ARDecomposition:
    """Keep the ``rank`` largest-|eigenvalue| pairs and split them by sign.

    Positive eigenvalues give attract columns ``q * sqrt(d)``, negative ones
    repel columns ``q * sqrt(-d)``. Eigenvalues with ``|d| <= 1e-8 max|d|``
    are dropped whether or not ``rank`` reaches them.
    """
    n = spec.n
    if rank is not None and not 1 <= rank <= n:
        raise RankOutOfRange(f"rank must lie in [1, {n}], got {rank}")
    d = spec.eigenvalues
    q = spec.eigenvectors
    k = n if rank is None else rank
    top = np.abs(d).max() if n else 0.0
    kept = np.arange(k)
    kept = kept[np.abs(d[kept]) > ZERO_TOL * top] if top > 0 else kept[:0]
    pos = kept[d[kept] > 0]
    neg = kept[d[kept] < 0]
    attract = q[:, pos] * np.sqrt(d[pos])
    repel = q[:, neg] * np.sqrt(-d[neg])
    diagonal = (attract**2).sum(axis=1) - (repel**2).sum(axis=1)
    return ARDecomposition(attract, repel, diagonal, eigenvalues=d[kept])


def reconstruct(ar: ARDecomposition) -> np.ndarray:
    """``A A' - R R'``, including its natural diagonal."""
    m = ar.attract @ ar.attract.T - ar.repel @ ar.repel.T
    return (m + m.T) / 2.0


def reconstruction_error(net, ar: ARDecomposition, normalized: bool = True) -> float:
    """Squared off-diagonal error of ``ar`` against the network weights.

    With ``normalized`` the error is divided by the off-diagonal energy
    ``sum_{i != j} p_ij^2``; fidelity is one minus that value.
    """
    p = as_matrix(net)
    if p.shape[0] != ar.n:
        raise ValueError(f"network has {p.shape[0]} nodes, decomposition {ar.n}")
    off = ~np.eye(p.shape[0], dtype=bool)
    err = float(((p - reconstruct(ar))[off] ** 2).sum())
    if not normalized:
        return err
    energy = float((p[off] ** 2).sum())
    if energy == 0.0:
        raise ZeroNetwork("network has no off-diagonal weight to normalize by")
    return err / energy


def decompose(
    net: SymmetricNetwork,
    strategy: str = "nuclear_min",
    rank: Optional[int] = None,
    opts: Optional[SvtOptions] = None,
):
    """Complete, eigendecompose and split. Returns (completion, spectrum, ar)."""
    comp = complete(net, strategy, opts)
    spec = eigendecompose(comp.completed)
    return comp, spec, split_ar(spec, rank)


def rank_error_curve(
    net: SymmetricNetwork,
    strategy: str = "nuclear_min",
    k_range: Optional[Iterable[int]] = None,
    opts: Optional[SvtOptions] = None,
) -> list:
    """Normalized off-diagonal error at each k, for a single completion."""
    ks = list(range(1, net.n + 1)) if k_range is None else [int(k) for k in k_range]
    for k in ks:
        if not 1 <= k <= net.n:
            raise RankOutOfRange(f"k={k} outside [1, {net.n}]")
    spec = eigendecompose(complete(net, strategy, opts).completed)
    return [(k, reconstruction_error(net, split_ar(spec, k))) for k in ks]


def perfect_rank(net, spec: Spectrum, threshold: float = 1e-8) -> Optional[int]:
    """Smallest k whose normalized error falls below ``threshold``."""
    for k in range(1, spec.n + 1):
        if reconstruction_error(net, split_ar(spec, k)) < threshold:
            return k
    return None


def truncate_eig(m: np.ndarray, k: int) -> np.ndarray:
    """Rank-k truncation of a symmetric matrix via the sorted spectrum."""
    return reconstruct(split_ar(eigendecompose(m), k))


# ------------------------------------------------------------------ export


def save_embeddings(path, ar: ARDecomposition, labels: Optional[Sequence[str]] = None) -> None:
    labels = [str(i) for i in range(ar.n)] if labels is None else list(labels)
    header = (
        ["node"]
        + [f"a_{j + 1}" for j in range(ar.p)]
        + [f"r_{j + 1}" for j in range(ar.q)]
    )
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(ar.n):
            w.writerow(
                [labels[i]]
                + [repr(float(x)) for x in ar.attract[i]]
                + [repr(float(x)) for x in ar.repel[i]]
            )


def load_embeddings(path):
    """Read an embedding CSV. Returns (ar, labels)."""
    from .errors import MalformedFile

    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise MalformedFile(f"cannot read {path!r}: {exc.strerror}") from None
    if not rows or not rows[0] or rows[0][0] != "node":
        raise MalformedFile(f"{path}: missing 'node,a_1..,r_1..' header")
    header = rows[0]
    a_cols = [j for j, h in enumerate(header) if h.startswith("a_")]
    r_cols = [j for j, h in enumerate(header) if h.startswith("r_")]
    if len(a_cols) + len(r_cols) != len(header) - 1:
        raise MalformedFile(f"{path}: unexpected columns in header {header}")
    body = rows[1:]
    try:
        data = np.array([[float(x) for x in row[1:]] for row in body], dtype=np.float64)
    except ValueError as exc:
        raise MalformedFile(f"{path}: {exc}") from None
    if data.size == 0:
        data = data.reshape(len(body), len(header) - 1)
    labels = [row[0] for row in body]
    a = data[:, [j - 1 for j in a_cols]]
    r = data[:, [j - 1 for j in r_cols]]
    diag = (a**2).sum(axis=1) - (r**2).sum(axis=1)
    eig = np.concatenate([(a**2).sum(axis=0), -(r**2).sum(axis=0)])
    return ARDecomposition(a, r, diag, eigenvalues=eig), labels


def save_curve(path, rows: Iterable) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "error"])
        for k, e in rows:
            w.writerow([int(k), repr(float(e))])
