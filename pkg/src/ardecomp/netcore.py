"""Core network and embedding types, plus file input/output.

All matrices are dense float64. Nodes are indexed 0..n-1; external IDs live
in ``node_labels``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.io
import scipy.sparse

from .errors import (
    AsymmetricInput,
    MalformedFile,
    NegativeWeight,
    NonFiniteWeight,
)

FORMATS = ("edge_list", "coord_matrix", "dense_csv")

_FORMAT_ALIASES = {
    "edge_list": "edge_list",
    "edge-list": "edge_list",
    "edgelist": "edge_list",
    "coord_matrix": "coord_matrix",
    "coord": "coord_matrix",
    "mtx": "coord_matrix",
    "dense_csv": "dense_csv",
    "dense-csv": "dense_csv",
    "csv": "dense_csv",
}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SymmetricNetwork:
    """Symmetric n x n edge-weight matrix whose diagonal is a nuisance.

    Parameters
    ----------
    weights : array_like, shape (n, n)
        Edge weights. Must be exactly symmetric and finite.
    diagonal_observed : bool
        Whether the stored diagonal carries meaning. Networks leave this
        False; the diagonal is then ignored by every loss in the package.
    node_labels : sequence of str, optional
        External node identifiers, index-aligned with the rows.
    """

    weights: np.ndarray
    diagonal_observed: bool = False
    node_labels: Optional[tuple] = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weights must be square, got shape {w.shape}")
        if w.shape[0] < 2:
            raise ValueError("a network needs at least 2 nodes")
        if not np.all(np.isfinite(w)):
            raise NonFiniteWeight("weights contain NaN or infinite entries")
        if not np.array_equal(w, w.T):
            i, j = np.argwhere(w != w.T)[0]
            raise AsymmetricInput(
                f"weights[{i},{j}]={float(w[i, j])!r} but weights[{j},{i}]={w[j, i]!r}"
            )
        object.__setattr__(self, "weights", _frozen(w))
        if self.node_labels is not None:
            labels = tuple(str(s) for s in self.node_labels)
            if len(labels) != w.shape[0]:
                raise ValueError(
                    f"{len(labels)} node labels for {w.shape[0]} nodes"
                )
            object.__setattr__(self, "node_labels", labels)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def off_diagonal_mask(self) -> np.ndarray:
        return ~np.eye(self.n, dtype=bool)

    def label(self, i: int) -> str:
        return self.node_labels[i] if self.node_labels is not None else str(i)

    def labels(self) -> list:
        return [self.label(i) for i in range(self.n)]

    def index_of(self, label) -> int:
        """Map an external node ID (or a stringified index) to its row."""
        key = str(label)
        if self.node_labels is not None:
            try:
                return self.node_labels.index(key)
            except ValueError:
                pass
        try:
            i = int(key)
        except ValueError:
            raise KeyError(key) from None
        if self.node_labels is None and 0 <= i < self.n:
            return i
        raise KeyError(key)

    def with_diagonal(self, diagonal) -> "SymmetricNetwork":
        w = np.array(self.weights)
        np.fill_diagonal(w, diagonal)
        return SymmetricNetwork(w, self.diagonal_observed, self.node_labels)


@dataclass(frozen=True, eq=False)
class ARDecomposition:
    """Attract/repel embedding pair with its implied diagonal.

    ``attract`` is n x p, ``repel`` is n x q. Either may have zero columns.
    """

    attract: np.ndarray
    repel: np.ndarray
    diagonal: np.ndarray
    eigenvalues: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        a = np.asarray(self.attract, dtype=np.float64)
        r = np.asarray(self.repel, dtype=np.float64)
        if a.ndim != 2 or r.ndim != 2 or a.shape[0] != r.shape[0]:
            raise ValueError(
                f"attract {a.shape} and repel {r.shape} must be (n, p), (n, q)"
            )
        object.__setattr__(self, "attract", _frozen(a))
        object.__setattr__(self, "repel", _frozen(r))
        object.__setattr__(self, "diagonal", _frozen(self.diagonal))
        if self.eigenvalues is not None:
            object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues))

    @property
    def n(self) -> int:
        return self.attract.shape[0]

    @property
    def p(self) -> int:
        return self.attract.shape[1]

    @property
    def q(self) -> int:
        return self.repel.shape[1]

    @property
    def source_rank(self) -> int:
        return self.p + self.q


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenpairs sorted by descending absolute eigenvalue."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues))
        object.__setattr__(self, "eigenvectors", _frozen(self.eigenvectors))

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def assemble(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T


def as_matrix(net) -> np.ndarray:
    """Weights of a SymmetricNetwork, or the array itself."""
    if isinstance(net, SymmetricNetwork):
        return net.weights
    return np.asarray(net, dtype=np.float64)


def normalize_format(fmt: str) -> str:
    try:
        return _FORMAT_ALIASES[fmt]
    except KeyError:
        raise ValueError(
            f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}"
        ) from None


# ----------------------------------------------------------------- loading


def load_network(path, format: str = "edge_list") -> SymmetricNetwork:
    """Read a symmetric network from ``path``.

    Supported formats are ``edge_list`` (whitespace ``i j w`` lines),
    ``coord_matrix`` (Matrix Market coordinate, symmetric, 1-based) and
    ``dense_csv``. Missing edge-list pairs default to weight 0.
    """
    fmt = normalize_format(format)
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise MalformedFile(f"cannot read {path!r}: no such file")
    if fmt == "edge_list":
        return _load_edge_list(path)
    if fmt == "coord_matrix":
        return _load_coord(path)
    return _load_dense_csv(path)


def _parse_float(tok: str, where: str) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise MalformedFile(f"{where}: weight {tok!r} is not a number") from None
    if not np.isfinite(v):
        raise NonFiniteWeight(f"{where}: non-finite weight {tok!r}")
    return v


def _load_edge_list(path: str) -> SymmetricNetwork:
    n_declared = None
    rows = []
    seen_data = False
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("nodes:"):
                    try:
                        n_declared = int(body.split(":", 1)[1])
                    except ValueError:
                        raise MalformedFile(
                            f"{path}:{lineno}: bad node count {body!r}"
                        ) from None
                continue
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            if len(toks) not in (2, 3):
                raise MalformedFile(
                    f"{path}:{lineno}: expected 'i j w', got {line!r}"
                )
            if not seen_data and len(toks) == 3 and _is_header(toks):
                seen_data = True
                continue
            seen_data = True
            w = _parse_float(toks[2], f"{path}:{lineno}") if len(toks) == 3 else 1.0
            rows.append((toks[0], toks[1], w, lineno))

    ids = [t for r in rows for t in r[:2]]
    numeric = all(_is_int(t) for t in ids)
    if numeric:
        idx = {t: int(t) for t in ids}
        if any(v < 0 for v in idx.values()):
            raise MalformedFile(f"{path}: negative node index")
        n = max(idx.values(), default=-1) + 1
        labels = None
    else:
        order = list(dict.fromkeys(ids))
        idx = {t: i for i, t in enumerate(order)}
        n = len(order)
        labels = order
    if n_declared is not None:
        if n_declared < n:
            raise MalformedFile(f"{path}: '# nodes: {n_declared}' but saw {n} nodes")
        if labels is not None and n_declared != n:
            raise MalformedFile(f"{path}: node count mismatch for labelled nodes")
        n = n_declared
    if n < 2:
        raise MalformedFile(f"{path}: fewer than 2 nodes")

    w = np.zeros((n, n))
    filled = {}
    for a, b, v, lineno in rows:
        i, j = idx[a], idx[b]
        key = (min(i, j), max(i, j))
        if key in filled and filled[key] != v:
            raise AsymmetricInput(
                f"{path}:{lineno}: pair ({a}, {b}) has weight {v!r}, "
                f"previously {filled[key]!r}"
            )
        filled[key] = v
        w[i, j] = w[j, i] = v
    return SymmetricNetwork(w, node_labels=labels)


def _is_int(tok: str) -> bool:
    try:
        int(tok)
    except ValueError:
        return False
    return True


def _is_header(toks) -> bool:
    for t in toks:
        try:
            float(t)
        except ValueError:
            continue
        return False
    return True


def _load_coord(path: str) -> SymmetricNetwork:
    try:
        m = scipy.io.mmread(path)
    except Exception as exc:  # scipy raises a mix of ValueError/IndexError
        raise MalformedFile(f"{path}: {exc}") from None
    w = m.toarray() if scipy.sparse.issparse(m) else np.asarray(m)
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 2:
        raise MalformedFile(f"{path}: expected a square matrix, got {w.shape}")
    return SymmetricNetwork(w)


def _load_dense_csv(path: str) -> SymmetricNetwork:
    try:
        w = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise MalformedFile(f"{path}: {exc}") from None
    if w.shape[0] != w.shape[1] or w.shape[0] < 2:
        raise MalformedFile(f"{path}: expected n x n numbers, got {w.shape}")
    return SymmetricNetwork(w)


# ------------------------------------------------------------------ saving


def save_network(net: SymmetricNetwork, path, format: str = "edge_list") -> None:
    """Write ``net`` so that :func:`load_network` reproduces it exactly."""
    fmt = normalize_format(format)
    w = net.weights
    n = net.n
    if fmt == "edge_list":
        with open(path, "w") as fh:
            fh.write(f"# nodes: {n}\n")
            if net.node_labels is not None:
                # self-pairs first: fixes label order and keeps isolated nodes
                for i in range(n):
                    fh.write(f"{net.label(i)} {net.label(i)} {float(w[i, i])!r}\n")
            for i in range(n):
                start = i + 1 if net.node_labels is not None else i
                for j in range(start, n):
                    if w[i, j] != 0.0:
                        fh.write(f"{net.label(i)} {net.label(j)} {float(w[i, j])!r}\n")
    elif fmt == "coord_matrix":
        lower = scipy.sparse.coo_matrix(np.tril(w))
        # pass a handle: mmwrite appends ".mtx" to bare paths
        with open(path, "wb") as fh:
            scipy.io.mmwrite(fh, lower, symmetry="symmetric", precision=17)
    else:
        np.savetxt(path, w, delimiter=",", fmt="%.17g")


# -------------------------------------------------------------- transforms


def log1p_transform(net: SymmetricNetwork) -> SymmetricNetwork:
    """Replace every weight ``c`` with ``log(1 + c)``; used for skewed counts."""
    w = net.weights
    if np.any(w < 0):
        raise NegativeWeight("log1p transform needs nonnegative weights")
    return SymmetricNetwork(np.log1p(w), net.diagonal_observed, net.node_labels)

