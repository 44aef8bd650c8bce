"""Synthetic networks with known answers, and independent rank oracles."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .complete import SvtOptions, complete_nuclear_min, complete_psd_nuclear_min
from .errors import NonPositiveDiagonal, NumericalFailure, ProbabilityOutOfRange
from .netcore import SymmetricNetwork
from .spectral import eigendecompose, perfect_rank


@dataclass(frozen=True, eq=False)
class BlockModel:
    """Stochastic block model: d x d connection matrix plus block sizes."""

    B: np.ndarray
    sizes: tuple

    def __post_init__(self):
        b = np.array(self.B, dtype=np.float64)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ValueError(f"B must be square, got {b.shape}")
        if not np.array_equal(b, b.T):
            raise ValueError("B must be symmetric")
        sizes = tuple(int(s) for s in self.sizes)
        if len(sizes) != b.shape[0]:
            raise ValueError(f"{len(sizes)} block sizes for a {b.shape[0]}-block B")
        if any(s < 1 for s in sizes):
            raise ValueError("every block needs at least one node")
        b.flags.writeable = False
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "sizes", sizes)

    @property
    def d(self) -> int:
        return self.B.shape[0]

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def membership(self) -> np.ndarray:
        return np.repeat(np.arange(self.d), self.sizes)


def generate_bipartite(n_per: int) -> SymmetricNetwork:
    """Complete bipartite graph K(n_per, n_per); nodes 0..n_per-1 form one side."""
    if n_per < 1:
        raise ValueError("n_per must be at least 1")
    n = 2 * n_per
    w = np.zeros((n, n))
    w[:n_per, n_per:] = 1.0
    w[n_per:, :n_per] = 1.0
    return SymmetricNetwork(w)


def generate_sandwich(M: int):
    """Every (bread, meat) order exactly once.

    Returns ``(D, C)``: ``D`` is the M^2 x 2M purchase matrix (breads in the
    first M columns, meats in the last M) and ``C = D'D`` the item
    co-occurrence matrix.
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    D = np.zeros((M * M, 2 * M))
    for row, (bread, meat) in enumerate(np.ndindex(M, M)):
        D[row, bread] = 1.0
        D[row, M + meat] = 1.0
    return D, D.T @ D


def generate_block_diag_matrix(a, b) -> np.ndarray:
    """``[[diag(a), J], [J, diag(b)]]`` with J the all-ones n x n block."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError("a and b must have the same length")
    if np.any(a <= 0) or np.any(b <= 0):
        raise NonPositiveDiagonal("diagonal entries must be positive")
    n = a.shape[0]
    m = np.ones((2 * n, 2 * n))
    m[:n, :n] = np.diag(a)
    m[n:, n:] = np.diag(b)
    return m


def block_diag_ratio(a, b) -> float:
    """``(sum 1/a_i)(sum 1/b_j)``; the block matrix is singular iff this is 1."""
    return float(np.sum(1.0 / np.asarray(a, float)) * np.sum(1.0 / np.asarray(b, float)))


def rank_oracle(matrix, rel_tol: Optional[float] = None) -> int:
    """Numerical rank from a full SVD.

    Counts singular values above ``rel_tol * sigma_max``; the default
    tolerance is ``1e-9 * max(shape)``.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if not np.all(np.isfinite(m)):
        raise NumericalFailure("matrix has non-finite entries")
    if m.size == 0:
        return 0
    if rel_tol is None:
        rel_tol = 1e-9 * max(m.shape)
    try:
        s = np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(str(exc)) from None
    if s[0] == 0.0:
        return 0
    return int((s > rel_tol * s[0]).sum())


def expand_sbm(
    model: BlockModel, mode: str = "expected", seed: Optional[int] = None
) -> SymmetricNetwork:
    """Node-level network implied by a block model.

    ``expected`` gives ``p_ij = B[block(i), block(j)]`` off the diagonal.
    ``sampled`` draws independent Bernoulli edges for i < j and mirrors them.
    The diagonal is left at zero.
    """
    z = model.membership()
    probs = model.B[np.ix_(z, z)]
    if mode == "expected":
        w = probs.copy()
    elif mode == "sampled":
        if np.any(model.B < 0) or np.any(model.B > 1):
            raise ProbabilityOutOfRange("sampled mode needs B entries in [0, 1]")
        rng = np.random.default_rng(seed)
        draws = rng.random(probs.shape) < probs
        upper = np.triu(draws, 1).astype(np.float64)
        w = upper + upper.T
    else:
        raise ValueError(f"mode must be 'expected' or 'sampled', not {mode!r}")
    np.fill_diagonal(w, 0.0)
    return SymmetricNetwork(w)


@dataclass(frozen=True)
class PsdWitness:
    is_psd: bool
    violated_minor: Optional[tuple] = None
    minor_det: Optional[float] = None


def minor2(B, i, j) -> float:
    return float(B[i, i] * B[j, j] - B[i, j] ** 2)


def minor3(B, i, j, k) -> float:
    """Determinant of the (i, j, k) principal minor, by cofactor expansion."""
    return float(
        B[i, i] * (B[j, j] * B[k, k] - B[j, k] ** 2)
        - B[i, j] * (B[i, j] * B[k, k] - B[j, k] * B[k, i])
        + B[i, k] * (B[i, j] * B[j, k] - B[j, j] * B[i, k])
    )


def sbm_psd_witness(model, tol: float = 1e-10) -> PsdWitness:
    """PSD test of B with a small-minor certificate when it fails.

    PSD-ness is decided by the smallest eigenvalue. All 2x2 and then 3x3
    principal minors are scanned; the first negative one is reported. A
    non-PSD B can still have no negative minor of size <= 3.
    """
    B = model.B if isinstance(model, BlockModel) else np.asarray(model, float)
    is_psd = bool(np.linalg.eigvalsh(B)[0] >= -tol)
    d = B.shape[0]
    for idx in combinations(range(d), 2):
        det = minor2(B, *idx)
        if det < -tol:
            return PsdWitness(is_psd, idx, det)
    for idx in combinations(range(d), 3):
        det = minor3(B, *idx)
        if det < -tol:
            return PsdWitness(is_psd, idx, det)
    return PsdWitness(is_psd)


def sbm_rank_check(
    model: BlockModel, mode: str = "ar", opts: Optional[SvtOptions] = None
) -> Optional[int]:
    """Smallest rank at which the expected SBM is represented perfectly.

    ``ar`` uses the nuclear-norm completion, ``a_only`` the PSD one.
    "Perfectly" means normalized off-diagonal error below 1e-8.
    """
    net = expand_sbm(model, "expected")
    if mode == "ar":
        comp = complete_nuclear_min(net, opts)
    elif mode == "a_only":
        comp = complete_psd_nuclear_min(net, opts)
    else:
        raise ValueError(f"mode must be 'ar' or 'a_only', not {mode!r}")
    return perfect_rank(net, eigendecompose(comp.completed))


def random_block_matrix(
    d: int, kind: str, rng: np.random.Generator, low: float = 0.5, high: float = 1.5
) -> np.ndarray:
    """Random symmetric full-rank B with eigenvalue magnitudes in [low, high].

    ``kind="psd"`` makes all eigenvalues positive; ``"indefinite"`` makes
    at least one negative and at least one positive.
    """
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    mags = rng.uniform(low, high, d)
    if kind == "psd":
        signs = np.ones(d)
    elif kind == "indefinite":
        if d < 2:
            raise ValueError("an indefinite B needs d >= 2")
        n_neg = int(rng.integers(1, d))
        signs = np.array([-1.0] * n_neg + [1.0] * (d - n_neg))
    else:
        raise ValueError(f"kind must be 'psd' or 'indefinite', not {kind!r}")
    b = (q * (signs * mags)) @ q.T
    return (b + b.T) / 2.0


def planted_signed_matrix(
    n: int,
    n_pos: int,
    n_neg: int,
    noise: float = 0.0,
    seed: Optional[int] = None,
) -> SymmetricNetwork:
    """``sum x x' - sum z z'`` with Gaussian factors plus symmetric noise.

    The diagonal is kept (``diagonal_observed=True``) so the planted rank is
    exact for the full matrix.
    """
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, n_pos))
    z = rng.standard_normal((n, n_neg))
    m = x @ x.T - z @ z.T
    if noise > 0:
        e = np.triu(rng.normal(0.0, noise, (n, n)))
        m = m + e + np.triu(e, 1).T
    m = (m + m.T) / 2.0
    return SymmetricNetwork(m, diagonal_observed=True)


def block_model_from_dict(spec: dict) -> BlockModel:
    return BlockModel(np.asarray(spec["B"], dtype=np.float64), tuple(spec["sizes"]))


def sizes_for(n: int, d: int) -> tuple:
    """Split n nodes into d near-equal blocks."""
    base, extra = divmod(n, d)
    return tuple(base + (1 if i < extra else 0) for i in range(d))

