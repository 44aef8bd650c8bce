"""Choosing the nuisance diagonal.

The network fixes every off-diagonal entry; only the diagonal is free. The
default strategy picks the diagonal of smallest nuclear norm, solved with
singular value thresholding. Two solver variants are provided:

``"alm"`` (default)
    Augmented-Lagrangian thresholding with the off-diagonal constraint
    enforced exactly at the fixed point. Converges to the true
    nuclear-norm minimizer.
``"svt"``
    Classic singular value thresholding (Cai, Candes & Shen). Solves the
    proxy ``min tau*||X||_* + 0.5*||X||_F^2``, whose diagonal is biased
    toward zero by roughly ``X_ii / tau``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .errors import LengthMismatch, NotConverged, NumericalFailure
from .netcore import SymmetricNetwork

STRATEGIES = (
    "nuclear_min",
    "psd_nuclear_min",
    "zero_diagonal",
    "degree_diagonal",
    "fixed",
)

_STRATEGY_ALIASES = {
    "nuclear_min": "nuclear_min",
    "nuclear-min": "nuclear_min",
    "ar": "nuclear_min",
    "psd_nuclear_min": "psd_nuclear_min",
    "psd-nuclear-min": "psd_nuclear_min",
    "a_only": "psd_nuclear_min",
    "zero_diagonal": "zero_diagonal",
    "zero-diag": "zero_diagonal",
    "zero_diag": "zero_diagonal",
    "degree_diagonal": "degree_diagonal",
    "degree-diag": "degree_diagonal",
    "degree_diag": "degree_diagonal",
    "uspectral": "degree_diagonal",
}


def normalize_strategy(name: str) -> str:
    try:
        return _STRATEGY_ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown completion strategy {name!r}") from None


@dataclass(frozen=True)
class SvtOptions:
    """Solver settings. ``None`` fields are filled from the matrix size.

    Defaults for ``method="svt"``: ``tau = 5n``, ``step = 1.2 n^2/(n^2-n)``,
    ``tol = 1e-4``. For ``method="alm"``: ``tau = ||P_off||_2 / n``,
    ``step = 1``, ``tol = 1e-9``. ``max_iter`` defaults to 10000 for both.
    """

    tau: Optional[float] = None
    step: Optional[float] = None
    max_iter: int = 10000
    tol: Optional[float] = None
    method: str = "alm"

    def __post_init__(self):
        if self.method not in ("alm", "svt"):
            raise ValueError(f"method must be 'alm' or 'svt', not {self.method!r}")
        if self.tau is not None and not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.step is not None and not self.step > 0:
            raise ValueError("step must be positive")
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")

    def resolved(self, off: np.ndarray) -> "SvtOptions":
        """Concrete options for an off-diagonal-only matrix ``off``."""
        n = off.shape[0]
        if self.method == "svt":
            tau = 5.0 * n if self.tau is None else self.tau
            step = 1.2 * n * n / (n * n - n) if self.step is None else self.step
            tol = 1e-4 if self.tol is None else self.tol
        else:
            if self.tau is None:
                scale = np.linalg.norm(off, 2)
                tau = scale / n if scale > 0 else 1.0
            else:
                tau = self.tau
            step = 1.0 if self.step is None else self.step
            tol = 1e-9 if self.tol is None else self.tol
        return replace(self, tau=float(tau), step=float(step), tol=float(tol))


@dataclass(frozen=True, eq=False)
class CompletionResult:
    completed: np.ndarray
    diagonal: np.ndarray
    nuclear_norm: float
    iterations: int
    residual: float
    strategy: str
    converged: bool = True

    def report(self) -> dict:
        """Serializable summary record."""
        return {
            "strategy": self.strategy,
            "iterations": int(self.iterations),
            "residual": float(self.residual),
            "converged": bool(self.converged),
            "nuclear_norm": float(self.nuclear_norm),
            "diagonal": [float(v) for v in self.diagonal],
        }


def nuclear_norm(m: np.ndarray) -> float:
    """Sum of singular values; for symmetric input, sum of |eigenvalues|."""
    return float(np.abs(_eigvalsh(m)).sum())


def _eigh(m):
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from None
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(v))):
        raise NumericalFailure("eigendecomposition produced non-finite values")
    return w, v


def _eigvalsh(m):
    try:
        w = np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from None
    if not np.all(np.isfinite(w)):
        raise NumericalFailure("eigendecomposition produced non-finite values")
    return w


def _shrink(y: np.ndarray, tau: float, psd: bool) -> np.ndarray:
    # prox of tau*||.||_* (or tau*trace + PSD indicator) on a symmetric matrix
    w, v = _eigh(y)
    if psd:
        s = np.maximum(w - tau, 0.0)
    else:
        s = np.sign(w) * np.maximum(np.abs(w) - tau, 0.0)
    keep = s != 0.0
    vk = v[:, keep]
    x = (vk * s[keep]) @ vk.T
    return (x + x.T) / 2.0


def _off(m: np.ndarray) -> np.ndarray:
    out = np.array(m, dtype=np.float64)
    np.fill_diagonal(out, 0.0)
    return out


def _solve(net: SymmetricNetwork, opts: Optional[SvtOptions], psd: bool):
    p_off = _off(net.weights)
    opts = (opts or SvtOptions()).resolved(p_off)
    denom = np.linalg.norm(p_off)
    if denom == 0.0:
        return np.zeros_like(p_off), 0, 0.0, True
    if opts.method == "svt":
        return _svt_loop(p_off, denom, opts, psd)
    return _alm_loop(p_off, denom, opts, psd)


def _svt_loop(p_off, denom, opts, psd):
    y = np.zeros_like(p_off)
    x = y
    residual = np.inf
    for it in range(1, opts.max_iter + 1):
        x = _shrink(y, opts.tau, psd)
        r = _off(p_off - x)
        residual = np.linalg.norm(r) / denom
        if residual <= opts.tol:
            return x, it, residual, True
        y = y + opts.step * r
    return x, opts.max_iter, residual, False


def _alm_loop(p_off, denom, opts, psd):
    # scaled-form ADMM on  min ||X||_*  s.t.  X = Z,  Z_off = P_off
    z = p_off.copy()
    u = np.zeros_like(p_off)
    x = z
    residual = np.inf
    diag = np.diag_indices_from(z)
    for it in range(1, opts.max_iter + 1):
        x = _shrink(z - u, opts.tau, psd)
        z_prev_diag = z[diag].copy()
        z = p_off.copy()
        z[diag] = x[diag] + u[diag]
        u = u + opts.step * (x - z)
        residual = np.linalg.norm(_off(p_off - x)) / denom
        drift = np.linalg.norm(z[diag] - z_prev_diag) / denom
        if residual <= opts.tol and drift <= opts.tol:
            return x, it, residual, True
    return x, opts.max_iter, residual, False


def _finish(net, x, iterations, residual, converged, strategy, psd):
    completed = np.array(net.weights)
    np.fill_diagonal(completed, np.diag(x))
    if psd:
        # snapping the off-diagonal can leave a tiny negative eigenvalue
        lam = _eigvalsh(completed)[0]
        if lam < 0.0:
            completed[np.diag_indices_from(completed)] -= lam
    if not converged:
        warnings.warn(
            NotConverged(
                f"{strategy}: residual {residual:.3g} after {iterations} iterations"
            ),
            stacklevel=3,
        )
    return CompletionResult(
        completed=completed,
        diagonal=np.diag(completed).copy(),
        nuclear_norm=nuclear_norm(completed),
        iterations=iterations,
        residual=float(residual),
        strategy=strategy,
        converged=converged,
    )


def complete_nuclear_min(
    net: SymmetricNetwork, opts: Optional[SvtOptions] = None
) -> CompletionResult:
    """Diagonal of minimal nuclear norm, off-diagonal held at the input.

    After the solver stops, the off-diagonal entries are replaced with the
    exact inputs and the diagonal is taken from the solver iterate. A
    ``NotConverged`` warning is issued (and ``converged`` set False) when
    ``max_iter`` is reached first.
    """
    x, it, res, ok = _solve(net, opts, psd=False)
    return _finish(net, x, it, res, ok, "nuclear_min", psd=False)


def complete_psd_nuclear_min(
    net: SymmetricNetwork, opts: Optional[SvtOptions] = None
) -> CompletionResult:
    """Smallest-trace positive semidefinite completion (A-only model).

    Same solver as :func:`complete_nuclear_min` with negative eigenvalues
    clipped inside every thresholding step. If snapping the off-diagonal
    leaves a slightly negative eigenvalue, the diagonal is raised by that
    amount so the result is PSD.
    """
    x, it, res, ok = _solve(net, opts, psd=True)
    return _finish(net, x, it, res, ok, "psd_nuclear_min", psd=True)


def complete_fixed(
    net: SymmetricNetwork, strategy: Union[str, np.ndarray] = "zero_diagonal"
) -> CompletionResult:
    """Complete with a prescribed diagonal.

    ``strategy`` is ``"zero_diagonal"``, ``"degree_diagonal"`` (row sums of
    the off-diagonal, the unsigned Laplacian diagonal) or an explicit
    length-n vector.
    """
    p_off = _off(net.weights)
    if isinstance(strategy, str):
        name = normalize_strategy(strategy)
        if name == "zero_diagonal":
            diag = np.zeros(net.n)
        elif name == "degree_diagonal":
            diag = p_off.sum(axis=1)
        else:
            raise ValueError(f"complete_fixed cannot run strategy {strategy!r}")
    else:
        name = "fixed"
        diag = np.asarray(strategy, dtype=np.float64).ravel()
        if diag.shape[0] != net.n:
            raise LengthMismatch(f"diagonal has {diag.shape[0]} entries, need {net.n}")
    completed = p_off
    np.fill_diagonal(completed, diag)
    return CompletionResult(
        completed=completed,
        diagonal=diag.copy(),
        nuclear_norm=nuclear_norm(completed),
        iterations=0,
        residual=0.0,
        strategy=name,
    )


def shift_to_psd(net: SymmetricNetwork) -> CompletionResult:
    """Constant diagonal shift that makes the zero-diagonal matrix PSD.

    Starting from the off-diagonal with a zero diagonal, every diagonal entry
    is raised by the magnitude of the most negative eigenvalue (if any). The
    result is a valid, generally high-rank, A-only completion.
    """
    p_off = _off(net.weights)
    lam = _eigvalsh(p_off)[0]
    shift = -lam if lam < 0 else 0.0
    res = complete_fixed(net, np.full(net.n, shift))
    return res


def complete(
    net: SymmetricNetwork, strategy: str = "nuclear_min", opts: Optional[SvtOptions] = None
) -> CompletionResult:
    """Dispatch on a strategy name."""
    name = normalize_strategy(strategy)
    if name == "nuclear_min":
        return complete_nuclear_min(net, opts)
    if name == "psd_nuclear_min":
        return complete_psd_nuclear_min(net, opts)
    return complete_fixed(net, name)
