import json
import warnings

import numpy as np
import pytest

from ardecomp.complete import (
    SvtOptions,
    complete,
    complete_fixed,
    complete_nuclear_min,
    complete_psd_nuclear_min,
    nuclear_norm,
    shift_to_psd,
)
from ardecomp.errors import LengthMismatch, NotConverged
from ardecomp.netcore import SymmetricNetwork
from ardecomp.synth import generate_bipartite, generate_block_diag_matrix, rank_oracle

from conftest import random_symmetric


def off(m):
    return m[~np.eye(m.shape[0], dtype=bool)]


def diagonal_probe(m, h=1e-4):
    """Smallest one-sided finite-difference slope of ||.||_* along +-e_i e_i'."""
    base = nuclear_norm(m)
    worst = np.inf
    for i in range(m.shape[0]):
        for sgn in (1.0, -1.0):
            bumped = m.copy()
            bumped[i, i] += sgn * h
            worst = min(worst, (nuclear_norm(bumped) - base) / h)
    return worst


def cvxpy_nuclear_min(p, psd=False):
    cp = pytest.importorskip("cvxpy")
    n = p.shape[0]
    d = cp.Variable(n)
    m = p - np.diag(np.diag(p)) + cp.diag(d)
    if psd:
        x = cp.Variable((n, n), PSD=True)
        prob = cp.Problem(cp.Minimize(cp.trace(x)), [x == m])
    else:
        prob = cp.Problem(cp.Minimize(cp.normNuc(m)))
    prob.solve(solver="SCS", eps=1e-9, max_iters=200000)
    return prob.value, d.value


# ---------------------------------------------------------------- nuclear_min


def test_two_node_scan_oracle():
    # oracle: 1-D scan of ||[[d,1],[1,d]]||_* over the symmetric family
    ds = np.linspace(-3, 3, 6001)
    vals = np.array([nuclear_norm(np.array([[d, 1.0], [1.0, d]])) for d in ds])
    best = vals.min()
    flat = ds[vals <= best + 1e-12]
    assert best == pytest.approx(2.0, abs=1e-12)
    assert flat.min() == pytest.approx(-1.0, abs=1e-3)
    assert flat.max() == pytest.approx(1.0, abs=1e-3)

    res = complete_nuclear_min(SymmetricNetwork(np.array([[0, 1.0], [1.0, 0]])))
    assert res.nuclear_norm == pytest.approx(best, abs=1e-8)
    d0, d1 = res.diagonal
    assert d0 == pytest.approx(d1, abs=1e-8)
    assert abs(d0) <= 1.0 + 1e-8


def test_rank_one_psd_consistent(rng):
    x = rng.uniform(0.5, 1.5, 5)
    p = np.outer(x, x)
    np.fill_diagonal(p, 0.0)
    res = complete_nuclear_min(SymmetricNetwork(p))
    assert np.max(np.abs(res.diagonal - x**2)) < 1e-4
    assert abs(res.nuclear_norm - x @ x) < 1e-4
    assert res.converged


def test_zero_off_diagonal():
    res = complete_nuclear_min(SymmetricNetwork(np.zeros((4, 4))))
    assert np.array_equal(res.diagonal, np.zeros(4))
    assert res.nuclear_norm == 0.0


@pytest.mark.parametrize("n", [6, 10])
def test_matches_cvxpy(rng, n):
    p = random_symmetric(rng, n)
    ours = complete_nuclear_min(SymmetricNetwork(p))
    ref, _ = cvxpy_nuclear_min(p)
    assert ours.nuclear_norm == pytest.approx(ref, rel=1e-5)
    # the reference is a feasible point, so ours cannot be meaningfully worse
    assert ours.nuclear_norm <= ref * (1 + 1e-6)


def test_optimality_probe(rng):
    p = random_symmetric(rng, 20)
    res = complete_nuclear_min(SymmetricNetwork(p))
    assert diagonal_probe(res.completed) >= -5e-3


def test_off_diagonal_snapped_exactly(rng):
    p = random_symmetric(rng, 12)
    for strategy in ("nuclear_min", "psd_nuclear_min", "zero_diagonal", "degree_diagonal"):
        res = complete(SymmetricNetwork(p), strategy)
        assert np.array_equal(off(res.completed), off(p)), strategy
        assert np.array_equal(res.completed, res.completed.T)
        assert np.array_equal(np.diag(res.completed), res.diagonal)


def test_deterministic(rng):
    net = SymmetricNetwork(random_symmetric(rng, 15))
    a = complete_nuclear_min(net)
    b = complete_nuclear_min(net)
    assert np.array_equal(a.completed, b.completed)
    assert a.iterations == b.iterations


def test_classic_svt_is_feasible_but_biased():
    net = generate_bipartite(4)
    res = complete_nuclear_min(net, SvtOptions(method="svt"))
    assert res.converged
    assert res.residual <= 1e-4
    assert np.array_equal(off(res.completed), off(net.weights))
    # symmetric problem: the proxy optimum is the exact one, diagonal 0
    assert np.max(np.abs(res.diagonal)) < 1e-2


def test_not_converged_flag():
    net = generate_bipartite(3)
    with pytest.warns(NotConverged):
        res = complete_psd_nuclear_min(net, SvtOptions(max_iter=2))
    assert not res.converged
    assert res.iterations == 2


def test_invalid_options():
    for kwargs in ({"tau": 0}, {"step": -1}, {"tol": 0}, {"method": "sdp"}, {"max_iter": 0}):
        with pytest.raises(ValueError):
            SvtOptions(**kwargs)


# ------------------------------------------------------------ psd_nuclear_min


def test_psd_het_fig_rank():
    res = complete_psd_nuclear_min(generate_bipartite(4))
    assert rank_oracle(res.completed) >= 2 * 4 - 1
    lam = np.linalg.eigvalsh(res.completed)
    assert lam[0] >= -1e-8 * np.abs(lam).max()


def test_psd_inactive_on_psd_consistent_input(rng):
    x = rng.uniform(0.5, 1.5, 5)
    p = np.outer(x, x)
    np.fill_diagonal(p, 0.0)
    a = complete_nuclear_min(SymmetricNetwork(p))
    b = complete_psd_nuclear_min(SymmetricNetwork(p))
    assert np.max(np.abs(a.completed - b.completed)) < 1e-6


def test_psd_zero():
    res = complete_psd_nuclear_min(SymmetricNetwork(np.zeros((3, 3))))
    assert np.array_equal(res.completed, np.zeros((3, 3)))


@pytest.mark.parametrize("seed", range(3))
def test_psd_invariant_and_cvxpy(seed):
    rng = np.random.default_rng(seed)
    p = random_symmetric(rng, 8)
    res = complete_psd_nuclear_min(SymmetricNetwork(p))
    lam = np.linalg.eigvalsh(res.completed)
    assert lam[0] >= -1e-8 * np.abs(lam).max()
    ref, _ = cvxpy_nuclear_min(p, psd=True)
    assert res.nuclear_norm == pytest.approx(ref, rel=1e-5)


# ----------------------------------------------------------------- fixed


def test_degree_diagonal_het_fig(het_fig):
    res = complete_fixed(het_fig, "degree_diagonal")
    assert np.array_equal(res.diagonal, np.full(8, 4.0))


def test_zero_diagonal(rng):
    p = random_symmetric(rng, 5) + np.diag(np.arange(5.0))
    res = complete_fixed(SymmetricNetwork(p), "zero_diagonal")
    assert np.array_equal(np.diag(res.completed), np.zeros(5))


@pytest.mark.parametrize("value", [4.0, 5.0])
def test_explicit_diagonal_matches_block_matrix(het_fig, value):
    res = complete_fixed(het_fig, np.full(8, value))
    expected = generate_block_diag_matrix(np.full(4, value), np.full(4, value))
    assert np.array_equal(res.completed, expected)
    assert res.strategy == "fixed"


def test_explicit_length_mismatch(het_fig):
    with pytest.raises(LengthMismatch):
        complete_fixed(het_fig, np.ones(7))


# ----------------------------------------------------------- cross-strategy


@pytest.mark.parametrize("seed", range(4))
def test_nuclear_min_is_smallest(seed):
    rng = np.random.default_rng(seed)
    net = SymmetricNetwork(random_symmetric(rng, 10))
    best = complete_nuclear_min(net).nuclear_norm
    for strategy in ("psd_nuclear_min", "zero_diagonal", "degree_diagonal"):
        other = complete(net, strategy).nuclear_norm
        assert best <= other * (1 + 1e-6), strategy


def test_shift_to_psd(rng):
    net = SymmetricNetwork(random_symmetric(rng, 9))
    res = shift_to_psd(net)
    assert np.linalg.eigvalsh(res.completed)[0] >= -1e-10
    assert np.array_equal(off(res.completed), off(net.weights))
    assert np.ptp(res.diagonal) == 0.0


def test_report_is_json(het_fig):
    rec = complete_nuclear_min(het_fig).report()
    back = json.loads(json.dumps(rec))
    assert back["strategy"] == "nuclear_min"
    assert set(back) >= {"strategy", "iterations", "residual", "nuclear_norm", "diagonal"}
