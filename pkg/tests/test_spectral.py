import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ardecomp.complete import complete_fixed, complete_nuclear_min, nuclear_norm, shift_to_psd
from ardecomp.errors import RankOutOfRange, ZeroNetwork
from ardecomp.netcore import ARDecomposition, SymmetricNetwork
from ardecomp.spectral import (
    eigendecompose,
    load_embeddings,
    rank_error_curve,
    reconstruct,
    reconstruction_error,
    save_curve,
    save_embeddings,
    split_ar,
)
from ardecomp.synth import generate_bipartite

from conftest import random_symmetric

SQ = 1 / np.sqrt(2)


def zero_diag_spectrum(net):
    return eigendecompose(complete_fixed(net, "zero_diagonal").completed)


def test_identity():
    spec = eigendecompose(np.eye(3))
    assert np.allclose(spec.eigenvalues, 1.0)


def test_het_fig_spectrum_by_direct_multiplication(het_fig):
    p = het_fig.weights
    # oracle: the all-ones vector and the side-signed vector are eigenvectors
    ones = np.ones(8)
    signed = np.r_[np.ones(4), -np.ones(4)]
    assert np.array_equal(p @ ones, 4 * ones)
    assert np.array_equal(p @ signed, -4 * signed)
    spec = eigendecompose(p)
    assert spec.eigenvalues[0] == pytest.approx(4.0, abs=1e-12)
    assert spec.eigenvalues[1] == pytest.approx(-4.0, abs=1e-12)
    assert np.allclose(spec.eigenvalues[2:], 0.0, atol=1e-12)


def test_two_by_two():
    spec = eigendecompose(np.array([[0, 1.0], [1.0, 0]]))
    assert np.allclose(spec.eigenvalues, [1.0, -1.0])
    ar = split_ar(spec)
    assert (ar.p, ar.q) == (1, 1)
    assert np.allclose(np.abs(ar.attract[:, 0]), [SQ, SQ])
    assert np.allclose(ar.repel[:, 0] * np.sign(ar.repel[0, 0]), [SQ, -SQ])


def test_spectrum_invariants(rng):
    m = random_symmetric(rng, 12) + np.diag(rng.normal(size=12))
    spec = eigendecompose(m)
    q = spec.eigenvectors
    assert np.allclose(q.T @ q, np.eye(12), atol=1e-8)
    rel = np.linalg.norm(spec.assemble() - m) / np.linalg.norm(m)
    assert rel < 1e-8
    assert np.all(np.diff(np.abs(spec.eigenvalues)) <= 1e-12)
    for j in range(12):
        col = q[:, j]
        first = col[np.abs(col) > 1e-12 * np.abs(col).max()][0]
        assert first > 0


def test_tie_break_prefers_positive():
    spec = eigendecompose(np.diag([-2.0, 2.0, 1.0]))
    assert list(spec.eigenvalues) == [2.0, -2.0, 1.0]


def test_het_fig_k2_reproduces_exactly(het_fig):
    ar = split_ar(zero_diag_spectrum(het_fig), 2)
    assert (ar.p, ar.q) == (1, 1)
    assert reconstruction_error(het_fig, ar) < 1e-10
    # agrees with the explicit witness up to sign
    assert np.allclose(np.abs(ar.attract), SQ)
    assert np.allclose(np.abs(ar.repel), SQ)
    witness = ARDecomposition(np.full((8, 1), SQ), np.r_[-np.ones(4), np.ones(4)][:, None] * SQ, np.zeros(8))
    assert reconstruction_error(het_fig, witness) < 1e-30


def test_psd_input_gives_attract_only(rng):
    x = rng.normal(size=(6, 3))
    ar = split_ar(eigendecompose(x @ x.T))
    assert ar.q == 0 and ar.p == 3


def test_rank_out_of_range(het_fig):
    spec = zero_diag_spectrum(het_fig)
    for k in (0, 9):
        with pytest.raises(RankOutOfRange):
            split_ar(spec, k)


def test_reconstruct_examples(rng):
    empty = ARDecomposition(np.zeros((4, 0)), np.zeros((4, 0)), np.zeros(4))
    assert np.array_equal(reconstruct(empty), np.zeros((4, 4)))
    x = rng.normal(size=(5, 1))
    one = ARDecomposition(x, np.zeros((5, 0)), (x**2).ravel())
    assert np.allclose(reconstruct(one), x @ x.T, atol=1e-15)
    m = random_symmetric(rng, 10) + np.diag(rng.normal(size=10))
    back = reconstruct(split_ar(eigendecompose(m)))
    assert np.linalg.norm(back - m) / np.linalg.norm(m) < 1e-8


def test_error_examples(het_fig):
    spec = zero_diag_spectrum(het_fig)
    # oracle: rank-1 part is 0.5 everywhere; off the diagonal that leaves
    # 32 cross cells at (1-0.5)^2 and 24 same-side cells at 0.5^2, over 32
    v_plus = np.full(8, 1 / np.sqrt(8))
    approx = 4 * np.outer(v_plus, v_plus)
    mask = ~np.eye(8, dtype=bool)
    expected = ((het_fig.weights - approx)[mask] ** 2).sum() / (het_fig.weights[mask] ** 2).sum()
    assert expected == pytest.approx(14 / 32, abs=1e-15)
    ar1 = split_ar(spec, 1)
    assert (ar1.p, ar1.q) == (1, 0)
    assert reconstruction_error(het_fig, ar1) == pytest.approx(expected, abs=1e-12)
    empty = ARDecomposition(np.zeros((8, 0)), np.zeros((8, 0)), np.zeros(8))
    assert reconstruction_error(het_fig, empty) == 1.0
    assert reconstruction_error(het_fig, split_ar(spec)) == pytest.approx(0.0, abs=1e-25)


def test_zero_network_normalization():
    net = SymmetricNetwork(np.eye(3))
    ar = split_ar(eigendecompose(np.eye(3)))
    with pytest.raises(ZeroNetwork):
        reconstruction_error(net, ar)
    assert reconstruction_error(net, ar, normalized=False) == 0.0


def test_curve_full_rank_and_monotone(het_fig):
    curve = rank_error_curve(het_fig, "nuclear_min")
    assert curve[-1][1] <= 1e-8
    errs = [e for _, e in curve]
    assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))


def test_curve_het_fig_8():
    net = generate_bipartite(8)
    ar_curve = dict(rank_error_curve(net, "nuclear_min"))
    assert ar_curve[2] < 1e-10
    psd_curve = dict(rank_error_curve(net, "psd_nuclear_min"))
    assert all(psd_curve[k] > 1e-6 for k in range(1, 15))
    assert psd_curve[15] < 1e-6


def test_curve_rejects_bad_k(het_fig):
    with pytest.raises(RankOutOfRange):
        rank_error_curve(het_fig, "zero_diagonal", [0, 1])


# ------------------------------------------------------------- properties


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 12))
def test_energy_identity(seed, n):
    rng = np.random.default_rng(seed)
    m = random_symmetric(rng, n) + np.diag(rng.normal(size=n))
    spec = eigendecompose(m)
    k = int(rng.integers(1, n + 1))
    ar = split_ar(spec, k)
    kept = spec.eigenvalues[:k]
    kept = kept[np.abs(kept) > 1e-8 * np.abs(spec.eigenvalues).max()]
    assert np.sum(kept**2) == pytest.approx(np.linalg.norm(reconstruct(ar)) ** 2, rel=1e-9)


@pytest.mark.parametrize("seed", range(3))
def test_frobenius_nuclear_identity(seed):
    rng = np.random.default_rng(seed)
    comp = complete_nuclear_min(SymmetricNetwork(random_symmetric(rng, 15)))
    ar = split_ar(eigendecompose(comp.completed))
    lhs = np.linalg.norm(ar.attract) ** 2 + np.linalg.norm(ar.repel) ** 2
    assert lhs == pytest.approx(nuclear_norm(comp.completed), rel=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(3, 12))
def test_truncation_matches_svd(seed, n):
    rng = np.random.default_rng(seed)
    m = random_symmetric(rng, n) + np.diag(rng.normal(size=n))
    k = int(rng.integers(1, n))
    u, s, vt = np.linalg.svd(m)
    if s[k - 1] - s[k] < 1e-6 * s[0]:
        return  # truncation not unique at a tie
    svd_k = (u[:, :k] * s[:k]) @ vt[:k]
    ours = reconstruct(split_ar(eigendecompose(m), k))
    assert np.max(np.abs(ours - svd_k)) < 1e-10 * max(1.0, s[0])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 12))
def test_attract_and_repel_columns_orthogonal(seed, n):
    rng = np.random.default_rng(seed)
    ar = split_ar(eigendecompose(random_symmetric(rng, n)))
    for e in (ar.attract, ar.repel):
        g = e.T @ e
        off = g - np.diag(np.diag(g))
        assert np.max(np.abs(off), initial=0.0) <= 1e-8 * max(1.0, np.abs(g).max(initial=0.0))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 12))
def test_a_only_by_shift(seed, n):
    rng = np.random.default_rng(seed)
    net = SymmetricNetwork(random_symmetric(rng, n))
    comp = shift_to_psd(net)
    assert np.linalg.eigvalsh(comp.completed)[0] >= -1e-10
    ar = split_ar(eigendecompose(comp.completed))
    assert ar.q == 0 or np.abs(ar.repel).max() < 1e-6
    mask = ~np.eye(n, dtype=bool)
    assert np.max(np.abs(reconstruct(ar)[mask] - net.weights[mask])) < 1e-8


# ----------------------------------------------------------------- export


def test_embedding_csv_round_trip(tmp_path, het_fig):
    ar = split_ar(zero_diag_spectrum(het_fig), 2)
    path = tmp_path / "emb.csv"
    save_embeddings(path, ar, [f"v{i}" for i in range(8)])
    assert path.read_text().splitlines()[0] == "node,a_1,r_1"
    back, labels = load_embeddings(path)
    assert labels[0] == "v0"
    assert np.array_equal(back.attract, ar.attract)
    assert np.array_equal(back.repel, ar.repel)


def test_curve_csv(tmp_path):
    path = tmp_path / "curve.csv"
    save_curve(path, [(1, 0.5), (2, 0.0)])
    assert path.read_text().splitlines() == ["k,error", "1,0.5", "2,0.0"]
