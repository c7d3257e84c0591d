import numpy as np
import pytest

from polarwiretap import gf2, transforms
from polarwiretap.bitchannel import (
    BitChannelProfile,
    arikan_recursion,
    erasure_polynomial,
    exhaustive_profile,
    kernel_recursion,
    mc_profile,
    permuted_profile,
    undecodable_weight_counts,
)
from polarwiretap.channel_metrics import Bec
from polarwiretap.gf2 import BinMatrix

from conftest import naive_undecodable


def brute_profile(g_dense, eps):
    """Sum pattern probabilities with the per-index two-rank test."""
    n = g_dense.shape[0]
    out = np.zeros(n)
    for pat in gf2.all_erasure_patterns(n):
        w = pat.sum()
        out += eps**w * (1 - eps) ** (n - w) * naive_undecodable(g_dense, pat)
    return out


def test_arikan_examples():
    np.testing.assert_array_equal(arikan_recursion(0.5, 1).erasure, [0.75, 0.25])
    np.testing.assert_allclose(arikan_recursion(0.5, 2).erasure,
                               [0.9375, 0.5625, 0.4375, 0.0625], atol=1e-15)
    for m in (0, 3, 6):
        assert (arikan_recursion(0.0, m).erasure == 0).all()
        assert (arikan_recursion(1.0, m).erasure == 1).all()
    assert arikan_recursion(Bec(0.2), 0).erasure.tolist() == [0.2]
    with pytest.raises(ValueError):
        arikan_recursion(0.5, -1)


def test_kernel_recursion_g2():
    g2 = transforms.arikan_kernel()
    q = np.linspace(0, 1, 9)
    vals = erasure_polynomial(g2.weight_counts, q)
    np.testing.assert_allclose(vals[:, 0], 2 * q - q * q, atol=1e-15)
    np.testing.assert_allclose(vals[:, 1], q * q, atol=1e-15)
    np.testing.assert_allclose(kernel_recursion([g2, g2], 0.5).erasure,
                               arikan_recursion(0.5, 2).erasure, atol=1e-15)


def test_kernel_recursion_zero(kernel16_file):
    k16 = transforms.load_kernel(kernel16_file)
    assert (kernel_recursion([k16], 0.0).erasure == 0).all()
    assert np.allclose(kernel_recursion([k16], 1.0).erasure, 1)
    with pytest.raises(ValueError):
        kernel_recursion([], 0.3)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
@pytest.mark.parametrize("eps", [0.1, 0.3, 0.5, 0.77])
def test_three_exact_methods_agree(m, eps):
    code = transforms.polar_transform(m)
    a = arikan_recursion(eps, m).erasure
    k = kernel_recursion([transforms.arikan_kernel()] * m, eps).erasure
    e = exhaustive_profile(code, eps).erasure
    np.testing.assert_allclose(e, a, atol=1e-9)
    np.testing.assert_allclose(k, a, atol=1e-9)


def test_exhaustive_matches_brute_force(rng):
    for n in (3, 5, 7):
        g = gf2.random_invertible(n, int(rng.integers(1000)))
        np.testing.assert_allclose(exhaustive_profile(g, 0.35).erasure,
                                   brute_profile(g.to_dense(), 0.35), atol=1e-12)


def test_exhaustive_examples():
    for eps in (0.0, 0.2, 0.9):
        np.testing.assert_allclose(exhaustive_profile(BinMatrix.identity(5), eps).erasure, eps,
                                   atol=1e-15)
    for seed in range(5):
        p = exhaustive_profile(gf2.random_invertible(4, seed), 0.5)
        assert p.capacity.sum() == pytest.approx(2.0, abs=1e-12)


def test_exhaustive_limits():
    with pytest.raises(ValueError):
        exhaustive_profile(BinMatrix.identity(21), 0.3)
    with pytest.raises(ValueError):
        exhaustive_profile(BinMatrix.zeros(3, 3), 0.3)


def test_weight_counts_symmetry():
    counts = undecodable_weight_counts(transforms.polar_transform(3))
    # nothing is undecodable with no erasures, everything with all of them
    assert (counts[:, 0] == 0).all()
    assert (counts[:, -1] == 1).all()


def test_conservation_exact(rng):
    for seed in range(5):
        g = gf2.random_invertible(10, seed)
        for eps in (0.1, 0.45, 0.8):
            p = exhaustive_profile(g, eps)
            assert p.capacity.sum() == pytest.approx(10 * (1 - eps), abs=1e-9)
    p = arikan_recursion(0.3, 10)
    assert p.capacity.sum() == pytest.approx(1024 * 0.7, abs=1e-9)


def test_degradation_monotone():
    grid = np.linspace(0, 1, 21)
    g = gf2.random_invertible(9, 4)
    prev_a = prev_e = None
    for eps in grid:
        a = arikan_recursion(eps, 5).erasure
        e = exhaustive_profile(g, eps).erasure
        if prev_a is not None:
            assert (prev_a <= a + 1e-12).all()
            assert (prev_e <= e + 1e-12).all()
        prev_a, prev_e = a, e


def test_mc_examples():
    g = transforms.polar_transform(6)
    assert (mc_profile(g, 0.0, 3000, 1).erasure == 0).all()
    ident = mc_profile(BinMatrix.identity(32), 0.3, 100_000, 2)
    assert np.abs(ident.erasure - 0.3).max() <= 0.01
    with pytest.raises(ValueError):
        mc_profile(g, 0.3, 0)
    with pytest.raises(ValueError):
        mc_profile(g, 0.3, 10, seed=-1)


def test_mc_metadata_and_std_err():
    p = mc_profile(transforms.polar_transform(4), 0.4, 5000, 3)
    assert p.method == "monte-carlo" and p.samples == 5000
    np.testing.assert_allclose(p.std_err, np.sqrt(p.erasure * (1 - p.erasure) / 5000))


def test_mc_close_to_exact():
    code = transforms.polar_transform(6)
    exact = arikan_recursion(0.3, 6).erasure
    est = mc_profile(code, 0.3, 40_000, 11)
    assert np.abs(est.erasure - exact).max() <= 0.015


def test_mc_determinism_and_threads():
    code = transforms.rl_transform(96, 5)
    a = mc_profile(code, 0.4, 20_000, 9, workers=1)
    b = mc_profile(code, 0.4, 20_000, 9, workers=4)
    c = mc_profile(code, 0.4, 20_000, 9, workers=3)
    np.testing.assert_array_equal(a.erasure, b.erasure)
    np.testing.assert_array_equal(a.erasure, c.erasure)
    d = mc_profile(code, 0.4, 20_000, 10)
    assert not np.array_equal(a.erasure, d.erasure)


def test_mc_prefix_stability():
    # sample j always comes from the same RNG key, so a longer run extends a shorter one
    code = transforms.polar_transform(5)
    short = mc_profile(code, 0.5, 4096, 1).erasure * 4096
    long = mc_profile(code, 0.5, 8192, 1).erasure * 8192
    assert (long >= short - 1e-9).all()


def test_permuted_identity_order_equals_mc():
    code = transforms.polar_transform(5)
    a = mc_profile(code, 0.3, 6000, 4)
    b = permuted_profile(code, np.arange(32), 0.3, 6000, 4)
    np.testing.assert_array_equal(a.erasure, b.erasure)
    np.testing.assert_array_equal(b.order, np.arange(32))


def test_permuted_reversal_on_identity():
    p = permuted_profile(BinMatrix.identity(16), np.arange(16)[::-1], 0.3, 50_000, 2)
    assert np.abs(p.erasure - 0.3).max() < 0.01
    ex = permuted_profile(BinMatrix.identity(6), np.arange(6)[::-1], 0.3, method="exhaustive")
    np.testing.assert_allclose(ex.erasure, 0.3, atol=1e-15)


def test_permuted_exhaustive_vs_mc():
    code = transforms.polar_transform(3)
    eve = arikan_recursion(0.5, 3)
    bad = np.array([0, 1, 2, 4])
    good = np.array([3, 5, 6, 7])
    order = np.concatenate([bad, good[np.argsort(eve.tvd[good], kind="stable")]])
    ex = permuted_profile(code, order, 0.5, method="exhaustive")
    mc = permuted_profile(code, order, 0.5, samples=50_000, seed=8)
    se = np.maximum(mc.std_err, 1e-4)
    assert (np.abs(ex.erasure - mc.erasure) <= 3 * se + 1e-12).all()


def test_permuted_matches_naive():
    g = gf2.random_invertible(6, 2)
    order = np.array([3, 0, 5, 1, 4, 2])
    got = permuted_profile(g, order, 0.4, method="exhaustive").erasure
    expect = brute_profile(g.to_dense()[:, order], 0.4)
    np.testing.assert_allclose(got, expect, atol=1e-12)


def test_permuted_validation():
    code = transforms.polar_transform(2)
    with pytest.raises(ValueError):
        permuted_profile(code, [0, 0, 1, 2], 0.3)
    with pytest.raises(ValueError):
        permuted_profile(code, [0, 1, 2], 0.3)
    with pytest.raises(ValueError):
        permuted_profile(code, [0, 1, 2, 3], 0.3, method="magic")


def test_profile_validation_and_shift():
    with pytest.raises(ValueError):
        BitChannelProfile(np.array([0.1, 1.2]), "recursion", Bec(0.1))
    p = BitChannelProfile(np.array([0.0, 0.5, 1.0]), "monte-carlo", Bec(0.5), 100,
                          np.array([0.1, 0.1, 0.1]))
    np.testing.assert_allclose(p.shifted(2).erasure, [0.2, 0.7, 1.0])
    np.testing.assert_allclose(p.shifted(-2).erasure, [0.0, 0.3, 0.8])
    assert p.shifted(0) is p
    np.testing.assert_array_equal(p.tvd, 1 - p.erasure)
    np.testing.assert_array_equal(p.bhattacharyya, p.erasure)
