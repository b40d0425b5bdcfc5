import numpy as np
import pytest

from core.errors import ShapeError
from sparse import (
    CENTER_TAP,
    ConvMode,
    ConvParams,
    NormParams,
    SparseTensor,
    build_rulebook,
    conv_output_shape,
    dense_oracle,
    dense_reachability,
    densify,
    norm_relu,
    sparse_conv,
)
from sparse.bench import random_conv, random_tensor, run_benchmark


def _random_case(rng):
    shape = (int(rng.integers(1, 13)), int(rng.integers(1, 13)), int(rng.integers(1, 7)))
    density = float(rng.uniform(0.02, 0.6))
    cin, cout = int(rng.integers(1, 9)), int(rng.integers(1, 9))
    mode = ConvMode(int(rng.integers(0, 2)))
    stride = 1 if mode == ConvMode.SUBMANIFOLD else int(rng.integers(1, 3))
    return random_tensor(rng, shape, cin, density), random_conv(rng, cin, cout, mode, stride)


def _active_dense_sites(reach):
    return np.argwhere(reach > 0)


@pytest.mark.parametrize("shape, stride, expected", [
    ((5600, 1600, 40), 2, (2800, 800, 20)),
    ((700, 200, 5), 2, (350, 100, 3)),
    ((1, 1, 1), 2, (1, 1, 1)),
    ((12, 7, 6), 1, (12, 7, 6)),
])
def test_conv_output_shape(shape, stride, expected):
    assert conv_output_shape(shape, stride) == expected


def test_params_validation():
    with pytest.raises(ShapeError):
        ConvParams(2, 2, np.zeros((27, 2, 2)), ConvMode.SUBMANIFOLD, stride=2)
    with pytest.raises(ShapeError):
        ConvParams(2, 2, np.zeros((27, 2, 3)))
    with pytest.raises(ShapeError):
        ConvParams(2, 2, np.zeros((27, 2, 2)), ConvMode.SPARSE, stride=3)
    with pytest.raises(ValueError):
        NormParams(np.ones(2), np.zeros(2), np.zeros(2), -np.ones(2))


def test_tensor_rejects_inconsistent_rows():
    with pytest.raises(ShapeError):
        SparseTensor((2, 2, 2), [[0, 0, 0]], np.zeros((2, 1)))
    with pytest.raises(ShapeError):
        SparseTensor((2, 2, 2), [[1, 0, 0], [0, 0, 0]], np.zeros((2, 1)))


def test_sparse_conv_matches_dense_oracle():
    rng = np.random.default_rng(99)
    for _ in range(1000):
        t, p = _random_case(rng)
        out = sparse_conv(t, p)
        dense = dense_oracle(t, p)
        reach = dense_reachability(t, p)
        if p.mode == ConvMode.SUBMANIFOLD:
            assert np.array_equal(out.coords, t.coords)
        else:
            assert out.shape == conv_output_shape(t.shape, p.stride)
            assert np.array_equal(out.coords, _active_dense_sites(reach))
            inactive = reach == 0
            assert np.allclose(dense[inactive], 0.0)
        expected = dense[out.coords[:, 0], out.coords[:, 1], out.coords[:, 2]]
        assert np.allclose(out.features, expected, atol=1e-5)


def test_rule_count_matches_dense_reachability():
    rng = np.random.default_rng(7)
    for _ in range(200):
        t, p = _random_case(rng)
        rulebook = build_rulebook(t.coords, t.shape, p)
        reach = dense_reachability(t, p)
        if p.mode == ConvMode.SUBMANIFOLD:
            expected = reach[t.coords[:, 0], t.coords[:, 1], t.coords[:, 2]].sum()
        else:
            expected = reach.sum()
        assert rulebook.rule_count == expected


def test_rulebook_pairs_are_one_to_one_per_offset():
    rng = np.random.default_rng(11)
    for _ in range(100):
        t, p = _random_case(rng)
        for inp, out in build_rulebook(t.coords, t.shape, p).pairs:
            assert len(np.unique(inp)) == len(inp)
            assert len(np.unique(out)) == len(out)


def test_submanifold_centre_tap_covers_every_site():
    rng = np.random.default_rng(3)
    t = random_tensor(rng, (8, 8, 4), 2, 0.2)
    rulebook = build_rulebook(t.coords, t.shape, ConvParams.identity(2))
    inp, out = rulebook.pairs[CENTER_TAP]
    assert np.array_equal(inp, np.arange(len(t)))
    assert np.array_equal(out, np.arange(len(t)))


def test_identity_submanifold_conv_is_a_no_op():
    rng = np.random.default_rng(5)
    t = random_tensor(rng, (6, 6, 3), 4, 0.3)
    assert np.allclose(sparse_conv(t, ConvParams.identity(4)).features, t.features)


def test_single_site_strided_conv():
    t = SparseTensor((4, 4, 4), [[1, 1, 1]], [[1.0]])
    out = sparse_conv(t, ConvParams(1, 1, np.ones((27, 1, 1)), ConvMode.SPARSE, stride=2))
    # input 1 is reached from outputs 0 (tap 2) and 1 (tap 0) on every axis
    assert out.shape == (2, 2, 2)
    assert len(out) == 8
    assert np.allclose(out.features, 1.0)


def test_stride_one_sparse_conv_dilates():
    t = SparseTensor((5, 5, 5), [[2, 2, 2]], [[1.0]])
    out = sparse_conv(t, ConvParams(1, 1, np.ones((27, 1, 1)), ConvMode.SPARSE, stride=1))
    assert len(out) == 27
    assert out.coords.min() == 1 and out.coords.max() == 3


def test_empty_input_gives_empty_output():
    t = SparseTensor.empty((6, 6, 6), 3)
    for params in (ConvParams.identity(3), ConvParams.identity(3, ConvMode.SPARSE, 2)):
        out = sparse_conv(t, params)
        assert len(out) == 0
        assert out.channels == 3


def test_channel_mismatch():
    with pytest.raises(ShapeError):
        sparse_conv(SparseTensor.empty((2, 2, 2), 3), ConvParams.identity(4))


def test_shared_rulebook_gives_the_same_result():
    rng = np.random.default_rng(17)
    t = random_tensor(rng, (10, 10, 5), 4, 0.2)
    first, second = (random_conv(rng, 4, 4, ConvMode.SUBMANIFOLD) for _ in range(2))
    rulebook = build_rulebook(t.coords, t.shape, first)
    mid = sparse_conv(t, first, rulebook)
    assert sparse_conv(mid, second, rulebook) == sparse_conv(sparse_conv(t, first), second)


def test_results_do_not_depend_on_thread_count():
    rng = np.random.default_rng(23)
    for _ in range(20):
        t, p = _random_case(rng)
        serial = sparse_conv(t, p, threads=1)
        for threads in (2, 4, 8):
            assert sparse_conv(t, p, threads=threads) == serial


def test_norm_relu_identity_parameters():
    t = SparseTensor((2, 1, 1), [[0, 0, 0], [1, 0, 0]], [[2.0, -1.0], [0.0, 4.0]])
    out = norm_relu(t, NormParams.identity(2))
    scale = 1.0 / np.sqrt(1.0 + NormParams.identity(2).eps)
    assert np.allclose(out.features, [[2.0 * scale, 0.0], [0.0, 4.0 * scale]])
    assert np.array_equal(out.coords, t.coords)


def test_norm_relu_affine():
    t = SparseTensor((1, 1, 1), [[0, 0, 0]], [[3.0]])
    n = NormParams([2.0], [0.5], [1.0], [4.0], eps=1e-3)
    expected = 2.0 * (3.0 - 1.0) / np.sqrt(4.0 + n.eps) + 0.5
    assert norm_relu(t, n).features[0, 0] == pytest.approx(expected)
    assert (norm_relu(t.with_features([[-100.0]]), n).features == 0).all()


def test_norm_relu_channel_mismatch():
    with pytest.raises(ShapeError):
        norm_relu(SparseTensor.empty((1, 1, 1), 3), NormParams.identity(2))


def test_densify_places_features():
    t = SparseTensor((3, 3, 3), [[0, 1, 2]], [[5.0, 6.0]])
    dense = densify(t)
    assert dense.shape == (3, 3, 3, 2)
    assert dense[0, 1, 2].tolist() == [5.0, 6.0]
    assert dense.sum() == 11.0


def test_benchmark_rule_counts_match_oracle():
    results = run_benchmark([8, 12], seed=1, channels=4, density=0.1)
    rulebooks = [r for r in results if r.kernel.startswith("rulebook/")]
    assert len(rulebooks) == 4
    assert all(r.rules == r.oracle_rules for r in rulebooks)
    assert {r.kernel for r in results} == {
        "rulebook/subm", "rulebook/strided", "conv/subm", "conv/strided", "scatter/max"}
