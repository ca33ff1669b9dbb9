import numpy as np
import pytest
from hypothesis import given, strategies as hst

from splinetok import (
    QuantizationScheme,
    ShapeError,
    TokenSequence,
    VocabError,
    dequantize,
    flatten,
    quantize,
    unflatten,
)


@pytest.fixture
def scheme():
    return QuantizationScheme()


class TestQuantize:
    def test_edges_and_center(self, scheme):
        assert quantize(scheme, -1.0) == 0
        assert quantize(scheme, 1.0) == 255
        assert quantize(scheme, 0.0) == 128

    def test_saturation(self, scheme):
        assert quantize(scheme, -5.0) == 0
        assert quantize(scheme, 5.0) == 255

    def test_monotone(self, scheme):
        x = np.linspace(-1.5, 1.5, 301)
        idx = quantize(scheme, x)
        assert np.all(np.diff(idx) >= 0)

    def test_scheme_validation(self):
        with pytest.raises(ValueError):
            QuantizationScheme(vocab_size=1)
        with pytest.raises(ValueError):
            QuantizationScheme(range_low=1.0, range_high=-1.0)


class TestDequantize:
    def test_bin_centers(self, scheme):
        assert dequantize(scheme, 0) == pytest.approx(-0.99609375)
        assert dequantize(scheme, 255) == pytest.approx(0.99609375)
        assert dequantize(QuantizationScheme(vocab_size=2), 1) == pytest.approx(0.5)

    def test_out_of_vocab(self, scheme):
        with pytest.raises(VocabError):
            dequantize(scheme, 256)
        with pytest.raises(VocabError):
            dequantize(scheme, -1)

    @given(hst.lists(hst.floats(-1, 1), min_size=1, max_size=50))
    def test_round_trip_bound(self, values):
        scheme = QuantizationScheme()
        x = np.asarray(values)
        err = np.abs(dequantize(scheme, quantize(scheme, x)) - x)
        assert err.max() <= 1 / 256 + 1e-15


class TestFlatten:
    def test_basis_major_order(self):
        c = np.array([[1, 2, 3], [4, 5, 6]])
        seq = flatten(c)
        np.testing.assert_array_equal(seq.tokens, [1, 4, 2, 5, 3, 6])
        assert seq.dof == 2 and seq.basis_count == 3

    def test_single_dof(self):
        seq = flatten(np.array([[9, 8, 7, 6]]))
        np.testing.assert_array_equal(seq.tokens, [9, 8, 7, 6])

    def test_single_basis(self):
        seq = flatten(np.array([[1], [2], [3]]))
        np.testing.assert_array_equal(seq.tokens, [1, 2, 3])

    def test_unflatten_inverse(self):
        seq = TokenSequence(tokens=np.array([1, 4, 2, 5, 3, 6]), dof=2, basis_count=3)
        np.testing.assert_array_equal(unflatten(seq), [[1, 2, 3], [4, 5, 6]])

    def test_single_token(self):
        seq = TokenSequence(tokens=np.array([42]), dof=1, basis_count=1)
        np.testing.assert_array_equal(unflatten(seq), [[42]])

    @given(
        hst.integers(1, 8), hst.integers(1, 12),
        hst.randoms(use_true_random=False),
    )
    def test_round_trip_random_shapes(self, d, n, rnd):
        rng = np.random.default_rng(rnd.randint(0, 2**31))
        c = rng.integers(0, 256, size=(d, n))
        np.testing.assert_array_equal(unflatten(flatten(c)), c)

    def test_conditioned_layout(self):
        c = np.array([[1, 2], [3, 4]])
        seq = flatten(c, conditioned=True)
        assert seq.basis_count == 3
        assert len(seq) == 4
        np.testing.assert_array_equal(unflatten(seq), c)

    def test_length_metadata_mismatch(self):
        with pytest.raises(ShapeError):
            TokenSequence(tokens=np.arange(5), dof=2, basis_count=3)
