import numpy as np
import pytest

from evir.errors import VocabularyMissing
from evir.local import Vocabulary, encode_bovw
from evir.local.bovw import assign_words, bovw_similarity


def _vocab(centroids):
    return Vocabulary(np.asarray(centroids, dtype=np.float64))


class TestAssign:
    def test_exhaustive_nearest(self):
        rng = np.random.default_rng(39)
        for k in (2, 5, 16):
            cents = rng.uniform(0, 1, size=(k, 6))
            vocab = _vocab(cents)
            descs = rng.uniform(0, 1, size=(40, 6))
            words = assign_words(list(descs), vocab)
            for i, d in enumerate(descs):
                dists = ((cents - d) ** 2).sum(axis=1)
                assert words[i] == dists.argmin()

    def test_tie_goes_to_lowest_index(self):
        vocab = _vocab([[0.0, 0.0], [2.0, 0.0]])
        words = assign_words([np.array([1.0, 0.0])], vocab)  # equidistant
        assert words[0] == 0


class TestEncode:
    def test_empty_descriptor_list(self):
        hist = encode_bovw([], _vocab(np.zeros((4, 3))))
        assert hist.raw_count == 0
        assert np.all(hist.counts == 0)

    def test_missing_vocabulary(self):
        with pytest.raises(VocabularyMissing):
            encode_bovw([np.zeros(3)], None)

    def test_mass_conservation_and_l2_norm(self):
        rng = np.random.default_rng(40)
        vocab = _vocab(rng.uniform(0, 1, size=(8, 4)))
        descs = list(rng.uniform(0, 1, size=(25, 4)))
        hist = encode_bovw(descs, vocab)
        assert hist.raw_count == 25
        assert np.linalg.norm(hist.counts) == pytest.approx(1.0)
        # recover raw counts: they must be non-negative integers summing to 25
        words = assign_words(descs, vocab)
        expected = np.bincount(words, minlength=8).astype(np.float64)
        assert np.allclose(hist.counts, expected / np.linalg.norm(expected))

    def test_single_word_histogram(self):
        vocab = _vocab([[0.0, 0.0], [100.0, 100.0]])
        descs = [np.array([0.1, 0.0]), np.array([0.0, 0.2])]
        hist = encode_bovw(descs, vocab)
        assert hist.counts[0] == pytest.approx(1.0)
        assert hist.counts[1] == 0.0


class TestSimilarity:
    def test_identical_histograms(self):
        rng = np.random.default_rng(41)
        vocab = _vocab(rng.uniform(0, 1, size=(6, 3)))
        descs = list(rng.uniform(0, 1, size=(10, 3)))
        h = encode_bovw(descs, vocab)
        assert bovw_similarity(h, h) == pytest.approx(1.0)

    def test_disjoint_words_zero(self):
        vocab = _vocab([[0.0, 0.0], [10.0, 10.0]])
        a = encode_bovw([np.array([0.1, 0.1])], vocab)
        b = encode_bovw([np.array([9.9, 9.9])], vocab)
        assert bovw_similarity(a, b) == 0.0

    def test_empty_histogram_zero(self):
        vocab = _vocab(np.zeros((3, 2)))
        a = encode_bovw([], vocab)
        b = encode_bovw([np.array([0.0, 0.0])], vocab)
        assert bovw_similarity(a, b) == 0.0
        assert bovw_similarity(b, a) == 0.0

    def test_bounded_and_symmetric(self):
        rng = np.random.default_rng(42)
        vocab = _vocab(rng.uniform(0, 1, size=(5, 4)))
        for _ in range(20):
            a = encode_bovw(list(rng.uniform(0, 1, size=(8, 4))), vocab)
            b = encode_bovw(list(rng.uniform(0, 1, size=(12, 4))), vocab)
            s = bovw_similarity(a, b)
            assert 0.0 <= s <= 1.0
            assert s == pytest.approx(bovw_similarity(b, a))
