import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mcccr.errors import McccrError
from mcccr.metrics import avacc, cba, cen, confusion_matrix, mean_ranks, mgm, score

from oracles import avacc_oracle, cba_oracle, cen_oracle, mgm_oracle

FIXTURE = np.array([[3, 1], [2, 4]])


class TestConfusionMatrix:
    def test_diagonal(self):
        mat = confusion_matrix([0, 1], [0, 1], 2)
        assert np.array_equal(mat, [[1, 0], [0, 1]])

    def test_off_diagonal(self):
        mat = confusion_matrix([0, 0], [1, 1], 2)
        assert np.array_equal(mat, [[0, 2], [0, 0]])

    def test_empty(self):
        assert confusion_matrix([], [], 3).sum() == 0

    def test_length_mismatch(self):
        with pytest.raises(McccrError, match="2 vs 1"):
            confusion_matrix([0, 1], [0], 2)

    def test_out_of_range_label(self):
        with pytest.raises(McccrError, match="outside"):
            confusion_matrix([0, 5], [0, 1], 2)


class TestMetricValues:
    def test_perfect_classifier(self):
        mat = np.diag([5, 5])
        assert avacc(mat) == 1.0
        assert cba(mat) == 1.0
        assert mgm(mat) == 1.0
        assert cen(mat) == 0.0

    def test_avacc_fixture(self):
        assert avacc(FIXTURE) == pytest.approx((0.75 + 2 / 3) / 2, abs=1e-12)

    def test_cba_fixture(self):
        assert cba(FIXTURE) == pytest.approx((3 / 5 + 4 / 6) / 2, abs=1e-12)

    def test_mgm_fixture(self):
        assert mgm(FIXTURE) == pytest.approx(np.sqrt(0.5), abs=1e-12)

    def test_mgm_annihilates_on_zero_recall(self):
        assert mgm(np.array([[0, 3], [1, 4]])) == 0.0

    def test_cen_fixture(self):
        # independently recomputed through the entropy definition
        assert cen(FIXTURE) == pytest.approx(cen_oracle(FIXTURE), abs=1e-12)
        assert cen(FIXTURE) == pytest.approx(0.7944034930119416, abs=1e-12)

    def test_cen_maximal_confusion(self):
        mat = np.array([[0, 7], [7, 0]])
        assert cen(mat) == pytest.approx(cen_oracle(mat), abs=1e-12)
        assert cen(mat) == pytest.approx(1.0, abs=1e-12)

    def test_cen_needs_two_classes(self):
        with pytest.raises(McccrError):
            cen(np.array([[4]]))

    def test_avacc_approaches_uniform_guess(self):
        rng = np.random.default_rng(0)
        n, m = 100_000, 4
        y_true = np.repeat(np.arange(m), n // m)
        y_pred = rng.integers(0, m, size=n)
        mat = confusion_matrix(y_true, y_pred, m)
        assert avacc(mat) == pytest.approx(1 / m, abs=0.02)

    def test_score_bundles_all_metrics(self):
        rep = score([0, 0, 1, 1], [0, 1, 1, 1], 2)
        mat = confusion_matrix([0, 0, 1, 1], [0, 1, 1, 1], 2)
        assert rep.avacc == pytest.approx(avacc(mat))
        assert rep.cba == pytest.approx(cba(mat))
        assert rep.mgm == pytest.approx(mgm(mat))
        assert rep.cen == pytest.approx(cen(mat))
        assert rep.warnings == []

    def test_empty_class_warning(self):
        rep = score([0, 0], [0, 1], 3)
        assert any("class 1" in w or "class 2" in w for w in rep.warnings)


def random_matrices(count=1000, max_m=8, seed=7):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        m = int(rng.integers(2, max_m + 1))
        mat = rng.integers(0, 30, size=(m, m))
        if rng.random() < 0.3:
            mat[rng.integers(m)] = 0
        yield mat


class TestOracleBattery:
    def test_thousand_random_matrices_match_rational_oracles(self):
        for mat in random_matrices():
            assert avacc(mat) == pytest.approx(avacc_oracle(mat), abs=1e-12)
            assert cba(mat) == pytest.approx(cba_oracle(mat), abs=1e-12)
            assert mgm(mat) == pytest.approx(mgm_oracle(mat), abs=1e-12)
            assert cen(mat) == pytest.approx(cen_oracle(mat), abs=1e-12)

    def test_ordering_and_sign_invariants(self):
        for mat in random_matrices(seed=11):
            a, c, g = avacc(mat), cba(mat), mgm(mat)
            assert c <= a + 1e-12
            assert g <= a + 1e-12
            assert cen(mat) >= 0
            if np.array_equal(mat, np.diag(np.diag(mat))):
                assert cen(mat) == 0


@st.composite
def confusion_matrices(draw):
    m = draw(st.integers(2, 5))
    return draw(arrays(np.int64, (m, m), elements=st.integers(0, 40)))


class TestMetricProperties:
    @given(confusion_matrices())
    @settings(max_examples=150, deadline=None)
    def test_permutation_invariance(self, mat):
        rng = np.random.default_rng(int(mat.sum()) % 100)
        perm = rng.permutation(mat.shape[0])
        permuted = mat[np.ix_(perm, perm)]
        assert avacc(permuted) == pytest.approx(avacc(mat), abs=1e-12)
        assert cba(permuted) == pytest.approx(cba(mat), abs=1e-12)
        assert mgm(permuted) == pytest.approx(mgm(mat), abs=1e-12)
        assert cen(permuted) == pytest.approx(cen(mat), abs=1e-12)

    @given(confusion_matrices(), st.integers(2, 9))
    @settings(max_examples=150, deadline=None)
    def test_count_scaling_invariance(self, mat, factor):
        scaled = mat * factor
        assert avacc(scaled) == pytest.approx(avacc(mat), abs=1e-12)
        assert cba(scaled) == pytest.approx(cba(mat), abs=1e-12)
        assert mgm(scaled) == pytest.approx(mgm(mat), abs=1e-12)
        assert cen(scaled) == pytest.approx(cen(mat), abs=1e-12)

    @given(confusion_matrices())
    @settings(max_examples=150, deadline=None)
    def test_cen_nonnegative_and_zero_on_diagonal(self, mat):
        # the converse does not hold: a deterministic misclassification
        # pattern like [[0, n], [0, 0]] carries zero entropy
        assert cen(mat) >= 0.0
        off = mat.copy()
        np.fill_diagonal(off, 0)
        if off.sum() == 0:
            assert cen(mat) == 0.0

    def test_cen_positive_for_spread_confusion(self):
        assert cen(np.array([[5, 1, 0], [2, 6, 1], [0, 1, 7]])) > 0.0
        assert cen(np.array([[0, 1], [0, 0]])) == 0.0


class TestMeanRanks:
    def test_strict_ordering(self):
        scores = np.array([[3.0, 2.0, 1.0]] * 4)
        assert list(mean_ranks(scores)) == [1.0, 2.0, 3.0]

    def test_ties_averaged(self):
        scores = np.array([[1.0, 1.0]] * 3)
        assert list(mean_ranks(scores)) == [1.5, 1.5]

    def test_lower_is_better_flips(self):
        scores = np.array([[0.1, 0.9]])
        assert list(mean_ranks(scores, higher_is_better=False)) == [1.0, 2.0]

    def test_rejects_nan(self):
        with pytest.raises(McccrError):
            mean_ranks(np.array([[1.0, np.nan]]))

    def test_mixed_rows(self):
        scores = np.array([[2.0, 1.0], [1.0, 2.0]])
        assert list(mean_ranks(scores)) == [1.5, 1.5]
