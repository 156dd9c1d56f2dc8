"""Tests for the GSVD core."""

import numpy as np
import pytest

from src.algorithms.gsvd import (
    ChannelPair,
    check_feasibility,
    classify_subchannels,
    expected_counts,
    generalized_singular_values,
    gsvd,
    reconstruction_residuals,
)
from src.errors import DimensionMismatch, RankDeficient
from src.utils.data import generate_channels

from conftest import CONFIGURATIONS


class TestChannelPair:
    """Tests for channel pair validation."""

    def test_dimensions(self):
        """Test that dimensions are read from the matrix shapes."""
        pair = ChannelPair(np.ones((4, 3)), np.ones((2, 3)))
        assert (pair.nt, pair.nb, pair.ne, pair.q) == (3, 4, 2, 3)

    def test_column_mismatch(self):
        """Test that differing transmit dimensions are rejected."""
        with pytest.raises(DimensionMismatch):
            ChannelPair(np.ones((2, 3)), np.ones((2, 2)))

    def test_not_a_matrix(self):
        """Test that vectors are rejected."""
        with pytest.raises(DimensionMismatch):
            ChannelPair(np.ones(3), np.ones((2, 3)))

    def test_non_finite(self):
        """Test that NaN entries are rejected."""
        h1 = np.ones((2, 2))
        h1[0, 0] = np.nan
        with pytest.raises(DimensionMismatch):
            ChannelPair(h1, np.ones((2, 2)))

    def test_matrices_are_read_only(self):
        """Test that stored matrices cannot be modified."""
        pair = ChannelPair(np.ones((2, 2)), np.ones((2, 2)))
        with pytest.raises(ValueError):
            pair.h1[0, 0] = 5.0


class TestGsvd:
    """Tests for the decomposition itself."""

    @pytest.mark.parametrize("label", sorted(CONFIGURATIONS))
    def test_reconstruction_over_seeds(self, label):
        """Test factorization residuals, unitarity and ordering on 20 seeds per configuration."""
        nt, nb, ne = CONFIGURATIONS[label]
        for seed in range(20):
            pair = generate_channels(nt, nb, ne, seed)
            f = gsvd(pair)
            res = reconstruction_residuals(pair, f)

            assert res["h1"] <= 1e-8
            assert res["h2"] <= 1e-8
            assert res["psi_r_unitarity"] <= 1e-10
            assert res["psi_e_unitarity"] <= 1e-10
            assert res["gain_identity"] <= 1e-12
            assert np.all(np.diff(f.c_sq) >= 0)
            assert np.all(np.diff(f.d_sq) <= 0)

    def test_shapes(self):
        """Test the shapes of all factors."""
        pair = generate_channels(4, 2, 3, seed=7)
        f = gsvd(pair)
        assert f.q == 4
        assert f.psi_r.shape == (2, 2)
        assert f.psi_e.shape == (3, 3)
        assert f.a.shape == (4, 4)
        assert f.c_mat.shape == (2, 4)
        assert f.d_mat.shape == (3, 4)

    def test_gain_matrices_identity(self):
        """Test that C^T C + D^T D is the identity."""
        f = gsvd(generate_channels(3, 4, 3, seed=3))
        gram = f.c_mat.T @ f.c_mat + f.d_mat.T @ f.d_mat
        np.testing.assert_allclose(gram, np.eye(f.q), atol=1e-12)

    def test_deterministic(self):
        """Test that the same input gives identical output."""
        pair = generate_channels(3, 4, 3, seed=11)
        f1, f2 = gsvd(pair), gsvd(pair)
        np.testing.assert_array_equal(f1.a, f2.a)
        np.testing.assert_array_equal(f1.psi_r, f2.psi_r)
        np.testing.assert_array_equal(f1.c_diag, f2.c_diag)

    def test_phase_convention(self):
        """Test that each receiver basis column has a real nonnegative largest entry."""
        f = gsvd(generate_channels(3, 4, 3, seed=5))
        for j in range(f.psi_r.shape[1]):
            col = f.psi_r[:, j]
            pivot = col[np.argmax(np.abs(col))]
            assert abs(pivot.imag) <= 1e-12
            assert pivot.real >= 0

    def test_identical_channels(self, identical_pair):
        """Test that identical receivers give equal gains on every subchannel."""
        f = gsvd(identical_pair)
        np.testing.assert_allclose(f.c_sq, [0.5, 0.5], atol=1e-12)
        np.testing.assert_allclose(f.d_sq, [0.5, 0.5], atol=1e-12)

    def test_designed_gains_recovered(self, designed_pair):
        """Test that a diagonal pair yields its own gains in ascending order."""
        f = gsvd(designed_pair([0.8, 0.2, 0.6]))
        np.testing.assert_allclose(f.c_sq, [0.2, 0.6, 0.8], atol=1e-12)
        np.testing.assert_allclose(f.a_col_norm_sq, np.ones(3), atol=1e-12)

    def test_zero_channels(self):
        """Test that all-zero channels are rank deficient."""
        with pytest.raises(RankDeficient):
            gsvd(ChannelPair(np.zeros((2, 2)), np.zeros((2, 2))))

    def test_rank_deficient_stack(self):
        """Test that a stacked matrix of rank below q is rejected."""
        row = np.array([[1.0, 1.0]])
        with pytest.raises(RankDeficient):
            gsvd(ChannelPair(row, row))

    def test_generalized_singular_values(self, mixed_pair):
        """Test c/d ratios including the infinite ratio of a receiver-only subchannel."""
        ratios = generalized_singular_values(gsvd(mixed_pair))
        assert ratios[0] == pytest.approx(0.0, abs=1e-12)
        assert ratios[2] == pytest.approx(np.sqrt(0.6 / 0.4))
        assert np.isinf(ratios[-1])


class TestClassification:
    """Tests for subchannel classification and feasibility."""

    @pytest.mark.parametrize("label", sorted(CONFIGURATIONS))
    def test_counts_match_table(self, label):
        """Test twenty generic channels per configuration against its expected counts."""
        nt, nb, ne = CONFIGURATIONS[label]
        expected = expected_counts(nt, nb, ne)
        for seed in range(20):
            f = gsvd(generate_channels(nt, nb, ne, seed))
            assert classify_subchannels(f).counts == expected.counts

    def test_mixed_partition(self, mixed_pair):
        """Test a partition with every subchannel kind."""
        part = classify_subchannels(gsvd(mixed_pair))
        assert part.pc2 == (0,)
        assert part.cc == (1, 2, 3)
        assert part.pc1 == (4,)

    def test_identical_channels_infeasible(self, identical_pair):
        """Test that identical receivers leave no room for confidential service."""
        f = gsvd(identical_pair)
        part = classify_subchannels(f)
        report = check_feasibility(f, part)

        assert part.cc == (0, 1)
        assert not report.multicast_infeasible
        assert report.confidential_infeasible
        assert not report.phy_si_feasible
        assert "authorized receiver" in report.describe()

    def test_no_common_subchannel(self):
        """Test that a C5 channel cannot carry multicast traffic."""
        f = gsvd(generate_channels(4, 2, 2, seed=0))
        report = check_feasibility(f, classify_subchannels(f))
        assert report.multicast_infeasible

    def test_invalid_tolerance(self, mixed_pair):
        """Test that tolerances outside (0, 0.5) are rejected."""
        with pytest.raises(ValueError):
            classify_subchannels(gsvd(mixed_pair), tol=0.7)


class TestExpectedCounts:
    """Tests for the per-configuration count table."""

    def test_overlapping_classes(self):
        """Test a triple that satisfies two class conditions."""
        row = expected_counts(3, 4, 3)
        assert row.labels == ("C1", "C3")
        assert row.counts == (3, 0, 0)

    @pytest.mark.parametrize(
        "dims, label, counts",
        [
            ((4, 2, 3), "C4", (1, 1, 2)),
            ((4, 2, 2), "C5", (0, 2, 2)),
            ((3, 2, 4), "C2", (2, 0, 1)),
            ((3, 4, 2), "C1", (2, 1, 0)),
        ],
    )
    def test_single_class(self, dims, label, counts):
        """Test triples that fall in exactly one class."""
        row = expected_counts(*dims)
        assert row.label == label
        assert row.counts == counts

    def test_boundary_uses_matching_formula(self):
        """Test a boundary triple covered by no condition."""
        row = expected_counts(3, 3, 2)
        assert row.counts == (2, 1, 0)
        assert "C1" in row.labels

    def test_invalid_dimensions(self):
        """Test that zero antennas are rejected."""
        with pytest.raises(DimensionMismatch):
            expected_counts(0, 1, 1)
