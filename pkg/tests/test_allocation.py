"""Tests for scheme enumeration."""

import pytest

from src.algorithms.allocation import (
    RULE_EAVESDROPPER_PRIVATE,
    RULE_FREE_CONFIDENTIAL,
    RULE_FREE_MULTICAST,
    RULE_RECEIVER_PRIVATE,
    RULE_WEAK_COMMON,
    confidential_only,
    enumerate_schemes,
    free_subchannels,
    multicast_only,
    remove_scheme,
)
from src.algorithms.gsvd import classify_subchannels, gsvd
from src.errors import IndexOutOfRange
from src.utils.data import generate_channels


@pytest.fixture
def mixed(mixed_pair):
    f = gsvd(mixed_pair)
    return f, classify_subchannels(f)


class TestEnumerateSchemes:
    """Tests for enumerating allocation schemes."""

    def test_scheme_count(self, mixed):
        """Test 2^F schemes for F free common subchannels."""
        f, part = mixed
        assert free_subchannels(f, part) == (2, 3)
        assert len(enumerate_schemes(f, part)) == 4

    def test_fixed_roles(self, mixed):
        """Test that private and weak subchannels keep their role in every scheme."""
        f, part = mixed
        for _, alloc in enumerate_schemes(f, part):
            assert 4 in alloc.gammac
            assert alloc.discarded == (0,)
            assert 1 in alloc.gamma0

    def test_every_scheme_partitions(self, mixed):
        """Test that each scheme covers all subchannels exactly once."""
        f, part = mixed
        for _, alloc in enumerate_schemes(f, part):
            alloc.validate(f.q)

    def test_binary_counter_order(self, mixed):
        """Test that scheme k sends free subchannel j to confidential when bit j is set."""
        f, part = mixed
        schemes = enumerate_schemes(f, part)
        assert schemes.ids == (0, 1, 2, 3)
        assert schemes.schemes[0].gammac == (4,)
        assert schemes.schemes[1].gammac == (2, 4)
        assert schemes.schemes[2].gammac == (3, 4)
        assert schemes.schemes[3].gammac == (2, 3, 4)

    def test_provenance(self, mixed):
        """Test that every placement records its rule."""
        f, part = mixed
        schemes = enumerate_schemes(f, part)
        rules = schemes.provenance[1]
        assert rules[0] == RULE_EAVESDROPPER_PRIVATE
        assert rules[1] == RULE_WEAK_COMMON
        assert rules[2] == RULE_FREE_CONFIDENTIAL
        assert rules[3] == RULE_FREE_MULTICAST
        assert rules[4] == RULE_RECEIVER_PRIVATE

    def test_no_free_subchannel(self, designed_pair):
        """Test that a channel without free common subchannels has one scheme."""
        f = gsvd(designed_pair([0.2, 0.4, 1.0]))
        schemes = enumerate_schemes(f, classify_subchannels(f))
        assert len(schemes) == 1
        assert schemes.schemes[0].gamma0 == (0, 1)
        assert schemes.schemes[0].gammac == (2,)

    def test_generic_channel(self):
        """Test enumeration on a generated channel."""
        f = gsvd(generate_channels(3, 4, 3, seed=2))
        part = classify_subchannels(f)
        schemes = enumerate_schemes(f, part)
        assert len(schemes) == 2 ** len(free_subchannels(f, part))


class TestRemoveScheme:
    """Tests for scheme removal."""

    def test_remove_keeps_order_and_ids(self, mixed):
        """Test that removal preserves the remaining order and ids."""
        f, part = mixed
        schemes = remove_scheme(enumerate_schemes(f, part), 1)
        assert schemes.ids == (0, 2, 3)
        assert schemes.by_id(2).gammac == (3, 4)
        assert schemes.position_of(3) == 2

    def test_remove_until_empty(self, mixed):
        """Test repeated removal down to the empty set."""
        f, part = mixed
        schemes = enumerate_schemes(f, part)
        while not schemes.is_empty:
            schemes = remove_scheme(schemes, 0)
        assert len(schemes) == 0

    @pytest.mark.parametrize("k", [-1, 4])
    def test_out_of_range(self, mixed, k):
        """Test that invalid positions raise."""
        f, part = mixed
        with pytest.raises(IndexOutOfRange):
            remove_scheme(enumerate_schemes(f, part), k)

    def test_unknown_id(self, mixed):
        """Test that looking up a removed id raises."""
        f, part = mixed
        schemes = remove_scheme(enumerate_schemes(f, part), 0)
        with pytest.raises(IndexOutOfRange):
            schemes.by_id(0)


class TestSingleServiceAllocations:
    """Tests for the allocations used by the time-division baseline."""

    def test_confidential_only(self, mixed):
        """Test that every useful subchannel becomes confidential."""
        f, part = mixed
        alloc = confidential_only(f, part)
        assert alloc.gamma0 == ()
        assert alloc.gammac == (2, 3, 4)
        alloc.validate(f.q)

    def test_multicast_only(self, mixed):
        """Test that every common subchannel becomes multicast."""
        f, part = mixed
        alloc = multicast_only(part)
        assert alloc.gamma0 == (1, 2, 3)
        assert alloc.gammac == ()
        alloc.validate(f.q)
