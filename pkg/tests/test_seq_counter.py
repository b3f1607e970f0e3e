"""Tests for lollipop DTSN arithmetic."""

import pytest

from src.simulator.seq_counter import INITIAL_VALUE, SEQUENCE_WINDOW, increment, is_newer


class TestIncrement:
    """Counter advance and wrap-around"""

    def test_examples(self):
        assert increment(0) == 1
        assert increment(254) == 255
        assert increment(255) == 0
        assert increment(127) == 128

    def test_initial_value_in_linear_region(self):
        assert INITIAL_VALUE == 240
        assert INITIAL_VALUE > 127

    @pytest.mark.parametrize("value", range(256))
    def test_always_changes(self, value):
        assert increment(value) != value

    def test_full_cycle_returns_to_start(self):
        for start in (0, 127, 128, 240, 255):
            value = start
            for _ in range(256):
                value = increment(value)
            assert value == start

    @pytest.mark.parametrize("value", [-1, 256, 1000])
    def test_out_of_range(self, value):
        with pytest.raises(ValueError):
            increment(value)


class TestIsNewer:
    """Newer-than comparison across both regions"""

    def test_examples(self):
        assert is_newer(6, 5) is True
        assert is_newer(5, 5) is False
        assert is_newer(0, 255) is True
        assert is_newer(5, 6) is False

    @pytest.mark.parametrize("value", range(256))
    def test_successor_is_newer(self, value):
        assert is_newer(increment(value), value)

    @pytest.mark.parametrize("value", range(256))
    def test_irreflexive(self, value):
        assert not is_newer(value, value)

    @pytest.mark.parametrize("value", range(256))
    def test_never_newer_both_ways(self, value):
        nxt = increment(value)
        assert not is_newer(value, nxt)

    def test_linear_region_run_from_initial_value(self):
        value = INITIAL_VALUE
        for _ in range(40):
            nxt = increment(value)
            assert is_newer(nxt, value)
            value = nxt

    def test_circular_window(self):
        assert is_newer(10 + SEQUENCE_WINDOW, 10)
        assert not is_newer(10 + SEQUENCE_WINDOW + 1, 10)

    def test_linear_value_after_circular_restart(self):
        # A node rebooting into the linear region is newer than an old circular value.
        assert is_newer(240, 100)
        assert not is_newer(100, 240)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            is_newer(256, 0)
        with pytest.raises(ValueError):
            is_newer(0, -1)
