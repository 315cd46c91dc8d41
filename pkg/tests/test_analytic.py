import math

import pytest

from ncdp.analytic import (
    expected_replicas,
    full_rank_bruteforce,
    prob_active_le_S,
    prob_full_rank,
    slotted_aloha_throughput,
    sparsity_threshold,
    throughput_analytic,
    throughput_limit,
)
from ncdp.exceptions import ParameterError


class TestFullRank:

    def test_binary_2x2(self):
        assert prob_full_rank(2, 2, 1) == pytest.approx(0.375)

    @pytest.mark.parametrize("S,n_tx,n", [(1, 1, 1), (2, 1, 1), (3, 2, 1), (4, 3, 1), (2, 2, 2), (3, 1, 2)])
    def test_matches_enumeration(self, S, n_tx, n):
        assert prob_full_rank(S, n_tx, n) == pytest.approx(full_rank_bruteforce(S, n_tx, n))

    def test_more_terminals_than_slots(self):
        assert prob_full_rank(3, 4, 8) == 0.0
        assert prob_full_rank(1, 2, 1) == full_rank_bruteforce(1, 2, 1) == 0.0

    def test_no_terminals(self):
        assert prob_full_rank(5, 0, 8) == 1.0
        assert full_rank_bruteforce(2, 0, 1) == 1.0

    def test_large_field_is_almost_sure(self):
        assert prob_full_rank(150, 100, 8) > 0.99

    def test_enumeration_too_large(self):
        with pytest.raises(ParameterError):
            full_rank_bruteforce(10, 10, 8)

    def test_invalid_field(self):
        with pytest.raises(ParameterError):
            prob_full_rank(3, 2, 0)


class TestThroughput:

    def test_active_terminals_fit(self):
        assert 0.985 <= prob_active_le_S(0.8, 100) <= 0.995
        assert prob_active_le_S(0.0, 10) == 1.0

    def test_zero_load(self):
        assert throughput_analytic(0.0, 100, 8) == 0.0
        assert throughput_limit(0.0, 100) == 0.0

    def test_negative_load(self):
        with pytest.raises(ParameterError):
            throughput_analytic(-0.1, 100, 8)
        with pytest.raises(ParameterError):
            prob_active_le_S(0.5, 0)

    def test_grows_with_field_size(self):
        values = [throughput_analytic(0.9, 50, n) for n in (1, 2, 4, 8)]
        assert values == sorted(values)
        assert values[-1] == pytest.approx(throughput_limit(0.9, 50), rel=1e-2)

    def test_light_load_delivers_everything(self):
        assert throughput_analytic(0.3, 100, 8) == pytest.approx(0.3, rel=1e-3)

    def test_overload_collapses(self):
        assert throughput_limit(1.5, 100) < 0.01

    def test_beats_slotted_aloha(self):
        for G in (0.2, 0.5, 0.8):
            assert throughput_analytic(G, 100, 8) > slotted_aloha_throughput(G)

    def test_slotted_aloha_peak(self):
        assert slotted_aloha_throughput(1.0) == pytest.approx(1 / math.e)


class TestSparsity:

    def test_thresholds(self):
        assert sparsity_threshold(100) == pytest.approx(0.0461, abs=1e-4)
        assert sparsity_threshold(150) == pytest.approx(0.0334, abs=1e-4)

    def test_expected_replicas(self):
        assert expected_replicas(150, 0.9961) == pytest.approx(149.415)
        assert expected_replicas(150, sparsity_threshold(150)) == pytest.approx(math.log(150))

    def test_invalid(self):
        with pytest.raises(ParameterError):
            sparsity_threshold(1)
        with pytest.raises(ParameterError):
            expected_replicas(10, 1.5)
