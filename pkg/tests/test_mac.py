import numpy as np
import pytest
from pydantic import ValidationError

from ncdp.analytic import slotted_aloha_throughput, throughput_analytic
from ncdp.exceptions import ParameterError
from ncdp.galois import FieldMatrix, FieldSpec
from ncdp.mac import (
    ActiveTerminal,
    CoefficientPolicy,
    CrdsaScheme,
    Decoder,
    Feedback,
    FrameState,
    LinkConfig,
    Metrics,
    NcdpScheme,
    ProtocolConfig,
    SlotLink,
    TrafficModel,
    Transmission,
    allocate_preambles,
    crdsa_peel,
    decode_frame,
    generate_pattern,
    replica_pattern,
    simulate_crdsa,
    simulate_ncdp,
    simulate_sa,
    terminal_seeds,
)
from ncdp.mac.metrics import ratio_estimate
from ncdp.phy import Burst, ChannelParams, SamplingStrategy, synthesize_collision
from ncdp.utils.rng import trial_rng


class TestProtocolConfig:

    def test_replicas_exceed_slots(self):
        with pytest.raises(ValidationError, match="replicas exceed slots"):
            ProtocolConfig(slots=4, policy=CoefficientPolicy.FIXED_REPLICAS, d=5)

    def test_policy_parameters_required(self):
        with pytest.raises(ValidationError):
            ProtocolConfig(policy=CoefficientPolicy.FIXED_PROBABILITY)
        with pytest.raises(ValidationError):
            ProtocolConfig(policy=CoefficientPolicy.FIXED_REPLICAS)

    def test_transmit_probability(self):
        assert ProtocolConfig(field_bits=8).transmit_probability == pytest.approx(255 / 256)
        assert ProtocolConfig(policy="fixed-probability", p=0.1).expected_replicas == pytest.approx(15.0)
        assert ProtocolConfig(slots=100, policy="fixed-replicas", d=3).transmit_probability == 0.03

    def test_frozen_and_strict(self):
        cfg = ProtocolConfig()
        with pytest.raises(ValidationError):
            cfg.slots = 10
        with pytest.raises(ValidationError):
            ProtocolConfig(frames=3)

    def test_warmup_defaults_to_backlog(self):
        assert ProtocolConfig(backlog=7).warmup == 7
        assert ProtocolConfig(backlog=7, warmup_frames=0).warmup == 0

    def test_unlimited_preambles_need_ideal_phy(self):
        assert not ProtocolConfig(preamble_limit=False).preamble_limit
        with pytest.raises(ValidationError, match="finite preamble set"):
            ProtocolConfig(preamble_limit=False, ideal_phy=False)

    def test_fingerprint_stable(self):
        assert ProtocolConfig(slots=20).fingerprint == ProtocolConfig(slots=20).fingerprint
        assert ProtocolConfig(slots=20).fingerprint != ProtocolConfig(slots=21).fingerprint


class TestPattern:

    def test_reproducible_from_preambles(self):
        cfg = ProtocolConfig(slots=30)
        seeds = terminal_seeds([4, 17, 99], frame_key=12)
        a = generate_pattern(seeds, cfg)
        b = generate_pattern(terminal_seeds([4, 17, 99], frame_key=12), cfg)
        np.testing.assert_array_equal(a.entries, b.entries)
        assert a.shape == (30, 3)

    def test_frame_key_changes_pattern(self):
        cfg = ProtocolConfig(slots=30)
        a = generate_pattern(terminal_seeds([4], 0), cfg)
        b = generate_pattern(terminal_seeds([4], 1), cfg)
        assert not np.array_equal(a.entries, b.entries)

    def test_column_depends_only_on_its_seed(self):
        cfg = ProtocolConfig(slots=25)
        seeds = terminal_seeds([1, 2, 3], 5)
        full = generate_pattern(seeds, cfg)
        alone = generate_pattern(seeds[1:2], cfg)
        np.testing.assert_array_equal(full.entries[:, 1], alone.entries[:, 0])

    def test_uniform_entries_in_field(self):
        cfg = ProtocolConfig(slots=200, field_bits=3)
        entries = generate_pattern(terminal_seeds(range(1, 50), 0), cfg).entries
        assert entries.min() >= 0
        assert entries.max() <= 7
        assert np.mean(entries == 0) == pytest.approx(1 / 8, abs=0.02)

    def test_fixed_replicas(self):
        cfg = ProtocolConfig(slots=40, policy="fixed-replicas", d=3)
        entries = generate_pattern(terminal_seeds(range(1, 30), 3), cfg).entries
        np.testing.assert_array_equal(np.count_nonzero(entries, axis=0), 3)

    def test_uniform_nonzero_fraction(self):
        entries = generate_pattern(terminal_seeds(range(1, 668), 4), ProtocolConfig(slots=150)).entries
        assert entries.size >= 100_000
        assert np.count_nonzero(entries) / entries.size == pytest.approx(0.9961, abs=0.001)

    def test_fixed_probability(self):
        seeds = terminal_seeds(range(1, 80), 9)
        sparse = generate_pattern(seeds, ProtocolConfig(slots=150, policy="fixed-probability", p=0.05))
        assert np.count_nonzero(sparse.entries) / sparse.entries.size == pytest.approx(0.05, abs=0.01)
        dense = generate_pattern(seeds, ProtocolConfig(slots=150, policy="fixed-probability", p=1.0))
        assert np.all(dense.entries > 0)

    def test_empty_frame(self):
        assert generate_pattern([], ProtocolConfig(slots=5)).shape == (5, 0)

    def test_replica_pattern(self):
        pattern = replica_pattern(terminal_seeds(range(1, 20), 0), 10, 2)
        assert pattern.shape == (10, 19)
        np.testing.assert_array_equal(pattern.sum(axis=0), 2)
        with pytest.raises(ParameterError):
            replica_pattern([1], 2, 3)


class TestPreambleAllocation:

    def test_distinct_without_collisions(self, rng):
        preambles, usable = allocate_preambles(60, rng)
        assert usable.all()
        assert len(set(preambles.tolist())) == 60
        assert preambles.min() >= 1 and preambles.max() <= 127

    def test_overflow_leaves_terminals_out(self, rng):
        preambles, usable = allocate_preambles(200, rng)
        assert usable.sum() == 127
        assert len(set(preambles[usable].tolist())) == 127

    def test_unlimited_identity_space(self, rng):
        preambles, usable = allocate_preambles(200, rng, available=200)
        assert usable.all()
        assert len(set(preambles.tolist())) == 200

    def test_collisions_allowed(self, rng):
        preambles, usable = allocate_preambles(100, rng, collisions=True)
        assert usable.all()
        assert len(set(preambles.tolist())) < 100


class TestFrameDecoder:
    """Elimination recovers what the equations determine; full-rank is all or nothing."""

    def setup_method(self):
        self.spec = FieldSpec(8)
        self.pattern = FieldMatrix.from_rows([[1, 0, 0], [0, 1, 1], [0, 0, 0]], self.spec)
        self.active = tuple(ActiveTerminal(i, i + 1) for i in range(3))

    def test_elimination_partial(self):
        frame = FrameState.ideal(self.active, self.pattern)
        recovered, lost = decode_frame(frame, ProtocolConfig())
        assert set(recovered) == {0}
        assert lost == {1, 2}
        assert frame.lost == {1, 2}

    def test_full_rank_all_or_nothing(self):
        frame = FrameState.ideal(self.active, self.pattern)
        recovered, lost = decode_frame(frame, ProtocolConfig(decoder=Decoder.FULL_RANK))
        assert recovered == {}
        assert lost == {0, 1, 2}

    def test_full_rank_skips_silent_terminals(self):
        pattern = FieldMatrix.from_rows([[1, 0, 0], [0, 2, 0], [0, 0, 0]], self.spec)
        frame = FrameState.ideal(self.active, pattern)
        recovered, lost = decode_frame(frame, ProtocolConfig(decoder=Decoder.FULL_RANK))
        assert set(recovered) == {0, 1}
        assert lost == {2}

    def test_full_rank_blocked_by_dependent_transmitters(self):
        pattern = FieldMatrix.from_rows([[1, 1, 0], [1, 1, 0], [0, 0, 0]], self.spec)
        frame = FrameState.ideal(self.active, pattern)
        recovered, lost = decode_frame(frame, ProtocolConfig(decoder=Decoder.FULL_RANK))
        assert recovered == {}
        assert lost == {0, 1, 2}

    def test_values_are_solved(self):
        pattern = FieldMatrix.from_rows([[1, 1], [0, 1]], self.spec)
        messages = np.array([[10, 20], [3, 4]])
        rows = np.array([messages[0] ^ messages[1], messages[1]])
        frame = FrameState(self.active[:2], pattern, np.array([True, True]), rows)
        recovered, lost = decode_frame(frame, ProtocolConfig())
        assert not lost
        np.testing.assert_array_equal(recovered[0], messages[0])
        np.testing.assert_array_equal(recovered[1], messages[1])

    def test_undecoded_rows_are_ignored(self):
        pattern = FieldMatrix.from_rows([[1, 0], [0, 1]], self.spec)
        frame = FrameState(self.active[:2], pattern, np.array([True, False]))
        recovered, lost = decode_frame(frame, ProtocolConfig())
        assert set(recovered) == {0}
        assert lost == {1}

    def test_empty_frame(self):
        frame = FrameState.ideal((), FieldMatrix.zeros(4, 0, self.spec))
        assert decode_frame(frame, ProtocolConfig()) == ({}, set())


class TestCrdsaPeel:

    def test_resolves_chain(self):
        pattern = np.array([[1, 1, 0], [1, 0, 0], [0, 1, 1], [0, 0, 1]], dtype=bool)
        recovered, rounds = crdsa_peel(pattern, 20)
        assert recovered.all()
        assert rounds >= 1

    def test_stopping_set(self):
        pattern = np.array([[1, 1], [1, 1]], dtype=bool)
        recovered, rounds = crdsa_peel(pattern, 20)
        assert not recovered.any()
        assert rounds == 0

    def test_iteration_cap(self):
        # each round frees exactly one new burst
        pattern = np.array([[1, 0, 0], [1, 1, 0], [0, 1, 1]], dtype=bool)
        recovered, rounds = crdsa_peel(pattern, 1)
        np.testing.assert_array_equal(recovered, [True, False, False])
        assert rounds == 1
        assert crdsa_peel(pattern, 3)[0].all()

    def test_scheme_needs_two_replicas(self):
        with pytest.raises(ParameterError):
            CrdsaScheme(ProtocolConfig(policy="fixed-replicas", d=1))


class TestNcdpScheme:

    def test_full_phy_needs_link(self):
        with pytest.raises(ParameterError):
            NcdpScheme(ProtocolConfig(ideal_phy=False))

    def test_shared_preamble_is_unrecoverable(self, rng):
        scheme = NcdpScheme(ProtocolConfig(slots=10))
        outcome = scheme.run_frame(np.array([5, 5, 9]), frame_key=0, rng=rng)
        assert not outcome.recovered[0]
        assert not outcome.recovered[1]
        assert outcome.transmissions.shape == (3,)

    def test_light_load_is_recovered(self, rng):
        scheme = NcdpScheme(ProtocolConfig(slots=20))
        outcome = scheme.run_frame(np.arange(1, 6), frame_key=3, rng=rng)
        assert outcome.recovered.all()


class TestMetrics:

    def test_ratio_estimate(self):
        ratio, se = ratio_estimate([1, 2], [2, 2])
        assert ratio == pytest.approx(0.75)
        assert se > 0
        assert ratio_estimate([0, 0], [0, 0]) == (0.0, 0.0)
        assert ratio_estimate([1], [4]) == (0.25, 0.0)

    def test_no_feedback(self):
        m = Metrics.no_feedback(0.5, 20, [10, 10], [5, 10], [20, 20])
        assert m.loss == pytest.approx(0.25)
        assert m.throughput == pytest.approx(0.375)
        assert m.energy == pytest.approx(2.0)
        assert m.empirical_load == pytest.approx(0.5)
        assert m.as_dict()["frames"] == 2


class TestSimulation:

    def test_frames_must_be_positive(self, rng):
        with pytest.raises(ParameterError):
            simulate_ncdp(ProtocolConfig(slots=10), TrafficModel(load=0.5), 0, rng)

    def test_zero_load(self, rng):
        m = simulate_ncdp(ProtocolConfig(slots=10), TrafficModel(load=0.0), 5, rng)
        assert m.throughput == 0.0
        assert m.arrivals == 0

    def test_reproducible(self):
        cfg = ProtocolConfig(slots=20)
        a = simulate_ncdp(cfg, TrafficModel(load=0.8), 30, trial_rng(1, 0, 1), traffic_rng=trial_rng(1, 0, 0))
        b = simulate_ncdp(cfg, TrafficModel(load=0.8), 30, trial_rng(1, 0, 1), traffic_rng=trial_rng(1, 0, 0))
        assert a == b

    def test_matched_arrivals_across_schemes(self):
        traffic = TrafficModel(load=0.6)
        ncdp = simulate_ncdp(ProtocolConfig(slots=20), traffic, 20, trial_rng(3, 1), traffic_rng=trial_rng(3, 0))
        crdsa = simulate_crdsa(ProtocolConfig(slots=20, policy="fixed-replicas", d=2), traffic, 20,
                               trial_rng(3, 2), traffic_rng=trial_rng(3, 0))
        assert ncdp.arrivals == crdsa.arrivals

    @pytest.mark.parametrize("scheme", ["ncdp", "crdsa"])
    def test_arq_conserves_messages(self, rng, scheme):
        cfg = ProtocolConfig(slots=20, feedback=Feedback.ARQ, backlog=5,
                             policy="fixed-replicas" if scheme == "crdsa" else "uniform",
                             d=2 if scheme == "crdsa" else None)
        run = simulate_crdsa if scheme == "crdsa" else simulate_ncdp
        m = run(cfg, TrafficModel(load=1.1), 40, rng)
        assert m.arrivals == m.delivered + m.lost + m.backlog
        assert m.backlog > 0
        assert m.frames == 40
        assert 0.0 <= m.loss <= 1.0

    def test_arq_energy_counts_retransmissions(self, rng):
        cfg = ProtocolConfig(slots=20, feedback=Feedback.ARQ, backlog=5, policy="fixed-replicas", d=2)
        m = simulate_crdsa(cfg, TrafficModel(load=0.4), 60, rng)
        assert m.energy >= 2.0

    def test_slotted_aloha_matches_formula(self, rng):
        m = simulate_sa(TrafficModel(load=0.5), slots=100, frames=300, rng=rng)
        assert m.throughput == pytest.approx(slotted_aloha_throughput(0.5), abs=0.02)
        assert m.energy == pytest.approx(1.0)

    @pytest.mark.slow
    def test_uniform_ncdp_matches_closed_form(self):
        cfg = ProtocolConfig(slots=20, decoder=Decoder.FULL_RANK)
        m = simulate_ncdp(cfg, TrafficModel(load=1.0), 2000, trial_rng(11, 1), traffic_rng=trial_rng(11, 0))
        assert m.throughput == pytest.approx(throughput_analytic(1.0, 20, 8), abs=0.03)

    @pytest.mark.parametrize("scheme", ["ncdp", "crdsa"])
    def test_preamble_surplus_is_lost(self, scheme):
        cfg = ProtocolConfig(slots=100, policy="fixed-replicas", d=3, feedback=Feedback.ARQ,
                             backlog=10, warmup_frames=0)
        run = simulate_crdsa if scheme == "crdsa" else simulate_ncdp
        frames = 15
        m = run(cfg, TrafficModel(load=1.6), frames, trial_rng(8, 0, 1), traffic_rng=trial_rng(8, 0, 0))
        assert m.arrivals == m.delivered + m.lost + m.backlog
        # at most 127 terminals transmit per frame, the rest are dropped on the spot
        assert m.lost >= m.arrivals - 127 * frames - m.backlog
        assert m.lost > 0
        assert m.throughput <= 127 / 100
        assert m.backlog <= 127 * cfg.backlog

    def test_preamble_limit_off_admits_every_terminal(self):
        traffic = TrafficModel(load=2.0)
        capped = simulate_crdsa(ProtocolConfig(slots=100, policy="fixed-replicas", d=3), traffic, 5,
                                trial_rng(9, 1), traffic_rng=trial_rng(9, 0))
        unlimited = simulate_crdsa(ProtocolConfig(slots=100, policy="fixed-replicas", d=3, preamble_limit=False),
                                   traffic, 5, trial_rng(9, 1), traffic_rng=trial_rng(9, 0))
        assert capped.arrivals == unlimited.arrivals
        assert unlimited.transmissions == 3 * unlimited.arrivals
        assert capped.transmissions == 3 * 127 * 5

    @pytest.mark.parametrize("load", [0.4, 0.6, 0.8])
    def test_ncdp_upper_bounds_crdsa(self, load):
        # same seeds give both schemes the same arrivals, preambles and replica slots
        traffic = TrafficModel(load=load)
        ncdp = simulate_ncdp(ProtocolConfig(slots=50, policy="fixed-replicas", d=3), traffic, 60,
                             trial_rng(12, 1), traffic_rng=trial_rng(12, 0))
        crdsa = simulate_crdsa(ProtocolConfig(slots=50, policy="fixed-replicas", d=3), traffic, 60,
                               trial_rng(12, 1), traffic_rng=trial_rng(12, 0))
        assert ncdp.arrivals == crdsa.arrivals
        assert ncdp.delivered >= crdsa.delivered
        assert ncdp.throughput >= crdsa.throughput

    @pytest.mark.slow
    def test_uniform_energy_per_message(self):
        cfg = ProtocolConfig(slots=150, feedback=Feedback.ARQ, preamble_limit=False)
        m = simulate_ncdp(cfg, TrafficModel(load=0.3), 60, trial_rng(13, 1), traffic_rng=trial_rng(13, 0))
        assert m.energy == pytest.approx(149.4, abs=1.0)

    @pytest.mark.slow
    @pytest.mark.integration
    def test_full_phy_frames(self):
        cfg = ProtocolConfig(slots=4, ideal_phy=False)
        link = SlotLink(LinkConfig(ebn0_db=12.0, span=8, oversampling=4), cfg.field_spec)
        m = simulate_ncdp(cfg, TrafficModel(load=0.3), 6, trial_rng(14, 1), link, traffic_rng=trial_rng(14, 0))
        assert m.arrivals > 0
        assert m.arrivals == m.delivered + m.lost
        assert m.delivered >= 0.7 * m.arrivals
        assert 3.5 <= m.energy <= 4.0


class TestSlotLink:

    def test_payload_must_split_into_symbols(self):
        with pytest.raises(ParameterError):
            SlotLink(LinkConfig(), FieldSpec(5))

    def test_payload_size(self):
        assert LinkConfig().payload_bits == 728
        assert LinkConfig(crc="crc8").payload_bits == 736
        assert SlotLink(LinkConfig()).message_symbols == 91

    def test_encode_is_linear_in_messages(self, rng):
        link = SlotLink(LinkConfig())
        a, b = link.random_messages(2, rng)
        np.testing.assert_array_equal(link.encode(a) ^ link.encode(b), link.encode(a ^ b))

    def test_empty_slot(self, rng):
        assert not SlotLink(LinkConfig()).receive([], rng).decoded

    @pytest.mark.slow
    @pytest.mark.parametrize("k", [1, 2])
    def test_xor_decodes_at_high_snr(self, k):
        link = SlotLink(LinkConfig(ebn0_db=12.0, oversampling=4))
        assert all(link.xor_trial(k, trial_rng(5, k, t)) for t in range(3))

    def test_slot_delays_start_at_zero(self, rng):
        link = SlotLink(LinkConfig(strategy="ms", dt_max=0.25))
        channels = link.slot_channels([link.draw_channel(rng) for _ in range(4)], rng)
        delays = [c.rel_delay for c in channels]
        assert min(delays) == 0.0
        assert max(delays) <= 0.25
        assert all(-np.pi <= c.phase <= np.pi for c in channels)

    def test_synchronous_slots_have_no_delays(self, rng):
        link = SlotLink(LinkConfig(dt_max=0.25))
        channels = link.slot_channels([ChannelParams(), ChannelParams()], rng)
        assert [c.rel_delay for c in channels] == [0.0, 0.0]
        assert link.slot_channels([], rng) == []

    def test_identify_over_frequency_range(self):
        link = SlotLink(LinkConfig())
        bursts = [
            (Burst.build(3, np.empty(0), link.bank, 0), ChannelParams(freq_offset=0.01, phase=0.4)),
            (Burst.build(77, np.empty(0), link.bank, 1), ChannelParams(freq_offset=0.004, phase=-1.2)),
        ]
        slot = synthesize_collision(bursts, 0.0, link.shape)
        assert {3, 77} <= link.identify(slot)

    def test_undetected_burst_is_not_decoded(self, rng):
        link = SlotLink(LinkConfig(ebn0_db=12.0, csi="estimated", oversampling=4))
        message = link.random_messages(1, rng)[0]
        weak = Transmission(0, 5, link.encode(message), ChannelParams(amplitude=0.05))
        assert not link.receive([weak], rng).decoded

    @pytest.mark.slow
    def test_estimated_csi_decodes_at_high_snr(self):
        link = SlotLink(LinkConfig(ebn0_db=12.0, csi="estimated", oversampling=4))
        assert sum(link.xor_trial(2, trial_rng(17, t)) for t in range(5)) >= 4

    @pytest.mark.slow
    def test_two_user_frame_error_rate(self):
        link = SlotLink(LinkConfig(ebn0_db=8.0, oversampling=4))
        errors = sum(not link.xor_trial(2, trial_rng(18, t)) for t in range(100))
        assert errors / 100 < 0.1

    @pytest.mark.slow
    def test_error_rate_grows_with_collision_size(self):
        link = SlotLink(LinkConfig(ebn0_db=6.0, oversampling=4))
        fer = {k: sum(not link.xor_trial(k, trial_rng(19, k, t)) for t in range(100)) / 100 for k in (2, 4)}
        assert fer[4] + 0.02 >= fer[2]

    @pytest.mark.slow
    @pytest.mark.integration
    def test_asynchronous_strategies(self):
        fer = {}
        for strategy in SamplingStrategy:
            link = SlotLink(LinkConfig(ebn0_db=10.0, strategy=strategy, dt_max=0.25, oversampling=4))
            fer[strategy] = sum(not link.xor_trial(5, trial_rng(20, t)) for t in range(150)) / 150
        assert fer[SamplingStrategy.IDEAL] <= min(fer.values()) + 0.02
        for strategy in (SamplingStrategy.ML, SamplingStrategy.MS, SamplingStrategy.US, SamplingStrategy.EC):
            assert fer[strategy] <= fer[SamplingStrategy.MD] + 0.05


@pytest.mark.slow
class TestArqBenchmarks:
    """Load sweeps over 150-slot frames with a 50-frame retransmission window."""

    @staticmethod
    def sweep(loads, scheme="ncdp", frames=150, seed=30, **protocol):
        cfg = ProtocolConfig(slots=150, feedback=Feedback.ARQ, preamble_limit=False, **protocol)
        run = simulate_crdsa if scheme == "crdsa" else simulate_ncdp
        return [run(cfg, TrafficModel(load=g), frames, trial_rng(seed, i, 1), traffic_rng=trial_rng(seed, i, 0))
                for i, g in enumerate(loads)]

    @staticmethod
    def peak(points):
        return max(points, key=lambda m: m.throughput)

    def test_ncdp_three_replicas(self):
        best = self.peak(self.sweep([0.6, 0.65, 0.7, 0.75], policy="fixed-replicas", d=3))
        assert 0.65 <= best.throughput <= 0.77
        assert 2.9 <= best.energy <= 3.4

    def test_ncdp_two_replicas(self):
        best = self.peak(self.sweep([0.4, 0.45, 0.5, 0.55], policy="fixed-replicas", d=2))
        assert 0.45 <= best.throughput <= 0.57
        assert 1.9 <= best.energy <= 2.4

    def test_crdsa_three_replicas(self):
        crdsa = self.peak(self.sweep([0.5, 0.55, 0.6, 0.65], scheme="crdsa", policy="fixed-replicas", d=3))
        ncdp = self.peak(self.sweep([0.5, 0.55, 0.6, 0.65], policy="fixed-replicas", d=3))
        assert 0.55 <= crdsa.throughput <= 0.67
        assert ncdp.throughput >= crdsa.throughput

    def test_sparse_coefficients_energy(self):
        m = self.sweep([0.3], policy="fixed-probability", p=0.0453)[0]
        assert m.energy == pytest.approx(6.8, abs=0.5)

    def test_sparse_coefficients_peak(self):
        best = self.peak(self.sweep([0.7, 0.75, 0.8, 0.85], policy="fixed-probability", p=0.0453))
        assert best.throughput == pytest.approx(0.8, abs=0.05)


@pytest.mark.slow
class TestCoefficientDensity:
    """Without feedback, sparse coefficients cost little throughput until the frame loses rank."""

    LOADS = [0.6, 0.7, 0.75, 0.8, 0.85]

    def sweep(self, **protocol):
        cfg = ProtocolConfig(slots=100, decoder=Decoder.FULL_RANK, **protocol)
        return [simulate_ncdp(cfg, TrafficModel(load=g), 400, trial_rng(40, i, 1), traffic_rng=trial_rng(40, i, 0))
                for i, g in enumerate(self.LOADS)]

    def test_sparse_peak_close_to_uniform(self):
        dense = max(m.throughput for m in self.sweep(policy="fixed-probability", p=0.9961))
        sparse = max(m.throughput for m in self.sweep(policy="fixed-probability", p=0.0625))
        assert sparse == pytest.approx(dense, rel=0.02)

    def test_sparser_frames_lose_throughput(self):
        dense = max(m.throughput for m in self.sweep(policy="fixed-probability", p=0.9961))
        sparse = max(m.throughput for m in self.sweep(policy="fixed-probability", p=0.0461))
        assert 0.05 <= 1.0 - sparse / dense <= 0.14
