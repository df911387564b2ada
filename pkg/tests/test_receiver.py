import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oblink.bitunit import index_to_ob, make_scheme_params
from oblink.receiver import receive_stream, recover_ts_index, slots_from_stream

P36 = make_scheme_params(36, 4, 256)
P_SMALL = make_scheme_params(8, 2, 4)  # phi=4, cb_len=6


def brute_force_round_slot(psi: int, phi: int) -> tuple[int, int]:
    """Independent oracle: walk the counter one slot at a time."""
    round_no, slot = 0, 0
    for _ in range(psi):
        slot += 1
        if slot > phi:
            slot = 1
            round_no += 1
    return round_no, slot


class TestRecoverTsIndex:
    def test_frozen_examples(self):
        assert recover_ts_index(1, 16) == (0, 1)
        assert recover_ts_index(16, 16) == (0, 16)
        assert recover_ts_index(17, 16) == (1, 1)
        assert recover_ts_index(33, 16) == (2, 1)

    @pytest.mark.parametrize("phi", [1, 2, 8, 16, 32])
    def test_against_walking_oracle(self, phi):
        for psi in range(1, 10 * phi + 1):
            assert recover_ts_index(psi, phi) == brute_force_round_slot(psi, phi)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            recover_ts_index(0, 4)
        with pytest.raises(ValueError):
            recover_ts_index(5, 0)

    @given(st.integers(1, 10**9), st.sampled_from([1, 2, 4, 8, 16, 32]))
    @settings(max_examples=200, deadline=None)
    def test_periodicity(self, psi, phi):
        r1, s1 = recover_ts_index(psi, phi)
        r2, s2 = recover_ts_index(psi + phi, phi)
        assert s1 == s2 and r2 == r1 + 1
        assert 1 <= s1 <= phi


class TestReceiveStream:
    def test_single_all_padding_frame(self):
        stream = np.zeros(P_SMALL.phi * P_SMALL.cb_len, dtype=np.uint8)
        bus = receive_stream(stream, P_SMALL)
        assert bus.shape == (4, 8)
        for i, row in enumerate(bus, start=1):
            assert np.array_equal(row[:2], index_to_ob(i, P_SMALL))
            assert not row[2:].any()

    def test_pad_strip_and_alignment(self):
        payloads = np.arange(12) % 2
        stream = np.concatenate([payloads, np.zeros(3, np.uint8)]).astype(np.uint8)
        bus = receive_stream(stream, P_SMALL, pad_len=3)
        assert bus.shape == (2, 8)
        assert np.array_equal(bus[0][2:], payloads[:6])
        assert np.array_equal(bus[1][2:], payloads[6:])

    def test_rejects_misaligned_stream(self):
        with pytest.raises(ValueError):
            receive_stream(np.zeros(7, np.uint8), P_SMALL)
        with pytest.raises(ValueError):
            receive_stream(np.zeros(12, np.uint8), P_SMALL, pad_len=13)

    def test_psi_start_continues_the_counter(self):
        whole = np.arange(24) % 2
        all_at_once = receive_stream(whole.astype(np.uint8), P_SMALL)
        part1 = receive_stream(whole[:12].astype(np.uint8), P_SMALL)
        part2 = receive_stream(whole[12:].astype(np.uint8), P_SMALL, psi_start=3)
        assert np.array_equal(np.vstack([part1, part2]), all_at_once)

    def test_slots_view_matches(self):
        stream = (np.arange(18) % 2).astype(np.uint8)
        slots = slots_from_stream(stream, P_SMALL)
        assert [s.psi for s in slots] == [1, 2, 3]
        assert [s.slot_index for s in slots] == [1, 2, 3]
        assert [s.round_no for s in slots] == [0, 0, 0]
        bus = receive_stream(stream, P_SMALL)
        for s, row in zip(slots, bus):
            assert np.array_equal(s.payload_bits, row[2:])


@given(st.integers(0, 2**16 - 1), st.integers(1, 40))
@settings(max_examples=50, deadline=None)
def test_stream_roundtrip_against_transmit_order(seed, n_slots):
    """Slots written in counter order always come back in the same classes."""
    params = P_SMALL
    rng = np.random.default_rng(seed)
    payloads = rng.integers(0, 2, size=(n_slots, params.cb_len), dtype=np.uint8)
    bus = receive_stream(payloads.reshape(-1), params)
    for j, row in enumerate(bus):
        _, slot = recover_ts_index(j + 1, params.phi)
        assert np.array_equal(row[: params.k_ob], index_to_ob(slot, params))
        assert np.array_equal(row[params.k_ob :], payloads[j])
