from functools import reduce
from operator import xor

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rfidlbs.framing import (
    FRAME_LEN,
    BadDelimiter,
    ChecksumMismatch,
    StreamScanner,
    decode_frame,
    encode_frame,
    scan_stream,
)

tag_ids = st.integers(min_value=0, max_value=(1 << 40) - 1)


def xor_fold(data: bytes) -> int:
    return reduce(xor, data, 0)


class TestEncode:
    def test_reference_tag_id(self):
        frame = encode_frame(0x110055B53A)
        assert frame == bytes.fromhex("AA110055B53ACB55")
        assert frame[6] == xor_fold(bytes([0x11, 0x00, 0x55, 0xB5, 0x3A]))

    def test_zero(self):
        assert encode_frame(0) == bytes.fromhex("AA0000000000" + "0055")

    def test_all_ones(self):
        frame = encode_frame(0xFFFFFFFFFF)
        assert frame == bytes.fromhex("AAFFFFFFFFFFFF55")
        assert frame[6] == xor_fold(b"\xFF" * 5) == 0xFF

    @given(tag_ids)
    def test_checksum_matches_xor_oracle(self, tag_id):
        frame = encode_frame(tag_id)
        assert len(frame) == FRAME_LEN
        assert frame[6] == xor_fold(frame[1:6])

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            encode_frame(1 << 40)


class TestDecode:
    def test_round_trip_reference_example(self):
        assert decode_frame(bytes.fromhex("AA110055B53ACB55")).tag_id == 0x110055B53A

    def test_checksum_mismatch(self):
        with pytest.raises(ChecksumMismatch):
            decode_frame(bytes.fromhex("AA110055B53ACC55"))

    def test_bad_start_delimiter(self):
        with pytest.raises(BadDelimiter):
            decode_frame(bytes.fromhex("AB110055B53ACB55"))

    def test_bad_end_delimiter(self):
        with pytest.raises(BadDelimiter):
            decode_frame(bytes.fromhex("AA110055B53ACB56"))

    def test_wrong_length(self):
        with pytest.raises(BadDelimiter):
            decode_frame(b"\xAA\x00")

    @given(tag_ids)
    def test_round_trip(self, tag_id):
        assert decode_frame(encode_frame(tag_id)).tag_id == tag_id

    @given(tag_ids, st.integers(min_value=8, max_value=55))
    def test_single_bit_corruption_detected(self, tag_id, bit):
        # bits 8..55 cover the five id bytes and the checksum byte
        frame = bytearray(encode_frame(tag_id))
        frame[bit // 8] ^= 1 << (bit % 8)
        with pytest.raises((ChecksumMismatch, BadDelimiter)):
            decode_frame(bytes(frame))


class TestScanStream:
    def test_empty(self):
        frames, diag = scan_stream(b"")
        assert frames == [] and diag.skipped_bytes == 0

    def test_garbage_then_frame(self):
        # garbage alphabet avoids the start byte, so no accidental frames
        stream = b"\x01\x02\x03" + encode_frame(0x110055B53A)
        frames, diag = scan_stream(stream)
        assert [f.tag_id for f in frames] == [0x110055B53A]
        assert diag.skipped_bytes == 3

    def test_back_to_back_frames(self):
        stream = encode_frame(1) + encode_frame(2)
        frames, diag = scan_stream(stream)
        assert [f.tag_id for f in frames] == [1, 2]
        assert diag.skipped_bytes == 0

    def test_corrupt_frame_is_skipped_and_resyncs(self):
        bad = bytearray(encode_frame(1))
        bad[3] ^= 0xFF
        stream = bytes(bad) + encode_frame(2)
        frames, diag = scan_stream(stream)
        assert [f.tag_id for f in frames] == [2]
        assert diag.rejected_candidates >= 1

    def test_trailing_partial_counts_as_skipped(self):
        frames, diag = scan_stream(encode_frame(1)[:5])
        assert frames == []
        assert diag.skipped_bytes == 5

    @given(st.lists(tag_ids, min_size=0, max_size=5),
           st.lists(st.binary(max_size=6), min_size=0, max_size=6))
    def test_resync_recovers_embedded_frames(self, ids, gaps):
        # interleave frames with garbage that cannot contain a start byte
        clean_gaps = [bytes(b % 0xAA for b in g) for g in gaps]
        stream = b""
        for i, tag_id in enumerate(ids):
            if i < len(clean_gaps):
                stream += clean_gaps[i]
            stream += encode_frame(tag_id)
        frames, _ = scan_stream(stream)
        assert [f.tag_id for f in frames] == ids


class TestStreamScanner:
    def test_frame_split_across_feeds(self):
        scanner = StreamScanner()
        frame = encode_frame(0x123456789A)
        assert scanner.feed(frame[:4]) == []
        got = scanner.feed(frame[4:])
        assert [f.tag_id for f in got] == [0x123456789A]

    def test_timestamps_attached(self):
        scanner = StreamScanner()
        got = scanner.feed(encode_frame(5), timestamp=1.25)
        assert got[0].timestamp == 1.25
