"""Serial wire format for tag reports (reader -> middleware link).

Frame layout, 8 bytes, normative:

    offset 0   0xAA            start delimiter
    offset 1-5 tag id          big-endian, 5 bytes (40-bit id)
    offset 6   checksum        XOR of the five id bytes
    offset 7   0x55            end delimiter

The receiver assigns timestamps; they are not on the wire.
"""

from __future__ import annotations

from dataclasses import dataclass

from .tags import TAG_ID_MAX

FRAME_LEN = 8
START_BYTE = 0xAA
END_BYTE = 0x55


class FrameError(Exception):
    pass


class BadDelimiter(FrameError):
    pass


class ChecksumMismatch(FrameError):
    pass


@dataclass(frozen=True)
class TagReportFrame:
    tag_id: int
    timestamp: float = 0.0


def encode_frame(tag_id: int) -> bytes:
    if not 0 <= tag_id <= TAG_ID_MAX:
        raise ValueError(f"tag id out of 40-bit range: {tag_id:#x}")
    payload = tag_id.to_bytes(5, "big")
    checksum = 0
    for b in payload:
        checksum ^= b
    return bytes([START_BYTE]) + payload + bytes([checksum, END_BYTE])


def decode_frame(data: bytes, timestamp: float = 0.0) -> TagReportFrame:
    if len(data) != FRAME_LEN:
        raise BadDelimiter(f"frame must be {FRAME_LEN} bytes, got {len(data)}")
    if data[0] != START_BYTE or data[7] != END_BYTE:
        raise BadDelimiter(f"bad delimiters {data[0]:#04x}..{data[7]:#04x}")
    payload = data[1:6]
    checksum = 0
    for b in payload:
        checksum ^= b
    if checksum != data[6]:
        raise ChecksumMismatch(f"expected {checksum:#04x}, got {data[6]:#04x}")
    return TagReportFrame(int.from_bytes(payload, "big"), timestamp)


@dataclass
class ScanDiagnostics:
    skipped_bytes: int = 0
    rejected_candidates: int = 0


class StreamScanner:
    """Restartable frame scanner for a serial byte stream.

    Hunts for the start byte, attempts an 8-byte decode, and on failure
    advances one byte (resynchronization). Partial trailing data is carried
    over to the next feed() call.
    """

    def __init__(self) -> None:
        self._buf = bytearray()
        self.diagnostics = ScanDiagnostics()

    def feed(self, data: bytes, timestamp: float = 0.0) -> list[TagReportFrame]:
        self._buf.extend(data)
        frames: list[TagReportFrame] = []
        pos = 0
        buf = self._buf
        while True:
            start = buf.find(START_BYTE, pos)
            if start < 0:
                self.diagnostics.skipped_bytes += len(buf) - pos
                pos = len(buf)
                break
            self.diagnostics.skipped_bytes += start - pos
            pos = start
            if len(buf) - pos < FRAME_LEN:
                break  # partial candidate, wait for more bytes
            try:
                frames.append(decode_frame(bytes(buf[pos:pos + FRAME_LEN]), timestamp))
                pos += FRAME_LEN
            except FrameError:
                self.diagnostics.rejected_candidates += 1
                self.diagnostics.skipped_bytes += 1
                pos += 1
        del buf[:pos]
        return frames

    def flush(self) -> None:
        """Discard any carried partial data, counting it as skipped."""
        self.diagnostics.skipped_bytes += len(self._buf)
        self._buf.clear()


def scan_stream(data: bytes) -> tuple[list[TagReportFrame], ScanDiagnostics]:
    """One-shot scan of a complete byte stream; trailing partial data counts
    as skipped."""
    scanner = StreamScanner()
    frames = scanner.feed(data)
    scanner.flush()
    return frames, scanner.diagnostics
