"""Value-level model of RFID tags: identifiers, classes, memory, lifecycle.

All operations are pure: they take a Tag and return an updated Tag, never
mutating the input. Tag identifiers are 40-bit integers whose canonical text
form is exactly 10 uppercase hex characters (e.g. "110055B53A").
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

TAG_ID_BITS = 40
TAG_ID_HEX_LEN = 10
TAG_ID_MAX = (1 << TAG_ID_BITS) - 1

KILL_CODE_MAX = 0xFFFF

PASSIVE_CAPACITY = 128          # bytes
ACTIVE_CAPACITY = 128 * 1024    # bytes


class TagError(Exception):
    """Base class for tag-model errors."""


class MalformedId(TagError):
    pass


class ReadOnlyTag(TagError):
    pass


class AlreadyWritten(TagError):
    pass


class OutOfBounds(TagError):
    pass


class TagKilled(TagError):
    pass


class BadKillCode(TagError):
    pass


class Unsupported(TagError):
    """Raised for Class3 sensor / Class4 transmit behaviors, which are
    representable but deliberately not modeled."""


class TagClass(Enum):
    CLASS0 = 0  # read-only, data fixed at manufacture
    CLASS1 = 1  # write-once (WORM)
    CLASS2 = 2  # read-write
    CLASS3 = 3  # read-write, on-board sensors
    CLASS4 = 4  # read-write, tag-to-tag transmitter


class TagPower(Enum):
    PASSIVE = "passive"
    ACTIVE = "active"


def parse_tag_id(text: str) -> int:
    """Parse the canonical 10-hex-char tag identifier (either letter case)."""
    if len(text) != TAG_ID_HEX_LEN:
        raise MalformedId(f"tag id must be {TAG_ID_HEX_LEN} hex chars, got {text!r}")
    if not all(c in "0123456789abcdefABCDEF" for c in text):
        raise MalformedId(f"tag id contains non-hex characters: {text!r}")
    return int(text, 16)


def format_tag_id(value: int) -> str:
    """Format a 40-bit value as 10 uppercase hex characters."""
    if not 0 <= value <= TAG_ID_MAX:
        raise MalformedId(f"tag id out of 40-bit range: {value:#x}")
    return f"{value:010X}"


def default_capacity(power: TagPower) -> int:
    return PASSIVE_CAPACITY if power is TagPower.PASSIVE else ACTIVE_CAPACITY


@dataclass(frozen=True)
class Tag:
    id: int
    tag_class: TagClass
    power: TagPower
    memory: bytes
    write_count: int = 0
    killed: bool = False
    kill_code: int = 0

    @property
    def capacity(self) -> int:
        return len(self.memory)


def make_tag(
    tag_id: int,
    tag_class: TagClass = TagClass.CLASS0,
    power: TagPower = TagPower.PASSIVE,
    kill_code: int = 0,
    capacity: int | None = None,
) -> Tag:
    """Manufacture a tag with zero-initialized memory."""
    if not 0 <= tag_id <= TAG_ID_MAX:
        raise MalformedId(f"tag id out of 40-bit range: {tag_id:#x}")
    if not 0 <= kill_code <= KILL_CODE_MAX:
        raise ValueError(f"kill code out of 16-bit range: {kill_code:#x}")
    if capacity is None:
        capacity = default_capacity(power)
    limit = default_capacity(power)
    if not 0 <= capacity <= limit:
        raise ValueError(f"{power.value} capacity must be within [0, {limit}]")
    return Tag(tag_id, tag_class, power, bytes(capacity), kill_code=kill_code)


def write_memory(tag: Tag, offset: int, data: bytes) -> Tag:
    if tag.killed:
        raise TagKilled(format_tag_id(tag.id))
    if tag.tag_class is TagClass.CLASS0:
        raise ReadOnlyTag("Class0 tags are fixed at manufacture")
    if tag.tag_class is TagClass.CLASS1 and tag.write_count >= 1:
        raise AlreadyWritten("Class1 tags are write-once")
    if offset < 0 or offset + len(data) > tag.capacity:
        raise OutOfBounds(f"write [{offset}, {offset + len(data)}) exceeds capacity {tag.capacity}")
    memory = tag.memory[:offset] + bytes(data) + tag.memory[offset + len(data):]
    return replace(tag, memory=memory, write_count=tag.write_count + 1)


def read_memory(tag: Tag, offset: int, length: int) -> bytes:
    if tag.killed:
        raise TagKilled(format_tag_id(tag.id))
    if offset < 0 or length < 0 or offset + length > tag.capacity:
        raise OutOfBounds(f"read [{offset}, {offset + length}) exceeds capacity {tag.capacity}")
    return tag.memory[offset:offset + length]


def kill(tag: Tag, code: int) -> Tag:
    """Permanently disable the tag. Idempotent when already killed."""
    if tag.killed:
        return tag
    if code != tag.kill_code:
        raise BadKillCode(format_tag_id(tag.id))
    return replace(tag, killed=True)


def record_sensor_reading(tag: Tag, value: float) -> Tag:
    raise Unsupported("Class3 sensor recording is not modeled")


def transmit_to_tag(tag: Tag, other: Tag, data: bytes) -> Tag:
    raise Unsupported("Class4 tag-to-tag transmission is not modeled")
