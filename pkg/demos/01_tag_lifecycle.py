"""Walk through the tag model: identifiers, class semantics, and the kill code.

Run: python3 demos/01_tag_lifecycle.py
"""

from rfidlbs.tags import (
    AlreadyWritten,
    BadKillCode,
    ReadOnlyTag,
    TagClass,
    format_tag_id,
    kill,
    make_tag,
    parse_tag_id,
    read_memory,
    write_memory,
)

# Tag ids are 40-bit values with a canonical 10-hex-char text form.
tag_id = parse_tag_id("110055B53A")
print("parsed id:", hex(tag_id), "->", format_tag_id(tag_id))

# Class 0: contents fixed at manufacture.
c0 = make_tag(tag_id, TagClass.CLASS0)
try:
    write_memory(c0, 0, b"\x01")
except ReadOnlyTag:
    print("Class0 write rejected, as expected")

# Class 1: write-once.
c1 = make_tag(1, TagClass.CLASS1)
c1 = write_memory(c1, 0, b"\xDE\xAD")
print("Class1 first write ok, memory:", read_memory(c1, 0, 2).hex())
try:
    write_memory(c1, 0, b"\x00\x00")
except AlreadyWritten:
    print("Class1 second write rejected")

# Class 2: rewritable.
c2 = make_tag(2, TagClass.CLASS2)
c2 = write_memory(c2, 0, b"old!")
c2 = write_memory(c2, 0, b"new!")
print("Class2 after rewrite:", read_memory(c2, 0, 4))

# Killing a tag is permanent; the wrong code changes nothing.
armed = make_tag(3, TagClass.CLASS2, kill_code=0xBEEF)
try:
    kill(armed, 0x0000)
except BadKillCode:
    print("wrong kill code rejected, tag still alive:", not armed.killed)
dead = kill(armed, 0xBEEF)
print("correct kill code: killed =", dead.killed)
print("re-kill is idempotent:", kill(dead, 0xBEEF).killed)
