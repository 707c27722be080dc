"""Location registry, credential store, and the service core behind the
HTTP interface.

Registry file format: UTF-8 TSV, one record per line:

    tag_hex<TAB>name<TAB>description[<TAB>image_ref][<TAB>topic=text ...]

An empty image_ref column means "no image". Credential file format: one
user per line, "username:salt_hex:hash_hex" with hash = SHA-256(salt || password).
"""

from __future__ import annotations

import hashlib
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Optional

from .tags import MalformedId, format_tag_id, parse_tag_id

SESSION_IDLE_TIMEOUT = 30 * 60.0  # seconds


class RegistryError(Exception):
    pass


class ParseError(RegistryError):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


class DuplicateTag(RegistryError):
    def __init__(self, tag_id: int):
        super().__init__(f"duplicate tag {format_tag_id(tag_id)}")
        self.tag_id = tag_id


class NotFound(RegistryError):
    pass


class AuthFailed(Exception):
    """Login rejected. Deliberately identical for unknown user and wrong
    password, so callers cannot enumerate accounts."""


class Unauthorized(Exception):
    """Missing, invalid, or expired session token."""


@dataclass(frozen=True)
class LocationRecord:
    tag: int
    name: str
    description: str
    image_ref: Optional[str] = None
    extras: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Registry:
    records: Mapping[int, LocationRecord]
    version: int = 1


def parse_registry(text: str) -> Registry:
    records: dict[int, LocationRecord] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) < 3:
            raise ParseError(line_no, "expected at least tag, name, description")
        try:
            tag_id = parse_tag_id(cols[0])
        except MalformedId as exc:
            raise ParseError(line_no, str(exc)) from None
        if tag_id in records:
            raise DuplicateTag(tag_id)
        image_ref = cols[3] if len(cols) > 3 and cols[3] else None
        extras: dict[str, str] = {}
        for col in cols[4:]:
            topic, sep, value = col.partition("=")
            if not sep or not topic:
                raise ParseError(line_no, f"extras must be topic=text, got {col!r}")
            extras[topic] = value
        records[tag_id] = LocationRecord(
            tag=tag_id,
            name=cols[1],
            description=cols[2],
            image_ref=image_ref,
            extras=MappingProxyType(extras),
        )
    return Registry(records=MappingProxyType(records), version=1)


def load_registry(path: str | Path) -> Registry:
    return parse_registry(Path(path).read_text(encoding="utf-8"))


def resolve(registry: Registry, tag_id: int) -> LocationRecord:
    """Exact-match lookup; deterministic for a fixed registry version."""
    record = registry.records.get(tag_id)
    if record is None:
        raise NotFound(format_tag_id(tag_id))
    return record


def record_to_json(record: LocationRecord) -> dict:
    return {
        "tag": format_tag_id(record.tag),
        "name": record.name,
        "description": record.description,
        "image": record.image_ref,
        "extras": dict(record.extras),
    }


def hash_password(salt: bytes, password: str) -> bytes:
    return hashlib.sha256(salt + password.encode("utf-8")).digest()


def make_credentials(users: Mapping[str, str]) -> dict[str, tuple[bytes, bytes]]:
    """Build an in-memory credential store from plaintext passwords."""
    store = {}
    for user, password in users.items():
        salt = secrets.token_bytes(8)
        store[user] = (salt, hash_password(salt, password))
    return store


def parse_credentials(text: str) -> dict[str, tuple[bytes, bytes]]:
    store: dict[str, tuple[bytes, bytes]] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split(":")
        if len(parts) != 3:
            raise ParseError(line_no, "expected username:salt_hex:hash_hex")
        try:
            store[parts[0]] = (bytes.fromhex(parts[1]), bytes.fromhex(parts[2]))
        except ValueError:
            raise ParseError(line_no, "salt/hash must be hex") from None
    return store


def load_credentials(path: str | Path) -> dict[str, tuple[bytes, bytes]]:
    return parse_credentials(Path(path).read_text(encoding="utf-8"))


def format_credentials(store: Mapping[str, tuple[bytes, bytes]]) -> str:
    return "".join(
        f"{user}:{salt.hex()}:{digest.hex()}\n" for user, (salt, digest) in store.items()
    )


@dataclass
class Session:
    token: str
    user: str
    created: float
    last_used: float


class SessionTable:
    """Live sessions with idle expiry. Access is serialized internally."""

    def __init__(self, idle_timeout: float = SESSION_IDLE_TIMEOUT, clock=time.monotonic):
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}
        self._idle_timeout = idle_timeout
        self._clock = clock

    def issue(self, user: str) -> Session:
        now = self._clock()
        token = secrets.token_hex(16)  # 128 bits, 32 hex chars
        session = Session(token, user, now, now)
        with self._lock:
            self._sessions[token] = session
        return session

    def validate(self, token: Optional[str]) -> Session:
        if not token:
            raise Unauthorized("missing session token")
        now = self._clock()
        with self._lock:
            session = self._sessions.get(token)
            if session is None:
                raise Unauthorized("unknown session token")
            if now - session.last_used > self._idle_timeout:
                del self._sessions[token]
                raise Unauthorized("session expired")
            session.last_used = now
            return session


class LocationService:
    """The server's behavior, independent of any transport.

    The registry is immutable while serving; reload() swaps it atomically
    with a version bump so lookups stay deterministic per version.
    """

    def __init__(
        self,
        registry: Registry,
        credentials: Mapping[str, tuple[bytes, bytes]],
        assets_dir: str | Path | None = None,
        session_idle_timeout: float = SESSION_IDLE_TIMEOUT,
        clock=time.monotonic,
    ):
        self._registry = registry
        self._credentials = dict(credentials)
        self._assets_dir = Path(assets_dir) if assets_dir is not None else None
        self.sessions = SessionTable(session_idle_timeout, clock)

    @property
    def registry(self) -> Registry:
        return self._registry

    def reload(self, registry: Registry) -> None:
        self._registry = Registry(registry.records, self._registry.version + 1)

    def login(self, username: str, password: str) -> str:
        entry = self._credentials.get(username)
        if entry is None:
            # burn a hash so timing does not distinguish unknown users
            hash_password(b"\x00" * 8, password)
            raise AuthFailed()
        salt, digest = entry
        if not secrets.compare_digest(hash_password(salt, password), digest):
            raise AuthFailed()
        return self.sessions.issue(username).token

    def locate(self, token: Optional[str], tag_text: str) -> dict:
        self.sessions.validate(token)
        tag_id = parse_tag_id(tag_text)  # MalformedId -> 400 at the transport
        return record_to_json(resolve(self._registry, tag_id))

    def info(self, token: Optional[str], tag_text: str, topic: str) -> dict:
        self.sessions.validate(token)
        tag_id = parse_tag_id(tag_text)
        record = resolve(self._registry, tag_id)
        if topic not in record.extras:
            raise NotFound(f"no topic {topic!r} for {tag_text}")
        return {"topic": topic, "text": record.extras[topic]}

    def image(self, token: Optional[str], asset: str) -> bytes:
        self.sessions.validate(token)
        if self._assets_dir is None:
            raise NotFound(asset)
        path = (self._assets_dir / asset).resolve()
        root = self._assets_dir.resolve()
        if root not in path.parents and path != root:
            raise NotFound(asset)  # refuse traversal outside the assets dir
        if not path.is_file():
            raise NotFound(asset)
        return path.read_bytes()
