"""Mobile-client state machine.

The client authenticates, polls the middleware's current tag every
poll_period seconds (default 2.0), asks the location server to resolve a
newly seen tag, and exposes the resolved record as display state. All I/O
is modeled as inputs and outputs of step(), so the machine is fully
deterministic and testable without a network.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Union

from .registry import LocationRecord

DEFAULT_POLL_PERIOD = 2.0
LOCATE_TIMEOUT_POLLS = 3  # retry a silent /locate after this many poll periods


class Phase(Enum):
    LOGGED_OUT = "logged_out"
    AUTHENTICATING = "authenticating"
    UNKNOWN = "unknown"
    RESOLVING = "resolving"
    LOCATED = "located"


class InvalidPhase(Exception):
    pass


# -- inputs ---------------------------------------------------------------

@dataclass(frozen=True)
class Tick:
    now: float
    middleware_tag: Optional[int]  # current tag per the middleware, if any


@dataclass(frozen=True)
class MiddlewareLost:
    at: float


@dataclass(frozen=True)
class LoginResponse:
    status: int
    token: Optional[str] = None


@dataclass(frozen=True)
class LocateResponse:
    status: int
    tag: int
    record: Optional[LocationRecord] = None


ClientInput = Union[Tick, MiddlewareLost, LoginResponse, LocateResponse]


# -- outbound requests ----------------------------------------------------

@dataclass(frozen=True)
class LoginRequest:
    username: str
    password: str
    server: str


@dataclass(frozen=True)
class LocateRequest:
    tag: int
    token: str


ClientRequest = Union[LoginRequest, LocateRequest]


@dataclass(frozen=True)
class ClientState:
    phase: Phase = Phase.LOGGED_OUT
    session: Optional[str] = None
    tag: Optional[int] = None            # tag being resolved / located
    record: Optional[LocationRecord] = None
    poll_period: float = DEFAULT_POLL_PERIOD
    next_poll_at: float = 0.0
    not_found_tag: Optional[int] = None  # last tag the server did not know
    request_sent_at: Optional[float] = None
    retried: bool = False
    error: Optional[str] = None


def begin_login(
    state: ClientState, username: str, password: str, server: str
) -> tuple[ClientState, list[ClientRequest]]:
    if state.phase is not Phase.LOGGED_OUT:
        raise InvalidPhase(f"cannot log in while {state.phase.value}")
    new = replace(state, phase=Phase.AUTHENTICATING, error=None)
    return new, [LoginRequest(username, password, server)]


def step(state: ClientState, event: ClientInput) -> tuple[ClientState, list[ClientRequest]]:
    if isinstance(event, Tick):
        return _on_tick(state, event)
    if isinstance(event, MiddlewareLost):
        if state.phase in (Phase.LOCATED, Phase.RESOLVING):
            return replace(state, phase=Phase.UNKNOWN, tag=None, record=None,
                           request_sent_at=None, retried=False), []
        return state, []
    if isinstance(event, LoginResponse):
        return _on_login_response(state, event)
    if isinstance(event, LocateResponse):
        return _on_locate_response(state, event)
    raise TypeError(f"unknown input {event!r}")


def _on_tick(state: ClientState, tick: Tick) -> tuple[ClientState, list[ClientRequest]]:
    if tick.now < state.next_poll_at:
        return state, []
    state = replace(state, next_poll_at=state.next_poll_at + state.poll_period)
    if state.phase in (Phase.LOGGED_OUT, Phase.AUTHENTICATING):
        return state, []

    requests: list[ClientRequest] = []
    cur = tick.middleware_tag

    # the not-found memory holds only until the reader sees a different tag
    if cur != state.not_found_tag and state.not_found_tag is not None:
        state = replace(state, not_found_tag=None)

    if state.phase is Phase.RESOLVING:
        assert state.tag is not None and state.request_sent_at is not None
        if cur is not None and cur != state.tag and cur != state.not_found_tag:
            return _start_resolving(state, cur, tick.now)
        if tick.now - state.request_sent_at > LOCATE_TIMEOUT_POLLS * state.poll_period:
            if not state.retried:
                assert state.session is not None
                state = replace(state, request_sent_at=tick.now, retried=True)
                requests.append(LocateRequest(state.tag, state.session))
            else:
                state = replace(state, phase=Phase.UNKNOWN, tag=None,
                                request_sent_at=None, retried=False)
        return state, requests

    if state.phase is Phase.LOCATED:
        if cur == state.tag:
            return state, []
        if cur is None:
            return replace(state, phase=Phase.UNKNOWN, tag=None, record=None), []
        return _start_resolving(state, cur, tick.now)

    # Phase.UNKNOWN
    if cur is not None and cur != state.not_found_tag:
        return _start_resolving(state, cur, tick.now)
    return state, []


def _start_resolving(state: ClientState, tag: int, now: float) -> tuple[ClientState, list[ClientRequest]]:
    assert state.session is not None
    new = replace(state, phase=Phase.RESOLVING, tag=tag, record=None,
                  request_sent_at=now, retried=False)
    return new, [LocateRequest(tag, state.session)]


def _on_login_response(state: ClientState, resp: LoginResponse) -> tuple[ClientState, list[ClientRequest]]:
    if state.phase is not Phase.AUTHENTICATING:
        return state, []
    if resp.status == 200 and resp.token:
        return replace(state, phase=Phase.UNKNOWN, session=resp.token, error=None), []
    return replace(state, phase=Phase.LOGGED_OUT, session=None,
                   error="authentication failed"), []


def _on_locate_response(state: ClientState, resp: LocateResponse) -> tuple[ClientState, list[ClientRequest]]:
    if resp.status == 401:
        # session expired: drop to logged-out regardless of phase
        return replace(state, phase=Phase.LOGGED_OUT, session=None, tag=None,
                       record=None, request_sent_at=None, retried=False,
                       error="session expired"), []
    if state.phase is not Phase.RESOLVING or resp.tag != state.tag:
        return state, []  # stale response
    if resp.status == 200 and resp.record is not None:
        return replace(state, phase=Phase.LOCATED, record=resp.record,
                       request_sent_at=None, retried=False), []
    if resp.status == 404:
        return replace(state, phase=Phase.UNKNOWN, tag=None, record=None,
                       not_found_tag=resp.tag, request_sent_at=None, retried=False), []
    return state, []
