"""Location server exercised over a real local socket."""

import pytest
import requests

from rfidlbs.registry import LocationService, make_credentials, parse_registry
from rfidlbs.server import LocationServer
from tests.conftest import REGISTRY_TEXT


@pytest.fixture(scope="module")
def live_server(tmp_path_factory):
    assets = tmp_path_factory.mktemp("assets")
    (assets / "lab.png").write_bytes(b"\x89PNG\r\n\x1a\nfakeimage")
    service = LocationService(
        parse_registry(REGISTRY_TEXT),
        make_credentials({"guest": "guest"}),
        assets_dir=assets,
    )
    server = LocationServer(service, port=0)
    server.start()
    yield f"http://127.0.0.1:{server.port}"
    server.stop()


@pytest.fixture(scope="module")
def token(live_server):
    resp = requests.post(f"{live_server}/login", json={"username": "guest", "password": "guest"})
    assert resp.status_code == 200
    return resp.json()["token"]


def test_healthz_unauthenticated(live_server):
    resp = requests.get(f"{live_server}/healthz")
    assert resp.status_code == 200
    assert resp.text == "ok"


def test_login_failure_statuses(live_server):
    wrong_pw = requests.post(f"{live_server}/login", json={"username": "guest", "password": "bad"})
    unknown = requests.post(f"{live_server}/login", json={"username": "nobody", "password": "x"})
    assert wrong_pw.status_code == unknown.status_code == 401
    assert wrong_pw.json() == unknown.json()


def test_login_wrong_method(live_server):
    assert requests.get(f"{live_server}/login").status_code == 405


def test_locate_requires_session(live_server):
    resp = requests.get(f"{live_server}/locate", params={"tag": "110055B53A"})
    assert resp.status_code == 401


def test_locate_bad_token(live_server):
    resp = requests.get(
        f"{live_server}/locate", params={"tag": "110055B53A"},
        headers={"X-Session": "00" * 16},
    )
    assert resp.status_code == 401


def test_locate_registered(live_server, token):
    resp = requests.get(
        f"{live_server}/locate", params={"tag": "110055B53A"}, headers={"X-Session": token}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["name"] == "Room 101"
    assert body["tag"] == "110055B53A"
    assert body["image"] == "img/lab.png"


def test_locate_unregistered(live_server, token):
    resp = requests.get(
        f"{live_server}/locate", params={"tag": "00000000AB"}, headers={"X-Session": token}
    )
    assert resp.status_code == 404


def test_locate_malformed_tag(live_server, token):
    resp = requests.get(
        f"{live_server}/locate", params={"tag": "xyz"}, headers={"X-Session": token}
    )
    assert resp.status_code == 400


def test_info_topic(live_server, token):
    ok = requests.get(
        f"{live_server}/info", params={"tag": "110055B53A", "topic": "hours"},
        headers={"X-Session": token},
    )
    assert ok.status_code == 200
    assert ok.json() == {"topic": "hours", "text": "Open 9 to 5"}
    missing = requests.get(
        f"{live_server}/info", params={"tag": "110055B53A", "topic": "nope"},
        headers={"X-Session": token},
    )
    assert missing.status_code == 404


def test_image_served_with_content_type(live_server, token):
    resp = requests.get(f"{live_server}/image/lab.png", headers={"X-Session": token})
    assert resp.status_code == 200
    assert resp.headers["Content-Type"] == "image/png"
    assert resp.content.startswith(b"\x89PNG")


def test_image_missing(live_server, token):
    resp = requests.get(f"{live_server}/image/missing.png", headers={"X-Session": token})
    assert resp.status_code == 404


def test_image_traversal_rejected(live_server, token):
    resp = requests.get(f"{live_server}/image/../secret", headers={"X-Session": token})
    assert resp.status_code == 404


def test_unknown_endpoint(live_server):
    assert requests.get(f"{live_server}/nope").status_code == 404


def test_locate_wrong_method(live_server, token):
    resp = requests.post(f"{live_server}/locate", headers={"X-Session": token})
    assert resp.status_code == 405
