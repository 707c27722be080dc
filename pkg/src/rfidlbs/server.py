"""HTTP transport for the location service.

Endpoints (HTTP/1.1):

    POST /login            {"username","password"} -> 200 {"token"} | 401
    GET  /locate?tag=HEX10 X-Session header        -> 200 record | 400/401/404
    GET  /info?tag=HEX10&topic=T                   -> 200 {"topic","text"} | ...
    GET  /image/{asset}                            -> 200 bytes | 404
    GET  /healthz                                  -> 200 "ok"

Requests are handled concurrently (one thread per connection).
"""

from __future__ import annotations

import json
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from .registry import AuthFailed, LocationService, NotFound, Unauthorized
from .tags import MalformedId


class ServiceHandler(BaseHTTPRequestHandler):
    service: LocationService  # injected by make_handler
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # quiet by default
        pass

    # -- helpers ----------------------------------------------------------

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_bytes(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _error(self, status: int, message: str) -> None:
        self._send_json(status, {"error": message})

    def _token(self):
        return self.headers.get("X-Session")

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length)

    # -- routing ----------------------------------------------------------

    def do_GET(self):
        url = urlsplit(self.path)
        query = {k: v[0] for k, v in parse_qs(url.query).items()}
        try:
            if url.path == "/healthz":
                self._send_bytes(200, b"ok", "text/plain")
            elif url.path == "/locate":
                self._send_json(200, self.service.locate(self._token(), query.get("tag", "")))
            elif url.path == "/info":
                self._send_json(
                    200,
                    self.service.info(self._token(), query.get("tag", ""), query.get("topic", "")),
                )
            elif url.path.startswith("/image/"):
                asset = url.path[len("/image/"):]
                body = self.service.image(self._token(), asset)
                content_type = mimetypes.guess_type(asset)[0] or "application/octet-stream"
                self._send_bytes(200, body, content_type)
            elif url.path == "/login":
                self._error(405, "use POST")
            else:
                self._error(404, "no such endpoint")
        except Unauthorized:
            self._error(401, "invalid session")
        except MalformedId:
            self._error(400, "malformed tag id")
        except NotFound:
            self._error(404, "not found")

    def do_POST(self):
        url = urlsplit(self.path)
        if url.path != "/login":
            if url.path in ("/locate", "/info", "/healthz") or url.path.startswith("/image/"):
                self._error(405, "use GET")
            else:
                self._error(404, "no such endpoint")
            return
        try:
            payload = json.loads(self._read_body() or b"{}")
            username = payload.get("username", "")
            password = payload.get("password", "")
        except (json.JSONDecodeError, AttributeError):
            self._error(400, "malformed body")
            return
        try:
            token = self.service.login(username, password)
        except AuthFailed:
            self._error(401, "authentication failed")
            return
        self._send_json(200, {"token": token})


def make_handler(service: LocationService) -> type[ServiceHandler]:
    return type("BoundServiceHandler", (ServiceHandler,), {"service": service})


class LocationServer:
    """Threaded HTTP server wrapper; port 0 picks a free port."""

    def __init__(self, service: LocationService, host: str = "127.0.0.1", port: int = 8080):
        self.httpd = ThreadingHTTPServer((host, port), make_handler(service))
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self.httpd.server_address[1]

    def start(self) -> None:
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        if self._thread is not None:
            self._thread.join()

    def serve_forever(self) -> None:
        self.httpd.serve_forever()
