"""Pluggable HTTP transports.

``LiveTransport`` talks to the network through ``requests``. The fixture
transports store one file per URL, named by the SHA-256 of the URL, holding
the status line, selected headers and the body bytes verbatim::

    HTTP 200
    Retry-After: 3
    <blank line>
    <body bytes>

A ``manifest.json`` next to the recordings maps hashes back to URLs.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Protocol

import requests

from .errors import FixtureMiss, TransportError

DEFAULT_USER_AGENT = "Mozilla/5.0 (X11; Linux x86_64) stockharvest/0.1"
USER_AGENT_ENV = "STOCKHARVEST_USER_AGENT"
MANIFEST_NAME = "manifest.json"
FIXTURE_SUFFIX = ".http"

# Only headers that influence client behaviour are recorded.
_RECORDED_HEADERS = ("Retry-After", "Content-Type")
_MANIFEST_LOCK = threading.Lock()


@dataclass(frozen=True)
class Request:
    url: str
    headers: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Response:
    status: int
    body: bytes
    headers: Mapping[str, str] = field(default_factory=dict)

    def header(self, name: str) -> str | None:
        lname = name.lower()
        for key, value in self.headers.items():
            if key.lower() == lname:
                return value
        return None


class Transport(Protocol):
    def execute(self, request: Request) -> Response: ...


def default_user_agent() -> str:
    return os.environ.get(USER_AGENT_ENV) or DEFAULT_USER_AGENT


def fixture_key(url: str) -> str:
    return hashlib.sha256(url.encode("utf-8")).hexdigest()


class LiveTransport:
    """Real HTTP via one ``requests.Session`` per thread."""

    def __init__(self, timeout: float = 30.0):
        self.timeout = timeout
        self._local = threading.local()

    def _session(self) -> requests.Session:
        session = getattr(self._local, "session", None)
        if session is None:
            session = self._local.session = requests.Session()
        return session

    def execute(self, request: Request) -> Response:
        try:
            resp = self._session().get(
                request.url, headers=dict(request.headers), timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise TransportError(f"{type(exc).__name__}: {exc}") from exc
        return Response(status=resp.status_code, body=resp.content, headers=dict(resp.headers))


def encode_fixture(response: Response) -> bytes:
    lines = [f"HTTP {response.status}"]
    for name in _RECORDED_HEADERS:
        value = response.header(name)
        if value is not None:
            lines.append(f"{name}: {value}")
    return ("\n".join(lines) + "\n\n").encode("utf-8") + response.body


def decode_fixture(data: bytes) -> Response:
    head, sep, body = data.partition(b"\n\n")
    if not sep:
        raise ValueError("fixture has no header/body separator")
    lines = head.decode("utf-8").split("\n")
    proto, _, status = lines[0].partition(" ")
    if proto != "HTTP" or not status.isdigit():
        raise ValueError(f"bad fixture status line {lines[0]!r}")
    headers = {}
    for line in lines[1:]:
        name, _, value = line.partition(":")
        headers[name.strip()] = value.strip()
    return Response(status=int(status), body=body, headers=headers)


class FixtureReplay:
    """Serves recorded responses; never touches the network."""

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)

    def path_for(self, url: str) -> Path:
        return self.directory / (fixture_key(url) + FIXTURE_SUFFIX)

    def execute(self, request: Request) -> Response:
        path = self.path_for(request.url)
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            raise FixtureMiss(request.url) from None
        return decode_fixture(data)


class FixtureRecord:
    """Forwards to *inner* and saves every response under *directory*."""

    def __init__(self, directory: str | os.PathLike, inner: Transport | None = None):
        self.directory = Path(directory)
        self.inner = inner if inner is not None else LiveTransport()

    def execute(self, request: Request) -> Response:
        response = self.inner.execute(request)
        save_fixture(self.directory, request.url, response)
        return response


def save_fixture(directory: str | os.PathLike, url: str, response: Response) -> Path:
    """Write one recording and register it in the manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    key = fixture_key(url)
    path = directory / (key + FIXTURE_SUFFIX)
    _atomic_write(path, encode_fixture(response))
    with _MANIFEST_LOCK:
        manifest_path = directory / MANIFEST_NAME
        manifest = {}
        if manifest_path.exists():
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        manifest[key] = url
        _atomic_write(
            manifest_path,
            (json.dumps(manifest, indent=2, sort_keys=True) + "\n").encode("utf-8"),
        )
    return path


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix="." + path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def make_transport(spec: str) -> Transport:
    """Build a transport from ``live``, ``replay:PATH`` or ``record:PATH``."""
    if spec == "live":
        return LiveTransport()
    mode, sep, path = spec.partition(":")
    if sep and path:
        if mode == "replay":
            return FixtureReplay(path)
        if mode == "record":
            return FixtureRecord(path)
    raise ValueError(f"transport must be live, replay:PATH or record:PATH, got {spec!r}")
