import json

import pytest
import requests

from helpers import REPLAY_DIR, ScriptedTransport
from stockharvest.errors import FixtureMiss, TransportError
from stockharvest.transport import (
    FixtureRecord,
    FixtureReplay,
    LiveTransport,
    Request,
    Response,
    decode_fixture,
    encode_fixture,
    fixture_key,
    make_transport,
)


def test_fixture_round_trip():
    resp = Response(429, b"line1\n\nline3\r\n\x00binary", {"Retry-After": "5", "X-Other": "dropped"})
    back = decode_fixture(encode_fixture(resp))
    assert back.status == 429
    assert back.body == resp.body
    assert back.header("retry-after") == "5"
    assert back.header("X-Other") is None


def test_encoded_layout():
    data = encode_fixture(Response(200, b"Date\n", {"Content-Type": "text/csv"}))
    assert data == b"HTTP 200\nContent-Type: text/csv\n\nDate\n"


def test_decode_rejects_garbage():
    with pytest.raises(ValueError):
        decode_fixture(b"no separator")
    with pytest.raises(ValueError):
        decode_fixture(b"HTP xx\n\nbody")


def test_replay_miss_is_error(tmp_path):
    with pytest.raises(FixtureMiss):
        FixtureReplay(tmp_path).execute(Request("https://nowhere.test/"))


def test_record_then_replay(tmp_path):
    url = "https://example.test/a?b=1"
    inner = ScriptedTransport([Response(200, b"payload", {"Content-Type": "text/plain"})])
    rec = FixtureRecord(tmp_path, inner)
    assert rec.execute(Request(url)).body == b"payload"
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest == {fixture_key(url): url}
    assert FixtureReplay(tmp_path).execute(Request(url)).body == b"payload"


def test_checked_in_manifest_matches_files():
    manifest = json.loads((REPLAY_DIR / "manifest.json").read_text())
    for key, url in manifest.items():
        assert fixture_key(url) == key
        assert (REPLAY_DIR / f"{key}.http").exists()


def test_live_transport_wraps_request_errors(monkeypatch):
    def boom(self, *a, **k):
        raise requests.ConnectionError("refused")

    monkeypatch.setattr(requests.Session, "get", boom)
    with pytest.raises(TransportError):
        LiveTransport().execute(Request("https://example.test/"))


def test_live_transport_passes_headers(monkeypatch):
    seen = {}

    class Fake:
        status_code = 200
        content = b"ok"
        headers = {"Content-Type": "text/plain"}

    def get(self, url, headers=None, timeout=None):
        seen.update(url=url, headers=headers, timeout=timeout)
        return Fake()

    monkeypatch.setattr(requests.Session, "get", get)
    resp = LiveTransport(timeout=5).execute(Request("https://e.test/", {"User-Agent": "ua"}))
    assert resp.body == b"ok" and seen["headers"] == {"User-Agent": "ua"} and seen["timeout"] == 5


@pytest.mark.parametrize("spec, cls", [("live", LiveTransport), ("replay:/tmp/x", FixtureReplay), ("record:/tmp/x", FixtureRecord)])
def test_make_transport(spec, cls):
    assert isinstance(make_transport(spec), cls)


@pytest.mark.parametrize("spec", ["", "replay", "replay:", "tape:/x"])
def test_make_transport_bad(spec):
    with pytest.raises(ValueError):
        make_transport(spec)
