"""Wire-protocol client tests against a scripted in-process endpoint."""

import base64
import json

import httpx
import pytest

from speceval.browser.session import SessionConfig, text_change_ratio
from speceval.browser.wire import WireClient, WireError
from speceval.errors import (
    EndpointUnreachable,
    InvariantError,
    NavigationTimeout,
    PageCrashed,
    ProtocolVersionMismatch,
)


class FakeDriver:
    """Minimal scripted remote endpoint implementing the session protocol."""

    def __init__(self):
        self.log = []
        self.fail_session = False
        self.navigate_error = None
        self.url = "about:blank"

    def handler(self, request: httpx.Request) -> httpx.Response:
        path = request.url.path
        body = json.loads(request.content) if request.content else {}
        self.log.append((request.method, path, body))
        if request.method == "POST" and path == "/session":
            if self.fail_session:
                return httpx.Response(
                    500, json={"value": {"error": "session not created",
                                         "message": "unsupported capabilities"}}
                )
            return httpx.Response(
                200, json={"value": {"sessionId": "s1", "capabilities": {}}}
            )
        if path == "/session/s1/url" and request.method == "POST":
            if self.navigate_error:
                return httpx.Response(
                    500, json={"value": {"error": self.navigate_error, "message": "boom"}}
                )
            self.url = body["url"]
            return httpx.Response(200, json={"value": None})
        if path == "/session/s1/url" and request.method == "GET":
            return httpx.Response(200, json={"value": self.url})
        if path == "/session/s1/window/rect":
            return httpx.Response(200, json={"value": body})
        if path == "/session/s1/execute/sync":
            return httpx.Response(200, json={"value": {"echo": body["args"]}})
        if path == "/session/s1/screenshot":
            return httpx.Response(
                200, json={"value": base64.b64encode(b"PNGDATA").decode()}
            )
        if request.method == "DELETE" and path == "/session/s1":
            return httpx.Response(200, json={"value": None})
        return httpx.Response(404, json={"value": {"error": "unknown command", "message": path}})


@pytest.fixture()
def driver():
    return FakeDriver()


def make_client(driver):
    return WireClient("http://driver.local", transport=httpx.MockTransport(driver.handler))


class TestWireClient:
    def test_session_lifecycle(self, driver):
        client = make_client(driver)
        sid = client.new_session(page_load_timeout_ms=1000, script_timeout_ms=500)
        assert sid == "s1"
        method, path, body = driver.log[0]
        assert body["capabilities"]["alwaysMatch"]["timeouts"]["pageLoad"] == 1000
        client.delete_session(sid)
        assert driver.log[-1][0] == "DELETE"

    def test_session_rejection_maps_to_version_mismatch(self, driver):
        driver.fail_session = True
        with pytest.raises(ProtocolVersionMismatch, match="unsupported"):
            make_client(driver).new_session(1000, 500)

    def test_navigate_and_url(self, driver):
        client = make_client(driver)
        client.new_session(1000, 500)
        client.navigate("s1", "http://x/page")
        assert client.current_url("s1") == "http://x/page"

    def test_timeout_error_mapped(self, driver):
        driver.navigate_error = "timeout"
        client = make_client(driver)
        client.new_session(1000, 500)
        with pytest.raises(NavigationTimeout):
            client.navigate("s1", "http://slow/")

    def test_crash_error_mapped(self, driver):
        driver.navigate_error = "no such window"
        client = make_client(driver)
        client.new_session(1000, 500)
        with pytest.raises(PageCrashed):
            client.navigate("s1", "http://x/")

    def test_unknown_protocol_error_is_wire_error(self, driver):
        driver.navigate_error = "element not interactable"
        client = make_client(driver)
        client.new_session(1000, 500)
        with pytest.raises(WireError, match="element not interactable"):
            client.navigate("s1", "http://x/")

    def test_execute_passes_args(self, driver):
        client = make_client(driver)
        client.new_session(1000, 500)
        value = client.execute("s1", "return 1;", ["#loc", "click"])
        assert value == {"echo": ["#loc", "click"]}

    def test_screenshot_decodes_base64(self, driver):
        client = make_client(driver)
        client.new_session(1000, 500)
        assert client.screenshot_png("s1") == b"PNGDATA"

    def test_connection_refused_is_endpoint_unreachable(self):
        def refuse(request):
            raise httpx.ConnectError("connection refused")

        client = WireClient("http://down.local", transport=httpx.MockTransport(refuse))
        with pytest.raises((EndpointUnreachable, ProtocolVersionMismatch)):
            client.new_session(1000, 500)


class TestSessionConfig:
    def test_nonpositive_timeouts_rejected(self):
        with pytest.raises(InvariantError, match="settle_delay_ms"):
            SessionConfig(endpoint_url="http://x", settle_delay_ms=0)
        with pytest.raises(InvariantError, match="navigation_timeout_ms"):
            SessionConfig(endpoint_url="http://x", navigation_timeout_ms=-1)

    def test_defaults_valid(self):
        config = SessionConfig(endpoint_url="http://x")
        assert config.viewport == (1280, 800)


class TestTextChangeRatio:
    def test_identical_text_is_zero(self):
        assert text_change_ratio("same words here", "same words here") == 0.0

    def test_full_replacement_is_one(self):
        assert text_change_ratio("aa bb cc", "xx yy zz") == pytest.approx(1.0)

    def test_partial_change_is_fractional(self):
        ratio = text_change_ratio("one two three four", "one two three five")
        assert 0.0 < ratio < 0.5
