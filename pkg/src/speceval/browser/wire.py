"""Minimal W3C browser-automation wire protocol client over HTTP.

Covers the handful of endpoints the evaluator needs: session lifecycle,
navigation, window sizing, synchronous script execution, and screenshots.
Protocol errors are mapped onto the toolkit's error taxonomy.
"""

from __future__ import annotations

import base64
from typing import Any

import httpx

from ..errors import (
    EndpointUnreachable,
    NavigationTimeout,
    PageCrashed,
    ProbeTimeout,
    ProtocolVersionMismatch,
    SpecevalError,
)

_TIMEOUT_ERRORS = {"timeout"}
_SCRIPT_TIMEOUT_ERRORS = {"script timeout", "async script timeout"}
_CRASH_ERRORS = {"no such window", "invalid session id", "unknown error", "tab crashed"}


class WireError(SpecevalError):
    """Protocol-level error that has no more specific mapping."""

    def __init__(self, error: str, message: str):
        self.error = error
        super().__init__(f"{error}: {message}")


def _map_error(error: str, message: str) -> SpecevalError:
    if error in _TIMEOUT_ERRORS:
        return NavigationTimeout(message)
    if error in _SCRIPT_TIMEOUT_ERRORS:
        return ProbeTimeout(message)
    if error in _CRASH_ERRORS:
        return PageCrashed(f"{error}: {message}")
    return WireError(error, message)


class WireClient:
    def __init__(
        self,
        endpoint_url: str,
        http_timeout_s: float = 60.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.endpoint_url = endpoint_url.rstrip("/")
        self._http = httpx.Client(
            base_url=self.endpoint_url, timeout=http_timeout_s, transport=transport
        )

    def close(self) -> None:
        self._http.close()

    def _request(self, method: str, path: str, body: dict | None = None) -> Any:
        try:
            response = self._http.request(method, path, json=body)
        except httpx.TimeoutException as e:
            raise NavigationTimeout(f"{method} {path}: {e}") from e
        except httpx.HTTPError as e:
            raise EndpointUnreachable(f"{self.endpoint_url}: {e}") from e
        try:
            payload = response.json()
        except ValueError as e:
            raise EndpointUnreachable(
                f"{self.endpoint_url}: non-protocol response ({response.status_code})"
            ) from e
        value = payload.get("value")
        if response.status_code >= 400 or (isinstance(value, dict) and "error" in value):
            error = value.get("error", "unknown") if isinstance(value, dict) else "unknown"
            message = value.get("message", "") if isinstance(value, dict) else str(value)
            raise _map_error(error, message)
        return value

    # -- session lifecycle --

    def new_session(self, page_load_timeout_ms: int, script_timeout_ms: int) -> str:
        body = {
            "capabilities": {
                "alwaysMatch": {
                    "timeouts": {
                        "pageLoad": page_load_timeout_ms,
                        "script": script_timeout_ms,
                    }
                }
            }
        }
        try:
            value = self._request("POST", "/session", body)
        except (NavigationTimeout, PageCrashed, WireError) as e:
            raise ProtocolVersionMismatch(f"session creation rejected: {e}") from e
        if not isinstance(value, dict) or "sessionId" not in value:
            raise ProtocolVersionMismatch(f"unexpected session payload: {value!r}")
        return value["sessionId"]

    def delete_session(self, session_id: str) -> None:
        try:
            self._request("DELETE", f"/session/{session_id}")
        except SpecevalError:
            pass  # teardown is best-effort

    # -- navigation and window --

    def navigate(self, session_id: str, url: str) -> None:
        self._request("POST", f"/session/{session_id}/url", {"url": url})

    def current_url(self, session_id: str) -> str:
        return self._request("GET", f"/session/{session_id}/url")

    def set_window_rect(self, session_id: str, width: int, height: int) -> None:
        self._request(
            "POST",
            f"/session/{session_id}/window/rect",
            {"width": int(width), "height": int(height)},
        )

    # -- script and capture --

    def execute(self, session_id: str, script: str, args: list | None = None) -> Any:
        return self._request(
            "POST",
            f"/session/{session_id}/execute/sync",
            {"script": script, "args": args or []},
        )

    def screenshot_png(self, session_id: str) -> bytes:
        data = self._request("GET", f"/session/{session_id}/screenshot")
        if not isinstance(data, str):
            raise PageCrashed(f"unexpected screenshot payload: {type(data).__name__}")
        return base64.b64decode(data)
