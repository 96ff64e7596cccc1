"""Live browser control and deterministic snapshot replay."""

from .outcomes import ProbeBook, ProbeOutcome, StateDelta
from .replay import ReplayBackend, replay_snapshot
from .session import Session, SessionConfig, open_session

__all__ = [
    "ProbeBook",
    "ProbeOutcome",
    "ReplayBackend",
    "Session",
    "SessionConfig",
    "StateDelta",
    "open_session",
    "replay_snapshot",
]
