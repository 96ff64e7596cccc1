"""HTTP service surface: evaluation, analytics, and the annotation API."""

from .app import create_app

__all__ = ["create_app"]
