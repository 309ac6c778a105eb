"""HTTP face of the simulator: request/response schemas and the app factory."""

from .app import create_app

__all__ = ["create_app"]
