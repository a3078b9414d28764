"""HTTP service wrapper (FastAPI) around the simulation package."""

from .app import app, create_app

__all__ = ["app", "create_app"]
