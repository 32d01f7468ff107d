"""FastAPI service wrapping the planner core."""

from .app import app, create_app

__all__ = ["app", "create_app"]
