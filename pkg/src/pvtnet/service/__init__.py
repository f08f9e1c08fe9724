"""HTTP layer: FastAPI app and pydantic schemas around the experiments."""

from .app import app, create_app

__all__ = ["app", "create_app"]
