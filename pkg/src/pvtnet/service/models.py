"""Pydantic request/response schemas for the experiment service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class ExperimentRequest(BaseModel):
    """One experiment run.

    Exactly one of `profile` (packaged parameter profile name) or `config`
    (flat key = value text, the same format the CLI reads from disk) selects
    the parameter set; overrides apply on top.
    """

    profile: Optional[str] = None
    config: Optional[str] = Field(default=None, description="flat key = value text")
    ratios: Optional[str] = Field(default=None, description="a:b:step or comma list")
    trials: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = None


class FilePayload(BaseModel):
    name: str
    content: str


class ExperimentResponse(BaseModel):
    command: str
    exit_code: int
    config_digest: str
    summary: dict
    log: list[str]
    files: list[FilePayload]


class ProfileInfo(BaseModel):
    name: str
    digest: str
    traffic_mode: str
    report: list[str]


class HealthResponse(BaseModel):
    status: str
    version: str
