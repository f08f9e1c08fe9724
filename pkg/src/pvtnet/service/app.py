"""FastAPI service exposing the experiment commands.

Runs are synchronous: sweeps and MC validation take seconds to minutes, so
clients should use generous timeouts.  The CLI talks to this app in-process
by default and over HTTP when given a server URL.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..config import PROFILE_NAMES, load_profile, parse_config_text
from ..errors import ConfigError
from ..experiments import COMMANDS, parse_ratio_spec, run_experiment
from .models import (
    ExperimentRequest,
    ExperimentResponse,
    FilePayload,
    HealthResponse,
    ProfileInfo,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="pvtnet",
        version=__version__,
        description="Energy-efficiency evaluation of Poisson-Voronoi cellular "
                    "networks: analytic CF pipeline plus Monte Carlo validation.",
    )

    @app.get("/v1/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.get("/v1/profiles", response_model=list[ProfileInfo])
    def profiles() -> list[ProfileInfo]:
        out = []
        for name in PROFILE_NAMES:
            cfg = load_profile(name)
            out.append(ProfileInfo(name=name, digest=cfg.digest(),
                                   traffic_mode=cfg.traffic_mode,
                                   report=cfg.report_lines()))
        return out

    @app.post("/v1/experiments/{command}", response_model=ExperimentResponse)
    def experiment(command: str, req: ExperimentRequest) -> ExperimentResponse:
        if command not in COMMANDS:
            raise HTTPException(status_code=404,
                                detail=f"unknown command {command!r}; one of {COMMANDS}")
        if (req.profile is None) == (req.config is None):
            raise HTTPException(status_code=422,
                                detail="give exactly one of 'profile' or 'config'")
        try:
            cfg = load_profile(req.profile) if req.profile else parse_config_text(req.config)
            ratios = parse_ratio_spec(req.ratios) if req.ratios else None
            result = run_experiment(cfg, command, ratios=ratios,
                                    trials=req.trials, seed=req.seed)
        except ConfigError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return ExperimentResponse(
            command=result.command,
            exit_code=result.exit_code,
            config_digest=cfg.digest(),
            summary=_jsonable(result.summary),
            log=result.log,
            files=[FilePayload(name=n, content=c) for n, c in sorted(result.files.items())],
        )

    return app


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):   # numpy scalars
        return obj.item()
    return obj


app = create_app()
