"""FastAPI server exposing the checkers and hierarchical synthesis over HTTP.

Run with:
    uv run uvicorn hierarchical_supervisor.api:app --reload --port 8011
"""

from __future__ import annotations

import logging
import os
from typing import Literal

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field
from slowapi import Limiter, _rate_limit_exceeded_handler
from slowapi.errors import RateLimitExceeded
from slowapi.util import get_remote_address

from hierarchical_supervisor.automaton import Automaton
from hierarchical_supervisor.des_format import parse_des
from hierarchical_supervisor.errors import SupervisorError
from hierarchical_supervisor.hierarchical import hier_synthesize_normal
from hierarchical_supervisor.projection import ProjectionContext, check_lcc, check_observer
from hierarchical_supervisor.relational import check_loc, check_moc, check_oc
from hierarchical_supervisor.report import ReportPayload, VerdictPayload, check_payload, report_payload, verdict_payload
from hierarchical_supervisor.synthesis import (
    SpecPlantPair,
    check_controllability,
    check_normality,
    check_observability,
)

logger = logging.getLogger(__name__)

# Rate limiting: 30 requests per minute per IP (configurable via env)
RATE_LIMIT = os.environ.get("RATE_LIMIT", "30/minute")
limiter = Limiter(key_func=get_remote_address)

app = FastAPI(
    title="Hierarchical Supervisor API",
    description="Observation-consistency checks and hierarchical supervisor synthesis",
    version="0.1.0",
)

app.state.limiter = limiter
app.add_exception_handler(RateLimitExceeded, _rate_limit_exceeded_handler)

# Browser clients are opt-in: comma-separated origins in CORS_ORIGINS
_allowed_origins = [o.strip() for o in os.environ.get("CORS_ORIGINS", "").split(",") if o.strip()]

app.add_middleware(
    CORSMiddleware,
    allow_origins=_allowed_origins,
    allow_credentials=True,
    allow_methods=["GET", "POST"],
    allow_headers=["Content-Type"],
)

PropertyName = Literal["oc", "moc", "loc", "controllable", "observable", "normal", "observer", "lcc"]
_NEEDS_SPEC = {"controllable", "observable", "normal"}


class CheckRequest(BaseModel):
    """A property check on a plant given as `.des` text."""

    plant: str = Field(description="Plant automaton in .des format (event flags give Σ_c, Σ_o, Σ_hi)")
    spec: str | None = Field(default=None, description="Specification in .des format (controllable/observable/normal)")
    property: PropertyName = "moc"
    bound: int | None = Field(default=None, ge=0, le=64, description="Candidate length bound; null = automatic")
    highlevel: list[str] | None = Field(default=None, description="Override of the high-level events")


class SynthesisRequest(BaseModel):
    plant: str = Field(description="Plant automaton in .des format")
    spec: str = Field(description="High-level specification over Σ_hi in .des format")
    bound: int | None = Field(default=None, ge=0, le=64)
    verify: bool = Field(default=True, description="Also compute the low-level supremum and compare")
    highlevel: list[str] | None = None


@app.get("/health")
def health() -> dict[str, str]:
    """Health check endpoint."""
    return {"status": "ok", "message": "Hierarchical Supervisor API"}


def _context(plant: Automaton, highlevel: list[str] | None) -> ProjectionContext:
    return ProjectionContext.from_alphabet(plant.alphabet, highlevel=highlevel)


def _run_check(body: CheckRequest) -> VerdictPayload:
    plant = parse_des(body.plant)
    ctx = _context(plant, body.highlevel)
    if body.property in _NEEDS_SPEC:
        if body.spec is None:
            raise ValueError(f"property '{body.property}' needs a specification")
        k = SpecPlantPair(parse_des(body.spec), plant, ctx).lifted()
        if body.property == "controllable":
            return check_payload("controllable", check_controllability(k, plant, ctx.sigma_uc))
        if body.property == "observable":
            return check_payload("observable", check_observability(k, plant, ctx))
        return check_payload("normal", check_normality(k, plant, ctx))
    if body.property == "observer":
        return check_payload("observer", check_observer(plant, ctx))
    if body.property == "lcc":
        return check_payload("LCC", check_lcc(plant, ctx))
    if body.property == "loc":
        return verdict_payload(check_loc(plant, ctx, bound=body.bound))
    checker = check_oc if body.property == "oc" else check_moc
    return verdict_payload(checker(plant, ctx, bound=body.bound))


@app.post("/api/check", response_model=VerdictPayload)
@limiter.limit(RATE_LIMIT)
def check(request: Request, body: CheckRequest) -> VerdictPayload:
    """Check a property of the posted plant and return the verdict payload."""
    _ = request  # Required by rate limiter for IP extraction
    try:
        return _run_check(body)
    except (SupervisorError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except Exception as exc:
        logger.exception("check failed")
        raise HTTPException(status_code=500, detail="Check failed") from exc


@app.post("/api/synthesize", response_model=ReportPayload)
@limiter.limit(RATE_LIMIT)
def synthesize(request: Request, body: SynthesisRequest) -> ReportPayload:
    """Run hierarchical synthesis and return the report payload."""
    _ = request
    try:
        plant = parse_des(body.plant)
        ctx = _context(plant, body.highlevel)
        report = hier_synthesize_normal(plant, parse_des(body.spec), ctx, bound=body.bound, verify=body.verify)
        return report_payload(report)
    except (SupervisorError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except Exception as exc:
        logger.exception("synthesis failed")
        raise HTTPException(status_code=500, detail="Synthesis failed") from exc
