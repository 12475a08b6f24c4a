"""Runtime verification service: verify endpoint, pending-confirmation
queue with human resolution, read-only profile/plugin/decision views.

All trust computation happens in :mod:`trustbench.gating`; this module is
HTTP plumbing plus persistence wiring.
"""

from __future__ import annotations

from typing import Any, Optional

from fastapi import Depends, FastAPI, Header, HTTPException, Request
from fastapi.responses import JSONResponse

from .calibration import ProfileStore
from .config import Config
from .errors import RangeError, SchemaError, UnknownDomain
from .gating import RuntimeWeights, verify
from .logstore import AlreadyResolved, DecisionLog, UnknownPending
from .model import (
    CalibrationProfile,
    Decision,
    ResolvedBy,
    format_ts,
    parse_ts,
    validate_request,
)
from .plugins import DomainPlugin, load_plugin_dir

API_VERSION = "v1"


class TrustEngine:
    """Shared immutable snapshot of plugins and profiles plus the mutable
    decision log / pending queue."""

    def __init__(self, config: Config):
        self.config = config
        self.plugins: dict[str, DomainPlugin] = load_plugin_dir(
            config.paths.plugins_dir
        )
        self.profiles = ProfileStore(config.paths.profiles_dir)
        self._profile_cache: dict[tuple[str, str], Optional[CalibrationProfile]] = {}
        self.log = DecisionLog(
            config.paths.decision_log,
            pending_ttl_minutes=config.engine.pending_ttl_minutes,
        )

    def profile_for(self, agent_id: str, domain_id: str) -> Optional[CalibrationProfile]:
        key = (agent_id, domain_id)
        if key not in self._profile_cache:
            self._profile_cache[key] = self.profiles.load(agent_id, domain_id)
        return self._profile_cache[key]

    def verify_request(self, doc: Any):
        request = validate_request(doc, known_domains=self.plugins)
        plugin = self.plugins[request.domain_id]
        profile = self.profile_for(request.agent_id, request.domain_id)
        score = verify(
            request,
            plugin,
            profile,
            default_thresholds=self.config.engine.thresholds,
            default_weights=RuntimeWeights(),
            default_prior_weight=self.config.engine.prior_weight,
        )
        if score.decision is Decision.CONFIRM:
            self.log.enqueue_pending(request.request_id, score)
        else:
            self.log.record_decision(
                request.request_id, score, resolved_by=ResolvedBy.AUTOMATIC
            )
        return score

    def close(self) -> None:
        self.log.close()


def create_app(engine: TrustEngine) -> FastAPI:
    app = FastAPI(title="trustbench", version="0.1.0")
    app.state.engine = engine

    cors_origin = engine.config.server.cors_origin
    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin] if cors_origin != "*" else ["*"],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    def require_token(authorization: str = Header(default="")) -> None:
        expected = f"Bearer {engine.config.server.token}"
        if authorization != expected:
            raise HTTPException(status_code=401, detail="bad or missing bearer token")

    @app.post(f"/{API_VERSION}/verify")
    async def post_verify(request: Request) -> JSONResponse:
        try:
            doc = await request.json()
        except Exception:
            return JSONResponse({"error": "body is not valid JSON"}, status_code=400)
        try:
            score = engine.verify_request(doc)
        except UnknownDomain as exc:
            return JSONResponse({"error": str(exc)}, status_code=422)
        except (SchemaError, RangeError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        body = {"trust_score": score.to_dict()}
        if score.decision is Decision.CONFIRM:
            body["pending_id"] = doc.get("request_id")
            return JSONResponse(body, status_code=202)
        if score.decision is Decision.BLOCK:
            return JSONResponse(body, status_code=403)
        return JSONResponse(body, status_code=200)

    @app.get(f"/{API_VERSION}/pending")
    def get_pending() -> dict:
        return {"pending": [p.to_dict() for p in engine.log.pending_items()]}

    @app.post(
        f"/{API_VERSION}/pending/{{pending_id}}/resolve",
        dependencies=[Depends(require_token)],
    )
    async def resolve_pending(pending_id: str, request: Request) -> JSONResponse:
        try:
            body = await request.json()
        except Exception:
            return JSONResponse({"error": "body is not valid JSON"}, status_code=400)
        resolution = body.get("resolution")
        if resolution not in ("approve", "deny"):
            return JSONResponse(
                {"error": "resolution must be 'approve' or 'deny'"}, status_code=400
            )
        try:
            entry = engine.log.resolve_pending(pending_id, resolution == "approve")
        except AlreadyResolved as exc:
            return JSONResponse({"error": str(exc)}, status_code=409)
        except UnknownPending as exc:
            return JSONResponse({"error": str(exc)}, status_code=404)
        return JSONResponse(
            {"entry": entry.to_dict(), "resolver": str(body.get("resolver", ""))},
            status_code=200,
        )

    @app.get(f"/{API_VERSION}/profiles")
    def list_profiles() -> dict:
        return {
            "profiles": [
                {"agent_id": a, "domain_id": d} for a, d in engine.profiles.list_keys()
            ]
        }

    @app.get(f"/{API_VERSION}/profiles/{{agent_id}}/{{domain_id}}")
    def get_profile(agent_id: str, domain_id: str) -> dict:
        profile = engine.profile_for(agent_id, domain_id)
        if profile is None:
            raise HTTPException(
                status_code=404, detail=f"no profile for ({agent_id}, {domain_id})"
            )
        return profile.to_dict()

    @app.get(f"/{API_VERSION}/decisions")
    def get_decisions(since: Optional[str] = None) -> dict:
        cutoff = parse_ts(since) if since else None
        return {
            "decisions": [e.to_dict() for e in engine.log.entries(since=cutoff)]
        }

    @app.get(f"/{API_VERSION}/plugins")
    def get_plugins() -> dict:
        return {
            "plugins": [
                {
                    "plugin_id": p.plugin_id,
                    "verify_dimensions": sorted(d.value for d in p.verify_dimensions),
                    "citations_required": p.evidence_policy.citations_required,
                    "max_age_days": p.evidence_policy.max_age_days,
                }
                for p in engine.plugins.values()
            ]
        }

    return app


def serve(config: Config) -> None:
    """Blocking entry point used by the CLI."""
    import uvicorn

    engine = TrustEngine(config)
    app = create_app(engine)
    uvicorn.run(app, host=config.server.host, port=config.server.port, log_level="warning")
