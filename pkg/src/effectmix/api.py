"""JSON-over-HTTP surface for sessions, distributions, and design metrics.

Thin wrappers over the library: compute endpoints are stateless, only
the session store holds state. Every response is an envelope with a
schema_version and exactly one of payload or error.
"""

from __future__ import annotations

import tempfile
import warnings

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import elicitation as el
from .design import (
    BinaryOutcome,
    ContinuousOutcome,
    DesignError,
    diagnostics_fixed,
    diagnostics_mixture,
)
from .effects import (
    BinaryTypeModel,
    EffectDistribution,
    EffectModelError,
    PlausibleRange,
    binary_to_distribution,
    binary_type_ate,
    from_plausible_range,
    mixture_mean,
    with_null_mass,
)
from .scenarios import ScenarioError, list_scenarios, run_scenario
from .sessions import ConflictError, SessionNotFoundError, SessionStore

API_SCHEMA_VERSION = 1


def _ok(payload) -> JSONResponse:
    return JSONResponse({"schema_version": API_SCHEMA_VERSION, "payload": payload})


def _err(status: int, code: str, message: str, **extra) -> JSONResponse:
    error = {"code": code, "message": message, **extra}
    return JSONResponse({"schema_version": API_SCHEMA_VERSION, "error": error},
                        status_code=status)


def _parse_stage_payload(stage: str, raw):
    """Decode the JSON payload for a protocol stage into library types."""
    if stage == "context":
        return el.StudyContext(**raw)
    if stage in ("ate_pre", "null_share"):
        if not isinstance(raw, (int, float)) or isinstance(raw, bool):
            raise el.ElicitationError(f"stage {stage!r} expects a number")
        return float(raw)
    if stage == "extremes":
        return (el.ExtremeJudgment(**raw["largest"]),
                el.ExtremeJudgment(**raw["smallest"]))
    if stage == "allocation":
        if raw.get("type") == "balls":
            return el.BallsAllocation(raw["bin_edges"], raw["balls"],
                                      raw.get("total_balls", 20))
        if raw.get("type") == "midpoint_split":
            return el.MidpointSplit(raw["share_lower"], raw["share_upper"])
        raise el.ElicitationError("allocation payload needs type 'balls' or 'midpoint_split'")
    if stage == "derived":
        if not isinstance(raw, str):
            raise el.ElicitationError("stage 'derived' expects a reflection string")
        return raw
    raise el.ElicitationError(f"session at terminal stage {stage!r} cannot advance")


def build_distribution_request(doc: dict) -> EffectDistribution:
    """Distribution from a request body: explicit JSON, a range, or type shares."""
    if "distribution" in doc:
        dist = EffectDistribution.from_json(doc["distribution"])
    elif "range" in doc:
        lo, hi = doc["range"]
        dist = with_null_mass(from_plausible_range(PlausibleRange(lo, hi)),
                              doc.get("p_null", 0.0))
        return dist
    elif "types" in doc:
        dist = binary_to_distribution(BinaryTypeModel(*doc["types"]))
    else:
        raise EffectModelError("request needs one of 'distribution', 'range', or 'types'")
    if "p_null" in doc and "range" not in doc:
        raise EffectModelError("p_null only applies to 'range' requests; "
                               "bake nulls into the distribution instead")
    return dist


def create_app(store_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="effectmix", version="0.1.0")
    store = SessionStore(store_dir or tempfile.mkdtemp(prefix="effectmix-sessions-"))
    app.state.store = store

    @app.exception_handler(Exception)
    async def unhandled(request: Request, exc: Exception):
        return _err(500, "internal", str(exc))

    def session_payload(session: el.ElicitationSession, revision: int) -> dict:
        return {"revision": revision, "session": el.session_to_json(session)}

    @app.post("/v1/sessions")
    async def create_session(request: Request):
        body = await request.json() if await request.body() else {}
        session = el.new_session()
        try:
            if body.get("context"):
                session = el.advance(session, el.StudyContext(**body["context"]))
        except (el.ElicitationError, TypeError) as exc:
            return _err(422, "validation", str(exc))
        revision = store.save(session)
        return _ok(session_payload(session, revision))

    @app.get("/v1/sessions/{session_id}")
    async def get_session(session_id: str):
        try:
            session, revision = store.load(session_id)
        except SessionNotFoundError:
            return _err(404, "not_found", f"no session {session_id!r}")
        return _ok(session_payload(session, revision))

    @app.post("/v1/sessions/{session_id}/advance")
    async def advance_session(session_id: str, request: Request):
        body = await request.json()
        try:
            session, revision = store.load(session_id)
        except SessionNotFoundError:
            return _err(404, "not_found", f"no session {session_id!r}")
        claimed = body.get("stage")
        if claimed is not None and claimed != session.stage:
            return _err(409, "stage_conflict",
                        f"session is at stage {session.stage!r}, not {claimed!r}",
                        expected_stage=session.stage, retryable=True)
        if body.get("revision") is not None and body["revision"] != revision:
            return _err(409, "revision_conflict",
                        f"session is at revision {revision}", retryable=True)
        try:
            payload = _parse_stage_payload(session.stage, body.get("payload"))
            advanced = el.advance(session, payload)
        except el.StageMismatchError as exc:
            return _err(422, "stage_mismatch", str(exc), expected_stage=exc.expected)
        except (el.ElicitationError, EffectModelError, TypeError, KeyError) as exc:
            return _err(422, "validation", str(exc), expected_stage=session.stage)
        try:
            new_revision = store.save(advanced, expected_revision=revision)
        except ConflictError as exc:
            return _err(409, "revision_conflict", str(exc), retryable=True)
        return _ok(session_payload(advanced, new_revision))

    @app.post("/v1/diagnostics")
    async def compute_diagnostics(request: Request):
        body = await request.json()
        try:
            alpha = body.get("alpha", 0.05)
            sides = body.get("sides", "two_sided")
            se = body.get("se")
            if se is None and "design" in body:
                d = body["design"]
                outcome = _parse_outcome(d.get("outcome", {}))
                se = outcome.se(d["n_treat"], d["n_control"])
            if se is None:
                return _err(422, "validation", "request needs 'se' or 'design'")
            if "effect" in body:
                diag = diagnostics_fixed(body["effect"], se, alpha, sides)
            else:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    diag = diagnostics_mixture(
                        build_distribution_request(body), se, alpha, sides,
                        draws=body.get("draws", 100_000), seed=body.get("seed", 0),
                    )
        except (EffectModelError, DesignError, KeyError, TypeError) as exc:
            return _err(422, "validation", str(exc))
        return _ok(diag.to_json())

    @app.post("/v1/ate")
    async def compute_ate(request: Request):
        body = await request.json()
        try:
            if "types" in body:
                model = BinaryTypeModel(*body["types"])
                summary = binary_type_ate(model)
                dist = binary_to_distribution(model)
                return _ok({
                    "ate": summary.ate,
                    "treat_rate": summary.treat_rate,
                    "control_rate": summary.control_rate,
                    "distribution": dist.to_json(),
                })
            dist = build_distribution_request(body)
            return _ok({"ate": mixture_mean(dist), "distribution": dist.to_json()})
        except (EffectModelError, KeyError, TypeError) as exc:
            return _err(422, "validation", str(exc))

    @app.get("/v1/scenarios")
    async def scenarios():
        return _ok({"scenarios": list_scenarios()})

    @app.post("/v1/scenarios/{name}/run")
    async def run(name: str):
        try:
            outcome = run_scenario(name)
        except ScenarioError:
            return _err(404, "not_found", f"no scenario {name!r}")
        return _ok(outcome.to_json())

    return app


def _parse_outcome(doc: dict):
    kind = doc.get("kind", "binary")
    if kind == "binary":
        return BinaryOutcome(base_rate=doc.get("base_rate"),
                             conservative=doc.get("conservative", True))
    if kind == "continuous":
        return ContinuousOutcome(sd=doc["sd"])
    raise DesignError(f"unknown outcome kind {kind!r}")
