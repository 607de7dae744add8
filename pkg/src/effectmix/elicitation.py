"""Guided elicitation of an effect-size distribution, as a state machine.

Stages run context -> ate_pre -> extremes -> allocation -> null_share ->
derived -> compared. Sessions are immutable values; `advance` returns a
new session and never touches its argument. Persistence lives in
`sessions.SessionStore`.
"""

from __future__ import annotations

import math
import time
import uuid
from dataclasses import dataclass, field, replace
from typing import Any

from .effects import (
    Discrete,
    EffectDistribution,
    PointMass,
    mixture_mean,
    with_null_mass,
)

SESSION_SCHEMA_VERSION = 1

STAGES = ("context", "ate_pre", "extremes", "allocation", "null_share", "derived", "compared")

# Extreme-bin mass within this factor of the stated tail share draws no
# warning; elicitation is advisory, so beyond it we warn rather than fail.
_TAIL_MISMATCH_FACTOR = 2.0


class ElicitationError(ValueError):
    """Invalid elicitation input."""


class StageMismatchError(ElicitationError):
    """Payload does not match the session's current stage."""

    def __init__(self, expected: str, got: str):
        self.expected = expected
        self.got = got
        super().__init__(f"session expects a {expected!r} payload, got {got!r}")


# ---------------------------------------------------------------------------
# Stage payloads


@dataclass(frozen=True)
class StudyContext:
    population: str
    sample_size_estimate: int
    treatment: str
    control: str
    outcome_measure: str
    analysis_plan: str
    effect_units: str

    def __post_init__(self):
        for name in ("population", "treatment", "control", "outcome_measure",
                     "analysis_plan", "effect_units"):
            if not getattr(self, name):
                raise ElicitationError(f"context field {name!r} must be nonempty")
        if self.sample_size_estimate < 1:
            raise ElicitationError("sample_size_estimate must be >= 1")


@dataclass(frozen=True)
class ExtremeJudgment:
    kind: str  # "largest" or "smallest"
    effect: float
    description: str
    uncertainty: float = 0.0
    tail_share: float = 0.0

    def __post_init__(self):
        if self.kind not in ("largest", "smallest"):
            raise ElicitationError(f"kind must be 'largest' or 'smallest', got {self.kind!r}")
        if self.uncertainty < 0:
            raise ElicitationError("uncertainty must be >= 0")
        if not (0.0 <= self.tail_share <= 1.0):
            raise ElicitationError("tail_share must be in [0, 1]")


@dataclass(frozen=True)
class BallsAllocation:
    """Balls-in-bins distribution builder state."""

    bin_edges: tuple[float, ...]
    balls: tuple[int, ...]
    total_balls: int = 20

    def __init__(self, bin_edges, balls, total_balls: int = 20):
        bin_edges = tuple(float(e) for e in bin_edges)
        balls = tuple(int(b) for b in balls)
        if len(bin_edges) < 3 or len(balls) != len(bin_edges) - 1:
            raise ElicitationError("need k >= 2 bins: k+1 edges and k ball counts")
        if any(b <= a for a, b in zip(bin_edges, bin_edges[1:])):
            raise ElicitationError("bin edges must be strictly increasing")
        if any(b < 0 for b in balls):
            raise ElicitationError("ball counts must be nonnegative")
        if sum(balls) != total_balls:
            raise ElicitationError(
                f"ball counts sum to {sum(balls)}, expected total_balls={total_balls}"
            )
        object.__setattr__(self, "bin_edges", bin_edges)
        object.__setattr__(self, "balls", balls)
        object.__setattr__(self, "total_balls", total_balls)

    def midpoints(self) -> tuple[float, ...]:
        return tuple(0.5 * (a + b) for a, b in zip(self.bin_edges, self.bin_edges[1:]))


@dataclass(frozen=True)
class MidpointSplit:
    """Shares below and above the midpoint of the elicited range."""

    share_lower: float
    share_upper: float

    def __post_init__(self):
        if self.share_lower < 0 or self.share_upper < 0:
            raise ElicitationError("shares must be nonnegative")
        if abs(self.share_lower + self.share_upper - 1.0) > 1e-9:
            raise ElicitationError("shares must sum to 1")


# ---------------------------------------------------------------------------
# Session


@dataclass(frozen=True)
class LogEntry:
    timestamp: float
    transition: str
    payload: dict


@dataclass(frozen=True)
class ElicitationSession:
    id: str
    stage: str = "context"
    context: StudyContext | None = None
    ate_pre: float | None = None
    largest: ExtremeJudgment | None = None
    smallest: ExtremeJudgment | None = None
    allocation: BallsAllocation | MidpointSplit | None = None
    p_null: float | None = None
    ate_post: float | None = None
    distribution: EffectDistribution | None = None
    reflection: str | None = None
    log: tuple[LogEntry, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def stage_index(self) -> int:
        return STAGES.index(self.stage)


def new_session(session_id: str | None = None) -> ElicitationSession:
    return ElicitationSession(id=session_id or uuid.uuid4().hex)


def _logged(session: ElicitationSession, next_stage: str, payload: dict,
            **updates: Any) -> ElicitationSession:
    entry = LogEntry(timestamp=time.time(), transition=f"{session.stage}->{next_stage}",
                     payload=payload)
    return replace(session, stage=next_stage, log=session.log + (entry,), **updates)


def advance(session: ElicitationSession, payload: Any) -> ElicitationSession:
    """Apply the payload for the session's current stage; returns a new session."""
    stage = session.stage
    if stage == "context":
        if not isinstance(payload, StudyContext):
            raise StageMismatchError("context", type(payload).__name__)
        return _logged(session, "ate_pre", _payload_doc(payload), context=payload)

    if stage == "ate_pre":
        if not isinstance(payload, (int, float)) or isinstance(payload, bool):
            raise StageMismatchError("ate_pre", type(payload).__name__)
        return _logged(session, "extremes", {"ate_pre": float(payload)}, ate_pre=float(payload))

    if stage == "extremes":
        if not (isinstance(payload, tuple) and len(payload) == 2
                and all(isinstance(p, ExtremeJudgment) for p in payload)):
            raise StageMismatchError("extremes", type(payload).__name__)
        by_kind = {p.kind: p for p in payload}
        if set(by_kind) != {"largest", "smallest"}:
            raise ElicitationError("extremes payload needs one largest and one smallest judgment")
        largest, smallest = by_kind["largest"], by_kind["smallest"]
        if largest.effect < smallest.effect:
            raise ElicitationError(
                f"largest effect ({largest.effect}) must be >= smallest ({smallest.effect})"
            )
        return _logged(session, "allocation",
                       {"largest": _payload_doc(largest), "smallest": _payload_doc(smallest)},
                       largest=largest, smallest=smallest)

    if stage == "allocation":
        if not isinstance(payload, (BallsAllocation, MidpointSplit)):
            raise StageMismatchError("allocation", type(payload).__name__)
        warns = session.warnings + tuple(_tail_warnings(session, payload))
        return _logged(session, "null_share", _payload_doc(payload),
                       allocation=payload, warnings=warns)

    if stage == "null_share":
        if not isinstance(payload, (int, float)) or isinstance(payload, bool):
            raise StageMismatchError("null_share", type(payload).__name__)
        p_null = float(payload)
        if not (0.0 <= p_null <= 1.0):
            raise ElicitationError(f"p_null must be in [0, 1], got {p_null}")
        advanced = _logged(session, "derived", {"p_null": p_null}, p_null=p_null)
        dist = _build_distribution(advanced)
        return replace(advanced, distribution=dist, ate_post=mixture_mean(dist))

    if stage == "derived":
        if not isinstance(payload, str):
            raise StageMismatchError("derived", type(payload).__name__)
        return _logged(session, "compared", {"reflection": payload}, reflection=payload)

    raise ElicitationError(f"session at terminal stage {stage!r} cannot advance")


def _tail_warnings(session: ElicitationSession, payload) -> list[str]:
    if not isinstance(payload, BallsAllocation):
        return []
    out = []
    lo_mass = payload.balls[0] / payload.total_balls
    hi_mass = payload.balls[-1] / payload.total_balls
    for judgment, mass, which in ((session.smallest, lo_mass, "lowest"),
                                  (session.largest, hi_mass, "highest")):
        if judgment is None or judgment.tail_share <= 0:
            continue
        ratio = mass / judgment.tail_share if judgment.tail_share else math.inf
        if ratio > _TAIL_MISMATCH_FACTOR or ratio < 1.0 / _TAIL_MISMATCH_FACTOR:
            out.append(
                f"{which} bin holds {mass:.3f} of the mass but the stated tail share "
                f"is {judgment.tail_share:.3f}"
            )
    return out


def _build_distribution(session: ElicitationSession) -> EffectDistribution:
    alloc = session.allocation
    if alloc is None or session.p_null is None or session.largest is None:
        raise ElicitationError("extremes, allocation, and null share must all be set")
    if isinstance(alloc, BallsAllocation):
        values = alloc.midpoints()
        masses = tuple(b / alloc.total_balls for b in alloc.balls)
        keep = [(v, m) for v, m in zip(values, masses) if m > 0]
        base = Discrete([v for v, _ in keep], [m for _, m in keep])
    else:
        lo, hi = session.smallest.effect, session.largest.effect
        # two-point quadrature at the quarter points of the elicited range
        quarter, three_quarter = lo + 0.25 * (hi - lo), lo + 0.75 * (hi - lo)
        if quarter == three_quarter:
            base = PointMass(quarter)
        else:
            base = Discrete([quarter, three_quarter], [alloc.share_lower, alloc.share_upper])
    return with_null_mass(base, session.p_null)


def derive_ate_post(session: ElicitationSession) -> float:
    """Proportion-weighted average over the elicited distribution of effects."""
    if session.ate_post is not None:
        return session.ate_post
    return mixture_mean(_build_distribution(session))


@dataclass(frozen=True)
class ComparisonReport:
    ate_pre: float
    ate_post: float
    ratio: float | None
    difference: float
    distribution: EffectDistribution
    narrative: str
    prompts: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "ate_pre": self.ate_pre,
            "ate_post": self.ate_post,
            "ratio": self.ratio if self.ratio is not None else "undefined",
            "difference": self.difference,
            "distribution": self.distribution.to_json(),
            "narrative": self.narrative,
            "prompts": list(self.prompts),
        }


def comparison_report(session: ElicitationSession) -> ComparisonReport:
    """Set the initial guess against the average implied by the elicited mix."""
    if session.stage_index < STAGES.index("derived"):
        raise ElicitationError(f"comparison needs a derived session, stage is {session.stage!r}")
    pre, post = session.ate_pre, session.ate_post
    ratio = post / pre if pre != 0 else None
    if ratio is not None and abs(ratio - 1.0) < 1e-12:
        narrative = "unchanged: the elicited distribution implies your initial estimate"
    elif ratio is None:
        narrative = (f"initial estimate was zero; the elicited distribution implies "
                     f"an average of {post:g} (absolute difference {post - pre:g})")
    else:
        direction = "smaller" if abs(post) < abs(pre) else "larger"
        narrative = (f"the elicited distribution implies an average of {post:g}, "
                     f"{direction} than the initial estimate {pre:g} (ratio {ratio:g})")
    prompts = (
        "Which number better matches your domain knowledge going into the design?",
        "Would you revise the share of people with no effect at all?",
        "Does the spread of individual effects change who should be in the sample?",
    )
    return ComparisonReport(
        ate_pre=pre,
        ate_post=post,
        ratio=ratio,
        difference=post - pre,
        distribution=session.distribution,
        narrative=narrative,
        prompts=prompts,
    )


# ---------------------------------------------------------------------------
# JSON round-trip


def _payload_doc(payload: Any) -> dict:
    if isinstance(payload, StudyContext):
        return {"type": "context", **payload.__dict__}
    if isinstance(payload, ExtremeJudgment):
        return {"type": "extreme", **payload.__dict__}
    if isinstance(payload, BallsAllocation):
        return {"type": "balls", "bin_edges": list(payload.bin_edges),
                "balls": list(payload.balls), "total_balls": payload.total_balls}
    if isinstance(payload, MidpointSplit):
        return {"type": "midpoint_split", "share_lower": payload.share_lower,
                "share_upper": payload.share_upper}
    raise ElicitationError(f"cannot serialize payload {payload!r}")


def session_to_json(session: ElicitationSession) -> dict:
    def maybe(obj, fn):
        return fn(obj) if obj is not None else None

    return {
        "schema_version": SESSION_SCHEMA_VERSION,
        "id": session.id,
        "stage": session.stage,
        "context": maybe(session.context, lambda c: dict(c.__dict__)),
        "ate_pre": session.ate_pre,
        "largest": maybe(session.largest, lambda e: dict(e.__dict__)),
        "smallest": maybe(session.smallest, lambda e: dict(e.__dict__)),
        "allocation": maybe(session.allocation, _payload_doc),
        "p_null": session.p_null,
        "ate_post": session.ate_post,
        "distribution": maybe(session.distribution, lambda d: d.to_json()),
        "reflection": session.reflection,
        "log": [{"timestamp": e.timestamp, "transition": e.transition, "payload": e.payload}
                for e in session.log],
        "warnings": list(session.warnings),
    }


def session_from_json(doc: dict) -> ElicitationSession:
    version = doc.get("schema_version")
    if version != SESSION_SCHEMA_VERSION:
        raise ElicitationError(
            f"session schema_version {version} not supported (reader supports "
            f"{SESSION_SCHEMA_VERSION}); migrate explicitly"
        )
    if doc.get("stage") not in STAGES:
        raise ElicitationError(f"unknown stage {doc.get('stage')!r}")

    def maybe(key, fn):
        value = doc.get(key)
        return fn(value) if value is not None else None

    alloc_doc = doc.get("allocation")
    allocation = None
    if alloc_doc is not None:
        if alloc_doc.get("type") == "balls":
            allocation = BallsAllocation(alloc_doc["bin_edges"], alloc_doc["balls"],
                                         alloc_doc["total_balls"])
        else:
            allocation = MidpointSplit(alloc_doc["share_lower"], alloc_doc["share_upper"])

    return ElicitationSession(
        id=doc["id"],
        stage=doc["stage"],
        context=maybe("context", lambda c: StudyContext(**c)),
        ate_pre=doc.get("ate_pre"),
        largest=maybe("largest", lambda e: ExtremeJudgment(**e)),
        smallest=maybe("smallest", lambda e: ExtremeJudgment(**e)),
        allocation=allocation,
        p_null=doc.get("p_null"),
        ate_post=doc.get("ate_post"),
        distribution=maybe("distribution", EffectDistribution.from_json),
        reflection=doc.get("reflection"),
        log=tuple(LogEntry(e["timestamp"], e["transition"], e["payload"])
                  for e in doc.get("log", [])),
        warnings=tuple(doc.get("warnings", [])),
    )
