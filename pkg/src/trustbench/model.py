"""Shared domain types, validation rules, and canonical JSON forms.

Every other module trades in these value objects. All types are immutable
(frozen dataclasses) after construction and safe to share across tasks.
Canonical serialization is UTF-8 JSON with the field names used by
``to_dict``/``from_dict``; timestamps are RFC 3339 UTC strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Iterable, Mapping, Optional

from .errors import RangeError, SchemaError


class Dimension(str, Enum):
    """The closed set of trust dimensions."""

    REFERENCE_ACCURACY = "reference_accuracy"
    FACTUAL_CONSISTENCY = "factual_consistency"
    CITATION_INTEGRITY = "citation_integrity"
    CALIBRATION = "calibration"
    ROBUSTNESS = "robustness"
    FAIRNESS = "fairness"  # legal id; no built-in producer (declared unavailable)
    TIMELINESS = "timeliness"
    SAFETY = "safety"


#: Dimensions computable without ground truth; the only ones legal on the
#: verify path.
VERIFY_PATH_DIMENSIONS = frozenset(
    {Dimension.CITATION_INTEGRITY, Dimension.TIMELINESS, Dimension.SAFETY}
)

#: Judge rubric axes; curves may be keyed by these as well as by Dimension.
JUDGE_AXES = ("correctness", "informativeness", "consistency")

#: Every legal metric-family key for a calibration curve.
METRIC_FAMILIES = frozenset(JUDGE_AXES) | {d.value for d in Dimension}


class ActionKind(str, Enum):
    ANSWER = "answer"
    RECOMMEND = "recommend"
    TRANSACT = "transact"
    EXECUTE = "execute"


class Decision(str, Enum):
    PROCEED = "proceed"
    WARN = "warn"
    CONFIRM = "confirm"
    BLOCK = "block"


#: Ordering used by the decision-monotonicity property: more trust never
#: moves left.
DECISION_ORDER = [Decision.BLOCK, Decision.CONFIRM, Decision.WARN, Decision.PROCEED]


class Severity(str, Enum):
    HARD = "hard"
    SOFT = "soft"


class ViolationCode(str, Enum):
    CITATION_MISSING = "CITATION_MISSING"
    CITATION_UNRESOLVED = "CITATION_UNRESOLVED"
    CONFIDENCE_EVIDENCE_MISMATCH = "CONFIDENCE_EVIDENCE_MISMATCH"
    SAFETY_DENY_PATTERN = "SAFETY_DENY_PATTERN"
    EVIDENCE_STALE = "EVIDENCE_STALE"
    EVIDENCE_UNDATED = "EVIDENCE_UNDATED"


class ResolvedBy(str, Enum):
    AUTOMATIC = "automatic"
    HUMAN_APPROVE = "human_approve"
    HUMAN_DENY = "human_deny"
    TIMEOUT_DENY = "timeout_deny"


class FallbackPolicy(str, Enum):
    IDENTITY = "identity"
    CONSERVATIVE_FLOOR = "conservative_floor"


# ---------------------------------------------------------------------------
# timestamp helpers

def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def format_ts(ts: datetime) -> str:
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_ts(raw: str) -> datetime:
    try:
        ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad RFC 3339 timestamp: {raw!r}") from exc
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _require(doc: Mapping[str, Any], key: str) -> Any:
    if key not in doc or doc[key] is None:
        raise SchemaError(f"missing required field {key!r}")
    return doc[key]


def _check_unit(value: Any, name: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{name} must be a number, got {value!r}") from exc
    if not 0.0 <= v <= 1.0:
        raise RangeError(f"{name} must be in [0,1], got {v}")
    return v


# ---------------------------------------------------------------------------
# core value objects

@dataclass(frozen=True)
class Citation:
    source: str
    published_at: Optional[datetime] = None
    resolvable: Optional[bool] = None

    def __post_init__(self) -> None:
        if not self.source:
            raise SchemaError("citation source must be nonempty")

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"source": self.source}
        if self.published_at is not None:
            out["published_at"] = format_ts(self.published_at)
        if self.resolvable is not None:
            out["resolvable"] = self.resolvable
        return out

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "Citation":
        published = doc.get("published_at")
        return cls(
            source=str(_require(doc, "source")),
            published_at=parse_ts(published) if published else None,
            resolvable=doc.get("resolvable"),
        )


@dataclass(frozen=True)
class ActionRequest:
    request_id: str
    agent_id: str
    domain_id: str
    task_context: str
    proposed_action: str
    action_kind: ActionKind
    stated_confidence: float
    citations: tuple[Citation, ...] = ()
    created_at: datetime = field(default_factory=utcnow)

    def __post_init__(self) -> None:
        if not self.request_id:
            raise SchemaError("request_id must be nonempty")
        _check_unit(self.stated_confidence, "stated_confidence")
        for c in self.citations:
            if c.published_at is not None and c.published_at > self.created_at:
                raise RangeError(
                    f"citation {c.source!r} published_at is in the future"
                )

    def to_dict(self) -> dict:
        return {
            "request_id": self.request_id,
            "agent_id": self.agent_id,
            "domain_id": self.domain_id,
            "task_context": self.task_context,
            "proposed_action": self.proposed_action,
            "action_kind": self.action_kind.value,
            "stated_confidence": self.stated_confidence,
            "citations": [c.to_dict() for c in self.citations],
            "created_at": format_ts(self.created_at),
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "ActionRequest":
        try:
            kind = ActionKind(str(_require(doc, "action_kind")))
        except ValueError as exc:
            raise SchemaError(f"unknown action_kind {doc.get('action_kind')!r}") from exc
        created = doc.get("created_at")
        return cls(
            request_id=str(_require(doc, "request_id")),
            agent_id=str(_require(doc, "agent_id")),
            domain_id=str(_require(doc, "domain_id")),
            task_context=str(_require(doc, "task_context")),
            proposed_action=str(_require(doc, "proposed_action")),
            action_kind=kind,
            stated_confidence=_check_unit(
                _require(doc, "stated_confidence"), "stated_confidence"
            ),
            citations=tuple(
                Citation.from_dict(c) for c in doc.get("citations") or []
            ),
            created_at=parse_ts(created) if created else utcnow(),
        )


@dataclass(frozen=True)
class Violation:
    code: ViolationCode
    message: str
    severity: Severity
    dimension: Dimension

    def to_dict(self) -> dict:
        return {
            "code": self.code.value,
            "message": self.message,
            "severity": self.severity.value,
            "dimension": self.dimension.value,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "Violation":
        return cls(
            code=ViolationCode(_require(doc, "code")),
            message=str(_require(doc, "message")),
            severity=Severity(_require(doc, "severity")),
            dimension=Dimension(_require(doc, "dimension")),
        )


@dataclass(frozen=True)
class TrustVector:
    scores: Mapping[Dimension, float]
    violations: tuple[Violation, ...] = ()

    def __post_init__(self) -> None:
        for dim, score in self.scores.items():
            if not isinstance(dim, Dimension):
                raise SchemaError(f"unknown dimension {dim!r}")
            _check_unit(score, f"score[{dim.value}]")

    @property
    def dimensions_evaluated(self) -> frozenset[Dimension]:
        return frozenset(self.scores)

    def has_hard_violation(self) -> bool:
        return any(v.severity is Severity.HARD for v in self.violations)

    def to_dict(self) -> dict:
        return {
            "scores": {d.value: s for d, s in sorted(self.scores.items(), key=lambda kv: kv[0].value)},
            "violations": [v.to_dict() for v in self.violations],
            "dimensions_evaluated": sorted(d.value for d in self.dimensions_evaluated),
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "TrustVector":
        scores = {
            Dimension(k): _check_unit(v, f"score[{k}]")
            for k, v in _require(doc, "scores").items()
        }
        return cls(
            scores=scores,
            violations=tuple(Violation.from_dict(v) for v in doc.get("violations") or []),
        )


@dataclass(frozen=True)
class TrustScore:
    composite: float
    decision: Decision
    calibrated_prior: float
    runtime_aggregate: float
    prior_weight: float
    vector: TrustVector
    latency_ms: float
    plugin_id: str

    def __post_init__(self) -> None:
        for name in ("composite", "calibrated_prior", "runtime_aggregate", "prior_weight"):
            _check_unit(getattr(self, name), name)
        if self.latency_ms < 0:
            raise RangeError("latency_ms must be nonnegative")
        expected = (
            self.prior_weight * self.calibrated_prior
            + (1.0 - self.prior_weight) * self.runtime_aggregate
        )
        if abs(self.composite - expected) > 1e-9:
            raise RangeError(
                f"composite {self.composite} violates identity (expected {expected})"
            )

    def to_dict(self) -> dict:
        return {
            "composite": self.composite,
            "decision": self.decision.value,
            "calibrated_prior": self.calibrated_prior,
            "runtime_aggregate": self.runtime_aggregate,
            "prior_weight": self.prior_weight,
            "vector": self.vector.to_dict(),
            "latency_ms": self.latency_ms,
            "plugin_id": self.plugin_id,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "TrustScore":
        return cls(
            composite=float(_require(doc, "composite")),
            decision=Decision(_require(doc, "decision")),
            calibrated_prior=float(_require(doc, "calibrated_prior")),
            runtime_aggregate=float(_require(doc, "runtime_aggregate")),
            prior_weight=float(_require(doc, "prior_weight")),
            vector=TrustVector.from_dict(_require(doc, "vector")),
            latency_ms=float(doc.get("latency_ms", 0.0)),
            plugin_id=str(_require(doc, "plugin_id")),
        )


@dataclass(frozen=True)
class CalibrationCurve:
    breakpoints: tuple[tuple[float, float], ...]
    metric_family: str
    agent_id: str
    domain_id: str
    sample_count: int
    fitted_at: datetime = field(default_factory=utcnow)

    def __post_init__(self) -> None:
        if self.metric_family not in METRIC_FAMILIES:
            raise SchemaError(f"unknown metric family {self.metric_family!r}")
        xs = [x for x, _ in self.breakpoints]
        ys = [y for _, y in self.breakpoints]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise RangeError("breakpoint x values must be strictly increasing")
        if any(b < a - 1e-12 for a, b in zip(ys, ys[1:])):
            raise RangeError("breakpoint y values must be nondecreasing")
        for x in xs:
            _check_unit(x, "breakpoint x")
        for y in ys:
            _check_unit(y, "breakpoint y")
        if self.sample_count < len(self.breakpoints):
            raise RangeError("sample_count must cover all distinct breakpoints")

    def to_dict(self) -> dict:
        return {
            "breakpoints": [[x, y] for x, y in self.breakpoints],
            "metric_family": self.metric_family,
            "agent_id": self.agent_id,
            "domain_id": self.domain_id,
            "sample_count": self.sample_count,
            "fitted_at": format_ts(self.fitted_at),
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "CalibrationCurve":
        return cls(
            breakpoints=tuple(
                (float(x), float(y)) for x, y in _require(doc, "breakpoints")
            ),
            metric_family=str(_require(doc, "metric_family")),
            agent_id=str(_require(doc, "agent_id")),
            domain_id=str(_require(doc, "domain_id")),
            sample_count=int(_require(doc, "sample_count")),
            fitted_at=parse_ts(_require(doc, "fitted_at")),
        )


@dataclass(frozen=True)
class CalibrationProfile:
    agent_id: str
    domain_id: str
    curves: Mapping[str, CalibrationCurve]
    fallback_policy: FallbackPolicy = FallbackPolicy.CONSERVATIVE_FLOOR

    def __post_init__(self) -> None:
        for family, curve in self.curves.items():
            if curve.agent_id != self.agent_id or curve.domain_id != self.domain_id:
                raise SchemaError(
                    f"curve {family!r} keyed to ({curve.agent_id}, {curve.domain_id}), "
                    f"profile is ({self.agent_id}, {self.domain_id})"
                )

    @property
    def key(self) -> tuple[str, str]:
        return (self.agent_id, self.domain_id)

    def to_dict(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "domain_id": self.domain_id,
            "curves": {f: c.to_dict() for f, c in sorted(self.curves.items())},
            "fallback_policy": self.fallback_policy.value,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "CalibrationProfile":
        return cls(
            agent_id=str(_require(doc, "agent_id")),
            domain_id=str(_require(doc, "domain_id")),
            curves={
                f: CalibrationCurve.from_dict(c)
                for f, c in (doc.get("curves") or {}).items()
            },
            fallback_policy=FallbackPolicy(
                doc.get("fallback_policy", FallbackPolicy.CONSERVATIVE_FLOOR.value)
            ),
        )


@dataclass(frozen=True)
class BenchRecord:
    record_id: str
    domain_id: str
    question: str
    gold_answers: tuple[str, ...] = ()
    harmful_label: Optional[bool] = None
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.record_id:
            raise SchemaError("record_id must be nonempty")
        if not self.question:
            raise SchemaError("question must be nonempty")

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "record_id": self.record_id,
            "domain_id": self.domain_id,
            "question": self.question,
            "gold_answers": list(self.gold_answers),
            "metadata": dict(self.metadata),
        }
        if self.harmful_label is not None:
            out["harmful_label"] = self.harmful_label
        return out

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "BenchRecord":
        return cls(
            record_id=str(_require(doc, "record_id")),
            domain_id=str(_require(doc, "domain_id")),
            question=str(_require(doc, "question")),
            gold_answers=tuple(str(g) for g in doc.get("gold_answers") or []),
            harmful_label=doc.get("harmful_label"),
            metadata={str(k): str(v) for k, v in (doc.get("metadata") or {}).items()},
        )


@dataclass(frozen=True)
class DecisionLogEntry:
    request_id: str
    trust_score: TrustScore
    resolved_by: ResolvedBy
    resolved_at: datetime

    def __post_init__(self) -> None:
        if (
            self.resolved_by is not ResolvedBy.AUTOMATIC
            and self.trust_score.decision is not Decision.CONFIRM
        ):
            raise SchemaError(
                "only confirm decisions may be resolved by a non-automatic path"
            )

    def to_dict(self) -> dict:
        return {
            "request_id": self.request_id,
            "trust_score": self.trust_score.to_dict(),
            "resolved_by": self.resolved_by.value,
            "resolved_at": format_ts(self.resolved_at),
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "DecisionLogEntry":
        return cls(
            request_id=str(_require(doc, "request_id")),
            trust_score=TrustScore.from_dict(_require(doc, "trust_score")),
            resolved_by=ResolvedBy(_require(doc, "resolved_by")),
            resolved_at=parse_ts(_require(doc, "resolved_at")),
        )


# ---------------------------------------------------------------------------
# request validation entry point

def validate_request(
    raw: str | bytes | Mapping[str, Any],
    known_domains: Optional[Iterable[str]] = None,
) -> ActionRequest:
    """Parse and validate a serialized action request.

    ``known_domains``, when given, is the set of loaded plugin ids; a
    request for any other domain is rejected with UnknownDomain.
    """
    from .errors import UnknownDomain

    if isinstance(raw, (str, bytes)):
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    else:
        doc = raw
    if not isinstance(doc, Mapping):
        raise SchemaError("action request must be a JSON object")
    request = ActionRequest.from_dict(doc)
    if known_domains is not None and request.domain_id not in set(known_domains):
        raise UnknownDomain(f"no plugin loaded for domain {request.domain_id!r}")
    return request
