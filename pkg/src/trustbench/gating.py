"""Composite trust scoring and graduated-autonomy gating.

Combines the calibrated confidence prior with runtime metric scores into
one composite, then maps it to proceed / warn / confirm / block. Hard
violations bypass the composite entirely.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from datetime import datetime
from typing import Optional

from .calibration import apply_calibration, fallback_prior
from .errors import InvalidWeights, NoRuntimeDimensions, RangeError
from .metrics import (
    citation_integrity,
    confidence_evidence_gate,
    safety_check,
    timeliness,
)
from .model import (
    VERIFY_PATH_DIMENSIONS,
    ActionRequest,
    CalibrationProfile,
    Decision,
    Dimension,
    TrustScore,
    TrustVector,
    Violation,
    utcnow,
)

DEFAULT_PRIOR_WEIGHT = 0.3  # prior:runtime = 0.3:0.7
PRIOR_METRIC_FAMILY = "correctness"


@dataclass(frozen=True)
class GatingThresholds:
    block_below: float = 0.40
    confirm_below: float = 0.60
    warn_below: float = 0.80

    def __post_init__(self) -> None:
        if not (0.0 <= self.block_below <= self.confirm_below <= self.warn_below <= 1.0):
            raise RangeError(
                "thresholds must satisfy 0 <= block <= confirm <= warn <= 1"
            )


@dataclass(frozen=True)
class RuntimeWeights:
    weights: dict[Dimension, float] = field(
        default_factory=lambda: {d: 1.0 for d in VERIFY_PATH_DIMENSIONS}
    )

    def __post_init__(self) -> None:
        for dim, w in self.weights.items():
            if dim not in VERIFY_PATH_DIMENSIONS:
                raise InvalidWeights(f"{dim.value} is not a verify-path dimension")
            if w < 0:
                raise InvalidWeights(f"weight for {dim.value} must be nonnegative")
        if not any(w > 0 for w in self.weights.values()):
            raise InvalidWeights("at least one runtime weight must be positive")


def calibrated_prior(
    profile: Optional[CalibrationProfile],
    stated_confidence: float,
    metric_family: str = PRIOR_METRIC_FAMILY,
) -> float:
    """Map stated confidence through the learned curve; fall back on miss."""
    from .model import FallbackPolicy

    if profile is None:
        return fallback_prior(stated_confidence, FallbackPolicy.CONSERVATIVE_FLOOR)
    curve = profile.curves.get(metric_family)
    if curve is None:
        return fallback_prior(stated_confidence, profile.fallback_policy)
    return apply_calibration(curve, stated_confidence)


def aggregate_runtime(vector: TrustVector, weights: RuntimeWeights) -> float:
    """Weighted mean over the verify-path dimensions actually evaluated."""
    evaluated = [
        (d, weights.weights.get(d, 0.0))
        for d in vector.scores
        if d in VERIFY_PATH_DIMENSIONS and weights.weights.get(d, 0.0) > 0
    ]
    total = sum(w for _, w in evaluated)
    if total <= 0:
        raise NoRuntimeDimensions(
            "no verify-path dimension with positive weight was evaluated"
        )
    return sum(vector.scores[d] * w for d, w in evaluated) / total


def composite_score(
    prior: float, runtime_aggregate: float, prior_weight: float = DEFAULT_PRIOR_WEIGHT
) -> float:
    return prior_weight * prior + (1.0 - prior_weight) * runtime_aggregate


def gate(
    composite: float,
    violations: list[Violation] | tuple[Violation, ...],
    thresholds: GatingThresholds,
) -> Decision:
    """Threshold table with hard-violation dominance."""
    from .model import Severity

    if any(v.severity is Severity.HARD for v in violations):
        return Decision.BLOCK
    if composite < thresholds.block_below:
        return Decision.BLOCK
    if composite < thresholds.confirm_below:
        return Decision.CONFIRM
    if composite < thresholds.warn_below:
        return Decision.WARN
    return Decision.PROCEED


def verify(
    request: ActionRequest,
    plugin: "DomainPlugin",  # noqa: F821 (plugins imports gating)
    profile: Optional[CalibrationProfile],
    *,
    default_thresholds: Optional[GatingThresholds] = None,
    default_weights: Optional[RuntimeWeights] = None,
    default_prior_weight: float = DEFAULT_PRIOR_WEIGHT,
    now: Optional[datetime] = None,
) -> TrustScore:
    """Full verify-path pipeline: runtime checks, prior, composite, decision.

    Pure given its inputs; wall time is measured into latency_ms. The
    caller (service or CLI) owns decision-log persistence.
    """
    start = time.perf_counter()
    now = now or utcnow()
    thresholds, weights, prior_weight = plugin.resolve_gating(
        default_thresholds or GatingThresholds(),
        default_weights or RuntimeWeights(),
        default_prior_weight,
    )

    scores: dict[Dimension, float] = {}
    violations: list[Violation] = []

    if Dimension.CITATION_INTEGRITY in plugin.verify_dimensions:
        score, vs = citation_integrity(request.citations, plugin.evidence_policy)
        scores[Dimension.CITATION_INTEGRITY] = score
        violations.extend(vs)
        mismatch = confidence_evidence_gate(
            request.stated_confidence, score, plugin.evidence_policy
        )
        if mismatch is not None:
            violations.append(mismatch)
    if Dimension.TIMELINESS in plugin.verify_dimensions:
        score, vs = timeliness(request.citations, now, plugin.evidence_policy)
        scores[Dimension.TIMELINESS] = score
        violations.extend(vs)
    if Dimension.SAFETY in plugin.verify_dimensions:
        score, vs = safety_check(request.proposed_action, plugin.deny_patterns)
        scores[Dimension.SAFETY] = score
        violations.extend(vs)

    vector = TrustVector(scores=scores, violations=tuple(violations))
    runtime = aggregate_runtime(vector, weights)
    prior = calibrated_prior(profile, request.stated_confidence)
    composite = composite_score(prior, runtime, prior_weight)
    decision = gate(composite, violations, thresholds)
    latency_ms = (time.perf_counter() - start) * 1000.0
    return TrustScore(
        composite=composite,
        decision=decision,
        calibrated_prior=prior,
        runtime_aggregate=runtime,
        prior_weight=prior_weight,
        vector=vector,
        latency_ms=latency_ms,
        plugin_id=plugin.plugin_id,
    )
