"""Ground-truth-free runtime trust checks plus bench-only reference metrics.

The verify-path subset (citation integrity, timeliness, safety, the
confidence-evidence gate) is total: it never raises and performs no
unbounded I/O. n-gram overlap and robustness are benchmarking-mode only.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Optional, Sequence
from urllib.parse import urlparse

from .errors import (
    EmptyReferences,
    InsufficientPerturbations,
    InvalidPattern,
    InvalidWeights,
)
from .model import Citation, Dimension, Severity, Violation, ViolationCode


class ResolveMode(str, Enum):
    OFFLINE_WHITELIST = "offline_whitelist"
    LIVE_HTTP = "live_http"


@dataclass(frozen=True)
class EvidencePolicy:
    whitelist: dict[str, float] = field(default_factory=dict)
    citations_required: bool = False
    max_age_days: int = 365
    resolve_mode: ResolveMode = ResolveMode.OFFLINE_WHITELIST
    probe_deadline_ms: int = 50

    def __post_init__(self) -> None:
        for pattern, weight in self.whitelist.items():
            if not (0.0 < weight <= 1.0):
                raise InvalidWeights(
                    f"authority weight for {pattern!r} must be in (0,1], got {weight}"
                )
        if self.max_age_days < 1:
            raise InvalidWeights("max_age_days must be >= 1")


@dataclass(frozen=True)
class DenyPattern:
    pattern: str
    severity: Severity
    code: str

    def __post_init__(self) -> None:
        try:
            re.compile(self.pattern)
        except re.error as exc:
            raise InvalidPattern(f"bad deny pattern {self.pattern!r}: {exc}") from exc


@dataclass(frozen=True)
class DenyPatternSet:
    patterns: tuple[DenyPattern, ...] = ()


def _citation_host(source: str) -> str:
    parsed = urlparse(source if "//" in source else "//" + source)
    return (parsed.netloc or parsed.path.split("/")[0]).lower()


def _whitelist_weight(source: str, whitelist: dict[str, float]) -> Optional[float]:
    """Suffix-match the citation's host against registered domain patterns."""
    host = _citation_host(source)
    best = None
    for pattern, weight in whitelist.items():
        p = pattern.lower()
        if host == p or host.endswith("." + p):
            if best is None or weight > best:
                best = weight
    return best


def _probe_reachable(source: str, deadline_ms: int) -> bool:
    import httpx

    try:
        resp = httpx.head(source, timeout=deadline_ms / 1000.0, follow_redirects=True)
        return resp.status_code < 400
    except Exception:
        return False  # failures count as unresolved, never an error


def citation_integrity(
    citations: Sequence[Citation], policy: EvidencePolicy
) -> tuple[float, list[Violation]]:
    """Authority-weighted citation score with per-source violations."""
    violations: list[Violation] = []
    if not citations:
        if policy.citations_required:
            violations.append(
                Violation(
                    code=ViolationCode.CITATION_MISSING,
                    message="no citations supplied but this domain requires evidence",
                    severity=Severity.HARD,
                    dimension=Dimension.CITATION_INTEGRITY,
                )
            )
            return 0.0, violations
        return 1.0, violations  # nothing claimed, nothing to distrust

    total = 0.0
    for citation in citations:
        weight = _whitelist_weight(citation.source, policy.whitelist)
        resolvable = weight is not None
        if resolvable and policy.resolve_mode is ResolveMode.LIVE_HTTP:
            resolvable = _probe_reachable(citation.source, policy.probe_deadline_ms)
        if resolvable:
            total += weight  # type: ignore[arg-type]
        else:
            violations.append(
                Violation(
                    code=ViolationCode.CITATION_UNRESOLVED,
                    message=f"citation to unresolvable source: {citation.source}",
                    severity=Severity.SOFT,
                    dimension=Dimension.CITATION_INTEGRITY,
                )
            )
    return total / len(citations), violations


def timeliness(
    citations: Sequence[Citation], now: datetime, policy: EvidencePolicy
) -> tuple[float, list[Violation]]:
    """Freshness of the newest dated citation, linear decay past max age."""
    violations: list[Violation] = []
    dated = [c.published_at for c in citations if c.published_at is not None]
    if not dated:
        violations.append(
            Violation(
                code=ViolationCode.EVIDENCE_UNDATED,
                message="no citation carries a publication date",
                severity=Severity.SOFT,
                dimension=Dimension.TIMELINESS,
            )
        )
        return 0.5, violations

    age_days = (now - max(dated)).total_seconds() / 86400.0
    max_age = float(policy.max_age_days)
    if age_days <= max_age:
        score = 1.0
    elif age_days >= 2.0 * max_age:
        score = 0.0
    else:
        score = 1.0 - (age_days - max_age) / max_age
    if score < 0.5:
        violations.append(
            Violation(
                code=ViolationCode.EVIDENCE_STALE,
                message=f"newest evidence is {age_days:.0f} days old "
                f"(limit {policy.max_age_days})",
                severity=Severity.SOFT,
                dimension=Dimension.TIMELINESS,
            )
        )
    return score, violations


def safety_check(
    action_text: str, patterns: DenyPatternSet
) -> tuple[float, list[Violation]]:
    """Deny-pattern scan: hard match zeroes the score, soft matches chip 0.25 each."""
    violations: list[Violation] = []
    soft_matches = 0
    hard = False
    for deny in patterns.patterns:
        if re.search(deny.pattern, action_text):
            violations.append(
                Violation(
                    code=ViolationCode.SAFETY_DENY_PATTERN,
                    message=f"action text matches deny pattern {deny.code}",
                    severity=deny.severity,
                    dimension=Dimension.SAFETY,
                )
            )
            if deny.severity is Severity.HARD:
                hard = True
            else:
                soft_matches += 1
    if hard:
        return 0.0, violations
    return max(0.0, 1.0 - 0.25 * soft_matches), violations


def confidence_evidence_gate(
    stated_confidence: float, citation_score: float, policy: EvidencePolicy
) -> Optional[Violation]:
    """High stated confidence on weak required evidence is itself a signal."""
    if (
        policy.citations_required
        and stated_confidence >= 0.8
        and citation_score <= 0.3
    ):
        return Violation(
            code=ViolationCode.CONFIDENCE_EVIDENCE_MISMATCH,
            message=f"stated confidence {stated_confidence:.2f} with citation "
            f"score {citation_score:.2f}: confidence-evidence mismatch detected",
            severity=Severity.SOFT,
            dimension=Dimension.CITATION_INTEGRITY,
        )
    return None


# ---------------------------------------------------------------------------
# bench-only reference metrics

def _tokens(text: str) -> list[str]:
    return text.lower().split()


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _bleu4_single(candidate: list[str], reference: list[str]) -> float:
    log_sum = 0.0
    orders = 0
    for n in range(1, 5):
        cand = _ngrams(candidate, n)
        total = sum(cand.values())
        if total == 0:
            continue
        ref = _ngrams(reference, n)
        clipped = sum(min(count, ref[gram]) for gram, count in cand.items())
        if clipped == 0 and n >= 2:
            precision = 1.0 / (total + 1.0)  # add-one smoothing
        elif clipped == 0:
            return 0.0
        else:
            precision = clipped / total
        log_sum += math.log(precision)
        orders += 1
    if orders == 0:
        return 0.0
    geo_mean = math.exp(log_sum / orders)
    c, r = len(candidate), len(reference)
    bp = 1.0 if c >= r else math.exp(1.0 - r / c) if c > 0 else 0.0
    return bp * geo_mean


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            curr[j] = prev[j - 1] + 1 if x == y else max(prev[j], curr[j - 1])
        prev = curr
    return prev[-1]


def _rouge_l_single(candidate: list[str], reference: list[str]) -> float:
    lcs = _lcs_length(candidate, reference)
    if lcs == 0:
        return 0.0
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    return 2 * precision * recall / (precision + recall)


def ngram_overlap(
    candidate: str, references: Sequence[str], variant: str = "rouge_l"
) -> float:
    """BLEU-4 or ROUGE-L against the best of the references.

    Tokenization is lowercase whitespace split; BLEU uses add-one smoothing
    on zero clipped counts for n >= 2 plus the brevity penalty.
    """
    if not references:
        raise EmptyReferences("ngram_overlap needs at least one reference")
    cand = _tokens(candidate)
    scorer = {"bleu4": _bleu4_single, "rouge_l": _rouge_l_single}[variant]
    return max(scorer(cand, _tokens(ref)) for ref in references)


def robustness_consistency(scores: Sequence[float]) -> float:
    """1 minus the sample standard deviation of judge-correctness scores
    across deterministic question perturbations, clamped to [0,1]."""
    if len(scores) < 2:
        raise InsufficientPerturbations("robustness needs at least 2 perturbations")
    n = len(scores)
    mean = sum(scores) / n
    var = sum((s - mean) ** 2 for s in scores) / (n - 1)
    return 1.0 - min(1.0, math.sqrt(var))


#: Deterministic question perturbations used by the robustness procedure.
def perturb_question(question: str) -> list[str]:
    return [
        question.casefold(),
        re.sub(r"[^\w\s]", "", question),
        "Please answer carefully: " + question,
    ]
