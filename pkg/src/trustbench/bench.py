"""Benchmarking mode: dataset ingestion, the full-dimension evaluation run,
calibration-pair collection, and the harm-reduction ablation.

Replay-first: the harness normally consumes recorded agent outputs (JSONL
keyed by record_id) plus the fixture judge, so whole runs are
bit-reproducible without any live model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional, Protocol, Sequence

from .calibration import (
    CalibrationPair,
    calibration_dimension_score,
    fit_profile,
)
from .errors import (
    EmptyDataset,
    FileNotFound,
    JudgeFailed,
    MissingLabels,
    ParseError,
)
from .gating import (
    GatingThresholds,
    RuntimeWeights,
    calibrated_prior,
    gate,
    verify,
)
from .judge import FixtureJudgeBackend, JudgeBackend, score_output
from .metrics import (
    citation_integrity,
    ngram_overlap,
    perturb_question,
    robustness_consistency,
    safety_check,
    timeliness,
)
from .model import (
    ActionKind,
    ActionRequest,
    BenchRecord,
    CalibrationProfile,
    Citation,
    Decision,
    Dimension,
    utcnow,
)
from .plugins import DomainPlugin


@dataclass(frozen=True)
class AgentOutput:
    answer: str
    confidence: float
    citations: tuple[Citation, ...] = ()


class AgentBackend(Protocol):
    def respond(self, record: BenchRecord, question: str) -> AgentOutput: ...


class ReplayAgentBackend:
    """Deterministic agent backend replaying recorded outputs by record_id."""

    def __init__(self, outputs: dict[str, AgentOutput]):
        self.outputs = outputs

    @classmethod
    def from_file(cls, path: str | Path) -> "ReplayAgentBackend":
        path = Path(path)
        if not path.exists():
            raise FileNotFound(f"replay file not found: {path}")
        outputs: dict[str, AgentOutput] = {}
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            doc = json.loads(line)
            outputs[str(doc["record_id"])] = AgentOutput(
                answer=str(doc["answer"]),
                confidence=float(doc["confidence"]),
                citations=tuple(
                    Citation.from_dict(c) for c in doc.get("citations") or []
                ),
            )
        if not outputs:
            raise EmptyDataset(f"replay file {path} has no records")
        return cls(outputs)

    def respond(self, record: BenchRecord, question: str) -> AgentOutput:
        try:
            return self.outputs[record.record_id]
        except KeyError as exc:
            raise KeyError(f"no replay output for record {record.record_id}") from exc


class HttpAgentBackend:
    """Live agent endpoint: POST {question} -> {answer, confidence, citations}."""

    def __init__(self, endpoint: str, deadline_s: float = 30.0):
        self.endpoint = endpoint
        self.deadline_s = deadline_s

    def respond(self, record: BenchRecord, question: str) -> AgentOutput:
        import httpx

        resp = httpx.post(
            self.endpoint, json={"question": question}, timeout=self.deadline_s
        )
        resp.raise_for_status()
        doc = resp.json()
        return AgentOutput(
            answer=str(doc["answer"]),
            confidence=float(doc["confidence"]),
            citations=tuple(Citation.from_dict(c) for c in doc.get("citations") or []),
        )


# ---------------------------------------------------------------------------
# dataset ingestion

ADAPTERS = ("canonical", "medqa_like", "finqa_like", "truthfulqa_like")


def _adapt_canonical(doc: dict, domain_id: str) -> BenchRecord:
    return BenchRecord.from_dict(doc)


def _adapt_medqa(doc: dict, domain_id: str) -> BenchRecord:
    options = doc["options"]
    answer_key = doc.get("answer_idx") or doc.get("answer")
    gold = [str(options[answer_key])] if answer_key in options else [str(answer_key)]
    return BenchRecord(
        record_id=str(doc.get("id") or doc.get("record_id")),
        domain_id=doc.get("domain_id", domain_id or "healthcare"),
        question=str(doc["question"]),
        gold_answers=tuple(gold),
        harmful_label=doc.get("harmful_label"),
        metadata={f"option_{k}": str(v) for k, v in options.items()},
    )


def _adapt_finqa(doc: dict, domain_id: str) -> BenchRecord:
    qa = doc["qa"]
    return BenchRecord(
        record_id=str(doc.get("id") or doc.get("record_id")),
        domain_id=doc.get("domain_id", domain_id or "finance"),
        question=str(qa["question"]),
        gold_answers=(str(qa["answer"]),) if qa.get("answer") is not None else (),
        harmful_label=doc.get("harmful_label"),
        metadata={},
    )


def _adapt_truthfulqa(doc: dict, domain_id: str) -> BenchRecord:
    gold = [str(g) for g in doc.get("correct_answers") or []]
    if not gold and doc.get("best_answer"):
        gold = [str(doc["best_answer"])]
    return BenchRecord(
        record_id=str(doc.get("id") or doc.get("record_id")),
        domain_id=doc.get("domain_id", domain_id or "general"),
        question=str(doc["question"]),
        gold_answers=tuple(gold),
        harmful_label=doc.get("harmful_label"),
        metadata={},
    )


_ADAPTER_FNS = {
    "canonical": _adapt_canonical,
    "medqa_like": _adapt_medqa,
    "finqa_like": _adapt_finqa,
    "truthfulqa_like": _adapt_truthfulqa,
}


def ingest_dataset(
    path: str | Path, adapter: str = "canonical", domain_id: str = ""
) -> tuple[list[BenchRecord], int]:
    """Read a JSONL dataset through an adapter.

    Returns (records, skipped): lines that fail mapping are skipped and
    counted, never fatal.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFound(f"dataset not found: {path}")
    adapt = _ADAPTER_FNS[adapter]
    records: list[BenchRecord] = []
    skipped = 0
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        try:
            records.append(adapt(json.loads(line), domain_id))
        except Exception:
            skipped += 1
    if not records:
        raise EmptyDataset(f"dataset {path} yielded no usable records")
    return records, skipped


# ---------------------------------------------------------------------------
# benchmark run

@dataclass
class BenchReport:
    agent_id: str
    plugin_id: str
    records: list[dict] = field(default_factory=list)
    aggregates: dict[str, float] = field(default_factory=dict)
    pairs_by_family: dict[str, list[list[float]]] = field(default_factory=dict)
    judge_failures: int = 0
    skipped_records: int = 0

    def to_dict(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "plugin_id": self.plugin_id,
            "records": self.records,
            "aggregates": self.aggregates,
            "pairs_by_family": self.pairs_by_family,
            "judge_failures": self.judge_failures,
            "skipped_records": self.skipped_records,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def calibration_pairs(self) -> dict[str, list[CalibrationPair]]:
        return {
            family: [CalibrationPair(c, o) for c, o in pairs]
            for family, pairs in self.pairs_by_family.items()
        }


def run_benchmark(
    agent: AgentBackend,
    records: Sequence[BenchRecord],
    plugin: DomainPlugin,
    judge_backend: JudgeBackend,
    *,
    agent_id: str = "agent",
    judge_model: str = "fixture",
    robustness: bool = False,
    now: Optional[datetime] = None,
) -> BenchReport:
    """Score every record on all computable dimensions and collect
    (confidence, judge-score) calibration pairs per metric family."""
    if not records:
        raise EmptyDataset("run_benchmark needs at least one record")
    now = now or utcnow().replace(hour=0, minute=0, second=0, microsecond=0)
    report = BenchReport(agent_id=agent_id, plugin_id=plugin.plugin_id)
    pairs: dict[str, list[list[float]]] = {
        "correctness": [],
        "informativeness": [],
        "consistency": [],
    }
    for record in sorted(records, key=lambda r: r.record_id):
        output = agent.respond(record, record.question)
        dims: dict[str, float] = {}

        score, _ = citation_integrity(output.citations, plugin.evidence_policy)
        dims[Dimension.CITATION_INTEGRITY.value] = score
        score, _ = timeliness(output.citations, now, plugin.evidence_policy)
        dims[Dimension.TIMELINESS.value] = score
        score, _ = safety_check(output.answer, plugin.deny_patterns)
        dims[Dimension.SAFETY.value] = score
        if record.gold_answers:
            dims[Dimension.REFERENCE_ACCURACY.value] = ngram_overlap(
                output.answer, list(record.gold_answers), "rouge_l"
            )

        row: dict[str, Any] = {
            "record_id": record.record_id,
            "stated_confidence": output.confidence,
            "dimensions": dims,
        }
        if isinstance(judge_backend, FixtureJudgeBackend):
            judge_backend.current_record_id = record.record_id
        try:
            verdict = score_output(
                judge_backend,
                record.question,
                output.answer,
                list(record.gold_answers) or None,
                judge_model=judge_model,
                record_id=record.record_id,
            )
        except (JudgeFailed, ParseError):
            report.judge_failures += 1
            row["judge_failed"] = True
        else:
            dims[Dimension.FACTUAL_CONSISTENCY.value] = verdict.consistency
            row["verdict"] = {
                "correctness": verdict.correctness,
                "informativeness": verdict.informativeness,
                "consistency": verdict.consistency,
            }
            pairs["correctness"].append([output.confidence, verdict.correctness])
            pairs["informativeness"].append(
                [output.confidence, verdict.informativeness]
            )
            pairs["consistency"].append([output.confidence, verdict.consistency])
            if robustness:
                perturbed_scores = []
                for variant in perturb_question(record.question):
                    v_out = agent.respond(record, variant)
                    if isinstance(judge_backend, FixtureJudgeBackend):
                        judge_backend.current_record_id = record.record_id
                    try:
                        v_verdict = score_output(
                            judge_backend,
                            variant,
                            v_out.answer,
                            list(record.gold_answers) or None,
                            judge_model=judge_model,
                            record_id=record.record_id,
                        )
                    except (JudgeFailed, ParseError):
                        continue
                    perturbed_scores.append(v_verdict.correctness)
                if len(perturbed_scores) >= 2:
                    dims[Dimension.ROBUSTNESS.value] = robustness_consistency(
                        perturbed_scores
                    )
        report.records.append(row)

    report.pairs_by_family = {f: p for f, p in pairs.items() if p}
    # run-level aggregates
    dim_totals: dict[str, list[float]] = {}
    for row in report.records:
        for dim, value in row["dimensions"].items():
            dim_totals.setdefault(dim, []).append(value)
    report.aggregates = {
        f"mean_{dim}": sum(vals) / len(vals) for dim, vals in sorted(dim_totals.items())
    }
    if report.pairs_by_family.get("correctness"):
        report.aggregates[Dimension.CALIBRATION.value] = calibration_dimension_score(
            [CalibrationPair(c, o) for c, o in report.pairs_by_family["correctness"]]
        )
    return report


def fit_profile_from_report(
    report: BenchReport,
    domain_id: str,
    *,
    min_samples: int = 10,
) -> CalibrationProfile:
    return fit_profile(
        report.calibration_pairs(),
        agent_id=report.agent_id,
        domain_id=domain_id,
        min_samples=min_samples,
    )


# ---------------------------------------------------------------------------
# harm-reduction ablation

ABLATION_MODES = ("baseline", "confidence_only", "full")


@dataclass(frozen=True)
class AblationRow:
    mode: str
    executed_harm_rate: float
    false_block_rate: float
    completion_rate: float

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "executed_harm_rate": self.executed_harm_rate,
            "false_block_rate": self.false_block_rate,
            "completion_rate": self.completion_rate,
        }


def ablation_csv(rows: Sequence[AblationRow]) -> str:
    lines = ["mode,executed_harm_rate,false_block_rate,completion_rate"]
    for r in rows:
        lines.append(
            f"{r.mode},{r.executed_harm_rate:.6f},"
            f"{r.false_block_rate:.6f},{r.completion_rate:.6f}"
        )
    return "\n".join(lines) + "\n"


def _request_for(record: BenchRecord, output: AgentOutput, now: datetime) -> ActionRequest:
    return ActionRequest(
        request_id=record.record_id,
        agent_id="replay",
        domain_id=record.domain_id,
        task_context=record.question,
        proposed_action=output.answer,
        action_kind=ActionKind.ANSWER,
        stated_confidence=output.confidence,
        citations=output.citations,
        created_at=now,
    )


def ablation_report(
    records: Sequence[BenchRecord],
    agent: AgentBackend,
    plugin: DomainPlugin,
    profile: Optional[CalibrationProfile],
    *,
    modes: Sequence[str] = ABLATION_MODES,
    now: Optional[datetime] = None,
) -> list[AblationRow]:
    """Executed-harm / false-block / completion rates per gating mode.

    Unresolved confirm decisions count as denied (fail-closed): an action
    executes only on proceed or warn. Rates use the whole corpus as the
    denominator for executed harm, and the safe subset for false-block and
    completion.
    """
    if any(r.harmful_label is None for r in records):
        raise MissingLabels("every ablation record needs harmful_label")
    now = now or utcnow()
    total = len(records)
    harmful = sum(1 for r in records if r.harmful_label)
    safe = total - harmful

    rows: list[AblationRow] = []
    for mode in modes:
        harm_executed = 0
        safe_blocked = 0
        safe_executed = 0
        for record in sorted(records, key=lambda r: r.record_id):
            output = agent.respond(record, record.question)
            if mode == "baseline":
                decision = Decision.PROCEED
            elif mode == "confidence_only":
                prior = calibrated_prior(profile, output.confidence)
                thresholds, _, _ = plugin.resolve_gating(
                    GatingThresholds(), RuntimeWeights(), 0.3
                )
                decision = gate(prior, [], thresholds)
            else:
                score = verify(
                    _request_for(record, output, now), plugin, profile, now=now
                )
                decision = score.decision
            executed = decision in (Decision.PROCEED, Decision.WARN)
            if record.harmful_label and executed:
                harm_executed += 1
            if not record.harmful_label:
                if decision is Decision.BLOCK:
                    safe_blocked += 1
                if executed:
                    safe_executed += 1
        rows.append(
            AblationRow(
                mode=mode,
                executed_harm_rate=harm_executed / total,
                false_block_rate=(safe_blocked / safe) if safe else 0.0,
                completion_rate=(safe_executed / safe) if safe else 1.0,
            )
        )
    return rows
