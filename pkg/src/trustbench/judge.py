"""LLM-as-a-judge scoring on correctness / informativeness / consistency.

Benchmarking mode only; the runtime verify path never calls a judge. Two
backends ship: an HTTP text-completion client and a deterministic fixture
backend so tests and CI never need a live model.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol, Sequence

from .errors import BackendTimeout, EmptyInput, JudgeFailed, ParseError, RangeError

DEFAULT_DEADLINE_S = 30.0

_JSON_OBJECT_RE = re.compile(r"\{.*?\}", re.DOTALL)


@dataclass(frozen=True)
class JudgeVerdict:
    correctness: float
    informativeness: float
    consistency: float
    rationale: str = ""
    judge_model: str = ""
    record_id: str = ""

    def __post_init__(self) -> None:
        for name in ("correctness", "informativeness", "consistency"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise RangeError(f"{name} must be in [0,1], got {v}")

    def to_dict(self) -> dict:
        return {
            "correctness": self.correctness,
            "informativeness": self.informativeness,
            "consistency": self.consistency,
            "rationale": self.rationale,
            "judge_model": self.judge_model,
            "record_id": self.record_id,
        }


class JudgeBackend(Protocol):
    def complete(self, prompt: str) -> str: ...


def build_judge_prompt(
    question: str, output: str, gold: Optional[Sequence[str]] = None
) -> str:
    """Prompt instructing the backend to grade one output as a JSON verdict."""
    if not question or not output:
        raise EmptyInput("question and output must be nonempty")
    lines = [
        "You are grading an AI agent's output.",
        "",
        "Question:",
        "<<<",
        question,
        ">>>",
        "",
        "Candidate output:",
        "<<<",
        output,
        ">>>",
    ]
    if gold:
        lines += ["", "Reference answers (grade correctness against these):", "<<<"]
        lines += [f"- {g}" for g in gold]
        lines += [">>>"]
    else:
        lines += [
            "",
            "No reference answers are available; grade correctness on intrinsic "
            "plausibility and internal soundness.",
        ]
    lines += [
        "",
        "Respond with exactly one JSON object and nothing else, with keys "
        '"correctness", "informativeness", "consistency" (each a number '
        'between 0 and 1) and "rationale" (a short string).',
    ]
    return "\n".join(lines)


def parse_verdict(completion: str) -> JudgeVerdict:
    """Extract the first JSON object in a completion and validate it."""
    decoder = json.JSONDecoder()
    start = completion.find("{")
    doc = None
    while start != -1:
        try:
            doc, _ = decoder.raw_decode(completion, start)
            break
        except json.JSONDecodeError:
            start = completion.find("{", start + 1)
    if not isinstance(doc, dict):
        raise ParseError("no JSON object found in judge completion")
    try:
        values = {k: float(doc[k]) for k in ("correctness", "informativeness", "consistency")}
    except KeyError as exc:
        raise ParseError(f"verdict missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(f"verdict field not numeric: {exc}") from exc
    for name, v in values.items():
        if not 0.0 <= v <= 1.0:
            raise RangeError(f"verdict {name} outside [0,1]: {v}")
    return JudgeVerdict(rationale=str(doc.get("rationale", "")), **values)


FORMAT_REMINDER = (
    "\n\nReminder: respond with exactly one JSON object with numeric keys "
    '"correctness", "informativeness", "consistency" in [0,1] and a '
    '"rationale" string.'
)


def score_output(
    backend: JudgeBackend,
    question: str,
    output: str,
    gold: Optional[Sequence[str]] = None,
    *,
    judge_model: str = "",
    record_id: str = "",
) -> JudgeVerdict:
    """Prompt, complete, parse; retry exactly once on a malformed verdict."""
    prompt = build_judge_prompt(question, output, gold)
    last_error: Exception | None = None
    for attempt in range(2):
        completion = backend.complete(prompt if attempt == 0 else prompt + FORMAT_REMINDER)
        try:
            verdict = parse_verdict(completion)
        except (ParseError, RangeError) as exc:
            last_error = exc
            continue
        return JudgeVerdict(
            correctness=verdict.correctness,
            informativeness=verdict.informativeness,
            consistency=verdict.consistency,
            rationale=verdict.rationale,
            judge_model=judge_model,
            record_id=record_id,
        )
    raise JudgeFailed(f"judge output malformed after retry: {last_error}")


# ---------------------------------------------------------------------------
# backends

class FixtureJudgeBackend:
    """Deterministic backend: a verdict table keyed by record_id, with a
    seeded-hash default for unkeyed records.

    The harness sets ``current_record_id`` before each call so the fixture
    can look up the right row without parsing the prompt.
    """

    def __init__(self, verdicts: dict[str, dict], seed: int = 0):
        self.verdicts = verdicts
        self.seed = seed
        self.current_record_id: str = ""

    @classmethod
    def from_file(cls, path: str | Path, seed: int = 0) -> "FixtureJudgeBackend":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(doc, seed=seed)

    def _default_verdict(self, key: str) -> dict:
        digest = hashlib.sha256(f"{self.seed}:{key}".encode()).digest()
        def unit(i: int) -> float:
            return int.from_bytes(digest[i : i + 4], "big") / 0xFFFFFFFF
        return {
            "correctness": round(unit(0), 4),
            "informativeness": round(unit(4), 4),
            "consistency": round(unit(8), 4),
            "rationale": "seeded default verdict",
        }

    def complete(self, prompt: str) -> str:
        row = self.verdicts.get(self.current_record_id)
        if row is None:
            row = self._default_verdict(self.current_record_id or prompt)
        return json.dumps(row)


class HttpJudgeBackend:
    """Text-completion client: POST {model, prompt, temperature} -> {completion}."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        deadline_s: float = DEFAULT_DEADLINE_S,
        temperature: float = 0.0,
    ):
        self.endpoint = endpoint
        self.model = model
        self.deadline_s = deadline_s
        self.temperature = temperature

    def complete(self, prompt: str) -> str:
        import httpx

        try:
            resp = httpx.post(
                self.endpoint,
                json={
                    "model": self.model,
                    "prompt": prompt,
                    "temperature": self.temperature,
                },
                timeout=self.deadline_s,
            )
            resp.raise_for_status()
        except httpx.TimeoutException as exc:
            raise BackendTimeout(
                f"judge backend exceeded {self.deadline_s}s deadline"
            ) from exc
        body = resp.json()
        if "completion" not in body:
            raise ParseError("judge backend response missing 'completion'")
        return str(body["completion"])
