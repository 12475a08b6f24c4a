import json
from datetime import datetime, timezone
from pathlib import Path

import pytest

from trustbench.bench import ReplayAgentBackend, ingest_dataset
from trustbench.judge import FixtureJudgeBackend
from trustbench.model import ActionKind, ActionRequest, Citation
from trustbench.plugins import load_plugin_dir

ROOT = Path(__file__).resolve().parent.parent
PLUGINS_DIR = ROOT / "plugins"
DATA_DIR = ROOT / "data"

AS_OF = datetime.fromisoformat(
    json.loads((DATA_DIR / "meta.json").read_text())["as_of"].replace("Z", "+00:00")
)


@pytest.fixture(scope="session")
def plugins():
    return load_plugin_dir(PLUGINS_DIR)


@pytest.fixture(scope="session")
def corpora():
    out = {}
    for domain in ("healthcare", "finance", "general"):
        records, _ = ingest_dataset(DATA_DIR / "corpora" / f"{domain}.jsonl")
        out[domain] = records
    return out


@pytest.fixture(scope="session")
def replays():
    return {
        domain: ReplayAgentBackend.from_file(DATA_DIR / "replays" / f"{domain}.jsonl")
        for domain in ("healthcare", "finance", "general")
    }


@pytest.fixture(scope="session")
def judges():
    return {
        domain: FixtureJudgeBackend.from_file(DATA_DIR / "judges" / f"{domain}.json")
        for domain in ("healthcare", "finance", "general")
    }


def make_request(
    *,
    request_id="req-1",
    agent_id="agent",
    domain_id="healthcare",
    confidence=0.85,
    action="Take ibuprofen as directed on the label.",
    citations=(),
    created_at=None,
) -> ActionRequest:
    return ActionRequest(
        request_id=request_id,
        agent_id=agent_id,
        domain_id=domain_id,
        task_context="What should I take for a mild headache?",
        proposed_action=action,
        action_kind=ActionKind.ANSWER,
        stated_confidence=confidence,
        citations=tuple(citations),
        created_at=created_at or AS_OF,
    )


def fresh_citation(days_old=30, source="https://pubmed.ncbi.nlm.nih.gov/12345/"):
    from datetime import timedelta

    return Citation(source=source, published_at=AS_OF - timedelta(days=days_old))
