"""Operator CLI: benchmarking, calibration fitting, one-shot verification,
serving, and ablation reporting.

Exit codes are a stable contract: 0 success (verify: proceed/warn),
2 config/schema error, 3 empty dataset / missing labels, 10 verify said
confirm, 11 verify said block.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .bench import (
    ABLATION_MODES,
    HttpAgentBackend,
    ReplayAgentBackend,
    ablation_csv,
    ablation_report,
    fit_profile_from_report,
    ingest_dataset,
    run_benchmark,
)
from .calibration import ProfileStore, fit_profile
from .calibration import CalibrationPair
from .config import load_config
from .errors import (
    ConfigParseError,
    EmptyDataset,
    FileNotFound,
    MissingLabels,
    RangeError,
    SchemaError,
    TrustbenchError,
    UnknownDomain,
)
from .gating import RuntimeWeights, verify
from .judge import FixtureJudgeBackend, HttpJudgeBackend
from .model import Decision, validate_request
from .plugins import load_plugin_dir

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_EMPTY = 3
EXIT_CONFIRM = 10
EXIT_BLOCK = 11


@click.group()
@click.version_option(__version__, prog_name="trustbench")
def main() -> None:
    """Dual-mode trust engine: benchmark agent calibration, gate agent actions."""


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)


def _load_plugins(plugins_dir: str):
    try:
        registry = load_plugin_dir(plugins_dir)
    except ConfigParseError as exc:
        _fail(str(exc))
        sys.exit(EXIT_CONFIG)
    if not registry:
        _fail(f"no plugins found in {plugins_dir}")
        sys.exit(EXIT_CONFIG)
    return registry


def _judge_backend(spec: str, config_path: str | None):
    if spec.startswith("fixture:"):
        return FixtureJudgeBackend.from_file(spec.split(":", 1)[1]), "fixture"
    if spec == "http":
        cfg = load_config(config_path)
        if not cfg.judge.endpoint:
            raise ConfigParseError("judge.endpoint missing from config")
        return (
            HttpJudgeBackend(
                cfg.judge.endpoint, cfg.judge.model, cfg.judge.deadline_ms / 1000.0
            ),
            cfg.judge.model,
        )
    raise ConfigParseError(f"unknown judge spec {spec!r} (use fixture:<path> or http)")


def _agent_backend(spec: str):
    if spec.startswith(("http://", "https://")):
        return HttpAgentBackend(spec)
    return ReplayAgentBackend.from_file(spec)


@main.command()
@click.option("--dataset", required=True, help="JSONL dataset file")
@click.option(
    "--adapter",
    default="canonical",
    type=click.Choice(["canonical", "medqa_like", "finqa_like", "truthfulqa_like"]),
)
@click.option("--agent", "agent_spec", required=True, help="replay file path or agent URL")
@click.option("--agent-id", default="agent")
@click.option("--plugin", "plugin_id", required=True)
@click.option("--plugins-dir", default="plugins")
@click.option("--judge", "judge_spec", default="fixture:", help="fixture:<path> or http")
@click.option("--config", "config_path", default=None)
@click.option("--robustness", is_flag=True, default=False)
@click.option("--out", default="bench_report.json", help="report output path")
def bench(
    dataset, adapter, agent_spec, agent_id, plugin_id, plugins_dir, judge_spec,
    config_path, robustness, out,
) -> None:
    """Run Benchmarking Mode over a dataset and write a BenchReport."""
    try:
        registry = _load_plugins(plugins_dir)
        if plugin_id not in registry:
            _fail(f"unknown plugin {plugin_id!r}")
            sys.exit(EXIT_CONFIG)
        records, skipped = ingest_dataset(dataset, adapter)
        agent = _agent_backend(agent_spec)
        judge, judge_model = _judge_backend(judge_spec, config_path)
    except (FileNotFound, ConfigParseError) as exc:
        _fail(str(exc))
        sys.exit(EXIT_CONFIG)
    except EmptyDataset as exc:
        _fail(str(exc))
        sys.exit(EXIT_EMPTY)

    report = run_benchmark(
        agent,
        records,
        registry[plugin_id],
        judge,
        agent_id=agent_id,
        judge_model=judge_model,
        robustness=robustness,
    )
    report.skipped_records = skipped
    Path(out).write_text(report.to_json(), encoding="utf-8")
    click.echo(f"records scored: {len(report.records)}")
    click.echo(f"judge failures: {report.judge_failures}")
    for name, value in sorted(report.aggregates.items()):
        click.echo(f"  {name}: {value:.4f}")
    click.echo(f"report written to {out}")


@main.command()
@click.option("--report", "report_path", required=True, help="bench report JSON")
@click.option("--out", "out_dir", required=True, help="profiles directory")
@click.option("--domain", "domain_id", required=True)
@click.option("--min-samples", default=10, show_default=True)
def calibrate(report_path, out_dir, domain_id, min_samples) -> None:
    """Fit calibration profiles from a bench report and persist them."""
    path = Path(report_path)
    if not path.exists():
        _fail(f"report not found: {path}")
        sys.exit(EXIT_CONFIG)
    doc = json.loads(path.read_text(encoding="utf-8"))
    pairs = {
        family: [CalibrationPair(c, o) for c, o in rows]
        for family, rows in (doc.get("pairs_by_family") or {}).items()
    }
    if not pairs:
        _fail("report carries no calibration pairs")
        sys.exit(EXIT_EMPTY)
    profile = fit_profile(
        pairs, agent_id=doc["agent_id"], domain_id=domain_id, min_samples=min_samples
    )
    store = ProfileStore(out_dir)
    written = store.save(profile)
    if not profile.curves:
        click.echo(
            "warning: no family reached the minimum sample count; "
            "profile has zero curves and the fallback policy applies",
            err=True,
        )
    click.echo(f"profile written to {written} ({len(profile.curves)} curves)")


@main.command(name="verify")
@click.option("--request", "request_path", required=True, help="request file or - for stdin")
@click.option("--plugin", "plugin_id", required=True)
@click.option("--plugins-dir", default="plugins")
@click.option("--profiles", "profiles_dir", default=None)
def verify_cmd(request_path, plugin_id, plugins_dir, profiles_dir) -> None:
    """One-shot verification: TrustScore JSON on stdout, summary on stderr."""
    registry = _load_plugins(plugins_dir)
    if plugin_id not in registry:
        _fail(f"unknown plugin {plugin_id!r}")
        sys.exit(EXIT_CONFIG)
    raw = sys.stdin.read() if request_path == "-" else None
    if raw is None:
        path = Path(request_path)
        if not path.exists():
            _fail(f"request file not found: {path}")
            sys.exit(EXIT_CONFIG)
        raw = path.read_text(encoding="utf-8")
    try:
        request = validate_request(raw, known_domains=registry)
    except (SchemaError, RangeError, UnknownDomain) as exc:
        _fail(str(exc))
        sys.exit(EXIT_CONFIG)
    profile = None
    if profiles_dir:
        profile = ProfileStore(profiles_dir).load(request.agent_id, request.domain_id)
    score = verify(request, registry[plugin_id], profile)
    click.echo(json.dumps(score.to_dict(), sort_keys=True))
    click.echo(
        f"{score.decision.value}: composite={score.composite:.3f} "
        f"(prior={score.calibrated_prior:.3f}, runtime={score.runtime_aggregate:.3f}), "
        f"{len(score.vector.violations)} violation(s)",
        err=True,
    )
    if score.decision is Decision.CONFIRM:
        sys.exit(EXIT_CONFIRM)
    if score.decision is Decision.BLOCK:
        sys.exit(EXIT_BLOCK)


@main.command()
@click.option("--config", "config_path", required=True)
def serve(config_path) -> None:
    """Run the runtime verification HTTP service."""
    from .service import serve as serve_impl

    try:
        cfg = load_config(config_path)
        # fail fast on bad plugin configs before binding the port
        registry = load_plugin_dir(cfg.paths.plugins_dir)
        if not registry:
            raise ConfigParseError(f"no plugins in {cfg.paths.plugins_dir}")
    except ConfigParseError as exc:
        _fail(str(exc))
        sys.exit(EXIT_CONFIG)
    serve_impl(cfg)


@main.command()
@click.option("--ablation", is_flag=True, required=True)
@click.option("--corpus", required=True, help="labeled JSONL corpus")
@click.option("--replay", required=True, help="replay outputs JSONL")
@click.option("--plugin", "plugin_id", required=True)
@click.option("--plugins-dir", default="plugins")
@click.option("--profiles", "profiles_dir", required=True)
@click.option("--agent-id", default="agent")
@click.option("--domain", "domain_id", default=None, help="profile domain (defaults to corpus domain)")
@click.option("--as-of", "as_of", default=None, help="RFC 3339 evaluation time (default: now)")
@click.option("--out", default="ablation.csv")
def report(ablation, corpus, replay, plugin_id, plugins_dir, profiles_dir,
           agent_id, domain_id, as_of, out) -> None:
    """Run the harm-reduction ablation and write the harm table CSV."""
    try:
        registry = _load_plugins(plugins_dir)
        if plugin_id not in registry:
            _fail(f"unknown plugin {plugin_id!r}")
            sys.exit(EXIT_CONFIG)
        records, _ = ingest_dataset(corpus, "canonical")
        agent = ReplayAgentBackend.from_file(replay)
    except (FileNotFound, ConfigParseError) as exc:
        _fail(str(exc))
        sys.exit(EXIT_CONFIG)
    except EmptyDataset as exc:
        _fail(str(exc))
        sys.exit(EXIT_EMPTY)
    profile_domain = domain_id or records[0].domain_id
    profile = ProfileStore(profiles_dir).load(agent_id, profile_domain)
    try:
        from .model import parse_ts

        rows = ablation_report(
            records, agent, registry[plugin_id], profile,
            now=parse_ts(as_of) if as_of else None,
        )
    except MissingLabels as exc:
        _fail(str(exc))
        sys.exit(EXIT_EMPTY)
    csv_text = ablation_csv(rows)
    Path(out).write_text(csv_text, encoding="utf-8")
    click.echo(csv_text, nl=False)
    click.echo(f"harm table written to {out}", err=True)


if __name__ == "__main__":
    main()
