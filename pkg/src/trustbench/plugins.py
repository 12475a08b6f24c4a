"""Declarative domain plugins: evidence policy, deny patterns, weights,
threshold overrides. Plugins are config documents, never loadable code;
all validation happens at load time so the verify path never fails on
plugin data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

from .errors import ConfigParseError, InvalidWeights, NoRuntimeDimensions
from .gating import GatingThresholds, RuntimeWeights
from .metrics import DenyPattern, DenyPatternSet, EvidencePolicy, ResolveMode
from .model import VERIFY_PATH_DIMENSIONS, Dimension, Severity


@dataclass(frozen=True)
class DomainPlugin:
    plugin_id: str
    bench_dimensions: frozenset[Dimension]
    verify_dimensions: frozenset[Dimension]
    evidence_policy: EvidencePolicy
    deny_patterns: DenyPatternSet = field(default_factory=DenyPatternSet)
    runtime_weights: Optional[RuntimeWeights] = None
    threshold_overrides: Optional[dict[str, float]] = None
    prior_weight_override: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.plugin_id:
            raise ConfigParseError("plugin_id must be nonempty")
        if not self.verify_dimensions:
            raise NoRuntimeDimensions(
                f"plugin {self.plugin_id!r} declares no verify-path dimensions"
            )
        illegal = self.verify_dimensions - VERIFY_PATH_DIMENSIONS
        if illegal:
            raise ConfigParseError(
                f"plugin {self.plugin_id!r} lists non-verify-path dimensions: "
                f"{sorted(d.value for d in illegal)}"
            )
        if self.prior_weight_override is not None and not (
            0.0 <= self.prior_weight_override <= 1.0
        ):
            raise InvalidWeights("prior_weight_override must be in [0,1]")

    def resolve_gating(
        self,
        default_thresholds: GatingThresholds,
        default_weights: RuntimeWeights,
        default_prior_weight: float,
    ) -> tuple[GatingThresholds, RuntimeWeights, float]:
        """Field-wise merge: plugin overrides win over engine defaults."""
        thresholds = default_thresholds
        if self.threshold_overrides:
            merged = {
                "block_below": default_thresholds.block_below,
                "confirm_below": default_thresholds.confirm_below,
                "warn_below": default_thresholds.warn_below,
            }
            merged.update(self.threshold_overrides)
            thresholds = GatingThresholds(**merged)
        weights = self.runtime_weights or default_weights
        prior_weight = (
            self.prior_weight_override
            if self.prior_weight_override is not None
            else default_prior_weight
        )
        return thresholds, weights, prior_weight

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "plugin_id": self.plugin_id,
            "bench_dimensions": sorted(d.value for d in self.bench_dimensions),
            "verify_dimensions": sorted(d.value for d in self.verify_dimensions),
            "evidence_policy": {
                "whitelist": dict(self.evidence_policy.whitelist),
                "citations_required": self.evidence_policy.citations_required,
                "max_age_days": self.evidence_policy.max_age_days,
                "resolve_mode": self.evidence_policy.resolve_mode.value,
            },
            "deny_patterns": [
                {"pattern": p.pattern, "severity": p.severity.value, "code": p.code}
                for p in self.deny_patterns.patterns
            ],
        }
        if self.runtime_weights is not None:
            out["runtime_weights"] = {
                d.value: w for d, w in self.runtime_weights.weights.items()
            }
        if self.threshold_overrides:
            out["threshold_overrides"] = dict(self.threshold_overrides)
        if self.prior_weight_override is not None:
            out["prior_weight_override"] = self.prior_weight_override
        return out


def plugin_from_dict(doc: Mapping[str, Any]) -> DomainPlugin:
    try:
        policy_doc = doc.get("evidence_policy") or {}
        policy = EvidencePolicy(
            whitelist={
                str(k): float(v)
                for k, v in (policy_doc.get("whitelist") or {}).items()
            },
            citations_required=bool(policy_doc.get("citations_required", False)),
            max_age_days=int(policy_doc.get("max_age_days", 365)),
            resolve_mode=ResolveMode(
                policy_doc.get("resolve_mode", ResolveMode.OFFLINE_WHITELIST.value)
            ),
        )
        deny = DenyPatternSet(
            patterns=tuple(
                DenyPattern(
                    pattern=str(p["pattern"]),
                    severity=Severity(p.get("severity", "soft")),
                    code=str(p.get("code", "DENY")),
                )
                for p in doc.get("deny_patterns") or []
            )
        )
        weights_doc = doc.get("runtime_weights")
        weights = (
            RuntimeWeights(
                weights={Dimension(k): float(v) for k, v in weights_doc.items()}
            )
            if weights_doc
            else None
        )
        overrides = doc.get("threshold_overrides")
        return DomainPlugin(
            plugin_id=str(doc["plugin_id"]),
            bench_dimensions=frozenset(
                Dimension(d) for d in doc.get("bench_dimensions") or []
            ),
            verify_dimensions=frozenset(
                Dimension(d) for d in doc.get("verify_dimensions") or []
            ),
            evidence_policy=policy,
            deny_patterns=deny,
            runtime_weights=weights,
            threshold_overrides=(
                {str(k): float(v) for k, v in overrides.items()} if overrides else None
            ),
            prior_weight_override=(
                float(doc["prior_weight_override"])
                if doc.get("prior_weight_override") is not None
                else None
            ),
        )
    except ConfigParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigParseError(f"invalid plugin config: {exc}") from exc


def load_plugin(path: str | Path) -> DomainPlugin:
    """Load and validate one plugin config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigParseError(f"plugin config not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"plugin config {path} is not valid JSON: {exc}") from exc
    return plugin_from_dict(doc)


def load_plugin_dir(directory: str | Path) -> dict[str, DomainPlugin]:
    """Load every ``*.json`` plugin in a directory, keyed by plugin_id."""
    directory = Path(directory)
    registry: dict[str, DomainPlugin] = {}
    for path in sorted(directory.glob("*.json")):
        plugin = load_plugin(path)
        if plugin.plugin_id in registry:
            raise ConfigParseError(f"duplicate plugin_id {plugin.plugin_id!r}")
        registry[plugin.plugin_id] = plugin
    return registry
