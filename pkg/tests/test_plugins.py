import json

import pytest

from trustbench.errors import ConfigParseError, InvalidWeights, NoRuntimeDimensions
from trustbench.gating import GatingThresholds, RuntimeWeights
from trustbench.model import Dimension
from trustbench.plugins import load_plugin, load_plugin_dir, plugin_from_dict

from conftest import PLUGINS_DIR


def minimal_doc(**overrides):
    doc = {
        "plugin_id": "test",
        "verify_dimensions": ["safety"],
        "evidence_policy": {"citations_required": False},
        "deny_patterns": [],
    }
    doc.update(overrides)
    return doc


def test_builtin_plugins_load_distinct(plugins):
    assert set(plugins) == {"healthcare", "finance", "general"}


def test_healthcare_builtin_policy(plugins):
    hc = plugins["healthcare"]
    assert hc.evidence_policy.citations_required is True
    assert hc.evidence_policy.max_age_days == 1825
    assert any("pubmed" in k for k in hc.evidence_policy.whitelist)
    assert "who.int" in hc.evidence_policy.whitelist
    assert hc.threshold_overrides == {"confirm_below": 0.7}


def test_finance_builtin_policy(plugins):
    fin = plugins["finance"]
    assert "sec.gov" in fin.evidence_policy.whitelist
    assert fin.evidence_policy.max_age_days == 365
    assert any(p.code == "TRANSFER_ALL" for p in fin.deny_patterns.patterns)


def test_general_builtin_policy(plugins):
    gen = plugins["general"]
    assert gen.evidence_policy.citations_required is False
    assert gen.verify_dimensions == frozenset({Dimension.SAFETY})


def test_negative_weight_rejected():
    with pytest.raises(InvalidWeights):
        plugin_from_dict(minimal_doc(runtime_weights={"safety": -1}))


def test_bad_pattern_rejected():
    with pytest.raises(ConfigParseError):
        plugin_from_dict(
            minimal_doc(deny_patterns=[{"pattern": "([", "severity": "hard", "code": "X"}])
        )


def test_no_verify_dimensions_rejected():
    with pytest.raises(NoRuntimeDimensions):
        plugin_from_dict(minimal_doc(verify_dimensions=[]))


def test_non_verify_path_dimension_rejected():
    with pytest.raises(ConfigParseError):
        plugin_from_dict(minimal_doc(verify_dimensions=["calibration"]))


def test_missing_file_is_config_error(tmp_path):
    with pytest.raises(ConfigParseError):
        load_plugin(tmp_path / "nope.json")


def test_bad_json_is_config_error(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ConfigParseError):
        load_plugin(p)


def test_duplicate_plugin_ids_rejected(tmp_path):
    for name in ("a.json", "b.json"):
        (tmp_path / name).write_text(json.dumps(minimal_doc()))
    with pytest.raises(ConfigParseError):
        load_plugin_dir(tmp_path)


def test_resolve_gating_no_overrides_is_identity():
    plugin = plugin_from_dict(minimal_doc())
    defaults = (GatingThresholds(), RuntimeWeights(), 0.3)
    resolved = plugin.resolve_gating(*defaults)
    assert resolved == defaults


def test_resolve_gating_field_wise_merge():
    plugin = plugin_from_dict(minimal_doc(threshold_overrides={"confirm_below": 0.7}))
    thresholds, _, _ = plugin.resolve_gating(GatingThresholds(), RuntimeWeights(), 0.3)
    assert thresholds.confirm_below == 0.7
    assert thresholds.block_below == 0.40
    assert thresholds.warn_below == 0.80


def test_resolve_gating_prior_weight_override():
    plugin = plugin_from_dict(minimal_doc(prior_weight_override=0.2))
    _, _, pw = plugin.resolve_gating(GatingThresholds(), RuntimeWeights(), 0.3)
    assert pw == 0.2


def test_resolve_gating_idempotent():
    plugin = plugin_from_dict(
        minimal_doc(threshold_overrides={"confirm_below": 0.7}, prior_weight_override=0.2)
    )
    once = plugin.resolve_gating(GatingThresholds(), RuntimeWeights(), 0.3)
    twice = plugin.resolve_gating(once[0], once[1], once[2])
    assert twice == once


def test_plugin_round_trip(plugins):
    hc = plugins["healthcare"]
    again = plugin_from_dict(hc.to_dict())
    assert again == hc
