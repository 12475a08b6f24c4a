"""trustbench: dual-mode trust engine for agentic AI.

Benchmarking mode learns confidence-to-quality calibration from scored
agent outputs; runtime verification mode gates proposed actions with
calibrated priors plus ground-truth-free checks.
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    ActionKind,
    ActionRequest,
    BenchRecord,
    CalibrationCurve,
    CalibrationProfile,
    Citation,
    Decision,
    DecisionLogEntry,
    Dimension,
    Severity,
    TrustScore,
    TrustVector,
    Violation,
    ViolationCode,
    validate_request,
)
from .calibration import (  # noqa: F401
    CalibrationPair,
    apply_calibration,
    expected_calibration_error,
    fit_isotonic,
    fit_profile,
)
from .gating import (  # noqa: F401
    GatingThresholds,
    RuntimeWeights,
    aggregate_runtime,
    calibrated_prior,
    composite_score,
    gate,
    verify,
)
from .plugins import DomainPlugin, load_plugin, load_plugin_dir  # noqa: F401
