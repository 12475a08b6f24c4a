"""Confidence-to-quality calibration: isotonic fitting, curve application, ECE.

Curves are fit per (agent, domain, metric family) from benchmark results and
applied at runtime to turn stated confidence into a calibrated prior.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import EmptyInput
from .model import (
    CalibrationCurve,
    CalibrationProfile,
    FallbackPolicy,
    utcnow,
)

#: Families with fewer samples than this are dropped from a profile and
#: resolved through the fallback policy instead.
DEFAULT_MIN_SAMPLES = 10

DEFAULT_ECE_BINS = 10


@dataclass(frozen=True)
class CalibrationPair:
    confidence: float
    observed: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.confidence <= 1.0 and 0.0 <= self.observed <= 1.0):
            raise ValueError("calibration pair components must be in [0,1]")


def _merge_ties(
    xs: np.ndarray, ys: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Collapse duplicate x values to one weighted point (weight = tie count)."""
    order = np.argsort(xs, kind="stable")
    xs, ys = xs[order], ys[order]
    ux, inverse, counts = np.unique(xs, return_inverse=True, return_counts=True)
    sums = np.zeros_like(ux)
    np.add.at(sums, inverse, ys)
    return ux, sums / counts, counts.astype(float)


def _pava(y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Pool-adjacent-violators on a weighted sequence; returns fitted values."""
    n = len(y)
    # block representation: value, weight, size
    vals: list[float] = []
    wts: list[float] = []
    sizes: list[int] = []
    for i in range(n):
        vals.append(float(y[i]))
        wts.append(float(w[i]))
        sizes.append(1)
        while len(vals) > 1 and vals[-2] > vals[-1]:
            v2, w2, s2 = vals.pop(), wts.pop(), sizes.pop()
            v1, w1, s1 = vals.pop(), wts.pop(), sizes.pop()
            wt = w1 + w2
            vals.append((v1 * w1 + v2 * w2) / wt)
            wts.append(wt)
            sizes.append(s1 + s2)
    fitted = np.empty(n)
    pos = 0
    for v, s in zip(vals, sizes):
        fitted[pos : pos + s] = v
        pos += s
    return fitted


def fit_isotonic(
    pairs: Sequence[CalibrationPair],
    *,
    metric_family: str = "correctness",
    agent_id: str = "",
    domain_id: str = "",
) -> CalibrationCurve:
    """Least-squares nondecreasing fit of observed quality against confidence.

    Ties on confidence are merged to a single weighted point first; adjacent
    monotonicity violations are then pooled into weighted-mean blocks.
    Breakpoints are (mean x of block members, block mean y).
    """
    if not pairs:
        raise EmptyInput("fit_isotonic needs at least one pair")
    xs = np.array([p.confidence for p in pairs], dtype=float)
    ys = np.array([p.observed for p in pairs], dtype=float)
    ux, uy, uw = _merge_ties(xs, ys)
    fitted = _pava(uy, uw)

    breakpoints: list[tuple[float, float]] = []
    i = 0
    while i < len(fitted):
        j = i
        while j + 1 < len(fitted) and fitted[j + 1] == fitted[i]:
            j += 1
        block_x = float(np.average(ux[i : j + 1], weights=uw[i : j + 1]))
        breakpoints.append((block_x, float(fitted[i])))
        i = j + 1
    return CalibrationCurve(
        breakpoints=tuple(breakpoints),
        metric_family=metric_family,
        agent_id=agent_id,
        domain_id=domain_id,
        sample_count=len(pairs),
        fitted_at=utcnow(),
    )


def isotonic_fitted_values(pairs: Sequence[CalibrationPair]) -> np.ndarray:
    """Fitted values at each merged x, in x order. Exposed for oracle tests."""
    if not pairs:
        raise EmptyInput("needs at least one pair")
    xs = np.array([p.confidence for p in pairs], dtype=float)
    ys = np.array([p.observed for p in pairs], dtype=float)
    _, uy, uw = _merge_ties(xs, ys)
    return _pava(uy, uw)


def apply_calibration(curve: CalibrationCurve, confidence: float) -> float:
    """Piecewise-linear interpolation over breakpoints, clamped at both ends."""
    bps = curve.breakpoints
    xs = [x for x, _ in bps]
    ys = [y for _, y in bps]
    if confidence <= xs[0]:
        return ys[0]
    if confidence >= xs[-1]:
        return ys[-1]
    j = bisect.bisect_right(xs, confidence) - 1
    x0, x1 = xs[j], xs[j + 1]
    y0, y1 = ys[j], ys[j + 1]
    t = (confidence - x0) / (x1 - x0)
    return y0 + t * (y1 - y0)


def expected_calibration_error(
    pairs: Sequence[CalibrationPair], n_bins: int = DEFAULT_ECE_BINS
) -> float:
    """Equal-width binned ECE over [0,1] by confidence.

    Bins are right-closed; the first bin additionally includes 0. Returns
    sum over nonempty bins of (|b|/N) * |mean_conf(b) - mean_obs(b)|.
    """
    if not pairs:
        raise EmptyInput("expected_calibration_error needs at least one pair")
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    conf = np.array([p.confidence for p in pairs], dtype=float)
    obs = np.array([p.observed for p in pairs], dtype=float)
    idx = np.ceil(conf * n_bins).astype(int) - 1
    idx = np.clip(idx, 0, n_bins - 1)
    n = len(pairs)
    ece = 0.0
    for b in range(n_bins):
        mask = idx == b
        count = int(mask.sum())
        if count == 0:
            continue
        ece += (count / n) * abs(conf[mask].mean() - obs[mask].mean())
    return float(ece)


def calibration_dimension_score(
    pairs: Sequence[CalibrationPair], n_bins: int = DEFAULT_ECE_BINS
) -> float:
    """The calibration trust dimension: 1 - ECE."""
    return 1.0 - expected_calibration_error(pairs, n_bins)


def fit_profile(
    pairs_by_family: Mapping[str, Sequence[CalibrationPair]],
    agent_id: str,
    domain_id: str,
    *,
    min_samples: int = DEFAULT_MIN_SAMPLES,
    fallback_policy: FallbackPolicy = FallbackPolicy.CONSERVATIVE_FLOOR,
) -> CalibrationProfile:
    """Fit one isotonic curve per metric family with enough samples."""
    if not pairs_by_family:
        raise EmptyInput("fit_profile needs at least one metric family")
    curves = {}
    for family, pairs in pairs_by_family.items():
        if len(pairs) < min_samples:
            continue
        curves[family] = fit_isotonic(
            pairs, metric_family=family, agent_id=agent_id, domain_id=domain_id
        )
    return CalibrationProfile(
        agent_id=agent_id,
        domain_id=domain_id,
        curves=curves,
        fallback_policy=fallback_policy,
    )


def fallback_prior(confidence: float, policy: FallbackPolicy) -> float:
    """Prior used when no curve exists for the requested family."""
    if policy is FallbackPolicy.IDENTITY:
        return confidence
    return min(confidence, 0.5)


# ---------------------------------------------------------------------------
# profile store: one JSON document per (agent, domain)

class ProfileStore:
    """File-backed store of calibration profiles.

    Layout: ``<root>/<agent_id>/<domain_id>.json``. Writes are atomic
    (write-then-rename) so readers never observe a partial profile.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def path_for(self, agent_id: str, domain_id: str) -> Path:
        return self.root / agent_id / f"{domain_id}.json"

    def save(self, profile: CalibrationProfile) -> Path:
        import json

        path = self.path_for(profile.agent_id, profile.domain_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(
            json.dumps(profile.to_dict(), indent=2, sort_keys=True), encoding="utf-8"
        )
        tmp.replace(path)
        return path

    def load(self, agent_id: str, domain_id: str) -> Optional[CalibrationProfile]:
        import json

        path = self.path_for(agent_id, domain_id)
        if not path.exists():
            return None
        return CalibrationProfile.from_dict(
            json.loads(path.read_text(encoding="utf-8"))
        )

    def list_keys(self) -> list[tuple[str, str]]:
        keys = []
        if self.root.exists():
            for agent_dir in sorted(self.root.iterdir()):
                if not agent_dir.is_dir():
                    continue
                for f in sorted(agent_dir.glob("*.json")):
                    keys.append((agent_dir.name, f.stem))
        return keys
