/** Wire types for the trustbench /v1 API. The console never computes trust
 * values itself; everything here is fetched as-is and rendered. */

export type DecisionValue = "proceed" | "warn" | "confirm" | "block";

export type SeverityValue = "hard" | "soft";

export type ResolvedByValue =
  | "automatic"
  | "human_approve"
  | "human_deny"
  | "timeout_deny";

export interface Violation {
  code: string;
  message: string;
  severity: SeverityValue;
  dimension: string;
}

export interface TrustVector {
  scores: Record<string, number>;
  violations: Violation[];
  dimensions_evaluated: string[];
}

export interface TrustScore {
  composite: number;
  decision: DecisionValue;
  calibrated_prior: number;
  runtime_aggregate: number;
  prior_weight: number;
  vector: TrustVector;
  latency_ms: number;
  plugin_id: string;
}

export interface PendingItem {
  request_id: string;
  trust_score: TrustScore;
  enqueued_at: string; // RFC 3339 UTC
  expires_at: string; // RFC 3339 UTC
  state: "pending" | "approved" | "denied" | "expired";
}

export interface DecisionLogEntry {
  request_id: string;
  trust_score: TrustScore;
  resolved_by: ResolvedByValue;
  resolved_at: string; // RFC 3339 UTC
}

export interface CalibrationCurve {
  breakpoints: [number, number][];
  metric_family: string;
  agent_id: string;
  domain_id: string;
  sample_count: number;
  fitted_at: string;
}

export interface CalibrationProfile {
  agent_id: string;
  domain_id: string;
  curves: Record<string, CalibrationCurve>;
  fallback_policy: "identity" | "conservative_floor";
}

export interface ProfileKey {
  agent_id: string;
  domain_id: string;
}

export interface PluginSummary {
  plugin_id: string;
  verify_dimensions: string[];
  citations_required: boolean;
  max_age_days: number;
}
