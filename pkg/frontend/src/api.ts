import type {
  CalibrationProfile,
  DecisionLogEntry,
  PendingItem,
  PluginSummary,
  ProfileKey,
} from "./types.js";

export const DEFAULT_POLL_INTERVAL_MS = 2_000;

export interface ConsoleSession {
  baseUrl: string;
  token: string;
  pollIntervalMs: number;
}

export function createSession(
  baseUrl: string,
  token: string,
  pollIntervalMs: number = DEFAULT_POLL_INTERVAL_MS
): ConsoleSession {
  return { baseUrl: baseUrl.replace(/\/$/, ""), token, pollIntervalMs };
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string
  ) {
    // the message is surfaced in the UI; never include the token in it
    super(message);
    this.name = "ApiError";
  }
}

export type ResolveOutcome =
  | { kind: "resolved"; entry: DecisionLogEntry }
  | { kind: "already_resolved" }
  | { kind: "not_found" };

async function getJson<T>(session: ConsoleSession, path: string): Promise<T> {
  const resp = await fetch(`${session.baseUrl}${path}`);
  if (!resp.ok) {
    throw new ApiError(resp.status, `GET ${path} failed with ${resp.status}`);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  constructor(private readonly session: ConsoleSession) {}

  get pollIntervalMs(): number {
    return this.session.pollIntervalMs;
  }

  async listPending(): Promise<PendingItem[]> {
    const body = await getJson<{ pending: PendingItem[] }>(
      this.session,
      "/v1/pending"
    );
    return body.pending;
  }

  /** Resolve a pending confirmation. First-writer-wins on the service side:
   * a concurrent or repeated resolution comes back as `already_resolved`. */
  async resolve(
    pendingId: string,
    resolution: "approve" | "deny",
    resolver = ""
  ): Promise<ResolveOutcome> {
    const resp = await fetch(
      `${this.session.baseUrl}/v1/pending/${encodeURIComponent(pendingId)}/resolve`,
      {
        method: "POST",
        headers: {
          "Content-Type": "application/json",
          Authorization: `Bearer ${this.session.token}`,
        },
        body: JSON.stringify({ resolution, resolver }),
      }
    );
    if (resp.status === 409) return { kind: "already_resolved" };
    if (resp.status === 404) return { kind: "not_found" };
    if (!resp.ok) {
      throw new ApiError(resp.status, `resolve failed with ${resp.status}`);
    }
    const body = (await resp.json()) as { entry: DecisionLogEntry };
    return { kind: "resolved", entry: body.entry };
  }

  async listProfiles(): Promise<ProfileKey[]> {
    const body = await getJson<{ profiles: ProfileKey[] }>(
      this.session,
      "/v1/profiles"
    );
    return body.profiles;
  }

  /** Returns null for an uncalibrated (agent, domain) pair. */
  async getProfile(
    agentId: string,
    domainId: string
  ): Promise<CalibrationProfile | null> {
    const resp = await fetch(
      `${this.session.baseUrl}/v1/profiles/${encodeURIComponent(agentId)}/${encodeURIComponent(domainId)}`
    );
    if (resp.status === 404) return null;
    if (!resp.ok) {
      throw new ApiError(resp.status, `profile fetch failed with ${resp.status}`);
    }
    return (await resp.json()) as CalibrationProfile;
  }

  async listDecisions(since?: string): Promise<DecisionLogEntry[]> {
    const query = since ? `?since=${encodeURIComponent(since)}` : "";
    const body = await getJson<{ decisions: DecisionLogEntry[] }>(
      this.session,
      `/v1/decisions${query}`
    );
    return body.decisions;
  }

  async listPlugins(): Promise<PluginSummary[]> {
    const body = await getJson<{ plugins: PluginSummary[] }>(
      this.session,
      "/v1/plugins"
    );
    return body.plugins;
  }
}
