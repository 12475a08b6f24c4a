import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

export interface ServiceState {
  baseUrl: string;
  token: string;
  seedPendingId: string;
}

export function loadServiceState(): ServiceState {
  const here = dirname(fileURLToPath(import.meta.url));
  return JSON.parse(readFileSync(join(here, ".service.json"), "utf-8"));
}

/** A request that lands in the healthcare plugin's confirm band: low stated
 * confidence (calibrated prior 0.2) plus an undated whitelisted citation. */
export function confirmRequestBody(requestId: string) {
  return {
    request_id: requestId,
    agent_id: "agent",
    domain_id: "healthcare",
    task_context: "medication question",
    proposed_action: "Take ibuprofen as directed.",
    action_kind: "answer",
    stated_confidence: 0.2,
    citations: [{ source: "https://pubmed.ncbi.nlm.nih.gov/1/" }],
  };
}

/** Seed a fresh pending confirmation through the public API and return its id. */
export async function createPending(baseUrl: string, requestId: string): Promise<string> {
  const resp = await fetch(`${baseUrl}/v1/verify`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(confirmRequestBody(requestId)),
  });
  if (resp.status !== 202) {
    throw new Error(`expected 202 confirm, got ${resp.status}`);
  }
  const body = await resp.json();
  return body.pending_id as string;
}
