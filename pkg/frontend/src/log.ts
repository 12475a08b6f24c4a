import type { DecisionLogEntry, DecisionValue, ResolvedByValue } from "./types.js";

export interface LogFilters {
  decision?: DecisionValue;
  resolvedBy?: ResolvedByValue;
  /** RFC 3339 cutoff; entries at or before it are hidden. */
  since?: string;
}

/** Display-only filtering: the entries themselves always come verbatim from
 * GET /v1/decisions. */
export function filterEntries(
  entries: DecisionLogEntry[],
  filters: LogFilters
): DecisionLogEntry[] {
  const cutoff = filters.since ? Date.parse(filters.since) : null;
  return entries.filter((e) => {
    if (filters.decision && e.trust_score.decision !== filters.decision) return false;
    if (filters.resolvedBy && e.resolved_by !== filters.resolvedBy) return false;
    if (cutoff !== null && Date.parse(e.resolved_at) <= cutoff) return false;
    return true;
  });
}

export function renderDecisionLog(
  container: HTMLElement,
  entries: DecisionLogEntry[],
  filters: LogFilters = {}
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  const visible = filterEntries(entries, filters);
  if (visible.length === 0) {
    const empty = doc.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No decisions in the selected range.";
    container.appendChild(empty);
    return;
  }
  const table = doc.createElement("table");
  table.className = "decision-log";
  const head = doc.createElement("tr");
  for (const column of ["request", "decision", "composite", "resolved by", "resolved at"]) {
    const th = doc.createElement("th");
    th.textContent = column;
    head.appendChild(th);
  }
  table.appendChild(head);

  for (const entry of visible) {
    const row = doc.createElement("tr");
    row.className = `decision-${entry.trust_score.decision}`;
    row.dataset.requestId = entry.request_id;
    const cells = [
      entry.request_id,
      entry.trust_score.decision,
      entry.trust_score.composite.toFixed(3),
      entry.resolved_by,
      entry.resolved_at,
    ];
    for (const text of cells) {
      const td = doc.createElement("td");
      td.textContent = text;
      row.appendChild(td);
    }
    table.appendChild(row);

    // expandable detail row: the full trust score, every dimension included
    const detailRow = doc.createElement("tr");
    detailRow.className = "detail-row";
    const detailCell = doc.createElement("td");
    detailCell.colSpan = cells.length;
    const details = doc.createElement("details");
    const summary = doc.createElement("summary");
    summary.textContent = "trust score";
    const body = doc.createElement("pre");
    body.textContent = JSON.stringify(entry.trust_score, null, 2);
    details.append(summary, body);
    detailCell.appendChild(details);
    detailRow.appendChild(detailCell);
    table.appendChild(detailRow);
  }
  container.appendChild(table);
}
