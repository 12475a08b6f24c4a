import type { PendingItem, Violation } from "./types.js";

export interface QueueHandlers {
  onResolve: (pendingId: string, resolution: "approve" | "deny") => void;
}

function formatCountdown(msLeft: number): string {
  if (msLeft <= 0) return "expired";
  const totalSeconds = Math.floor(msLeft / 1000);
  const minutes = Math.floor(totalSeconds / 60);
  const seconds = totalSeconds % 60;
  return `${minutes}:${String(seconds).padStart(2, "0")}`;
}

function dimensionBar(doc: Document, dimension: string, score: number): HTMLElement {
  const row = doc.createElement("div");
  row.className = "dim-row";
  const label = doc.createElement("span");
  label.className = "dim-label";
  label.textContent = dimension;
  const track = doc.createElement("div");
  track.className = "dim-track";
  const fill = doc.createElement("div");
  fill.className = "dim-fill";
  fill.style.width = `${Math.round(score * 100)}%`;
  const value = doc.createElement("span");
  value.className = "dim-value";
  value.textContent = score.toFixed(2);
  track.appendChild(fill);
  row.append(label, track, value);
  return row;
}

function violationItem(doc: Document, v: Violation): HTMLElement {
  const li = doc.createElement("li");
  li.className = `violation severity-${v.severity}`;
  li.textContent = `${v.code}: ${v.message}`;
  return li;
}

/** Render the pending-confirmation queue into `container`. Countdowns are the
 * only client-derived numbers; every score comes straight from the service. */
export function renderPendingQueue(
  container: HTMLElement,
  items: PendingItem[],
  handlers: QueueHandlers,
  now: Date = new Date()
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  if (items.length === 0) {
    const empty = doc.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No actions awaiting confirmation.";
    container.appendChild(empty);
    return;
  }
  const list = doc.createElement("ul");
  list.className = "pending-list";
  for (const item of items) {
    const msLeft = Date.parse(item.expires_at) - now.getTime();
    const expired = item.state === "expired" || msLeft <= 0;

    const row = doc.createElement("li");
    row.className = expired ? "pending-item expired" : "pending-item";
    row.dataset.requestId = item.request_id;

    const header = doc.createElement("div");
    header.className = "pending-header";
    const title = doc.createElement("strong");
    title.textContent = item.request_id;
    const composite = doc.createElement("span");
    composite.className = "composite";
    composite.textContent = `composite ${item.trust_score.composite.toFixed(3)}`;
    const countdown = doc.createElement("span");
    countdown.className = "countdown";
    countdown.textContent = formatCountdown(msLeft);
    header.append(title, composite, countdown);

    const dims = doc.createElement("div");
    dims.className = "dimensions";
    for (const [dimension, score] of Object.entries(item.trust_score.vector.scores)) {
      dims.appendChild(dimensionBar(doc, dimension, score));
    }

    const violations = doc.createElement("ul");
    violations.className = "violations";
    for (const v of item.trust_score.vector.violations) {
      violations.appendChild(violationItem(doc, v));
    }

    const actions = doc.createElement("div");
    actions.className = "actions";
    for (const resolution of ["approve", "deny"] as const) {
      const button = doc.createElement("button");
      button.textContent = resolution;
      button.className = resolution;
      button.disabled = expired;
      button.addEventListener("click", () =>
        handlers.onResolve(item.request_id, resolution)
      );
      actions.appendChild(button);
    }

    row.append(header, dims, violations, actions);
    list.appendChild(row);
  }
  container.appendChild(list);
}

/** Surface a first-writer-wins conflict without disturbing the list. */
export function renderNotice(container: HTMLElement, message: string): void {
  const doc = container.ownerDocument;
  const notice = doc.createElement("p");
  notice.className = "notice";
  notice.textContent = message;
  container.prepend(notice);
}
