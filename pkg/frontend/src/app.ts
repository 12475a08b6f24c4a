import { ApiClient, createSession, DEFAULT_POLL_INTERVAL_MS } from "./api.js";
import { renderCalibrationChart } from "./chart.js";
import { renderDecisionLog } from "./log.js";
import { renderNotice, renderPendingQueue } from "./queue.js";

interface Mounts {
  queue: HTMLElement;
  chart: HTMLElement;
  log: HTMLElement;
}

/** Wire the three views to a live session and start the 2 s polling loop.
 * Returns a stop function. All numbers shown are fetched, never computed. */
export function startConsole(client: ApiClient, mounts: Mounts): () => void {
  let stopped = false;

  async function refresh(): Promise<void> {
    const [pending, decisions] = await Promise.all([
      client.listPending(),
      client.listDecisions(),
    ]);
    if (stopped) return;
    renderPendingQueue(mounts.queue, pending, {
      onResolve: async (id, resolution) => {
        const outcome = await client.resolve(id, resolution);
        if (outcome.kind === "already_resolved") {
          renderNotice(mounts.queue, `${id} was already resolved by another operator.`);
        }
        await refresh();
      },
    });
    renderDecisionLog(mounts.log, decisions);
  }

  async function showCurve(agentId: string, domainId: string): Promise<void> {
    const profile = await client.getProfile(agentId, domainId);
    const curve = profile?.curves["correctness"] ?? Object.values(profile?.curves ?? {})[0] ?? null;
    renderCalibrationChart(mounts.chart, curve);
  }

  void refresh();
  const timer = setInterval(() => void refresh(), client.pollIntervalMs);

  void client.listProfiles().then((keys) => {
    const first = keys[0];
    if (first) void showCurve(first.agent_id, first.domain_id);
    else renderCalibrationChart(mounts.chart, null);
  });

  return () => {
    stopped = true;
    clearInterval(timer);
  };
}

/** Browser entry point: token entry screen, then the console. The token
 * lives only in the session closure; it is never rendered or logged. */
export function main(root: HTMLElement): void {
  const doc = root.ownerDocument;
  const form = doc.createElement("form");
  form.className = "session-form";
  form.innerHTML = `
    <label>Service URL <input name="baseUrl" value="${doc.location?.origin ?? ""}" /></label>
    <label>Token <input name="token" type="password" autocomplete="off" /></label>
    <button type="submit">Connect</button>
  `;
  root.appendChild(form);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const session = createSession(
      String(data.get("baseUrl") ?? ""),
      String(data.get("token") ?? ""),
      DEFAULT_POLL_INTERVAL_MS
    );
    form.remove();
    const queue = doc.createElement("section");
    queue.id = "queue";
    const chart = doc.createElement("section");
    chart.id = "chart";
    const log = doc.createElement("section");
    log.id = "log";
    root.append(queue, chart, log);
    startConsole(new ApiClient(session), { queue, chart, log });
  });
}
