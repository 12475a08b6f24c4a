// @vitest-environment jsdom
import { beforeAll, describe, expect, it } from "vitest";

import { ApiClient, createSession } from "../src/api";
import { renderCalibrationChart } from "../src/chart";
import { filterEntries, renderDecisionLog } from "../src/log";
import { renderPendingQueue } from "../src/queue";
import { createPending, loadServiceState, type ServiceState } from "./helpers";

let state: ServiceState;
let client: ApiClient;

beforeAll(() => {
  state = loadServiceState();
  client = new ApiClient(createSession(state.baseUrl, state.token));
});

function mount(): HTMLElement {
  const el = document.createElement("div");
  document.body.appendChild(el);
  return el;
}

describe("console flow against the live service", () => {
  it("renders the seeded pending item, approve resolves it, log shows human_approve", async () => {
    const queue = mount();
    const resolutions: Array<Promise<unknown>> = [];
    const handlers = {
      onResolve: (id: string, resolution: "approve" | "deny") => {
        resolutions.push(client.resolve(id, resolution, "console-operator"));
      },
    };

    renderPendingQueue(queue, await client.listPending(), handlers);
    const row = queue.querySelector<HTMLElement>(
      `[data-request-id="${state.seedPendingId}"]`
    );
    expect(row).not.toBeNull();
    expect(row!.querySelector(".countdown")!.textContent).toMatch(/^\d+:\d{2}$/);
    expect(row!.querySelector(".composite")!.textContent).toMatch(/^composite 0\./);
    expect(row!.querySelectorAll(".dim-row").length).toBeGreaterThan(0);

    (row!.querySelector("button.approve") as HTMLButtonElement).click();
    await Promise.all(resolutions);

    renderPendingQueue(queue, await client.listPending(), handlers);
    expect(
      queue.querySelector(`[data-request-id="${state.seedPendingId}"]`)
    ).toBeNull();

    const log = mount();
    renderDecisionLog(log, await client.listDecisions());
    const logRow = log.querySelector<HTMLElement>(
      `tr[data-request-id="${state.seedPendingId}"]`
    );
    expect(logRow).not.toBeNull();
    expect(logRow!.textContent).toContain("human_approve");
  });

  it("surfaces a repeat resolution as already-resolved without breaking the list", async () => {
    const id = await createPending(state.baseUrl, `console-409-${Date.now()}`);
    expect((await client.resolve(id, "approve")).kind).toBe("resolved");
    expect((await client.resolve(id, "approve")).kind).toBe("already_resolved");
    const queue = mount();
    renderPendingQueue(queue, await client.listPending(), { onResolve: () => {} });
    expect(queue.querySelector(`[data-request-id="${id}"]`)).toBeNull();
  });

  it("disables actions on an expired item", async () => {
    const id = await createPending(state.baseUrl, `console-expiry-${Date.now()}`);
    const item = (await client.listPending()).find((p) => p.request_id === id)!;
    // render "as of" a time after expiry: the state rule is client-side
    const queue = mount();
    renderPendingQueue(
      queue,
      [item],
      { onResolve: () => {} },
      new Date(Date.parse(item.expires_at) + 1000)
    );
    const row = queue.querySelector<HTMLElement>(".pending-item")!;
    expect(row.classList.contains("expired")).toBe(true);
    expect(row.querySelector(".countdown")!.textContent).toBe("expired");
    for (const button of row.querySelectorAll("button")) {
      expect((button as HTMLButtonElement).disabled).toBe(true);
    }
  });

  it("charts a served curve's breakpoints over the identity diagonal", async () => {
    const profile = await client.getProfile("agent", "healthcare");
    const curve = profile!.curves["correctness"]!;
    const chart = mount();
    renderCalibrationChart(chart, curve);
    const polyline = chart.querySelector("polyline.calibration-curve")!;
    expect(polyline.getAttribute("points")!.split(" ")).toHaveLength(
      curve.breakpoints.length
    );
    const points = [...chart.querySelectorAll<SVGCircleElement>("circle.breakpoint")];
    expect(points.map((p) => [Number(p.dataset.x), Number(p.dataset.y)])).toEqual(
      curve.breakpoints
    );
    expect(chart.querySelector("line.identity-diagonal")).not.toBeNull();
  });

  it("shows an uncalibrated notice when the profile 404s", async () => {
    const profile = await client.getProfile("nobody", "healthcare");
    const chart = mount();
    renderCalibrationChart(
      chart,
      profile?.curves["correctness"] ?? null
    );
    expect(chart.querySelector("svg")).toBeNull();
    expect(chart.textContent).toContain("Uncalibrated agent");
  });

  it("filters the decision log by decision value", async () => {
    const entries = await client.listDecisions();
    expect(entries.length).toBeGreaterThan(0);
    const confirms = filterEntries(entries, { decision: "confirm" });
    expect(confirms.every((e) => e.trust_score.decision === "confirm")).toBe(true);
    const log = mount();
    renderDecisionLog(log, entries, { since: "2099-01-01T00:00:00Z" });
    expect(log.textContent).toContain("No decisions in the selected range.");
  });

  it("never renders the bearer token", async () => {
    expect(document.body.innerHTML).not.toContain(state.token);
  });
});
