import type { CalibrationCurve } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const SIZE = 320;
const PAD = 24;

function toPx(v: number): number {
  return PAD + v * (SIZE - 2 * PAD);
}

function toPy(v: number): number {
  // SVG y grows downward; calibration charts grow upward
  return SIZE - PAD - v * (SIZE - 2 * PAD);
}

/** Render one calibration curve as a monotone polyline over the identity
 * diagonal (stated confidence on x, calibrated estimate on y). Pass `null`
 * when the service returned 404 for the (agent, domain) pair. */
export function renderCalibrationChart(
  container: HTMLElement,
  curve: CalibrationCurve | null
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  if (curve === null) {
    const notice = doc.createElement("p");
    notice.className = "uncalibrated-notice";
    notice.textContent = "Uncalibrated agent: no profile served for this pair.";
    container.appendChild(notice);
    return;
  }

  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", String(SIZE));
  svg.setAttribute("height", String(SIZE));
  svg.setAttribute("viewBox", `0 0 ${SIZE} ${SIZE}`);
  svg.setAttribute("role", "img");
  svg.setAttribute(
    "aria-label",
    `${curve.metric_family} calibration for ${curve.agent_id}/${curve.domain_id}`
  );

  const diagonal = doc.createElementNS(SVG_NS, "line");
  diagonal.setAttribute("class", "identity-diagonal");
  diagonal.setAttribute("x1", String(toPx(0)));
  diagonal.setAttribute("y1", String(toPy(0)));
  diagonal.setAttribute("x2", String(toPx(1)));
  diagonal.setAttribute("y2", String(toPy(1)));
  diagonal.setAttribute("stroke", "#999");
  diagonal.setAttribute("stroke-dasharray", "4 4");
  svg.appendChild(diagonal);

  const polyline = doc.createElementNS(SVG_NS, "polyline");
  polyline.setAttribute("class", "calibration-curve");
  polyline.setAttribute(
    "points",
    curve.breakpoints.map(([x, y]) => `${toPx(x)},${toPy(y)}`).join(" ")
  );
  polyline.setAttribute("fill", "none");
  polyline.setAttribute("stroke", "#1f77b4");
  polyline.setAttribute("stroke-width", "2");
  svg.appendChild(polyline);

  for (const [x, y] of curve.breakpoints) {
    const point = doc.createElementNS(SVG_NS, "circle");
    point.setAttribute("class", "breakpoint");
    point.setAttribute("cx", String(toPx(x)));
    point.setAttribute("cy", String(toPy(y)));
    point.setAttribute("r", "3");
    point.dataset.x = String(x);
    point.dataset.y = String(y);
    svg.appendChild(point);
  }

  const caption = doc.createElement("p");
  caption.className = "chart-caption";
  caption.textContent =
    `${curve.metric_family} · ${curve.sample_count} samples · fitted ${curve.fitted_at}`;

  container.append(svg, caption);
}
