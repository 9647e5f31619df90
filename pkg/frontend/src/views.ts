/** Pure view renderers: each takes immutable state and returns a detached
 * DOM element. No network, no globals — identical input, identical DOM.
 */
import type {
  ClassifyResponse,
  HashtagResponse,
  MaskResponse,
  NerResponse,
} from "./api.js";

function el(
  tag: string,
  className?: string,
  text?: string,
): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

const PCT = (p: number) => `${(100 * p).toFixed(1)}%`;

/** Code-point-safe slice matching the service's character offsets
 * (JavaScript string indices are UTF-16 units; offsets are not). */
export function sliceByCodePoints(
  text: string,
  start: number,
  end: number,
): string {
  return Array.from(text).slice(start, end).join("");
}

// ---------------------------------------------------------------------------
// classification: horizontal confidence bars, one per label

export function renderClassificationBars(res: ClassifyResponse): HTMLElement {
  const root = el("div", "view view-classify");
  const entries = Object.entries(res.distribution).sort(
    (a, b) => b[1] - a[1] || a[0].localeCompare(b[0]),
  );
  for (const [label, prob] of entries) {
    const row = el("div", "bar-row");
    row.dataset.label = label;
    row.dataset.probability = String(prob);
    if (label === res.label) row.classList.add("predicted");
    row.appendChild(el("span", "bar-label", label));
    const track = el("div", "bar-track");
    const fill = el("div", "bar-fill");
    fill.style.width = PCT(prob);
    track.appendChild(fill);
    row.appendChild(track);
    row.appendChild(el("span", "bar-value", PCT(prob)));
    root.appendChild(row);
  }
  if (res.labels) {
    const multi = el("div", "multi-labels", res.labels.join(", "));
    root.appendChild(multi);
  }
  return root;
}

// ---------------------------------------------------------------------------
// hashtag analysis: grouped bars per time bucket

export function renderHashtagChart(res: HashtagResponse): HTMLElement {
  const root = el("div", "view view-hashtag");
  const labels = Array.from(
    new Set(res.buckets.flatMap((b) => Object.keys(b.counts))),
  ).sort();
  const peak = Math.max(1, ...res.buckets.map((b) => b.total));
  for (const bucket of res.buckets) {
    const group = el("div", "bucket-group");
    group.dataset.start = bucket.start;
    group.dataset.total = String(bucket.total);
    group.appendChild(el("span", "bucket-start", bucket.start));
    const bars = el("div", "bucket-bars");
    for (const label of labels) {
      const count = bucket.counts[label] ?? 0;
      const bar = el("div", `bucket-bar label-${label}`);
      bar.dataset.label = label;
      bar.dataset.count = String(count);
      bar.style.height = `${(100 * count) / peak}%`;
      bar.title = `${label}: ${count}`;
      bars.appendChild(bar);
    }
    group.appendChild(bars);
    root.appendChild(group);
  }
  const footer = el(
    "div",
    "hashtag-footer",
    `${res.tweets_analyzed} tweets analyzed`,
  );
  root.appendChild(footer);
  if (res.capped) {
    root.appendChild(
      el("div", "cap-notice", "Result capped at the requested maximum."),
    );
  }
  return root;
}

// ---------------------------------------------------------------------------
// mask filling: ranked candidate list per mask

export function renderMaskView(res: MaskResponse): HTMLElement {
  const root = el("div", "view view-mask");
  for (const mask of res.masks) {
    const section = el("div", "mask-section");
    section.dataset.maskIndex = String(mask.mask_index);
    const list = el("ol", "mask-candidates");
    for (const cand of mask.candidates) {
      const item = el("li", "mask-candidate");
      item.dataset.token = cand.token;
      item.appendChild(el("button", "mask-token", cand.token));
      item.appendChild(el("span", "mask-prob", PCT(cand.probability)));
      list.appendChild(item);
    }
    section.appendChild(list);
    root.appendChild(section);
  }
  return root;
}

// ---------------------------------------------------------------------------
// similarity: 0-100 gauge

export function renderSimilarityGauge(score: number): HTMLElement {
  const root = el("div", "view view-similarity");
  const gauge = el("div", "gauge-track");
  const fill = el("div", "gauge-fill");
  fill.style.width = `${score}%`;
  gauge.appendChild(fill);
  root.appendChild(gauge);
  const value = el("span", "gauge-value", score.toFixed(1));
  root.appendChild(value);
  root.dataset.score = String(score);
  return root;
}

// ---------------------------------------------------------------------------
// ner: inline highlighting with type badges

export function renderNerView(text: string, res: NerResponse): HTMLElement {
  const root = el("div", "view view-ner");
  const spans = [...res.entities].sort((a, b) => a.start - b.start);
  let cursor = 0;
  for (const entity of spans) {
    if (entity.start > cursor) {
      root.appendChild(
        document.createTextNode(sliceByCodePoints(text, cursor, entity.start)),
      );
    }
    const mark = el("mark", `entity entity-${entity.type}`);
    mark.dataset.type = entity.type;
    mark.dataset.confidence = String(entity.confidence);
    mark.appendChild(
      document.createTextNode(sliceByCodePoints(text, entity.start, entity.end)),
    );
    mark.appendChild(el("span", "entity-badge", entity.type));
    root.appendChild(mark);
    cursor = entity.end;
  }
  const tail = sliceByCodePoints(text, cursor, Array.from(text).length);
  if (tail) root.appendChild(document.createTextNode(tail));
  return root;
}

export function renderError(code: string, message: string): HTMLElement {
  const root = el("div", "view view-error");
  root.dataset.code = code;
  root.appendChild(el("strong", "error-code", code));
  root.appendChild(el("span", "error-message", message));
  return root;
}
