/** Wires the five views to the service client. Kept thin: all rendering
 * lives in views.ts as pure functions, all transport in api.ts.
 */
import { ApiClient, ApiError, ViewController } from "./api.js";
import {
  renderClassificationBars,
  renderError,
  renderHashtagChart,
  renderMaskView,
  renderNerView,
  renderSimilarityGauge,
} from "./views.js";

function mount(target: HTMLElement, node: HTMLElement): void {
  target.replaceChildren(node);
}

function errorNode(err: unknown): HTMLElement {
  if (err instanceof ApiError) return renderError(err.code, err.message);
  return renderError("network_error", String(err));
}

export function bootstrap(root: Document, baseUrl: string): void {
  const api = new ApiClient(baseUrl);
  const out = (id: string) => root.getElementById(id) as HTMLElement;
  const input = (id: string) => root.getElementById(id) as HTMLInputElement;

  const classify = new ViewController(
    (req: { task: string; text: string; target?: string }) =>
      api.classify(req.task, req.text, { target: req.target }),
    (res) => mount(out("classify-out"), renderClassificationBars(res)),
    (err) => mount(out("classify-out"), errorNode(err)),
  );
  root.getElementById("classify-go")?.addEventListener("click", () => {
    void classify.submit({
      task: input("classify-task").value,
      text: input("classify-text").value,
      target: input("classify-target").value || undefined,
    });
  });

  const nerView = new ViewController(
    (text: string) => api.ner(text).then((res) => ({ text, res })),
    ({ text, res }) => mount(out("ner-out"), renderNerView(text, res)),
    (err) => mount(out("ner-out"), errorNode(err)),
  );
  root.getElementById("ner-go")?.addEventListener("click", () => {
    void nerView.submit(input("ner-text").value);
  });

  const maskView = new ViewController(
    (text: string) => api.mask(text),
    (res) => mount(out("mask-out"), renderMaskView(res)),
    (err) => mount(out("mask-out"), errorNode(err)),
  );
  root.getElementById("mask-go")?.addEventListener("click", () => {
    void maskView.submit(input("mask-text").value);
  });
  // clicking a candidate substitutes it into the text box
  out("mask-out").addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    if (target.classList.contains("mask-token")) {
      const box = input("mask-text");
      box.value = box.value.replace("<mask>", target.textContent ?? "");
    }
  });

  const similarity = new ViewController(
    (req: { a: string; b: string }) => api.similarity(req.a, req.b),
    (res) => mount(out("similarity-out"), renderSimilarityGauge(res.score)),
    (err) => mount(out("similarity-out"), errorNode(err)),
  );
  root.getElementById("similarity-go")?.addEventListener("click", () => {
    void similarity.submit({
      a: input("similarity-a").value,
      b: input("similarity-b").value,
    });
  });

  const hashtag = new ViewController(
    (req: { query: string; start: string; end: string }) =>
      api.hashtagAnalysis(req),
    (res) => mount(out("hashtag-out"), renderHashtagChart(res)),
    (err) => mount(out("hashtag-out"), errorNode(err)),
  );
  root.getElementById("hashtag-go")?.addEventListener("click", () => {
    void hashtag.submit({
      query: input("hashtag-query").value,
      start: input("hashtag-start").value,
      end: input("hashtag-end").value,
    });
  });
}
