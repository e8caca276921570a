/** Manager dashboard: per-round agreement chart with the stability verdict,
 * the assignment form, and the PHI review screen. */

import { ApiClient } from "./api.js";
import type { RoundsReport } from "./types.js";

/** Stopping rule mirror: stable once the last three round means pairwise
 * differ by at most epsilon. Used only when a report omits the server
 * verdict; displayed numbers always come from the report itself. */
export function stableWindow(means: number[], epsilon: number): boolean {
  if (means.length < 3) {
    return false;
  }
  const window = means.slice(-3);
  return Math.max(...window) - Math.min(...window) <= epsilon + 1e-12;
}

export function renderRounds(container: HTMLElement, report: RoundsReport): void {
  container.textContent = "";
  const verdict =
    report.stability ??
    (stableWindow(report.rounds.map((r) => r.mean), report.epsilon) ? "stable" : "continue");

  const indicator = document.createElement("p");
  indicator.dataset.role = "stability-indicator";
  indicator.dataset.state = verdict;
  indicator.textContent =
    verdict === "stable"
      ? "stable — finalize guidelines"
      : "continue — guidelines still moving";
  container.appendChild(indicator);

  const chart = document.createElement("ol");
  chart.dataset.role = "round-chart";
  for (const round of report.rounds) {
    const item = document.createElement("li");
    item.dataset.round = String(round.round);
    const bar = document.createElement("span");
    bar.className = "bar";
    bar.style.width = `${Math.round(round.mean * 100)}%`;
    bar.textContent = round.mean.toFixed(3);
    item.appendChild(document.createTextNode(`round ${round.round} `));
    item.appendChild(bar);
    item.title = round.documents.join(", ");
    chart.appendChild(item);
  }
  container.appendChild(chart);
}

export class Dashboard {
  constructor(
    private readonly api: ApiClient,
    private readonly root: {
      rounds: HTMLElement;
      assignForm: HTMLElement;
      reviewText: HTMLElement;
      status: HTMLElement;
    },
  ) {}

  async refreshRounds(): Promise<void> {
    const report = await this.api.roundsReport();
    renderRounds(this.root.rounds, report);
  }

  renderAssignForm(): void {
    const container = this.root.assignForm;
    container.textContent = "";
    const form = document.createElement("form");
    form.dataset.role = "assignment-form";
    for (const [name, placeholder] of [
      ["documents", "doc ids, comma separated"],
      ["annotators", "annotator ids"],
      ["adjudicators", "adjudicator ids"],
      ["seed", "seed"],
    ]) {
      const input = document.createElement("input");
      input.name = name;
      input.placeholder = placeholder;
      form.appendChild(input);
    }
    const button = document.createElement("button");
    button.type = "submit";
    button.textContent = "assign";
    form.appendChild(button);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(form);
      const split = (field: string) =>
        String(data.get(field) ?? "")
          .split(",")
          .map((s) => s.trim())
          .filter(Boolean);
      this.api
        .assign({
          documents: split("documents"),
          annotators: split("annotators"),
          adjudicators: split("adjudicators"),
          seed: Number(data.get("seed") ?? 0),
        })
        .then((result) => {
          this.root.status.textContent = `${result.assignments.length} documents assigned`;
        })
        .catch((error) => {
          this.root.status.textContent = `assignment failed: ${String(error)}`;
        });
    });
    container.appendChild(form);
  }

  /** PHI review: load a document and redact the current text selection. */
  async loadForReview(docId: string): Promise<void> {
    const view = await this.api.getDocument(docId);
    this.root.reviewText.dataset.docId = docId;
    this.root.reviewText.textContent = view.document.text;
  }

  async redactSelection(start: number, end: number): Promise<void> {
    const docId = this.root.reviewText.dataset.docId;
    if (!docId) {
      return;
    }
    const result = await this.api.redact(docId, start, end);
    this.root.reviewText.textContent = result.text;
    this.root.status.textContent = `redacted; document ${result.status}`;
  }

  async signOffReview(): Promise<void> {
    const docId = this.root.reviewText.dataset.docId;
    if (!docId) {
      return;
    }
    const result = await this.api.review(docId);
    this.root.status.textContent = `document ${result.id} ${result.status}`;
  }
}
