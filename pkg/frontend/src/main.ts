/** Entry point: token login, then route to the screen matching the role. */

import { AnnotationView } from "./annotate.js";
import { AdjudicationView } from "./adjudicate.js";
import { ApiClient } from "./api.js";
import { Dashboard } from "./dashboard.js";

function element(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing #${id} in the page shell`);
  }
  return node;
}

export function textOffsets(container: HTMLElement): { start: number; end: number } | null {
  const selection = window.getSelection();
  if (!selection || selection.rangeCount === 0 || selection.isCollapsed) {
    return null;
  }
  const range = selection.getRangeAt(0);
  if (!container.contains(range.commonAncestorContainer)) {
    return null;
  }
  const before = range.cloneRange();
  before.selectNodeContents(container);
  before.setEnd(range.startContainer, range.startOffset);
  const start = before.toString().length;
  return { start, end: start + range.toString().length };
}

export async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const token = params.get("token") ?? window.prompt("access token") ?? "";
  const docId = params.get("doc") ?? "";
  const screen = params.get("screen") ?? "annotate";
  const api = new ApiClient("", token);

  if (screen === "adjudicate") {
    const view = new AdjudicationView(api, docId, {
      locked: element("locked"),
      candidatesA: element("candidates-a"),
      candidatesB: element("candidates-b"),
      preview: element("gold-preview"),
      status: element("status"),
    });
    await view.load();
    element("submit-adjudication").addEventListener("click", () => {
      void view.submit(() => window.confirm("Keep nothing? Gold will be the agreed set only."));
    });
    return;
  }

  if (screen === "dashboard") {
    const dashboard = new Dashboard(api, {
      rounds: element("rounds"),
      assignForm: element("assign-form"),
      reviewText: element("review-text"),
      status: element("status"),
    });
    dashboard.renderAssignForm();
    await dashboard.refreshRounds();
    element("redact-button").addEventListener("click", () => {
      const offsets = textOffsets(element("review-text"));
      if (offsets) {
        void dashboard.redactSelection(offsets.start, offsets.end);
      }
    });
    element("review-done").addEventListener("click", () => void dashboard.signOffReview());
    return;
  }

  const annotate = new AnnotationView(api, docId, {
    textContainer: element("document-text"),
    popup: element("suggestion-popup"),
    paletteContainer: element("palette"),
    status: element("status"),
  });
  await annotate.load();
  element("document-text").addEventListener("mouseup", () => {
    const offsets = textOffsets(element("document-text"));
    if (offsets) {
      void annotate.beginDraft(offsets.start, offsets.end);
    }
  });
  element("save-annotation").addEventListener("click", () => void annotate.saveDraft());
  element("submit-pass").addEventListener("click", () => void annotate.submitPass());
}

if (typeof document !== "undefined" && document.getElementById("dupla-app")) {
  void boot();
}
