/** Suggestion popup. The server already ranks suggestions; this popup
 * renders them verbatim in server order, never re-sorting. */

import type { SuggestionPayload, SuggestionsResponse } from "./types.js";

const SOURCE_BADGE: Record<SuggestionPayload["source"], string> = {
  history: "prior use",
  terminology_exact: "terminology",
  terminology_fuzzy: "terminology ~",
};

export function renderSuggestionPopup(
  container: HTMLElement,
  response: SuggestionsResponse,
  onAccept: (suggestion: SuggestionPayload) => void,
): void {
  container.textContent = "";
  container.classList.add("suggestion-popup");
  if (response.provider_unavailable) {
    const warning = document.createElement("p");
    warning.className = "provider-warning";
    warning.textContent = "terminology service unavailable; showing project history only";
    container.appendChild(warning);
  }
  if (response.suggestions.length === 0) {
    const empty = document.createElement("p");
    empty.className = "no-suggestions";
    empty.textContent = "no suggestions";
    container.appendChild(empty);
    return;
  }
  const list = document.createElement("ol");
  list.dataset.role = "suggestion-list";
  for (const suggestion of response.suggestions) {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.type = "button";
    button.dataset.term = suggestion.term;
    button.dataset.types = suggestion.types.join(",");
    button.textContent = `${suggestion.types.join(", ")} — ${SOURCE_BADGE[suggestion.source]}`;
    button.addEventListener("click", () => onAccept(suggestion));
    item.appendChild(button);
    list.appendChild(item);
  }
  container.appendChild(list);
}
