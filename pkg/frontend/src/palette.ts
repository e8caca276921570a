/** Searchable semantic-type palette, grouped by semantic group with one
 * color per group. Only registered types appear. */

import { groupColor } from "./highlight.js";
import type { SemanticTypeInfo } from "./types.js";

export class TypePalette {
  private readonly types: SemanticTypeInfo[];

  constructor(types: SemanticTypeInfo[]) {
    this.types = [...types].sort(
      (a, b) => a.group_name.localeCompare(b.group_name) || a.name.localeCompare(b.name),
    );
  }

  /** Case-insensitive substring search over names and codes. */
  search(query: string): Map<string, SemanticTypeInfo[]> {
    const needle = query.trim().toLowerCase();
    const grouped = new Map<string, SemanticTypeInfo[]>();
    for (const sty of this.types) {
      if (
        needle &&
        !sty.name.toLowerCase().includes(needle) &&
        !sty.code.toLowerCase().includes(needle)
      ) {
        continue;
      }
      const bucket = grouped.get(sty.group_name) ?? [];
      bucket.push(sty);
      grouped.set(sty.group_name, bucket);
    }
    return grouped;
  }

  render(container: HTMLElement, query: string, onPick: (sty: SemanticTypeInfo) => void): void {
    container.textContent = "";
    for (const [groupName, types] of this.search(query)) {
      const section = document.createElement("section");
      section.className = "palette-group";
      const heading = document.createElement("h4");
      heading.textContent = groupName;
      heading.style.backgroundColor = groupColor(types[0].group_code);
      section.appendChild(heading);
      const list = document.createElement("ul");
      for (const sty of types) {
        const item = document.createElement("li");
        const button = document.createElement("button");
        button.type = "button";
        button.dataset.styCode = sty.code;
        button.textContent = sty.name;
        button.style.borderLeft = `6px solid ${groupColor(sty.group_code)}`;
        button.addEventListener("click", () => onPick(sty));
        item.appendChild(button);
        list.appendChild(item);
      }
      section.appendChild(list);
      container.appendChild(section);
    }
  }
}
