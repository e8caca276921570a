/** Highlight layout: overlapping annotations are split across layers so no
 * two highlights on one layer ever overlap visually. */

import type { AnnotationPayload } from "./types.js";

export interface Highlighted {
  annotation: AnnotationPayload;
  layer: number;
}

/** Greedy interval layering: each annotation takes the lowest layer whose
 * last highlight ends at or before its start. */
export function assignLayers(annotations: AnnotationPayload[]): Highlighted[] {
  const ordered = [...annotations].sort(
    (a, b) => a.start - b.start || a.end - b.end || a.id.localeCompare(b.id),
  );
  const layerEnds: number[] = [];
  const out: Highlighted[] = [];
  for (const annotation of ordered) {
    let layer = layerEnds.findIndex((end) => end <= annotation.start);
    if (layer === -1) {
      layer = layerEnds.length;
      layerEnds.push(0);
    }
    layerEnds[layer] = annotation.end;
    out.push({ annotation, layer });
  }
  return out;
}

const GROUP_HUES: Record<string, number> = {
  ANAT: 20,
  CHEM: 280,
  CONC: 200,
  DEVI: 330,
  DISO: 0,
  GENE: 160,
  GEOG: 80,
  LIVB: 120,
  OBJC: 40,
  OCCU: 180,
  ORGA: 260,
  PHEN: 220,
  PHYS: 100,
  PROC: 300,
  ACTI: 60,
  NA: 240,
};

export function groupColor(groupCode: string): string {
  const hue =
    GROUP_HUES[groupCode] ??
    Math.abs([...groupCode].reduce((h, c) => h * 31 + c.charCodeAt(0), 7)) % 360;
  return `hsl(${hue}, 70%, 82%)`;
}

/** Render document text with <mark> highlights into the container. */
export function renderHighlights(
  container: HTMLElement,
  text: string,
  annotations: AnnotationPayload[],
  colorOf: (annotation: AnnotationPayload) => string,
): void {
  container.textContent = "";
  const layered = assignLayers(annotations);
  const starts = new Map<number, Highlighted[]>();
  for (const item of layered) {
    const bucket = starts.get(item.annotation.start) ?? [];
    bucket.push(item);
    starts.set(item.annotation.start, bucket);
  }
  const boundaries = new Set<number>([0, text.length]);
  for (const { annotation } of layered) {
    boundaries.add(annotation.start);
    boundaries.add(annotation.end);
  }
  const cuts = [...boundaries].sort((a, b) => a - b);
  for (let i = 0; i + 1 < cuts.length; i += 1) {
    const [from, to] = [cuts[i], cuts[i + 1]];
    const slice = text.slice(from, to);
    const covering = layered.filter(
      ({ annotation }) => annotation.start <= from && to <= annotation.end,
    );
    if (covering.length === 0) {
      container.appendChild(document.createTextNode(slice));
      continue;
    }
    let node: HTMLElement | null = null;
    let root: HTMLElement | null = null;
    for (const item of covering.sort((a, b) => a.layer - b.layer)) {
      const mark = document.createElement("mark");
      mark.dataset.annotationId = item.annotation.id;
      mark.dataset.layer = String(item.layer);
      mark.style.backgroundColor = colorOf(item.annotation);
      mark.style.paddingBottom = `${item.layer * 2}px`;
      if (node) {
        node.appendChild(mark);
      } else {
        root = mark;
      }
      node = mark;
    }
    node!.textContent = slice;
    container.appendChild(root!);
  }
}
