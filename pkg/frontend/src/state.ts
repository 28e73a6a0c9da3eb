/** Client-side presentation state and pure rendering helpers.
 *
 * Nothing here decides what is selected or retrieved; all durable state lives
 * server-side in the session and the UI re-renders from it after every
 * mutation.
 */

export interface ViewState {
  sessionId: string | null;
  expandedCategories: Set<string>;
  activePreviewEntity: string | null;
  resultsPage: number;
  aggregationDimension: "year" | "party";
}

export function initialViewState(): ViewState {
  return {
    sessionId: null,
    expandedCategories: new Set(),
    activePreviewEntity: null,
    resultsPage: 1,
    aggregationDimension: "year",
  };
}

export function toggleExpanded(state: ViewState, category: string): void {
  if (state.expandedCategories.has(category)) {
    state.expandedCategories.delete(category);
  } else {
    state.expandedCategories.add(category);
  }
}

export interface Segment {
  text: string;
  highlighted: boolean;
}

/** Merge possibly-overlapping [begin, end) ranges into disjoint ones. */
export function mergeRanges(ranges: Array<[number, number]>): Array<[number, number]> {
  const sorted = [...ranges].sort((a, b) => a[0] - b[0] || a[1] - b[1]);
  const merged: Array<[number, number]> = [];
  for (const [begin, end] of sorted) {
    const last = merged[merged.length - 1];
    if (last && begin <= last[1]) {
      last[1] = Math.max(last[1], end);
    } else {
      merged.push([begin, end]);
    }
  }
  return merged;
}

/** Split text into highlighted/plain segments.
 *
 * Annotation offsets are Unicode code points, so the split walks code points
 * rather than UTF-16 units.
 */
export function segmentText(text: string, ranges: Array<[number, number]>): Segment[] {
  const codePoints = Array.from(text);
  const merged = mergeRanges(ranges).filter(([b, e]) => b < e && b < codePoints.length);
  const segments: Segment[] = [];
  let cursor = 0;
  for (const [begin, end] of merged) {
    const clampedEnd = Math.min(end, codePoints.length);
    if (begin > cursor) {
      segments.push({ text: codePoints.slice(cursor, begin).join(""), highlighted: false });
    }
    segments.push({ text: codePoints.slice(begin, clampedEnd).join(""), highlighted: true });
    cursor = clampedEnd;
  }
  if (cursor < codePoints.length) {
    segments.push({ text: codePoints.slice(cursor).join(""), highlighted: false });
  }
  return segments;
}

export const CLASS_LABELS: Record<string, string> = {
  in_period: "in period",
  out_of_period: "out of period",
  borderline: "borderline",
  undated: "undated",
};

export function mentionSummary(documents: number, mentions: number, absent: boolean): string {
  if (absent) return "did not occur";
  const docsWord = documents === 1 ? "doc" : "docs";
  return `${mentions} in ${documents} ${docsWord}`;
}
