/** Close-reading view: paged documents with mention highlighting, verdict
 * buttons, and export controls.
 */
import type { ResultDocDto, ResultsPageDto, SessionDto, Verdict } from "./api.js";
import { segmentText } from "./state.js";

export interface ReadingHandlers {
  onPage: (page: number) => void;
  onVerdict: (docId: string, verdict: Verdict) => void;
  onExport: (includeUnjudged: boolean) => void;
}

function renderDocument(doc: ResultDocDto, handlers: ReadingHandlers): HTMLElement {
  const article = document.createElement("article");
  article.className = "result-doc";
  article.dataset.docId = doc.doc_id;
  article.dataset.verdict = doc.verdict;

  const head = document.createElement("header");
  const title = document.createElement("strong");
  title.textContent = doc.debate_title;
  head.appendChild(title);
  const meta = document.createElement("span");
  meta.className = "doc-meta";
  meta.textContent = ` ${doc.date} · ${doc.speaker} (${doc.party}) · ${doc.doc_id}`;
  head.appendChild(meta);
  article.appendChild(head);

  const body = document.createElement("p");
  body.className = "doc-text";
  const ranges = doc.annotations.map((a): [number, number] => [a.begin, a.end]);
  for (const segment of segmentText(doc.text, ranges)) {
    if (segment.highlighted) {
      const mark = document.createElement("mark");
      mark.textContent = segment.text;
      body.appendChild(mark);
    } else {
      body.append(segment.text);
    }
  }
  article.appendChild(body);

  const verdictBar = document.createElement("div");
  verdictBar.className = "verdict-bar";
  const current = document.createElement("span");
  current.className = `verdict-state verdict-${doc.verdict}`;
  current.textContent = doc.verdict;
  verdictBar.appendChild(current);
  const options: Array<[Verdict, string]> = [
    ["relevant", "Relevant"],
    ["irrelevant", "Irrelevant"],
    ["unjudged", "Clear"],
  ];
  for (const [verdict, labelText] of options) {
    const button = document.createElement("button");
    button.type = "button";
    button.className = `verdict-button verdict-button-${verdict}`;
    button.textContent = labelText;
    button.disabled = doc.verdict === verdict;
    button.addEventListener("click", () => handlers.onVerdict(doc.doc_id, verdict));
    verdictBar.appendChild(button);
  }
  article.appendChild(verdictBar);
  return article;
}

export function renderReading(
  container: HTMLElement,
  session: SessionDto,
  page: ResultsPageDto,
  handlers: ReadingHandlers,
  exportStatus: string,
): void {
  container.textContent = "";

  const header = document.createElement("div");
  header.className = "reading-header";
  const relevant = document.createElement("span");
  relevant.id = "relevant-count";
  relevant.dataset.count = String(session.relevant_count);
  relevant.textContent = `${session.relevant_count} marked relevant`;
  header.appendChild(relevant);

  const exportControls = document.createElement("span");
  exportControls.className = "export-controls";
  const includeLabel = document.createElement("label");
  const includeUnjudged = document.createElement("input");
  includeUnjudged.type = "checkbox";
  includeUnjudged.id = "include-unjudged";
  includeLabel.appendChild(includeUnjudged);
  includeLabel.append(" include unjudged");
  exportControls.appendChild(includeLabel);
  const exportButton = document.createElement("button");
  exportButton.type = "button";
  exportButton.id = "export-button";
  exportButton.textContent = "Export corpus";
  exportButton.addEventListener("click", () => handlers.onExport(includeUnjudged.checked));
  exportControls.appendChild(exportButton);
  header.appendChild(exportControls);
  container.appendChild(header);

  if (exportStatus) {
    const status = document.createElement("p");
    status.id = "export-status";
    status.textContent = exportStatus;
    container.appendChild(status);
  }

  if (page.total_documents === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "The current query retrieves no documents.";
    container.appendChild(empty);
    return;
  }

  for (const doc of page.documents) {
    container.appendChild(renderDocument(doc, handlers));
  }

  const pager = document.createElement("div");
  pager.className = "pager";
  const previous = document.createElement("button");
  previous.type = "button";
  previous.textContent = "← newer";
  previous.disabled = page.page <= 1;
  previous.addEventListener("click", () => handlers.onPage(page.page - 1));
  pager.appendChild(previous);
  const info = document.createElement("span");
  info.textContent = ` page ${page.page} of ${page.total_pages} (${page.total_documents} documents) `;
  pager.appendChild(info);
  const next = document.createElement("button");
  next.type = "button";
  next.textContent = "older →";
  next.disabled = page.page >= page.total_pages;
  next.addEventListener("click", () => handlers.onPage(page.page + 1));
  pager.appendChild(next);
  container.appendChild(pager);
}
