/** Typeahead root picker: queries the categories endpoint as the user types. */
import type { CategoryMatchDto } from "./api.js";

export interface TypeaheadOptions {
  input: HTMLInputElement;
  suggestions: HTMLElement;
  fetcher: (query: string) => Promise<CategoryMatchDto[]>;
  onPick: (match: CategoryMatchDto) => void;
}

export function attachTypeahead(options: TypeaheadOptions): { refresh: () => Promise<void> } {
  const { input, suggestions, fetcher, onPick } = options;
  let requestSeq = 0;

  async function refresh(): Promise<void> {
    const query = input.value.trim();
    const seq = ++requestSeq;
    if (!query) {
      suggestions.textContent = "";
      return;
    }
    const matches = await fetcher(query);
    if (seq !== requestSeq) return; // a newer keystroke superseded this response
    suggestions.textContent = "";
    for (const match of matches) {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.type = "button";
      button.className = "suggestion";
      button.dataset.categoryId = match.id;
      button.textContent = match.label;
      button.addEventListener("click", () => {
        input.value = "";
        suggestions.textContent = "";
        onPick(match);
      });
      item.appendChild(button);
      suggestions.appendChild(item);
    }
  }

  input.addEventListener("input", () => {
    void refresh();
  });
  return { refresh };
}
