/** Assessment tree: categories and entities with class badges, counts,
 * zero-hit markers, and lazily revealed preview snippets. Checkbox toggles
 * call the server; the tree is always re-rendered from the server's session.
 */
import type { CategoryDto, EntityDto, SessionDto } from "./api.js";
import { CLASS_LABELS, mentionSummary, ViewState } from "./state.js";

export interface TreeHandlers {
  onToggleCategory: (category: string) => void;
  onToggleEntity: (entity: string) => void;
  onExpandCategory: (category: string) => void;
  onPreviewEntity: (entity: string) => void;
}

function renderEntity(
  entity: EntityDto,
  view: ViewState,
  handlers: TreeHandlers,
  categorySelected: boolean,
): HTMLElement {
  const row = document.createElement("li");
  row.className = "entity-row";
  row.dataset.entity = entity.entity;
  if (!entity.selected || !categorySelected) row.classList.add("excluded");

  const label = document.createElement("label");
  const checkbox = document.createElement("input");
  checkbox.type = "checkbox";
  checkbox.className = "entity-toggle";
  checkbox.checked = entity.selected;
  checkbox.addEventListener("change", () => handlers.onToggleEntity(entity.entity));
  label.appendChild(checkbox);
  label.append(` ${entity.label || entity.entity}`);
  row.appendChild(label);

  const badge = document.createElement("span");
  badge.className = `badge badge-${entity.temporal_class}`;
  badge.textContent = CLASS_LABELS[entity.temporal_class] ?? entity.temporal_class;
  row.appendChild(badge);

  const counts = document.createElement("span");
  counts.className = entity.absent ? "mentions absent-marker" : "mentions";
  counts.textContent = mentionSummary(entity.documents, entity.mentions, entity.absent);
  row.appendChild(counts);

  if (!entity.absent && entity.previews.length > 0) {
    const previewButton = document.createElement("button");
    previewButton.type = "button";
    previewButton.className = "preview-toggle";
    previewButton.textContent =
      view.activePreviewEntity === entity.entity ? "hide previews" : "previews";
    previewButton.addEventListener("click", () => handlers.onPreviewEntity(entity.entity));
    row.appendChild(previewButton);

    if (view.activePreviewEntity === entity.entity) {
      const list = document.createElement("ul");
      list.className = "previews";
      for (const preview of entity.previews) {
        const item = document.createElement("li");
        const source = document.createElement("span");
        source.className = "preview-doc";
        source.textContent = `${preview.doc_id}: `;
        item.appendChild(source);
        item.append(`…${preview.snippet}…`);
        list.appendChild(item);
      }
      row.appendChild(list);
    }
  }
  return row;
}

function renderCategory(
  category: CategoryDto,
  view: ViewState,
  handlers: TreeHandlers,
): HTMLElement {
  const node = document.createElement("div");
  node.className = "category-node";
  node.dataset.category = category.category;
  node.style.marginLeft = `${category.depth * 1.25}rem`;
  if (!category.selected) node.classList.add("deselected");

  const header = document.createElement("div");
  header.className = "category-header";

  const label = document.createElement("label");
  const checkbox = document.createElement("input");
  checkbox.type = "checkbox";
  checkbox.className = "category-toggle";
  checkbox.checked = category.selected;
  checkbox.addEventListener("change", () => handlers.onToggleCategory(category.category));
  label.appendChild(checkbox);
  const name = document.createElement("strong");
  name.textContent = ` ${category.label || category.category}`;
  label.appendChild(name);
  header.appendChild(label);

  const stats = document.createElement("span");
  stats.className = "category-stats";
  stats.textContent =
    `${category.entities.length} entities` +
    (category.dated_member_count
      ? ` · ${category.out_of_period_count}/${category.dated_member_count} dated out of period`
      : "");
  header.appendChild(stats);

  if (!category.auto_selected) {
    const flag = document.createElement("span");
    flag.className = "auto-flag";
    flag.title = "deselected automatically: most dated members fall outside the period";
    flag.textContent = "auto-deselected";
    header.appendChild(flag);
  }

  if (category.entities.length > 0) {
    const expand = document.createElement("button");
    expand.type = "button";
    expand.className = "expand-toggle";
    expand.textContent = view.expandedCategories.has(category.category) ? "collapse" : "expand";
    expand.addEventListener("click", () => handlers.onExpandCategory(category.category));
    header.appendChild(expand);
  }
  node.appendChild(header);

  // previews and entity rows materialize only for expanded categories
  if (view.expandedCategories.has(category.category)) {
    const list = document.createElement("ul");
    list.className = "entity-list";
    for (const entity of category.entities) {
      list.appendChild(renderEntity(entity, view, handlers, category.selected));
    }
    node.appendChild(list);
  }
  return node;
}

export function renderTree(
  container: HTMLElement,
  session: SessionDto,
  view: ViewState,
  handlers: TreeHandlers,
): void {
  container.textContent = "";

  const header = document.createElement("div");
  header.className = "tree-header";
  const count = document.createElement("span");
  count.id = "result-count";
  count.dataset.count = String(session.result_count);
  count.textContent = `${session.result_count} documents match the current query`;
  header.appendChild(count);
  const queryInfo = document.createElement("span");
  queryInfo.className = "query-info";
  queryInfo.textContent =
    ` · ${session.effective_query.length} entities in query` +
    ` · ${session.missing_entities.length} not found in corpus`;
  header.appendChild(queryInfo);
  container.appendChild(header);

  for (const group of session.groups) {
    const groupEl = document.createElement("section");
    groupEl.className = "root-group";
    groupEl.dataset.root = group.root;
    for (const category of group.categories) {
      groupEl.appendChild(renderCategory(category, view, handlers));
    }
    container.appendChild(groupEl);
  }
}
