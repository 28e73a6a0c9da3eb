/** Application shell: root picker, assessment tree, reading view, charts.
 *
 * The server's session representation is the single source of truth: every
 * mutation round-trips and the affected panels re-render from the response.
 * The session id is kept in the URL hash so a reload resumes the session.
 */
import {
  AggregateRowDto,
  ApiError,
  CategoryMatchDto,
  Client,
  ResultsPageDto,
  SessionDto,
  Verdict,
} from "./api.js";
import { chartTotals, renderBarChart } from "./chart.js";
import { renderReading } from "./reading.js";
import { initialViewState, toggleExpanded, ViewState } from "./state.js";
import { renderTree } from "./tree.js";
import { attachTypeahead } from "./typeahead.js";

export class App {
  view: ViewState = initialViewState();
  session: SessionDto | null = null;
  resultsPage: ResultsPageDto | null = null;
  aggregateRows: AggregateRowDto[] = [];
  exportStatus = "";
  errorMessage = "";
  lastError: unknown = null;

  private chosenRoots: CategoryMatchDto[] = [];
  private inflight = new Set<Promise<unknown>>();

  constructor(
    private root: HTMLElement,
    private client: Client,
  ) {}

  /** Resolves once all in-flight requests have settled (used by tests). */
  async whenIdle(): Promise<void> {
    while (this.inflight.size > 0) {
      await Promise.allSettled([...this.inflight]);
    }
  }

  private track(work: () => Promise<void>): void {
    const promise = work().catch((error) => {
      this.lastError = error;
      this.errorMessage = error instanceof ApiError
        ? `${error.code}: ${error.message}`
        : String(error);
      this.renderError();
    });
    this.inflight.add(promise);
    void promise.finally(() => this.inflight.delete(promise));
  }

  private register<T>(promise: Promise<T>): Promise<T> {
    this.inflight.add(promise);
    void promise.finally(() => this.inflight.delete(promise));
    return promise;
  }

  async init(): Promise<void> {
    this.renderShell();
    const fromHash = window.location.hash.slice(1);
    if (fromHash) {
      const session = await this.client.getSession(fromHash);
      await this.adoptSession(session);
    }
  }

  private el<T extends HTMLElement>(id: string): T {
    const found = this.root.querySelector(`#${id}`);
    if (!found) throw new Error(`missing element #${id}`);
    return found as T;
  }

  private renderShell(): void {
    this.root.innerHTML = `
      <h1>corpusel</h1>
      <p id="error-banner" role="alert" hidden></p>
      <section id="setup-panel">
        <h2>New session</h2>
        <div class="picker-row">
          <input id="root-input" type="search" autocomplete="off"
                 placeholder="Search root categories&hellip;">
          <ul id="root-suggestions" class="suggestions"></ul>
        </div>
        <ul id="chosen-roots" class="chips"></ul>
        <div class="period-row">
          <label>From <input id="period-start" type="number" value="1588"></label>
          <label>to <input id="period-end" type="number" value="1702"></label>
          <label>depth <input id="max-depth" type="number" value="5" min="1"></label>
          <button id="create-session" type="button">Start session</button>
        </div>
        <p id="setup-validation" role="alert" hidden></p>
      </section>
      <div id="workspace" hidden>
        <section id="tree-panel"></section>
        <section id="aggregation-panel">
          <h2>Aggregation</h2>
          <label>dimension
            <select id="dimension-select">
              <option value="year">year</option>
              <option value="party">party</option>
            </select>
          </label>
          <span id="chart-total-docs"></span>
          <div id="chart-container"></div>
        </section>
        <section id="reading-panel"></section>
      </div>
    `;
    attachTypeahead({
      input: this.el<HTMLInputElement>("root-input"),
      suggestions: this.el("root-suggestions"),
      fetcher: (query) => this.register(this.client.categories(query)),
      onPick: (match) => this.addRoot(match),
    });
    this.el("create-session").addEventListener("click", () => {
      this.track(() => this.createSession());
    });
    this.el<HTMLSelectElement>("dimension-select").addEventListener("change", (event) => {
      const dimension = (event.target as HTMLSelectElement).value as "year" | "party";
      this.view.aggregationDimension = dimension;
      this.track(async () => {
        await this.refreshAggregate();
        this.renderAggregation();
      });
    });
  }

  private renderError(): void {
    const banner = this.el("error-banner");
    banner.hidden = !this.errorMessage;
    banner.textContent = this.errorMessage;
  }

  private addRoot(match: CategoryMatchDto): void {
    if (!this.chosenRoots.some((r) => r.id === match.id)) {
      this.chosenRoots.push(match);
    }
    this.renderChosenRoots();
  }

  private renderChosenRoots(): void {
    const list = this.el("chosen-roots");
    list.textContent = "";
    for (const root of this.chosenRoots) {
      const chip = document.createElement("li");
      chip.className = "chip";
      chip.dataset.rootId = root.id;
      chip.textContent = root.label;
      const remove = document.createElement("button");
      remove.type = "button";
      remove.textContent = "×";
      remove.addEventListener("click", () => {
        this.chosenRoots = this.chosenRoots.filter((r) => r.id !== root.id);
        this.renderChosenRoots();
      });
      chip.appendChild(remove);
      list.appendChild(chip);
    }
  }

  private async createSession(): Promise<void> {
    const validation = this.el("setup-validation");
    if (this.chosenRoots.length === 0) {
      validation.hidden = false;
      validation.textContent = "Pick at least one root category.";
      return; // no request without roots
    }
    validation.hidden = true;
    const period = {
      start_year: Number(this.el<HTMLInputElement>("period-start").value),
      end_year: Number(this.el<HTMLInputElement>("period-end").value),
    };
    const depth = Number(this.el<HTMLInputElement>("max-depth").value) || undefined;
    try {
      const session = await this.client.createSession(
        this.chosenRoots.map((r) => r.id), period, depth,
      );
      await this.adoptSession(session);
    } catch (error) {
      if (error instanceof ApiError) {
        validation.hidden = false;
        validation.textContent = error.message;
        return;
      }
      throw error;
    }
  }

  private async adoptSession(session: SessionDto): Promise<void> {
    this.session = session;
    this.view.sessionId = session.id;
    this.view.resultsPage = 1;
    window.location.hash = session.id;
    this.errorMessage = "";
    for (const group of session.groups) {
      for (const category of group.categories) {
        if (category.entities.length > 0) {
          this.view.expandedCategories.add(category.category);
        }
      }
    }
    await this.refreshDerived();
    this.el("workspace").hidden = false;
    this.renderAll();
  }

  private async refreshDerived(): Promise<void> {
    if (!this.session) return;
    await this.refreshResults();
    await this.refreshAggregate();
  }

  private async refreshResults(): Promise<void> {
    if (!this.session) return;
    let page = await this.client.results(this.session.id, this.view.resultsPage);
    if (page.total_pages > 0 && this.view.resultsPage > page.total_pages) {
      this.view.resultsPage = page.total_pages;
      page = await this.client.results(this.session.id, this.view.resultsPage);
    }
    this.resultsPage = page;
  }

  private async refreshAggregate(): Promise<void> {
    if (!this.session) return;
    this.aggregateRows = await this.client.aggregate(
      this.session.id, this.view.aggregationDimension,
    );
  }

  private renderAll(): void {
    this.renderError();
    if (!this.session) return;
    renderTree(this.el("tree-panel"), this.session, this.view, {
      onToggleCategory: (category) => this.track(() => this.toggle("category", category)),
      onToggleEntity: (entity) => this.track(() => this.toggle("entity", entity)),
      onExpandCategory: (category) => {
        toggleExpanded(this.view, category);
        this.renderAll();
      },
      onPreviewEntity: (entity) => {
        this.view.activePreviewEntity =
          this.view.activePreviewEntity === entity ? null : entity;
        this.renderAll();
      },
    });
    this.renderAggregation();
    if (this.resultsPage) {
      renderReading(this.el("reading-panel"), this.session, this.resultsPage, {
        onPage: (page) => this.track(async () => {
          this.view.resultsPage = page;
          await this.refreshResults();
          this.renderAll();
        }),
        onVerdict: (docId, verdict) => this.track(() => this.assess(docId, verdict)),
        onExport: (includeUnjudged) => this.track(() => this.exportCorpus(includeUnjudged)),
      }, this.exportStatus);
    }
  }

  private renderAggregation(): void {
    if (!this.session) return;
    const totals = chartTotals(this.aggregateRows);
    const totalEl = this.el("chart-total-docs");
    totalEl.dataset.documents = String(totals.documents);
    totalEl.textContent =
      `${totals.documents} documents · ${totals.mentions} mentions in total`;
    this.el<HTMLSelectElement>("dimension-select").value = this.view.aggregationDimension;
    renderBarChart(this.el("chart-container"), this.aggregateRows);
  }

  private async toggle(kind: "category" | "entity", target: string): Promise<void> {
    if (!this.session) return;
    this.session = await this.client.toggle(this.session.id, kind, target);
    await this.refreshDerived();
    this.renderAll();
  }

  private async assess(docId: string, verdict: Verdict): Promise<void> {
    if (!this.session) return;
    await this.client.assess(this.session.id, docId, verdict);
    // re-read server state so verdict badges and counts reflect the truth
    this.session = await this.client.getSession(this.session.id);
    await this.refreshResults();
    this.renderAll();
  }

  private async exportCorpus(includeUnjudged: boolean): Promise<void> {
    if (!this.session) return;
    const content = await this.client.exportCorpus(this.session.id, includeUnjudged);
    const lines = content.split("\n").filter((line) => line.trim().length > 0);
    const documentCount = Math.max(0, lines.length - 1); // first line is the header
    this.exportStatus = `exported ${documentCount} documents`;
    try {
      const blob = new Blob([content], { type: "application/x-ndjson" });
      const url = URL.createObjectURL(blob);
      const anchor = document.createElement("a");
      anchor.href = url;
      anchor.download = `corpus-export-${this.session.id}.jsonl`;
      anchor.click();
      URL.revokeObjectURL(url);
    } catch {
      // download plumbing is unavailable outside a real browser; the status
      // line above still reports what was exported
    }
    this.renderAll();
  }
}

export function bootstrap(root: HTMLElement, client: Client): App {
  const app = new App(root, client);
  void app.init();
  return app;
}
