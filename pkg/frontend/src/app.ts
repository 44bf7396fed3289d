import { ApiClient, ApiError } from "./api.js";
import {
  FilterClause,
  FilterState,
  deserialize,
  emptyState,
  serialize,
  withPage,
} from "./filter-state.js";
import { labelColor, segment } from "./highlight.js";
import type { CaseDetail, CaseSummary, LabelInfo } from "./types.js";

const CITATION_SLOTS = ["LAW", "LAW_CASE", "LAW_REPORT"];
const CHIP_LIMIT = 3;

// Indirection over window.location/history so tests can drive navigation.
export type UrlControl = {
  read(): string;
  push(query: string): void;
  onPop(handler: () => void): void;
};

export const browserUrl: UrlControl = {
  read: () => window.location.search.replace(/^\?/, ""),
  push: (query) => {
    history.pushState(null, "", query ? `?${query}` : window.location.pathname);
  },
  onPop: (handler) => window.addEventListener("popstate", handler),
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export class App {
  private seq = 0;
  private state: FilterState = emptyState();
  private labels: LabelInfo[] = [];
  private facetValues = new Map<string, string[]>();
  private slotInputs = new Map<string, HTMLInputElement | HTMLSelectElement>();
  private exactToggles = new Map<string, HTMLInputElement>();

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private url: UrlControl = browserUrl,
  ) {}

  async start(): Promise<void> {
    const [labels, stats] = await Promise.all([this.api.labels(), this.api.stats()]);
    this.labels = labels.slots;
    for (const row of stats.slots) {
      if (row.values && row.values.length) this.facetValues.set(row.slot, row.values);
    }
    this.renderShell();
    this.state = deserialize(this.url.read());
    this.applyStateToPanel();
    this.url.onPop(() => {
      this.state = deserialize(this.url.read());
      this.applyStateToPanel();
      void this.search(false);
    });
    await this.search(false);
  }

  private renderShell(): void {
    this.root.textContent = "";
    const panel = el("form", "filters");
    panel.addEventListener("submit", (event) => {
      event.preventDefault();
      this.state = withPage(this.collectStateFromPanel(), 1);
      void this.search(true);
    });
    for (const info of this.labels) {
      panel.appendChild(this.filterRow(info));
    }

    const dates = el("div", "date-range");
    const from = el("input");
    from.type = "date";
    from.id = "date-from";
    const to = el("input");
    to.type = "date";
    to.id = "date-to";
    dates.append("decided between ", from, " and ", to);
    panel.appendChild(dates);

    const submit = el("button", "search-button", "Search");
    submit.type = "submit";
    panel.appendChild(submit);

    const banner = el("div", "error-banner");
    banner.id = "error-banner";
    banner.hidden = true;

    const results = el("section", "results");
    results.id = "results";
    const caseView = el("section", "case-view");
    caseView.id = "case-view";

    this.root.append(panel, banner, results, caseView);
  }

  private filterRow(info: LabelInfo): HTMLElement {
    const row = el("div", "filter-row");
    const name = el("label", "slot-name", info.slot);
    name.htmlFor = `filter-${info.slot}`;
    if (info.infrequent) {
      const badge = el("span", "caution-badge", "⚠");
      badge.title = "few gold examples for this category; extractions may be unreliable";
      name.appendChild(badge);
    }

    const values = this.facetValues.get(info.slot);
    let input: HTMLInputElement | HTMLSelectElement;
    if (values) {
      const select = el("select");
      select.appendChild(el("option", "", "any"));
      for (const value of values) {
        const option = el("option", "", value);
        option.value = value;
        select.appendChild(option);
      }
      input = select;
    } else {
      input = el("input");
      input.type = "text";
    }
    input.id = `filter-${info.slot}`;
    this.slotInputs.set(info.slot, input);

    const exact = el("input");
    exact.type = "checkbox";
    exact.id = `exact-${info.slot}`;
    exact.title = "match the whole value instead of a substring";
    this.exactToggles.set(info.slot, exact);
    const exactLabel = el("label", "exact-label", "exact");
    exactLabel.htmlFor = exact.id;

    row.append(name, input, exact, exactLabel);
    return row;
  }

  collectStateFromPanel(): FilterState {
    const clauses: FilterClause[] = [];
    for (const [slot, input] of this.slotInputs) {
      const value = input.value.trim();
      if (value) {
        clauses.push({ slot, value, exact: this.exactToggles.get(slot)!.checked });
      }
    }
    const dateFrom = (this.root.querySelector("#date-from") as HTMLInputElement).value;
    const dateTo = (this.root.querySelector("#date-to") as HTMLInputElement).value;
    return { clauses, dateFrom, dateTo, page: this.state.page };
  }

  private applyStateToPanel(): void {
    for (const input of this.slotInputs.values()) input.value = "";
    for (const toggle of this.exactToggles.values()) toggle.checked = false;
    for (const clause of this.state.clauses) {
      const input = this.slotInputs.get(clause.slot);
      if (input && !input.value) {
        input.value = clause.value;
        this.exactToggles.get(clause.slot)!.checked = clause.exact;
      }
    }
    (this.root.querySelector("#date-from") as HTMLInputElement).value = this.state.dateFrom;
    (this.root.querySelector("#date-to") as HTMLInputElement).value = this.state.dateTo;
  }

  // Latest request wins; stale responses and stale errors are discarded.
  async search(pushUrl: boolean): Promise<void> {
    const ticket = ++this.seq;
    if (pushUrl) this.url.push(serialize(this.state));
    try {
      const response = await this.api.cases(this.state);
      if (ticket !== this.seq) return;
      this.hideError();
      this.renderResults(response);
    } catch (err) {
      if (ticket !== this.seq) return;
      this.showError(err);
    }
  }

  private renderResults(response: {
    total: number;
    page: number;
    page_size: number;
    results: CaseSummary[];
  }): void {
    const section = this.root.querySelector("#results") as HTMLElement;
    section.textContent = "";

    const total = el("p", "total-count");
    total.id = "total-count";
    total.textContent = `${response.total} cases`;
    section.appendChild(total);

    const table = el("table", "result-table");
    const head = el("tr");
    head.append(el("th", "", "case"), el("th", "", "decided"), el("th", "", "extractions"));
    table.appendChild(head);
    for (const summary of response.results) {
      table.appendChild(this.resultRow(summary));
    }
    section.appendChild(table);

    const nav = el("nav", "pagination");
    const prev = el("button", "", "previous");
    prev.disabled = response.page <= 1;
    prev.addEventListener("click", () => {
      this.state = withPage(this.state, response.page - 1);
      void this.search(true);
    });
    const next = el("button", "", "next");
    next.disabled = response.page * response.page_size >= response.total;
    next.addEventListener("click", () => {
      this.state = withPage(this.state, response.page + 1);
      void this.search(true);
    });
    nav.append(prev, el("span", "", ` page ${response.page} `), next);
    section.appendChild(nav);
  }

  private resultRow(summary: CaseSummary): HTMLElement {
    const row = el("tr", "result-row");
    row.dataset.caseId = summary.case_id;
    row.append(el("td", "", summary.case_id), el("td", "", summary.decision_date));
    const chips = el("td", "chips");
    for (const [slot, values] of Object.entries(summary.fields)) {
      for (const value of values.slice(0, CHIP_LIMIT)) {
        const chip = el("span", "chip", value);
        chip.title = slot;
        chip.style.backgroundColor = labelColor(slot);
        chips.appendChild(chip);
      }
    }
    row.appendChild(chips);
    row.addEventListener("click", () => void this.openCase(summary.case_id));
    return row;
  }

  async openCase(caseId: string): Promise<void> {
    const view = this.root.querySelector("#case-view") as HTMLElement;
    try {
      const detail = await this.api.caseDetail(caseId);
      view.textContent = "";
      view.appendChild(this.caseDetail(detail));
    } catch (err) {
      view.textContent = "";
      if (err instanceof ApiError && err.code === "not_found") {
        view.appendChild(el("p", "not-found", `no case with id ${caseId}`));
      } else {
        this.showError(err);
      }
    }
  }

  private caseDetail(detail: CaseDetail): HTMLElement {
    const box = el("article", "case-detail");
    box.appendChild(el("h2", "", `${detail.case_id} (${detail.decision_date})`));

    // Legend mirrors what is actually highlighted, so spans dropped by
    // segment() (out of bounds, overlapping) contribute no entry.
    const spanLabels = new Set<string>();
    const collect = (text: string, spans: { start: number; end: number; label: string }[]) => {
      for (const piece of segment(text, spans)) {
        if (piece.label !== null) spanLabels.add(piece.label);
      }
    };
    for (const sentence of detail.sentences) collect(sentence.text, sentence.spans);
    if (detail.cover) collect(detail.cover.text, detail.cover.spans);
    if (spanLabels.size) {
      const legend = el("div", "legend");
      for (const label of [...spanLabels].sort()) {
        const key = el("span", "legend-entry", label);
        key.style.backgroundColor = labelColor(label);
        legend.appendChild(key);
      }
      box.appendChild(legend);
    }

    const citations = el("div", "citations");
    for (const slot of CITATION_SLOTS) {
      for (const value of detail.fields[slot] ?? []) {
        const button = el("button", "copy-citation", `copy: ${value}`);
        button.addEventListener("click", () => {
          void navigator.clipboard?.writeText(value);
        });
        citations.appendChild(button);
      }
    }
    if (citations.childElementCount) box.appendChild(citations);

    if (detail.cover) {
      const cover = el("div", "cover-text");
      this.renderHighlighted(cover, detail.cover.text, detail.cover.spans);
      box.appendChild(cover);
    }
    for (const sentence of detail.sentences) {
      const para = el("p", "sentence");
      this.renderHighlighted(para, sentence.text, sentence.spans);
      box.appendChild(para);
    }
    return box;
  }

  private renderHighlighted(
    node: HTMLElement,
    text: string,
    spans: { start: number; end: number; label: string }[],
  ): void {
    for (const piece of segment(text, spans)) {
      if (piece.label === null) {
        node.appendChild(document.createTextNode(piece.text));
      } else {
        const mark = el("mark", "span-highlight", piece.text);
        mark.dataset.label = piece.label;
        mark.style.backgroundColor = labelColor(piece.label);
        node.appendChild(mark);
      }
    }
  }

  private showError(err: unknown): void {
    const banner = this.root.querySelector("#error-banner") as HTMLElement;
    banner.hidden = false;
    banner.textContent =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
  }

  private hideError(): void {
    const banner = this.root.querySelector("#error-banner") as HTMLElement;
    banner.hidden = true;
    banner.textContent = "";
  }
}

export function createApp(root: HTMLElement, api: ApiClient, url?: UrlControl): App {
  return new App(root, api, url);
}
