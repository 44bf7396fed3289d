// Search state lives in the URL query string in exactly the shape the
// /cases endpoint accepts, so a shared link replays the same API call.

export type FilterClause = { slot: string; value: string; exact: boolean };

export type FilterState = {
  clauses: FilterClause[];
  dateFrom: string;
  dateTo: string;
  page: number;
};

export function emptyState(): FilterState {
  return { clauses: [], dateFrom: "", dateTo: "", page: 1 };
}

// Canonical order: clauses first, then one mode override per exact slot in
// first-occurrence order, then from/to, then page (omitted on page 1).
// serialize(deserialize(q)) === q holds for any string serialize can emit.
export function serialize(state: FilterState): string {
  const params = new URLSearchParams();
  for (const clause of state.clauses) {
    params.append(`label.${clause.slot}`, clause.value);
  }
  const seen = new Set<string>();
  for (const clause of state.clauses) {
    if (clause.exact && !seen.has(clause.slot)) {
      params.append(`mode.${clause.slot}`, "exact");
      seen.add(clause.slot);
    }
  }
  if (state.dateFrom) params.set("from", state.dateFrom);
  if (state.dateTo) params.set("to", state.dateTo);
  if (state.page > 1) params.set("page", String(state.page));
  return params.toString();
}

export function deserialize(query: string): FilterState {
  const params = new URLSearchParams(query);
  const exactSlots = new Set<string>();
  for (const [key, value] of params.entries()) {
    if (key.startsWith("mode.") && value === "exact") {
      exactSlots.add(key.slice("mode.".length));
    }
  }
  const state = emptyState();
  for (const [key, value] of params.entries()) {
    if (key.startsWith("label.")) {
      const slot = key.slice("label.".length);
      state.clauses.push({ slot, value, exact: exactSlots.has(slot) });
    }
  }
  state.dateFrom = params.get("from") ?? "";
  state.dateTo = params.get("to") ?? "";
  const page = Number(params.get("page") ?? "1");
  state.page = Number.isInteger(page) && page > 1 ? page : 1;
  return state;
}

export function withPage(state: FilterState, page: number): FilterState {
  return { ...state, clauses: state.clauses.map((c) => ({ ...c })), page };
}
