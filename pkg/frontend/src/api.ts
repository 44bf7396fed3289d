import { FilterState, serialize } from "./filter-state.js";
import type {
  CaseDetail,
  CasesResponse,
  LabelsResponse,
  StatsResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async get<T>(path: string): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.base + path);
    } catch (err) {
      throw new ApiError("unreachable", `service not reachable: ${String(err)}`);
    }
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ApiError(body.code ?? "unknown", body.message ?? response.statusText);
    }
    return body as T;
  }

  labels(): Promise<LabelsResponse> {
    return this.get("/labels");
  }

  cases(state: FilterState): Promise<CasesResponse> {
    const query = serialize(state);
    return this.get(query ? `/cases?${query}` : "/cases");
  }

  caseDetail(caseId: string): Promise<CaseDetail> {
    return this.get(`/cases/${encodeURIComponent(caseId)}`);
  }

  stats(): Promise<StatsResponse> {
    return this.get("/stats");
  }
}
