export type Span = { start: number; end: number; label: string };

export type LabelInfo = {
  slot: string;
  part: string;
  label: string;
  group: string;
  infrequent: boolean;
};

export type LabelsResponse = { slots: LabelInfo[] };

export type CaseSummary = {
  case_id: string;
  decision_date: string;
  fields: Record<string, string[]>;
  flags: Record<string, unknown>[];
};

export type CasesResponse = {
  total: number;
  page: number;
  page_size: number;
  results: CaseSummary[];
};

export type SentenceView = { index: number; text: string; spans: Span[] };

export type CaseDetail = {
  case_id: string;
  decision_date: string;
  fields: Record<string, string[]>;
  flags: Record<string, unknown>[];
  cover: { text: string; spans: Span[] } | null;
  sentences: SentenceView[];
};

export type SlotStats = {
  slot: string;
  cases_with_extraction: number;
  total_extractions: number;
  values: string[] | null;
};

export type StatsResponse = { cases: number; slots: SlotStats[] };
