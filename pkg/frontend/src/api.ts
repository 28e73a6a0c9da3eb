/** Typed client for the corpusel HTTP/JSON API.
 *
 * Mutations are queued so at most one is in flight per page; the server's
 * session representation is the single source of truth and every mutation
 * resolves to a fresh copy of it (or triggers a re-fetch by the caller).
 */

export interface PeriodDto {
  start_year: number;
  end_year: number;
}

export interface PreviewDto {
  doc_id: string;
  snippet: string;
  mention_offset: number;
}

export interface EntityDto {
  entity: string;
  label: string;
  temporal_class: "in_period" | "out_of_period" | "borderline" | "undated";
  selected: boolean;
  documents: number;
  mentions: number;
  absent: boolean;
  previews: PreviewDto[];
}

export interface CategoryDto {
  category: string;
  label: string;
  depth: number;
  selected: boolean;
  auto_selected: boolean;
  dated_member_count: number;
  out_of_period_count: number;
  entities: EntityDto[];
}

export interface GroupDto {
  root: string;
  categories: CategoryDto[];
}

export interface SessionDto {
  id: string;
  roots: string[];
  period: PeriodDto;
  max_depth: number;
  groups: GroupDto[];
  effective_query: string[];
  result_count: number;
  missing_entities: string[];
  assessments: Record<string, string>;
  relevant_count: number;
}

export interface AnnotationDto {
  entity: string;
  begin: number;
  end: number;
  surface: string;
}

export interface ResultDocDto {
  doc_id: string;
  date: string;
  speaker: string;
  party: string;
  debate_title: string;
  text: string;
  verdict: "relevant" | "irrelevant" | "unjudged";
  matched_entities: string[];
  mention_count: number;
  annotations: AnnotationDto[];
}

export interface ResultsPageDto {
  session_id: string;
  page: number;
  page_size: number;
  total_documents: number;
  total_pages: number;
  documents: ResultDocDto[];
}

export interface AggregateRowDto {
  key: number | string;
  documents: number;
  mentions: number;
}

export interface CategoryMatchDto {
  id: string;
  label: string;
}

export type Verdict = "relevant" | "irrelevant" | "unjudged";

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

async function parseResponse<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (body.error) {
    throw new ApiError(body.error.code, body.error.message, response.status);
  }
  return body as T;
}

export class Client {
  private mutationQueue: Promise<unknown> = Promise.resolve();

  constructor(private base: string = "") {}

  private async get<T>(path: string): Promise<T> {
    return parseResponse<T>(await fetch(this.base + path));
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    // serialize mutations client-side: one in flight at a time
    const next = this.mutationQueue.then(async () => {
      const response = await fetch(this.base + path, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(payload),
      });
      return parseResponse<T>(response);
    });
    this.mutationQueue = next.catch(() => undefined);
    return next;
  }

  async health(): Promise<{ documents: number; entities: number; categories: number }> {
    return this.get("/health");
  }

  async categories(query: string): Promise<CategoryMatchDto[]> {
    const encoded = encodeURIComponent(query);
    const body = await this.get<{ matches: CategoryMatchDto[] }>(`/categories?q=${encoded}`);
    return body.matches;
  }

  async createSession(
    roots: string[],
    period: PeriodDto,
    maxDepth?: number,
  ): Promise<SessionDto> {
    const payload: Record<string, unknown> = { roots, period };
    if (maxDepth !== undefined) payload.max_depth = maxDepth;
    const body = await this.post<{ session: SessionDto }>("/sessions", payload);
    return body.session;
  }

  async getSession(id: string): Promise<SessionDto> {
    const body = await this.get<{ session: SessionDto }>(`/sessions/${id}`);
    return body.session;
  }

  async toggle(id: string, kind: "category" | "entity", target: string): Promise<SessionDto> {
    const body = await this.post<{ session: SessionDto }>(`/sessions/${id}/toggle`, {
      kind,
      target,
    });
    return body.session;
  }

  async results(id: string, page: number): Promise<ResultsPageDto> {
    return this.get(`/sessions/${id}/results?page=${page}`);
  }

  async assess(id: string, docId: string, verdict: Verdict): Promise<{ relevant_count: number }> {
    return this.post(`/sessions/${id}/assess`, { doc_id: docId, verdict });
  }

  async aggregate(id: string, dimension: "year" | "party"): Promise<AggregateRowDto[]> {
    const body = await this.get<{ rows: AggregateRowDto[] }>(
      `/sessions/${id}/aggregate?dimension=${dimension}`,
    );
    return body.rows;
  }

  async missing(id: string): Promise<string[]> {
    const body = await this.get<{ missing_entities: string[] }>(`/sessions/${id}/missing`);
    return body.missing_entities;
  }

  async exportCorpus(id: string, includeUnjudged: boolean): Promise<string> {
    const response = await fetch(`${this.base}/sessions/${id}/export`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ include_unjudged: includeUnjudged }),
    });
    if (!response.ok) {
      const body = await response.json();
      throw new ApiError(body.error?.code ?? "internal", body.error?.message ?? "", response.status);
    }
    return response.text();
  }
}
