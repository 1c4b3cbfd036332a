/** Typed client for the gateway's JSON API. The UI talks to nothing else. */

export interface Suggestion {
  entity_id: string;
  title: string;
  views: number;
  matched_surface: string;
}

export interface SuggestResponse {
  query: string;
  language: string;
  suggestions: Suggestion[];
}

export interface LinkedResultRow {
  rank: number;
  title: string;
  snippet: string;
  live_link: string;
  archive_link: string | null;
  archived: boolean | null;
  first_capture: string | null;
  last_capture: string | null;
  lookup_failed: boolean;
}

export interface SearchResponse {
  entity: string;
  language: string;
  page: number;
  retrieved_at: string | null;
  provider_id: string;
  total_cached_results: number;
  results: LinkedResultRow[];
}

export interface RelatedEntity {
  entity_id: string;
  title: string;
  score: number;
  views: number;
}

export interface RelatedResponse {
  entity: string;
  language: string;
  related: RelatedEntity[];
}

export interface InterlanguageResponse {
  title: string;
  from: string;
  to: string;
  mapped_title: string | null;
}

/** Minimal fetch shape so tests can script responses. */
export type FetchLike = (url: string) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(private readonly fetchImpl: FetchLike = (url) => fetch(url)) {}

  private async get<T>(path: string, params: Record<string, string>): Promise<T> {
    const query = new URLSearchParams(params).toString();
    const response = await this.fetchImpl(`${path}?${query}`);
    if (!response.ok) {
      throw new ApiError(response.status, `${path} failed with ${response.status}`);
    }
    return (await response.json()) as T;
  }

  suggest(q: string, lang: string, limit = 10): Promise<SuggestResponse> {
    return this.get("/api/suggest", { q, lang, limit: String(limit) });
  }

  search(
    entity: string,
    lang: string,
    page = 1,
    timepoint?: string,
  ): Promise<SearchResponse> {
    const params: Record<string, string> = { entity, lang, page: String(page) };
    if (timepoint) params.timepoint = timepoint;
    return this.get("/api/search", params);
  }

  related(entity: string, lang: string, limit = 8): Promise<RelatedResponse> {
    return this.get("/api/related", { entity, lang, limit: String(limit) });
  }

  interlanguage(title: string, from: string, to: string): Promise<InterlanguageResponse> {
    return this.get("/api/interlanguage", { title, from, to });
  }
}
