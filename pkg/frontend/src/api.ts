import { ItemView, Progress, Score } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

/** Thin client for the rating service; the fetch function is injectable so
 *  tests can script server behaviour. */
export class ApiClient {
  constructor(
    private annotator: string,
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
    private base: string = "",
  ) {}

  async fetchItems(): Promise<ItemView[]> {
    const url = `${this.base}/api/items?annotator=${encodeURIComponent(this.annotator)}`;
    const response = await this.fetchFn(url);
    if (!response.ok) {
      throw new ApiError(response.status, `fetching items failed (${response.status})`);
    }
    const body = (await response.json()) as { items: ItemView[] };
    return body.items;
  }

  async submitRating(itemId: string, score: Score, comment: string): Promise<void> {
    const response = await this.fetchFn(`${this.base}/api/ratings`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        item_id: itemId,
        annotator_id: this.annotator,
        score,
        comment,
      }),
    });
    if (!response.ok) {
      let detail = `submission rejected (${response.status})`;
      try {
        const body = await response.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        /* keep the generic message */
      }
      throw new ApiError(response.status, detail);
    }
  }

  async fetchProgress(): Promise<Progress> {
    const url = `${this.base}/api/progress?annotator=${encodeURIComponent(this.annotator)}`;
    const response = await this.fetchFn(url);
    if (!response.ok) {
      throw new ApiError(response.status, `fetching progress failed (${response.status})`);
    }
    return (await response.json()) as Progress;
  }
}
