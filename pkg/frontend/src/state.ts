import { ApiClient, ApiError } from "./api.js";
import { ItemView, Progress, Score } from "./types.js";

export interface PendingRating {
  item_id: string;
  score: Score;
  comment: string;
}

export interface SubmitResult {
  ok: boolean;
  queued?: boolean;
  error?: string;
}

/** Minimal storage interface; window.localStorage satisfies it. */
export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

const QUEUE_KEY = "mundart.pending";

export function firstUnratedIndex(items: ItemView[]): number {
  const index = items.findIndex((item) => item.rating === null);
  return index === -1 ? items.length : index;
}

/** One annotator's rating session.
 *
 * The server is the source of truth; submissions that fail with a network
 * error are queued (and persisted) for retry, while submissions the server
 * rejects surface as inline errors without advancing.
 */
export class Session {
  items: ItemView[];
  index: number;
  private queue: PendingRating[];

  constructor(
    items: ItemView[],
    private api: ApiClient,
    private store: KeyValueStore | null = null,
  ) {
    this.items = items;
    this.queue = this.loadQueue();
    for (const pending of this.queue) {
      this.applyLocally(pending.item_id, pending.score, pending.comment);
    }
    this.index = firstUnratedIndex(this.items);
  }

  /** Fetch the item list and retry anything still queued from a previous
   *  session, so a reload resumes exactly where the annotator left off. */
  static async start(
    api: ApiClient,
    store: KeyValueStore | null = null,
  ): Promise<Session> {
    const session = new Session(await api.fetchItems(), api, store);
    await session.flushQueue();
    return session;
  }

  current(): ItemView | null {
    return this.index < this.items.length ? this.items[this.index] : null;
  }

  isComplete(): boolean {
    return this.items.every((item) => item.rating !== null);
  }

  progress(): Progress {
    return {
      rated: this.items.filter((item) => item.rating !== null).length,
      total: this.items.length,
    };
  }

  goTo(index: number): void {
    if (index >= 0 && index < this.items.length) {
      this.index = index;
    }
  }

  async rate(score: Score, comment: string): Promise<SubmitResult> {
    const item = this.current();
    if (item === null) {
      return { ok: false, error: "nothing left to rate" };
    }
    try {
      await this.api.submitRating(item.item_id, score, comment);
    } catch (err) {
      if (err instanceof ApiError) {
        return { ok: false, error: err.message };
      }
      // offline: keep the rating locally and retry later
      this.enqueue({ item_id: item.item_id, score, comment });
      this.applyLocally(item.item_id, score, comment);
      this.advance();
      return { ok: true, queued: true };
    }
    this.applyLocally(item.item_id, score, comment);
    this.advance();
    return { ok: true };
  }

  /** Retry queued submissions; returns how many are still pending. */
  async flushQueue(): Promise<number> {
    const remaining: PendingRating[] = [];
    for (const pending of this.queue) {
      try {
        await this.api.submitRating(pending.item_id, pending.score, pending.comment);
      } catch (err) {
        if (err instanceof ApiError) {
          continue; // permanently rejected; dropping it beats retrying forever
        }
        remaining.push(pending);
      }
    }
    this.queue = remaining;
    this.saveQueue();
    return this.queue.length;
  }

  pendingCount(): number {
    return this.queue.length;
  }

  private advance(): void {
    this.index = firstUnratedIndex(this.items);
  }

  private applyLocally(itemId: string, score: Score, comment: string): void {
    const item = this.items.find((candidate) => candidate.item_id === itemId);
    if (item) {
      item.rating = { score, comment };
    }
  }

  private enqueue(pending: PendingRating): void {
    this.queue = this.queue.filter((other) => other.item_id !== pending.item_id);
    this.queue.push(pending);
    this.saveQueue();
  }

  private loadQueue(): PendingRating[] {
    if (!this.store) return [];
    try {
      const raw = this.store.getItem(QUEUE_KEY);
      return raw ? (JSON.parse(raw) as PendingRating[]) : [];
    } catch {
      return [];
    }
  }

  private saveQueue(): void {
    if (!this.store) return;
    if (this.queue.length === 0) {
      this.store.removeItem(QUEUE_KEY);
    } else {
      this.store.setItem(QUEUE_KEY, JSON.stringify(this.queue));
    }
  }
}
