export type Score = 1 | 2 | 3 | 4 | 5 | "idk";

export const SCORES: Score[] = [1, 2, 3, 4, 5, "idk"];

export interface Rating {
  score: Score;
  comment: string;
  timestamp?: string;
}

/** What the server exposes per item: the pair and this annotator's rating.
 *  Rule and dataset names never reach the client (annotators stay blind). */
export interface ItemView {
  item_id: string;
  sentence_a: string;
  sentence_b: string;
  rating: Rating | null;
}

export interface Progress {
  rated: number;
  total: number;
}

export function isValidScore(value: unknown): value is Score {
  return value === "idk" || (typeof value === "number" && SCORES.includes(value as Score));
}
