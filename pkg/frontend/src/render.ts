import { ItemView, Progress, Score, SCORES } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function scoreLabel(score: Score): string {
  if (score === 1) return "1 - bad";
  if (score === 5) return "5 - great";
  return String(score);
}

/** The rating card for one sentence pair.
 *
 * A is the original sentence, B the re-write; the markup deliberately
 * carries no rule or dataset information.  The previously chosen score (if
 * any) is pre-selected and the comment field pre-filled.
 */
export function renderItem(item: ItemView, position: number, total: number): string {
  const selected = item.rating ? item.rating.score : null;
  const buttons = SCORES.map((score) => {
    const cls = score === selected ? "score selected" : "score";
    return `<button type="button" class="${cls}" data-score="${score}">` +
      `${escapeHtml(scoreLabel(score))}</button>`;
  }).join("\n      ");
  const comment = item.rating ? escapeHtml(item.rating.comment) : "";
  return `
<section class="pair" data-item-id="${escapeHtml(item.item_id)}">
  <p class="position">Sentence pair ${position} of ${total}</p>
  <div class="sentence"><span class="side">A</span> <span class="text">${escapeHtml(item.sentence_a)}</span></div>
  <div class="sentence"><span class="side">B</span> <span class="text">${escapeHtml(item.sentence_b)}</span></div>
  <p class="prompt">How natural and fluent is B? (keys 1–5 select a score)</p>
  <div class="scores">
      ${buttons}
  </div>
  <label class="comment">Comments (free form):
    <textarea id="comment" rows="2">${comment}</textarea>
  </label>
  <button type="button" id="submit">Submit</button>
  <p id="error" class="error" hidden></p>
</section>`;
}

export function renderProgress(progress: Progress, pending: number = 0): string {
  const queued = pending > 0 ? ` (${pending} queued for retry)` : "";
  return `<span class="progress">${progress.rated} / ${progress.total}${queued}</span>`;
}

export function renderComplete(progress: Progress): string {
  return `
<section class="complete">
  <p>All ${progress.total} sentence pairs are rated. Thank you!</p>
</section>`;
}

export function renderFetchError(message: string): string {
  return `
<section class="fetch-error">
  <p class="error">Could not load the evaluation set: ${escapeHtml(message)}</p>
  <button type="button" id="retry">Retry</button>
</section>`;
}
