import { ApiClient } from "./api.js";
import { renderComplete, renderFetchError, renderItem, renderProgress } from "./render.js";
import { Session } from "./state.js";
import { isValidScore, Score } from "./types.js";

function annotatorId(): string {
  const params = new URLSearchParams(window.location.search);
  const fromUrl = params.get("annotator");
  if (fromUrl) {
    window.localStorage.setItem("mundart.annotator", fromUrl);
    return fromUrl;
  }
  const stored = window.localStorage.getItem("mundart.annotator");
  if (stored) return stored;
  const entered = window.prompt("Annotator id:") || "anonymous";
  window.localStorage.setItem("mundart.annotator", entered);
  return entered;
}

function selectedScore(root: HTMLElement): Score | null {
  const active = root.querySelector<HTMLButtonElement>("button.score.selected");
  if (!active) return null;
  const raw = active.dataset.score;
  const value = raw === "idk" ? "idk" : Number(raw);
  return isValidScore(value) ? value : null;
}

function draw(session: Session, root: HTMLElement, status: HTMLElement): void {
  status.innerHTML = renderProgress(session.progress(), session.pendingCount());
  const item = session.current();
  if (item === null) {
    root.innerHTML = renderComplete(session.progress());
    return;
  }
  root.innerHTML = renderItem(item, session.index + 1, session.items.length);

  for (const button of root.querySelectorAll<HTMLButtonElement>("button.score")) {
    button.addEventListener("click", () => {
      root.querySelectorAll("button.score").forEach((b) => b.classList.remove("selected"));
      button.classList.add("selected");
    });
  }
  root.querySelector<HTMLButtonElement>("#submit")!.addEventListener("click", async () => {
    const score = selectedScore(root);
    const errorBox = root.querySelector<HTMLElement>("#error")!;
    if (score === null) {
      errorBox.textContent = "Pick a score (or idk) first.";
      errorBox.hidden = false;
      return;
    }
    const comment = root.querySelector<HTMLTextAreaElement>("#comment")!.value;
    const result = await session.rate(score, comment);
    if (!result.ok) {
      errorBox.textContent = result.error ?? "Submission failed.";
      errorBox.hidden = false;
      return;
    }
    draw(session, root, status);
  });
}

function bindKeys(session: Session, root: HTMLElement): void {
  document.addEventListener("keydown", (event) => {
    if (event.target instanceof HTMLTextAreaElement) return;
    if (!/^[1-5]$/.test(event.key)) return;
    const button = root.querySelector<HTMLButtonElement>(
      `button.score[data-score="${event.key}"]`);
    if (button) button.click();
  });
}

async function init(): Promise<void> {
  const root = document.getElementById("app")!;
  const status = document.getElementById("status")!;
  const api = new ApiClient(annotatorId());
  try {
    const session = await Session.start(api, window.localStorage);
    bindKeys(session, root);
    draw(session, root, status);
    // retry queued submissions in the background
    window.setInterval(() => {
      void session.flushQueue().then(() => {
        status.innerHTML = renderProgress(session.progress(), session.pendingCount());
      });
    }, 15_000);
  } catch (err) {
    root.innerHTML = renderFetchError(err instanceof Error ? err.message : String(err));
    root.querySelector<HTMLButtonElement>("#retry")?.addEventListener("click", () => {
      void init();
    });
  }
}

void init();
