import { ApiClient } from "./api.js";
import { render } from "./render.js";
import { ConsoleStore, POLL_INTERVAL_MS } from "./state.js";

const SERVICE_URL =
  new URLSearchParams(location.search).get("service") ?? "http://127.0.0.1:8787";

const store = new ConsoleStore(new ApiClient(SERVICE_URL));
const root = document.getElementById("app") as HTMLElement;

function repaint(): void {
  render(store, root);
}

root.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  if (target.matches("button.vote")) {
    store.toggleVote(Number(target.dataset.id), target.dataset.sign as "plus" | "minus");
    repaint();
  } else if (target.id === "step-1") {
    void store.step(1).then(repaint);
  } else if (target.id === "step-10") {
    void store.step(10).then(repaint);
  } else if (target.id === "accept") {
    void store.acceptRecommendation().then(repaint);
  } else if (target.id === "submit-votes") {
    void store.submitVotes().then(repaint);
  }
});

async function boot(): Promise<void> {
  await store.create({ phases: 8, per_phase: 50, seed: 0, partition: "auto" });
  repaint();
  setInterval(() => {
    void store.tick().then(repaint);
  }, POLL_INTERVAL_MS);
}

void boot();
