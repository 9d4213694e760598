import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { render } from "../src/render.js";
import { ConsoleStore } from "../src/state.js";

// Round trip against a real service process: the console must show exactly
// what the tuner decided, within one poll cycle of any action.

const PORT = 8870 + Math.floor(Math.random() * 100);
const BASE = `http://127.0.0.1:${PORT}`;
let server: ChildProcess;

async function waitForService(): Promise<void> {
  for (let attempt = 0; attempt < 60; attempt++) {
    try {
      await fetch(`${BASE}/sessions/probe`);
      return;
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 500));
    }
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  server = spawn("python3", ["-m", "wftune", "serve", "--port", String(PORT)], {
    stdio: "ignore",
  });
  await waitForService();
});

afterAll(() => {
  server?.kill();
});

describe("console against a live service", () => {
  it("vote, poll, accept round trip", async () => {
    const store = new ConsoleStore(new ApiClient(BASE));
    await store.create({ phases: 2, per_phase: 10, seed: 1, partition: "auto" });
    await store.step(3);

    const candidate = store.state!.universe.find((e) => !e.recommended);
    expect(candidate).toBeDefined();
    store.toggleVote(candidate!.id, "plus");
    await store.submitVotes();
    await store.tick(); // one poll cycle

    document.body.innerHTML = `<main id="app"></main>`;
    const root = document.getElementById("app") as HTMLElement;
    render(store, root);
    const recommendation = root.querySelector("#recommendation")!;
    expect(recommendation.textContent).toContain(candidate!.name);
    const recommendedIds = store.state!.recommendation.map((e) => e.id);
    expect(recommendedIds).toContain(candidate!.id);

    await store.acceptRecommendation();
    expect(store.state!.materialized).toEqual(
      store.state!.recommendation.map((e) => e.id).sort((a, b) => a - b),
    );
    expect(store.toasts).toEqual([]);

    // the workload may lawfully override the vote later, but the pending
    // window is closed by the next statement either way
    await store.step(1);
    await store.tick();
    expect(store.state!.pending_votes).toEqual({ plus: [], minus: [] });
  });

  it("stepping past the end surfaces the conflict as a toast", async () => {
    const store = new ConsoleStore(new ApiClient(BASE));
    await store.create({ phases: 1, per_phase: 5, seed: 2 });
    await store.step(5);
    await store.step(1);
    expect(store.toasts.some((t) => t.startsWith("HTTP 409"))).toBe(true);
  });
});
