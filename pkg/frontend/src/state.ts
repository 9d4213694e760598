import { ApiClient, ApiError } from "./api.js";
import type { SessionSpec, SessionState } from "./types.js";

export const POLL_INTERVAL_MS = 1000;

// The store holds the latest authoritative snapshot plus console-local input
// (the vote basket). Every mutation round-trips through the service and the
// next render always comes from getState; nothing tuner-related is computed
// here.
export class ConsoleStore {
  state: SessionState | null = null;
  plusBasket = new Set<number>();
  minusBasket = new Set<number>();
  overridden = new Set<number>();
  toasts: string[] = [];
  busy = false;

  constructor(private api: ApiClient) {}

  get sessionId(): string {
    if (!this.state) throw new Error("no session yet");
    return this.state.id;
  }

  basketOverlap(): number[] {
    return [...this.plusBasket].filter((id) => this.minusBasket.has(id)).sort((a, b) => a - b);
  }

  canSubmitVotes(): boolean {
    return (
      !this.busy &&
      this.basketOverlap().length === 0 &&
      (this.plusBasket.size > 0 || this.minusBasket.size > 0)
    );
  }

  toggleVote(id: number, sign: "plus" | "minus"): void {
    const basket = sign === "plus" ? this.plusBasket : this.minusBasket;
    if (basket.has(id)) basket.delete(id);
    else basket.add(id);
  }

  async create(spec: SessionSpec): Promise<void> {
    const created = await this.api.createSession(spec);
    this.state = await this.api.getState(created.id);
  }

  /** One poll cycle: re-read the authoritative snapshot. */
  async tick(): Promise<void> {
    if (!this.state || this.busy) return;
    this.state = await this.api.getState(this.state.id);
  }

  async step(count: number): Promise<void> {
    await this.mutate(async () => {
      // votes pending before the statement may lawfully be overridden by it;
      // flag those that disappear from the recommendation
      const pendingPlus = this.state?.pending_votes.plus ?? [];
      await this.api.step(this.sessionId, count);
      const fresh = await this.api.getState(this.sessionId);
      const recommended = new Set(fresh.recommendation.map((e) => e.id));
      this.overridden = new Set(pendingPlus.filter((id) => !recommended.has(id)));
      this.state = fresh;
    });
  }

  async submitVotes(): Promise<void> {
    if (!this.canSubmitVotes()) return;
    await this.mutate(async () => {
      await this.api.feedback(
        this.sessionId,
        [...this.plusBasket].sort((a, b) => a - b),
        [...this.minusBasket].sort((a, b) => a - b),
      );
      this.plusBasket.clear();
      this.minusBasket.clear();
      this.overridden.clear();
      this.state = await this.api.getState(this.sessionId);
    });
  }

  /** Make the materialized set equal to the current recommendation. */
  async acceptRecommendation(): Promise<void> {
    await this.mutate(async () => {
      const snapshot = this.state!;
      const recommended = snapshot.recommendation.map((e) => e.id);
      const held = new Set(snapshot.materialized);
      const create = recommended.filter((id) => !held.has(id));
      const drop = snapshot.materialized.filter(
        (id) => !recommended.includes(id),
      );
      await this.api.materialize(this.sessionId, create, drop);
      this.state = await this.api.getState(this.sessionId);
    });
  }

  private async mutate(action: () => Promise<void>): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    try {
      await action();
    } catch (err) {
      if (err instanceof ApiError) this.toasts.push(err.message);
      else this.toasts.push(String(err));
    } finally {
      this.busy = false;
    }
  }
}
