// Shapes returned by the session service; the console renders these verbatim
// and never derives tuner state locally.

export interface IndexView {
  id: number;
  name: string;
  benefit: number;
  create_cost: number;
  drop_cost: number;
  recommended: boolean;
  materialized: boolean;
  monitored: boolean;
}

export interface PartitionPart {
  indices: number[];
  states: number;
}

export interface MetricsRow {
  n: number;
  algo: string;
  tot_work: number;
  opt_tot_work: number;
  ratio: number;
  oracle_calls: number;
  wall_ms: number;
}

export interface SessionEvent {
  kind: "statement" | "feedback" | "materialize";
  position: number;
  plus?: number[];
  minus?: number[];
  create?: number[];
  drop?: number[];
}

export interface SessionState {
  id: string;
  cursor: number;
  length: number;
  exhausted: boolean;
  recommendation: IndexView[];
  materialized: number[];
  pending_votes: { plus: number[]; minus: number[] };
  partition: PartitionPart[];
  state_count: number;
  state_budget: number;
  universe: IndexView[];
  metrics: MetricsRow[];
  events: SessionEvent[];
}

export interface SessionSpec {
  phases?: number;
  per_phase?: number;
  seed?: number;
  idx_cnt?: number;
  state_cnt?: number;
  hist_size?: number;
  partition?: "fixed" | "auto";
}

export interface CreatedSession {
  id: string;
  length: number;
  recommendation: number[];
}
