import { ratioChart } from "./chart.js";
import type { ConsoleStore } from "./state.js";
import type { IndexView, SessionEvent } from "./types.js";

// Rendering is a pure projection of the store: template strings in, DOM out.
// main.ts re-invokes render() after every mutation and poll tick.

function money(value: number): string {
  return Number.isInteger(value) ? value.toFixed(0) : value.toFixed(2);
}

function indexRow(store: ConsoleStore, entry: IndexView): string {
  const plus = store.plusBasket.has(entry.id);
  const minus = store.minusBasket.has(entry.id);
  const flags = [
    entry.recommended ? `<span class="badge badge-rec">recommended</span>` : "",
    entry.materialized ? `<span class="badge badge-mat">materialized</span>` : "",
    store.overridden.has(entry.id)
      ? `<span class="badge badge-over">overridden by workload</span>`
      : "",
  ].join("");
  return `<tr data-id="${entry.id}">
    <td class="mono">${entry.name}</td>
    <td class="num">${entry.benefit.toFixed(2)}</td>
    <td class="num">${money(entry.create_cost)} / ${money(entry.drop_cost)}</td>
    <td>${flags}</td>
    <td>
      <button class="vote vote-plus ${plus ? "on" : ""}" data-id="${entry.id}" data-sign="plus">+1</button>
      <button class="vote vote-minus ${minus ? "on" : ""}" data-id="${entry.id}" data-sign="minus">-1</button>
    </td>
  </tr>`;
}

function eventLine(event: SessionEvent): string {
  if (event.kind === "statement") return `<li>#${event.position} statement analyzed</li>`;
  if (event.kind === "feedback")
    return `<li>#${event.position} votes +[${(event.plus ?? []).join(",")}] -[${(event.minus ?? []).join(",")}]</li>`;
  return `<li>#${event.position} materialize +[${(event.create ?? []).join(",")}] -[${(event.drop ?? []).join(",")}]</li>`;
}

export function render(store: ConsoleStore, root: HTMLElement): void {
  const state = store.state;
  if (!state) {
    root.innerHTML = `<section class="panel"><p>connecting…</p></section>`;
    return;
  }
  const overlap = store.basketOverlap();
  const recommended = state.recommendation.map((e) => indexRow(store, e)).join("");
  const others = state.universe
    .filter((e) => !e.recommended && (e.monitored || e.benefit > 0))
    .map((e) => indexRow(store, e))
    .join("");
  const parts = state.partition
    .map(
      (part) =>
        `<li><span class="mono">{${part.indices.join(", ")}}</span> <span class="dim">${part.states} states</span></li>`,
    )
    .join("");
  const timeline = state.events.slice(-12).reverse().map(eventLine).join("");
  const lastRow = state.metrics[state.metrics.length - 1];
  root.innerHTML = `
  <header>
    <h1>wftune console</h1>
    <span class="dim">session ${state.id} · statement ${state.cursor}/${state.length}</span>
  </header>
  <section class="panel controls">
    <button id="step-1" ${store.busy || state.exhausted ? "disabled" : ""}>step 1</button>
    <button id="step-10" ${store.busy || state.exhausted ? "disabled" : ""}>step 10</button>
    <button id="accept" ${store.busy ? "disabled" : ""}>accept recommendation</button>
    <button id="submit-votes" ${store.canSubmitVotes() ? "" : "disabled"}>submit votes</button>
    ${overlap.length ? `<span class="warn">overlapping votes on ${overlap.join(", ")}</span>` : ""}
    <span class="dim">pending +[${state.pending_votes.plus.join(",")}] -[${state.pending_votes.minus.join(",")}]</span>
  </section>
  <section class="panel">
    <h2>recommendation</h2>
    <table id="recommendation"><thead><tr><th>index</th><th>benefit</th><th>create/drop</th><th></th><th>vote</th></tr></thead>
    <tbody>${recommended || `<tr><td colspan="5" class="dim">empty configuration</td></tr>`}</tbody></table>
    <h2>other candidates</h2>
    <table id="candidates"><tbody>${others}</tbody></table>
  </section>
  <section class="panel split">
    <div>
      <h2>partition</h2>
      <ul id="partition">${parts}</ul>
      <p class="dim">${state.state_count} of ${state.state_budget} states tracked</p>
      <h2>timeline</h2>
      <ul id="timeline">${timeline}</ul>
    </div>
    <div>
      <h2>total work vs optimum</h2>
      ${ratioChart(state.metrics)}
      <p class="dim">${lastRow ? `tot ${lastRow.tot_work} · opt ${lastRow.opt_tot_work} · ${lastRow.oracle_calls} what-if calls` : "no metrics yet"}</p>
    </div>
  </section>
  <div id="toasts">${store.toasts.slice(-3).map((t) => `<p class="toast">${t}</p>`).join("")}</div>`;
}
