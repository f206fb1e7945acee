// Detail pane: everything known about the current selection.

import { lutTruthRows } from "./initcodec.js";
import type { GateDetail, ModuleEntry, NetDetail } from "./types.js";

function esc(text: unknown): string {
    return String(text).replace(/[&<>"']/g, (c) => ({
        "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;", "'": "&#39;",
    }[c] as string));
}

export function renderEmpty(el: HTMLElement): void {
    el.innerHTML = `<p class="hint">Click a gate for details.
        Shift-click adds to the selection; double-click focuses its neighborhood.</p>`;
}

export function renderMultiSelection(el: HTMLElement, count: number): void {
    el.innerHTML = `<h2>${count} gates selected</h2>
        <p class="hint">Group them into a module from the sidebar.</p>`;
}

export function renderGate(el: HTMLElement, detail: GateDetail,
                           modules: ModuleEntry[],
                           onNetClick: (netId: number) => void): void {
    const rows = detail.pins.map((p) => `
        <tr>
          <td>${esc(p.pin)}</td><td>${p.direction}</td>
          <td>${p.net !== null
              ? `<a href="#" data-net="${p.net}">${esc(p.net_name ?? p.net)}</a>`
              : "<i>unconnected</i>"}</td>
        </tr>`).join("");
    const data = Object.entries(detail.data).map(([k, v]) =>
        `<tr><td>${esc(k)}</td><td><code>${esc(v)}</code></td></tr>`).join("");
    const fns = detail.functions
        ? Object.entries(detail.functions).map(([pin, expr]) =>
            `<div class="fn"><b>${esc(pin)}</b> = <code>${esc(expr)}</code></div>`).join("")
        : `<p class="hint">sequential element: state, not a formula</p>`;
    const memberOf = modules.filter((m) => detail.modules.includes(m.id))
        .map((m) => esc(m.name)).join(", ") || "<i>none</i>";

    el.innerHTML = `
      <h2>${esc(detail.name)} <span class="tag">${esc(detail.type)}</span></h2>
      <p class="hint">gate #${detail.id} · ${esc(detail.category)} · modules: ${memberOf}</p>
      <h3>Pins</h3>
      <table><tr><th>pin</th><th>dir</th><th>net</th></tr>${rows}</table>
      ${data ? `<h3>Data</h3><table>${data}</table>` : ""}
      <h3>Function</h3>${fns}
      ${renderLutTable(detail)}`;
    el.querySelectorAll("a[data-net]").forEach((a) => {
        a.addEventListener("click", (ev) => {
            ev.preventDefault();
            onNetClick(parseInt((a as HTMLElement).dataset["net"]!, 10));
        });
    });
}

function renderLutTable(detail: GateDetail): string {
    if (detail.category !== "LUT") return "";
    const config = detail.data["INIT"];
    if (!config) return `<p class="hint">no config value set</p>`;
    const pins = detail.pins.filter((p) => p.direction === "IN").map((p) => p.pin);
    let rows;
    try {
        rows = lutTruthRows(config, pins);
    } catch (err) {
        return `<p class="hint">config not decodable: ${esc(err)}</p>`;
    }
    const header = [...pins].reverse().map((p) => `<th>${esc(p)}</th>`).join("");
    const body = rows.map((row) => {
        const cells = [...row.inputs].reverse().map((b) => `<td>${b}</td>`).join("");
        return `<tr>${cells}<td class="out">${row.output}</td></tr>`;
    }).join("");
    return `<h3>Truth table</h3>
        <table class="truth"><tr>${header}<th>out</th></tr>${body}</table>`;
}

export function renderNet(el: HTMLElement, net: NetDetail,
                          gateName: (id: number) => string,
                          onGateClick: (gateId: number) => void): void {
    const flag = net.global_input ? " · global input"
        : net.global_output ? " · global output" : "";
    const source = net.source
        ? `<a href="#" data-gate="${net.source.gate}">${esc(gateName(net.source.gate))}</a>.${esc(net.source.pin)}`
        : "<i>undriven</i>";
    const sinks = net.sinks.map((s) =>
        `<li><a href="#" data-gate="${s.gate}">${esc(gateName(s.gate))}</a>.${esc(s.pin)}</li>`)
        .join("") || "<li><i>none</i></li>";
    el.innerHTML = `
      <h2>${esc(net.name)} <span class="tag">net</span></h2>
      <p class="hint">net #${net.id}${flag}</p>
      <h3>Source</h3><p>${source}</p>
      <h3>Sinks (${net.sinks.length})</h3><ul>${sinks}</ul>`;
    el.querySelectorAll("a[data-gate]").forEach((a) => {
        a.addEventListener("click", (ev) => {
            ev.preventDefault();
            onGateClick(parseInt((a as HTMLElement).dataset["gate"]!, 10));
        });
    });
}
