// Analysis workbench: launch jobs, inspect results, apply patches.

import { api, waitForJob } from "./api.js";
import { stateCircleLayout } from "./stategraph.js";
import type {
    FsmReport,
    HarpoonReport,
    SccReport,
    StateGraphReport,
    WatermarkReport,
} from "./types.js";

function esc(text: unknown): string {
    return String(text).replace(/[&<>"']/g, (c) => ({
        "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;", "'": "&#39;",
    }[c] as string));
}

export type WorkbenchCallbacks = {
    onSelectGates: (ids: number[]) => void;
    onMutated: () => void;
    setStatus: (text: string) => void;
};

export class Workbench {
    private results: HTMLElement;

    constructor(private root: HTMLElement, private callbacks: WorkbenchCallbacks) {
        this.results = root.querySelector("#wb-results") as HTMLElement;
        this.bindButton("#wb-fsm", () => this.runFsm());
        this.bindButton("#wb-scc", () => this.runScc());
        this.bindButton("#wb-watermark", () => this.runWatermark());
        this.bindButton("#wb-export", () => this.exportVerilog());
    }

    private bindButton(selector: string, handler: () => Promise<void>): void {
        const button = this.root.querySelector(selector) as HTMLButtonElement;
        button.addEventListener("click", () => {
            button.disabled = true;
            handler()
                .catch((err) => this.callbacks.setStatus(`error: ${err.message ?? err}`))
                .finally(() => { button.disabled = false; });
        });
    }

    private async runJob<T>(kind: string, body: Record<string, unknown> = {}): Promise<T> {
        this.callbacks.setStatus(`${kind} analysis running…`);
        const { job } = await api.startAnalysis(kind, body);
        const status = await waitForJob(job);
        if (status.status === "FAILED") throw new Error(status.error ?? "analysis failed");
        this.callbacks.setStatus(`${kind} analysis done`);
        return status.result as T;
    }

    async runFsm(): Promise<void> {
        const report = await this.runJob<FsmReport>("fsm");
        const rows = report.candidates.map((c) => `
            <tr>
              <td>${c.index}</td>
              <td>${c.state_ffs.map((f) => esc(f.name)).join(", ")}</td>
              <td>${c.gates.length}</td>
              <td>${c.inputs.map((i) => esc(i.name)).join(", ") || "—"}</td>
              <td>
                <button data-act="show" data-idx="${c.index}">select</button>
                <button data-act="graph" data-idx="${c.index}">state graph</button>
              </td>
            </tr>`).join("");
        const rejected = report.rejected.map((r) =>
            `<li>${r.gates.length} gates: ${esc(r.reason)}</li>`).join("");
        this.results.innerHTML = `
            <h3>FSM candidates (${report.candidates.length})</h3>
            <table><tr><th>#</th><th>state FFs</th><th>gates</th><th>inputs</th><th></th></tr>
            ${rows || "<tr><td colspan=5><i>none found</i></td></tr>"}</table>
            ${rejected ? `<h4>Rejected</h4><ul>${rejected}</ul>` : ""}`;
        this.results.querySelectorAll("button[data-act]").forEach((button) => {
            button.addEventListener("click", () => {
                const idx = parseInt((button as HTMLElement).dataset["idx"]!, 10);
                const candidate = report.candidates[idx];
                if ((button as HTMLElement).dataset["act"] === "show") {
                    this.callbacks.onSelectGates(candidate.gates);
                } else {
                    this.runHarpoon(idx).catch((err) =>
                        this.callbacks.setStatus(`error: ${err.message ?? err}`));
                }
            });
        });
    }

    async runScc(): Promise<void> {
        const report = await this.runJob<SccReport>("scc");
        const rows = report.components.map((scc, i) => `
            <tr><td>${i}</td><td>${scc.length}</td>
            <td><button data-idx="${i}">select</button></td></tr>`).join("");
        this.results.innerHTML = `
            <h3>Feedback components (${report.count})</h3>
            <table><tr><th>#</th><th>gates</th><th></th></tr>
            ${rows || "<tr><td colspan=3><i>none</i></td></tr>"}</table>`;
        this.results.querySelectorAll("button[data-idx]").forEach((button) => {
            button.addEventListener("click", () => {
                const idx = parseInt((button as HTMLElement).dataset["idx"]!, 10);
                this.callbacks.onSelectGates(report.components[idx]);
            });
        });
    }

    async runWatermark(): Promise<void> {
        const report = await this.runJob<WatermarkReport>("watermark");
        this.renderWatermark(report, false);
    }

    private renderWatermark(report: WatermarkReport, afterScrub: boolean): void {
        const rows = report.findings.map((f) => `
            <tr class="${f.suspicious ? "suspicious" : ""}">
              <td>${esc(f.name)}</td>
              <td>${Object.entries(f.tied_pins).map(([p, v]) => `${esc(p)}=${v}`).join(", ")}</td>
              <td><code>${esc(f.payload_hex)}</code></td>
              <td>${f.suspicious ? "SUSPICIOUS" : "clean"}</td>
              <td><button data-gate="${f.gate}">show</button></td>
            </tr>`).join("");
        this.results.innerHTML = `
            <h3>Constant-tied LUTs: ${report.suspicious} suspicious</h3>
            <table><tr><th>gate</th><th>ties</th><th>payload</th><th></th><th></th></tr>
            ${rows || "<tr><td colspan=5><i>none</i></td></tr>"}</table>
            ${report.suspicious && !afterScrub
                ? `<button id="wb-scrub" class="danger">Scrub all payloads</button>` : ""}`;
        this.results.querySelectorAll("button[data-gate]").forEach((button) => {
            button.addEventListener("click", () => {
                this.callbacks.onSelectGates(
                    [parseInt((button as HTMLElement).dataset["gate"]!, 10)]);
            });
        });
        const scrub = this.results.querySelector("#wb-scrub");
        if (scrub) {
            scrub.addEventListener("click", async () => {
                if (!window.confirm("Zero all unreachable config entries?")) return;
                const after = await api.watermarkScrub();
                this.callbacks.onMutated();
                this.callbacks.setStatus("watermark payloads scrubbed");
                this.renderWatermark(after, true);
            });
        }
    }

    async runHarpoon(candidate: number): Promise<void> {
        const report = await this.runJob<HarpoonReport>("harpoon", { candidate });
        const steps = report.key.map((step, i) => `
            <tr><td>${i + 1}</td>
            <td>${Object.entries(step).map(([k, v]) => `${esc(k)}=${v}`).join(", ")}</td></tr>`)
            .join("");
        this.results.innerHTML = `
            <h3>Obfuscation attack (candidate ${candidate})</h3>
            <div class="columns">
              <div>
                <h4>Enabling key (${report.key_length} steps)</h4>
                <table><tr><th>step</th><th>inputs</th></tr>${steps}</table>
                <p>original entry state: <code>${esc(report.original_initial_state)}</code><br>
                   original region: ${report.original_states.length} states ·
                   obfuscation: ${report.obfuscation_states.length} states</p>
                <button id="wb-patch" class="danger">Apply init patch</button>
              </div>
              <div><canvas id="wb-stategraph" width="430" height="400"></canvas></div>
            </div>`;
        if (report.state_graph) {
            drawStateGraph(
                this.results.querySelector("#wb-stategraph") as HTMLCanvasElement,
                report.state_graph,
                new Set(report.original_states));
        }
        (this.results.querySelector("#wb-patch") as HTMLButtonElement)
            .addEventListener("click", async () => {
                if (!window.confirm(
                    "Rewrite the state register init values to skip the obfuscation FSM?")) {
                    return;
                }
                await api.harpoonPatch(report.candidate ?? candidate);
                this.callbacks.onMutated();
                this.callbacks.setStatus("init values patched: design boots into the original FSM");
            });
    }

    async exportVerilog(): Promise<void> {
        const { verilog } = await api.exportVerilog();
        const blob = new Blob([verilog], { type: "text/plain" });
        const link = document.createElement("a");
        link.href = URL.createObjectURL(blob);
        link.download = "netlist.v";
        link.click();
        URL.revokeObjectURL(link.href);
        this.callbacks.setStatus("netlist exported");
    }
}

export function drawStateGraph(canvas: HTMLCanvasElement,
                               graph: StateGraphReport,
                               original: Set<string>): void {
    const ctx = canvas.getContext("2d");
    if (!ctx) return;
    const points = stateCircleLayout(graph, Math.min(canvas.width, canvas.height) / 2 - 40);
    const at = new Map(points.map((p) => [p.label,
        { x: p.x + canvas.width / 2, y: p.y + canvas.height / 2 }]));
    ctx.clearRect(0, 0, canvas.width, canvas.height);

    ctx.strokeStyle = "#5b6572";
    ctx.fillStyle = "#5b6572";
    ctx.lineWidth = 1;
    for (const edge of graph.edges) {
        const a = at.get(edge.from)!;
        const b = at.get(edge.to)!;
        if (edge.from === edge.to) {
            ctx.beginPath();
            ctx.arc(a.x, a.y - 22, 10, 0, 2 * Math.PI);
            ctx.stroke();
            continue;
        }
        const dx = b.x - a.x, dy = b.y - a.y;
        const len = Math.hypot(dx, dy) || 1;
        const sx = a.x + (dx / len) * 16, sy = a.y + (dy / len) * 16;
        const ex = b.x - (dx / len) * 16, ey = b.y - (dy / len) * 16;
        ctx.beginPath();
        ctx.moveTo(sx, sy);
        ctx.lineTo(ex, ey);
        ctx.stroke();
        const ang = Math.atan2(dy, dx);
        ctx.beginPath();
        ctx.moveTo(ex, ey);
        ctx.lineTo(ex - 7 * Math.cos(ang - 0.4), ey - 7 * Math.sin(ang - 0.4));
        ctx.lineTo(ex - 7 * Math.cos(ang + 0.4), ey - 7 * Math.sin(ang + 0.4));
        ctx.closePath();
        ctx.fill();
    }
    for (const point of points) {
        const c = at.get(point.label)!;
        ctx.beginPath();
        ctx.arc(c.x, c.y, 15, 0, 2 * Math.PI);
        ctx.fillStyle = original.has(point.label) ? "#2e5e8f" : "#8f4444";
        ctx.fill();
        ctx.strokeStyle = point.label === graph.initial_state ? "#ffc857" : "#1c2026";
        ctx.lineWidth = point.label === graph.initial_state ? 3 : 1;
        ctx.stroke();
        ctx.fillStyle = "#e8eaed";
        ctx.font = "9px monospace";
        ctx.textAlign = "center";
        ctx.fillText(point.label, c.x, c.y + 3);
    }
}
