// Application wiring: viewport state, event polling, pane coordination.

import { api } from "./api.js";
import { renderEmpty, renderGate, renderMultiSelection, renderNet } from "./detail.js";
import { GraphView } from "./graphview.js";
import {
    ModuleStore,
    edgesFromGates,
    initialViewState,
    isStructural,
    pruneSelection,
} from "./model.js";
import type { GateEntry } from "./types.js";
import { Workbench } from "./workbench.js";

const POLL_MS = 1000;

class App {
    view: ReturnType<typeof initialViewState> = initialViewState();
    modules = new ModuleStore();
    visible: GateEntry[] = [];
    gateNames = new Map<number, string>();
    graph: GraphView;
    workbench: Workbench;
    private statusEl = document.querySelector("#status") as HTMLElement;
    private detailEl = document.querySelector("#detail") as HTMLElement;

    constructor() {
        this.graph = new GraphView(
            document.querySelector("#graph") as HTMLCanvasElement,
            {
                onSelect: (gateId, additive) => this.select(gateId, additive),
                onFocus: (gateId) => {
                    this.view.selection = { gates: [gateId], nets: [], modules: [] };
                    void this.refreshSlice(true);
                },
            });
        this.workbench = new Workbench(
            document.querySelector("#workbench") as HTMLElement,
            {
                onSelectGates: (ids) => {
                    this.view.selection = { gates: ids, nets: [], modules: [] };
                    void this.refreshSlice(true);
                },
                onMutated: () => void this.poll(),
                setStatus: (text) => this.setStatus(text),
            });
        (document.querySelector("#hops") as HTMLInputElement)
            .addEventListener("change", (ev) => {
                this.view.hops = parseInt((ev.target as HTMLInputElement).value, 10);
                void this.refreshSlice(true);
            });
        (document.querySelector("#group-btn") as HTMLButtonElement)
            .addEventListener("click", () => void this.groupSelection());
    }

    setStatus(text: string): void {
        this.statusEl.textContent = text;
    }

    async boot(): Promise<void> {
        const summary = await api.summary();
        (document.querySelector("#design-name") as HTMLElement).textContent =
            summary.design;
        this.view.eventCursor = summary.events;
        this.modules.load((await api.modules()).modules);
        this.renderModuleList();
        await this.refreshSlice(true);
        this.updateSummaryBar(summary.gates, summary.nets);
        window.setInterval(() => void this.poll(), POLL_MS);
    }

    updateSummaryBar(gates: number, nets: number): void {
        (document.querySelector("#summary") as HTMLElement).textContent =
            `${gates} gates · ${nets} nets · showing ${this.visible.length}`;
    }

    async refreshSlice(refit: boolean): Promise<void> {
        const seeds = this.view.selection.gates;
        let gates: GateEntry[];
        if (seeds.length === 0) {
            gates = (await api.overview(500)).gates;
        } else {
            const ids = (await api.neighborhood(seeds, this.view.hops)).gates;
            gates = ids.length ? (await api.gates(ids)).gates : [];
        }
        this.visible = gates;
        for (const gate of gates) this.gateNames.set(gate.id, gate.name);
        this.graph.setData(gates, edgesFromGates(gates),
            (gid) => this.modules.colorOf(gid));
        this.graph.setSelection(seeds);
        if (refit) this.graph.fit();
        const summary = await api.summary();
        this.updateSummaryBar(summary.gates, summary.nets);
        await this.refreshDetail();
    }

    select(gateId: number | null, additive: boolean): void {
        const selection = this.view.selection;
        if (gateId === null) {
            if (!additive) selection.gates = [];
        } else if (additive) {
            selection.gates = selection.gates.includes(gateId)
                ? selection.gates.filter((g) => g !== gateId)
                : [...selection.gates, gateId];
        } else {
            selection.gates = [gateId];
        }
        selection.nets = [];
        this.graph.setSelection(selection.gates);
        void this.refreshDetail();
    }

    async refreshDetail(): Promise<void> {
        const { gates, nets } = this.view.selection;
        if (nets.length === 1) {
            const net = await api.netDetail(nets[0]);
            renderNet(this.detailEl, net,
                (gid) => this.gateNames.get(gid) ?? `#${gid}`,
                (gid) => {
                    this.view.selection = { gates: [gid], nets: [], modules: [] };
                    void this.refreshSlice(false);
                });
            return;
        }
        if (gates.length === 0) {
            renderEmpty(this.detailEl);
            return;
        }
        if (gates.length > 1) {
            renderMultiSelection(this.detailEl, gates.length);
            return;
        }
        const detail = await api.gateDetail(gates[0]);
        renderGate(this.detailEl, detail,
            [...this.modules.modules.values()],
            (netId) => {
                this.view.selection.nets = [netId];
                void this.refreshDetail();
            });
    }

    renderModuleList(): void {
        const list = document.querySelector("#module-list") as HTMLElement;
        const entries = [...this.modules.modules.values()].sort((a, b) => a.id - b.id);
        list.innerHTML = entries.map((m) => {
            const swatch = m.color
                ? `<span class="swatch" style="background:rgb(${m.color.join(",")})"></span>`
                : `<span class="swatch none"></span>`;
            return `<li data-module="${m.id}">${swatch}${m.name}
                <span class="hint">(${m.gates.length})</span></li>`;
        }).join("") || "<li class='hint'>no modules yet</li>";
        list.querySelectorAll("li[data-module]").forEach((li) => {
            li.addEventListener("click", () => {
                const id = parseInt((li as HTMLElement).dataset["module"]!, 10);
                const entry = this.modules.modules.get(id);
                if (entry) {
                    this.view.selection = { gates: [...entry.gates], nets: [], modules: [id] };
                    void this.refreshSlice(true);
                }
            });
        });
    }

    async groupSelection(): Promise<void> {
        const gates = this.view.selection.gates;
        if (!gates.length) {
            this.setStatus("select gates first, then group them");
            return;
        }
        const name = window.prompt("Module name:", `group_${this.modules.modules.size + 1}`);
        if (!name) return;
        const color = [80 + Math.floor(Math.random() * 160),
                       80 + Math.floor(Math.random() * 160),
                       80 + Math.floor(Math.random() * 160)];
        try {
            await api.createModule({ name, gate_ids: gates, color });
            await this.poll();
            this.setStatus(`module "${name}" created`);
        } catch (err) {
            this.setStatus(`error: ${(err as Error).message}`);
        }
    }

    async poll(): Promise<void> {
        let events;
        try {
            events = (await api.events(this.view.eventCursor)).events;
        } catch {
            this.setStatus("connection lost; retrying…");
            return;
        }
        if (!events.length) return;
        this.view.eventCursor = events[events.length - 1].seq;
        for (const ev of events) this.modules.apply(ev);
        this.view.selection = pruneSelection(this.view.selection, events);
        this.renderModuleList();
        this.graph.refreshColors((gid) => this.modules.colorOf(gid));
        if (events.some(isStructural)) {
            await this.refreshSlice(false);
        } else {
            await this.refreshDetail();
        }
    }
}

const app = new App();
app.boot().catch((err) => {
    (document.querySelector("#status") as HTMLElement).textContent =
        `failed to load: ${err.message ?? err}`;
});
