// Client-side mirror of the pieces of netlist state the UI renders.
// Everything here is a pure reduction of (API data, events); the server
// stays the single source of truth.

import type { ApiEvent, GateEntry, ModuleEntry } from "./types.js";

export type Selection = {
    gates: number[];
    nets: number[];
    modules: number[];
};

export function emptySelection(): Selection {
    return { gates: [], nets: [], modules: [] };
}

export type ViewState = {
    selection: Selection;
    hops: number;          // neighborhood radius around the selection
    eventCursor: number;   // last event seq already applied
};

export function initialViewState(): ViewState {
    return { selection: emptySelection(), hops: 1, eventCursor: 0 };
}

/** Drop references to entities that a delete event just removed. */
export function pruneSelection(selection: Selection, events: ApiEvent[]): Selection {
    const deadGates = new Set<number>();
    const deadNets = new Set<number>();
    const deadModules = new Set<number>();
    for (const ev of events) {
        if (ev.kind === "GATE_DELETED") deadGates.add(ev.payload["gate"] as number);
        if (ev.kind === "NET_DELETED") deadNets.add(ev.payload["net"] as number);
        if (ev.kind === "MODULE_DELETED") deadModules.add(ev.payload["module"] as number);
    }
    if (!deadGates.size && !deadNets.size && !deadModules.size) return selection;
    return {
        gates: selection.gates.filter((g) => !deadGates.has(g)),
        nets: selection.nets.filter((n) => !deadNets.has(n)),
        modules: selection.modules.filter((m) => !deadModules.has(m)),
    };
}

/** True if the event changes graph structure (view slices must refetch). */
export function isStructural(ev: ApiEvent): boolean {
    return ev.kind.startsWith("GATE_") || ev.kind.startsWith("NET_")
        || ev.kind === "SNAPSHOT_LOADED";
}

/** Module membership/color store, reduced from module events. */
export class ModuleStore {
    modules = new Map<number, ModuleEntry>();

    load(entries: ModuleEntry[]): void {
        this.modules.clear();
        for (const entry of entries) this.modules.set(entry.id, entry);
    }

    apply(ev: ApiEvent): void {
        const p = ev.payload as Record<string, unknown>;
        if (ev.kind === "MODULE_CREATED") {
            this.modules.set(p["module"] as number, {
                id: p["module"] as number,
                name: p["name"] as string,
                gates: (p["gates"] as number[]) ?? [],
                nets: (p["nets"] as number[]) ?? [],
                color: (p["color"] as number[] | null) ?? null,
                parent: (p["parent"] as number | null) ?? null,
            });
        } else if (ev.kind === "MODULE_CHANGED") {
            const entry = this.modules.get(p["module"] as number);
            if (!entry) return;
            const changes = p["changes"] as Record<string, { new: unknown }>;
            if (changes["name"]) entry.name = changes["name"].new as string;
            if (changes["gates"]) entry.gates = changes["gates"].new as number[];
            if (changes["nets"]) entry.nets = changes["nets"].new as number[];
            if (changes["color"]) entry.color = changes["color"].new as number[] | null;
            if (changes["parent"]) entry.parent = changes["parent"].new as number | null;
        } else if (ev.kind === "MODULE_DELETED") {
            this.modules.delete(p["module"] as number);
        } else if (ev.kind === "GATE_DELETED") {
            const gate = p["gate"] as number;
            for (const entry of this.modules.values()) {
                entry.gates = entry.gates.filter((g) => g !== gate);
            }
        } else if (ev.kind === "NET_DELETED") {
            const net = p["net"] as number;
            for (const entry of this.modules.values()) {
                entry.nets = entry.nets.filter((n) => n !== net);
            }
        }
    }

    /** Fill color for a gate: the highest-id module that contains it wins. */
    colorOf(gateId: number): number[] | null {
        let best: ModuleEntry | null = null;
        for (const entry of this.modules.values()) {
            if (entry.color && entry.gates.includes(gateId)) {
                if (!best || entry.id > best.id) best = entry;
            }
        }
        return best ? best.color : null;
    }
}

export type Edge = { from: number; to: number; net: number };

/** Derive driver->sink edges among the visible gates from their pin nets. */
export function edgesFromGates(gates: GateEntry[]): Edge[] {
    const drivers = new Map<number, number>();
    for (const gate of gates) {
        for (const pin of gate.pins) {
            if (pin.direction === "OUT" && pin.net !== null) {
                drivers.set(pin.net, gate.id);
            }
        }
    }
    const edges: Edge[] = [];
    for (const gate of gates) {
        for (const pin of gate.pins) {
            if (pin.direction === "IN" && pin.net !== null) {
                const from = drivers.get(pin.net);
                if (from !== undefined) edges.push({ from, to: gate.id, net: pin.net });
            }
        }
    }
    edges.sort((a, b) => a.from - b.from || a.to - b.to || a.net - b.net);
    return edges;
}
