import { describe, expect, it } from "vitest";

import {
    ModuleStore,
    edgesFromGates,
    emptySelection,
    isStructural,
    pruneSelection,
} from "../src/model.js";
import type { ApiEvent, GateEntry } from "../src/types.js";

function ev(kind: string, payload: Record<string, unknown>, seq = 1): ApiEvent {
    return { seq, kind, payload };
}

describe("pruneSelection", () => {
    it("drops deleted entities from the selection", () => {
        const selection = { gates: [1, 2, 3], nets: [7], modules: [4] };
        const pruned = pruneSelection(selection, [
            ev("GATE_DELETED", { gate: 2 }),
            ev("NET_DELETED", { net: 7 }),
        ]);
        expect(pruned).toEqual({ gates: [1, 3], nets: [], modules: [4] });
    });

    it("returns the same object when nothing matches", () => {
        const selection = emptySelection();
        expect(pruneSelection(selection, [ev("GATE_DATA_CHANGED", { gate: 1 })]))
            .toBe(selection);
    });
});

describe("isStructural", () => {
    it("classifies events", () => {
        expect(isStructural(ev("GATE_CREATED", {}))).toBe(true);
        expect(isStructural(ev("NET_ENDPOINT_CHANGED", {}))).toBe(true);
        expect(isStructural(ev("MODULE_CHANGED", {}))).toBe(false);
        expect(isStructural(ev("SNAPSHOT_LOADED", {}))).toBe(true);
    });
});

describe("ModuleStore", () => {
    it("reduces module events to current state", () => {
        const store = new ModuleStore();
        store.apply(ev("MODULE_CREATED", {
            module: 1, name: "fsm", gates: [1, 2], nets: [], color: [255, 0, 0],
            parent: null,
        }));
        expect(store.colorOf(1)).toEqual([255, 0, 0]);
        expect(store.colorOf(9)).toBeNull();

        store.apply(ev("MODULE_CHANGED", {
            module: 1,
            changes: { color: { old: [255, 0, 0], new: [0, 255, 0] } },
        }));
        expect(store.colorOf(2)).toEqual([0, 255, 0]);

        store.apply(ev("GATE_DELETED", { gate: 2 }));
        expect(store.modules.get(1)!.gates).toEqual([1]);

        store.apply(ev("MODULE_DELETED", { module: 1 }));
        expect(store.colorOf(1)).toBeNull();
    });

    it("latest module wins when colors overlap", () => {
        const store = new ModuleStore();
        store.load([
            { id: 1, name: "a", gates: [5], nets: [], color: [1, 1, 1], parent: null },
            { id: 2, name: "b", gates: [5], nets: [], color: [2, 2, 2], parent: null },
        ]);
        expect(store.colorOf(5)).toEqual([2, 2, 2]);
    });
});

describe("edgesFromGates", () => {
    const gates: GateEntry[] = [
        {
            id: 1, name: "ff", type: "DFF", category: "FF",
            pins: [
                { pin: "C", direction: "IN", net: 10 },
                { pin: "D", direction: "IN", net: 12 },
                { pin: "Q", direction: "OUT", net: 11 },
            ],
        },
        {
            id: 2, name: "inv", type: "INV", category: "COMBINATIONAL",
            pins: [
                { pin: "I", direction: "IN", net: 11 },
                { pin: "O", direction: "OUT", net: 12 },
            ],
        },
    ];

    it("derives driver->sink edges from shared nets", () => {
        expect(edgesFromGates(gates)).toEqual([
            { from: 1, to: 2, net: 11 },
            { from: 2, to: 1, net: 12 },
        ]);
    });

    it("ignores nets leaving the visible slice", () => {
        const sliced = [gates[1]];
        expect(edgesFromGates(sliced)).toEqual([]);
    });
});
