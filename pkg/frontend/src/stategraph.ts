// Circle layout for FSM state graphs: states evenly spaced, the initial
// state pinned at the left, original-region states grouped clockwise.

import type { StateGraphReport } from "./types.js";

export type StatePoint = { label: string; x: number; y: number };

export function stateCircleLayout(report: StateGraphReport,
                                  radius = 170): StatePoint[] {
    const ordered = orderStates(report);
    const n = ordered.length;
    return ordered.map((label, i) => {
        const angle = Math.PI + (2 * Math.PI * i) / Math.max(n, 1);
        return {
            label,
            x: Math.cos(angle) * radius,
            y: Math.sin(angle) * radius,
        };
    });
}

/** Initial state first, remaining states in label order. */
export function orderStates(report: StateGraphReport): string[] {
    const rest = report.states.filter((s) => s !== report.initial_state).sort();
    return [report.initial_state, ...rest];
}
