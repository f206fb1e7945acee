// Layered graph layout: ranks from the longest path out of the sources,
// crossing reduction by predecessor barycenters.  Deterministic, so small
// edits keep the overall picture stable.

export type Point = { x: number; y: number };
export type LayoutResult = Map<number, Point & { rank: number }>;

export const RANK_DX = 190;
export const NODE_DY = 56;

type Edge = { from: number; to: number };

/** Edges that close a cycle under a deterministic DFS; ignored for ranking. */
export function backEdges(ids: number[], edges: Edge[]): Set<string> {
    const succ = new Map<number, number[]>();
    for (const id of ids) succ.set(id, []);
    for (const e of edges) {
        if (succ.has(e.from) && succ.has(e.to)) succ.get(e.from)!.push(e.to);
    }
    for (const list of succ.values()) list.sort((a, b) => a - b);
    const state = new Map<number, number>(); // 1 = on stack, 2 = done
    const back = new Set<string>();
    for (const root of [...ids].sort((a, b) => a - b)) {
        if (state.has(root)) continue;
        const stack: [number, number][] = [[root, 0]];
        state.set(root, 1);
        while (stack.length) {
            const frame = stack[stack.length - 1];
            const [node] = frame;
            const next = succ.get(node)![frame[1]++];
            if (next === undefined) {
                state.set(node, 2);
                stack.pop();
                continue;
            }
            if (!state.has(next)) {
                state.set(next, 1);
                stack.push([next, 0]);
            } else if (state.get(next) === 1) {
                back.add(`${node}->${next}`);
            }
        }
    }
    return back;
}

/** Longest-path rank per node over the acyclic part of the graph. */
export function longestPathRanks(ids: number[], edges: Edge[]): Map<number, number> {
    const back = backEdges(ids, edges);
    const forward = edges.filter((e) => !back.has(`${e.from}->${e.to}`)
        && e.from !== e.to);
    const indeg = new Map<number, number>();
    const succ = new Map<number, number[]>();
    for (const id of ids) {
        indeg.set(id, 0);
        succ.set(id, []);
    }
    for (const e of forward) {
        if (!indeg.has(e.from) || !indeg.has(e.to)) continue;
        indeg.set(e.to, indeg.get(e.to)! + 1);
        succ.get(e.from)!.push(e.to);
    }
    const rank = new Map<number, number>();
    const queue = [...ids].filter((id) => indeg.get(id) === 0).sort((a, b) => a - b);
    for (const id of queue) rank.set(id, 0);
    while (queue.length) {
        const node = queue.shift()!;
        for (const next of succ.get(node)!) {
            rank.set(next, Math.max(rank.get(next) ?? 0, rank.get(node)! + 1));
            indeg.set(next, indeg.get(next)! - 1);
            if (indeg.get(next) === 0) queue.push(next);
        }
    }
    for (const id of ids) if (!rank.has(id)) rank.set(id, 0);
    return rank;
}

export function layeredLayout(ids: number[], edges: Edge[]): LayoutResult {
    const rank = longestPathRanks(ids, edges);
    const layers = new Map<number, number[]>();
    for (const id of ids) {
        const r = rank.get(id)!;
        if (!layers.has(r)) layers.set(r, []);
        layers.get(r)!.push(id);
    }
    for (const layer of layers.values()) layer.sort((a, b) => a - b);

    // two barycenter sweeps settle most small graphs
    const preds = new Map<number, number[]>();
    for (const id of ids) preds.set(id, []);
    for (const e of edges) {
        if (preds.has(e.to) && preds.has(e.from) && e.from !== e.to) {
            preds.get(e.to)!.push(e.from);
        }
    }
    const ranksSorted = [...layers.keys()].sort((a, b) => a - b);
    const position = new Map<number, number>();
    for (let sweep = 0; sweep < 2; sweep++) {
        for (const r of ranksSorted) {
            const layer = layers.get(r)!;
            layer.forEach((id, i) => position.set(id, i));
            if (r === 0) continue;
            const keyed = layer.map((id) => {
                const sources = preds.get(id)!.filter((p) => rank.get(p)! < r);
                const bary = sources.length
                    ? sources.reduce((acc, p) => acc + (position.get(p) ?? 0), 0) / sources.length
                    : position.get(id)!;
                return { id, bary };
            });
            keyed.sort((a, b) => a.bary - b.bary || a.id - b.id);
            layers.set(r, keyed.map((k) => k.id));
        }
    }

    const result: LayoutResult = new Map();
    for (const r of ranksSorted) {
        const layer = layers.get(r)!;
        layer.forEach((id, i) => {
            result.set(id, {
                rank: r,
                x: r * RANK_DX,
                y: (i - (layer.length - 1) / 2) * NODE_DY,
            });
        });
    }
    return result;
}
