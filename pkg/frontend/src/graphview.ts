// Canvas renderer for the netlist slice: layered nodes, wire edges, module
// tints, pan/zoom, click selection.

import { layeredLayout, type LayoutResult } from "./layout.js";
import type { Edge } from "./model.js";
import type { GateEntry } from "./types.js";

const NODE_W = 130;
const NODE_H = 38;

export type GraphCallbacks = {
    onSelect: (gateId: number | null, additive: boolean) => void;
    onFocus: (gateId: number) => void;
};

export class GraphView {
    private ctx: CanvasRenderingContext2D;
    private gates: GateEntry[] = [];
    private edges: Edge[] = [];
    private layout: LayoutResult = new Map();
    private colors = new Map<number, number[] | null>();
    private selection = new Set<number>();
    private zoom = 1;
    private panX = 0;
    private panY = 0;
    private dragging = false;
    private dragMoved = false;
    private lastX = 0;
    private lastY = 0;
    lastFrameMs = 0;

    constructor(private canvas: HTMLCanvasElement,
                private callbacks: GraphCallbacks) {
        const ctx = canvas.getContext("2d");
        if (!ctx) throw new Error("canvas 2d context unavailable");
        this.ctx = ctx;
        this.bind();
        this.resize();
    }

    setData(gates: GateEntry[], edges: Edge[],
            colorOf: (gateId: number) => number[] | null): void {
        this.gates = gates;
        this.edges = edges;
        this.layout = layeredLayout(gates.map((g) => g.id), edges);
        this.colors = new Map(gates.map((g) => [g.id, colorOf(g.id)]));
        this.draw();
    }

    setSelection(ids: number[]): void {
        this.selection = new Set(ids);
        this.draw();
    }

    refreshColors(colorOf: (gateId: number) => number[] | null): void {
        this.colors = new Map(this.gates.map((g) => [g.id, colorOf(g.id)]));
        this.draw();
    }

    resize(): void {
        const rect = this.canvas.parentElement?.getBoundingClientRect();
        if (rect) {
            this.canvas.width = Math.max(100, rect.width);
            this.canvas.height = Math.max(100, rect.height);
        }
        this.draw();
    }

    fit(): void {
        if (!this.layout.size) return;
        let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
        for (const p of this.layout.values()) {
            minX = Math.min(minX, p.x); maxX = Math.max(maxX, p.x);
            minY = Math.min(minY, p.y); maxY = Math.max(maxY, p.y);
        }
        const w = maxX - minX + 2 * NODE_W;
        const h = maxY - minY + 2 * NODE_H;
        this.zoom = Math.min(2, this.canvas.width / w, this.canvas.height / h);
        this.panX = this.canvas.width / 2 - ((minX + maxX) / 2) * this.zoom;
        this.panY = this.canvas.height / 2 - ((minY + maxY) / 2) * this.zoom;
        this.draw();
    }

    private bind(): void {
        this.canvas.addEventListener("mousedown", (ev) => {
            this.dragging = true;
            this.dragMoved = false;
            this.lastX = ev.offsetX;
            this.lastY = ev.offsetY;
        });
        this.canvas.addEventListener("mousemove", (ev) => {
            if (!this.dragging) return;
            const dx = ev.offsetX - this.lastX;
            const dy = ev.offsetY - this.lastY;
            if (Math.abs(dx) + Math.abs(dy) > 2) this.dragMoved = true;
            this.panX += dx;
            this.panY += dy;
            this.lastX = ev.offsetX;
            this.lastY = ev.offsetY;
            this.draw();
        });
        window.addEventListener("mouseup", (ev) => {
            if (!this.dragging) return;
            this.dragging = false;
            if (!this.dragMoved) {
                const hit = this.hitTest(this.lastX, this.lastY);
                this.callbacks.onSelect(hit, (ev as MouseEvent).shiftKey);
            }
        });
        this.canvas.addEventListener("dblclick", (ev) => {
            const hit = this.hitTest(ev.offsetX, ev.offsetY);
            if (hit !== null) this.callbacks.onFocus(hit);
        });
        this.canvas.addEventListener("wheel", (ev) => {
            ev.preventDefault();
            const factor = ev.deltaY < 0 ? 1.15 : 1 / 1.15;
            const next = Math.min(4, Math.max(0.05, this.zoom * factor));
            const wx = (ev.offsetX - this.panX) / this.zoom;
            const wy = (ev.offsetY - this.panY) / this.zoom;
            this.zoom = next;
            this.panX = ev.offsetX - wx * this.zoom;
            this.panY = ev.offsetY - wy * this.zoom;
            this.draw();
        }, { passive: false });
        window.addEventListener("resize", () => this.resize());
    }

    private hitTest(sx: number, sy: number): number | null {
        const x = (sx - this.panX) / this.zoom;
        const y = (sy - this.panY) / this.zoom;
        for (const gate of this.gates) {
            const p = this.layout.get(gate.id);
            if (!p) continue;
            if (Math.abs(x - p.x) <= NODE_W / 2 && Math.abs(y - p.y) <= NODE_H / 2) {
                return gate.id;
            }
        }
        return null;
    }

    draw(): void {
        const start = performance.now();
        const { ctx, canvas } = this;
        ctx.setTransform(1, 0, 0, 1, 0, 0);
        ctx.fillStyle = "#14171c";
        ctx.fillRect(0, 0, canvas.width, canvas.height);
        ctx.setTransform(this.zoom, 0, 0, this.zoom, this.panX, this.panY);

        ctx.strokeStyle = "#46505e";
        ctx.lineWidth = 1 / this.zoom + 0.6;
        for (const edge of this.edges) {
            const a = this.layout.get(edge.from);
            const b = this.layout.get(edge.to);
            if (!a || !b) continue;
            const x0 = a.x + NODE_W / 2;
            const x1 = b.x - NODE_W / 2;
            ctx.beginPath();
            ctx.moveTo(x0, a.y);
            ctx.bezierCurveTo((x0 + x1) / 2, a.y, (x0 + x1) / 2, b.y, x1, b.y);
            ctx.stroke();
            ctx.beginPath();
            ctx.moveTo(x1, b.y);
            ctx.lineTo(x1 - 7, b.y - 4);
            ctx.lineTo(x1 - 7, b.y + 4);
            ctx.closePath();
            ctx.fillStyle = "#46505e";
            ctx.fill();
        }

        const labelVisible = this.zoom > 0.35;
        for (const gate of this.gates) {
            const p = this.layout.get(gate.id);
            if (!p) continue;
            const color = this.colors.get(gate.id);
            ctx.fillStyle = color
                ? `rgba(${color[0]},${color[1]},${color[2]},0.55)`
                : categoryFill(gate.category);
            ctx.strokeStyle = this.selection.has(gate.id) ? "#ffc857" : "#222831";
            ctx.lineWidth = this.selection.has(gate.id) ? 2.5 : 1;
            roundRect(ctx, p.x - NODE_W / 2, p.y - NODE_H / 2, NODE_W, NODE_H, 6);
            ctx.fill();
            ctx.stroke();
            if (labelVisible) {
                ctx.fillStyle = "#e8eaed";
                ctx.font = "11px system-ui, sans-serif";
                ctx.textAlign = "center";
                ctx.fillText(gate.type, p.x, p.y - 3, NODE_W - 10);
                ctx.fillStyle = "#9aa4b2";
                ctx.fillText(truncate(gate.name, 22), p.x, p.y + 11, NODE_W - 10);
            }
        }
        this.lastFrameMs = performance.now() - start;
    }
}

function roundRect(ctx: CanvasRenderingContext2D, x: number, y: number,
                   w: number, h: number, r: number): void {
    ctx.beginPath();
    ctx.moveTo(x + r, y);
    ctx.arcTo(x + w, y, x + w, y + h, r);
    ctx.arcTo(x + w, y + h, x, y + h, r);
    ctx.arcTo(x, y + h, x, y, r);
    ctx.arcTo(x, y, x + w, y, r);
    ctx.closePath();
}

function truncate(text: string, max: number): string {
    return text.length <= max ? text : text.slice(0, max - 1) + "…";
}

function categoryFill(category: string): string {
    switch (category) {
        case "FF": return "#2d4a63";
        case "LATCH": return "#5a3d63";
        case "LUT": return "#33584a";
        case "CONST_ZERO":
        case "CONST_ONE": return "#5d5433";
        case "BUFFER": return "#3c4454";
        default: return "#39414d";
    }
}
