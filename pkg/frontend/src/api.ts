// Thin typed client for the netrev HTTP API.

import type {
    ApiEvent,
    FsmReport,
    GateDetail,
    GateEntry,
    HarpoonReport,
    JobStatus,
    ModuleEntry,
    NetDetail,
    NetlistSummary,
    SccReport,
    WatermarkReport,
} from "./types.js";

async function request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(path, init);
    if (!response.ok) {
        let detail = `${response.status}`;
        try {
            const body = await response.json();
            if (body && body.detail) detail = `${body.detail}`;
        } catch {
            // keep the status code
        }
        throw new Error(detail);
    }
    return response.json() as Promise<T>;
}

function post<T>(path: string, body: unknown): Promise<T> {
    return request<T>(path, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body ?? {}),
    });
}

export const api = {
    summary: () => request<NetlistSummary>("/api/netlist/summary"),
    overview: (limit = 500) =>
        request<{ gates: GateEntry[]; total: number }>(`/api/overview?limit=${limit}`),
    gates: (ids: number[]) =>
        request<{ gates: GateEntry[] }>(`/api/gates?ids=${ids.join(",")}`),
    gateDetail: (id: number) => request<GateDetail>(`/api/gates/${id}`),
    netDetail: (id: number) => request<NetDetail>(`/api/nets/${id}`),
    modules: () => request<{ modules: ModuleEntry[] }>("/api/modules"),
    createModule: (body: { name: string; gate_ids: number[]; color: number[] | null }) =>
        post<{ module: number }>("/api/modules", body),
    patchModule: (id: number, body: Record<string, unknown>) =>
        request<ModuleEntry>(`/api/modules/${id}`, {
            method: "PATCH",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        }),
    setGateData: (id: number, key: string, value: string) =>
        post<{ ok: boolean }>(`/api/gates/${id}/data`, { key, value }),
    events: (after: number) =>
        request<{ events: ApiEvent[] }>(`/api/events?after=${after}`),
    neighborhood: (seeds: number[], k: number) =>
        request<{ gates: number[] }>(`/api/neighborhood?seed=${seeds.join(",")}&k=${k}`),
    startAnalysis: (kind: string, body: Record<string, unknown> = {}) =>
        post<{ job: number; kind: string }>(`/api/analyses/${kind}`, body),
    jobStatus: (job: number) => request<JobStatus>(`/api/analyses/${job}`),
    harpoonPatch: (candidate: number) =>
        post<HarpoonReport>("/api/harpoon/patch", { candidate }),
    watermarkScrub: () => post<WatermarkReport>("/api/watermark/scrub", {}),
    exportVerilog: () => post<{ verilog: string }>("/api/export/verilog", {}),
    snapshotSave: (path: string) => post<{ written: string }>("/api/snapshot/save", { path }),
};

export async function waitForJob(job: number, pollMs = 150,
                                 timeoutMs = 60_000): Promise<JobStatus> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
        const status = await api.jobStatus(job);
        if (status.status !== "RUNNING") return status;
        if (Date.now() > deadline) throw new Error(`job ${job} timed out`);
        await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
}

export type { FsmReport, SccReport };
