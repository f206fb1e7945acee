// Payload shapes of the netrev HTTP API.

export type GateCategory =
    | "COMBINATIONAL" | "LUT" | "FF" | "LATCH"
    | "CONST_ZERO" | "CONST_ONE" | "BUFFER";

export type PinRef = {
    pin: string;
    direction: "IN" | "OUT";
    net: number | null;
    net_name?: string | null;
};

export type GateEntry = {
    id: number;
    name: string;
    type: string;
    category: GateCategory;
    pins: PinRef[];
};

export type GateDetail = GateEntry & {
    data: Record<string, string>;
    functions: Record<string, string> | null;
    modules: number[];
};

export type NetDetail = {
    id: number;
    name: string;
    global_input: boolean;
    global_output: boolean;
    source: { gate: number; pin: string } | null;
    sinks: { gate: number; pin: string }[];
};

export type ModuleEntry = {
    id: number;
    name: string;
    gates: number[];
    nets: number[];
    color: number[] | null;
    parent: number | null;
};

export type NetlistSummary = {
    design: string;
    library: string;
    gates: number;
    nets: number;
    modules: number;
    global_inputs: number;
    global_outputs: number;
    gates_by_category: Record<string, number>;
    events: number;
};

export type ApiEvent = {
    seq: number;
    kind: string;
    payload: Record<string, unknown>;
};

export type FsmCandidateEntry = {
    index: number;
    state_ffs: { id: number; name: string }[];
    gates: number[];
    inputs: { id: number; name: string }[];
    clock_net: number | null;
};

export type FsmReport = {
    candidates: FsmCandidateEntry[];
    rejected: { gates: number[]; reason: string }[];
};

export type StateGraphReport = {
    state_bits: number;
    inputs: string[];
    initial_state: string;
    states: string[];
    edges: { from: string; to: string; condition: string }[];
};

export type HarpoonReport = {
    key: Record<string, number>[];
    key_length: number;
    original_initial_state: string;
    original_states: string[];
    obfuscation_states: string[];
    patched_ffs: { gate: number; init: number }[];
    state_graph?: StateGraphReport;
    dot?: string;
    candidate?: number;
};

export type WatermarkFindingEntry = {
    gate: number;
    name: string;
    tied_pins: Record<string, number>;
    unreachable_indices: number[];
    payload_bits: number[];
    payload_hex: string;
    suspicious: boolean;
};

export type WatermarkReport = {
    suspicious: number;
    findings: WatermarkFindingEntry[];
};

export type SccReport = { count: number; components: number[][] };

export type JobStatus = {
    job: number;
    kind: string;
    status: "RUNNING" | "DONE" | "FAILED";
    result?: unknown;
    error?: string;
};
