"""HTTP facade over one loaded netlist session for the browser UI.

Mutations are serialized and rejected with 409 while an analysis job is
running; long analyses run on worker threads under the netlist's reader
contract and are polled via job handles.  The API adds no semantics of its
own: every route delegates to the module operations.
"""

from __future__ import annotations

import itertools
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .cones import from_combinational, from_lut
from .errors import AnalysisError, NetlistError, NetrevError
from .fsm import (
    brute_force_state_graph,
    candidates_report,
    find_fsm_candidates,
    state_graph_report,
    to_dot,
)
from .graph import build_digraph, k_hop_neighborhood, tarjan_scc
from .harpoon import analyze_harpoon, apply_harpoon_patch, attack_report
from .library import GateCategory, GateLibrary
from .netlist import Netlist
from .snapshot import load_snapshot, save_snapshot
from .verilog import write_verilog_text
from .watermark import findings_report, scan_watermarks, scrub_all

log = logging.getLogger("netrev.api")

ANALYSIS_KINDS = ("fsm", "scc", "watermark", "harpoon")


class Session:
    """One netlist, one writer at a time, any number of polling readers."""

    def __init__(self, library: GateLibrary, netlist: Netlist | None = None):
        self.library = library
        self.netlist = netlist if netlist is not None else Netlist("empty", library)
        self.jobs: dict[int, dict] = {}
        self._job_ids = itertools.count(1)
        self._mutex = threading.Lock()
        self._executor = ThreadPoolExecutor(max_workers=2)

    def running_jobs(self) -> list[int]:
        return [jid for jid, job in self.jobs.items() if job["status"] == "RUNNING"]

    @contextmanager
    def mutate(self):
        with self._mutex:
            running = self.running_jobs()
            if running:
                raise HTTPException(
                    status_code=409,
                    detail=f"analysis job(s) {running} still running; retry later")
            yield self.netlist

    def submit(self, kind: str, fn) -> int:
        with self._mutex:
            job_id = next(self._job_ids)
            self.jobs[job_id] = {"kind": kind, "status": "RUNNING"}

        def runner():
            try:
                with self.netlist.read_access():
                    result = fn()
                self.jobs[job_id].update(status="DONE", result=result)
            except NetrevError as exc:
                self.jobs[job_id].update(status="FAILED", error=str(exc))
            except Exception as exc:  # pragma: no cover - defensive
                log.exception("job %d crashed", job_id)
                self.jobs[job_id].update(status="FAILED", error=repr(exc))

        self._executor.submit(runner)
        return job_id


class ModuleCreate(BaseModel):
    name: str
    gate_ids: list[int] = []
    net_ids: list[int] = []
    color: tuple[int, int, int] | None = None
    parent: int | None = None


class ModulePatch(BaseModel):
    name: str | None = None
    gate_ids: list[int] | None = None
    net_ids: list[int] | None = None
    color: tuple[int, int, int] | None = None
    parent: int | None = None
    clear_parent: bool = False


class GateData(BaseModel):
    key: str
    value: str


class AnalysisRequest(BaseModel):
    candidate: int = 0
    max_inputs: int = 10
    max_states: int = 65536


class PathRequest(BaseModel):
    path: str


class ExportRequest(BaseModel):
    path: str | None = None
    allow_dangling: bool = False


class PatchRequest(BaseModel):
    candidate: int = 0


def _gate_functions(netlist: Netlist, gate) -> dict[str, str] | None:
    category = gate.type.category
    try:
        if category is GateCategory.LUT:
            return {gate.type.output_pins[0]: from_lut(netlist, gate).to_expr()}
        if category in (GateCategory.COMBINATIONAL, GateCategory.BUFFER,
                        GateCategory.CONST_ZERO, GateCategory.CONST_ONE):
            return {pin: fn.to_expr()
                    for pin, fn in from_combinational(netlist, gate).items()}
    except NetrevError as exc:
        return {"error": str(exc)}
    return None  # sequential elements have no combinational rendering


def _gate_detail(netlist: Netlist, gate) -> dict:
    pins = []
    for pin in gate.type.input_pins + gate.type.output_pins:
        net = netlist.net_of(gate.id, pin)
        pins.append({
            "pin": pin,
            "direction": gate.type.pin_direction(pin),
            "net": net.id if net else None,
            "net_name": net.name if net else None,
        })
    return {
        "id": gate.id,
        "name": gate.name,
        "type": gate.type.name,
        "category": gate.type.category.value,
        "data": dict(gate.data),
        "pins": pins,
        "functions": _gate_functions(netlist, gate),
        "modules": sorted(m.id for m in netlist.submodules.values()
                          if gate.id in m.gate_ids),
    }


def _module_detail(sub) -> dict:
    return {
        "id": sub.id,
        "name": sub.name,
        "gates": sorted(sub.gate_ids),
        "nets": sorted(sub.net_ids),
        "color": list(sub.color) if sub.color else None,
        "parent": sub.parent,
    }


def build_app(library: GateLibrary, netlist: Netlist | None = None,
              ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="netrev", version="0.1.0")
    session = Session(library, netlist)
    app.state.session = session

    def nl() -> Netlist:
        return session.netlist

    @app.get("/api/netlist/summary")
    def summary():
        return nl().stats()

    def _gate_entry(netlist: Netlist, gate) -> dict:
        pins = []
        for pin in gate.type.input_pins + gate.type.output_pins:
            net = netlist.net_of(gate.id, pin)
            pins.append({"pin": pin, "direction": gate.type.pin_direction(pin),
                         "net": net.id if net else None})
        return {"id": gate.id, "name": gate.name, "type": gate.type.name,
                "category": gate.type.category.value, "pins": pins}

    @app.get("/api/gates")
    def gates(ids: str | None = None):
        netlist = nl()
        if ids:
            try:
                wanted = [int(x) for x in ids.split(",") if x]
            except ValueError:
                raise HTTPException(400, "ids must be a comma-separated int list")
        else:
            wanted = sorted(netlist.gates)
        out = []
        for gid in wanted:
            gate = netlist.gates.get(gid)
            if gate is None:
                raise HTTPException(404, f"unknown gate id {gid}")
            out.append(_gate_entry(netlist, gate))
        return {"gates": out}

    @app.get("/api/overview")
    def overview(limit: int = 500):
        """Highest-fanout gate slice: the default top-level view."""
        netlist = nl()
        fanout: dict[int, int] = {gid: 0 for gid in netlist.gates}
        for net in netlist.nets.values():
            if net.source is not None:
                fanout[net.source.gate_id] += len(net.sinks)
        chosen = sorted(netlist.gates, key=lambda g: (-fanout[g], g))[:max(0, limit)]
        return {"gates": [_gate_entry(netlist, netlist.gates[g])
                          for g in sorted(chosen)],
                "total": len(netlist.gates)}

    @app.get("/api/gates/{gate_id}")
    def gate_detail(gate_id: int):
        netlist = nl()
        gate = netlist.gates.get(gate_id)
        if gate is None:
            raise HTTPException(404, f"unknown gate id {gate_id}")
        return _gate_detail(netlist, gate)

    @app.post("/api/gates/{gate_id}/data")
    def set_gate_data(gate_id: int, body: GateData):
        with session.mutate() as netlist:
            try:
                netlist.set_gate_data(gate_id, body.key, body.value)
            except NetrevError as exc:
                raise HTTPException(400, str(exc))
        return {"ok": True}

    @app.get("/api/nets/{net_id}")
    def net_detail(net_id: int):
        netlist = nl()
        net = netlist.nets.get(net_id)
        if net is None:
            raise HTTPException(404, f"unknown net id {net_id}")
        return {
            "id": net.id,
            "name": net.name,
            "global_input": net.is_global_input,
            "global_output": net.is_global_output,
            "source": ({"gate": net.source.gate_id, "pin": net.source.pin}
                       if net.source else None),
            "sinks": [{"gate": ep.gate_id, "pin": ep.pin}
                      for ep in sorted(net.sinks, key=lambda e: (e.gate_id, e.pin))],
        }

    @app.get("/api/modules")
    def modules():
        return {"modules": [_module_detail(sub)
                            for _, sub in sorted(nl().submodules.items())]}

    @app.post("/api/modules", status_code=201)
    def create_module(body: ModuleCreate):
        with session.mutate() as netlist:
            try:
                mid = netlist.create_submodule(body.name, body.gate_ids,
                                               body.net_ids, body.parent, body.color)
            except NetlistError as exc:
                raise HTTPException(400, str(exc))
        return {"module": mid}

    @app.patch("/api/modules/{module_id}")
    def patch_module(module_id: int, body: ModulePatch):
        kwargs = {}
        if body.name is not None:
            kwargs["name"] = body.name
        if body.gate_ids is not None:
            kwargs["gate_ids"] = body.gate_ids
        if body.net_ids is not None:
            kwargs["net_ids"] = body.net_ids
        if body.color is not None:
            kwargs["color"] = tuple(body.color)
        if body.clear_parent:
            kwargs["parent"] = None
        elif body.parent is not None:
            kwargs["parent"] = body.parent
        with session.mutate() as netlist:
            try:
                netlist.update_submodule(module_id, **kwargs)
                return _module_detail(netlist.submodule(module_id))
            except NetlistError as exc:
                raise HTTPException(400, str(exc))

    @app.get("/api/events")
    def events(after: int = 0):
        return {"events": [e.to_dict() for e in nl().events_after(after)]}

    @app.get("/api/neighborhood")
    def neighborhood(seed: str, k: int = 1):
        try:
            seeds = [int(x) for x in seed.split(",") if x]
        except ValueError:
            raise HTTPException(400, "seed must be a comma-separated int list")
        graph = build_digraph(nl())
        return {"gates": sorted(k_hop_neighborhood(graph, seeds, k))}

    @app.post("/api/analyses/{kind}")
    def start_analysis(kind: str, body: AnalysisRequest | None = None):
        if kind not in ANALYSIS_KINDS:
            raise HTTPException(404, f"unknown analysis {kind!r}")
        body = body or AnalysisRequest()
        netlist = nl()

        def run_fsm():
            return candidates_report(netlist, find_fsm_candidates(netlist))

        def run_scc():
            sccs = tarjan_scc(build_digraph(netlist))
            return {"count": len(sccs), "components": [sorted(s) for s in sccs]}

        def run_watermark():
            return findings_report(scan_watermarks(netlist))

        def run_harpoon():
            scan = find_fsm_candidates(netlist)
            if not scan.candidates:
                raise AnalysisError("no FSM candidates found")
            if not 0 <= body.candidate < len(scan.candidates):
                raise AnalysisError(f"candidate index {body.candidate} out of range")
            cand = scan.candidates[body.candidate]
            sg = brute_force_state_graph(netlist, cand,
                                         max_inputs=body.max_inputs,
                                         max_states=body.max_states)
            report = attack_report(sg, analyze_harpoon(sg))
            report["state_graph"] = state_graph_report(sg)
            report["dot"] = to_dot(sg)
            report["candidate"] = body.candidate
            return report

        runners = {"fsm": run_fsm, "scc": run_scc,
                   "watermark": run_watermark, "harpoon": run_harpoon}
        job_id = session.submit(kind, runners[kind])
        return {"job": job_id, "kind": kind}

    @app.get("/api/analyses/{job_id}")
    def job_status(job_id: int):
        job = session.jobs.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id}")
        return {"job": job_id, **job}

    @app.post("/api/harpoon/patch")
    def harpoon_patch(body: PatchRequest):
        with session.mutate() as netlist:
            scan = find_fsm_candidates(netlist)
            if not scan.candidates:
                raise HTTPException(400, "no FSM candidates found")
            if not 0 <= body.candidate < len(scan.candidates):
                raise HTTPException(400, f"candidate index {body.candidate} out of range")
            cand = scan.candidates[body.candidate]
            try:
                sg = brute_force_state_graph(netlist, cand)
                result = analyze_harpoon(sg)
                apply_harpoon_patch(netlist, cand, result)
            except NetrevError as exc:
                raise HTTPException(400, str(exc))
            return attack_report(sg, result)

    @app.post("/api/watermark/scrub")
    def watermark_scrub():
        with session.mutate() as netlist:
            try:
                findings = scrub_all(netlist)
            except NetrevError as exc:
                raise HTTPException(400, str(exc))
            return findings_report(findings)

    @app.post("/api/export/verilog")
    def export_verilog(body: ExportRequest | None = None):
        body = body or ExportRequest()
        try:
            text = write_verilog_text(nl(), allow_dangling=body.allow_dangling)
        except NetrevError as exc:
            raise HTTPException(400, str(exc))
        if body.path:
            Path(body.path).write_text(text)
        return {"verilog": text}

    @app.post("/api/snapshot/save")
    def snapshot_save(body: PathRequest):
        try:
            save_snapshot(nl(), body.path)
        except OSError as exc:
            raise HTTPException(400, str(exc))
        return {"written": body.path}

    @app.post("/api/snapshot/load")
    def snapshot_load(body: PathRequest):
        with session.mutate():
            try:
                session.netlist = load_snapshot(body.path, session.library)
            except (NetrevError, OSError) as exc:
                raise HTTPException(400, str(exc))
        return session.netlist.stats()

    ui_path = Path(ui_dir) if ui_dir else _default_ui_dir()
    if ui_path and ui_path.is_dir():
        app.mount("/", StaticFiles(directory=str(ui_path), html=True), name="ui")
        log.info("serving UI assets from %s", ui_path)
    else:
        @app.get("/")
        def index():
            return {"service": "netrev", "ui": "not built",
                    "api": "/docs for the endpoint list"}

    return app


def _default_ui_dir() -> Path | None:
    here = Path(__file__).resolve()
    for base in [here.parents[2], *here.parents]:
        candidate = base / "frontend" / "dist"
        if candidate.is_dir():
            return candidate
    return None
