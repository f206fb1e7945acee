"""Versioned JSON snapshots: pause/resume a session without re-parsing HDL.

Loading resets the event journal to a single SNAPSHOT_LOADED marker; ids and
counters are restored exactly so later mutations keep the never-reuse rule.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import NetlistError, NetrevError, SnapshotError
from .library import GateLibrary
from .netlist import EventKind, Netlist

SNAPSHOT_VERSION = 1


def netlist_to_dict(netlist: Netlist) -> dict:
    gates = []
    for gid in sorted(netlist.gates):
        gate = netlist.gates[gid]
        gates.append({
            "id": gid,
            "name": gate.name,
            "type": gate.type.name,
            "data": dict(sorted(gate.data.items())),
        })
    nets = []
    for nid in sorted(netlist.nets):
        net = netlist.nets[nid]
        nets.append({
            "id": nid,
            "name": net.name,
            "global_input": net.is_global_input,
            "global_output": net.is_global_output,
            "source": [net.source.gate_id, net.source.pin] if net.source else None,
            "sinks": sorted([[ep.gate_id, ep.pin] for ep in net.sinks]),
        })
    submodules = []
    for mid in sorted(netlist.submodules):
        sub = netlist.submodules[mid]
        submodules.append({
            "id": mid,
            "name": sub.name,
            "gates": sorted(sub.gate_ids),
            "nets": sorted(sub.net_ids),
            "color": list(sub.color) if sub.color else None,
            "parent": sub.parent,
        })
    return {
        "version": SNAPSHOT_VERSION,
        "design": netlist.design_name,
        "library": netlist.library.name,
        "counters": {
            "gate": netlist.next_gate_id,
            "net": netlist.next_net_id,
            "module": netlist.next_module_id,
        },
        "gates": gates,
        "nets": nets,
        "submodules": submodules,
    }


def netlist_from_dict(doc: dict, library: GateLibrary) -> Netlist:
    if not isinstance(doc, dict):
        raise SnapshotError("snapshot must be a JSON object")
    version = doc.get("version")
    if version != SNAPSHOT_VERSION:
        raise SnapshotError(f"unsupported snapshot version {version!r} "
                            f"(this build reads version {SNAPSHOT_VERSION})")
    if doc.get("library") != library.name:
        raise SnapshotError(f"snapshot was made with library {doc.get('library')!r}, "
                            f"loaded library is {library.name!r}")
    netlist = Netlist(doc.get("design", ""), library)
    try:
        for entry in doc.get("gates", []):
            with netlist._lock.write():
                netlist._create_gate(entry["id"], entry["type"], entry["name"])
            for key, value in entry.get("data", {}).items():
                netlist.set_gate_data(entry["id"], key, value)
        for entry in doc.get("nets", []):
            with netlist._lock.write():
                netlist._create_net(entry["id"], entry["name"],
                                    entry.get("global_input", False),
                                    entry.get("global_output", False))
            if entry.get("source"):
                netlist.connect(entry["id"], entry["source"][0], entry["source"][1])
            for gate_id, pin in entry.get("sinks", []):
                netlist.connect(entry["id"], gate_id, pin)
        for entry in doc.get("submodules", []):
            with netlist._lock.write():
                color = tuple(entry["color"]) if entry.get("color") else None
                netlist._create_submodule(entry["id"], entry["name"],
                                          set(entry.get("gates", [])),
                                          set(entry.get("nets", [])), None, color)
        for entry in doc.get("submodules", []):
            if entry.get("parent") is not None:
                netlist.update_submodule(entry["id"], parent=entry["parent"])
    except (NetlistError, NetrevError) as exc:
        raise SnapshotError(f"snapshot is internally inconsistent: {exc}") from exc
    except (KeyError, TypeError) as exc:
        raise SnapshotError(f"snapshot is structurally malformed: {exc!r}") from exc

    counters = doc.get("counters", {})
    for field, attr in (("gate", "next_gate_id"), ("net", "next_net_id"),
                        ("module", "next_module_id")):
        stored = counters.get(field)
        if stored is not None:
            if stored < getattr(netlist, attr):
                raise SnapshotError(f"snapshot {field} counter {stored} would reuse ids")
            setattr(netlist, attr, stored)
    problems = netlist.audit()
    if problems:
        raise SnapshotError(f"snapshot failed integrity audit: {problems[0]}")
    netlist.events.clear()
    netlist._emit(EventKind.SNAPSHOT_LOADED,
                  {"design": netlist.design_name, "library": library.name})
    return netlist


def save_snapshot(netlist: Netlist, destination) -> None:
    text = json.dumps(netlist_to_dict(netlist), indent=1, sort_keys=True)
    Path(destination).write_text(text + "\n")


def load_snapshot(source, library: GateLibrary) -> Netlist:
    try:
        doc = json.loads(Path(source).read_text())
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"snapshot file is not valid JSON: {exc}") from exc
    return netlist_from_dict(doc, library)
