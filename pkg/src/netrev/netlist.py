"""Mutable in-memory netlist graph: gates, nets, submodules, events.

Every successful mutation appends exactly one event to the journal; replaying
a journal onto a fresh netlist reproduces the final structure.  Ids are
monotone and never reused.  Mutations take the internal writer lock; analyses
that need a stable view across several reads hold ``read_access()``.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .errors import NetlistError
from .initcodec import decode_init
from .library import GateCategory, GateLibrary, GateType


class EventKind(Enum):
    GATE_CREATED = "GATE_CREATED"
    GATE_DELETED = "GATE_DELETED"
    GATE_DATA_CHANGED = "GATE_DATA_CHANGED"
    NET_CREATED = "NET_CREATED"
    NET_DELETED = "NET_DELETED"
    NET_ENDPOINT_CHANGED = "NET_ENDPOINT_CHANGED"
    MODULE_CREATED = "MODULE_CREATED"
    MODULE_CHANGED = "MODULE_CHANGED"
    MODULE_DELETED = "MODULE_DELETED"
    SNAPSHOT_LOADED = "SNAPSHOT_LOADED"


@dataclass(frozen=True)
class Event:
    seq: int
    kind: EventKind
    payload: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "kind": self.kind.value, "payload": self.payload}


@dataclass(frozen=True)
class Endpoint:
    gate_id: int
    pin: str
    direction: str  # "IN" or "OUT"


@dataclass
class Gate:
    id: int
    name: str
    type: GateType
    data: dict[str, str] = field(default_factory=dict)


@dataclass
class Net:
    id: int
    name: str
    source: Endpoint | None = None
    sinks: set[Endpoint] = field(default_factory=set)
    is_global_input: bool = False
    is_global_output: bool = False

    def endpoints(self) -> list[Endpoint]:
        eps = [self.source] if self.source else []
        eps.extend(sorted(self.sinks, key=lambda e: (e.gate_id, e.pin)))
        return eps


@dataclass
class Submodule:
    id: int
    name: str
    gate_ids: set[int] = field(default_factory=set)
    net_ids: set[int] = field(default_factory=set)
    color: tuple[int, int, int] | None = None
    parent: int | None = None


class _ReadWriteLock:
    """Single writer, many readers; writers wait for readers to drain."""

    def __init__(self):
        self._cond = threading.Condition()
        self._readers = 0
        self._writer = False

    @contextmanager
    def read(self):
        with self._cond:
            while self._writer:
                self._cond.wait()
            self._readers += 1
        try:
            yield
        finally:
            with self._cond:
                self._readers -= 1
                if self._readers == 0:
                    self._cond.notify_all()

    @contextmanager
    def write(self):
        with self._cond:
            while self._writer or self._readers:
                self._cond.wait()
            self._writer = True
        try:
            yield
        finally:
            with self._cond:
                self._writer = False
                self._cond.notify_all()


_UNSET = object()


class Netlist:
    """The working design: a graph of gates connected by nets."""

    def __init__(self, design_name: str, library: GateLibrary):
        self.design_name = design_name
        self.library = library
        self.gates: dict[int, Gate] = {}
        self.nets: dict[int, Net] = {}
        self.submodules: dict[int, Submodule] = {}
        self.next_gate_id = 1
        self.next_net_id = 1
        self.next_module_id = 1
        self.events: list[Event] = []
        self._gate_names: dict[str, int] = {}
        self._pin_index: dict[tuple[int, str], int] = {}
        self._lock = _ReadWriteLock()

    # -- access contract ----------------------------------------------------

    def read_access(self):
        """Context manager granting a stable read view (blocks writers)."""
        return self._lock.read()

    # -- events --------------------------------------------------------------

    def _emit(self, kind: EventKind, payload: dict):
        self.events.append(Event(len(self.events) + 1, kind, payload))

    def events_after(self, seq: int) -> list[Event]:
        return [e for e in self.events if e.seq > seq]

    # -- gates ---------------------------------------------------------------

    def gate(self, gate_id: int) -> Gate:
        try:
            return self.gates[gate_id]
        except KeyError:
            raise NetlistError(f"unknown gate id {gate_id}") from None

    def gate_by_name(self, name: str) -> Gate | None:
        gid = self._gate_names.get(name)
        return self.gates[gid] if gid is not None else None

    def create_gate(self, type_name: str, name: str) -> int:
        with self._lock.write():
            return self._create_gate(self.next_gate_id, type_name, name)

    def _create_gate(self, gate_id: int, type_name: str, name: str) -> int:
        gate_type = self.library.get(type_name)
        if not name:
            raise NetlistError("gate name must be nonempty")
        if name in self._gate_names:
            raise NetlistError(f"gate name {name!r} already in use")
        if gate_id in self.gates:
            raise NetlistError(f"gate id {gate_id} already in use")
        self.gates[gate_id] = Gate(gate_id, name, gate_type)
        self._gate_names[name] = gate_id
        self.next_gate_id = max(self.next_gate_id, gate_id + 1)
        self._emit(EventKind.GATE_CREATED, {"gate": gate_id, "name": name, "type": type_name})
        return gate_id

    def delete_gate(self, gate_id: int):
        with self._lock.write():
            gate = self.gate(gate_id)
            removed = []
            for pin in gate.type.input_pins + gate.type.output_pins:
                net_id = self._pin_index.pop((gate_id, pin), None)
                if net_id is None:
                    continue
                net = self.nets[net_id]
                if net.source and net.source.gate_id == gate_id and net.source.pin == pin:
                    net.source = None
                else:
                    net.sinks.discard(Endpoint(gate_id, pin, "IN"))
                removed.append([net_id, pin])
            modules = []
            for sub in self.submodules.values():
                if gate_id in sub.gate_ids:
                    sub.gate_ids.discard(gate_id)
                    modules.append(sub.id)
            del self.gates[gate_id]
            del self._gate_names[gate.name]
            self._emit(EventKind.GATE_DELETED, {
                "gate": gate_id, "name": gate.name, "type": gate.type.name,
                "data": dict(gate.data), "endpoints": removed, "modules": modules,
            })

    def set_gate_data(self, gate_id: int, key: str, value: str):
        with self._lock.write():
            gate = self.gate(gate_id)
            self._validate_gate_data(gate, key, value)
            old = gate.data.get(key)
            gate.data[key] = value
            self._emit(EventKind.GATE_DATA_CHANGED,
                       {"gate": gate_id, "key": key, "old": old, "new": value})

    def _validate_gate_data(self, gate: Gate, key: str, value: str):
        gt = gate.type
        if gt.lut_spec and key == gt.lut_spec.config_key:
            decode_init(value, len(gt.input_pins))  # raises on bad width/format
        elif gt.ff_spec and key == gt.ff_spec.init_key:
            if value not in ("0", "1"):
                raise NetlistError(
                    f"FF init value must be '0' or '1', got {value!r} on gate {gate.name!r}")

    # -- nets ----------------------------------------------------------------

    def net(self, net_id: int) -> Net:
        try:
            return self.nets[net_id]
        except KeyError:
            raise NetlistError(f"unknown net id {net_id}") from None

    def create_net(self, name: str, *, global_input: bool = False,
                   global_output: bool = False) -> int:
        with self._lock.write():
            return self._create_net(self.next_net_id, name, global_input, global_output)

    def _create_net(self, net_id: int, name: str, global_input: bool, global_output: bool) -> int:
        if not name:
            raise NetlistError("net name must be nonempty")
        if net_id in self.nets:
            raise NetlistError(f"net id {net_id} already in use")
        self.nets[net_id] = Net(net_id, name,
                                is_global_input=global_input, is_global_output=global_output)
        self.next_net_id = max(self.next_net_id, net_id + 1)
        self._emit(EventKind.NET_CREATED, {
            "net": net_id, "name": name,
            "global_input": global_input, "global_output": global_output,
        })
        return net_id

    def delete_net(self, net_id: int):
        with self._lock.write():
            net = self.net(net_id)
            for ep in net.endpoints():
                self._pin_index.pop((ep.gate_id, ep.pin), None)
            modules = []
            for sub in self.submodules.values():
                if net_id in sub.net_ids:
                    sub.net_ids.discard(net_id)
                    modules.append(sub.id)
            del self.nets[net_id]
            self._emit(EventKind.NET_DELETED,
                       {"net": net_id, "name": net.name, "modules": modules})

    def connect(self, net_id: int, gate_id: int, pin: str):
        with self._lock.write():
            self._connect(net_id, gate_id, pin)

    def _connect(self, net_id: int, gate_id: int, pin: str):
        net = self.net(net_id)
        gate = self.gate(gate_id)
        direction = gate.type.pin_direction(pin)
        if direction is None:
            raise NetlistError(f"gate {gate.name!r} ({gate.type.name}) has no pin {pin!r}")
        if (gate_id, pin) in self._pin_index:
            raise NetlistError(f"pin {pin!r} of gate {gate.name!r} is already connected")
        endpoint = Endpoint(gate_id, pin, direction)
        if direction == "OUT":
            if net.source is not None:
                raise NetlistError(f"net {net.name!r} already has a source")
            if net.is_global_input:
                raise NetlistError(f"net {net.name!r} is a global input and cannot be driven")
            net.source = endpoint
        else:
            net.sinks.add(endpoint)
        self._pin_index[(gate_id, pin)] = net_id
        self._emit(EventKind.NET_ENDPOINT_CHANGED, {
            "net": net_id, "gate": gate_id, "pin": pin,
            "direction": direction, "action": "connect",
        })

    def disconnect(self, net_id: int, gate_id: int, pin: str):
        with self._lock.write():
            net = self.net(net_id)
            gate = self.gate(gate_id)
            if self._pin_index.get((gate_id, pin)) != net_id:
                raise NetlistError(
                    f"pin {pin!r} of gate {gate.name!r} is not connected to net {net.name!r}")
            direction = gate.type.pin_direction(pin)
            if direction == "OUT":
                net.source = None
            else:
                net.sinks.discard(Endpoint(gate_id, pin, "IN"))
            del self._pin_index[(gate_id, pin)]
            self._emit(EventKind.NET_ENDPOINT_CHANGED, {
                "net": net_id, "gate": gate_id, "pin": pin,
                "direction": direction, "action": "disconnect",
            })

    def net_of(self, gate_id: int, pin: str) -> Net | None:
        net_id = self._pin_index.get((gate_id, pin))
        return self.nets[net_id] if net_id is not None else None

    # -- submodules ------------------------------------------------------------

    def submodule(self, module_id: int) -> Submodule:
        try:
            return self.submodules[module_id]
        except KeyError:
            raise NetlistError(f"unknown submodule id {module_id}") from None

    def create_submodule(self, name: str, gate_ids: Iterable[int] = (),
                         net_ids: Iterable[int] = (), parent: int | None = None,
                         color: tuple[int, int, int] | None = None) -> int:
        with self._lock.write():
            return self._create_submodule(self.next_module_id, name, set(gate_ids),
                                          set(net_ids), parent, color)

    def _create_submodule(self, module_id, name, gate_ids, net_ids, parent, color) -> int:
        self._check_member_ids(gate_ids, net_ids)
        if parent is not None and parent not in self.submodules:
            raise NetlistError(f"unknown parent submodule {parent}")
        if module_id in self.submodules:
            raise NetlistError(f"submodule id {module_id} already in use")
        color = tuple(color) if color is not None else None
        self.submodules[module_id] = Submodule(module_id, name, set(gate_ids),
                                               set(net_ids), color, parent)
        self.next_module_id = max(self.next_module_id, module_id + 1)
        self._emit(EventKind.MODULE_CREATED, {
            "module": module_id, "name": name,
            "gates": sorted(gate_ids), "nets": sorted(net_ids),
            "parent": parent, "color": list(color) if color else None,
        })
        return module_id

    def update_submodule(self, module_id: int, *, name=_UNSET, gate_ids=_UNSET,
                         net_ids=_UNSET, parent=_UNSET, color=_UNSET):
        with self._lock.write():
            sub = self.submodule(module_id)
            changes = {}
            if name is not _UNSET and name != sub.name:
                changes["name"] = {"old": sub.name, "new": name}
                sub.name = name
            if gate_ids is not _UNSET:
                gate_ids = set(gate_ids)
                self._check_member_ids(gate_ids, ())
                if gate_ids != sub.gate_ids:
                    changes["gates"] = {"old": sorted(sub.gate_ids), "new": sorted(gate_ids)}
                    sub.gate_ids = gate_ids
            if net_ids is not _UNSET:
                net_ids = set(net_ids)
                self._check_member_ids((), net_ids)
                if net_ids != sub.net_ids:
                    changes["nets"] = {"old": sorted(sub.net_ids), "new": sorted(net_ids)}
                    sub.net_ids = net_ids
            if parent is not _UNSET and parent != sub.parent:
                if parent is not None:
                    if parent not in self.submodules:
                        raise NetlistError(f"unknown parent submodule {parent}")
                    self._check_parent_cycle(module_id, parent)
                changes["parent"] = {"old": sub.parent, "new": parent}
                sub.parent = parent
            if color is not _UNSET:
                color = tuple(color) if color is not None else None
                if color != sub.color:
                    changes["color"] = {"old": list(sub.color) if sub.color else None,
                                        "new": list(color) if color else None}
                    sub.color = color
            self._emit(EventKind.MODULE_CHANGED, {"module": module_id, "changes": changes})

    def delete_submodule(self, module_id: int):
        with self._lock.write():
            sub = self.submodule(module_id)
            for other in self.submodules.values():
                if other.parent == module_id:
                    other.parent = sub.parent
            del self.submodules[module_id]
            self._emit(EventKind.MODULE_DELETED, {"module": module_id, "name": sub.name})

    def _check_member_ids(self, gate_ids, net_ids):
        for gid in gate_ids:
            if gid not in self.gates:
                raise NetlistError(f"submodule references unknown gate {gid}")
        for nid in net_ids:
            if nid not in self.nets:
                raise NetlistError(f"submodule references unknown net {nid}")

    def _check_parent_cycle(self, module_id: int, parent: int):
        seen = {module_id}
        cursor: int | None = parent
        while cursor is not None:
            if cursor in seen:
                raise NetlistError("submodule parent links would form a cycle")
            seen.add(cursor)
            cursor = self.submodules[cursor].parent

    # -- queries ----------------------------------------------------------------

    def global_input_nets(self) -> list[Net]:
        return [n for n in self.nets.values() if n.is_global_input]

    def global_output_nets(self) -> list[Net]:
        return [n for n in self.nets.values() if n.is_global_output]

    def gates_of_category(self, category: GateCategory) -> list[Gate]:
        return [g for g in self.gates.values() if g.type.category == category]

    def stats(self) -> dict:
        by_category: dict[str, int] = {}
        for gate in self.gates.values():
            by_category[gate.type.category.value] = \
                by_category.get(gate.type.category.value, 0) + 1
        return {
            "design": self.design_name,
            "library": self.library.name,
            "gates": len(self.gates),
            "nets": len(self.nets),
            "modules": len(self.submodules),
            "global_inputs": sum(1 for n in self.nets.values() if n.is_global_input),
            "global_outputs": sum(1 for n in self.nets.values() if n.is_global_output),
            "gates_by_category": dict(sorted(by_category.items())),
            "events": len(self.events),
        }

    # -- integrity ----------------------------------------------------------------

    def audit(self) -> list[str]:
        """Full referential-integrity check; returns violation descriptions."""
        problems = []
        names_seen = set()
        for gid, gate in self.gates.items():
            if gate.id != gid:
                problems.append(f"gate {gid}: id field mismatch")
            if gid >= self.next_gate_id:
                problems.append(f"gate {gid}: id not below next_gate_id")
            if gate.name in names_seen:
                problems.append(f"gate name {gate.name!r} duplicated")
            names_seen.add(gate.name)
            if gate.type.name not in self.library.types:
                problems.append(f"gate {gid}: type {gate.type.name!r} not in library")
            if self._gate_names.get(gate.name) != gid:
                problems.append(f"gate {gid}: name index out of sync")
        seen_pins: dict[tuple[int, str], int] = {}
        for nid, net in self.nets.items():
            if nid >= self.next_net_id:
                problems.append(f"net {nid}: id not below next_net_id")
            if net.is_global_input and net.source is not None:
                problems.append(f"net {nid}: global input with a source")
            endpoints = []
            if net.source:
                endpoints.append((net.source, "OUT"))
            endpoints.extend((ep, "IN") for ep in net.sinks)
            for ep, want_dir in endpoints:
                if ep.direction != want_dir:
                    problems.append(f"net {nid}: endpoint {ep} direction mismatch")
                gate = self.gates.get(ep.gate_id)
                if gate is None:
                    problems.append(f"net {nid}: endpoint references unknown gate {ep.gate_id}")
                    continue
                if gate.type.pin_direction(ep.pin) != want_dir:
                    problems.append(f"net {nid}: pin {ep.pin!r} has wrong direction on {gate.type.name}")
                key = (ep.gate_id, ep.pin)
                if key in seen_pins:
                    problems.append(f"pin {key} appears in nets {seen_pins[key]} and {nid}")
                seen_pins[key] = nid
                if self._pin_index.get(key) != nid:
                    problems.append(f"pin index out of sync for {key}")
        for key, nid in self._pin_index.items():
            if key not in seen_pins:
                problems.append(f"pin index entry {key} -> {nid} has no endpoint")
        for mid, sub in self.submodules.items():
            if mid >= self.next_module_id:
                problems.append(f"submodule {mid}: id not below next_module_id")
            for gid in sub.gate_ids:
                if gid not in self.gates:
                    problems.append(f"submodule {mid}: unknown gate {gid}")
            for nid in sub.net_ids:
                if nid not in self.nets:
                    problems.append(f"submodule {mid}: unknown net {nid}")
            if sub.parent is not None and sub.parent not in self.submodules:
                problems.append(f"submodule {mid}: unknown parent {sub.parent}")
        for mid, sub in self.submodules.items():
            seen = set()
            cursor: int | None = mid
            while cursor is not None:
                if cursor in seen:
                    problems.append(f"submodule {mid}: parent cycle")
                    break
                seen.add(cursor)
                parent = self.submodules.get(cursor)
                cursor = parent.parent if parent else None
        return problems


def replay_events(events: Iterable[Event], library: GateLibrary,
                  design_name: str = "replay") -> Netlist:
    """Rebuild a netlist by applying a journal to a fresh instance."""
    netlist = Netlist(design_name, library)
    for event in events:
        payload = event.payload
        kind = event.kind
        if kind is EventKind.GATE_CREATED:
            with netlist._lock.write():
                netlist._create_gate(payload["gate"], payload["type"], payload["name"])
        elif kind is EventKind.GATE_DELETED:
            netlist.delete_gate(payload["gate"])
        elif kind is EventKind.GATE_DATA_CHANGED:
            netlist.set_gate_data(payload["gate"], payload["key"], payload["new"])
        elif kind is EventKind.NET_CREATED:
            with netlist._lock.write():
                netlist._create_net(payload["net"], payload["name"],
                                    payload["global_input"], payload["global_output"])
        elif kind is EventKind.NET_DELETED:
            netlist.delete_net(payload["net"])
        elif kind is EventKind.NET_ENDPOINT_CHANGED:
            if payload["action"] == "connect":
                netlist.connect(payload["net"], payload["gate"], payload["pin"])
            else:
                netlist.disconnect(payload["net"], payload["gate"], payload["pin"])
        elif kind is EventKind.MODULE_CREATED:
            with netlist._lock.write():
                color = tuple(payload["color"]) if payload["color"] else None
                netlist._create_submodule(payload["module"], payload["name"],
                                          set(payload["gates"]), set(payload["nets"]),
                                          payload["parent"], color)
        elif kind is EventKind.MODULE_CHANGED:
            changes = payload["changes"]
            kwargs = {}
            if "name" in changes:
                kwargs["name"] = changes["name"]["new"]
            if "gates" in changes:
                kwargs["gate_ids"] = set(changes["gates"]["new"])
            if "nets" in changes:
                kwargs["net_ids"] = set(changes["nets"]["new"])
            if "parent" in changes:
                kwargs["parent"] = changes["parent"]["new"]
            if "color" in changes:
                new = changes["color"]["new"]
                kwargs["color"] = tuple(new) if new else None
            netlist.update_submodule(payload["module"], **kwargs)
        elif kind is EventKind.MODULE_DELETED:
            netlist.delete_submodule(payload["module"])
        elif kind is EventKind.SNAPSHOT_LOADED:
            raise NetlistError("cannot replay a journal containing a snapshot marker")
        else:  # pragma: no cover - enum is closed
            raise NetlistError(f"cannot replay event kind {kind}")
    return netlist


def netlists_equal(a: Netlist, b: Netlist) -> bool:
    """Deep structural comparison (ignores the event journals)."""
    if (a.design_name, a.library.name) != (b.design_name, b.library.name):
        return False
    if (a.next_gate_id, a.next_net_id, a.next_module_id) != \
       (b.next_gate_id, b.next_net_id, b.next_module_id):
        return False
    if a.gates.keys() != b.gates.keys() or a.nets.keys() != b.nets.keys() \
            or a.submodules.keys() != b.submodules.keys():
        return False
    for gid, ga in a.gates.items():
        gb = b.gates[gid]
        if (ga.name, ga.type.name, ga.data) != (gb.name, gb.type.name, gb.data):
            return False
    for nid, na in a.nets.items():
        nb = b.nets[nid]
        if (na.name, na.source, na.sinks, na.is_global_input, na.is_global_output) != \
           (nb.name, nb.source, nb.sinks, nb.is_global_input, nb.is_global_output):
            return False
    for mid, ma in a.submodules.items():
        mb = b.submodules[mid]
        if (ma.name, ma.gate_ids, ma.net_ids, ma.color, ma.parent) != \
           (mb.name, mb.gate_ids, mb.net_ids, mb.color, mb.parent):
            return False
    return True
