"""Gate-library model: the catalog of gate types the rest of the system
stays agnostic about.

A library is loaded from a JSON document:

    {"name": str,
     "gate_types": [
        {"name": str, "inputs": [str], "outputs": [str], "category": str,
         "functions": {pin: expr},                  # COMBINATIONAL / BUFFER
         "lut": {"config_key": str, "pin_order": [str]},
         "ff": {"data": str, "clock": str, "init_key": str,
                "enable": str, "reset": str}}]}

Libraries are immutable after load and safe to share between threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

from .boolfunc import BooleanFunction, parse_expression
from .errors import ExpressionError, LibraryError


class GateCategory(Enum):
    COMBINATIONAL = "COMBINATIONAL"
    LUT = "LUT"
    FF = "FF"
    LATCH = "LATCH"
    CONST_ZERO = "CONST_ZERO"
    CONST_ONE = "CONST_ONE"
    BUFFER = "BUFFER"


@dataclass(frozen=True)
class LutSpec:
    config_key: str
    pin_order: tuple[str, ...]  # pin_order[0] is the least significant index bit


@dataclass(frozen=True)
class FfSpec:
    data_pin: str
    clock_pin: str
    init_key: str
    enable_pin: str | None = None
    reset_pin: str | None = None  # synchronous, active high, clears to 0


@dataclass(frozen=True)
class GateType:
    name: str
    input_pins: tuple[str, ...]
    output_pins: tuple[str, ...]
    category: GateCategory
    function_templates: dict[str, str] = field(default_factory=dict)
    functions: dict[str, BooleanFunction] = field(default_factory=dict)
    lut_spec: LutSpec | None = None
    ff_spec: FfSpec | None = None

    def pin_direction(self, pin: str) -> str | None:
        if pin in self.input_pins:
            return "IN"
        if pin in self.output_pins:
            return "OUT"
        return None

    @property
    def is_sequential(self) -> bool:
        return self.category in (GateCategory.FF, GateCategory.LATCH)

    @property
    def is_constant(self) -> bool:
        return self.category in (GateCategory.CONST_ZERO, GateCategory.CONST_ONE)


class GateLibrary:
    """Immutable name -> GateType catalog."""

    def __init__(self, name: str, types: Iterable[GateType]):
        self.name = name
        self.types: dict[str, GateType] = {}
        for gt in types:
            if gt.name in self.types:
                raise LibraryError(f"duplicate gate type {gt.name!r}")
            self.types[gt.name] = gt
        categories = {gt.category for gt in self.types.values()}
        for needed in (GateCategory.CONST_ZERO, GateCategory.CONST_ONE):
            if needed not in categories:
                raise LibraryError(f"library {name!r} lacks a {needed.value} type")

    def __contains__(self, type_name: str) -> bool:
        return type_name in self.types

    def get(self, type_name: str) -> GateType:
        try:
            return self.types[type_name]
        except KeyError:
            raise LibraryError(f"unknown gate type {type_name!r}") from None

    def types_of(self, category: GateCategory) -> list[GateType]:
        return [gt for gt in self.types.values() if gt.category == category]


def parse_function_template(expr: str, allowed_vars: Iterable[str]) -> BooleanFunction:
    """Parse a pin-level Boolean template; variables outside the pin set fail."""
    return parse_expression(expr, allowed_vars)


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise LibraryError(f"{where}: missing required field {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise LibraryError(f"{where}: field {key!r} must be {kind.__name__}")
    return value


def _str_list(doc: dict, key: str, where: str) -> tuple[str, ...]:
    value = _require(doc, key, list, where)
    if not all(isinstance(v, str) for v in value):
        raise LibraryError(f"{where}: field {key!r} must be a list of strings")
    return tuple(value)


def _build_type(doc: dict) -> GateType:
    if not isinstance(doc, dict):
        raise LibraryError("gate_types entries must be objects")
    name = _require(doc, "name", str, "gate type")
    where = f"gate type {name!r}"
    inputs = _str_list(doc, "inputs", where)
    outputs = _str_list(doc, "outputs", where)
    cat_name = _require(doc, "category", str, where)
    try:
        category = GateCategory(cat_name)
    except ValueError:
        raise LibraryError(f"{where}: unknown category {cat_name!r}") from None

    pins = list(inputs) + list(outputs)
    if len(set(pins)) != len(pins):
        raise LibraryError(f"{where}: pin names must be unique and directions disjoint")

    templates: dict[str, str] = {}
    functions: dict[str, BooleanFunction] = {}
    raw_functions = doc.get("functions")
    if raw_functions is not None:
        if category not in (GateCategory.COMBINATIONAL, GateCategory.BUFFER):
            raise LibraryError(f"{where}: only COMBINATIONAL/BUFFER types take functions")
        if not isinstance(raw_functions, dict):
            raise LibraryError(f"{where}: functions must map output pins to expressions")
        for pin, expr in raw_functions.items():
            if pin not in outputs:
                raise LibraryError(f"{where}: function for unknown output pin {pin!r}")
            try:
                functions[pin] = parse_function_template(expr, inputs)
            except ExpressionError as exc:
                raise LibraryError(f"{where}, pin {pin!r}: {exc}") from exc
            templates[pin] = expr

    if category is GateCategory.COMBINATIONAL:
        missing = [p for p in outputs if p not in functions]
        if missing:
            raise LibraryError(f"{where}: no function for output pins {missing}")
    elif category is GateCategory.BUFFER:
        if len(inputs) != 1 or len(outputs) != 1:
            raise LibraryError(f"{where}: BUFFER needs exactly one input and one output")
        if not functions:
            functions[outputs[0]] = BooleanFunction.variable(inputs[0])
            templates[outputs[0]] = inputs[0]
        elif functions[outputs[0]] != BooleanFunction.variable(inputs[0]):
            raise LibraryError(f"{where}: BUFFER function must be the identity")
    elif category in (GateCategory.CONST_ZERO, GateCategory.CONST_ONE):
        if inputs or len(outputs) != 1:
            raise LibraryError(f"{where}: constant types have no inputs and one output")

    lut_spec = None
    raw_lut = doc.get("lut")
    if category is GateCategory.LUT:
        if raw_lut is None:
            raise LibraryError(f"{where}: LUT category requires a lut spec")
        config_key = _require(raw_lut, "config_key", str, where)
        pin_order = _str_list(raw_lut, "pin_order", where)
        if sorted(pin_order) != sorted(inputs):
            raise LibraryError(f"{where}: lut pin_order must permute the input pins")
        lut_spec = LutSpec(config_key, pin_order)
    elif raw_lut is not None:
        raise LibraryError(f"{where}: lut spec only allowed on LUT category")

    ff_spec = None
    raw_ff = doc.get("ff")
    if category is GateCategory.FF:
        if raw_ff is None:
            raise LibraryError(f"{where}: FF category requires a ff spec")
        data = _require(raw_ff, "data", str, where)
        clock = _require(raw_ff, "clock", str, where)
        init_key = _require(raw_ff, "init_key", str, where)
        enable = raw_ff.get("enable")
        reset = raw_ff.get("reset")
        for pin in [data, clock, enable, reset]:
            if pin is not None and pin not in inputs:
                raise LibraryError(f"{where}: ff pin {pin!r} is not an input pin")
        if not outputs:
            raise LibraryError(f"{where}: FF needs an output pin")
        ff_spec = FfSpec(data, clock, init_key, enable, reset)
    elif raw_ff is not None:
        raise LibraryError(f"{where}: ff spec only allowed on FF category")

    return GateType(
        name=name,
        input_pins=inputs,
        output_pins=outputs,
        category=category,
        function_templates=templates,
        functions=functions,
        lut_spec=lut_spec,
        ff_spec=ff_spec,
    )


def library_from_dict(doc: dict) -> GateLibrary:
    if not isinstance(doc, dict):
        raise LibraryError("gate-library document must be a JSON object")
    name = _require(doc, "name", str, "library")
    raw_types = _require(doc, "gate_types", list, "library")
    return GateLibrary(name, [_build_type(t) for t in raw_types])


def loads_gate_library(text: str) -> GateLibrary:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LibraryError(f"gate-library document is not valid JSON: {exc}") from exc
    return library_from_dict(doc)


def load_gate_library(path) -> GateLibrary:
    return loads_gate_library(Path(path).read_text())


def library_to_dict(library: GateLibrary) -> dict:
    types = []
    for gt in library.types.values():
        entry: dict = {
            "name": gt.name,
            "inputs": list(gt.input_pins),
            "outputs": list(gt.output_pins),
            "category": gt.category.value,
        }
        if gt.function_templates:
            entry["functions"] = dict(gt.function_templates)
        if gt.lut_spec:
            entry["lut"] = {
                "config_key": gt.lut_spec.config_key,
                "pin_order": list(gt.lut_spec.pin_order),
            }
        if gt.ff_spec:
            ff: dict = {
                "data": gt.ff_spec.data_pin,
                "clock": gt.ff_spec.clock_pin,
                "init_key": gt.ff_spec.init_key,
            }
            if gt.ff_spec.enable_pin:
                ff["enable"] = gt.ff_spec.enable_pin
            if gt.ff_spec.reset_pin:
                ff["reset"] = gt.ff_spec.reset_pin
            entry["ff"] = ff
        types.append(entry)
    return {"name": library.name, "gate_types": types}


def dumps_gate_library(library: GateLibrary) -> str:
    return json.dumps(library_to_dict(library), indent=2)
