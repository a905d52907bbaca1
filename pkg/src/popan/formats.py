"""Human-authorable text formats: native model files, plan files, DOT export.

The native model file is YAML with two top-level lists::

    nodes:
      - {id: Lid, role: Product, kind: LastProduct, label: Lid}
      - {id: Manipulation, role: Process, type: Manipulation}
    edges:
      - {id: LinkLid, kind: LinkingP2P, a: Lid, b: Manipulation, conditional: true}
      - {id: StructBoxLid, kind: Structural, a: BatteryBox, b: Lid,
         arrowA: FullArrow, arrowB: OpenArrow}

Omitted arrows default to None and ``conditional`` to false. Loading is
strict about structure (unknown keys are rejected) but permissive about
semantics: a file that loads may still fail validation, which is exactly
what the negative-test fixtures rely on.

Plan files are JSON with 1-based contiguous step indices. The DOT export
renders the precedence constraints (not the chosen total order) for
external graph tooling.
"""

from __future__ import annotations

import json
from typing import Any

import yaml

from .model import (
    Arrow,
    EdgeKind,
    GraphBuilder,
    Mode,
    PopanEdge,
    PopanError,
    PopanGraph,
    PopanNode,
    ProductKind,
    Role,
)
from .planner import Plan, PrecedenceGraph, Step


class NativeFormatError(PopanError):
    pass


class PlanFormatError(PopanError):
    pass


_NODE_KEYS = {"id", "role", "kind", "label", "type"}
_EDGE_KEYS = {"id", "kind", "a", "b", "arrowA", "arrowB", "conditional"}


def _parse_enum(enum_cls, value: Any, context: str):
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(member.value for member in enum_cls)
        raise NativeFormatError(
            f"{context}: {value!r} is not one of: {allowed}"
        ) from None


def _require_str(entry: dict, key: str, context: str) -> str:
    value = entry.get(key)
    if not isinstance(value, str) or not value:
        raise NativeFormatError(f"{context}: {key!r} must be a non-empty string")
    return value


def _check_keys(entry: Any, allowed: set[str], context: str) -> dict:
    if not isinstance(entry, dict):
        raise NativeFormatError(f"{context}: expected a mapping, got {type(entry).__name__}")
    unknown = set(entry) - allowed
    if unknown:
        raise NativeFormatError(f"{context}: unknown keys: {', '.join(sorted(unknown))}")
    return entry


def _parse_node(entry: Any, index: int) -> PopanNode:
    context = f"nodes[{index}]"
    entry = _check_keys(entry, _NODE_KEYS, context)
    node_id = _require_str(entry, "id", context)
    role = _parse_enum(Role, _require_str(entry, "role", context), f"{context}.role")
    kind = None
    if role is Role.PRODUCT:
        kind = _parse_enum(ProductKind, _require_str(entry, "kind", context), f"{context}.kind")
    elif "kind" in entry:
        raise NativeFormatError(f"{context}: only products carry a 'kind'")
    label = entry.get("label", "")
    type_tag = entry.get("type", "")
    if not isinstance(label, str) or not isinstance(type_tag, str):
        raise NativeFormatError(f"{context}: 'label' and 'type' must be strings")
    try:
        return PopanNode(id=node_id, role=role, kind=kind, label=label, type_tag=type_tag)
    except ValueError as exc:
        raise NativeFormatError(f"{context}: {exc}") from exc


def _parse_edge(entry: Any, index: int) -> PopanEdge:
    context = f"edges[{index}]"
    entry = _check_keys(entry, _EDGE_KEYS, context)
    kind = _parse_enum(EdgeKind, _require_str(entry, "kind", context), f"{context}.kind")
    arrows = {}
    for key in ("arrowA", "arrowB"):
        raw = entry.get(key, Arrow.NONE.value)
        arrows[key] = _parse_enum(Arrow, raw, f"{context}.{key}")
    conditional = entry.get("conditional", False)
    if not isinstance(conditional, bool):
        raise NativeFormatError(f"{context}: 'conditional' must be a boolean")
    try:
        return PopanEdge(
            id=_require_str(entry, "id", context),
            kind=kind,
            a=_require_str(entry, "a", context),
            b=_require_str(entry, "b", context),
            arrow_a=arrows["arrowA"],
            arrow_b=arrows["arrowB"],
            conditional=conditional,
        )
    except ValueError as exc:
        raise NativeFormatError(f"{context}: {exc}") from exc


def load_native(text: str) -> PopanGraph:
    """Parse a native model file into a graph (structure checks only)."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise NativeFormatError(f"not valid YAML: {exc}") from exc
    data = _check_keys(data, {"nodes", "edges"}, "model file")
    nodes = data.get("nodes", [])
    edges = data.get("edges", [])
    if not isinstance(nodes, list) or not isinstance(edges, list):
        raise NativeFormatError("model file: 'nodes' and 'edges' must be lists")

    builder = GraphBuilder()
    try:
        for index, entry in enumerate(nodes):
            builder.add_node(_parse_node(entry, index))
        for index, entry in enumerate(edges):
            builder.add_edge(_parse_edge(entry, index))
    except PopanError as exc:
        if isinstance(exc, NativeFormatError):
            raise
        raise NativeFormatError(str(exc)) from exc
    return builder.build()


def dump_native(graph: PopanGraph) -> str:
    """Serialize a graph to native YAML (deterministic, default-omitting)."""
    nodes = []
    for node in graph.nodes.values():
        entry: dict[str, Any] = {"id": node.id, "role": node.role.value}
        if node.kind is not None:
            entry["kind"] = node.kind.value
        if node.label:
            entry["label"] = node.label
        if node.type_tag:
            entry["type"] = node.type_tag
        nodes.append(entry)
    edges = []
    for edge in graph.edges.values():
        entry = {"id": edge.id, "kind": edge.kind.value, "a": edge.a, "b": edge.b}
        if edge.arrow_a is not Arrow.NONE:
            entry["arrowA"] = edge.arrow_a.value
        if edge.arrow_b is not Arrow.NONE:
            entry["arrowB"] = edge.arrow_b.value
        if edge.conditional:
            entry["conditional"] = True
        edges.append(entry)
    return yaml.safe_dump(
        {"nodes": nodes, "edges": edges},
        sort_keys=False,
        allow_unicode=True,
        default_flow_style=False,
        width=100,
    )


def plan_to_json(plan: Plan) -> str:
    payload = {
        "mode": plan.mode.value,
        "steps": [
            {
                "index": position + 1,
                "product": step.product,
                "process": step.process,
                "resources": list(step.resources),
            }
            for position, step in enumerate(plan.steps)
        ],
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def plan_from_json(text: str) -> Plan:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlanFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or set(payload) != {"mode", "steps"}:
        raise PlanFormatError("plan file must have exactly the keys 'mode' and 'steps'")
    try:
        mode = Mode(payload["mode"])
    except ValueError:
        raise PlanFormatError(f"unknown mode {payload['mode']!r}") from None
    steps = []
    entries = payload["steps"]
    if not isinstance(entries, list):
        raise PlanFormatError("'steps' must be a list")
    for position, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise PlanFormatError(f"steps[{position}] must be a mapping")
        if entry.get("index") != position + 1:
            raise PlanFormatError(
                f"steps[{position}]: indices must be contiguous from 1,"
                f" found {entry.get('index')!r}"
            )
        try:
            steps.append(
                Step(
                    product=entry["product"],
                    process=entry["process"],
                    resources=tuple(entry.get("resources", [])),
                )
            )
        except KeyError as exc:
            raise PlanFormatError(f"steps[{position}] lacks key {exc}") from exc
    return Plan(mode=mode, steps=tuple(steps))


def plan_to_text(plan: Plan) -> str:
    """Numbered, human-readable step list."""
    lines = [f"# {plan.mode.value} plan ({len(plan.steps)} steps)"]
    width = len(str(len(plan.steps)))
    for position, step in enumerate(plan.steps, start=1):
        suffix = f" using {', '.join(step.resources)}" if step.resources else ""
        lines.append(f"{position:>{width}}. {step.process} -> {step.product}{suffix}")
    return "\n".join(lines) + "\n"


def _dot_label(*parts: str) -> str:
    escaped = [part.replace("\\", "\\\\").replace('"', '\\"') for part in parts]
    return '"' + "\\n".join(escaped) + '"'


def precedence_to_dot(precedence: PrecedenceGraph, plan: Plan) -> str:
    """DOT digraph of the precedence constraints, numbered in plan order."""
    open_positions: dict[Step, list[int]] = {}
    for position, step in enumerate(plan.steps):
        open_positions.setdefault(step, []).append(position)
    numbers: list[int | None] = []
    for step in precedence.steps:
        slots = open_positions.get(step)
        numbers.append(slots.pop(0) + 1 if slots else None)

    lines = [
        "digraph precedence {",
        "  rankdir=LR;",
        "  node [shape=box];",
    ]
    for index, step in enumerate(precedence.steps):
        prefix = f"{numbers[index]}. " if numbers[index] is not None else ""
        label = _dot_label(f"{prefix}{step.process}", step.product)
        lines.append(f"  s{index} [label={label}];")
    for (i, j) in precedence.pairs():
        provenance = ", ".join(precedence.before[(i, j)])
        lines.append(f"  s{i} -> s{j} [label={_dot_label(provenance)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
