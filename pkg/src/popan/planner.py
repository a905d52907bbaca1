"""Derive assembly and disassembly operation sequences from one graph.

Every product-process link yields one step (the product, the process, and
the process's resources). The arrowed edges are then read in the requested
mode and turned into ordering constraints between steps:

* R1 structural: a structural edge read P -> Q orders every step of
  product P before every step of product Q.
* R2 sequence: a sequence edge read S -> T orders every step using
  process S before every step using process T.
* R3 physical: a physical edge read P -> Q orders steps of P before steps
  of Q, but only steps attached through NON-conditional links take part;
  conditionally linked steps get their ordering from R2 alone. This is
  what lets a fastener's process run out of product-adjacency order.

Because every reading flips between modes, the assembly and disassembly
constraint sets are exact mirrors of each other. A plan is a topological
order of the constraint graph; ties are broken lexicographically by
(process id, product id) so plans are fully deterministic. A brute-force
enumerator over all valid permutations doubles as the test oracle.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Mapping

from .model import (
    EdgeId,
    EdgeKind,
    InvalidGraphError,
    Mode,
    NodeId,
    PopanError,
    PopanGraph,
    Role,
    directed_reading,
)
from .validation import (
    Finding,
    Severity,
    ValidationReport,
    validate,
)

# verify_plan finding codes.
E_ORDER = "E_ORDER"  # a precedence pair is violated
E_MISSING = "E_MISSING"  # a required step is absent from the plan
E_DUPLICATE = "E_DUPLICATE"  # a step occurs more often than derived
E_UNKNOWN = "E_UNKNOWN"  # a plan step does not occur in the graph at all
W_MODE = "W_MODE"  # plan is labeled with a different mode

#: Guard for the brute-force enumerator.
ENUMERATION_LIMIT = 10


class CycleDetectedError(PopanError):
    """The ordering constraints are contradictory.

    ``step_labels`` names the steps on one offending cycle and ``edge_ids``
    the graph edges whose constraints close it.
    """

    def __init__(self, step_labels: tuple[str, ...], edge_ids: tuple[EdgeId, ...]) -> None:
        cycle = " -> ".join(step_labels + step_labels[:1])
        super().__init__(
            f"ordering constraints contain a cycle: {cycle}"
            f" (from edges: {', '.join(edge_ids)})"
        )
        self.step_labels = step_labels
        self.edge_ids = edge_ids


class TooLargeError(PopanError):
    pass


@dataclass(frozen=True, order=True)
class Step:
    """One operation: run ``process`` on ``product`` using ``resources``."""

    product: NodeId
    process: NodeId
    resources: tuple[NodeId, ...] = ()

    @property
    def label(self) -> str:
        return f"{self.process}/{self.product}"


@dataclass(frozen=True)
class PrecedenceGraph:
    """Steps plus must-precede pairs over step indices.

    ``before`` maps an (earlier, later) index pair to the ids of the graph
    edges that demand it. ``step_edge_ids`` records the product-process
    link each step came from. Steps are in canonical order: sorted by
    (process id, product id, link edge id).
    """

    steps: tuple[Step, ...]
    before: Mapping[tuple[int, int], tuple[EdgeId, ...]]
    step_edge_ids: tuple[EdgeId, ...] = ()

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.before)


@dataclass(frozen=True)
class Plan:
    mode: Mode
    steps: tuple[Step, ...]


def _steps_of(graph: PopanGraph) -> list[tuple[Step, EdgeId, bool]]:
    """All steps with their source link id and conditional flag."""
    entries: list[tuple[Step, EdgeId, bool]] = []
    for edge in graph.edges_of_kind(EdgeKind.LINKING_P2P):
        if graph.node(edge.a).role is Role.PRODUCT:
            product_id, process_id = edge.a, edge.b
        else:
            product_id, process_id = edge.b, edge.a
        resources = sorted(
            link.other(process_id)
            for link in graph.incident_edges(process_id, EdgeKind.LINKING_P2R)
        )
        step = Step(product=product_id, process=process_id, resources=tuple(resources))
        entries.append((step, edge.id, edge.conditional))
    entries.sort(key=lambda entry: (entry[0].process, entry[0].product, entry[1]))
    return entries


def build_precedence(graph: PopanGraph, mode: Mode) -> PrecedenceGraph:
    """Reify the traversal rules R1-R3 as explicit step-ordering pairs."""
    report = validate(graph)
    if not report.ok:
        raise InvalidGraphError(report)

    entries = _steps_of(graph)
    steps = tuple(entry[0] for entry in entries)
    edge_ids = tuple(entry[1] for entry in entries)

    by_product: dict[NodeId, list[int]] = {}
    by_process: dict[NodeId, list[int]] = {}
    unconditional_by_product: dict[NodeId, list[int]] = {}
    for index, (step, _, conditional) in enumerate(entries):
        by_product.setdefault(step.product, []).append(index)
        by_process.setdefault(step.process, []).append(index)
        if not conditional:
            unconditional_by_product.setdefault(step.product, []).append(index)

    before: dict[tuple[int, int], list[EdgeId]] = {}

    def order(first: list[int], later: list[int], edge_id: EdgeId) -> None:
        for i in first:
            for j in later:
                if i != j:
                    before.setdefault((i, j), []).append(edge_id)

    for edge in graph.edges_of_kind(EdgeKind.STRUCTURAL):
        from_id, to_id = directed_reading(edge, mode)
        order(by_product.get(from_id, []), by_product.get(to_id, []), edge.id)

    for edge in graph.edges_of_kind(EdgeKind.SEQUENCE_PROCESS):
        from_id, to_id = directed_reading(edge, mode)
        order(by_process.get(from_id, []), by_process.get(to_id, []), edge.id)

    for edge in graph.edges_of_kind(EdgeKind.PHYSICAL):
        from_id, to_id = directed_reading(edge, mode)
        order(
            unconditional_by_product.get(from_id, []),
            unconditional_by_product.get(to_id, []),
            edge.id,
        )

    frozen = {pair: tuple(ids) for pair, ids in before.items()}
    return PrecedenceGraph(steps=steps, before=frozen, step_edge_ids=edge_ids)


def _find_cycle(precedence: PrecedenceGraph, remaining: set[int]) -> CycleDetectedError:
    """Walk the leftover constraint graph until a step repeats.

    Every step the topological sort could not emit still has an unemitted
    predecessor, so walking predecessor-ward always runs into a cycle.
    """
    predecessors: dict[int, list[int]] = {i: [] for i in remaining}
    for (i, j) in precedence.pairs():
        if i in remaining and j in remaining:
            predecessors[j].append(i)

    path: list[int] = [min(remaining)]
    seen_at = {path[0]: 0}
    while True:
        nxt = min(predecessors[path[-1]])
        if nxt in seen_at:
            backward = path[seen_at[nxt]:]
            break
        seen_at[nxt] = len(path)
        path.append(nxt)
    cycle = list(reversed(backward))

    labels = tuple(precedence.steps[i].label for i in cycle)
    edge_ids: list[EdgeId] = []
    for pos, i in enumerate(cycle):
        j = cycle[(pos + 1) % len(cycle)]
        for edge_id in precedence.before[(i, j)]:
            if edge_id not in edge_ids:
                edge_ids.append(edge_id)
    return CycleDetectedError(labels, tuple(edge_ids))


def order_steps(precedence: PrecedenceGraph, mode: Mode) -> Plan:
    """Deterministic topological order of a precedence graph.

    Among ready steps the smallest (process id, product id) runs first;
    that is exactly the canonical step order, so a plain index heap does.
    """
    n = len(precedence.steps)
    indegree = [0] * n
    successors: dict[int, list[int]] = {i: [] for i in range(n)}
    for (i, j) in precedence.before:
        indegree[j] += 1
        successors[i].append(j)

    ready = [i for i in range(n) if indegree[i] == 0]
    heapq.heapify(ready)
    ordered: list[int] = []
    while ready:
        current = heapq.heappop(ready)
        ordered.append(current)
        for succ in successors[current]:
            indegree[succ] -= 1
            if indegree[succ] == 0:
                heapq.heappush(ready, succ)

    if len(ordered) < n:
        raise _find_cycle(precedence, set(range(n)) - set(ordered))
    return Plan(mode=mode, steps=tuple(precedence.steps[i] for i in ordered))


def plan(graph: PopanGraph, mode: Mode) -> Plan:
    """Compute the full operation sequence for one mode.

    Raises InvalidGraphError when validation fails and CycleDetectedError
    when the constraints are contradictory.
    """
    return order_steps(build_precedence(graph, mode), mode)


def verify_plan(graph: PopanGraph, mode: Mode, candidate: Plan) -> ValidationReport:
    """Check a plan against the graph's constraints for the given mode.

    Returns a report (never raises): one error per violated ordering pair,
    per missing step, per duplicated step and per step that does not occur
    in the graph at all.
    """
    findings: list[Finding] = []
    graph_report = validate(graph)
    if not graph_report.ok:
        return graph_report

    if candidate.mode is not mode:
        findings.append(
            Finding(
                Severity.WARNING,
                W_MODE,
                "",
                f"plan is labeled {candidate.mode.value!r}, verified as {mode.value!r}",
            )
        )

    precedence = build_precedence(graph, mode)

    expected: dict[Step, int] = {}
    for step in precedence.steps:
        expected[step] = expected.get(step, 0) + 1
    actual: dict[Step, list[int]] = {}
    for position, step in enumerate(candidate.steps):
        actual.setdefault(step, []).append(position)

    for step, count in expected.items():
        positions = actual.get(step, [])
        if not positions:
            findings.append(
                Finding(Severity.ERROR, E_MISSING, step.label, f"plan lacks step {step.label}")
            )
        elif len(positions) > count:
            findings.append(
                Finding(
                    Severity.ERROR,
                    E_DUPLICATE,
                    step.label,
                    f"step {step.label} occurs {len(positions)} times, expected {count}",
                )
            )
    for step in actual:
        if step not in expected:
            findings.append(
                Finding(
                    Severity.ERROR,
                    E_UNKNOWN,
                    step.label,
                    f"plan step {step.label} does not occur in the graph",
                )
            )

    for (i, j), edge_ids in sorted(precedence.before.items()):
        first = actual.get(precedence.steps[i])
        later = actual.get(precedence.steps[j])
        if not first or not later:
            continue  # absence already reported
        if max(first) >= min(later):
            findings.append(
                Finding(
                    Severity.ERROR,
                    E_ORDER,
                    edge_ids[0],
                    f"step {precedence.steps[i].label} must precede"
                    f" {precedence.steps[j].label} (edges: {', '.join(edge_ids)})",
                )
            )

    findings.sort(key=lambda f: (f.code, f.subject_id))
    return ValidationReport(findings=tuple(findings))


def enumerate_valid_plans(
    graph: PopanGraph, mode: Mode, limit: int | None = None
) -> list[Plan]:
    """Every step order satisfying the constraints, lexicographically.

    Brute-force oracle for small instances; guarded at
    ``ENUMERATION_LIMIT`` steps. ``limit`` truncates the result list.
    """
    if limit is not None and limit <= 0:
        raise ValueError("limit must be positive")
    precedence = build_precedence(graph, mode)
    n = len(precedence.steps)
    if n > ENUMERATION_LIMIT:
        raise TooLargeError(
            f"enumeration is limited to {ENUMERATION_LIMIT} steps, graph has {n}"
        )

    predecessors: list[set[int]] = [set() for _ in range(n)]
    for (i, j) in precedence.before:
        predecessors[j].add(i)

    plans: list[Plan] = []

    def extend(prefix: list[int], placed: set[int]) -> bool:
        if limit is not None and len(plans) >= limit:
            return True
        if len(prefix) == n:
            plans.append(
                Plan(mode=mode, steps=tuple(precedence.steps[i] for i in prefix))
            )
            return limit is not None and len(plans) >= limit
        for i in range(n):
            if i in placed or not predecessors[i] <= placed:
                continue
            prefix.append(i)
            placed.add(i)
            full = extend(prefix, placed)
            placed.discard(i)
            prefix.pop()
            if full:
                return True
        return False

    extend([], set())
    return plans
