"""Structural well-formedness checks for PoPAN graphs.

Validation is total: it never raises, it returns a report listing every
violation it found, so a front end can display all findings at once.
Errors mark graphs the planner and serializer refuse to work on; warnings
flag suspicious but workable modeling.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import (
    ARROWED_KINDS,
    Arrow,
    EdgeKind,
    PopanEdge,
    PopanGraph,
    ProductKind,
    Role,
)

# Finding codes. E_* are errors, W_* warnings.
E_ENDPOINT = "E_ENDPOINT"  # edge endpoints have wrong roles for the kind
E_ARROWS = "E_ARROWS"  # arrow annotations violate the kind's invariant
E_CONDITIONAL = "E_CONDITIONAL"  # conditional flag on a non-LinkingP2P edge
E_INITIAL = "E_INITIAL"  # not exactly one InitialProduct
E_LAST = "E_LAST"  # not exactly one LastProduct
E_NOPROC = "E_NOPROC"  # product without any assigned process
W_NORES = "W_NORES"  # process used by a product but without resources
W_NOSEQ = "W_NOSEQ"  # conditional link whose process has no sequence edge


class Severity(str, Enum):
    ERROR = "Error"
    WARNING = "Warning"


@dataclass(frozen=True)
class Finding:
    severity: Severity
    code: str
    subject_id: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors()

    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is Severity.ERROR)

    def warnings(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is Severity.WARNING)


# Expected endpoint roles per edge kind, as unordered pairs.
_ENDPOINT_ROLES: dict[EdgeKind, frozenset[Role] | tuple[Role, Role]] = {
    EdgeKind.PHYSICAL: (Role.PRODUCT, Role.PRODUCT),
    EdgeKind.STRUCTURAL: (Role.PRODUCT, Role.PRODUCT),
    EdgeKind.LINKING_P2P: (Role.PRODUCT, Role.PROCESS),
    EdgeKind.SEQUENCE_PROCESS: (Role.PROCESS, Role.PROCESS),
    EdgeKind.LINKING_P2R: (Role.PROCESS, Role.RESOURCE),
}


def _roles_match(expected: tuple[Role, Role], actual: tuple[Role, Role]) -> bool:
    return sorted(expected, key=lambda r: r.value) == sorted(actual, key=lambda r: r.value)


def _check_edge(graph: PopanGraph, edge: PopanEdge, out: list[Finding]) -> None:
    role_a = graph.node(edge.a).role
    role_b = graph.node(edge.b).role
    expected = _ENDPOINT_ROLES[edge.kind]
    if not _roles_match(expected, (role_a, role_b)):
        want = "-".join(r.value for r in expected)
        got = f"{role_a.value}-{role_b.value}"
        out.append(
            Finding(
                Severity.ERROR,
                E_ENDPOINT,
                edge.id,
                f"{edge.kind.value} edge must connect {want}, found {got}",
            )
        )

    arrows = {edge.arrow_a, edge.arrow_b}
    if edge.kind in ARROWED_KINDS:
        if arrows != {Arrow.OPEN, Arrow.FULL}:
            out.append(
                Finding(
                    Severity.ERROR,
                    E_ARROWS,
                    edge.id,
                    f"{edge.kind.value} edge needs one OpenArrow and one FullArrow,"
                    f" found {edge.arrow_a.value}/{edge.arrow_b.value}",
                )
            )
    elif arrows != {Arrow.NONE}:
        out.append(
            Finding(
                Severity.ERROR,
                E_ARROWS,
                edge.id,
                f"{edge.kind.value} edge must not carry arrows,"
                f" found {edge.arrow_a.value}/{edge.arrow_b.value}",
            )
        )

    if edge.conditional and edge.kind is not EdgeKind.LINKING_P2P:
        out.append(
            Finding(
                Severity.ERROR,
                E_CONDITIONAL,
                edge.id,
                f"conditional flag is only meaningful on LinkingP2P edges,"
                f" found on {edge.kind.value}",
            )
        )


def _check_anchor(graph: PopanGraph, kind: ProductKind, code: str, out: list[Finding]) -> None:
    anchors = graph.nodes_of_kind(kind)
    if not anchors:
        out.append(
            Finding(Severity.ERROR, code, "", f"graph has no {kind.value} node")
        )
    elif len(anchors) > 1:
        for node in anchors:
            out.append(
                Finding(
                    Severity.ERROR,
                    code,
                    node.id,
                    f"multiple {kind.value} nodes ({len(anchors)} found)",
                )
            )


def validate(graph: PopanGraph) -> ValidationReport:
    """Check a graph against the structural rules and return every finding.

    Pure and deterministic: findings are sorted by (code, subject id), so
    identical graphs always produce identical reports.
    """
    findings: list[Finding] = []

    for edge in graph.edges.values():
        _check_edge(graph, edge, findings)

    _check_anchor(graph, ProductKind.INITIAL, E_INITIAL, findings)
    _check_anchor(graph, ProductKind.LAST, E_LAST, findings)

    # Every ordinary product needs at least one assigned process; the
    # initial/last anchors may but need not carry one.
    for node in graph.nodes_with_role(Role.PRODUCT):
        if node.kind in (ProductKind.INITIAL, ProductKind.LAST):
            continue
        if not graph.incident_edges(node.id, EdgeKind.LINKING_P2P):
            findings.append(
                Finding(
                    Severity.ERROR,
                    E_NOPROC,
                    node.id,
                    f"product {node.display!r} has no LinkingP2P edge to any process",
                )
            )

    for node in graph.nodes_with_role(Role.PROCESS):
        if graph.incident_edges(node.id, EdgeKind.LINKING_P2P) and not graph.incident_edges(
            node.id, EdgeKind.LINKING_P2R
        ):
            findings.append(
                Finding(
                    Severity.WARNING,
                    W_NORES,
                    node.id,
                    f"process {node.display!r} is used by a product but has no resources",
                )
            )

    for edge in graph.edges_of_kind(EdgeKind.LINKING_P2P):
        if not edge.conditional:
            continue
        process_ends = [
            end for end in edge.endpoints() if graph.node(end).role is Role.PROCESS
        ]
        if len(process_ends) != 1:
            continue  # endpoint roles already reported above
        if not graph.incident_edges(process_ends[0], EdgeKind.SEQUENCE_PROCESS):
            findings.append(
                Finding(
                    Severity.WARNING,
                    W_NOSEQ,
                    edge.id,
                    f"conditional link {edge.id!r}: process {process_ends[0]!r} touches"
                    " no SequenceProcess edge to resolve the ordering",
                )
            )

    findings.sort(key=lambda f: (f.code, f.subject_id))
    return ValidationReport(findings=tuple(findings))
