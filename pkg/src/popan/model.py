"""Core graph model for product-oriented product-process-resource networks.

A network has three kinds of vertices (products, processes, resources) and
five kinds of typed edges. Product-product edges (physical and structural
continuity) and process-process sequence edges carry one arrow per endpoint:
the open arrow marks the assembly direction, the full arrow the disassembly
direction, so a single graph answers both "how do I build this" and "how do
I take it apart".

Graphs are built through :class:`GraphBuilder` and frozen on ``build()``;
the returned :class:`PopanGraph` is immutable and safe to share. Structural
rules (endpoint roles, arrow pairing, anchor-product cardinality) are
deliberately NOT enforced while building so that malformed graphs can be
constructed and fed to the validator in :mod:`popan.validation`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Mapping

NodeId = str
EdgeId = str


class Role(str, Enum):
    """Vertex category."""

    PRODUCT = "Product"
    PROCESS = "Process"
    RESOURCE = "Resource"


class ProductKind(str, Enum):
    """Classification of product vertices.

    ELEMENTARY cannot be taken apart further; SUB is treated as elementary
    for planning but is itself composed of parts; FASTENER joins other
    products (screws, bolts); INITIAL and LAST anchor the assembly reading
    of the graph (first and final product state).
    """

    ELEMENTARY = "ElementaryProduct"
    SUB = "SubProduct"
    FASTENER = "FastenerProduct"
    INITIAL = "InitialProduct"
    LAST = "LastProduct"


class EdgeKind(str, Enum):
    """Edge category."""

    PHYSICAL = "Physical"  # product-product physical attachment
    STRUCTURAL = "Structural"  # product-product blocking dependency
    LINKING_P2P = "LinkingP2P"  # product-process assignment
    SEQUENCE_PROCESS = "SequenceProcess"  # process-process ordering
    LINKING_P2R = "LinkingP2R"  # process-resource requirement


class Arrow(str, Enum):
    OPEN = "OpenArrow"  # assembly direction points at this endpoint
    FULL = "FullArrow"  # disassembly direction points at this endpoint
    NONE = "None"


class Mode(str, Enum):
    """Reading direction for arrowed edges and for plans."""

    ASSEMBLY = "assembly"
    DISASSEMBLY = "disassembly"


#: Edge kinds that carry exactly one OpenArrow and one FullArrow.
ARROWED_KINDS = frozenset({EdgeKind.PHYSICAL, EdgeKind.STRUCTURAL, EdgeKind.SEQUENCE_PROCESS})

#: Edge kinds that are undirected (both arrows None).
LINKING_KINDS = frozenset({EdgeKind.LINKING_P2P, EdgeKind.LINKING_P2R})


class PopanError(Exception):
    """Base class for all errors raised by this package."""


class DuplicateIdError(PopanError):
    pass


class UnknownEndpointError(PopanError):
    pass


class InvalidArrowsError(PopanError):
    pass


class InvalidGraphError(PopanError):
    """Raised when an operation requires a valid graph but validation failed.

    Carries the offending :class:`popan.validation.ValidationReport` as
    ``report``.
    """

    def __init__(self, report) -> None:
        findings = "; ".join(f"{f.code} {f.subject_id}".strip() for f in report.errors())
        super().__init__(f"graph fails validation: {findings}")
        self.report = report


@dataclass(frozen=True)
class PopanNode:
    """A vertex. ``kind`` is set exactly for products; ``type_tag`` is a
    free-form category for processes and resources (e.g. "Screwing",
    "Robot"). ``label`` is a display string; a label equal to the id is
    normalized away so serialized forms stay canonical."""

    id: NodeId
    role: Role
    kind: ProductKind | None = None
    label: str = ""
    type_tag: str = ""

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("node id must be non-empty")
        if self.role is Role.PRODUCT:
            if self.kind is None:
                raise ValueError(f"product node {self.id!r} needs a kind")
            if self.type_tag:
                raise ValueError(
                    f"node {self.id!r}: type_tag is reserved for processes/resources"
                )
        elif self.kind is not None:
            raise ValueError(f"node {self.id!r}: only products carry a kind")
        if self.label == self.id:
            object.__setattr__(self, "label", "")

    @property
    def display(self) -> str:
        return self.label or self.id


@dataclass(frozen=True)
class PopanEdge:
    """A typed edge between nodes ``a`` and ``b``.

    ``arrow_a``/``arrow_b`` annotate the respective endpoints. The
    ``conditional`` flag marks product-process links whose step ordering is
    governed by process-sequence edges rather than product adjacency.
    Endpoint roles, arrow pairing and the conditional flag are checked by
    the validator, not here, so that broken edges remain constructible.
    """

    id: EdgeId
    kind: EdgeKind
    a: NodeId
    b: NodeId
    arrow_a: Arrow = Arrow.NONE
    arrow_b: Arrow = Arrow.NONE
    conditional: bool = False

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("edge id must be non-empty")
        if self.a == self.b:
            raise ValueError(f"edge {self.id!r} connects {self.a!r} to itself")

    def endpoints(self) -> tuple[NodeId, NodeId]:
        return (self.a, self.b)

    def other(self, node_id: NodeId) -> NodeId:
        if node_id == self.a:
            return self.b
        if node_id == self.b:
            return self.a
        raise UnknownEndpointError(f"{node_id!r} is not an endpoint of edge {self.id!r}")


@dataclass(frozen=True, eq=True)
class PopanGraph:
    """An immutable network: identity-keyed nodes and edges.

    Mappings preserve insertion order, which serialized forms reuse as the
    canonical element order. Use :class:`GraphBuilder` to construct one.
    """

    nodes: Mapping[NodeId, PopanNode] = field(default_factory=dict)
    edges: Mapping[EdgeId, PopanEdge] = field(default_factory=dict)

    def node(self, node_id: NodeId) -> PopanNode:
        return self.nodes[node_id]

    def edge(self, edge_id: EdgeId) -> PopanEdge:
        return self.edges[edge_id]

    def nodes_with_role(self, role: Role) -> list[PopanNode]:
        return [n for n in self.nodes.values() if n.role is role]

    def nodes_of_kind(self, kind: ProductKind) -> list[PopanNode]:
        return [n for n in self.nodes.values() if n.kind is kind]

    def edges_of_kind(self, kind: EdgeKind) -> list[PopanEdge]:
        return [e for e in self.edges.values() if e.kind is kind]

    def incident_edges(self, node_id: NodeId, kind: EdgeKind | None = None) -> list[PopanEdge]:
        return [
            e
            for e in self.edges.values()
            if node_id in (e.a, e.b) and (kind is None or e.kind is kind)
        ]

    def degree(self, node_id: NodeId) -> int:
        return len(self.incident_edges(node_id))

    @property
    def is_empty(self) -> bool:
        return not self.nodes and not self.edges


class GraphBuilder:
    """Accumulates nodes and edges, then freezes them into a PopanGraph.

    ``build()`` snapshots the current contents; graphs returned earlier are
    never affected by later additions.
    """

    def __init__(self) -> None:
        self._nodes: dict[NodeId, PopanNode] = {}
        self._edges: dict[EdgeId, PopanEdge] = {}

    def add_node(self, node: PopanNode) -> GraphBuilder:
        if node.id in self._nodes:
            raise DuplicateIdError(f"node id {node.id!r} already present")
        self._nodes[node.id] = node
        return self

    def add_edge(self, edge: PopanEdge) -> GraphBuilder:
        if edge.id in self._edges:
            raise DuplicateIdError(f"edge id {edge.id!r} already present")
        for endpoint in edge.endpoints():
            if endpoint not in self._nodes:
                raise UnknownEndpointError(
                    f"edge {edge.id!r} references unknown node {endpoint!r}"
                )
        self._edges[edge.id] = edge
        return self

    def add_nodes(self, nodes: Iterable[PopanNode]) -> GraphBuilder:
        for node in nodes:
            self.add_node(node)
        return self

    def add_edges(self, edges: Iterable[PopanEdge]) -> GraphBuilder:
        for edge in edges:
            self.add_edge(edge)
        return self

    def build(self) -> PopanGraph:
        return PopanGraph(
            nodes=MappingProxyType(dict(self._nodes)),
            edges=MappingProxyType(dict(self._edges)),
        )


def directed_reading(edge: PopanEdge, mode: Mode) -> tuple[NodeId, NodeId] | None:
    """Orient an edge for the given mode.

    For arrowed kinds the assembly reading points at the OpenArrow endpoint
    and the disassembly reading at the FullArrow endpoint, so the two modes
    are exact reverses of each other. Linking kinds are undirected and
    yield None.
    """
    if edge.kind in LINKING_KINDS:
        if edge.arrow_a is not Arrow.NONE or edge.arrow_b is not Arrow.NONE:
            raise InvalidArrowsError(
                f"edge {edge.id!r} ({edge.kind.value}) must not carry arrows"
            )
        return None
    if {edge.arrow_a, edge.arrow_b} != {Arrow.OPEN, Arrow.FULL}:
        raise InvalidArrowsError(
            f"edge {edge.id!r} ({edge.kind.value}) needs exactly one OpenArrow"
            f" and one FullArrow, got {edge.arrow_a.value}/{edge.arrow_b.value}"
        )
    open_end = edge.a if edge.arrow_a is Arrow.OPEN else edge.b
    full_end = edge.b if open_end == edge.a else edge.a
    if mode is Mode.ASSEMBLY:
        return (full_end, open_end)
    return (open_end, full_end)


# Node and edge shorthands, mainly for fixtures and tests.


def product(node_id: NodeId, kind: ProductKind, label: str = "") -> PopanNode:
    return PopanNode(id=node_id, role=Role.PRODUCT, kind=kind, label=label)


def process(node_id: NodeId, type_tag: str = "", label: str = "") -> PopanNode:
    return PopanNode(id=node_id, role=Role.PROCESS, label=label, type_tag=type_tag)


def resource(node_id: NodeId, type_tag: str = "", label: str = "") -> PopanNode:
    return PopanNode(id=node_id, role=Role.RESOURCE, label=label, type_tag=type_tag)


def arrowed_edge(edge_id: EdgeId, kind: EdgeKind, first: NodeId, then: NodeId) -> PopanEdge:
    """Arrowed edge whose assembly reading runs ``first`` -> ``then``."""
    return PopanEdge(
        id=edge_id, kind=kind, a=first, b=then, arrow_a=Arrow.FULL, arrow_b=Arrow.OPEN
    )


def p2p(edge_id: EdgeId, product_id: NodeId, process_id: NodeId, conditional: bool = False) -> PopanEdge:
    return PopanEdge(
        id=edge_id,
        kind=EdgeKind.LINKING_P2P,
        a=product_id,
        b=process_id,
        conditional=conditional,
    )


def p2r(edge_id: EdgeId, process_id: NodeId, resource_id: NodeId) -> PopanEdge:
    return PopanEdge(id=edge_id, kind=EdgeKind.LINKING_P2R, a=process_id, b=resource_id)
