"""Bidirectional mapping between PopanGraph and the AutomationML/CAEX form.

Layout of the generated document:

* InterfaceClassLib ``PoPANInterfaceClassLib`` declares the class
  ``EdgeVertexInterface`` with attributes Direction (In/Out/InOut) and
  Arrow (OpenArrow/FullArrow/None).
* RoleClassLib ``PoPANRoleClassLib`` declares Product, Process, Resource
  and Edge; a stub ``AssetAdministrationShellRoleClassLib`` provides the
  Submodel role that product elements additionally support.
* SystemUnitClassLib ``PoPANSystemUnitClassLib`` carries generic prototype
  elements for the four roles; instances reference the role classes only.
* InstanceHierarchy ``PoPAN`` holds one InternalElement per node and per
  edge, all as flat siblings. Edge elements carry two endpoint interfaces
  (EndpointA/EndpointB) holding the Arrow values; the Direction value is
  Out where the assembly reading leaves the edge and In where it enters
  (InOut on both ends of undirected kinds). Vertex elements carry one
  interface per incident edge (Direction InOut, Arrow None), and one
  InternalLink ties each edge endpoint to the matching vertex interface,
  so the link count is exactly twice the edge count.

Node labels ride on the element Name (falling back to the id), node/edge
identity and typing on the Id and Type attributes, and the conditional
flag on an extra boolean attribute that is present only when set.
"""

from __future__ import annotations

import logging

from .caex import (
    CaexAttribute,
    CaexDocument,
    DanglingLinkError,
    InstanceHierarchy,
    InterfaceClass,
    InterfaceClassLib,
    InterfaceInstance,
    InternalElement,
    InternalLink,
    MalformedElementError,
    MissingLibraryError,
    RoleClass,
    RoleClassLib,
    SystemUnitClass,
    SystemUnitClassLib,
    VocabularyViolationError,
)
from .model import (
    Arrow,
    DuplicateIdError,
    EdgeKind,
    GraphBuilder,
    InvalidGraphError,
    Mode,
    PopanEdge,
    PopanGraph,
    PopanNode,
    ProductKind,
    Role,
    UnknownEndpointError,
    directed_reading,
)
from .validation import validate

logger = logging.getLogger(__name__)

INTERFACE_LIB = "PoPANInterfaceClassLib"
EDGE_VERTEX_INTERFACE = "EdgeVertexInterface"
EDGE_VERTEX_INTERFACE_PATH = f"{INTERFACE_LIB}/{EDGE_VERTEX_INTERFACE}"
ROLE_LIB = "PoPANRoleClassLib"
AAS_ROLE_LIB = "AssetAdministrationShellRoleClassLib"
SUBMODEL_ROLE_PATH = f"{AAS_ROLE_LIB}/Submodel"
SYSTEM_UNIT_LIB = "PoPANSystemUnitClassLib"
HIERARCHY_NAME = "PoPAN"
EDGE_ROLE = "Edge"

_DIRECTIONS = {"In", "Out", "InOut"}
_ARROWS = {arrow.value for arrow in Arrow}
_EDGE_TYPES = {kind.value for kind in EdgeKind}
_PRODUCT_KINDS = {kind.value for kind in ProductKind}
_VERTEX_ROLES = {role.value for role in Role}


def _declaration(name: str) -> CaexAttribute:
    return CaexAttribute(name=name)


def _value(name: str, value: str) -> CaexAttribute:
    return CaexAttribute(name=name, value=value)


def _interface_class_lib() -> InterfaceClassLib:
    return InterfaceClassLib(
        name=INTERFACE_LIB,
        classes=(
            InterfaceClass(
                name=EDGE_VERTEX_INTERFACE,
                attributes=(_declaration("Arrow"), _declaration("Direction")),
            ),
        ),
    )


def _role_class(name: str) -> RoleClass:
    return RoleClass(
        name=name,
        attributes=(_declaration("Id"), _declaration("Type")),
        external_interfaces=(
            InterfaceInstance(
                name=EDGE_VERTEX_INTERFACE,
                id=f"popan-role-{name.lower()}-interface",
                ref_base_class_path=EDGE_VERTEX_INTERFACE_PATH,
            ),
        ),
    )


def _role_class_libs() -> tuple[RoleClassLib, RoleClassLib]:
    popan = RoleClassLib(
        name=ROLE_LIB,
        classes=(
            _role_class("Product"),
            _role_class("Process"),
            _role_class("Resource"),
            _role_class(EDGE_ROLE),
        ),
    )
    aas = RoleClassLib(name=AAS_ROLE_LIB, classes=(RoleClass(name="Submodel"),))
    return popan, aas


def _prototype(name: str) -> InternalElement:
    return InternalElement(
        name=name,
        id=f"popan-prototype-{name.lower()}",
        supported_roles=(f"{ROLE_LIB}/{name}",),
        attributes=(_declaration("Id"), _declaration("Type")),
        external_interfaces=(
            InterfaceInstance(
                name=EDGE_VERTEX_INTERFACE,
                id=f"popan-prototype-{name.lower()}-interface",
                ref_base_class_path=EDGE_VERTEX_INTERFACE_PATH,
            ),
        ),
    )


def _system_unit_class_lib() -> SystemUnitClassLib:
    return SystemUnitClassLib(
        name=SYSTEM_UNIT_LIB,
        classes=(
            SystemUnitClass(
                name=HIERARCHY_NAME,
                elements=(
                    _prototype("Product"),
                    _prototype("Process"),
                    _prototype("Resource"),
                    _prototype(EDGE_ROLE),
                ),
            ),
        ),
    )


def vertex_interface_id(node_id: str, edge_id: str) -> str:
    return f"{node_id}.{edge_id}"


def endpoint_interface_id(edge_id: str, endpoint: str) -> str:
    return f"{edge_id}.{endpoint}"


def _node_element(graph: PopanGraph, node: PopanNode) -> InternalElement:
    if node.role is Role.PRODUCT:
        type_value = node.kind.value
        roles: tuple[str, ...] = (f"{ROLE_LIB}/{node.role.value}", SUBMODEL_ROLE_PATH)
    else:
        type_value = node.type_tag
        roles = (f"{ROLE_LIB}/{node.role.value}",)

    interfaces = tuple(
        InterfaceInstance(
            name=edge.id,
            id=vertex_interface_id(node.id, edge.id),
            ref_base_class_path=EDGE_VERTEX_INTERFACE_PATH,
            attributes=(
                _value("Arrow", Arrow.NONE.value),
                _value("Direction", "InOut"),
            ),
        )
        for edge in sorted(graph.incident_edges(node.id), key=lambda e: e.id)
    )
    return InternalElement(
        name=node.display,
        id=node.id,
        supported_roles=roles,
        attributes=(_value("Id", node.id), _value("Type", type_value)),
        external_interfaces=interfaces,
    )


def _edge_directions(edge: PopanEdge) -> tuple[str, str]:
    reading = directed_reading(edge, Mode.ASSEMBLY)
    if reading is None:
        return ("InOut", "InOut")
    from_id, _ = reading
    return ("Out", "In") if from_id == edge.a else ("In", "Out")


def _edge_element(edge: PopanEdge) -> InternalElement:
    direction_a, direction_b = _edge_directions(edge)
    attributes = [_value("Id", edge.id), _value("Type", edge.kind.value)]
    if edge.conditional:
        attributes.insert(0, CaexAttribute("Conditional", "true", "xs:boolean"))
    interfaces = tuple(
        InterfaceInstance(
            name=f"Endpoint{tag}",
            id=endpoint_interface_id(edge.id, tag),
            ref_base_class_path=EDGE_VERTEX_INTERFACE_PATH,
            attributes=(_value("Arrow", arrow.value), _value("Direction", direction)),
        )
        for tag, arrow, direction in (
            ("A", edge.arrow_a, direction_a),
            ("B", edge.arrow_b, direction_b),
        )
    )
    return InternalElement(
        name=edge.id,
        id=edge.id,
        supported_roles=(f"{ROLE_LIB}/{EDGE_ROLE}",),
        attributes=tuple(attributes),
        external_interfaces=interfaces,
    )


def to_caex(graph: PopanGraph) -> CaexDocument:
    """Map a graph to its AutomationML document.

    The graph must validate cleanly; the empty graph is allowed and yields
    a libraries-only template document.
    """
    if not graph.is_empty:
        report = validate(graph)
        if not report.ok:
            raise InvalidGraphError(report)

    elements: list[InternalElement] = []
    links: list[InternalLink] = []
    for node in graph.nodes.values():
        elements.append(_node_element(graph, node))
    for edge in graph.edges.values():
        elements.append(_edge_element(edge))
        for tag, node_id in (("A", edge.a), ("B", edge.b)):
            edge_side = endpoint_interface_id(edge.id, tag)
            links.append(
                InternalLink(
                    name=f"{edge_side}--{node_id}",
                    side_a=edge_side,
                    side_b=vertex_interface_id(node_id, edge.id),
                )
            )

    popan_roles, aas_roles = _role_class_libs()
    return CaexDocument(
        interface_class_libs=(_interface_class_lib(),),
        role_class_libs=(popan_roles, aas_roles),
        system_unit_class_libs=(_system_unit_class_lib(),),
        instance_hierarchies=(
            InstanceHierarchy(
                name=HIERARCHY_NAME, elements=tuple(elements), links=tuple(links)
            ),
        ),
    )


def _check_libraries(doc: CaexDocument) -> None:
    interface_lib = doc.interface_class_lib(INTERFACE_LIB)
    if interface_lib is None:
        raise MissingLibraryError(f"document lacks InterfaceClassLib {INTERFACE_LIB!r}")
    if all(cls.name != EDGE_VERTEX_INTERFACE for cls in interface_lib.classes):
        raise MissingLibraryError(
            f"{INTERFACE_LIB!r} lacks interface class {EDGE_VERTEX_INTERFACE!r}"
        )
    role_lib = doc.role_class_lib(ROLE_LIB)
    if role_lib is None:
        raise MissingLibraryError(f"document lacks RoleClassLib {ROLE_LIB!r}")
    declared = {cls.name for cls in role_lib.classes}
    missing = (_VERTEX_ROLES | {EDGE_ROLE}) - declared
    if missing:
        raise MissingLibraryError(
            f"{ROLE_LIB!r} lacks role classes: {', '.join(sorted(missing))}"
        )


def _popan_role(element: InternalElement) -> str:
    prefix = f"{ROLE_LIB}/"
    roles = [
        path.removeprefix(prefix)
        for path in element.supported_roles
        if path.startswith(prefix)
    ]
    if len(roles) != 1:
        raise MalformedElementError(
            f"element {element.id!r} must support exactly one {ROLE_LIB} role,"
            f" found {roles or 'none'}"
        )
    return roles[0]


def _checked_interface_attrs(owner: str, iface: InterfaceInstance) -> tuple[str, str]:
    """Vocabulary-check an interface's Arrow/Direction values."""
    arrow = iface.attribute("Arrow") or Arrow.NONE.value
    direction = iface.attribute("Direction") or "InOut"
    if arrow not in _ARROWS:
        raise VocabularyViolationError(
            f"interface {iface.id!r} on {owner!r}: Arrow value {arrow!r} is not one of"
            f" {sorted(_ARROWS)}"
        )
    if direction not in _DIRECTIONS:
        raise VocabularyViolationError(
            f"interface {iface.id!r} on {owner!r}: Direction value {direction!r} is not"
            f" one of {sorted(_DIRECTIONS)}"
        )
    return arrow, direction


_KNOWN_NODE_ATTRS = {"Id", "Type"}
_KNOWN_EDGE_ATTRS = {"Id", "Type", "Conditional"}


def _warn_unknown_attrs(element: InternalElement, known: set[str]) -> None:
    for attr in element.attributes:
        if attr.name not in known:
            logger.warning(
                "element %r: ignoring unknown attribute %r", element.id, attr.name
            )


def _node_from_element(element: InternalElement, role_name: str) -> PopanNode:
    _warn_unknown_attrs(element, _KNOWN_NODE_ATTRS)
    node_id = element.attribute("Id")
    if node_id is None:
        raise MalformedElementError(f"vertex element {element.name!r} lacks an Id attribute")
    type_value = element.attribute("Type")
    if type_value is None:
        raise MalformedElementError(f"vertex element {node_id!r} lacks a Type attribute")
    label = element.name if element.name != node_id else ""
    role = Role(role_name)
    if role is Role.PRODUCT:
        if type_value not in _PRODUCT_KINDS:
            raise VocabularyViolationError(
                f"product {node_id!r}: Type {type_value!r} is not one of"
                f" {sorted(_PRODUCT_KINDS)}"
            )
        return PopanNode(id=node_id, role=role, kind=ProductKind(type_value), label=label)
    return PopanNode(id=node_id, role=role, label=label, type_tag=type_value)


def from_caex(doc: CaexDocument) -> PopanGraph:
    """Rebuild a graph from an AutomationML document.

    Checks the PoPAN libraries and hierarchy are present, the vocabulary
    values are legal, every edge element has exactly two endpoint
    interfaces, and every internal link resolves to one edge-side and one
    vertex-side interface. Unknown attributes are logged and dropped.
    """
    _check_libraries(doc)
    hierarchy = doc.instance_hierarchy(HIERARCHY_NAME)
    if hierarchy is None:
        raise MissingLibraryError(
            f"document lacks an InstanceHierarchy named {HIERARCHY_NAME!r}"
        )

    vertex_elements: list[tuple[InternalElement, str]] = []
    edge_elements: list[InternalElement] = []
    for element in hierarchy.elements:
        role_name = _popan_role(element)
        if role_name == EDGE_ROLE:
            edge_elements.append(element)
        else:
            vertex_elements.append((element, role_name))

    builder = GraphBuilder()
    interface_owner: dict[str, str] = {}  # vertex-side interface id -> node id
    for element, role_name in vertex_elements:
        node = _node_from_element(element, role_name)
        try:
            builder.add_node(node)
        except DuplicateIdError as exc:
            raise MalformedElementError(str(exc)) from exc
        for iface in element.external_interfaces:
            _checked_interface_attrs(element.id, iface)
            interface_owner[iface.id] = node.id

    partner: dict[str, str] = {}
    for link in hierarchy.links:
        for side in (link.side_a, link.side_b):
            if side in partner:
                raise MalformedElementError(
                    f"interface {side!r} is referenced by more than one InternalLink"
                )
        partner[link.side_a] = link.side_b
        partner[link.side_b] = link.side_a

    linked_vertex_interfaces: set[str] = set()
    for element in edge_elements:
        _warn_unknown_attrs(element, _KNOWN_EDGE_ATTRS)
        edge_id = element.attribute("Id")
        if edge_id is None:
            raise MalformedElementError(f"edge element {element.name!r} lacks an Id attribute")
        type_value = element.attribute("Type")
        if type_value not in _EDGE_TYPES:
            raise VocabularyViolationError(
                f"edge {edge_id!r}: Type {type_value!r} is not one of {sorted(_EDGE_TYPES)}"
            )
        conditional_value = element.attribute("Conditional")
        if conditional_value is None:
            conditional = False
        elif conditional_value in ("true", "false"):
            conditional = conditional_value == "true"
        else:
            raise VocabularyViolationError(
                f"edge {edge_id!r}: Conditional must be 'true' or 'false',"
                f" found {conditional_value!r}"
            )

        by_name = {iface.name: iface for iface in element.external_interfaces}
        if len(element.external_interfaces) != 2 or set(by_name) != {"EndpointA", "EndpointB"}:
            raise MalformedElementError(
                f"edge element {edge_id!r} must carry exactly the two endpoint"
                f" interfaces EndpointA and EndpointB"
            )

        endpoints: dict[str, str] = {}
        arrows: dict[str, Arrow] = {}
        for tag in ("A", "B"):
            iface = by_name[f"Endpoint{tag}"]
            arrow, _ = _checked_interface_attrs(edge_id, iface)
            arrows[tag] = Arrow(arrow)
            other_side = partner.get(iface.id)
            if other_side is None:
                raise DanglingLinkError(
                    f"edge {edge_id!r}: endpoint interface {iface.id!r} is not"
                    " connected by any InternalLink"
                )
            owner = interface_owner.get(other_side)
            if owner is None:
                raise DanglingLinkError(
                    f"edge {edge_id!r}: InternalLink partner {other_side!r} is not"
                    " an interface of any vertex element"
                )
            endpoints[tag] = owner
            linked_vertex_interfaces.add(other_side)

        try:
            builder.add_edge(
                PopanEdge(
                    id=edge_id,
                    kind=EdgeKind(type_value),
                    a=endpoints["A"],
                    b=endpoints["B"],
                    arrow_a=arrows["A"],
                    arrow_b=arrows["B"],
                    conditional=conditional,
                )
            )
        except (DuplicateIdError, UnknownEndpointError, ValueError) as exc:
            raise MalformedElementError(f"edge {edge_id!r}: {exc}") from exc

    for iface_id in interface_owner:
        if iface_id not in linked_vertex_interfaces:
            logger.warning(
                "vertex interface %r is not connected to any edge; dropping it", iface_id
            )

    return builder.build()
