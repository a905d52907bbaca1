"""In-memory CAEX document model with a canonical writer and tolerant reader.

This covers the CAEX 2.15 subset needed to exchange PoPAN networks as
AutomationML files: the three class libraries, one instance hierarchy of
flat internal elements, external interfaces, and internal links. Because
the vertex and edge elements are siblings directly under the instance
hierarchy, internal links are serialized as trailing children of the
hierarchy element (their lowest common ancestor).

The writer produces a byte-stable canonical form: fixed XML attribute
precedence (Name, ID, RefBaseClassPath, then the rest), 2-space indent,
LF line endings, UTF-8. The reader accepts that form plus the usual
variations (attribute order, whitespace, comments) and reports syntax
errors with line/column positions. Any other schema version is rejected.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

from .model import PopanError

SCHEMA_VERSION = "2.15"
_SCHEMA_LOCATION = "CAEX_ClassModel_V2.15.xsd"
_XSI_NS = "http://www.w3.org/2001/XMLSchema-instance"


class CaexError(PopanError):
    pass


class CaexSyntaxError(CaexError):
    def __init__(self, message: str, line: int = 0, column: int = 0) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UnsupportedSchemaVersionError(CaexError):
    pass


class MissingLibraryError(CaexError):
    pass


class MalformedElementError(CaexError):
    pass


class DanglingLinkError(CaexError):
    pass


class VocabularyViolationError(CaexError):
    pass


@dataclass(frozen=True)
class CaexAttribute:
    """An Attribute element; ``value`` None means a bare declaration."""

    name: str
    value: str | None = None
    data_type: str = "xs:string"


@dataclass(frozen=True)
class InterfaceInstance:
    """An ExternalInterface instantiating an interface class."""

    name: str
    id: str
    ref_base_class_path: str
    attributes: tuple[CaexAttribute, ...] = ()

    def attribute(self, name: str) -> str | None:
        for attr in self.attributes:
            if attr.name == name:
                return attr.value
        return None


@dataclass(frozen=True)
class InternalElement:
    name: str
    id: str
    supported_roles: tuple[str, ...] = ()
    attributes: tuple[CaexAttribute, ...] = ()
    external_interfaces: tuple[InterfaceInstance, ...] = ()
    children: tuple["InternalElement", ...] = ()

    def attribute(self, name: str) -> str | None:
        for attr in self.attributes:
            if attr.name == name:
                return attr.value
        return None


@dataclass(frozen=True)
class InternalLink:
    """Joins two interface ids (``side_a``/``side_b``)."""

    name: str
    side_a: str
    side_b: str


@dataclass(frozen=True)
class InstanceHierarchy:
    name: str
    elements: tuple[InternalElement, ...] = ()
    links: tuple[InternalLink, ...] = ()


@dataclass(frozen=True)
class InterfaceClass:
    name: str
    attributes: tuple[CaexAttribute, ...] = ()


@dataclass(frozen=True)
class InterfaceClassLib:
    name: str
    classes: tuple[InterfaceClass, ...] = ()


@dataclass(frozen=True)
class RoleClass:
    name: str
    attributes: tuple[CaexAttribute, ...] = ()
    external_interfaces: tuple[InterfaceInstance, ...] = ()


@dataclass(frozen=True)
class RoleClassLib:
    name: str
    classes: tuple[RoleClass, ...] = ()


@dataclass(frozen=True)
class SystemUnitClass:
    name: str
    elements: tuple[InternalElement, ...] = ()


@dataclass(frozen=True)
class SystemUnitClassLib:
    name: str
    classes: tuple[SystemUnitClass, ...] = ()


@dataclass(frozen=True)
class CaexDocument:
    file_name: str = "popan.aml"
    schema_version: str = SCHEMA_VERSION
    interface_class_libs: tuple[InterfaceClassLib, ...] = ()
    role_class_libs: tuple[RoleClassLib, ...] = ()
    system_unit_class_libs: tuple[SystemUnitClassLib, ...] = ()
    instance_hierarchies: tuple[InstanceHierarchy, ...] = ()

    def interface_class_lib(self, name: str) -> InterfaceClassLib | None:
        for lib in self.interface_class_libs:
            if lib.name == name:
                return lib
        return None

    def role_class_lib(self, name: str) -> RoleClassLib | None:
        for lib in self.role_class_libs:
            if lib.name == name:
                return lib
        return None

    def instance_hierarchy(self, name: str) -> InstanceHierarchy | None:
        for hierarchy in self.instance_hierarchies:
            if hierarchy.name == name:
                return hierarchy
        return None


# ---------------------------------------------------------------------------
# Writer


_ATTR_PRECEDENCE = {
    "Name": 0,
    "ID": 1,
    "RefBaseClassPath": 2,
    "RefRoleClassPath": 3,
    "RefPartnerSideA": 4,
    "RefPartnerSideB": 5,
    "AttributeDataType": 6,
}


def _fmt_attrs(attrs: dict[str, str]) -> str:
    ordered = sorted(attrs.items(), key=lambda kv: (_ATTR_PRECEDENCE.get(kv[0], 99), kv[0]))
    return "".join(
        f' {key}="{escape(value, {chr(34): "&quot;"})}"' for key, value in ordered
    )


class _Emitter:
    def __init__(self) -> None:
        self.lines: list[str] = []

    def open(self, depth: int, tag: str, attrs: dict[str, str]) -> None:
        self.lines.append(f"{'  ' * depth}<{tag}{_fmt_attrs(attrs)}>")

    def close(self, depth: int, tag: str) -> None:
        self.lines.append(f"{'  ' * depth}</{tag}>")

    def empty(self, depth: int, tag: str, attrs: dict[str, str]) -> None:
        self.lines.append(f"{'  ' * depth}<{tag}{_fmt_attrs(attrs)}/>")

    def text_element(self, depth: int, tag: str, text: str) -> None:
        self.lines.append(f"{'  ' * depth}<{tag}>{escape(text)}</{tag}>")


def _emit_attribute(out: _Emitter, depth: int, attr: CaexAttribute) -> None:
    meta = {"Name": attr.name, "AttributeDataType": attr.data_type}
    if attr.value is None:
        out.empty(depth, "Attribute", meta)
        return
    out.open(depth, "Attribute", meta)
    out.text_element(depth + 1, "Value", attr.value)
    out.close(depth, "Attribute")


def _emit_interface(out: _Emitter, depth: int, iface: InterfaceInstance) -> None:
    meta = {
        "Name": iface.name,
        "ID": iface.id,
        "RefBaseClassPath": iface.ref_base_class_path,
    }
    if not iface.attributes:
        out.empty(depth, "ExternalInterface", meta)
        return
    out.open(depth, "ExternalInterface", meta)
    for attr in iface.attributes:
        _emit_attribute(out, depth + 1, attr)
    out.close(depth, "ExternalInterface")


def _emit_internal_element(out: _Emitter, depth: int, element: InternalElement) -> None:
    out.open(depth, "InternalElement", {"Name": element.name, "ID": element.id})
    for attr in element.attributes:
        _emit_attribute(out, depth + 1, attr)
    for iface in element.external_interfaces:
        _emit_interface(out, depth + 1, iface)
    for child in element.children:
        _emit_internal_element(out, depth + 1, child)
    for role in element.supported_roles:
        out.empty(depth + 1, "SupportedRoleClass", {"RefRoleClassPath": role})
    out.close(depth, "InternalElement")


def write_caex(doc: CaexDocument) -> str:
    """Serialize a document to its canonical text form (deterministic)."""
    out = _Emitter()
    out.lines.append('<?xml version="1.0" encoding="utf-8"?>')
    out.lines.append(
        f'<CAEXFile FileName="{escape(doc.file_name, {chr(34): "&quot;"})}"'
        f' SchemaVersion="{escape(doc.schema_version)}"'
        f' xmlns:xsi="{_XSI_NS}"'
        f' xsi:noNamespaceSchemaLocation="{_SCHEMA_LOCATION}">'
    )

    for icl in doc.interface_class_libs:
        out.open(1, "InterfaceClassLib", {"Name": icl.name})
        for cls in icl.classes:
            out.open(2, "InterfaceClass", {"Name": cls.name})
            for attr in cls.attributes:
                _emit_attribute(out, 3, attr)
            out.close(2, "InterfaceClass")
        out.close(1, "InterfaceClassLib")

    for rcl in doc.role_class_libs:
        out.open(1, "RoleClassLib", {"Name": rcl.name})
        for cls in rcl.classes:
            if not cls.attributes and not cls.external_interfaces:
                out.empty(2, "RoleClass", {"Name": cls.name})
                continue
            out.open(2, "RoleClass", {"Name": cls.name})
            for attr in cls.attributes:
                _emit_attribute(out, 3, attr)
            for iface in cls.external_interfaces:
                _emit_interface(out, 3, iface)
            out.close(2, "RoleClass")
        out.close(1, "RoleClassLib")

    for sucl in doc.system_unit_class_libs:
        out.open(1, "SystemUnitClassLib", {"Name": sucl.name})
        for cls in sucl.classes:
            out.open(2, "SystemUnitClass", {"Name": cls.name})
            for element in cls.elements:
                _emit_internal_element(out, 3, element)
            out.close(2, "SystemUnitClass")
        out.close(1, "SystemUnitClassLib")

    for hierarchy in doc.instance_hierarchies:
        out.open(1, "InstanceHierarchy", {"Name": hierarchy.name})
        for element in hierarchy.elements:
            _emit_internal_element(out, 2, element)
        for link in hierarchy.links:
            out.empty(
                2,
                "InternalLink",
                {
                    "Name": link.name,
                    "RefPartnerSideA": link.side_a,
                    "RefPartnerSideB": link.side_b,
                },
            )
        out.close(1, "InstanceHierarchy")

    out.lines.append("</CAEXFile>")
    return "\n".join(out.lines) + "\n"


# ---------------------------------------------------------------------------
# Reader


def _require(element: ET.Element, attr: str) -> str:
    value = element.get(attr)
    if value is None:
        raise MalformedElementError(
            f"<{element.tag}> element is missing its {attr!r} attribute"
        )
    return value


def _read_attribute(element: ET.Element) -> CaexAttribute:
    value_element = element.find("Value")
    value = None if value_element is None else (value_element.text or "")
    return CaexAttribute(
        name=_require(element, "Name"),
        value=value,
        data_type=element.get("AttributeDataType", "xs:string"),
    )


def _read_interface(element: ET.Element) -> InterfaceInstance:
    return InterfaceInstance(
        name=_require(element, "Name"),
        id=_require(element, "ID"),
        ref_base_class_path=_require(element, "RefBaseClassPath"),
        attributes=tuple(_read_attribute(a) for a in element.findall("Attribute")),
    )


def _read_internal_element(
    element: ET.Element, hoisted_links: list[InternalLink]
) -> InternalElement:
    children = []
    for child in element.findall("InternalElement"):
        children.append(_read_internal_element(child, hoisted_links))
    # Links nested inside elements are hoisted to the hierarchy level; the
    # canonical writer never nests them, but other tools may.
    for link in element.findall("InternalLink"):
        hoisted_links.append(_read_internal_link(link))
    return InternalElement(
        name=_require(element, "Name"),
        id=_require(element, "ID"),
        supported_roles=tuple(
            _require(role, "RefRoleClassPath")
            for role in element.findall("SupportedRoleClass")
        ),
        attributes=tuple(_read_attribute(a) for a in element.findall("Attribute")),
        external_interfaces=tuple(
            _read_interface(i) for i in element.findall("ExternalInterface")
        ),
        children=tuple(children),
    )


def _read_internal_link(element: ET.Element) -> InternalLink:
    return InternalLink(
        name=_require(element, "Name"),
        side_a=_require(element, "RefPartnerSideA"),
        side_b=_require(element, "RefPartnerSideB"),
    )


def read_caex(text: str) -> CaexDocument:
    """Parse CAEX text into a document model.

    Raises CaexSyntaxError (with position) on malformed XML and
    UnsupportedSchemaVersionError for anything but schema 2.15.
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, column = exc.position
        raise CaexSyntaxError(str(exc.msg), line=line, column=column) from exc

    if root.tag != "CAEXFile":
        raise CaexSyntaxError(f"root element must be CAEXFile, found {root.tag!r}", 1, 0)
    version = root.get("SchemaVersion", "")
    if version != SCHEMA_VERSION:
        raise UnsupportedSchemaVersionError(
            f"schema version {version!r} is not supported (expected {SCHEMA_VERSION!r})"
        )

    interface_class_libs = []
    for lib in root.findall("InterfaceClassLib"):
        interface_class_libs.append(
            InterfaceClassLib(
                name=_require(lib, "Name"),
                classes=tuple(
                    InterfaceClass(
                        name=_require(cls, "Name"),
                        attributes=tuple(
                            _read_attribute(a) for a in cls.findall("Attribute")
                        ),
                    )
                    for cls in lib.findall("InterfaceClass")
                ),
            )
        )

    role_class_libs = []
    for lib in root.findall("RoleClassLib"):
        role_class_libs.append(
            RoleClassLib(
                name=_require(lib, "Name"),
                classes=tuple(
                    RoleClass(
                        name=_require(cls, "Name"),
                        attributes=tuple(
                            _read_attribute(a) for a in cls.findall("Attribute")
                        ),
                        external_interfaces=tuple(
                            _read_interface(i) for i in cls.findall("ExternalInterface")
                        ),
                    )
                    for cls in lib.findall("RoleClass")
                ),
            )
        )

    system_unit_class_libs = []
    for lib in root.findall("SystemUnitClassLib"):
        classes = []
        for cls in lib.findall("SystemUnitClass"):
            ignored: list[InternalLink] = []
            classes.append(
                SystemUnitClass(
                    name=_require(cls, "Name"),
                    elements=tuple(
                        _read_internal_element(e, ignored)
                        for e in cls.findall("InternalElement")
                    ),
                )
            )
        system_unit_class_libs.append(
            SystemUnitClassLib(name=_require(lib, "Name"), classes=tuple(classes))
        )

    hierarchies = []
    for node in root.findall("InstanceHierarchy"):
        hoisted: list[InternalLink] = []
        elements = tuple(
            _read_internal_element(e, hoisted) for e in node.findall("InternalElement")
        )
        links = tuple(_read_internal_link(l) for l in node.findall("InternalLink"))
        hierarchies.append(
            InstanceHierarchy(
                name=_require(node, "Name"),
                elements=elements,
                links=links + tuple(hoisted),
            )
        )

    return CaexDocument(
        file_name=root.get("FileName", "popan.aml"),
        schema_version=version,
        interface_class_libs=tuple(interface_class_libs),
        role_class_libs=tuple(role_class_libs),
        system_unit_class_libs=tuple(system_unit_class_libs),
        instance_hierarchies=tuple(hierarchies),
    )
