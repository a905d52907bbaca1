"""Built-in example networks.

Two models ship with the package:

* ``generic`` -- a small didactic product: an initial product joined to
  product 1 by a fastener, products 2 and 3 with structural blocking
  dependencies, and a last product that must come off first when taking
  the assembly apart. The fastener's process and process 1 are linked
  conditionally and ordered by a process-sequence edge, so the fastening
  step runs after process 1 even though the fastener sits earlier in the
  physical chain.
* ``ev-battery`` -- a simplified electric-vehicle traction battery: the
  box (the initial product, empty at the start of assembly), two battery
  modules, a lid, and the M6 bolts fastening the lid. Unscrewing the
  bolts must happen before the lid can be manipulated away; the box's own
  manipulation step waits until every branch inside it is done.

Nodes that merely pad a model out to a complete, valid network (they are
plausible but not part of the core scenario) carry the label prefix
``constructed:`` so downstream checks can tell the two apart.
"""

from __future__ import annotations

from typing import Callable

from .model import (
    EdgeKind,
    GraphBuilder,
    PopanGraph,
    ProductKind,
    arrowed_edge,
    p2p,
    p2r,
    process,
    product,
    resource,
)

CONSTRUCTED_PREFIX = "constructed:"


def build_generic() -> PopanGraph:
    builder = GraphBuilder()
    builder.add_nodes(
        [
            product("InitialProduct", ProductKind.INITIAL, "Initial Product"),
            product("Product1", ProductKind.ELEMENTARY, "Product 1"),
            product("Product2", ProductKind.ELEMENTARY, "Product 2"),
            product("Product3", ProductKind.ELEMENTARY, "Product 3"),
            product("LastProduct", ProductKind.LAST, "Last Product"),
            product("FastenerProductI", ProductKind.FASTENER, "Fastener Product i"),
            process("Process1", "Operation", "Process 1"),
            process("FastenerProcessI", "Fastening", "Fastener Process i"),
            process("ProcessP2", "Operation", f"{CONSTRUCTED_PREFIX} process for Product 2"),
            process("ProcessP3", "Operation", f"{CONSTRUCTED_PREFIX} process for Product 3"),
            process("ProcessLast", "Operation", f"{CONSTRUCTED_PREFIX} process for Last Product"),
            resource("Resource1", "Tool", "Resource 1"),
            resource("Resource2", "Tool", "Resource 2"),
        ]
    )
    builder.add_edges(
        [
            # Physical chain in assembly order: initial -> fastener -> product 1.
            arrowed_edge("PhysInitialFastener", EdgeKind.PHYSICAL, "InitialProduct", "FastenerProductI"),
            arrowed_edge("PhysFastenerP1", EdgeKind.PHYSICAL, "FastenerProductI", "Product1"),
            # Product 3 is blocked by products 1 and 2 during assembly and by
            # the last product during disassembly.
            arrowed_edge("StructP1P3", EdgeKind.STRUCTURAL, "Product1", "Product3"),
            arrowed_edge("StructP2P3", EdgeKind.STRUCTURAL, "Product2", "Product3"),
            arrowed_edge("StructP3Last", EdgeKind.STRUCTURAL, "Product3", "LastProduct"),
            # Conditional product-process links, ordered by the sequence edge:
            # process 1 runs before the fastening when assembling.
            p2p("LinkP1Process1", "Product1", "Process1", conditional=True),
            p2p("LinkFastener", "FastenerProductI", "FastenerProcessI", conditional=True),
            arrowed_edge("SeqProcess1FastenerI", EdgeKind.SEQUENCE_PROCESS, "Process1", "FastenerProcessI"),
            p2p("LinkP2", "Product2", "ProcessP2"),
            p2p("LinkP3", "Product3", "ProcessP3"),
            p2p("LinkLast", "LastProduct", "ProcessLast"),
            p2r("ResFastenerR1", "FastenerProcessI", "Resource1"),
            p2r("ResProcess1R2", "Process1", "Resource2"),
            p2r("ResP2R2", "ProcessP2", "Resource2"),
            p2r("ResP3R2", "ProcessP3", "Resource2"),
            p2r("ResLastR2", "ProcessLast", "Resource2"),
        ]
    )
    return builder.build()


def build_ev_battery() -> PopanGraph:
    builder = GraphBuilder()
    builder.add_nodes(
        [
            product("BatteryBox", ProductKind.INITIAL, "Battery box"),
            product("Module1", ProductKind.SUB, f"{CONSTRUCTED_PREFIX} battery module 1"),
            product("Module2", ProductKind.SUB, f"{CONSTRUCTED_PREFIX} battery module 2"),
            product("Lid", ProductKind.LAST, "Lid"),
            product("BoltsM6", ProductKind.FASTENER, "Bolts M6"),
            process("Manipulation", "Manipulation"),
            process("Screwing", "Screwing"),
            process("ModuleExtraction", "Extraction", f"{CONSTRUCTED_PREFIX} module extraction"),
            resource("Robot", "Robot", f"{CONSTRUCTED_PREFIX} KUKA robot"),
            resource("Screwdriver", "Screwdriver", f"{CONSTRUCTED_PREFIX} screwdriver"),
        ]
    )
    builder.add_edges(
        [
            # Assembly order along the physical chain: box, modules in, lid
            # on, bolts last.
            arrowed_edge("PhysBoxModule1", EdgeKind.PHYSICAL, "BatteryBox", "Module1"),
            arrowed_edge("PhysBoxModule2", EdgeKind.PHYSICAL, "BatteryBox", "Module2"),
            arrowed_edge("PhysBoxLid", EdgeKind.PHYSICAL, "BatteryBox", "Lid"),
            arrowed_edge("PhysLidBolts", EdgeKind.PHYSICAL, "Lid", "BoltsM6"),
            # The lid blocks everything underneath it: it goes on only after
            # the box and modules, and comes off before them.
            arrowed_edge("StructBoxLid", EdgeKind.STRUCTURAL, "BatteryBox", "Lid"),
            arrowed_edge("StructModule1Lid", EdgeKind.STRUCTURAL, "Module1", "Lid"),
            arrowed_edge("StructModule2Lid", EdgeKind.STRUCTURAL, "Module2", "Lid"),
            # The lid's manipulation is conditional on the screwing sequence:
            # bolts are screwed after (removed before) the lid moves.
            p2p("LinkLidManipulation", "Lid", "Manipulation", conditional=True),
            p2p("LinkBoxManipulation", "BatteryBox", "Manipulation"),
            p2p("LinkBoltsScrewing", "BoltsM6", "Screwing"),
            p2p("LinkModule1Extraction", "Module1", "ModuleExtraction"),
            p2p("LinkModule2Extraction", "Module2", "ModuleExtraction"),
            arrowed_edge("SeqScrewingManipulation", EdgeKind.SEQUENCE_PROCESS, "Manipulation", "Screwing"),
            p2r("ResManipulationRobot", "Manipulation", "Robot"),
            p2r("ResScrewingScrewdriver", "Screwing", "Screwdriver"),
            p2r("ResExtractionRobot", "ModuleExtraction", "Robot"),
        ]
    )
    return builder.build()


FIXTURES: dict[str, Callable[[], PopanGraph]] = {
    "generic": build_generic,
    "ev-battery": build_ev_battery,
}
