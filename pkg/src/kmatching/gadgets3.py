"""Gadget templates for k = 3: variable, positive/negative clause and tromino wire.

Layouts are our reconstructions; each one is accepted only because
:func:`certify_gadget` reproduces the required truth table exhaustively.
"""
from __future__ import annotations

from .gadget import Certification, GadgetTemplate, Port, certify_gadget

BINARY = frozenset({0, 1})


def variable_gadget3() -> GadgetTemplate:
    """Centre (8,8) with three arms; (12,9), (7,3) and (7,13) are leaf points.

    FALSE: (8,8) takes (9,8),(10,8); TRUE: (8,8) takes (8,7),(8,9). Every port
    then emits charge 0 (FALSE) or 1 (TRUE).
    """
    pts = [(8, 8)]
    pts += [(x, 8) for x in range(9, 16)] + [(12, 9)]
    pts += [(8, y) for y in range(7, -1, -1)] + [(7, 3)]
    pts += [(8, y) for y in range(9, 17)] + [(7, 13)]
    ports = (
        Port("e", (15, 8), "E", "variable-out", BINARY),
        Port("s", (8, 0), "S", "variable-out", BINARY),
        Port("n", (8, 16), "N", "variable-out", BINARY),
    )
    return GadgetTemplate("variable3", 3, tuple(pts), ports, (0, 0, 16, 16),
                          {"center": (8, 8), "true_block": frozenset({(8, 7), (8, 8), (8, 9)}),
                           "false_block": frozenset({(8, 8), (9, 8), (10, 8)})})


def clause_gadget3(polarity: str) -> GadgetTemplate:
    """Three straight arms of nine points meeting at (9,9).

    positive: (9,9) is the only point outside the arms' trominoes.
    negative: a five-point hub (9,9),(9,8),(8,9),(9,10),(10,9); each arm carries
    one leaf so that it still tiles.
    """
    ports = (
        Port("w", (0, 9), "W", "clause-in", BINARY),
        Port("n", (9, 18), "N", "clause-in", BINARY),
        Port("e", (18, 9), "E", "clause-in", BINARY),
    )
    if polarity == "positive":
        pts = [(9, 9)] + [(x, 9) for x in range(0, 9)] + [(x, 9) for x in range(10, 19)]
        pts += [(9, y) for y in range(10, 19)]
        hub = [(9, 9)]
    elif polarity == "negative":
        hub = [(9, 9), (9, 8), (8, 9), (9, 10), (10, 9)]
        pts = list(hub) + [(x, 9) for x in range(0, 8)] + [(x, 9) for x in range(11, 19)]
        pts += [(9, y) for y in range(11, 19)] + [(4, 10), (10, 14), (14, 10)]
    else:
        raise ValueError(f"polarity must be positive or negative, not {polarity!r}")
    return GadgetTemplate(f"clause3-{polarity}", 3, tuple(pts), ports, (0, 0, 18, 18),
                          {"center": (9, 9), "hub": tuple(hub)})


def wire_tromino3(orientation: str = "horizontal") -> GadgetTemplate:
    if orientation == "horizontal":
        pts, d_in, d_out = ((0, 0), (1, 0), (2, 0)), "W", "E"
    elif orientation == "vertical":
        pts, d_in, d_out = ((0, 0), (0, 1), (0, 2)), "S", "N"
    else:
        raise ValueError(f"orientation must be horizontal or vertical, not {orientation!r}")
    ports = (Port("in", pts[0], d_in, "in", frozenset({0, 1, 2})),
             Port("out", pts[2], d_out, "out", frozenset({0, 1, 2})))
    return GadgetTemplate(f"wire3-{orientation}", 3, pts, ports, (*pts[0], *pts[2]))


def certify3(name: str) -> Certification:
    factories = {
        "variable3": variable_gadget3,
        "clause3-positive": lambda: clause_gadget3("positive"),
        "clause3-negative": lambda: clause_gadget3("negative"),
        "wire3": wire_tromino3,
    }
    return certify_gadget(factories[name]())
