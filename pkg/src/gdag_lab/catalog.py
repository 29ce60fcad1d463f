"""Builders for the small causal structures used throughout the project."""

from __future__ import annotations

from .graph import GDag, NodeKind

OBS = NodeKind.OBSERVED
UNOBS = NodeKind.UNOBSERVED


def chain() -> GDag:
    """X -> Z -> Y, all observed."""
    return GDag([("X", OBS), ("Z", OBS), ("Y", OBS)], [("X", "Z"), ("Z", "Y")])


def fork() -> GDag:
    """X <- Z -> Y, all observed."""
    return GDag([("X", OBS), ("Z", OBS), ("Y", OBS)], [("Z", "X"), ("Z", "Y")])


def collider() -> GDag:
    """X -> Z <- Y, all observed."""
    return GDag([("X", OBS), ("Z", OBS), ("Y", OBS)], [("X", "Z"), ("Y", "Z")])


def bell_gdag() -> GDag:
    """Two settings, two outcomes, one shared unobserved source."""
    return GDag(
        [("X", OBS), ("Y", OBS), ("A", OBS), ("B", OBS), ("L", UNOBS)],
        [("X", "A"), ("L", "A"), ("L", "B"), ("Y", "B")],
    )


def one_sided_bell_gdag() -> GDag:
    """Bell scenario where only one wing has a setting."""
    return GDag(
        [("X", OBS), ("A", OBS), ("B", OBS), ("L", UNOBS)],
        [("X", "A"), ("L", "A"), ("L", "B")],
    )


def triangle_gdag() -> GDag:
    """Three observed parties pairwise linked by bipartite sources."""
    return GDag(
        [
            ("A", OBS), ("B", OBS), ("C", OBS),
            ("LAB", UNOBS), ("LAC", UNOBS), ("LBC", UNOBS),
        ],
        [
            ("LAB", "A"), ("LAB", "B"),
            ("LAC", "A"), ("LAC", "C"),
            ("LBC", "B"), ("LBC", "C"),
        ],
    )


def instrumental_gdag() -> GDag:
    """Instrument Y, treatment B, outcome A, confounder U."""
    return GDag(
        [("Y", OBS), ("B", OBS), ("A", OBS), ("U", UNOBS)],
        [("Y", "B"), ("B", "A"), ("U", "B"), ("U", "A")],
    )


def extended_bell_gdag() -> GDag:
    """Bell-like eight-node example with extra unobserved nodes.

    Observed A, B with settings D, F; unobserved source E fed by H, plus
    a sink C fed by E and J, where J also drives the setting F.  With
    this structure {A, D} is d-separated from {F} by the empty set with
    witness U = {A, D, E, H}, V = {F, J}, W = {B, C}.
    """
    return GDag(
        [
            ("A", OBS), ("B", OBS), ("D", OBS), ("F", OBS),
            ("C", UNOBS), ("E", UNOBS), ("H", UNOBS), ("J", UNOBS),
        ],
        [
            ("D", "A"), ("E", "A"), ("E", "B"), ("F", "B"),
            ("E", "C"), ("J", "C"), ("J", "F"), ("H", "E"),
        ],
    )
