"""Loaders for the reference data files shipped under data/."""

from __future__ import annotations

from importlib import resources

from .graph_core import EmbeddingMap, Graph, parse_graph_text, parse_map_text
from .packing import parse_coloring_text


class MissingData(Exception):
    """A packaged data file is absent or unreadable."""


def _read(name: str) -> str:
    try:
        return (resources.files("sierpack") / "data" / name).read_text("ascii")
    except (FileNotFoundError, ModuleNotFoundError) as exc:
        raise MissingData(f"packaged data file {name!r} not found") from exc


def load_coloring(name: str) -> dict[str, int]:
    return parse_coloring_text(_read(name))


def load_graph(name: str) -> Graph:
    return parse_graph_text(_read(name))


def load_map(name: str) -> EmbeddingMap:
    return parse_map_text(_read(name))
