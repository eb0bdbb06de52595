"""Hierarchical input model: parse flare-style JSON, validate, aggregate values."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .geom import RectilinearPolygon


class HierarchyError(ValueError):
    """Malformed hierarchy document or invalid node values."""


@dataclass
class HierarchyNode:
    name: str
    value: float = 0.0
    children: list["HierarchyNode"] = field(default_factory=list)
    cell: Optional[RectilinearPolygon] = None
    site: Optional[object] = None
    layout_error: Optional[float] = None
    layout_iterations: Optional[int] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self, path: str = "", depth: int = 0) -> Iterator[tuple[str, int, "HierarchyNode"]]:
        """Depth-first (path, depth, node) traversal; path segments joined by '/'."""
        here = self.name if not path else f"{path}/{self.name}"
        yield here, depth, self
        for child in self.children:
            yield from child.walk(here, depth + 1)

    def leaves(self) -> Iterator["HierarchyNode"]:
        for _, _, node in self.walk():
            if node.is_leaf:
                yield node

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(c.depth() for c in self.children)


def parse_hierarchy(document: str | bytes | dict) -> HierarchyNode:
    """Parse and validate a flare-style JSON hierarchy.

    The document is an object with "name" (string), optional "children"
    (non-empty array), and "value" (positive number, required on leaves).
    Values supplied on internal nodes are ignored; internal values always
    come from aggregation over the subtree leaves.
    """
    if isinstance(document, (str, bytes)):
        try:
            obj = json.loads(document)
        except json.JSONDecodeError as exc:
            raise HierarchyError(f"invalid JSON: {exc}") from exc
    else:
        obj = document
    root = _build(obj, path="")
    return aggregate_values(root)


def _build(obj, path: str) -> HierarchyNode:
    if not isinstance(obj, dict):
        raise HierarchyError(f"node at '{path or '<root>'}' is not an object")
    name = obj.get("name")
    if not isinstance(name, str) or not name:
        raise HierarchyError(f"node at '{path or '<root>'}' needs a non-empty name")
    here = name if not path else f"{path}/{name}"
    children_obj = obj.get("children")
    if children_obj is not None:
        if not isinstance(children_obj, list) or not children_obj:
            raise HierarchyError(f"internal node '{here}' has an empty children list")
        children = [_build(c, here) for c in children_obj]
        return HierarchyNode(name=name, children=children)
    value = obj.get("value")
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise HierarchyError(f"leaf '{here}' is missing a numeric value")
    if not value > 0:
        raise HierarchyError(f"leaf '{here}' must have a positive value, got {value}")
    return HierarchyNode(name=name, value=float(value))


def aggregate_values(root: HierarchyNode) -> HierarchyNode:
    """Recompute every internal node's value as the sum over its subtree leaves.

    Idempotent; leaf values are left untouched.
    """
    def visit(node: HierarchyNode) -> float:
        if node.is_leaf:
            return node.value
        node.value = sum(visit(c) for c in node.children)
        return node.value

    visit(root)
    return root
