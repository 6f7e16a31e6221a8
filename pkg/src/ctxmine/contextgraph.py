"""Context model assembly: a single-rooted DAG and its root-to-leaf paths.

The second half of the mining strategy.  Directed relations become graph
edges, inserted strongest-first; an edge that would close a cycle is rejected
(and recorded, for transparency).  Instances that end up with no incoming
edge are attached directly under the root, which keeps the graph
single-rooted and makes a lone influential instance a valid one-step
context.  Every maximal root-to-leaf traversal is then a context: an ordered
combination of element instances observed to influence the task.

Path enumeration prunes three ways: a step that would repeat an element, a
step beyond the length cap, and a step whose joint support in the dataset
falls below the floor.  A pruned step turns the current node into a leaf for
that traversal; prefixes of longer surviving paths are not emitted on their
own.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .diagnostics import ValidationError
from .ingest import ContextualDataset, ElementInstance, ProcessorConfig
from .stats import PairwiseRelation

ROOT = None  # the distinguished root is not an ElementInstance


@dataclass(frozen=True)
class ContextGraph:
    """Single-rooted DAG over element instances.

    ``edges`` holds the accepted relations in insertion order;
    ``root_children`` the instances attached directly under the root
    (lexicographic order); ``rejected_edges`` the skipped relations with a
    reason (``cycle`` or ``duplicate``).
    """

    task_name: str
    instances: tuple[ElementInstance, ...]
    edges: tuple[PairwiseRelation, ...]
    root_children: tuple[ElementInstance, ...]
    rejected_edges: tuple[tuple[PairwiseRelation, str], ...]

    def successors(self, instance: ElementInstance) -> tuple[ElementInstance, ...]:
        return tuple(
            sorted(e.target for e in self.edges if e.source == instance)
        )


@dataclass(frozen=True)
class ContextPath:
    """One context: an ordered chain of instances below the root.

    ``joint_support`` counts the dataset rows matching every instance in the
    chain; missing cells never match.
    """

    instances: tuple[ElementInstance, ...]
    joint_support: int
    joint_support_ratio: float

    def __post_init__(self):
        if len(self.instances) < 1:
            raise ValidationError("a context path needs at least one instance")
        elements = [i.element for i in self.instances]
        if len(set(elements)) != len(elements):
            raise ValidationError(
                f"context path repeats an element: {', '.join(elements)}"
            )
        if self.joint_support < 0:
            raise ValidationError("joint support must be non-negative")
        if not 0.0 <= self.joint_support_ratio <= 1.0:
            raise ValidationError("joint support ratio must be in [0, 1]")


def build_graph(
    task_name: str, relations: Iterable[PairwiseRelation]
) -> ContextGraph:
    """Assemble relations into a single-rooted DAG.

    Relations are inserted in the given order (callers pass them
    strongest-first, as produced by the pair analysis).  An edge whose
    insertion would create a cycle is rejected with reason ``cycle``; an
    exact repeat of an already-accepted edge with reason ``duplicate``.
    Afterwards every instance without an incoming edge is attached under the
    root.
    """
    adjacency: dict[ElementInstance, set[ElementInstance]] = {}
    incoming: dict[ElementInstance, int] = {}
    accepted: list[PairwiseRelation] = []
    rejected: list[tuple[PairwiseRelation, str]] = []

    for relation in relations:
        source, target = relation.source, relation.target
        if target in adjacency.get(source, ()):
            rejected.append((relation, "duplicate"))
            continue
        if _reachable(adjacency, start=target, goal=source):
            rejected.append((relation, "cycle"))
            continue
        adjacency.setdefault(source, set()).add(target)
        incoming.setdefault(source, 0)
        incoming[target] = incoming.get(target, 0) + 1
        accepted.append(relation)

    instances = tuple(sorted(incoming))
    root_children = tuple(sorted(i for i in instances if incoming[i] == 0))
    return ContextGraph(
        task_name=task_name,
        instances=instances,
        edges=tuple(accepted),
        root_children=root_children,
        rejected_edges=tuple(rejected),
    )


def _reachable(
    adjacency: dict[ElementInstance, set[ElementInstance]],
    start: ElementInstance,
    goal: ElementInstance,
) -> bool:
    if start == goal:
        return True
    stack = [start]
    seen = {start}
    while stack:
        node = stack.pop()
        for successor in adjacency.get(node, ()):
            if successor == goal:
                return True
            if successor not in seen:
                seen.add(successor)
                stack.append(successor)
    return False


def enumerate_contexts(
    graph: ContextGraph, dataset: ContextualDataset, config: ProcessorConfig
) -> list[ContextPath]:
    """Depth-first enumeration of all maximal root-to-leaf contexts.

    A traversal stops at the current node when every further step would
    repeat an element, exceed ``max_path_length``, or drop the joint support
    below ``min_path_support``; the accumulated chain (if non-empty) is one
    context.  Output is deduplicated and sorted by descending joint support,
    then lexicographic instance sequence.
    """
    missing = {i.element for i in graph.instances} - set(dataset.columns)
    if missing:
        raise ValidationError(
            f"graph references element(s) absent from the dataset: "
            f"{', '.join(sorted(missing))}"
        )

    children: dict[ElementInstance | None, list[ElementInstance]] = {
        ROOT: list(graph.root_children)
    }
    for edge in graph.edges:
        children.setdefault(edge.source, []).append(edge.target)
    for node in children:
        children[node] = sorted(children[node])

    columns = {
        element: np.array(dataset.cells[element], dtype=object)
        for element in {i.element for i in graph.instances}
    }
    instance_masks = {
        instance: columns[instance.element] == instance.value
        for instance in graph.instances
    }

    found: dict[tuple[ElementInstance, ...], int] = {}

    def visit(
        node: ElementInstance | None,
        path: tuple[ElementInstance, ...],
        mask: np.ndarray,
        support: int,
        used: frozenset[str],
    ) -> None:
        blocked = False
        progressed = False
        for child in children.get(node, ()):
            if child.element in used or len(path) + 1 > config.max_path_length:
                blocked = True
                continue
            child_mask = mask & instance_masks[child]
            child_support = int(child_mask.sum())
            if child_support < config.min_path_support:
                blocked = True
                continue
            progressed = True
            visit(
                child,
                path + (child,),
                child_mask,
                child_support,
                used | {child.element},
            )
        if path and (blocked or not progressed):
            found[path] = support

    visit(
        ROOT,
        (),
        np.ones(dataset.row_count, dtype=bool),
        dataset.row_count,
        frozenset(),
    )

    paths = [
        ContextPath(
            instances=instances,
            joint_support=support,
            joint_support_ratio=support / dataset.row_count,
        )
        for instances, support in found.items()
    ]
    paths.sort(key=lambda p: (-p.joint_support, p.instances))
    return paths


def path_joint_support(
    instances: Sequence[ElementInstance], dataset: ContextualDataset
) -> int:
    """Count dataset rows matching every instance of a path."""
    for instance in instances:
        if instance.element not in dataset.cells:
            raise ValidationError(
                f"path references element '{instance.element}' absent from the dataset"
            )
    series = [dataset.cells[i.element] for i in instances]
    values = [i.value for i in instances]
    return sum(
        1
        for row in zip(*series)
        if all(cell == value for cell, value in zip(row, values))
    )


def export_dot(graph: ContextGraph) -> str:
    """Render the context model as deterministic Graphviz DOT text.

    The root carries a distinct shape; instance nodes are labeled
    ``element = VALUE``; relation edges are labeled with Cramér's V to three
    decimals.  Nodes and edges are emitted in sorted order so equal graphs
    produce byte-identical text.
    """
    def escape(text: str) -> str:
        return text.replace("\\", "\\\\").replace('"', '\\"')

    ordered = sorted(graph.instances)
    names = {instance: f"n{i}" for i, instance in enumerate(ordered)}
    lines = [
        "digraph context_model {",
        "  rankdir=LR;",
        "  node [shape=box];",
        f'  root [label="{escape(graph.task_name)}", shape=ellipse, style=bold];',
    ]
    for instance in ordered:
        lines.append(f'  {names[instance]} [label="{escape(str(instance))}"];')
    for child in graph.root_children:
        lines.append(f"  root -> {names[child]};")
    for edge in sorted(graph.edges, key=lambda e: (e.source, e.target)):
        lines.append(
            f'  {names[edge.source]} -> {names[edge.target]} '
            f'[label="{edge.cramers_v:.3f}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
