"""End-to-end orchestration: raw input files in, context model out.

Shared by the CLI and the HTTP service so both entry points produce
byte-identical results for equal inputs: parse metadata, apply overrides,
parse and discretize the dataset, mine pairwise relations, assemble the
graph, enumerate contexts, and build the interchange document.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

from .contextgraph import ContextGraph, ContextPath, build_graph, enumerate_contexts
from .diagnostics import WarningRecord
from .ingest import (
    ContextualDataset,
    MetadataSpec,
    apply_config_overrides,
    discretize,
    parse_dataset,
    parse_metadata,
)
from .stats import PairwiseRelation, analyze_pairs
from .stc import StandardizedTaskSpecificContexts, build_document


@dataclass(frozen=True)
class PipelineResult:
    dataset: ContextualDataset
    metadata: MetadataSpec
    relations: tuple[PairwiseRelation, ...]
    graph: ContextGraph
    contexts: tuple[ContextPath, ...]
    document: StandardizedTaskSpecificContexts
    warnings: tuple[WarningRecord, ...]


def run_pipeline(
    metadata_data: bytes | str,
    dataset_data: bytes | str,
    task_name: str,
    overrides: Mapping[str, str] | None = None,
) -> PipelineResult:
    """Run the whole processing chain on raw file contents.

    ``overrides`` maps configuration parameter names to raw string values
    (as received from CLI flags or query parameters); they take precedence
    over the metadata file.
    """
    metadata, warnings = parse_metadata(metadata_data)
    config = apply_config_overrides(metadata.config, overrides)
    metadata = replace(metadata, config=config)

    raw_dataset, metadata, dataset_warnings = parse_dataset(
        dataset_data, metadata, task_name
    )
    warnings.extend(dataset_warnings)

    dataset, discretize_warnings = discretize(raw_dataset, metadata)
    warnings.extend(discretize_warnings)

    relations, pair_warnings = analyze_pairs(dataset, config)
    warnings.extend(pair_warnings)

    graph = build_graph(task_name, relations)
    for relation, reason in graph.rejected_edges:
        warnings.append(
            WarningRecord(
                "EDGE_REJECTED",
                f"edge {relation.source} -> {relation.target} skipped ({reason})",
                f"{relation.source.element},{relation.target.element}",
            )
        )

    contexts = enumerate_contexts(graph, dataset, config)
    singletons = sum(1 for c in contexts if len(c.instances) == 1)
    if singletons:
        warnings.append(
            WarningRecord(
                "SINGLETON_CONTEXT",
                f"{singletons} context(s) consist of a single instance "
                "attached directly under the root",
            )
        )

    labels = {d.name: d.label for d in metadata.elements}
    document = build_document(
        task=task_name,
        elements=[(c, labels.get(c, c)) for c in dataset.columns],
        relations=relations,
        contexts=contexts,
        warnings=warnings,
    )
    return PipelineResult(
        dataset=dataset,
        metadata=metadata,
        relations=tuple(relations),
        graph=graph,
        contexts=tuple(contexts),
        document=document,
        warnings=tuple(warnings),
    )
