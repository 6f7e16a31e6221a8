"""ctxmine: data-driven context modeling.

Mines statistically relevant combinations of contextual element instances
from observation datasets and renders them as a single-rooted directed
acyclic graph whose root-to-leaf paths are the contexts that influence a
user task.  The library is split along the processing chain: ``ingest``
(files in), ``stats`` (pairwise association mining), ``contextgraph`` (model
assembly and path enumeration), ``stc`` (the interchange document), plus a
CLI and an HTTP service wrapping the same pipeline.
"""

from .contextgraph import (
    ContextGraph,
    ContextPath,
    build_graph,
    enumerate_contexts,
    export_dot,
    path_joint_support,
)
from .diagnostics import (
    CtxmineError,
    DegenerateElement,
    ParseError,
    SerializationError,
    ValidationError,
    VersionError,
    WarningRecord,
)
from .ingest import (
    ContextualDataset,
    DataType,
    ElementDescriptor,
    ElementInstance,
    MetadataSpec,
    ProcessorConfig,
    discretize,
    parse_dataset,
    parse_metadata,
)
from .pipeline import PipelineResult, run_pipeline
from .stats import (
    AssociationTestResult,
    ContingencyTable,
    InstanceAssociation,
    PairwiseRelation,
    adjusted_residuals,
    analyze_pairs,
    build_contingency_table,
    chi_square_independence,
    extract_instance_associations,
    orient_relation,
)
from .stc import (
    StandardizedTaskSpecificContexts,
    StcElement,
    StcWarning,
    build_document,
    parse_stc,
    serialize_stc,
    validate_document,
)

__version__ = "0.1.0"

__all__ = [
    "AssociationTestResult",
    "ContextGraph",
    "ContextPath",
    "ContextualDataset",
    "ContingencyTable",
    "CtxmineError",
    "DataType",
    "DegenerateElement",
    "ElementDescriptor",
    "ElementInstance",
    "InstanceAssociation",
    "MetadataSpec",
    "PairwiseRelation",
    "ParseError",
    "PipelineResult",
    "ProcessorConfig",
    "SerializationError",
    "StandardizedTaskSpecificContexts",
    "StcElement",
    "StcWarning",
    "ValidationError",
    "VersionError",
    "WarningRecord",
    "adjusted_residuals",
    "analyze_pairs",
    "build_contingency_table",
    "build_document",
    "build_graph",
    "chi_square_independence",
    "discretize",
    "enumerate_contexts",
    "export_dot",
    "extract_instance_associations",
    "orient_relation",
    "parse_dataset",
    "parse_metadata",
    "parse_stc",
    "path_joint_support",
    "run_pipeline",
    "serialize_stc",
    "validate_document",
]
