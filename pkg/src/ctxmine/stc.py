"""The standardized task-specific contexts (STC) interchange document.

This versioned JSON document is the wire contract between the data processor
and any model generator: it carries the task name, the analyzed elements,
the directed instance relations, the enumerated contexts, and the warnings
produced along the way.  Nothing else — no timestamps, no host metadata — so
equal analyses serialize to byte-identical output.

Canonical form: UTF-8, fixed key order (version, task, elements, relations,
contexts, warnings), reals rounded to at most 6 significant digits.  The
compact single-line form is the canonical one; an indented form is available
for human eyes.  ``parse_stc`` round-trips ``serialize_stc`` exactly, and
document validity is decidable without the originating dataset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .contextgraph import ContextPath
from .diagnostics import (
    ParseError,
    SerializationError,
    ValidationError,
    VersionError,
    WarningRecord,
)
from .ingest import ElementInstance
from .stats import PairwiseRelation

STC_VERSION = "1.0"


@dataclass(frozen=True)
class StcElement:
    name: str
    label: str


@dataclass(frozen=True)
class StcWarning:
    code: str
    message: str

    @classmethod
    def from_record(cls, record: WarningRecord) -> "StcWarning":
        message = record.message
        if record.location:
            message = f"{message} [{record.location}]"
        return cls(code=record.code, message=message)


@dataclass(frozen=True)
class StandardizedTaskSpecificContexts:
    version: str
    task: str
    elements: tuple[StcElement, ...]
    relations: tuple[PairwiseRelation, ...]
    contexts: tuple[ContextPath, ...]
    warnings: tuple[StcWarning, ...]


def _round6(value: float) -> float:
    """Round to at most 6 significant digits (canonical real precision)."""
    return float(f"{value:.6g}")


def _relation_sort_key(relation: PairwiseRelation):
    return (
        -relation.cramers_v,
        -relation.residual,
        relation.source,
        relation.target,
    )


def _context_sort_key(context: ContextPath):
    return (-context.joint_support, context.instances)


def build_document(
    task: str,
    elements: Iterable[tuple[str, str]],
    relations: Sequence[PairwiseRelation],
    contexts: Sequence[ContextPath],
    warnings: Iterable[WarningRecord],
) -> StandardizedTaskSpecificContexts:
    """Assemble a canonical document from pipeline results.

    Reals are rounded to canonical precision here, then the collections are
    re-sorted (stably) on the rounded keys so the document's declared sort
    order holds for the numbers it actually carries.
    """
    rounded_relations = [
        PairwiseRelation(
            source=r.source,
            target=r.target,
            chi_square=_round6(r.chi_square),
            p_value=_round6(r.p_value),
            cramers_v=_round6(r.cramers_v),
            residual=_round6(r.residual),
            support=r.support,
            support_ratio=_round6(r.support_ratio),
        )
        for r in relations
    ]
    rounded_relations.sort(key=_relation_sort_key)
    rounded_contexts = [
        ContextPath(
            instances=c.instances,
            joint_support=c.joint_support,
            joint_support_ratio=_round6(c.joint_support_ratio),
        )
        for c in contexts
    ]
    rounded_contexts.sort(key=_context_sort_key)
    return StandardizedTaskSpecificContexts(
        version=STC_VERSION,
        task=task,
        elements=tuple(StcElement(name, label) for name, label in elements),
        relations=tuple(rounded_relations),
        contexts=tuple(rounded_contexts),
        warnings=tuple(StcWarning.from_record(w) for w in warnings),
    )


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate_document(doc: StandardizedTaskSpecificContexts) -> None:
    """Check every document invariant; raises ValidationError naming the path."""
    if doc.version != STC_VERSION:
        raise ValidationError(
            f"unsupported document version '{doc.version}'", "version"
        )
    if not doc.task:
        raise ValidationError("task must be non-empty", "task")

    names = []
    for i, element in enumerate(doc.elements):
        if not element.name:
            raise ValidationError("element name must be non-empty", f"elements[{i}].name")
        if not element.label:
            raise ValidationError("element label must be non-empty", f"elements[{i}].label")
        names.append(element.name)
    known = set(names)
    if len(known) != len(names):
        raise ValidationError("element names must be unique", "elements")

    for i, relation in enumerate(doc.relations):
        path = f"relations[{i}]"
        for end, instance in (("from", relation.source), ("to", relation.target)):
            if instance.element not in known:
                raise ValidationError(
                    f"unknown element '{instance.element}'", f"{path}.{end}.element"
                )
        for fieldname in ("p_value", "cramers_v", "support_ratio"):
            value = getattr(relation, fieldname)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(
                    f"{fieldname} must be in [0, 1], got {value}", f"{path}.{fieldname}"
                )
        if relation.chi_square < 0.0:
            raise ValidationError("chi_square must be non-negative", f"{path}.chi_square")

    for i, context in enumerate(doc.contexts):
        path = f"contexts[{i}]"
        for j, instance in enumerate(context.instances):
            if instance.element not in known:
                raise ValidationError(
                    f"unknown element '{instance.element}'",
                    f"{path}.instances[{j}].element",
                )

    for i, warning in enumerate(doc.warnings):
        if not warning.code:
            raise ValidationError("warning code must be non-empty", f"warnings[{i}].code")

    for i in range(1, len(doc.relations)):
        if _relation_sort_key(doc.relations[i - 1]) > _relation_sort_key(doc.relations[i]):
            raise ValidationError(
                "relations are not sorted strongest-first", f"relations[{i}]"
            )
    for i in range(1, len(doc.contexts)):
        if _context_sort_key(doc.contexts[i - 1]) > _context_sort_key(doc.contexts[i]):
            raise ValidationError(
                "contexts are not sorted by support then sequence", f"contexts[{i}]"
            )


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _instance_payload(instance: ElementInstance) -> dict[str, str]:
    return {"element": instance.element, "value": instance.value}


def serialize_stc(doc: StandardizedTaskSpecificContexts, pretty: bool = False) -> bytes:
    """Serialize to canonical JSON bytes.

    ``pretty`` selects two-space indentation (with a trailing newline) for
    human consumption; the compact form is the canonical one used for
    byte comparisons.
    """
    try:
        validate_document(doc)
    except ValidationError as exc:
        raise SerializationError(f"document violates invariants: {exc}") from None

    payload: dict[str, Any] = {
        "version": doc.version,
        "task": doc.task,
        "elements": [{"name": e.name, "label": e.label} for e in doc.elements],
        "relations": [
            {
                "from": _instance_payload(r.source),
                "to": _instance_payload(r.target),
                "chi_square": _round6(r.chi_square),
                "p_value": _round6(r.p_value),
                "cramers_v": _round6(r.cramers_v),
                "residual": _round6(r.residual),
                "support": r.support,
                "support_ratio": _round6(r.support_ratio),
            }
            for r in doc.relations
        ],
        "contexts": [
            {
                "instances": [_instance_payload(i) for i in c.instances],
                "joint_support": c.joint_support,
                "joint_support_ratio": _round6(c.joint_support_ratio),
            }
            for c in doc.contexts
        ],
        "warnings": [{"code": w.code, "message": w.message} for w in doc.warnings],
    }
    if pretty:
        text = json.dumps(payload, ensure_ascii=False, indent=2) + "\n"
    else:
        text = json.dumps(payload, ensure_ascii=False, separators=(",", ":"))
    return text.encode("utf-8")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOP_FIELDS = {"version", "task", "elements", "relations", "contexts", "warnings"}
_RELATION_FIELDS = {
    "from", "to", "chi_square", "p_value", "cramers_v",
    "residual", "support", "support_ratio",
}
_CONTEXT_FIELDS = {"instances", "joint_support", "joint_support_ratio"}
_INSTANCE_FIELDS = {"element", "value"}
_ELEMENT_FIELDS = {"name", "label"}
_WARNING_FIELDS = {"code", "message"}


def parse_stc(
    data: bytes | str,
) -> tuple[StandardizedTaskSpecificContexts, list[WarningRecord]]:
    """Parse and validate an STC document.

    Unknown fields anywhere in the document are ignored with a warning so
    newer minor revisions stay readable; an unknown *version* is an error.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"document is not valid UTF-8: {exc.reason}") from None
    else:
        text = data
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", line=exc.lineno) from None

    if not isinstance(raw, dict):
        raise ValidationError("document root must be an object", "$")

    warnings: list[WarningRecord] = []

    def warn_unknown(obj: dict, allowed: set[str], path: str) -> None:
        for key in obj:
            if key not in allowed:
                warnings.append(
                    WarningRecord(
                        "UNKNOWN_FIELD",
                        f"unknown field '{key}' ignored",
                        f"{path}.{key}" if path else key,
                    )
                )

    def require(obj: dict, key: str, path: str) -> Any:
        if key not in obj:
            raise ValidationError(
                "missing required field", f"{path}.{key}" if path else key
            )
        return obj[key]

    def as_str(value: Any, path: str) -> str:
        if not isinstance(value, str):
            raise ValidationError("expected a string", path)
        return value

    def as_int(value: Any, path: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError("expected an integer", path)
        return value

    def as_real(value: Any, path: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError("expected a number", path)
        return float(value)

    def as_list(value: Any, path: str) -> list:
        if not isinstance(value, list):
            raise ValidationError("expected an array", path)
        return value

    def as_obj(value: Any, path: str) -> dict:
        if not isinstance(value, dict):
            raise ValidationError("expected an object", path)
        return value

    def parse_instance(value: Any, path: str) -> ElementInstance:
        obj = as_obj(value, path)
        warn_unknown(obj, _INSTANCE_FIELDS, path)
        element = as_str(require(obj, "element", path), f"{path}.element")
        instance_value = as_str(require(obj, "value", path), f"{path}.value")
        try:
            return ElementInstance(element, instance_value)
        except ValidationError as exc:
            raise ValidationError(str(exc), path) from None

    warn_unknown(raw, _TOP_FIELDS, "")
    version = as_str(require(raw, "version", ""), "version")
    if version != STC_VERSION:
        raise VersionError(f"unsupported document version '{version}'")
    task = as_str(require(raw, "task", ""), "task")

    elements = []
    for i, item in enumerate(as_list(require(raw, "elements", ""), "elements")):
        path = f"elements[{i}]"
        obj = as_obj(item, path)
        warn_unknown(obj, _ELEMENT_FIELDS, path)
        elements.append(
            StcElement(
                name=as_str(require(obj, "name", path), f"{path}.name"),
                label=as_str(require(obj, "label", path), f"{path}.label"),
            )
        )

    relations = []
    for i, item in enumerate(as_list(require(raw, "relations", ""), "relations")):
        path = f"relations[{i}]"
        obj = as_obj(item, path)
        warn_unknown(obj, _RELATION_FIELDS, path)
        try:
            relation = PairwiseRelation(
                source=parse_instance(require(obj, "from", path), f"{path}.from"),
                target=parse_instance(require(obj, "to", path), f"{path}.to"),
                chi_square=as_real(require(obj, "chi_square", path), f"{path}.chi_square"),
                p_value=as_real(require(obj, "p_value", path), f"{path}.p_value"),
                cramers_v=as_real(require(obj, "cramers_v", path), f"{path}.cramers_v"),
                residual=as_real(require(obj, "residual", path), f"{path}.residual"),
                support=as_int(require(obj, "support", path), f"{path}.support"),
                support_ratio=as_real(
                    require(obj, "support_ratio", path), f"{path}.support_ratio"
                ),
            )
        except ValidationError as exc:
            if exc.location is None:
                raise ValidationError(str(exc), path) from None
            raise
        relations.append(relation)

    contexts = []
    for i, item in enumerate(as_list(require(raw, "contexts", ""), "contexts")):
        path = f"contexts[{i}]"
        obj = as_obj(item, path)
        warn_unknown(obj, _CONTEXT_FIELDS, path)
        instances = tuple(
            parse_instance(entry, f"{path}.instances[{j}]")
            for j, entry in enumerate(
                as_list(require(obj, "instances", path), f"{path}.instances")
            )
        )
        try:
            context = ContextPath(
                instances=instances,
                joint_support=as_int(
                    require(obj, "joint_support", path), f"{path}.joint_support"
                ),
                joint_support_ratio=as_real(
                    require(obj, "joint_support_ratio", path),
                    f"{path}.joint_support_ratio",
                ),
            )
        except ValidationError as exc:
            if exc.location is None:
                raise ValidationError(str(exc), path) from None
            raise
        contexts.append(context)

    parsed_warnings = []
    for i, item in enumerate(as_list(require(raw, "warnings", ""), "warnings")):
        path = f"warnings[{i}]"
        obj = as_obj(item, path)
        warn_unknown(obj, _WARNING_FIELDS, path)
        parsed_warnings.append(
            StcWarning(
                code=as_str(require(obj, "code", path), f"{path}.code"),
                message=as_str(require(obj, "message", path), f"{path}.message"),
            )
        )

    doc = StandardizedTaskSpecificContexts(
        version=version,
        task=task,
        elements=tuple(elements),
        relations=tuple(relations),
        contexts=tuple(contexts),
        warnings=tuple(parsed_warnings),
    )
    validate_document(doc)
    return doc, warnings
