"""Input parsing and normalization: metadata CSV, dataset CSV, discretization.

Two files drive the pipeline.  The *metadata* file is a four-column CSV with
header ``entry,name,value,extra`` where each row either declares a contextual
element or sets a processor parameter::

    entry,name,value,extra
    element,location,categorical,
    element,temperature,numeric,4
    param,alpha,0.01,

For ``element`` rows, ``value`` is the datatype (``categorical``, ``numeric``,
``boolean`` or ``excluded``) and ``extra`` is the bin count for numeric
elements.  For ``param`` rows, ``value`` is the parameter value and ``extra``
is unused.  Unknown parameter names warn instead of failing so that metadata
files can carry settings for other consumers.

The *dataset* file is a plain RFC-4180 CSV (UTF-8, LF or CRLF) whose header
names the contextual elements and whose cells are element instances.  Empty
cells are missing values.  Cells are never trimmed or case-folded: instance
values flow through the pipeline byte-identical.

Discretization turns the parsed dataset into the all-categorical form the
association analysis expects: numeric columns become equal-frequency quantile
bins ``BIN_1..BIN_k``, boolean columns normalize to ``TRUE``/``FALSE``, and
excluded, constant-numeric, or too-high-cardinality columns are dropped with
a warning.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Mapping

from .diagnostics import ParseError, ValidationError, WarningRecord


class DataType(Enum):
    CATEGORICAL = "categorical"
    NUMERIC = "numeric"
    BOOLEAN = "boolean"
    EXCLUDED = "excluded"


@dataclass(frozen=True)
class ElementDescriptor:
    """Declares one dataset column: its display label and how to interpret it.

    ``bins`` applies to numeric elements only; ``None`` defers to the
    configured default bin count.
    """

    name: str
    datatype: DataType = DataType.CATEGORICAL
    label: str | None = None
    bins: int | None = None

    def __post_init__(self):
        if not self.name:
            raise ValidationError("element name must be non-empty")
        if not self.label:
            object.__setattr__(self, "label", self.name)
        if self.bins is not None and self.bins < 2:
            raise ValidationError(
                f"element '{self.name}' requests {self.bins} bins; at least 2 required"
            )


@dataclass(frozen=True)
class ProcessorConfig:
    """Thresholds and guards for the association analysis.

    Every field has a default so an empty metadata file is a valid
    configuration.  ``bins`` is the default quantile-bin count for numeric
    elements whose descriptor does not set one explicitly.
    """

    alpha: float = 0.05
    min_effect_size: float = 0.1
    residual_threshold: float = 1.96
    min_pair_support: int = 5
    min_path_support: int = 1
    max_instances: int = 50
    max_path_length: int = 10
    bins: int = 3

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0.0 <= self.min_effect_size <= 1.0:
            raise ValidationError(
                f"min_effect_size must be in [0, 1], got {self.min_effect_size}"
            )
        if not self.residual_threshold > 0.0:
            raise ValidationError(
                f"residual_threshold must be positive, got {self.residual_threshold}"
            )
        if self.min_pair_support < 0:
            raise ValidationError(
                f"min_pair_support must be non-negative, got {self.min_pair_support}"
            )
        if self.min_path_support < 0:
            raise ValidationError(
                f"min_path_support must be non-negative, got {self.min_path_support}"
            )
        if self.max_instances < 1:
            raise ValidationError(
                f"max_instances must be positive, got {self.max_instances}"
            )
        if self.max_path_length < 1:
            raise ValidationError(
                f"max_path_length must be positive, got {self.max_path_length}"
            )
        if self.bins < 2:
            raise ValidationError(f"bins must be at least 2, got {self.bins}")


# parameter name -> (python type, config field); names match metadata rows,
# CLI flags (hyphenated) and service query parameters one-to-one.
CONFIG_PARAMS: dict[str, type] = {
    "alpha": float,
    "min_effect_size": float,
    "residual_threshold": float,
    "min_pair_support": int,
    "min_path_support": int,
    "max_instances": int,
    "max_path_length": int,
    "bins": int,
}


def parse_param_value(name: str, raw: str) -> float | int:
    """Parse one configuration value from text; unknown names fail."""
    if name not in CONFIG_PARAMS:
        raise ValidationError(f"unknown parameter '{name}'")
    typ = CONFIG_PARAMS[name]
    try:
        value = typ(raw)
    except (TypeError, ValueError):
        raise ValidationError(
            f"parameter '{name}' expects {typ.__name__}, got '{raw}'"
        ) from None
    if typ is float and not math.isfinite(value):
        raise ValidationError(f"parameter '{name}' must be finite, got '{raw}'")
    return value


def apply_config_overrides(
    config: ProcessorConfig, overrides: Mapping[str, str] | None
) -> ProcessorConfig:
    """Return a copy of ``config`` with the given raw string values applied."""
    if not overrides:
        return config
    parsed = {name: parse_param_value(name, raw) for name, raw in overrides.items()}
    return replace(config, **parsed)


@dataclass(frozen=True)
class MetadataSpec:
    """Parsed metadata file: element descriptors plus processor parameters."""

    elements: tuple[ElementDescriptor, ...]
    config: ProcessorConfig = field(default_factory=ProcessorConfig)

    def descriptor(self, name: str) -> ElementDescriptor | None:
        for descriptor in self.elements:
            if descriptor.name == name:
                return descriptor
        return None


@dataclass(frozen=True, order=True)
class ElementInstance:
    """A concrete value of a contextual element, e.g. location = WORK."""

    element: str
    value: str

    def __post_init__(self):
        if not self.element or not self.value:
            raise ValidationError(
                f"element instance needs non-empty element and value, "
                f"got ({self.element!r}, {self.value!r})"
            )

    def __str__(self) -> str:
        return f"{self.element} = {self.value}"


@dataclass(frozen=True)
class ContextualDataset:
    """Observations of one user task: columns are elements, cells instances.

    Storage is column-oriented; ``None`` cells are missing.  Row views are
    available through :meth:`iter_rows`.
    """

    task_name: str
    columns: tuple[str, ...]
    cells: dict[str, tuple[str | None, ...]]
    row_count: int

    def column(self, name: str) -> tuple[str | None, ...]:
        if name not in self.cells:
            raise ValidationError(f"dataset has no column '{name}'")
        return self.cells[name]

    def iter_rows(self) -> Iterator[dict[str, str | None]]:
        series = [self.cells[c] for c in self.columns]
        for values in zip(*series):
            yield dict(zip(self.columns, values))

    def distinct_values(self, name: str) -> tuple[str, ...]:
        """Sorted distinct non-missing values of one column."""
        return tuple(sorted({v for v in self.column(name) if v is not None}))

    def to_csv(self) -> str:
        """Serialize back to RFC-4180 CSV (LF line endings, trailing newline)."""
        lines = [",".join(_csv_quote(c) for c in self.columns)]
        series = [self.cells[c] for c in self.columns]
        for values in zip(*series):
            lines.append(
                ",".join("" if v is None else _csv_quote(v) for v in values)
            )
        return "\n".join(lines) + "\n"


def _csv_quote(field_text: str) -> str:
    if any(ch in field_text for ch in ',"\n\r'):
        return '"' + field_text.replace('"', '""') + '"'
    return field_text


# ---------------------------------------------------------------------------
# CSV reading
#
# The stdlib csv module silently tolerates unbalanced quotes, so a small
# RFC-4180 reader is used instead: it reports the physical line of every
# malformation and keeps a fast splitting path for quote-free input (the
# overwhelmingly common case for sensor exports).
# ---------------------------------------------------------------------------


def _decode(data: bytes | str) -> str:
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc.reason}") from None
    else:
        text = data
    if text.startswith("﻿"):
        text = text[1:]
    return text


def _csv_records(text: str) -> list[tuple[int, list[str]]]:
    """Split CSV text into (first physical line, fields) records."""
    if '"' not in text:
        return _records_unquoted(text)
    return _records_quoted(text)


def _records_unquoted(text: str) -> list[tuple[int, list[str]]]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    records = []
    for number, line in enumerate(lines, start=1):
        if line.endswith("\r"):
            line = line[:-1]
        records.append((number, line.split(",")))
    return records


def _records_quoted(text: str) -> list[tuple[int, list[str]]]:
    records: list[tuple[int, list[str]]] = []
    fields: list[str] = []
    line_no = 1
    record_line = 1
    i = 0
    n = len(text)
    while i < n:
        if text[i] == '"':
            quote_line = line_no
            i += 1
            parts: list[str] = []
            while True:
                j = text.find('"', i)
                if j == -1:
                    raise ParseError("unbalanced quote in quoted field", line=quote_line)
                parts.append(text[i:j])
                line_no += text.count("\n", i, j)
                i = j + 1
                if i < n and text[i] == '"':  # doubled quote = literal quote
                    parts.append('"')
                    i += 1
                    continue
                break
            field_text = "".join(parts)
            if i < n and text[i] == "\r":
                if i + 1 < n and text[i + 1] == "\n":
                    i += 1  # leave the LF for the shared delimiter handling
                else:
                    raise ParseError(
                        "unexpected character after closing quote", line=line_no
                    )
            if i < n and text[i] not in ",\n":
                raise ParseError(
                    "unexpected character after closing quote", line=line_no
                )
        else:
            j = i
            while j < n and text[j] not in ',\n"':
                j += 1
            if j < n and text[j] == '"':
                raise ParseError("stray quote in unquoted field", line=line_no)
            field_text = text[i:j]
            if (j >= n or text[j] == "\n") and field_text.endswith("\r"):
                field_text = field_text[:-1]
            i = j
        fields.append(field_text)
        if i >= n:
            break
        if text[i] == ",":
            i += 1
            if i >= n:  # trailing comma at EOF closes an empty field
                fields.append("")
            continue
        # newline: record complete
        i += 1
        line_no += 1
        records.append((record_line, fields))
        fields = []
        record_line = line_no
    if fields:
        records.append((record_line, fields))
    return records


# ---------------------------------------------------------------------------
# Metadata parsing
# ---------------------------------------------------------------------------

_METADATA_HEADER = ["entry", "name", "value", "extra"]


def parse_metadata(data: bytes | str) -> tuple[MetadataSpec, list[WarningRecord]]:
    """Parse the metadata CSV into descriptors and a fully-defaulted config.

    Unknown parameter names and entry kinds warn and are skipped; structural
    problems (bad header, wrong column count, duplicate elements, invalid
    values) raise.
    """
    text = _decode(data)
    records = _csv_records(text)
    if not records:
        raise ParseError(
            "metadata file is empty; expected header 'entry,name,value,extra'", line=1
        )
    header_line, header = records[0]
    if [h.strip().lower() for h in header] != _METADATA_HEADER:
        raise ParseError(
            "metadata header must be 'entry,name,value,extra'", line=header_line
        )

    descriptors: list[ElementDescriptor] = []
    seen: set[str] = set()
    params: dict[str, float | int] = {}
    warnings: list[WarningRecord] = []

    for line, fields in records[1:]:
        if len(fields) != 4:
            raise ParseError(f"expected 4 fields, found {len(fields)}", line=line)
        entry, name, value, extra = (f.strip() for f in fields)
        if entry == "element":
            if not name:
                raise ValidationError("element name must be non-empty", f"line {line}")
            if name in seen:
                raise ValidationError(f"duplicate element '{name}'", f"line {line}")
            seen.add(name)
            try:
                datatype = DataType(value.lower())
            except ValueError:
                raise ValidationError(
                    f"unknown datatype '{value}' for element '{name}'", f"line {line}"
                ) from None
            bins = None
            if extra:
                if datatype is DataType.NUMERIC:
                    try:
                        bins = int(extra)
                    except ValueError:
                        raise ValidationError(
                            f"bins for element '{name}' must be an integer, got '{extra}'",
                            f"line {line}",
                        ) from None
                else:
                    warnings.append(
                        WarningRecord(
                            "UNUSED_EXTRA",
                            f"extra value '{extra}' ignored for non-numeric element '{name}'",
                            f"line {line}",
                        )
                    )
            try:
                descriptors.append(
                    ElementDescriptor(name=name, datatype=datatype, bins=bins)
                )
            except ValidationError as exc:
                raise ValidationError(str(exc), f"line {line}") from None
        elif entry == "param":
            if name not in CONFIG_PARAMS:
                warnings.append(
                    WarningRecord(
                        "UNKNOWN_PARAM",
                        f"unknown parameter '{name}' ignored",
                        f"line {line}",
                    )
                )
                continue
            try:
                params[name] = parse_param_value(name, value)
            except ValidationError as exc:
                raise ValidationError(str(exc), f"line {line}") from None
        else:
            warnings.append(
                WarningRecord(
                    "UNKNOWN_ENTRY",
                    f"unknown entry kind '{entry}' ignored",
                    f"line {line}",
                )
            )

    config = ProcessorConfig(**params)
    return MetadataSpec(tuple(descriptors), config), warnings


# ---------------------------------------------------------------------------
# Dataset parsing
# ---------------------------------------------------------------------------


def parse_dataset(
    data: bytes | str, metadata: MetadataSpec, task_name: str
) -> tuple[ContextualDataset, MetadataSpec, list[WarningRecord]]:
    """Parse the dataset CSV against an already-parsed metadata spec.

    Returns the dataset, an *effective* metadata spec whose descriptors cover
    every dataset column in column order (columns absent from the metadata
    get an implicit categorical descriptor plus a warning), and the warnings.
    """
    if not task_name:
        raise ValidationError("task name must be non-empty")
    text = _decode(data)
    records = _csv_records(text)
    if not records:
        raise ValidationError("dataset has no data rows")

    header_line, header = records[0]
    columns = tuple(h.strip() for h in header)
    for position, column in enumerate(columns, start=1):
        if not column:
            raise ValidationError(
                f"dataset header has an empty column name at position {position}",
                f"line {header_line}",
            )
    if len(set(columns)) != len(columns):
        duplicates = sorted({c for c in columns if columns.count(c) > 1})
        raise ValidationError(
            f"dataset header repeats column(s): {', '.join(duplicates)}",
            f"line {header_line}",
        )

    body = records[1:]
    if not body:
        raise ValidationError("dataset has no data rows")

    width = len(columns)
    series: list[list[str | None]] = [[] for _ in columns]
    for line, fields in body:
        if len(fields) != width:
            raise ParseError(
                f"expected {width} fields, found {len(fields)}", line=line
            )
        for idx, cell in enumerate(fields):
            series[idx].append(cell if cell != "" else None)

    warnings: list[WarningRecord] = []
    for descriptor in metadata.elements:
        if descriptor.name not in columns:
            raise ValidationError(
                f"metadata element '{descriptor.name}' does not match any dataset column"
            )
    effective: list[ElementDescriptor] = []
    for column in columns:
        descriptor = metadata.descriptor(column)
        if descriptor is None:
            descriptor = ElementDescriptor(name=column)
            warnings.append(
                WarningRecord(
                    "IMPLICIT_ELEMENT",
                    f"column '{column}' is not described in the metadata; "
                    "treated as categorical",
                    column,
                )
            )
        effective.append(descriptor)

    dataset = ContextualDataset(
        task_name=task_name,
        columns=columns,
        cells={c: tuple(v) for c, v in zip(columns, series)},
        row_count=len(body),
    )
    return dataset, MetadataSpec(tuple(effective), metadata.config), warnings


# ---------------------------------------------------------------------------
# Discretization
# ---------------------------------------------------------------------------

_TRUE_TOKENS = {"true", "1", "yes"}
_FALSE_TOKENS = {"false", "0", "no"}


def discretize(
    dataset: ContextualDataset, metadata: MetadataSpec
) -> tuple[ContextualDataset, list[WarningRecord]]:
    """Normalize a parsed dataset into all-categorical, analysis-ready form.

    Numeric columns become equal-frequency quantile bins ``BIN_1..BIN_k``
    with boundary ties always falling into the lower bin; the chosen
    boundaries are reported on the warnings channel.  Boolean columns
    normalize to ``TRUE``/``FALSE``.  Dropped with a warning: constant
    numeric columns (a single bin carries no signal) and columns whose
    distinct-value count exceeds ``max_instances``.  Columns declared
    ``excluded`` are dropped silently.  Categorical columns pass through
    byte-identical.
    """
    config = metadata.config
    warnings: list[WarningRecord] = []
    kept_columns: list[str] = []
    kept_cells: dict[str, tuple[str | None, ...]] = {}

    for column in dataset.columns:
        descriptor = metadata.descriptor(column)
        if descriptor is None:
            raise ValidationError(f"no descriptor for dataset column '{column}'")
        values = dataset.cells[column]

        if descriptor.datatype is DataType.EXCLUDED:
            continue
        if descriptor.datatype is DataType.NUMERIC:
            binned = _bin_numeric(column, values, descriptor.bins or config.bins, warnings)
            if binned is None:
                continue
            values = binned
        elif descriptor.datatype is DataType.BOOLEAN:
            values = _normalize_boolean(column, values)

        distinct = {v for v in values if v is not None}
        if len(distinct) > config.max_instances:
            warnings.append(
                WarningRecord(
                    "HIGH_CARDINALITY",
                    f"column '{column}' has {len(distinct)} distinct values "
                    f"(limit {config.max_instances}); excluded from analysis",
                    column,
                )
            )
            continue

        kept_columns.append(column)
        kept_cells[column] = values

    discretized = ContextualDataset(
        task_name=dataset.task_name,
        columns=tuple(kept_columns),
        cells=kept_cells,
        row_count=dataset.row_count,
    )
    return discretized, warnings


def _normalize_boolean(
    column: str, values: tuple[str | None, ...]
) -> tuple[str | None, ...]:
    normalized: list[str | None] = []
    for row, value in enumerate(values, start=1):
        if value is None:
            normalized.append(None)
        elif value.lower() in _TRUE_TOKENS:
            normalized.append("TRUE")
        elif value.lower() in _FALSE_TOKENS:
            normalized.append("FALSE")
        else:
            raise ValidationError(
                f"cell '{value}' is not a recognized boolean",
                f"row {row}, column {column}",
            )
    return tuple(normalized)


def _bin_numeric(
    column: str,
    values: tuple[str | None, ...],
    bins: int,
    warnings: list[WarningRecord],
) -> tuple[str | None, ...] | None:
    """Equal-frequency binning; returns None when the column is dropped."""
    numbers: list[float] = []
    for row, value in enumerate(values, start=1):
        if value is None:
            continue
        try:
            number = float(value)
        except ValueError:
            number = math.nan
        if not math.isfinite(number):
            raise ValidationError(
                f"cell '{value}' is not numeric", f"row {row}, column {column}"
            )
        numbers.append(number)

    ordered = sorted(numbers)
    count = len(ordered)
    if count == 0 or ordered[0] == ordered[-1]:
        warnings.append(
            WarningRecord(
                "CONSTANT_ELEMENT",
                f"numeric column '{column}' is constant; excluded from analysis",
                column,
            )
        )
        return None

    # upper boundary of bin i is the i/k quantile taken as an actual data
    # value; assignment below is "first bin whose boundary >= value", which
    # sends boundary ties to the lower bin
    boundaries = [ordered[math.ceil(count * i / bins) - 1] for i in range(1, bins)]

    binned: list[str | None] = []
    used: set[int] = set()
    for value in values:
        if value is None:
            binned.append(None)
            continue
        index = bisect_left(boundaries, float(value)) + 1
        used.add(index)
        binned.append(f"BIN_{index}")

    if len(used) <= 1:
        warnings.append(
            WarningRecord(
                "CONSTANT_ELEMENT",
                f"numeric column '{column}' collapses into a single bin; "
                "excluded from analysis",
                column,
            )
        )
        return None

    pretty = ", ".join(f"{b:.6g}" for b in boundaries)
    warnings.append(
        WarningRecord(
            "BIN_BOUNDARIES",
            f"column '{column}' binned into {bins} quantile bins; "
            f"upper boundaries: [{pretty}]",
            column,
        )
    )
    return tuple(binned)
