"""Pairwise association analysis over categorical element instances.

The first half of the mining strategy: for every unordered pair of contextual
elements, build a contingency table (with pairwise deletion of missing
cells), run a Pearson chi-square independence test with Cramér's V as effect
size, pick out the over-represented instance pairs via adjusted standardized
residuals, and orient each surviving pair by conditional-probability
dominance.  The result is a deterministic, strength-sorted list of directed
instance-level relations.

Only positive residuals produce relations: the model describes contexts in
which the task happens, so under-representation is discarded.  Tables with
low expected counts are flagged but still tested; consumers can discount
them.

Cell-level arithmetic deliberately runs in plain Python floats with row-major
accumulation so results are bit-reproducible against a straightforward
reference implementation.  numpy is used only for the row tally, where counts
are exact integers either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .diagnostics import DegenerateElement, ValidationError, WarningRecord
from .ingest import ContextualDataset, ElementInstance, ProcessorConfig
from .special import chi_square_sf


@dataclass(frozen=True)
class ContingencyTable:
    """Joint counts of two elements' instances after pairwise deletion.

    ``counts[i][j]`` is the number of rows with ``element_a = a_values[i]``
    and ``element_b = b_values[j]``.  Value orderings are lexicographic, and
    every row and column has a positive marginal by construction.
    """

    element_a: str
    element_b: str
    a_values: tuple[str, ...]
    b_values: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]
    n: int

    def row_totals(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.counts)

    def col_totals(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.counts))


@dataclass(frozen=True)
class AssociationTestResult:
    statistic: float
    dof: int
    p_value: float
    effect_size: float
    low_expected_cells: bool


@dataclass(frozen=True)
class InstanceAssociation:
    """An undirected instance-level finding, before orientation."""

    instance_a: ElementInstance
    instance_b: ElementInstance
    residual: float
    support: int


@dataclass(frozen=True)
class PairwiseRelation:
    """A directed association between two instances of different elements.

    ``chi_square``, ``p_value`` and ``cramers_v`` describe the element pair
    the relation came from; ``residual`` and ``support`` describe the
    instance cell itself.  ``support_ratio`` is the joint count over the
    pair's co-observed row count.
    """

    source: ElementInstance
    target: ElementInstance
    chi_square: float
    p_value: float
    cramers_v: float
    residual: float
    support: int
    support_ratio: float

    def __post_init__(self):
        if self.source.element == self.target.element:
            raise ValidationError(
                f"relation endpoints share element '{self.source.element}'"
            )
        if self.support < 0:
            raise ValidationError(f"support must be non-negative, got {self.support}")

    def sort_key(self):
        """Strongest-first ordering: effect size, then residual, then names."""
        return (-self.cramers_v, -self.residual, self.source, self.target)


def build_contingency_table(
    dataset: ContextualDataset, element_a: str, element_b: str
) -> ContingencyTable:
    """Tally the joint distribution of two columns, skipping rows where
    either cell is missing.

    Raises :class:`DegenerateElement` when fewer than two distinct values
    survive deletion in either column.
    """
    values_a = dataset.column(element_a)
    values_b = dataset.column(element_b)

    tally: dict[tuple[str, str], int] = {}
    for va, vb in zip(values_a, values_b):
        if va is None or vb is None:
            continue
        key = (va, vb)
        tally[key] = tally.get(key, 0) + 1

    if not tally:
        raise DegenerateElement(
            f"no co-observations of '{element_a}' and '{element_b}'"
        )
    a_values = tuple(sorted({a for a, _ in tally}))
    b_values = tuple(sorted({b for _, b in tally}))
    if len(a_values) < 2 or len(b_values) < 2:
        raise DegenerateElement(
            f"pair ({element_a}, {element_b}) has a column with fewer than "
            "2 distinct values after deletion"
        )

    counts = tuple(
        tuple(tally.get((a, b), 0) for b in b_values) for a in a_values
    )
    return ContingencyTable(
        element_a=element_a,
        element_b=element_b,
        a_values=a_values,
        b_values=b_values,
        counts=counts,
        n=sum(tally.values()),
    )


def _expected(table: ContingencyTable) -> list[list[float]]:
    rows = table.row_totals()
    cols = table.col_totals()
    assert all(rows) and all(cols), "internal invariant violation: zero marginal"
    n = table.n
    return [[(rt * ct) / n for ct in cols] for rt in rows]


def chi_square_independence(table: ContingencyTable) -> AssociationTestResult:
    """Pearson chi-square test of independence on a contingency table.

    Statistic is the usual sum of squared deviations over expectation;
    effect size is Cramér's V, clamped into [0, 1] against rounding;
    ``low_expected_cells`` flags any expected count below 5.
    """
    shape_rows = len(table.a_values)
    shape_cols = len(table.b_values)
    if table.n <= 0 or shape_rows < 2 or shape_cols < 2:
        raise ValidationError("chi-square test needs a table of at least 2x2")

    expected = _expected(table)
    statistic = 0.0
    low_expected = False
    for i in range(shape_rows):
        observed_row = table.counts[i]
        expected_row = expected[i]
        for j in range(shape_cols):
            e = expected_row[j]
            if e < 5.0:
                low_expected = True
            statistic += (observed_row[j] - e) ** 2 / e

    dof = (shape_rows - 1) * (shape_cols - 1)
    effect = math.sqrt(
        min(1.0, statistic / (table.n * min(shape_rows - 1, shape_cols - 1)))
    )
    return AssociationTestResult(
        statistic=statistic,
        dof=dof,
        p_value=chi_square_sf(statistic, dof),
        effect_size=effect,
        low_expected_cells=low_expected,
    )


def adjusted_residuals(table: ContingencyTable) -> tuple[tuple[float, ...], ...]:
    """Adjusted standardized residual of every cell.

    d_ij = (O_ij - E_ij) / sqrt(E_ij (1 - row_i/n) (1 - col_j/n)); values
    beyond roughly +-2 mark cells that deviate meaningfully from
    independence.
    """
    rows = table.row_totals()
    cols = table.col_totals()
    expected = _expected(table)
    n = table.n
    matrix = []
    for i, observed_row in enumerate(table.counts):
        row = []
        for j, o in enumerate(observed_row):
            e = expected[i][j]
            denominator = math.sqrt(e * (1.0 - rows[i] / n) * (1.0 - cols[j] / n))
            row.append((o - e) / denominator)
        matrix.append(tuple(row))
    return tuple(matrix)


def extract_instance_associations(
    table: ContingencyTable,
    test: AssociationTestResult,
    config: ProcessorConfig,
) -> list[InstanceAssociation]:
    """Instance pairs that drive a significant, non-trivial association.

    Empty when the pair-level test fails either gate (significance or effect
    size).  Otherwise returns the cells whose adjusted residual reaches the
    threshold and whose joint count reaches the minimum support, in row-major
    table order.
    """
    if test.p_value > config.alpha or test.effect_size < config.min_effect_size:
        return []
    residuals = adjusted_residuals(table)
    found = []
    for i, value_a in enumerate(table.a_values):
        for j, value_b in enumerate(table.b_values):
            support = table.counts[i][j]
            d = residuals[i][j]
            if d >= config.residual_threshold and support >= config.min_pair_support:
                found.append(
                    InstanceAssociation(
                        instance_a=ElementInstance(table.element_a, value_a),
                        instance_b=ElementInstance(table.element_b, value_b),
                        residual=d,
                        support=support,
                    )
                )
    return found


def orient_relation(
    a: ElementInstance,
    b: ElementInstance,
    count_a: int,
    count_b: int,
    count_joint: int,
) -> tuple[ElementInstance, ElementInstance]:
    """Order an instance pair so the source better predicts the target.

    Direction is a -> b iff P(b|a) > P(a|b); since the joint count is shared
    this favors the instance with the smaller marginal as source.  Exact ties
    break toward the lexicographically smaller (element, value) pair, so the
    result is independent of argument order.
    """
    assert count_a > 0 and count_b > 0, "internal invariant violation: zero marginal"
    assert count_joint <= min(count_a, count_b)
    p_b_given_a = count_joint / count_a
    p_a_given_b = count_joint / count_b
    if p_b_given_a > p_a_given_b:
        return a, b
    if p_a_given_b > p_b_given_a:
        return b, a
    return (a, b) if a < b else (b, a)


def analyze_pairs(
    dataset: ContextualDataset, config: ProcessorConfig
) -> tuple[list[PairwiseRelation], list[WarningRecord]]:
    """Run the full pairwise chain over every unordered element pair.

    Pairs are visited in lexicographic order; degenerate pairs are skipped
    with a warning.  The returned relations are sorted strongest-first
    (descending Cramér's V, then descending residual, then lexicographic
    endpoints), so equal inputs always produce identical output.
    """
    warnings: list[WarningRecord] = []
    relations: list[PairwiseRelation] = []
    coded = _encode_columns(dataset)

    for element_a, element_b in combinations(sorted(dataset.columns), 2):
        table = _fast_table(coded, element_a, element_b)
        if table is None:
            warnings.append(
                WarningRecord(
                    "DEGENERATE_PAIR",
                    f"pair ({element_a}, {element_b}) skipped: fewer than 2 "
                    "distinct values per column after removing missing cells",
                    f"{element_a},{element_b}",
                )
            )
            continue
        test = chi_square_independence(table)
        associations = extract_instance_associations(table, test, config)
        if not associations:
            continue
        row_totals = table.row_totals()
        col_totals = table.col_totals()
        a_index = {v: i for i, v in enumerate(table.a_values)}
        b_index = {v: i for i, v in enumerate(table.b_values)}
        for assoc in associations:
            source, target = orient_relation(
                assoc.instance_a,
                assoc.instance_b,
                row_totals[a_index[assoc.instance_a.value]],
                col_totals[b_index[assoc.instance_b.value]],
                assoc.support,
            )
            relations.append(
                PairwiseRelation(
                    source=source,
                    target=target,
                    chi_square=test.statistic,
                    p_value=test.p_value,
                    cramers_v=test.effect_size,
                    residual=assoc.residual,
                    support=assoc.support,
                    support_ratio=assoc.support / table.n,
                )
            )

    relations.sort(key=PairwiseRelation.sort_key)
    return relations, warnings


# ---------------------------------------------------------------------------
# Vectorized tallying for analyze_pairs. Produces tables identical to
# build_contingency_table, just without re-scanning the raw cells per pair.
# ---------------------------------------------------------------------------


def _encode_columns(
    dataset: ContextualDataset,
) -> dict[str, tuple[list[str], np.ndarray]]:
    coded = {}
    for column in dataset.columns:
        values = dataset.cells[column]
        distinct = sorted({v for v in values if v is not None})
        index = {v: i for i, v in enumerate(distinct)}
        codes = np.fromiter(
            (index[v] if v is not None else -1 for v in values),
            dtype=np.int32,
            count=len(values),
        )
        coded[column] = (distinct, codes)
    return coded


def _fast_table(
    coded: dict[str, tuple[list[str], np.ndarray]],
    element_a: str,
    element_b: str,
) -> ContingencyTable | None:
    distinct_a, codes_a = coded[element_a]
    distinct_b, codes_b = coded[element_b]
    present = (codes_a >= 0) & (codes_b >= 0)
    n = int(present.sum())
    if n == 0:
        return None
    width = len(distinct_b)
    flat = np.bincount(
        codes_a[present].astype(np.int64) * width + codes_b[present],
        minlength=len(distinct_a) * width,
    )
    grid = flat.reshape(len(distinct_a), width)
    keep_rows = grid.sum(axis=1) > 0
    keep_cols = grid.sum(axis=0) > 0
    a_values = tuple(v for v, keep in zip(distinct_a, keep_rows) if keep)
    b_values = tuple(v for v, keep in zip(distinct_b, keep_cols) if keep)
    if len(a_values) < 2 or len(b_values) < 2:
        return None
    grid = grid[np.ix_(keep_rows, keep_cols)]
    counts = tuple(tuple(int(c) for c in row) for row in grid)
    return ContingencyTable(
        element_a=element_a,
        element_b=element_b,
        a_values=a_values,
        b_values=b_values,
        counts=counts,
        n=n,
    )
