"""Shared test helpers: dataset builders and independent reference
implementations used to cross-check the production code paths.

The reference implementations deliberately avoid the library's tallying and
traversal code: they recount everything from the raw cells with plain
dictionaries and loops.  They share only the arithmetic formulas, which is
what equivalence is supposed to pin down.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter

import numpy as np

from ctxmine import (
    ContextGraph,
    ContextualDataset,
    ElementInstance,
    PairwiseRelation,
    ProcessorConfig,
)
from ctxmine.special import chi_square_sf


def make_dataset(
    columns: dict[str, list[str | None]], task: str = "task"
) -> ContextualDataset:
    names = tuple(columns)
    lengths = {len(v) for v in columns.values()}
    assert len(lengths) == 1, "all columns must have equal length"
    return ContextualDataset(
        task_name=task,
        columns=names,
        cells={name: tuple(values) for name, values in columns.items()},
        row_count=lengths.pop(),
    )


def two_by_two_dataset() -> ContextualDataset:
    """60 rows realizing the joint counts [[10, 20], [20, 10]] for (a, b)."""
    pairs = (
        [("v1", "w1")] * 10
        + [("v1", "w2")] * 20
        + [("v2", "w1")] * 20
        + [("v2", "w2")] * 10
    )
    return make_dataset(
        {"a": [p[0] for p in pairs], "b": [p[1] for p in pairs]}
    )


# ---------------------------------------------------------------------------
# Reference pair analysis
# ---------------------------------------------------------------------------


def naive_analyze_pairs(
    dataset: ContextualDataset, config: ProcessorConfig
) -> list[PairwiseRelation]:
    relations: list[PairwiseRelation] = []
    for a, b in itertools.combinations(sorted(dataset.columns), 2):
        observed = [
            (row[a], row[b])
            for row in dataset.iter_rows()
            if row[a] is not None and row[b] is not None
        ]
        if not observed:
            continue
        a_values = sorted({pair[0] for pair in observed})
        b_values = sorted({pair[1] for pair in observed})
        if len(a_values) < 2 or len(b_values) < 2:
            continue
        n = len(observed)
        joint = Counter(observed)
        margin_a = Counter(pair[0] for pair in observed)
        margin_b = Counter(pair[1] for pair in observed)

        statistic = 0.0
        for va in a_values:
            for vb in b_values:
                e = margin_a[va] * margin_b[vb] / n
                statistic += (joint[(va, vb)] - e) ** 2 / e
        dof = (len(a_values) - 1) * (len(b_values) - 1)
        p_value = chi_square_sf(statistic, dof)
        cramers_v = math.sqrt(
            min(1.0, statistic / (n * min(len(a_values) - 1, len(b_values) - 1)))
        )
        if p_value > config.alpha or cramers_v < config.min_effect_size:
            continue

        for va in a_values:
            for vb in b_values:
                o = joint[(va, vb)]
                e = margin_a[va] * margin_b[vb] / n
                d = (o - e) / math.sqrt(
                    e * (1.0 - margin_a[va] / n) * (1.0 - margin_b[vb] / n)
                )
                if d < config.residual_threshold or o < config.min_pair_support:
                    continue
                one = ElementInstance(a, va)
                two = ElementInstance(b, vb)
                if o / margin_a[va] > o / margin_b[vb]:
                    source, target = one, two
                elif o / margin_b[vb] > o / margin_a[va]:
                    source, target = two, one
                else:
                    source, target = (one, two) if one < two else (two, one)
                relations.append(
                    PairwiseRelation(
                        source=source,
                        target=target,
                        chi_square=statistic,
                        p_value=p_value,
                        cramers_v=cramers_v,
                        residual=d,
                        support=o,
                        support_ratio=o / n,
                    )
                )
    relations.sort(
        key=lambda r: (-r.cramers_v, -r.residual, r.source, r.target)
    )
    return relations


# ---------------------------------------------------------------------------
# Reference path enumeration
# ---------------------------------------------------------------------------


def naive_enumerate_paths(
    graph: ContextGraph, dataset: ContextualDataset, config: ProcessorConfig
) -> dict[tuple[ElementInstance, ...], int]:
    successors: dict[ElementInstance, list[ElementInstance]] = {}
    for edge in graph.edges:
        successors.setdefault(edge.source, []).append(edge.target)

    def support_of(path: list[ElementInstance]) -> int:
        count = 0
        for row in dataset.iter_rows():
            if all(row[i.element] == i.value for i in path):
                count += 1
        return count

    results: dict[tuple[ElementInstance, ...], int] = {}

    def walk(node: ElementInstance | None, path: list[ElementInstance]) -> None:
        children = (
            list(graph.root_children) if node is None else successors.get(node, [])
        )
        blocked = False
        progressed = False
        for child in children:
            if any(child.element == i.element for i in path):
                blocked = True
                continue
            if len(path) + 1 > config.max_path_length:
                blocked = True
                continue
            if support_of(path + [child]) < config.min_path_support:
                blocked = True
                continue
            progressed = True
            walk(child, path + [child])
        if path and (blocked or not progressed):
            results[tuple(path)] = support_of(path)

    walk(None, [])
    return results


# ---------------------------------------------------------------------------
# Numerical-integration oracle for the chi-square tail
# ---------------------------------------------------------------------------


def chi_square_tail_by_integration(statistic: float, dof: int) -> float:
    from scipy.integrate import quad

    half = dof / 2.0
    norm = 2.0**half * math.gamma(half)

    def density(x: float) -> float:
        return x ** (half - 1.0) * math.exp(-x / 2.0) / norm

    value, _ = quad(density, statistic, np.inf, epsabs=1e-10, epsrel=1e-10, limit=300)
    return value


# ---------------------------------------------------------------------------
# Seeded dataset generators
# ---------------------------------------------------------------------------


def random_dataset(
    rng: np.random.Generator,
    rows: int,
    columns: int = 4,
    max_values: int = 3,
    missing_rate: float = 0.05,
    correlated: bool = False,
) -> ContextualDataset:
    """Random categorical dataset; optionally plants one dependency so the
    significance gates see both regimes."""
    names = [f"e{i}" for i in range(columns)]
    cells: dict[str, list[str | None]] = {}
    codes: dict[str, np.ndarray] = {}
    for name in names:
        cardinality = int(rng.integers(2, max_values + 1))
        codes[name] = rng.integers(0, cardinality, size=rows)
    if correlated and columns >= 2:
        strength = float(rng.uniform(0.5, 0.9))
        follow = rng.random(rows) < strength
        codes[names[1]] = np.where(
            (codes[names[0]] == 0) & follow, 0, codes[names[1]]
        )
    for name in names:
        missing = rng.random(rows) < missing_rate
        cells[name] = [
            None if gone else f"v{code}"
            for code, gone in zip(codes[name], missing)
        ]
    return make_dataset(cells)


def planted_dataset(seed: int = 20240817, rows: int = 10_000) -> ContextualDataset:
    """Six elements; B follows A=a1 with probability 0.9, rest uniform."""
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 3, rows)
    b = rng.integers(0, 3, rows)
    coin = rng.random(rows)
    other = rng.integers(1, 3, rows)
    b = np.where(a == 0, np.where(coin < 0.9, 0, other), b)
    cells: dict[str, list[str | None]] = {
        "A": [f"a{v + 1}" for v in a],
        "B": [f"b{v + 1}" for v in b],
    }
    for name in ("C", "D", "E", "F"):
        cells[name] = [f"{name.lower()}{v + 1}" for v in rng.integers(0, 3, rows)]
    return make_dataset(cells, task="planted")


def null_dataset(seed: int = 20240818, rows: int = 10_000) -> ContextualDataset:
    """Six mutually independent uniform elements."""
    rng = np.random.default_rng(seed)
    cells = {
        name: [f"{name.lower()}{v + 1}" for v in rng.integers(0, 3, rows)]
        for name in ("A", "B", "C", "D", "E", "F")
    }
    return make_dataset(cells, task="null")


def random_relations(
    rng: np.random.Generator, max_nodes: int = 12
) -> list[PairwiseRelation]:
    """Random strength-sorted relation list over a small instance pool."""
    element_count = int(rng.integers(2, 5))
    per_element = int(rng.integers(2, 4))
    pool = [
        ElementInstance(f"e{i}", f"v{j}")
        for i in range(element_count)
        for j in range(per_element)
    ][:max_nodes]
    candidates = [
        (s, t) for s in pool for t in pool if s.element != t.element
    ]
    count = int(rng.integers(0, min(len(candidates), 14) + 1))
    picked = rng.choice(len(candidates), size=count, replace=False)
    relations = []
    for index in picked:
        source, target = candidates[int(index)]
        relations.append(
            PairwiseRelation(
                source=source,
                target=target,
                chi_square=float(rng.uniform(0.0, 50.0)),
                p_value=float(rng.uniform(0.0, 0.05)),
                cramers_v=float(rng.uniform(0.1, 1.0)),
                residual=float(rng.uniform(1.96, 8.0)),
                support=int(rng.integers(5, 100)),
                support_ratio=float(rng.uniform(0.01, 1.0)),
            )
        )
    relations.sort(key=lambda r: (-r.cramers_v, -r.residual, r.source, r.target))
    return relations


def binomial_upper_bound(trials: int, p: float, confidence: float = 0.99) -> int:
    """Smallest bound B with P(Binomial(trials, p) > B) <= 1 - confidence."""
    tail_alpha = 1.0 - confidence
    for bound in range(trials + 1):
        tail = sum(
            math.comb(trials, k) * p**k * (1.0 - p) ** (trials - k)
            for k in range(bound + 1, trials + 1)
        )
        if tail <= tail_alpha:
            return bound
    return trials
