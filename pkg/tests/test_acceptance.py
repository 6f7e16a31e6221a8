"""Acceptance suite: one test per shipping criterion, each printing a
PASS/FAIL line (run with ``pytest -s`` to see them live).

Expected values come from independent computations: hand-worked contingency
fixtures, numerical integration of the chi-square density, and naive
reference implementations that recount everything from the raw cells.
"""

from __future__ import annotations

import json
import resource
import time
from contextlib import contextmanager

import numpy as np
import pytest
from fastapi.testclient import TestClient

from ctxmine import (
    ContingencyTable,
    ProcessorConfig,
    adjusted_residuals,
    analyze_pairs,
    build_graph,
    chi_square_independence,
    enumerate_contexts,
    export_dot,
    run_pipeline,
    serialize_stc,
)
from ctxmine import cli
from ctxmine.service import create_app
from ctxmine.special import chi_square_sf

from support import (
    binomial_upper_bound,
    chi_square_tail_by_integration,
    naive_analyze_pairs,
    naive_enumerate_paths,
    null_dataset,
    planted_dataset,
    random_dataset,
    random_relations,
)

HEADER_ONLY_METADATA = "entry,name,value,extra\n"


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"[ACCEPTANCE] FAIL  {name}", flush=True)
        raise
    print(f"[ACCEPTANCE] PASS  {name}", flush=True)


def fixed_table(counts) -> ContingencyTable:
    return ContingencyTable(
        element_a="a",
        element_b="b",
        a_values=tuple(f"v{i + 1}" for i in range(len(counts))),
        b_values=tuple(f"w{j + 1}" for j in range(len(counts[0]))),
        counts=tuple(tuple(row) for row in counts),
        n=sum(sum(row) for row in counts),
    )


def test_statistical_oracle_suite():
    with criterion("statistical oracle suite (chi-square, Cramér's V, residuals)"):
        started = time.perf_counter()

        associated = fixed_table([[10, 20], [20, 10]])
        outcome = chi_square_independence(associated)
        assert outcome.statistic == pytest.approx(6.6667, abs=1e-4)
        assert outcome.effect_size == pytest.approx(0.3333, abs=1e-4)
        grid = adjusted_residuals(associated)
        assert grid[0][0] == pytest.approx(-2.582, abs=1e-4)
        assert grid[0][1] == pytest.approx(+2.582, abs=1e-4)
        assert grid[1][0] == pytest.approx(+2.582, abs=1e-4)
        assert grid[1][1] == pytest.approx(-2.582, abs=1e-4)

        independent = fixed_table([[10, 10], [10, 10]])
        outcome = chi_square_independence(independent)
        assert outcome.statistic == pytest.approx(0.0, abs=1e-4)
        assert outcome.effect_size == pytest.approx(0.0, abs=1e-4)
        assert outcome.p_value == pytest.approx(1.0, abs=1e-4)
        assert adjusted_residuals(independent) == ((0.0, 0.0), (0.0, 0.0))

        perfect = fixed_table([[30, 0], [0, 30]])
        outcome = chi_square_independence(perfect)
        assert outcome.statistic == pytest.approx(60.0, abs=1e-4)
        assert outcome.effect_size == pytest.approx(1.0, abs=1e-4)

        assert time.perf_counter() - started < 1.0


def test_p_value_accuracy_against_numerical_integration():
    with criterion("p-value accuracy vs numerical integration (dof 1, 2, 5, 10)"):
        started = time.perf_counter()
        rng = np.random.default_rng(105)
        for dof in (1, 2, 5, 10):
            statistics = rng.uniform(0.02, 6.0 * dof, size=20)
            for statistic in statistics:
                expected = chi_square_tail_by_integration(float(statistic), dof)
                actual = chi_square_sf(float(statistic), dof)
                assert actual == pytest.approx(expected, abs=1e-6)
        assert time.perf_counter() - started < 1.0


def test_brute_force_equivalence_on_100_random_datasets():
    with criterion("brute-force equivalence of analyze_pairs (100 seeded datasets)"):
        started = time.perf_counter()
        rng = np.random.default_rng(20240820)
        configurations = [
            ProcessorConfig(),
            ProcessorConfig(alpha=0.3, min_effect_size=0.0, min_pair_support=0),
            ProcessorConfig(residual_threshold=1.0, min_effect_size=0.05),
            ProcessorConfig(alpha=0.01, min_pair_support=8),
        ]
        for index in range(100):
            dataset = random_dataset(
                rng,
                rows=int(rng.integers(10, 201)),
                columns=4,
                max_values=3,
                missing_rate=float(rng.choice([0.0, 0.05, 0.15])),
                correlated=index % 2 == 0,
            )
            config = configurations[index % len(configurations)]
            fast, _ = analyze_pairs(dataset, config)
            naive = naive_analyze_pairs(dataset, config)
            assert fast == naive, f"divergence on dataset {index}"
        assert time.perf_counter() - started < 30.0


def test_planted_context_recovery():
    with criterion("planted-context recovery (P(B=b1|A=a1)=0.9, 10,000 rows)"):
        dataset_csv = planted_dataset().to_csv()
        started = time.perf_counter()
        result = run_pipeline(HEADER_ONLY_METADATA, dataset_csv, "planted")
        elapsed = time.perf_counter() - started

        endpoints = {
            frozenset((str(r.source), str(r.target)))
            for r in result.document.relations
        }
        assert frozenset(("A = a1", "B = b1")) in endpoints

        matched = [
            c
            for c in result.document.contexts
            if {"A = a1", "B = b1"} <= {str(i) for i in c.instances}
        ]
        assert matched, "no context contains both planted instances"
        assert elapsed < 5.0


def test_null_model_false_positive_rate():
    with criterion("null-model false positives within 99% binomial bound"):
        dataset = null_dataset()
        # effect-size gate disabled so significance alone decides, which is
        # what the per-pair binomial bound models
        relations, _ = analyze_pairs(
            dataset, ProcessorConfig(min_effect_size=0.0)
        )
        pair_count = len(dataset.columns) * (len(dataset.columns) - 1) // 2
        bound = binomial_upper_bound(pair_count, 0.05, confidence=0.99)
        significant_pairs = {
            tuple(sorted((r.source.element, r.target.element))) for r in relations
        }
        assert len(significant_pairs) <= bound
        assert len(relations) <= bound


def test_coffee_end_to_end(fixtures_dir, tmp_path):
    with criterion("coffee end-to-end: expected path, CLI == service bytes"):
        stc_path = tmp_path / "coffee.json"
        code = cli.main(
            [
                "--dataset", str(fixtures_dir / "coffee_dataset.csv"),
                "--metadata", str(fixtures_dir / "coffee_metadata.csv"),
                "--task", "Prepare a coffee",
                "--out", str(stc_path),
            ]
        )
        assert code == 0
        cli_bytes = stc_path.read_bytes()

        client = TestClient(create_app())
        response = client.post(
            "/api/v1/process",
            files={
                "dataset": (
                    "d.csv", (fixtures_dir / "coffee_dataset.csv").read_bytes(), "text/csv"
                ),
                "metadata": (
                    "m.csv", (fixtures_dir / "coffee_metadata.csv").read_bytes(), "text/csv"
                ),
            },
            data={"task": "Prepare a coffee"},
        )
        assert response.status_code == 200
        assert response.content == cli_bytes

        payload = json.loads(cli_bytes)
        sequences = [
            [f"{i['element']} = {i['value']}" for i in c["instances"]]
            for c in payload["contexts"]
        ]
        assert ["location = WORK", "time = AFTERNOON"] in sequences


def _scale_fixture() -> tuple[str, str]:
    rng = np.random.default_rng(56015)
    rows = 56_000
    columns: list[str] = []
    cells: dict[str, list[str]] = {}
    for i in range(13):
        name = f"e{i:02d}"
        columns.append(name)
        cells[name] = [f"v{v + 1}" for v in rng.integers(0, 4, rows)]
    base = np.array([int(v[1:]) - 1 for v in cells["e00"]])
    follow = rng.random(rows) < 0.7
    dependent = np.where((base == 0) & follow, 0, rng.integers(0, 4, rows))
    cells["e01"] = [f"v{v + 1}" for v in dependent]
    for name in ("m00", "m01"):
        columns.append(name)
        cells[name] = [f"{x:.4f}" for x in rng.normal(50.0, 12.0, rows)]
    lines = [",".join(columns)]
    for values in zip(*[cells[c] for c in columns]):
        lines.append(",".join(values))
    dataset_csv = "\n".join(lines) + "\n"
    metadata_csv = (
        "entry,name,value,extra\n"
        + "".join(f"element,e{i:02d},categorical,\n" for i in range(13))
        + "element,m00,numeric,4\n"
        + "element,m01,numeric,3\n"
    )
    return metadata_csv, dataset_csv


def test_scale_target_56k_rows_15_elements():
    with criterion("scale target: 56,000 x 15 end-to-end < 10 s, < 1 GiB"):
        metadata_csv, dataset_csv = _scale_fixture()
        started = time.perf_counter()
        result = run_pipeline(metadata_csv, dataset_csv, "scale target")
        document = serialize_stc(result.document)
        elapsed = time.perf_counter() - started

        assert document
        assert result.dataset.row_count == 56_000
        assert len(result.dataset.columns) == 15
        assert elapsed < 10.0
        peak_kib = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
        assert peak_kib < 1024 * 1024, f"peak memory {peak_kib / 1024:.0f} MiB"


def test_determinism_across_runs_and_entry_points(fixtures_dir, tmp_path):
    with criterion("determinism: byte-identical STC and DOT everywhere"):
        metadata = (fixtures_dir / "coffee_metadata.csv").read_bytes()
        dataset = (fixtures_dir / "coffee_dataset.csv").read_bytes()

        first = run_pipeline(metadata, dataset, "Prepare a coffee")
        second = run_pipeline(metadata, dataset, "Prepare a coffee")
        assert serialize_stc(first.document) == serialize_stc(second.document)
        assert export_dot(first.graph) == export_dot(second.graph)

        stc_golden = (fixtures_dir / "coffee.stc.json").read_bytes()
        dot_golden = (fixtures_dir / "coffee.dot").read_bytes()
        assert serialize_stc(first.document) == stc_golden
        assert export_dot(first.graph).encode() == dot_golden

        out = tmp_path / "cli.dot"
        cli.main(
            [
                "--dataset", str(fixtures_dir / "coffee_dataset.csv"),
                "--metadata", str(fixtures_dir / "coffee_metadata.csv"),
                "--task", "Prepare a coffee",
                "--format", "dot",
                "--out", str(out),
            ]
        )
        assert out.read_bytes() == dot_golden

        client = TestClient(create_app())
        response = client.post(
            "/api/v1/process",
            files={
                "dataset": ("d.csv", dataset, "text/csv"),
                "metadata": ("m.csv", metadata, "text/csv"),
            },
            data={"task": "Prepare a coffee"},
        )
        assert response.content == stc_golden


def test_graph_properties_on_1000_random_relation_lists():
    with criterion("graph properties: 1,000 seeded builds, brute-force paths"):
        rng = np.random.default_rng(77)
        dataset = random_dataset(rng, rows=40, columns=4, missing_rate=0.05)
        for index in range(1000):
            relations = random_relations(rng)
            graph = build_graph("t", relations)
            assert len(graph.instances) <= 12

            # acyclic: topological peel consumes every node
            indegree = {i: 0 for i in graph.instances}
            successors = {i: [] for i in graph.instances}
            for edge in graph.edges:
                indegree[edge.target] += 1
                successors[edge.source].append(edge.target)
            ready = [i for i, d in indegree.items() if d == 0]
            seen = 0
            while ready:
                node = ready.pop()
                seen += 1
                for target in successors[node]:
                    indegree[target] -= 1
                    if indegree[target] == 0:
                        ready.append(target)
            assert seen == len(graph.instances), "cycle survived construction"

            # with root attachment edges, the root is the only source
            relation_indegree = {i: 0 for i in graph.instances}
            for edge in graph.edges:
                relation_indegree[edge.target] += 1
            orphans = {i for i, d in relation_indegree.items() if d == 0}
            assert orphans == set(graph.root_children)

            # bookkeeping: nothing vanishes
            assert len(graph.edges) + len(graph.rejected_edges) == len(relations)

            config = ProcessorConfig(
                min_path_support=int(rng.integers(0, 3)),
                max_path_length=int(rng.integers(1, 6)),
            )
            fast = {
                p.instances: p.joint_support
                for p in enumerate_contexts(graph, dataset, config)
            }
            assert fast == naive_enumerate_paths(graph, dataset, config)
