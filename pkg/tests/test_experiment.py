import numpy as np
import pytest

from moscal.archive import read_points_csv
from moscal.engine import METHODS
from moscal.experiment import (
    EXPECTED_RANK_PRESETS,
    PRESETS,
    ExperimentPlan,
    format_table,
    make_method_config,
    read_results_csv,
    run_experiment,
)
from moscal.instances import generate_instance


@pytest.fixture
def tsp_paths(tmp_path):
    return [str(p) for p in generate_instance("euclidean", tmp_path / "toy", seed=3, n=8)]


def small_plan(tsp_paths, out, **overrides):
    params = dict(
        problem="mstsp",
        instance_paths=tuple(tsp_paths),
        output_dir=str(out),
        generations=1,
        weight_count=6,
        methods=("momsls", "mogls"),
        neighborhood_size=4,
        replications=3,
        seed_base=100,
    )
    params.update(overrides)
    return ExperimentPlan(**params)


def test_parameter_presets_table():
    assert (PRESETS["mstsp2"].generations, PRESETS["mstsp2"].weight_count) == (50, 101)
    assert (PRESETS["mstsp3"].generations, PRESETS["mstsp3"].weight_count) == (5, 3403)
    assert (PRESETS["tspwp"].generations, PRESETS["tspwp"].weight_count) == (17, 301)
    assert (PRESETS["moscp2"].generations, PRESETS["moscp2"].weight_count) == (17, 301)
    assert (PRESETS["moscp3"].generations, PRESETS["moscp3"].weight_count) == (5, 3403)
    assert EXPECTED_RANK_PRESETS["kroab100"] == 10.0
    assert EXPECTED_RANK_PRESETS["clusterab300"] == 5.0
    assert EXPECTED_RANK_PRESETS["euclideanab500"] == 4.0
    assert EXPECTED_RANK_PRESETS["kroabc100"] == 10.0
    assert EXPECTED_RANK_PRESETS["clusterabc300"] == 8.0


def test_make_method_config_weight_budgets():
    random_cfg = make_method_config("mogls", 2, 17, 301)
    assert random_cfg.weight_count == 301 and random_cfg.weight_granularity is None
    uniform_cfg = make_method_config("umogls", 2, 17, 301)
    assert uniform_cfg.weight_granularity == 300
    moead3 = make_method_config("moead", 3, 5, 3403)
    assert moead3.weight_granularity == 81
    with pytest.raises(ValueError):
        make_method_config("moead", 3, 5, 3404)  # not a lattice count for J=3
    same = [
        make_method_config(m, 2, 17, 301).total_iterations() for m in METHODS
    ]
    assert len(set(same)) == 1


def test_plan_validation(tsp_paths, tmp_path):
    plan = small_plan(tsp_paths, tmp_path / "out")
    assert plan.n_objectives == 2
    assert plan.instance_name == "toy_obj1"
    with pytest.raises(ValueError, match="unknown problem"):
        small_plan(tsp_paths, tmp_path / "o", problem="knapsack")
    with pytest.raises(ValueError, match="methods"):
        small_plan(tsp_paths, tmp_path / "o", methods=())
    with pytest.raises(ValueError, match="duplicate"):
        small_plan(tsp_paths, tmp_path / "o", methods=("mogls", "mogls"))
    with pytest.raises(ValueError, match="replications"):
        small_plan(tsp_paths, tmp_path / "o", replications=0)
    with pytest.raises(ValueError, match="not found"):
        small_plan((tsp_paths[0], str(tmp_path / "missing.tsp")), tmp_path / "o")


def test_run_experiment_records_and_files(tsp_paths, tmp_path):
    plan = small_plan(tsp_paths, tmp_path / "out")
    outcome = run_experiment(plan)
    assert not outcome.failures
    assert len(outcome.records) == 6
    assert [(r.method, r.seed) for r in outcome.records] == [
        ("mogls", 100),
        ("mogls", 101),
        ("mogls", 102),
        ("momsls", 100),
        ("momsls", 101),
        ("momsls", 102),
    ]
    for rec in outcome.records:
        assert rec.iteration_count == 6 * 2
        assert np.isfinite(rec.R) and np.isfinite(rec.HV)
        archived = read_points_csv(
            outcome.archive_dir / f"{rec.method}_{rec.instance}_{rec.seed}.csv"
        )
        assert archived  # nonempty, parseable round trip
    assert outcome.results_csv.is_file()
    assert outcome.timings_csv.is_file()
    assert outcome.table_csv.is_file()
    assert "method" in outcome.report and "momsls" in outcome.report
    assert "n=3 paired runs, no decision" in outcome.report  # below the n >= 5 floor


def test_run_experiment_deterministic_results_csv(tsp_paths, tmp_path):
    first = run_experiment(small_plan(tsp_paths, tmp_path / "a"))
    second = run_experiment(small_plan(tsp_paths, tmp_path / "b"))
    assert first.results_csv.read_bytes() == second.results_csv.read_bytes()
    assert (
        first.archive_dir.joinpath("mogls_toy_obj1_101.csv").read_bytes()
        == second.archive_dir.joinpath("mogls_toy_obj1_101.csv").read_bytes()
    )


def test_run_experiment_degenerate_plan(tsp_paths, tmp_path):
    plan = small_plan(
        tsp_paths, tmp_path / "out", methods=("momsls",), replications=1
    )
    outcome = run_experiment(plan)
    assert len(outcome.records) == 1
    assert "Wilcoxon" not in outcome.report


def test_run_experiment_all_methods_pairwise_sections(tsp_paths, tmp_path):
    plan = small_plan(
        tsp_paths, tmp_path / "out", methods=METHODS, replications=5
    )
    outcome = run_experiment(plan)
    assert len(outcome.records) == 20
    # 6 method pairs per indicator, two indicators
    assert outcome.report.count(" vs ") == 12
    assert outcome.report.count("Wilcoxon signed-rank on") == 2


def test_run_experiment_records_failures(tsp_paths, tmp_path):
    plan = small_plan(tsp_paths, tmp_path / "out")
    # corrupt the instance after validation: every run then fails honestly
    with open(tsp_paths[0], "w") as fh:
        fh.write("not a number\n")
    outcome = run_experiment(plan)
    assert not outcome.records
    assert len(outcome.failures) == 6
    assert "INCOMPLETE" in outcome.report
    assert outcome.results_csv.read_text().strip() == "method,problem,instance,seed,iterations,R,HV"


def test_run_experiment_parallel_matches_sequential(tsp_paths, tmp_path):
    seq = run_experiment(small_plan(tsp_paths, tmp_path / "seq"))
    par = run_experiment(small_plan(tsp_paths, tmp_path / "par", workers=2))
    assert [(r.method, r.seed, r.R, r.HV) for r in seq.records] == [
        (r.method, r.seed, r.R, r.HV) for r in par.records
    ]
    assert seq.results_csv.read_bytes() == par.results_csv.read_bytes()


def test_results_csv_round_trip(tsp_paths, tmp_path):
    outcome = run_experiment(small_plan(tsp_paths, tmp_path / "out"))
    back = read_results_csv(outcome.results_csv)
    assert len(back) == len(outcome.records)
    for a, b in zip(back, outcome.records):
        assert (a.method, a.instance, a.seed, a.iteration_count) == (
            b.method,
            b.instance,
            b.seed,
            b.iteration_count,
        )
        assert a.R == pytest.approx(b.R, rel=1e-4)
        assert a.HV == pytest.approx(b.HV, rel=1e-4)
    text, rows = format_table(back)
    assert rows[0][:3] == ["instance", "method", "n"]
    assert {row[1] for row in rows[1:]} == {"momsls", "mogls"}
    assert "toy_obj1" in text
