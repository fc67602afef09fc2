"""Tests for the experiment CLI: config handling, CSV layers, and verbs."""

import json

import pytest

from ceda2.expcli import (
    ExperimentConfig,
    RunRecord,
    eps_column,
    execute_run,
    load_config,
    main,
    merge_config,
    parse_records,
    run_experiment,
    summarize,
    write_records,
    write_summary,
)


def eda_record(problem="study/elliptic-d5", seed=0, fev=1.0):
    return RunRecord(
        problem=problem, algorithm="eda2", seed=seed, fes_used=2000, fev=fev
    )


def pr_record(problem="cec2013/f4", seed=0, ratios=(1.0, 0.75)):
    return RunRecord(
        problem=problem,
        algorithm="ceda2",
        seed=seed,
        fes_used=3000,
        peak_ratios={"eps-1e-1": ratios[0], "eps-1e-4": ratios[1]},
    )


def stable_lines(path):
    """File content without the leading timestamp comment."""
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# generated ")
    return lines[1:]


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------


def test_accuracy_levels_name_their_columns():
    assert eps_column(1e-1) == "eps-1e-1"
    assert eps_column(1e-5) == "eps-1e-5"
    assert eps_column(0.05) == "eps-0.05"


def test_config_validation_rejects_bad_settings():
    with pytest.raises(ValueError):
        ExperimentConfig(algorithm="simulated-annealing")
    with pytest.raises(ValueError):
        ExperimentConfig(runs=0)
    with pytest.raises(ValueError):
        ExperimentConfig(jobs=0)


def test_config_file_values_are_validated(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"problems": ["cec2013/f1"], "runs": 3}))
    assert load_config(good) == {"problems": ["cec2013/f1"], "runs": 3}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"runz": 3}))
    with pytest.raises(ValueError):
        load_config(bad)


def test_flags_override_file_values_which_override_defaults():
    file_values = {"runs": 5, "base_seed": 10, "algorithm": "eda2"}
    flags = {"base_seed": 99, "out": None}  # None flags must not override
    config = merge_config(file_values, flags)
    assert config.runs == 5
    assert config.base_seed == 99
    assert config.algorithm == "eda2"
    assert config.out == "results"


# ---------------------------------------------------------------------------
# records CSV layer
# ---------------------------------------------------------------------------


def test_records_round_trip_through_csv(tmp_path):
    records = [
        pr_record(seed=1, ratios=(1.0, 0.5)),
        pr_record(seed=2, ratios=(0.75, 0.25)),
    ]
    path = tmp_path / "records.csv"
    write_records(path, records, (1e-1, 1e-4))
    back = parse_records(path)
    assert len(back) == 2
    for original, parsed in zip(records, back):
        assert parsed.problem == original.problem
        assert parsed.algorithm == original.algorithm
        assert parsed.seed == original.seed
        assert parsed.fes_used == original.fes_used
        assert parsed.fev is None
        assert parsed.peak_ratios == original.peak_ratios
        assert parsed.wall_time is None


def test_fev_records_round_trip_and_keep_full_precision(tmp_path):
    records = [eda_record(seed=3, fev=1.2345678901234567e-11)]
    path = tmp_path / "records.csv"
    write_records(path, records, (1e-1, 1e-4))
    back = parse_records(path)
    assert back[0].fev == 1.2345678901234567e-11
    assert back[0].peak_ratios is None


def test_wall_time_is_never_serialized(tmp_path):
    record = eda_record()
    record.wall_time = 123.456
    path = tmp_path / "records.csv"
    write_records(path, [record], (1e-1,))
    assert "123.456" not in path.read_text()


def test_records_file_is_byte_stable_below_the_timestamp(tmp_path):
    records = [pr_record(seed=5)]
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    write_records(first, records, (1e-1, 1e-4))
    write_records(second, records, (1e-1, 1e-4))
    assert stable_lines(first) == stable_lines(second)


# ---------------------------------------------------------------------------
# summaries
# ---------------------------------------------------------------------------


def test_fev_summary_aggregates_per_problem():
    records = [
        eda_record(seed=0, fev=1.0),
        eda_record(seed=1, fev=3.0),
        eda_record(problem="study/rosenbrock-d5", seed=0, fev=10.0),
    ]
    summary = summarize(records)
    assert summary["kind"] == "fev"
    elliptic = summary["rows"]["study/elliptic-d5"]
    assert elliptic["runs"] == 2
    assert elliptic["mean"] == 2.0
    assert elliptic["median"] == 2.0
    assert elliptic["min"] == 1.0
    assert elliptic["max"] == 3.0
    assert summary["average"]["mean"] == 6.0


def test_pr_summary_averages_each_accuracy_column():
    records = [
        pr_record(seed=0, ratios=(1.0, 0.5)),
        pr_record(seed=1, ratios=(0.5, 0.0)),
        pr_record(problem="cec2013/f1", seed=0, ratios=(1.0, 1.0)),
    ]
    summary = summarize(records)
    assert summary["kind"] == "pr"
    assert summary["rows"]["cec2013/f4"]["eps-1e-1"] == 0.75
    assert summary["rows"]["cec2013/f4"]["eps-1e-4"] == 0.25
    assert summary["average"]["eps-1e-1"] == pytest.approx(0.875)


def test_summary_refuses_heterogeneous_record_sets():
    with pytest.raises(ValueError):
        summarize([])
    with pytest.raises(ValueError):
        summarize([eda_record(), pr_record()])
    odd = pr_record(seed=9)
    odd.peak_ratios = {"eps-1e-2": 1.0}
    with pytest.raises(ValueError):
        summarize([pr_record(), odd])
    bare = RunRecord(problem="cec2013/f1", algorithm="ceda2", seed=0, fes_used=10)
    with pytest.raises(ValueError):
        summarize([bare])


def test_summary_csv_uses_fixed_formats(tmp_path):
    summary = summarize([pr_record(seed=0, ratios=(1.0, 1.0 / 3.0))])
    path = tmp_path / "summary.csv"
    write_summary(path, summary)
    lines = stable_lines(path)
    assert lines[0] == "problem,runs,eps-1e-1,eps-1e-4"
    assert lines[1] == "cec2013/f4,1,1.000,0.333"
    assert lines[2] == "Average,,1.000,0.333"


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------


def test_any_record_reproduces_in_isolation(tmp_path):
    config = ExperimentConfig(
        problems=["cec2013/f4"],
        algorithm="ceda2",
        runs=2,
        base_seed=40,
        out=str(tmp_path / "batch"),
        max_fes=3000,
    )
    batch = run_experiment(config)
    single = execute_run("cec2013/f4", 41, config)
    assert batch[1].seed == 41
    assert batch[1].peak_ratios == single.peak_ratios
    assert batch[1].fes_used == single.fes_used


def test_unknown_problem_fails_before_any_run_starts(tmp_path):
    out = tmp_path / "never"
    config = ExperimentConfig(
        problems=["cec2013/f4", "cec2013/f99"], out=str(out), max_fes=500
    )
    with pytest.raises(ValueError):
        run_experiment(config)
    assert not (out / "records.csv").exists()


def test_parallel_jobs_produce_the_same_records_as_serial(tmp_path):
    base = dict(
        problems=["cec2013/f4"],
        algorithm="ceda2",
        runs=2,
        base_seed=60,
        max_fes=2000,
    )
    serial = run_experiment(
        ExperimentConfig(out=str(tmp_path / "serial"), jobs=1, **base)
    )
    parallel = run_experiment(
        ExperimentConfig(out=str(tmp_path / "parallel"), jobs=2, **base)
    )
    assert [r.peak_ratios for r in serial] == [r.peak_ratios for r in parallel]
    assert stable_lines(tmp_path / "serial" / "records.csv") == stable_lines(
        tmp_path / "parallel" / "records.csv"
    )


# ---------------------------------------------------------------------------
# command line verbs
# ---------------------------------------------------------------------------


def test_run_verb_writes_records_and_summary(tmp_path):
    out = tmp_path / "exp"
    code = main(
        [
            "run",
            "--problem",
            "cec2013/f4",
            "--runs",
            "2",
            "--seed",
            "7",
            "--max-fes",
            "2000",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    records = parse_records(out / "records.csv")
    assert [r.seed for r in records] == [7, 8]
    assert all(r.algorithm == "ceda2" for r in records)
    summary_lines = stable_lines(out / "summary.csv")
    assert summary_lines[0].startswith("problem,runs,eps-1e-1")


def test_run_verb_reads_a_config_file_and_flags_win(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "problems": ["cec2013/f1"],
                "algorithm": "eda2",
                "runs": 1,
                "base_seed": 1,
                "max_fes": 1000,
            }
        )
    )
    out = tmp_path / "exp"
    code = main(
        ["run", "--config", str(cfg), "--seed", "5", "--out", str(out)]
    )
    assert code == 0
    records = parse_records(out / "records.csv")
    assert records[0].seed == 5
    assert records[0].algorithm == "eda2"
    assert records[0].fev is not None


def test_eda2_trace_flag_writes_a_generation_log(tmp_path):
    out = tmp_path / "exp"
    code = main(
        [
            "run",
            "--problem",
            "study/elliptic-d5",
            "--algorithm",
            "eda2",
            "--max-fes",
            "1000",
            "--trace",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    records = parse_records(out / "records.csv")
    trace_lines = (tmp_path / records[0].trace).read_text().splitlines()
    assert trace_lines[0] == "generation,fes_used,best_fitness,median_fitness"
    assert len(trace_lines) > 2


def test_demo_cluster_verb_dumps_labeled_points(tmp_path):
    out = tmp_path / "demo"
    code = main(
        ["demo-cluster", "--seed", "15", "--n-init", "400", "--out", str(out)]
    )
    assert code == 0
    records = parse_records(out / "records.csv")
    assert records[0].problem == "cec2013/f5"
    rows = (tmp_path / records[0].trace).read_text().splitlines()
    assert rows[0] == "x0,x1,fitness,delta,label,is_center"
    assert len(rows) == 1 + 140  # the selected 35% of 400
    assert any(row.endswith(",1") for row in rows[1:])


def test_sweep_verb_writes_one_row_per_grid_cell(tmp_path):
    out = tmp_path / "sweep"
    code = main(
        [
            "sweep",
            "--problem",
            "study/elliptic-d5",
            "--runs",
            "1",
            "--seed",
            "3",
            "--max-fes",
            "600",
            "--p-values",
            "20,40",
            "--l-values",
            "0,5",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    lines = stable_lines(out / "sweep.csv")
    assert lines[0] == "problem,p,l,runs,mean_fev,median_fev,min_fev,max_fev"
    assert len(lines) == 1 + 4
    assert lines[1].startswith("study/elliptic-d5,20,0,1,")


def test_report_verb_summarizes_an_existing_records_file(tmp_path, capfd):
    records_path = tmp_path / "records.csv"
    write_records(
        records_path,
        [eda_record(seed=0, fev=2.0), eda_record(seed=1, fev=4.0)],
        (1e-1,),
    )
    code = main(["report", str(records_path)])
    assert code == 0
    printed = capfd.readouterr().out.splitlines()
    assert printed[1] == "problem,runs,mean,median,min,max"
    assert printed[2] == "study/elliptic-d5,2,3,3,2,4"


def test_cli_reports_errors_on_stderr_and_exits_nonzero(tmp_path, capfd):
    code = main(
        ["run", "--problem", "cec2013/f99", "--out", str(tmp_path / "x")]
    )
    assert code == 1
    assert "error:" in capfd.readouterr().err


def test_repeated_runs_byte_reproduce_their_outputs(tmp_path):
    args = [
        "run",
        "--problem",
        "cec2013/f4",
        "--runs",
        "2",
        "--seed",
        "11",
        "--max-fes",
        "2000",
    ]
    assert main(args + ["--out", str(tmp_path / "one")]) == 0
    assert main(args + ["--out", str(tmp_path / "two")]) == 0
    for name in ("records.csv", "summary.csv"):
        assert stable_lines(tmp_path / "one" / name) == stable_lines(
            tmp_path / "two" / name
        )
