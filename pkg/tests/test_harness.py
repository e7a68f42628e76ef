"""Tests for the benchmark harness, emitters, corpus generator, and CLI."""

import json
import statistics
import subprocess
import sys

import pytest

from qubokit.cli import main as cli_main
from qubokit.encoders import (
    BppInstance,
    McpInstance,
    TspInstance,
    VrpInstance,
    load_instance,
    save_instance,
)
from qubokit.harness import (
    RunConfig,
    RunStats,
    emit_csv,
    emit_json,
    emit_table,
    gen_micro_instances,
    native_optimum,
    run_benchmark,
    stats_from_json,
)


@pytest.fixture(scope="module")
def triangle_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("inst") / "triangle.json"
    inst = McpInstance(
        name="triangle", n=3, edges=((0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0))
    )
    save_instance(inst, path)
    return str(path)


class TestNativeOptimum:
    def test_tsp_four_nodes_min_over_three_tours(self):
        dist = ((0, 2, 9, 4), (2, 0, 3, 9), (9, 3, 0, 5), (4, 9, 5, 0))
        inst = TspInstance(name="t", dist=dist)
        tours = [(0, 1, 2, 3), (0, 1, 3, 2), (0, 2, 1, 3)]
        best = min(
            sum(dist[t[i]][t[(i + 1) % 4]] for i in range(4)) for t in tours
        )
        assert native_optimum(inst) == best

    def test_mcp_k3(self):
        inst = McpInstance(
            name="k3", n=3, edges=((0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0))
        )
        assert native_optimum(inst) == 2.0

    def test_vrp_capacity_respected(self):
        inst = VrpInstance(
            name="v",
            dist=((0, 1, 1), (1, 0, 1), (1, 1, 0)),
            vehicles=2,
            demands=(2.0, 2.0),
            capacity=2.0,
        )
        assert native_optimum(inst) == 4.0  # two separate out-and-back tours

    def test_bpp(self):
        inst = BppInstance(
            name="b", weights=(6.0, 6.0, 6.0, 6.0), capacity=10.0, max_bins=4
        )
        assert native_optimum(inst) == 4.0


class TestRunBenchmark:
    def test_triangle_qhs_all_proven(self, triangle_path):
        cfg = RunConfig(
            instances=(triangle_path,),
            solver="qhs",
            repetitions=10,
            base_seed=3,
        )
        (stats,) = run_benchmark(cfg)
        assert stats.feasible_count == 10
        assert stats.avg == 2.0 and stats.std == 0.0 and stats.median == 2.0
        assert stats.gaps is not None and all(g == 0.0 for g in stats.gaps)

    def test_single_repetition_zero_std(self, triangle_path):
        cfg = RunConfig(instances=(triangle_path,), solver="tabu", repetitions=1)
        (stats,) = run_benchmark(cfg)
        assert stats.std == 0.0

    def test_unknown_solver_immediate_error(self, triangle_path):
        cfg = RunConfig(instances=(triangle_path,), solver="qaoa")
        with pytest.raises(ValueError):
            run_benchmark(cfg)

    def test_unparseable_instance_recorded_and_run_continues(
        self, tmp_path, triangle_path
    ):
        bad = tmp_path / "bad.json"
        bad.write_text("{\"kind\": \"tsp\"}")
        cfg = RunConfig(
            instances=(str(bad), triangle_path),
            solver="tabu",
            repetitions=2,
        )
        stats = run_benchmark(cfg)
        assert stats[0].error is not None
        assert stats[1].error is None and stats[1].feasible_count == 2

    def test_stats_match_recomputation(self, triangle_path):
        cfg = RunConfig(
            instances=(triangle_path,), solver="sa", repetitions=5, base_seed=11
        )
        (stats,) = run_benchmark(cfg)
        feasible = [o for o in stats.objectives if o is not None]
        assert stats.avg == pytest.approx(statistics.fmean(feasible), abs=1e-9)
        assert stats.std == pytest.approx(statistics.pstdev(feasible), abs=1e-9)
        assert stats.median == pytest.approx(statistics.median(feasible), abs=1e-9)
        assert stats.best == min(feasible)

    def test_deterministic_given_seed(self, triangle_path):
        cfg = RunConfig(
            instances=(triangle_path,), solver="kerberos", repetitions=3, base_seed=7
        )
        a = run_benchmark(cfg)
        b = run_benchmark(cfg)
        assert [s.objectives for s in a] == [s.objectives for s in b]


class TestEmission:
    def _stats(self):
        return [
            RunStats.from_objectives(
                "wi4", [6700.0] * 3, wall_times=[0.1, 0.2, 0.3]
            ),
            RunStats.from_objectives(
                "dj8", [2804.5, 2790.0, None], wall_times=[0.1, 0.1, 0.1]
            ),
        ]

    def test_empty_stats_header_only(self):
        assert emit_table([]) == "instance  avg  std  median  best  feasible_count\n"
        assert emit_csv([]) == "instance,avg,std,median,best,feasible_count\n"

    def test_table_number_style(self):
        text = emit_table(self._stats())
        lines = text.splitlines()
        assert lines[1].split() == ["wi4", "6700.0", "0.00", "6700.0", "6700.0", "3"]
        # avg/median one decimal, std two decimals.
        assert lines[2].split() == ["dj8", "2797.2", "7.25", "2797.2", "2790.0", "2"]

    def test_csv_quoting(self):
        stats = [
            RunStats.from_objectives('odd,"name"', [1.0], wall_times=[0.1])
        ]
        text = emit_csv(stats)
        assert '"odd,""name"""' in text

    def test_json_roundtrip_identical(self):
        stats = self._stats()
        back = stats_from_json(emit_json(stats))
        assert back == stats

    def test_json_schema_versioned(self):
        doc = json.loads(emit_json([]))
        assert doc["schema_version"] == 1
        with pytest.raises(ValueError):
            stats_from_json(json.dumps({"schema_version": 99, "stats": []}))


class TestGenMicro:
    def test_manifest_matches_regenerated_enumeration(self, tmp_path):
        manifest_path = gen_micro_instances(20240901, tmp_path)
        manifest = json.loads(manifest_path.read_text())
        assert manifest["seed"] == 20240901
        assert len(manifest["instances"]) >= 8
        kinds = {e["kind"] for e in manifest["instances"]}
        assert kinds == {"tsp", "vrp", "bpp", "mcp"}
        for entry in manifest["instances"]:
            inst = load_instance(tmp_path / entry["file"])
            assert native_optimum(inst) == pytest.approx(entry["optimum"])

    def test_k3_entry_present_with_optimum_two(self, tmp_path):
        gen_micro_instances(1, tmp_path)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        entry = next(e for e in manifest["instances"] if e["name"] == "micro_mcp_3")
        assert entry["optimum"] == 2.0

    def test_deterministic_given_seed(self, tmp_path):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        gen_micro_instances(7, a_dir)
        gen_micro_instances(7, b_dir)
        assert (a_dir / "manifest.json").read_text() == (
            b_dir / "manifest.json"
        ).read_text()


class TestCli:
    def test_gen_micro_and_run_roundtrip(self, tmp_path, capsys):
        out_dir = tmp_path / "micro"
        assert cli_main(["gen-micro", "--seed", "3", "--out", str(out_dir)]) == 0
        capsys.readouterr()
        target = out_dir / "micro_mcp_3.json"
        code = cli_main(
            [
                "run",
                "--instances", str(target),
                "--solver", "tabu",
                "--reps", "2",
                "--seed", "1",
                "--format", "table",
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0].startswith("instance")
        assert "micro_mcp_3" in out

    def test_config_file_with_overrides(self, tmp_path, triangle_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(
            json.dumps(
                {
                    "instances": [triangle_path],
                    "solver": "sa",
                    "repetitions": 2,
                    "base_seed": 5,
                    "output_format": "csv",
                }
            )
        )
        assert cli_main(["run", "--config", str(cfg_path)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("instance,avg")

    def test_strict_exit_code_on_bad_instance(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        code = cli_main(
            [
                "run",
                "--instances", str(bad),
                "--solver", "tabu",
                "--reps", "1",
                "--strict",
            ]
        )
        assert code == 1

    def test_byte_identical_csv_across_runs(self, tmp_path, triangle_path):
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            code = cli_main(
                [
                    "run",
                    "--instances", str(triangle_path),
                    "--solver", "qhs",
                    "--reps", "3",
                    "--seed", "9",
                    "--format", "csv",
                    "--out", str(out),
                ]
            )
            assert code == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_console_script_entrypoint(self):
        proc = subprocess.run(
            [sys.executable, "-m", "qubokit.cli", "--help"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "gen-micro" in proc.stdout
