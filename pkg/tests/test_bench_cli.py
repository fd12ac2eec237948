"""Sweep harness records/emission and the command-line surface."""

import csv
import json

import numpy as np
import pytest

import drstack.cli as cli
from drstack.bench import (
    ExperimentConfig,
    ExperimentRecord,
    emit_plot,
    emit_results,
    parse_results,
    preset,
    run_sweep,
    summarize,
)


def small_cfg(**over):
    base = dict(family="inspection", method="dr_algorithm1", sweep_var="p",
                sweep_values=[1, 2], family_params={"s": 3, "q": 1, "k": 1},
                repetitions=2, time_limit=60.0, seed=0)
    base.update(over)
    return ExperimentConfig(**base)


class TestRunSweep:
    def test_record_count(self):
        records = run_sweep(small_cfg())
        assert len(records) == 4
        assert {(r.sweep_value, r.seed) for r in records} == {(1, 0), (1, 1), (2, 0), (2, 1)}
        assert all(r.status == "ok" for r in records)

    def test_theta_sweep_monotone_per_seed(self):
        cfg = ExperimentConfig(family="synthetic", method="dr_mip_finite",
                               sweep_var="theta", sweep_values=[0.0, 0.5, 1.0],
                               family_params={"n": 3, "m": 3, "k": 2},
                               repetitions=3, time_limit=60.0, seed=1)
        records = run_sweep(cfg)
        by_seed = {}
        for r in records:
            by_seed.setdefault(r.seed, {})[r.sweep_value] = r.objective
        for seed, vals in by_seed.items():
            seq = [vals[t] for t in (0.0, 0.5, 1.0)]
            assert seq[0] >= seq[1] - 1e-6 >= seq[2] - 2e-6

    def test_bayesian_dominates_dr_on_same_instances(self):
        common = dict(family="synthetic", sweep_var="k", sweep_values=[2],
                      family_params={"n": 3, "m": 3}, repetitions=3,
                      time_limit=60.0, seed=2)
        dr = run_sweep(ExperimentConfig(method="dr_mip_finite", **common))
        bay = run_sweep(ExperimentConfig(method="bayesian", **common))
        for a, b in zip(sorted(dr, key=lambda r: r.seed),
                        sorted(bay, key=lambda r: r.seed)):
            assert b.objective >= a.objective - 1e-6

    def test_errors_are_captured_not_raised(self):
        cfg = small_cfg(family_params={"s": 3, "q": 1, "k": 1},
                        sweep_values=[1, 99])    # p = 99 > s is invalid
        records = run_sweep(cfg)
        statuses = {r.sweep_value: r.status for r in records}
        assert statuses[99] == "error"
        assert statuses[1] == "ok"

    def test_reproducible_objectives(self):
        a = run_sweep(small_cfg(method="dr_mip_finite"))
        b = run_sweep(small_cfg(method="dr_mip_finite"))
        assert [r.objective for r in a] == [r.objective for r in b]


class TestEmit:
    def one_record(self):
        return ExperimentRecord("synthetic", "bayesian", "k", 2.0, 7, "ok",
                                0.5, 0.01, None)

    def test_csv_two_lines(self, tmp_path):
        path = tmp_path / "r.csv"
        emit_results([self.one_record()], "csv", path)
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 2
        assert lines[0] == "family,method,sweep_var,sweep_value,seed,status,objective,wall_time_s,iterations"

    def test_csv_round_trip(self, tmp_path):
        records = run_sweep(small_cfg(method="bayesian"))
        path = tmp_path / "r.csv"
        emit_results(records, "csv", path)
        back = parse_results(path)
        assert back == records

    def test_json_round_trip(self, tmp_path):
        records = run_sweep(small_cfg(method="enum_lp"))
        path = tmp_path / "r.json"
        emit_results(records, "json", path)
        with open(path) as fh:
            doc = json.load(fh)
        assert isinstance(doc, list) and len(doc) == len(records)
        assert parse_results(path) == records

    def test_empty_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_results([], "csv", tmp_path / "no.csv")

    def test_svg_plot(self, tmp_path):
        records = run_sweep(small_cfg(method="bayesian"))
        path = tmp_path / "p.svg"
        emit_plot(records, path, title="demo")
        text = path.read_text()
        assert text.startswith("<svg") and "polyline" in text

    def test_summarize_fields(self):
        records = run_sweep(small_cfg(method="bayesian"))
        rows = summarize(records)
        assert [r["sweep_value"] for r in rows] == [1, 2]
        assert all(r["runs"] == 2 for r in rows)


class TestPresets:
    def test_all_presets_construct(self):
        from drstack.bench import PRESET_NAMES
        for name in PRESET_NAMES:
            cfg = preset(name, scale=0.5, repetitions=2)
            assert cfg.sweep_values and cfg.repetitions == 2


class TestCli:
    def test_gen_solve_round_trip(self, tmp_path):
        game_path = tmp_path / "g.json"
        sol_path = tmp_path / "s.json"
        assert cli.main(["gen", "--family", "synthetic", "--n", "2", "--m", "2",
                         "--k", "2", "--seed", "3", "--out", str(game_path)]) == 0
        assert cli.main(["solve", "--game", str(game_path), "--method", "dr_mip_finite",
                         "--theta", "0.1", "--out", str(sol_path)]) == 0
        doc = json.loads(sol_path.read_text())
        assert set(doc) == {"x", "value", "mapping", "lambda", "w", "solver_time_s"}
        assert abs(sum(doc["x"]) - 1.0) <= 1e-6

    def test_solve_restricts_family_universe_to_nominals(self, tmp_path):
        game_path = tmp_path / "g.json"
        sol_path = tmp_path / "s.json"
        cli.main(["gen", "--family", "inspection", "--s", "3", "--p", "1", "--q", "2",
                  "--k", "2", "--seed", "8", "--out", str(game_path)])
        assert cli.main(["solve", "--game", str(game_path), "--method", "bayesian",
                         "--out", str(sol_path)]) == 0
        doc = json.loads(sol_path.read_text())
        assert doc["lambda"] is None and len(doc["mapping"]) == 2

    def test_solve_methods_agree(self, tmp_path):
        game_path = tmp_path / "g.json"
        cli.main(["gen", "--family", "synthetic", "--n", "2", "--m", "2", "--k", "2",
                  "--seed", "4", "--out", str(game_path)])
        values = {}
        for method in ("dr_mip_finite", "dr_enumeration", "enum_lp"):
            out = tmp_path / f"{method}.json"
            cli.main(["solve", "--game", str(game_path), "--method", method,
                      "--theta", "0.2", "--out", str(out)])
            values[method] = json.loads(out.read_text())["value"]
        spread = max(values.values()) - min(values.values())
        assert spread <= 1e-5

    def test_wasserstein_subcommand_with_dumps(self, tmp_path):
        game_path = tmp_path / "g.json"
        cli.main(["gen", "--family", "inspection", "--s", "3", "--p", "1", "--q", "1",
                  "--k", "1", "--seed", "5", "--out", str(game_path)])
        iters = tmp_path / "iters.csv"
        lps = tmp_path / "lps"
        out = tmp_path / "w.json"
        code = cli.main(["wasserstein", "--game", str(game_path), "--theta", "0.1",
                         "--dump-iters", str(iters), "--dump-lp", str(lps),
                         "--out", str(out)])
        assert code == 0
        with open(iters, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert rows and rows[0]["tau"] == "1"
        assert list(lps.glob("*.lp"))
        doc = json.loads(out.read_text())
        assert doc["status"] == "ok"

    def test_wasserstein_on_box_game_with_nominal_file(self, tmp_path):
        rng = np.random.default_rng(6)
        game = {"n": 2, "m": 2,
                "u_l": [float(v) for v in rng.uniform(size=4)],
                "follower": {"kind": "box"}}
        game_path = tmp_path / "box.json"
        game_path.write_text(json.dumps(game))
        nominal = {"weights": [1.0],
                   "support": [[float(v) for v in rng.uniform(size=4)]]}
        nom_path = tmp_path / "nom.json"
        nom_path.write_text(json.dumps(nominal))
        out = tmp_path / "w.json"
        code = cli.main(["wasserstein", "--game", str(game_path), "--theta", "0.5",
                         "--nominal-file", str(nom_path), "--out", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["status"] == "ok" and 0.0 <= doc["value"] <= 1.0

    def test_sweep_with_json_config(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "family": "synthetic", "method": "bayesian", "sweep_var": "k",
            "sweep_values": [1, 2], "family_params": {"n": 2, "m": 2},
            "repetitions": 2, "time_limit": 30.0, "seed": 0,
        }))
        out = tmp_path / "r.csv"
        assert cli.main(["sweep", "--config", str(cfg_path), "--out", str(out)]) == 0
        assert len(parse_results(out)) == 4

    def test_sweep_with_toml_config(self, tmp_path):
        cfg_path = tmp_path / "cfg.toml"
        cfg_path.write_text(
            'family = "synthetic"\nmethod = "bayesian"\nsweep_var = "k"\n'
            'sweep_values = [1, 2]\nrepetitions = 1\ntime_limit = 30.0\nseed = 0\n'
            '[family_params]\nn = 2\nm = 2\n')
        out = tmp_path / "r.json"
        assert cli.main(["sweep", "--config", str(cfg_path), "--format", "json",
                         "--out", str(out)]) == 0
        assert len(parse_results(out)) == 2

    def test_sweep_preset(self, tmp_path):
        out = tmp_path / "r.csv"
        assert cli.main(["sweep", "--preset", "figA2c", "--reps", "1",
                         "--out", str(out)]) == 0
        assert out.exists()
