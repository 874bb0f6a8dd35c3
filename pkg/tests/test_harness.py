import io
import logging
import math

import numpy as np
import pytest

from trotter_lab import harness
from trotter_lab.cli import main, parse_floats, parse_grids, parse_ints
from trotter_lab.hamiltonians import build_xxz_chain, deserialize, neel_state
from trotter_lab.harness import (ExactStateCache, ResultRow, SweepConfig, build_instances,
                                 build_orderings, expected_row_count, instance_seed, read_csv,
                                 run_sweep, summarize, write_csv)
from trotter_lab.orderings import magnitude_ordering
from trotter_lab.simulator import TrotterConfig, exact_evolve, fidelity, trotter_evolve


def mini(**kw):
    base = dict(family="xxz", sizes=(3, 4), deltas=(0.25,), gs=(0.5, 1.5), orders=(1, 2),
                steps=(3, 5), n_random=4, seed=11)
    base.update(kw)
    return SweepConfig(**base)


def csv_text(rows):
    buf = io.StringIO()
    write_csv(rows, buf, include_wall_time=False)
    return buf.getvalue()


class TestConfig:
    def test_full_1d_grid(self):
        cfg = SweepConfig(family="xxz", large=True)
        assert len(build_instances(cfg)) == 18 * 2 * 25
        assert cfg.total_time == 5.0

    def test_desk_cap(self):
        sizes = {h.n_qubits for h in build_instances(SweepConfig(family="xxz"))}
        assert max(sizes) == 14

    def test_2d_grids(self):
        cfg = SweepConfig(family="rect", large=True)
        assert set(cfg.sizes) == {(2, 2), (2, 3), (3, 3), (3, 4), (4, 4), (4, 5)}
        assert len(cfg.hxs) == 11 and cfg.total_time == 1.0
        tri = SweepConfig(family="tri", large=True)
        assert len(tri.alphas) == 27 and tri.alphas[-1] == 0.5
        assert len(build_instances(tri)) == 6 * 27

    @pytest.mark.parametrize("kw", [dict(orders=(4,)), dict(steps=(0,)), dict(family="ladder"),
                                    dict(strategies=("spiral",)), dict(total_time=math.inf)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            mini(**kw)


class TestRowCounts:
    def test_single_row_example(self):
        cfg = SweepConfig(family="xxz", sizes=(3,), deltas=(0.25,), gs=(1.0,),
                          strategies=("magnitude",), orders=(1,), steps=(3,))
        rows = list(run_sweep(cfg))
        assert len(rows) == 1 == expected_row_count(cfg)
        assert rows[0].ordering == "magnitude"

    def test_mini_sweep_matches_closed_form(self):
        cfg = mini()
        rows = list(run_sweep(cfg))
        assert len(rows) == expected_row_count(cfg)
        # per instance: xyz 3! + exact 3! + greedy 3! + handcrafted 3! + 4 singles + 4 random + 2
        assert len(rows) == 4 * (24 + 4 + 6) * 2 * 2

    def test_zero_field_groups(self):
        cfg = mini(gs=(0.0,), sizes=(4,), strategies=("group_evolve",), colorings=("handcrafted",))
        assert expected_row_count(cfg) == 2 * 2 * 2


class TestSweep:
    def test_fidelity_matches_direct_computation(self):
        cfg = mini(sizes=(4,), gs=(1.5,), strategies=("magnitude",), orders=(2,), steps=(5,))
        (row,) = run_sweep(cfg)
        h = build_xxz_chain(4, 0.25, 1.5)
        psi = neel_state(4)
        f = fidelity(exact_evolve(h, 5.0, psi, method="dense"),
                     trotter_evolve(h, magnitude_ordering(h), TrotterConfig(2, 5, 5.0), psi))
        assert row.fidelity == pytest.approx(f, abs=1e-10)
        assert 0 <= row.fidelity <= 1

    def test_deterministic(self):
        assert csv_text(run_sweep(mini())) == csv_text(run_sweep(mini()))

    def test_threads_same_output(self):
        assert csv_text(run_sweep(mini(threads=3))) == csv_text(run_sweep(mini()))

    def test_seed_changes_random_only(self):
        a, b = list(run_sweep(mini())), list(run_sweep(mini(seed=12)))
        for ra, rb in zip(a, b):
            assert ra.ordering == rb.ordering
            if not ra.method.startswith("random"):
                assert ra.fidelity == rb.fidelity

    def test_random_aggregates(self):
        rows = list(run_sweep(mini(sizes=(3,), gs=(0.5,), strategies=("random",),
                                   orders=(1,), steps=(3,))))
        rand = [r.fidelity for r in rows if r.method == "random"]
        agg = {r.ordering: r.fidelity for r in rows if r.method != "random"}
        assert len(rand) == 4
        assert agg["random_mean"] == pytest.approx(np.mean(rand))
        assert agg["random_best"] == max(rand)

    def test_instance_seed_is_content_derived(self):
        h = build_xxz_chain(5, 0.25, 1.0)
        assert instance_seed(0, h) == instance_seed(0, build_xxz_chain(5, 0.25, 1.0))
        assert instance_seed(0, h) != instance_seed(1, h)
        assert instance_seed(0, h) != instance_seed(0, build_xxz_chain(5, 0.25, 1.1))

    def test_exact_cache_reused(self):
        cache = ExactStateCache()
        h = build_xxz_chain(4, 0.25, 1.0)
        psi = neel_state(4)
        a = cache.get(h, 5.0, psi)
        assert cache.get(build_xxz_chain(4, 0.25, 1.0), 5.0, psi) is a
        assert len(cache) == 1

    def test_failing_instance_skipped(self, monkeypatch, caplog):
        real = harness.run_instance

        def flaky(h, cfg, cache=None):
            if h.n_qubits == 3:
                raise RuntimeError("boom")
            return real(h, cfg, cache)

        monkeypatch.setattr(harness, "run_instance", flaky)
        with caplog.at_level(logging.ERROR):
            rows = list(run_sweep(mini(strategies=("magnitude",))))
        assert rows and all(r.n_qubits == 4 for r in rows)
        assert "failed" in caplog.text

    def test_exact_above_cap_skipped(self, caplog):
        cfg = mini(sizes=(5,), gs=(1.0,), strategies=("group_evolve",), exact_cap=10)
        with caplog.at_level(logging.WARNING):
            _, groupings = build_orderings(build_xxz_chain(5, 0.25, 1.0), cfg)
        assert "exact" not in groupings and "xyz" in groupings
        assert "skipping exact" in caplog.text

    def test_groupings_are_proper_and_labelled(self):
        h = build_xxz_chain(5, 0.12, 2.0)
        orderings, groupings = build_orderings(h, mini())
        assert set(groupings) == {"xyz", "exact", "greedy", "handcrafted"}
        labels = [o.label for o in orderings]
        assert "xyz_groups perm 012" in labels and "handcrafted_groups perm 210" in labels
        assert len(labels) == len(set(labels))


class TestCsvAndSummary:
    def test_round_trip(self, tmp_path):
        rows = list(run_sweep(mini(sizes=(3,), gs=(0.5,))))
        path = tmp_path / "r.csv"
        write_csv(rows, path)
        back = read_csv(path)
        assert back == rows

    def test_no_wall_time_column(self):
        text = csv_text(run_sweep(mini(sizes=(3,), gs=(0.5,), strategies=("magnitude",))))
        assert "wall_time" not in text.splitlines()[0]

    def test_single_row_mean(self):
        row = ResultRow("xxz_1d", 3, "", "abc", "magnitude", "magnitude", "", "", 1, 3, 5.0,
                        0.375, 0)
        summary = summarize([row])
        by_steps = [s for s in summary if s["table"] == "by_steps"]
        assert by_steps == [dict(table="by_steps", family="xxz_1d", method="magnitude", order=1,
                                 steps=3, n_qubits="", perm="", value=0.375, count=1)]

    def test_best_perm_is_max(self):
        rows = list(run_sweep(mini(strategies=("group_evolve",), colorings=("xyz",))))
        summary = summarize(rows)
        got = {(s["order"], s["steps"]): s["value"] for s in summary
               if s["table"] == "by_steps" and s["method"] == "xyz_groups best perm"}
        expected = {}
        for key in got:
            per_instance = {}
            for r in rows:
                if (r.order, r.steps) == key:
                    per_instance[r.instance] = max(per_instance.get(r.instance, 0.0), r.fidelity)
            expected[key] = np.mean(list(per_instance.values()))
        assert got.keys() == expected.keys()
        for key in got:
            assert got[key] == pytest.approx(expected[key], abs=1e-15)

    def test_perm_wins_sum_to_one(self):
        rows = list(run_sweep(mini(strategies=("group_evolve",), colorings=("xyz",))))
        wins = [s for s in summarize(rows) if s["table"] == "perm_wins"]
        totals = {}
        for s in wins:
            totals[(s["order"], s["steps"])] = totals.get((s["order"], s["steps"]), 0) + s["value"]
        assert all(v == pytest.approx(1.0) for v in totals.values())

    def test_perm_tie_goes_to_smallest_label(self):
        rows = [ResultRow("xxz_1d", 3, "", "i", f"xyz_groups perm {p}", "xyz_groups", "xyz", p,
                          1, 3, 5.0, 0.5, 0) for p in ("102", "012")]
        (win,) = [s for s in summarize(rows) if s["table"] == "perm_wins"]
        assert win["perm"] == "012"

    def test_random_rows_excluded_from_tables(self):
        rows = list(run_sweep(mini(sizes=(3,), gs=(0.5,), strategies=("random",))))
        methods = {s["method"] for s in summarize(rows)}
        assert methods == {"random_mean", "random_best"}


class TestParsers:
    def test_ints(self):
        assert parse_ints("3..6") == (3, 4, 5, 6)
        assert parse_ints("3,8") == (3, 8)

    def test_floats(self):
        assert parse_floats("0..3/11")[1] == 0.3
        assert parse_floats("0.12,0.25") == (0.12, 0.25)

    def test_grids(self):
        assert parse_grids("2x3,4x4") == ((2, 3), (4, 4))


class TestCli:
    def test_generate_then_run_matches_in_memory(self, tmp_path, capsys):
        hams = tmp_path / "hams"
        assert main(["generate", "--L", "3..4", "--delta", "0.25", "--g", "0.5,1.5",
                     "--out", str(hams)]) == 0
        files = sorted(hams.glob("*.ham"))
        assert len(files) == 4
        out = tmp_path / "r.csv"
        assert main(["run", "--input", *map(str, files), "--steps", "3,5", "--n-random", "4",
                     "--seed", "11", "--no-wall-time", "--out", str(out)]) == 0
        instances = [deserialize(f.read_text()) for f in files]
        assert out.read_text() == csv_text(run_sweep(mini(), instances))

    def test_run_and_summarize(self, tmp_path, capsys):
        out = tmp_path / "r.csv"
        assert main(["run", "--L", "3", "--delta", "0.25", "--g", "1", "--strategies", "magnitude",
                     "--orders", "1", "--steps", "3", "--out", str(out)]) == 0
        assert len(read_csv(out)) == 1
        capsys.readouterr()
        assert main(["summarize", str(out)]) == 0
        text = capsys.readouterr().out
        assert text.startswith("table,family,method")
        assert "by_steps,xxz_1d,magnitude,1,3" in text

    def test_color_handcrafted_zero_field(self, tmp_path, capsys):
        dot = tmp_path / "g.dot"
        assert main(["color", "--method", "handcrafted", "--L", "6", "--delta", "0.25",
                     "--g", "0", "--dot", str(dot)]) == 0
        out = capsys.readouterr().out
        assert "groups=2 proper=True" in out
        assert dot.read_text().startswith("graph commutation {")

    def test_order_listing(self, capsys):
        assert main(["order", "--L", "3", "--delta", "0.25", "--g", "1",
                     "--strategy", "group_evolve"]) == 0
        out = capsys.readouterr().out
        assert out.count("xyz_groups perm") == 6

    def test_threads_from_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TROTTER_LAB_THREADS", "2")
        out = tmp_path / "r.csv"
        assert main(["run", "--L", "3,4", "--delta", "0.25", "--g", "1", "--strategies",
                     "magnitude", "--steps", "3", "--out", str(out), "--no-wall-time"]) == 0
        assert len(read_csv(out)) == 4

    @pytest.mark.parametrize("argv", [
        ["run", "--orders", "3", "--L", "3"],
        ["run", "--L", "30", "--delta", "0.25", "--g", "1"],
        ["run", "--strategies", "spiral", "--L", "3"],
        ["summarize", "/nonexistent/results.csv"],
        ["color", "--family", "rect", "--grid", "2x2", "--hx", "0", "--method", "handcrafted"],
    ])
    def test_errors_exit_nonzero(self, argv, capsys):
        assert main(argv) != 0
        assert "error" in capsys.readouterr().err

    def test_bad_flag_value_exits(self):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--L", "three"])
        assert exc.value.code != 0
