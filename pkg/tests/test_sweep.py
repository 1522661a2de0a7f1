import pytest

from secrecysim.essr import Method
from secrecysim.model import NetworkConfig, regime_check
from secrecysim.opa import Strategy
from secrecysim.sweep import (COLUMNS, SweepKind, SweepSpec, reference_config, parse_range, point_config,
                              preset_jobs, read_csv, run_sweep, sweep_rows)


class TestParseRange:
    def test_inclusive(self):
        kind, vals = parse_range("SnrDb:0:10:2.5")
        assert kind is SweepKind.SNR_DB and vals == (0.0, 2.5, 5.0, 7.5, 10.0)

    def test_float_steps_hit_endpoint(self):
        assert parse_range("fj_distance:0.2:1.2:0.1")[1][-1] == 1.2

    @pytest.mark.parametrize("text", ["SnrDb:0:10", "Power:0:1:1", "SnrDb:a:1:1", "SnrDb:5:1:1", "SnrDb:0:1:0"])
    def test_errors(self, text):
        with pytest.raises(ValueError):
            parse_range(text)


class TestSweepSpec:
    def test_empty_strategies_rejected(self):
        with pytest.raises(ValueError, match="strategy"):
            SweepSpec(SweepKind.SNR_DB, (0.0,), strategies=())

    @pytest.mark.parametrize("kw", [dict(values=()), dict(values=(1.0, 1.0)), dict(methods=()),
                                    dict(methods=(Method.QUADRATURE,)), dict(trials=10),
                                    dict(convention="x"), dict(strategies=("Nope",))])
    def test_invalid(self, kw):
        args = dict(sweep_kind=SweepKind.SNR_DB, values=(0.0, 1.0))
        args.update(kw)
        with pytest.raises(ValueError):
            SweepSpec(**args)

    def test_antenna_counts_integer(self):
        with pytest.raises(ValueError):
            SweepSpec(SweepKind.NUM_FJ_ANTENNAS, (1.0, 2.5))

    def test_analytic_needs_jammer(self):
        spec = SweepSpec(SweepKind.NUM_FJ_ANTENNAS, (0.0, 1.0), methods=(Method.CLOSED_FORM,))
        with pytest.raises(ValueError, match="n_fj >= 1"):
            sweep_rows(spec, NetworkConfig(), threads=1)


class TestRunSweep:
    def test_rows_and_columns(self, tmp_path):
        spec = SweepSpec(SweepKind.SNR_DB, (10.0, 20.0), (Strategy.OPA_NUMERIC, Strategy.EPA),
                         (Method.MONTE_CARLO, Method.ASYMPTOTIC), trials=2000, seed=3)
        out = tmp_path / "s.csv"
        summary = run_sweep(spec, NetworkConfig(), out, threads=1)
        rows = read_csv(out)
        assert summary["rows"] == len(rows) == 2 * (2 + 1)
        assert list(rows[0]) == COLUMNS
        assert out.read_text().startswith("# format_version: 1\n")
        assert [r["method"] for r in rows[:3]] == ["MonteCarlo", "MonteCarlo", "Asymptotic"]
        assert rows[2]["trials"] == "" and rows[0]["trials"] == "2000"

    def test_regime_flags_per_point(self, tmp_path):
        spec = SweepSpec(SweepKind.SNR_DB, (0.0, 30.0), trials=1000)
        out = tmp_path / "r.csv"
        run_sweep(spec, NetworkConfig(), out, threads=1)
        for r in read_csv(out):
            cfg = point_config(SweepKind.SNR_DB, float(r["sweep_value"]), NetworkConfig())
            assert r["regime_flags"] == regime_check(cfg).flags()

    def test_distance_sweep_recomputes_gain(self, tmp_path):
        spec = SweepSpec(SweepKind.FJ_DISTANCE, (0.25, 0.5, 1.0), trials=1000)
        out = tmp_path / "d.csv"
        run_sweep(spec, reference_config(n_bs=16, n_fj=1), out, threads=1)
        assert [float(r["mu_fr"]) for r in read_csv(out)] == pytest.approx([16.0, 4.0, 1.0])

    def test_antenna_sweep(self):
        spec = SweepSpec(SweepKind.NUM_FJ_ANTENNAS, (1.0, 2.0, 4.0), trials=1000)
        rows = sweep_rows(spec, NetworkConfig(), threads=1)
        assert [r[COLUMNS.index("n_fj")] for r in rows] == [1, 2, 4]

    def test_byte_stable(self, tmp_path):
        spec = SweepSpec(SweepKind.SNR_DB, (5.0, 15.0, 25.0), (Strategy.OPA_NUMERIC, Strategy.WOFJ_OPA),
                         trials=3000, seed=9)
        a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
        run_sweep(spec, NetworkConfig(), a, threads=1)
        run_sweep(spec, NetworkConfig(), b, threads=1)
        run_sweep(spec, NetworkConfig(), c, threads=3)
        assert a.read_bytes() == b.read_bytes() == c.read_bytes()

    def test_unwritable(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        spec = SweepSpec(SweepKind.SNR_DB, (5.0,), trials=1000)
        with pytest.raises(OSError):
            run_sweep(spec, NetworkConfig(), blocker / "out.csv", threads=1)


class TestPresets:
    def test_fig2(self):
        (spec, cfg), = preset_jobs("fig2")
        assert (cfg.n_bs, cfg.n_fj, cfg.mu_fr) == (64, 1, pytest.approx(4.0))
        assert spec.values[0] == 0.0 and 40.0 in spec.values
        assert spec.strategies == (Strategy.OPA_NUMERIC, Strategy.EPA, Strategy.WOFJ_OPA)

    def test_fig3(self):
        jobs = preset_jobs("fig3")
        assert [c.n_fj for _, c in jobs] == [4, 8, 16]
        assert all(s.lsma_sinr for s, _ in jobs)

    def test_fig4(self):
        jobs = preset_jobs("fig4")
        assert len(jobs) == 10
        spec, cfg = jobs[0]
        assert spec.sweep_kind is SweepKind.FJ_DISTANCE and cfg.rho_db == pytest.approx(20.0)
        assert 0.5 in spec.values

    def test_unknown(self):
        with pytest.raises(ValueError):
            preset_jobs("fig9")
