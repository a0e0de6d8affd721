import importlib
import math
from pathlib import Path

import numpy as np
import pytest

from bimodal_cqed import hamiltonians as ham
from bimodal_cqed import io
from bimodal_cqed.checks import oracle_equivalence, run_checks
from bimodal_cqed.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main
from bimodal_cqed.protocol import ProtocolConfig, run_protocol
from bimodal_cqed.sweep import SweepSpec, sweep

GOLDEN = Path(__file__).parent / "golden"


class TestConfig:
    def test_parse(self):
        vals = io.parse_config("# run\nvariant = qutrit\nkappa=0.01  # loss\n\nn_max=1\n")
        assert vals == {"variant": "qutrit", "kappa": 0.01, "n_max": 1}

    def test_unknown_key_names_line(self):
        with pytest.raises(io.ConfigError, match=r"line 2: unknown key 'omega_x'"):
            io.parse_config("delta=10\nomega_x=3\n")

    def test_bad_value(self):
        with pytest.raises(io.ConfigError, match="line 1"):
            io.parse_config("kappa=fast")
        with pytest.raises(io.ConfigError):
            io.parse_config("variant=ququart")

    def test_missing_equals(self):
        with pytest.raises(io.ConfigError, match="expected key=value"):
            io.parse_config("kappa 0.1")

    def test_protocol_config(self):
        cfg = io.protocol_config({"variant": "qutrit", "delta": 20.0, "delay": 0.5, "samples": 50})
        assert cfg.params.delta == 20.0
        assert cfg.params.omega_a == pytest.approx(1 + math.sqrt(3))
        assert cfg.resolved_schedule().delay == 0.5
        assert cfg.sample_count == 50

    def test_invalid_physics_is_config_error(self):
        with pytest.raises(io.ConfigError):
            io.protocol_config({"delta": -1.0})

    def test_missing_file(self, tmp_path):
        with pytest.raises(io.ConfigError):
            io.read_config(tmp_path / "nope.cfg")


def test_fmt():
    assert io.fmt(0.0) == "0"
    assert io.fmt(1.0) == "1"
    assert io.fmt(math.pi) == "3.14159265359"
    assert io.fmt(1e-20) == "1e-20"
    assert io.fmt("A") == "A"


@pytest.fixture(scope="module")
def canonical():
    return {v: run_protocol(ProtocolConfig(variant=v)) for v in ("qubit", "qutrit")}


@pytest.mark.parametrize("variant", ["qubit", "qutrit"])
def test_trajectory_csv_deterministic(tmp_path, canonical, variant):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    io.write_trajectory_csv(canonical[variant], a)
    io.write_trajectory_csv(run_protocol(ProtocolConfig(variant=variant)), b)
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("variant", ["qubit", "qutrit"])
def test_trajectory_csv_matches_golden(tmp_path, canonical, variant):
    """Same layout as the stored file; values agree to the last printed digit or so."""
    out = tmp_path / "run.csv"
    io.write_trajectory_csv(canonical[variant], out)
    head, rows = io.read_csv(out)
    g_head, g_rows = io.read_csv(GOLDEN / f"{variant}_effective.csv")
    assert head == g_head == list(io.TRAJECTORY_HEADER)
    assert [r[1] for r in rows] == [r[1] for r in g_rows]
    got = np.array([[r[0]] + r[2:] for r in rows])
    ref = np.array([[r[0]] + r[2:] for r in g_rows])
    np.testing.assert_allclose(got, ref, rtol=1e-10, atol=1e-12)


def test_trajectory_csv_round_trip(tmp_path, canonical):
    res = canonical["qutrit"]
    out = tmp_path / "t.csv"
    io.write_trajectory_csv(res, out)
    assert out.read_bytes().count(b"\r") == 0
    head, rows = io.read_csv(out)
    assert len(rows) == 400 + 2 + 400
    stages = [r[1] for r in rows]
    assert stages[:400] == ["A"] * 400 and stages[400:402] == ["delay"] * 2
    assert rows[0][0] == 0 and rows[-1][0] == pytest.approx(res.schedule.t2 * res.config.params.g_a)
    # final row: spectator 1/3, two transferred branches 1/3 each, no photon
    np.testing.assert_allclose(rows[-1][2:7], [1 / 3, 0, 0, 1 / 3, 1 / 3], atol=1e-9)
    assert rows[-1][7] == pytest.approx(0, abs=1e-12)


def test_qubit_unused_columns_zero(tmp_path, canonical):
    out = tmp_path / "q.csv"
    io.write_trajectory_csv(canonical["qubit"], out)
    _, rows = io.read_csv(out)
    assert all(r[6] == 0 for r in rows)
    assert all(r[5] == 0 and r[6] == 0 for r in rows if r[1] == "A")


def test_qutrit_equal_split_at_t1(tmp_path, canonical):
    out = tmp_path / "q.csv"
    io.write_trajectory_csv(canonical["qutrit"], out)
    _, rows = io.read_csv(out)
    row = min(rows, key=lambda r: abs(r[0] - 3.31947))
    np.testing.assert_allclose(row[2:5], [1 / 3] * 3, atol=1e-4)


def test_sweep_csv(tmp_path):
    rows = sweep(SweepSpec("kappa", 0, 0.1, 3))
    out = tmp_path / "s.csv"
    io.write_sweep_csv(rows, "kappa", out)
    head, data = io.read_csv(out)
    assert head == ["kappa", "P_A", "F_A", "P_B", "F_B"]
    assert [r[0] for r in data] == [0, 0.05, 0.1]


def test_plot_scripts_reference_csv_relatively(tmp_path):
    csv_path = tmp_path / "data" / "run.csv"
    text = io.trajectory_plot_script(csv_path, tmp_path / "plots" / "run.gp", "qutrit")
    assert "'../data/run.csv'" in text
    assert "P'5" in text and "set output 'run.png'" in text
    text = io.sweep_plot_script(csv_path, tmp_path / "data" / "run.gp", "kappa")
    assert "'run.csv'" in text


class TestCli:
    def test_simulate(self, tmp_path, capsys):
        out = tmp_path / "q.csv"
        assert main(["simulate", "--variant", "qubit", "--out", str(out)]) == EXIT_OK
        text = capsys.readouterr().out
        assert "F_B=1" in text or "F_B=0.99999999" in text
        assert "success probability P=1" in text or "P=0.99999999" in text
        assert out.exists() and out.with_suffix(".gp").exists()

    def test_simulate_with_config_and_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("variant=qutrit\nkappa=0.5\nsamples=20\n")
        out = tmp_path / "r.csv"
        assert main(["simulate", "--config", str(cfg), "--kappa", "0", "--out", str(out)]) == EXIT_OK
        _, rows = io.read_csv(out)
        assert len(rows) == 20 + 2 + 20
        assert rows[-1][-1] == pytest.approx(1.0)

    def test_unknown_key_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("omega_x=3\n")
        assert main(["simulate", "--config", str(cfg)]) == EXIT_CONFIG
        assert "omega_x" in capsys.readouterr().err

    def test_bad_flag_value_exit_2(self, capsys):
        assert main(["simulate", "--delta", "abc"]) == EXIT_CONFIG

    def test_numerical_failure_exit_1(self, monkeypatch, tmp_path, capsys):
        cli = importlib.import_module("bimodal_cqed.cli")

        def broken(cfg):
            raise RuntimeError("two-photon sector populated")

        monkeypatch.setattr(cli, "run_protocol", broken)
        assert main(["simulate", "--out", str(tmp_path / "x.csv")]) == EXIT_NUMERICAL
        assert "numerical failure" in capsys.readouterr().err

    def test_sweep_writes_header_plus_rows(self, tmp_path):
        out = tmp_path / "k.csv"
        args = ["sweep", "--sweep-param", "kappa", "--sweep-min", "0", "--sweep-max", "0.2",
                "--sweep-steps", "50", "--samples", "20", "--workers", "4", "--out", str(out)]
        assert main(args) == EXIT_OK
        lines = out.read_text().splitlines()
        assert len(lines) == 51
        values = [float(l.split(",")[0]) for l in lines[1:]]
        assert values == sorted(values)
        first = out.read_bytes()
        assert main(args) == EXIT_OK
        assert out.read_bytes() == first

    def test_sweep_bad_range_exit_2(self, tmp_path):
        assert main(["sweep", "--sweep-min", "1", "--sweep-max", "0", "--out", str(tmp_path / "s.csv")]) == EXIT_CONFIG

    def test_diagnose(self, capsys):
        assert main(["diagnose", "--kappa", "0.003467", "--gamma", "0.004667", "--omega-a", "1.4142"]) == EXIT_OK
        text = capsys.readouterr().out
        assert "stage A:" in text and "stage B:" in text
        assert "strong coupling" in text and ": yes" in text

    def test_diagnose_advisory(self, capsys):
        assert main(["diagnose", "--delta", "3"]) == EXIT_OK
        assert "not large" in capsys.readouterr().out


class TestVerify:
    def test_passes_at_tight_tolerance(self, capsys):
        assert main(["verify", "--tolerance", "1e-7", "--draws", "20"]) == EXIT_OK
        assert "checks passed" in capsys.readouterr().out

    def test_detects_sign_error(self, monkeypatch):
        real = ham.stage_a_effective

        def flipped(space, params):
            h = real(space, params)
            off = h - np.diag(np.diag(h))
            return np.diag(np.diag(h)) - off

        monkeypatch.setattr(ham, "stage_a_effective", flipped)
        worst = oracle_equivalence(draws=10)
        assert worst["stage A"] > 1e-2
        failed = [r for r in run_checks(draws=10) if not r.passed]
        assert any("oracle equivalence, stage A" == r.name for r in failed)
        assert main(["verify", "--draws", "10"]) == EXIT_NUMERICAL
