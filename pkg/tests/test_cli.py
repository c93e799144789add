import csv

import numpy as np
import pytest

from sldc.cli import (
    RunConfig,
    config_from_sources,
    convergence_study,
    derive_dtau,
    main,
    read_config_file,
    run,
)
from sldc.grid import read_snapshot
from sldc.scenarios import get_scenario, initial_field


def _tiny(out, **kw):
    base = dict(scenario="landau_strong", n1=32, n2=32, cfl=0.6, tfinal=0.05,
                nodes=2, corrections=1, recon="linear5", out=str(out))
    base.update(kw)
    return RunConfig(**base)


def test_zero_final_time_writes_initial_snapshot(tmp_path):
    config = _tiny(tmp_path / "r0", tfinal=0.0)
    assert run(config) == 0
    snap = tmp_path / "r0" / "snapshot_t0.000000.txt"
    field, t = read_snapshot(snap)
    assert t == 0.0
    f0 = initial_field(get_scenario("landau_strong"), 32, 32)
    np.testing.assert_allclose(field.values, f0.values, atol=1e-15)
    assert (tmp_path / "r0" / "diagnostics.csv").exists()


def test_run_outputs_and_determinism(tmp_path):
    c1 = _tiny(tmp_path / "a", snap=(0.05,))
    c2 = _tiny(tmp_path / "b", snap=(0.05,))
    assert run(c1) == 0
    assert run(c2) == 0
    d1 = (tmp_path / "a" / "diagnostics.csv").read_bytes()
    d2 = (tmp_path / "b" / "diagnostics.csv").read_bytes()
    assert d1 == d2
    s1 = (tmp_path / "a" / "snapshot_t0.050000.txt").read_bytes()
    s2 = (tmp_path / "b" / "snapshot_t0.050000.txt").read_bytes()
    assert s1 == s2
    with open(tmp_path / "a" / "diagnostics.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "time"
    assert len(rows) > 2  # one record per interval plus the initial state
    # mass deviation column stays at round-off
    mass_dev = [abs(float(r[rows[0].index("mass_dev")])) for r in rows[1:]]
    assert max(mass_dev) < 1e-12


def test_config_echo_resolves_defaults(tmp_path):
    config = _tiny(tmp_path / "echo")
    run(config)
    echo = read_config_file(tmp_path / "echo" / "config.txt")
    assert echo["scenario"] == "landau_strong"
    assert echo["recon"] == "linear5"
    assert float(echo["cfl"]) == 0.6


def test_config_file_with_flag_override(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("scenario = landau_strong\nn1 = 16   # comment\nn2 = 16\n"
                    "cfl = 0.4\n")
    config = config_from_sources(read_config_file(path), {"cfl": 0.55})
    assert config.n1 == 16
    assert config.cfl == 0.55


def test_unknown_config_key_rejected():
    with pytest.raises(ValueError):
        config_from_sources({"meshsize": "4"}, {})


def test_converge_single_entry_has_no_order(tmp_path):
    template = _tiny(tmp_path / "c", tfinal=0.02)
    rows = convergence_study(template, [0.6], reference_mode="computed")
    assert len(rows) == 1
    assert rows[0][2] is None
    assert rows[0][1] > 0


def test_derive_dtau_matches_definition():
    f = initial_field(get_scenario("landau_strong"), 32, 32)
    g = f.grid
    from sldc.splitting import vp_field
    emax = np.max(np.abs(vp_field(f).E))
    expected = 0.6 / (2 * np.pi / g.d1 + emax / g.d2)
    assert derive_dtau(f, "vlasov_poisson", 0.6) == pytest.approx(expected)


def test_cli_run_and_stability_subcommands(tmp_path):
    out = tmp_path / "cli"
    rc = main(["run", "--scenario", "landau_strong", "--n1", "16", "--n2", "16",
               "--cfl", "0.5", "--tfinal", "0.02", "--nodes", "2",
               "--corrections", "0", "--recon", "linear3", "--out", str(out)])
    assert rc == 0
    assert (out / "diagnostics.csv").exists()

    rc = main(["stability", "--recon-list", "linear3", "--schemes", "IDC2J1",
               "--lambda-max", "2.0", "--out", str(out)])
    assert rc == 0
    with open(out / "stability.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["scheme", "IDC2J1"]
    assert rows[1][0] == "SL3"
    assert float(rows[1][1]) == pytest.approx(1.50, abs=0.02)


def test_cli_converge_subcommand(tmp_path):
    out = tmp_path / "conv"
    rc = main(["converge", "--scenario", "euler_accuracy", "--n1", "32",
               "--n2", "32", "--tfinal", "0.2", "--corrections", "0",
               "--cfl-list", "0.6,0.3", "--reference", "exact",
               "--out", str(out)])
    assert rc == 0
    with open(out / "convergence.csv") as fh:
        lines = fh.read().splitlines()
    assert lines[0].startswith("#")
    assert lines[1] == "cfl,l1_error,order"
    assert len(lines) == 4


def test_cli_bad_scenario_exits_nonzero(tmp_path, capsys):
    rc = main(["run", "--scenario", "landau_weak", "--out", str(tmp_path)])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_run_reports_numerical_failure(tmp_path):
    # an unstable configuration must fail loudly, not write NaNs silently:
    # IDC3J2 far beyond its CFL bound blows up within a few dozen intervals
    config = _tiny(tmp_path / "boom", cfl=6.0, corrections=2, tfinal=20.0,
                   n1=48, n2=48)
    assert run(config) == 1
    assert (tmp_path / "boom" / "diagnostics.csv").exists()
