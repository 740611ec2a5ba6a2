import numpy as np

from riccisym.cli import main, parse_config, run_single

GOLD_CFG = """\
# gold family instance
n = 3
phi = "8"
psi = "8 - 4*t^2"
t_max = 0.5
step = 1e-3
"""


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def _read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def test_parse_config_values(tmp_path):
    cfg = parse_config(_write(tmp_path, "a.cfg", GOLD_CFG + 'out = "gold/run"\n'))
    assert cfg.n == 3
    assert cfg.t_max == 0.5
    assert cfg.out == "gold/run"
    assert cfg.phi(0.0) == 8.0
    assert abs(cfg.psi(0.5) - 7.0) < 1e-15


def test_parse_config_rejects_unknown_key(tmp_path):
    path = _write(tmp_path, "a.cfg", "n = 3\nbogus = 1\n")
    assert run_single("solve", str(path)) == 1


def test_parse_config_rejects_bad_expression(tmp_path):
    path = _write(tmp_path, "a.cfg", 'n = 3\nphi = "1 +"\npsi = "1"\nt_max = 1\n')
    assert run_single("solve", str(path)) == 1


def test_solve_gold_writes_outputs(tmp_path, capsys):
    path = _write(tmp_path, "gold.cfg", GOLD_CFG + f'out = "{tmp_path}/gold"\n')
    code = main(["solve", "--config", str(path)])
    assert code == 0
    header, rows = _read_csv(tmp_path / "gold_solution.csv")
    assert header == ["t", "w", "p", "r", "rp", "f", "fp", "res_rr", "res_tt"]
    last = dict(zip(header, map(float, rows[-1])))
    assert abs(last["t"] - 0.5) < 1e-12
    assert abs(last["w"] - 0.5) < 1e-6
    assert abs(last["r"] - 0.5) < 1e-6
    assert abs(last["f"] + 0.25) < 1e-6
    report = (tmp_path / "gold_report.txt").read_text()
    assert "lam1 = 16" in report
    assert "halt: t_end" in report
    # re-reader spot check: emitted rows satisfy the profile invariants
    first = dict(zip(header, map(float, rows[0])))
    assert first["t"] == 0.0 and first["w"] == 0.0 and first["r"] == 0.0
    assert first["f"] == 0.0 and first["rp"] == 1.0
    ts = np.array([float(row[0]) for row in rows])
    rps = np.array([float(row[4]) for row in rows])
    assert np.all(np.diff(ts) > 0)
    assert np.all(rps > 0)


def test_solve_singular_exit_code(tmp_path, capsys):
    cfg = 'n = 3\nphi = "t"\npsi = "t"\nt_max = 1\n' + f'out = "{tmp_path}/s"\n'
    path = _write(tmp_path, "sing.cfg", cfg)
    code = main(["solve", "--config", str(path)])
    assert code == 2
    err = capsys.readouterr().err
    assert "code=2" in err
    assert "singular tensor at t = 0" in err


def test_solve_n2_quadrature(tmp_path):
    cfg = f'n = 2\nphi = "1"\npsi = "1"\nt_max = 1\nout = "{tmp_path}/n2"\n'
    path = _write(tmp_path, "n2.cfg", cfg)
    assert main(["solve", "--config", str(path)]) == 0
    header, rows = _read_csv(tmp_path / "n2_solution.csv")
    last = dict(zip(header, map(float, rows[-1])))
    assert abs(last["t"] - 1.0) < 1e-12
    assert abs(last["w"] - 0.5) < 1e-12


def test_solve_deterministic_output(tmp_path):
    p1 = _write(tmp_path, "a.cfg", GOLD_CFG + f'out = "{tmp_path}/one"\n')
    p2 = _write(tmp_path, "b.cfg", GOLD_CFG + f'out = "{tmp_path}/two"\n')
    assert main(["solve", "--config", str(p1)]) == 0
    assert main(["solve", "--config", str(p2)]) == 0
    assert (tmp_path / "one_solution.csv").read_bytes() == (
        tmp_path / "two_solution.csv"
    ).read_bytes()


def test_analyze_outputs(tmp_path):
    cfg = 'n = 3\nphi = "1"\npsi = "1"\nt_max = 2\n' + f'out = "{tmp_path}/an"\n'
    path = _write(tmp_path, "an.cfg", cfg)
    assert main(["analyze", "--config", str(path)]) == 0
    text = (tmp_path / "an_analysis.txt").read_text()
    assert "folded_saddle" in text
    assert "verdict: global_continuation_expected" in text
    header, rows = _read_csv(tmp_path / "an_fold.csv")
    assert header == ["t", "w_lower", "w_upper"]
    assert float(rows[0][1]) == 0.0 and float(rows[0][2]) == 2.0


def test_portrait_output(tmp_path):
    path = _write(tmp_path, "p.cfg", GOLD_CFG + f'out = "{tmp_path}/p"\n')
    assert main(["portrait", "--config", str(path)]) == 0
    header, rows = _read_csv(tmp_path / "p_portrait.csv")
    assert header == ["branch", "t", "w", "p", "F"]
    branches = {row[0] for row in rows}
    assert branches == {"separatrix", "fold_lower", "fold_upper"}
    # every emitted row sits on the surface
    for row in rows:
        assert abs(float(row[4])) < 1e-9


def test_hypersurface_output(tmp_path):
    cfg = (
        'n = 3\nh = "t"\nr_max = 1\nsamples = 11\n' + f'out = "{tmp_path}/hy"\n'
    )
    path = _write(tmp_path, "h.cfg", cfg)
    assert main(["hypersurface", "--config", str(path)]) == 0
    header, rows = _read_csv(tmp_path / "hy_hypersurface.csv")
    assert header == ["r", "f", "ric_rr", "ric_tt_unit", "h1", "h2", "scalar"]
    last = dict(zip(header, map(float, rows[-1])))
    assert abs(last["f"] - 5.0) < 1e-12
    assert abs(last["ric_rr"] - 1.6) < 1e-12
    assert abs(last["scalar"] - 2.24) < 1e-12


def test_verify_roundtrip(tmp_path):
    src = _write(tmp_path, "g.cfg", GOLD_CFG + f'out = "{tmp_path}/g"\n')
    assert main(["solve", "--config", str(src)]) == 0
    ver = _write(
        tmp_path,
        "v.cfg",
        GOLD_CFG
        + f'out = "{tmp_path}/v"\nprofile = "{tmp_path}/g_solution.csv"\n',
    )
    assert main(["verify", "--config", str(ver)]) == 0
    text = (tmp_path / "v_verify.txt").read_text()
    assert "residual radial" in text


def test_verify_detects_bad_profile(tmp_path, capsys):
    src = _write(tmp_path, "g.cfg", GOLD_CFG + f'out = "{tmp_path}/g"\n')
    assert main(["solve", "--config", str(src)]) == 0
    # verify the gold profile against the wrong tensor
    wrong = GOLD_CFG.replace('phi = "8"', 'phi = "8 + t^2"').replace(
        'psi = "8 - 4*t^2"', 'psi = "8 + t^2"'
    )
    ver = _write(
        tmp_path,
        "v.cfg",
        wrong + f'out = "{tmp_path}/v"\nprofile = "{tmp_path}/g_solution.csv"\n',
    )
    assert main(["verify", "--config", str(ver)]) == 3
    assert "code=3" in capsys.readouterr().err


def test_sweep_runs_directory(tmp_path, capsys):
    sweep = tmp_path / "sweep"
    sweep.mkdir()
    _write(sweep, "one.cfg", GOLD_CFG + f'out = "{tmp_path}/sw_one"\n')
    _write(
        sweep,
        "two.cfg",
        'n = 4\nphi = "12"\npsi = "12 - 8*t^2"\nt_max = 0.5\n'
        + f'out = "{tmp_path}/sw_two"\n',
    )
    code = main(["solve", "--sweep", str(sweep)])
    assert code == 0
    out = capsys.readouterr().out
    assert "one: exit 0" in out
    assert "two: exit 0" in out
    assert (tmp_path / "sw_one_solution.csv").exists()
    assert (tmp_path / "sw_two_solution.csv").exists()


def test_missing_config_argument(capsys):
    assert main(["solve"]) == 1
    assert "code=1" in capsys.readouterr().err
