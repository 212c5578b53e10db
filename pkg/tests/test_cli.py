import os

import mpmath as mp
import pytest

from refl6v.cli import main, parse_angle



def test_parse_angle():
    with mp.workdps(40):
        assert abs(parse_angle("pi/4", 40) - mp.pi / 4) < mp.mpf(10) ** -38
        assert abs(parse_angle("-pi/8", 40) + mp.pi / 8) < mp.mpf(10) ** -38
        assert abs(parse_angle("3pi/8", 40) - 3 * mp.pi / 8) < mp.mpf(10) ** -38
        assert abs(parse_angle("2*pi/5", 40) - 2 * mp.pi / 5) < mp.mpf(10) ** -38
        assert parse_angle("0.45", 40) == mp.mpf("0.45")
        assert parse_angle("0", 40) == 0
    with pytest.raises(ValueError):
        parse_angle("pie/4")


def test_weights_and_enumerate(capsys):
    assert main(["weights", "--lambda", "pi/4"]) == 0
    out = capsys.readouterr().out
    assert "Delta" in out
    assert main(["enumerate", "--N", "2", "--mode", "brute"]) == 0
    out = capsys.readouterr().out
    assert "configurations: 12" in out


def test_domain_error_exit_code(capsys):
    # mu > lambda puts b(lam - mu) out of the positive regime
    assert main(["enumerate", "--N", "2", "--mu", "0.9", "--lambda", "0.3"]) == 1
    assert "error" in capsys.readouterr().err
    assert main(["enumerate", "--N", "99"]) == 1


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["enumerate", "--bogus-flag"])
    assert exc.value.code == 2


def test_correlations_csv_emission(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["enumerate", "--N", "3", "--correlations", "--emit", "csv",
                 "--outdir", out]) == 0
    path = os.path.join(out, "correlations_N3.csv")
    text = open(path).read()
    assert text.startswith("#")
    assert "# N = 3" in text
    assert "r,H,G,A,D" in text


def test_det_subcommands(capsys, tmp_path):
    assert main(["det", "--N", "3", "--what", "homogeneous", "--mu", "0.2",
                 "--eta", "pi/5", "--xi", "1.2", "--lambda", "0.55"]) == 0
    assert main(["det", "--N", "8", "--what", "hN", "--omega", "0.1"]) == 0
    out = capsys.readouterr().out
    assert "h_rate" in out
    assert main(["det", "--N", "4", "--what", "tau", "--mu", "0.2", "--eta", "pi/5",
                 "--lambda", "0.55", "--emit", "csv", "--outdir", str(tmp_path)]) == 0
    text = open(os.path.join(str(tmp_path), "tau_N4.csv")).read()
    assert "toda_residual" in text


def test_curve_svg(tmp_path, capsys):
    out = str(tmp_path)
    assert main(["curve", "--lambda", "pi/4", "--grid", "24", "--lines", "12",
                 "--emit", "svg,csv", "--outdir", out]) == 0
    svg = open(os.path.join(out, "arctic_curve.svg")).read()
    assert svg.count("<line") >= 10       # the tangent family
    assert "<polyline" in svg             # the analytic semicircle
    assert "<desc>" in svg                # embedded run configuration
    csv_text = open(os.path.join(out, "arctic_curve.csv")).read()
    assert "param,x,y,source" in csv_text


def test_mc_run_deterministic_outputs(tmp_path):
    args = ["mc", "--N", "8", "--sweeps", "2000", "--burn-in", "200", "--thinning", "4",
            "--seed", "5", "--emit", "csv,json,svg"]
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(args + ["--outdir", out1]) == 0
    assert main(args + ["--outdir", out2]) == 0
    for name in ("density_N8.csv", "contour_N8.csv", "mc_run_N8.json", "density_N8.svg"):
        b1 = open(os.path.join(out1, name), "rb").read()
        b2 = open(os.path.join(out2, name), "rb").read()
        assert b1 == b2, name
    assert b"seed" in open(os.path.join(out1, "mc_run_N8.json"), "rb").read()


def test_config_file_defaults(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("lambda = 0.55\nmu = 0.21\neta = pi/5\nxi = 1.2\nmode = brute\n")
    assert main(["--config", str(cfg), "enumerate", "--N", "1"]) == 0
    out = capsys.readouterr().out
    # the configured generic parameters are in force: Z_1 = c sin(2l) kappa_-(mu)
    with mp.workdps(40):
        lam, mu, xi = mp.mpf("0.55"), mp.mpf("0.21"), mp.mpf("1.2")
        expect = mp.sin(2 * mp.pi / 5) * mp.sin(2 * lam) * mp.sin(xi - mu) / mp.sin(xi)
        assert f"{float(expect):.8f}"[:8] in out
    assert "configurations: 2" in out


def test_config_explicit_flags_win(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mu = 0.21\nlambda = 0.3\n")
    assert main(["--config", str(cfg), "enumerate", "--N", "1", "--lambda", "pi/4",
                 "--mu", "0"]) == 0
    out = capsys.readouterr().out
    assert "Z_1 = 1.0 " in out  # special point, config overridden


def test_config_unknown_keys_ignored(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("sweeps = 100\nN = 1\n")
    # 'sweeps' is not an enumerate flag and must not break the run
    assert main(["--config", str(cfg), "enumerate", "--N", "1"]) == 0


def test_bench_runs():
    assert main(["bench", "--N", "8", "--sweeps", "50"]) == 0
