import csv
import io
import math
import subprocess
import sys
from pathlib import Path

import pytest

from levy_smile.cli import COMMANDS, run
from levy_smile.implied_vol import bs_call
from oracles.frozen import KOU_CALL_SLOPE_100_110

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def table(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def write(tmp_path, text, name="run.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return path


KOU_DOC = "model: {type: kou, sigma: 0.1, lam: 1.0, p: 0.5, eta1: 10.0, eta2: 5.0}\n"


class TestPrice:
    def test_black_scholes_row(self):
        code, out, _ = invoke("price", "--config", CONFIGS / "black_scholes.yaml",
                              "--tau-count", 2, "--n-paths", 20000)
        assert code == 0
        header, rows = table(out)
        assert header == ["tau", "fourier_value", "fourier_err", "mc_value", "mc_stderr"]
        assert float(rows[0][0]) == 1.0
        assert float(rows[0][1]) == pytest.approx(bs_call(100.0, 125.0, 1.0, 0.2), rel=1e-12)

    def test_cgmy_has_empty_mc_columns(self):
        code, out, err = invoke("price", "--config", CONFIGS / "cgmy.json")
        assert code == 0
        _, rows = table(out)
        assert len(rows) == 4 and all(r[3] == "" and r[4] == "" for r in rows)
        assert "no Monte-Carlo" in err

    def test_tau_zero_rejected(self, tmp_path):
        cfg = write(tmp_path, KOU_DOC + "market: {tau_max: 0.0}\n")
        code, _, err = invoke("price", "--config", cfg)
        assert code == 2 and "tau_max" in err

    def test_rows_descend(self):
        code, out, _ = invoke("price", "--config", CONFIGS / "kou_otm.yaml", "--n-paths", 1000)
        taus = [float(r[0]) for r in table(out)[1]]
        assert code == 0 and taus == sorted(taus, reverse=True) and len(taus) == 5


class TestSlopeCommands:
    def test_slope(self):
        code, out, _ = invoke("slope", "--config", CONFIGS / "kou_otm.yaml")
        header, rows = table(out)
        assert code == 0 and header[3] == "I_c"
        assert float(rows[0][3]) == pytest.approx(KOU_CALL_SLOPE_100_110, rel=1e-9)

    def test_verify_slope_kou(self):
        code, out, err = invoke("verify-slope", "--config", CONFIGS / "kou_otm.yaml")
        _, rows = table(out)
        assert code == 0 and float(rows[-1][0]) == pytest.approx(1e-5)
        assert 0.98 <= float(rows[-1][4]) <= 1.02
        assert "final ratio" in err

    def test_verify_slope_merton_itm(self):
        code, out, _ = invoke("verify-slope", "--config", CONFIGS / "merton_itm.yaml")
        _, rows = table(out)
        assert code == 0 and 0.98 <= float(rows[-1][4]) <= 1.02

    def test_verify_slope_black_scholes_refused(self):
        code, out, err = invoke("verify-slope", "--config", CONFIGS / "black_scholes.yaml")
        assert code == 4 and out == "" and "slope is zero" in err

    def test_atm_is_usage_error(self):
        code, _, err = invoke("verify-slope", "--config", CONFIGS / "kou_otm.yaml", "--strike", 100)
        assert code == 2 and "at-the-money" in err


class TestIVCurve:
    def test_kou_explodes(self):
        code, out, _ = invoke("iv-curve", "--config", CONFIGS / "kou_otm.yaml",
                              "--tau-max", 1e-2, "--tau-count", 3, "--tau-ratio", 100)
        _, rows = table(out)
        assert code == 0
        sigma = [float(r[1]) for r in rows]
        predicted = [float(r[2]) for r in rows]
        assert sigma[-1] > sigma[0] and predicted[-1] > predicted[0]

    def test_degenerate_rows(self):
        code, out, _ = invoke("iv-curve", "--config", CONFIGS / "kou_degenerate.yaml")
        _, rows = table(out)
        assert code == 0 and len(rows) == 3
        assert all(float(r[1]) == 0.0 and r[2] == "" and r[3] == "" for r in rows)


class TestRate:
    def test_indicator_small_run(self):
        code, out, _ = invoke("rate", "--config", CONFIGS / "kou_rate.yaml", "--n-paths", 200000,
                              "--tau-max", 1e-2)
        header, rows = table(out)
        assert code == 0 and header == ["tau", "mc_rate", "integral", "ratio", "mc_rate_stderr"]
        rate, integral, se = float(rows[0][1]), float(rows[0][2]), float(rows[0][4])
        # at tau = 1e-2 the rate is still O(tau) away from the limit; allow that on top of 4 se
        assert abs(rate - integral) <= 4 * se + 0.05 * integral

    def test_call_payoff_matches_slope(self):
        code, out, _ = invoke("rate", "--config", CONFIGS / "kou_otm.yaml", "--payoff", "call",
                              "--tau-max", 1e-3, "--tau-count", 1, "--n-paths", 2_000_000)
        _, rows = table(out)
        assert code == 0
        assert float(rows[0][2]) == pytest.approx(KOU_CALL_SLOPE_100_110, rel=1e-9)
        assert abs(float(rows[0][1]) - float(rows[0][2])) <= 4 * float(rows[0][4]) + 0.02 * float(rows[0][2])

    @pytest.mark.parametrize("payoff", ["indicator:-0.1:0.2", "indicator:0.5:0.5", "indicator:0:1"])
    def test_support_touching_zero_rejected(self, payoff):
        code, _, err = invoke("rate", "--config", CONFIGS / "kou_rate.yaml", "--payoff", payoff)
        assert code == 2 and "payoff" in err

    def test_zero_integral_rejected(self):
        code, _, err = invoke("rate", "--config", CONFIGS / "kou_degenerate.yaml",
                              "--payoff", "indicator:-2:-1")
        assert code == 2 and "0/0" in err

    def test_cgmy_refused(self):
        code, _, _ = invoke("rate", "--config", CONFIGS / "cgmy.json")
        assert code == 4


class TestClassify:
    def test_black_scholes(self):
        code, out, err = invoke("classify", "--config", CONFIGS / "black_scholes.yaml")
        assert code == 0 and "regime: black-scholes-finite(0.2)" in err
        assert table(out)[1][0] == ["regime", "black-scholes-finite"]

    def test_merton_explosion(self):
        code, _, err = invoke("classify", "--config", CONFIGS / "merton_itm.yaml", "--strike", 120)
        assert code == 0 and "regime: explosion(" in err

    def test_degenerate(self):
        code, _, err = invoke("classify", "--config", CONFIGS / "kou_degenerate.yaml")
        assert code == 0 and "regime: degenerate-zero" in err and "support_drift" in err

    def test_atm(self):
        code, _, err = invoke("classify", "--config", CONFIGS / "kou_otm.yaml", "--strike", 100)
        assert code == 2 and "at-the-money" in err


class TestConfigErrors:
    def test_unknown_top_level_key(self, tmp_path):
        code, _, err = invoke("price", "--config", write(tmp_path, KOU_DOC + "extra: 1\n"))
        assert code == 2 and "extra" in err

    def test_unknown_market_key(self, tmp_path):
        code, _, err = invoke("price", "--config", write(tmp_path, KOU_DOC + "market: {spot: 1}\n"))
        assert code == 2 and "market.spot" in err

    def test_bad_model_value(self, tmp_path):
        doc = "model: {type: kou, sigma: 0.1, lam: 1.0, p: 0.5, eta1: 0.9, eta2: 5.0}\n"
        code, _, err = invoke("price", "--config", write(tmp_path, doc))
        assert code == 2 and "eta1" in err

    def test_missing_file(self, tmp_path):
        code, _, _ = invoke("price", "--config", tmp_path / "nope.yaml")
        assert code == 2

    def test_flags_override(self, tmp_path):
        code, out, _ = invoke("slope", "--config", CONFIGS / "kou_otm.yaml", "--s0", 110,
                              "--strike", 100)
        assert code == 0 and float(table(out)[1][0][5]) > 0


class TestDeterminism:
    @pytest.mark.parametrize("command", COMMANDS)
    def test_byte_identical(self, tmp_path, command):
        config = CONFIGS / ("kou_rate.yaml" if command == "rate" else "kou_otm.yaml")
        extra = ["--n-paths", 50000] if command in ("price", "rate") else []
        paths = []
        for i in range(2):
            target = tmp_path / f"{i}.csv"
            code, out, _ = invoke(command, "--config", config, "--out", target, *extra)
            # with --out the summary line goes to standard output instead
            assert code == 0 and out.strip()
            paths.append(target.read_bytes())
        assert paths[0] == paths[1] and len(paths[0]) > 0

    def test_workers_do_not_change_output(self, tmp_path):
        outs = []
        for workers in (1, 3):
            code, out, _ = invoke("price", "--config", CONFIGS / "kou_otm.yaml", "--n-paths", 200000,
                                  "--workers", workers, "--tau-count", 2)
            assert code == 0
            outs.append(out)
        assert outs[0] == outs[1]

    def test_seventeen_digits(self):
        _, out, _ = invoke("slope", "--config", CONFIGS / "kou_otm.yaml")
        value = table(out)[1][0][3]
        assert float(value) == float(format(float(value), ".17g"))
        assert len(value.replace(".", "").lstrip("0")) >= 15


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "levy_smile.cli", "slope", "--config",
                           str(CONFIGS / "kou_otm.yaml")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("s0,strike,k,I_c,err_c,I_p,err_p\n")
    assert not math.isnan(float(proc.stdout.splitlines()[1].split(",")[3]))
