import csv
import io
import json

import pytest

from partfrac.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


class TestZerosSaddles:
    def test_zeros_base(self, capsys):
        code, out = run_cli(capsys, "zeros", "0", "-1", "--bits", "128")
        assert code == 0
        fields = dict(parse_csv(out)[1])
        assert abs(float(fields["re"]) - 0.916198) < 1e-6
        assert abs(float(fields["im"]) + 0.182459) < 1e-6
        assert abs(float(fields["-log|w|"]) - 0.068076) < 1e-6

    def test_zeros_usage_error(self, capsys):
        code, _ = run_cli(capsys, "zeros", "0", "0", "--bits", "96")
        assert code == 2

    def test_saddles(self, capsys):
        code, out = run_cli(capsys, "saddles", "0", "2", "--bits", "128")
        assert code == 0
        fields = dict(parse_csv(out)[1])
        assert abs(float(fields["re"]) - 2.20541) < 1e-5
        assert abs(float(fields["im"]) - 0.345648) < 1e-5
        assert abs(float(fields["Re(-p)"]) - 0.0256706) < 1e-6

    def test_saddles_invalid(self, capsys):
        code, _ = run_cli(capsys, "saddles", "1", "1", "--bits", "96")
        assert code == 2


class TestCoefficients:
    def test_qcoeff_methods_agree(self, capsys):
        _, out1 = run_cli(capsys, "qcoeff", "1", "5", "8", "--method", "exact", "--bits", "128")
        _, out2 = run_cli(capsys, "qcoeff", "1", "5", "8", "--method", "simple", "--bits", "128")
        r1 = parse_csv(out1)[1][0]
        r2 = parse_csv(out2)[1][0]
        assert abs(float(r1[5]) - float(r2[5])) < 1e-25
        assert r1[4] == "exact-recursion" and r2[4] == "simple-pole"

    def test_ccoeff(self, capsys):
        code, out = run_cli(capsys, "ccoeff", "0", "1", "1", "1", "--bits", "96")
        assert code == 0
        row = parse_csv(out)[1][0]
        assert abs(float(row[4]) + 1) < 1e-20

    def test_sums(self, capsys):
        code, out = run_cli(capsys, "sums", "cprime", "--N", "100", "--bits", "128")
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["kind", "sigma", "N", "sum"]
        assert rows[0][0] == "CPRIME"


class TestTableFigure:
    def test_table_row(self, capsys):
        code, out = run_cli(capsys, "table", "1", "--N", "800", "--bits", "224")
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["N", "m=1", "m=2", "m=3", "m=4", "direct"]
        vals = [float(x) for x in rows[0][1:]]
        assert abs(vals[0] - 293.204) < 5e-3
        assert abs(vals[3] - 303.119) < 5e-3
        assert abs(vals[4] - 303.112) < 5e-3

    def test_figure1_values(self, capsys):
        code, out = run_cli(capsys, "figure", "1", "--bits", "96")
        assert code == 0
        _, rows = parse_csv(out)
        data = {int(r[0]): (float(r[1]), float(r[2])) for r in rows}
        assert abs(data[2][0] - 0.061391) < 1e-5
        assert abs(data[50][0] - 0.0612263) < 1e-5
        assert all(psi <= bound for psi, bound in data.values())

    def test_bounds_xi(self, capsys):
        code, out = run_cli(capsys, "bounds", "--K", "101", "--bits", "128")
        assert code == 0
        _, rows = parse_csv(out)
        assert abs(float(rows[0][1]) - 1.00038) < 1e-4
        assert abs(float(rows[0][2]) - 1.01041) < 1e-4

    def test_json_format(self, capsys):
        code, out = run_cli(capsys, "bounds", "--K", "2", "--format", "json", "--bits", "128")
        assert code == 0
        payload = json.loads(out)
        assert payload["precision_bits"] == 128
        assert payload["columns"] == ["K", "xi1", "xi1xi2xi3"]

    def test_out_file(self, capsys, tmp_path):
        dst = tmp_path / "xi.csv"
        code, _ = run_cli(capsys, "bounds", "--K", "2", "--out", str(dst), "--bits", "96")
        assert code == 0
        assert dst.read_text().startswith("K,")


class TestSineprodVerify:
    def test_sineprod(self, capsys):
        code, out = run_cli(capsys, "sineprod", "1", "5", "4", "--bits", "128")
        assert code == 0
        fields = dict(parse_csv(out)[1])
        assert abs(float(fields["product"]) - 5) < 1e-20

    def test_verify_zero_sum(self, capsys):
        code, out = run_cli(capsys, "verify", "zero-sum", "--N", "10", "--sigma", "2", "--bits", "192")
        assert code == 0
        assert "pass" in out

    def test_verify_identities(self, capsys):
        code, out = run_cli(capsys, "verify", "identities", "--bits", "160")
        assert code == 0
        _, rows = parse_csv(out)
        assert all(r[1] == "pass" for r in rows)

    @pytest.mark.slow
    def test_verify_paths(self, capsys):
        code, out = run_cli(capsys, "verify", "paths", "--bits", "128", "--samples", "150")
        assert code == 0
        _, rows = parse_csv(out)
        assert len(rows) == 4
        assert all(r[1] == "pass" for r in rows)


class TestConfigDeterminism:
    def test_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("bits=96\nsigma=2\n# comment\nformat=json\n")
        code, out = run_cli(capsys, "bounds", "--K", "2", "--config", str(cfg))
        assert code == 0
        assert json.loads(out)["precision_bits"] == 96

    def test_flag_overrides_config(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("bits=96\n")
        code, out = run_cli(capsys, "bounds", "--K", "2", "--config", str(cfg), "--format", "json", "--bits", "128")
        assert code == 0
        assert json.loads(out)["precision_bits"] == 128

    def test_bad_config_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("nonsense=1\n")
        code, _ = run_cli(capsys, "bounds", "--config", str(cfg))
        assert code == 2

    def test_low_precision_rejected(self, capsys):
        code, _ = run_cli(capsys, "bounds", "--bits", "32")
        assert code == 2

    def test_threads_do_not_change_output(self, capsys):
        _, out1 = run_cli(capsys, "sums", "e", "--N", "60", "--threads", "1", "--bits", "160")
        _, out2 = run_cli(capsys, "sums", "e", "--N", "60", "--threads", "2", "--bits", "160")
        assert out1 == out2
