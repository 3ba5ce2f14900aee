import io
import json

from gustrata import __version__
from gustrata.cli import main


def run(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


class TestCatalog:
    def test_n5(self):
        code, out = run(["catalog", "--n", "5"])
        assert code == 0
        doc = json.loads(out)
        assert len(doc["strata"]) == 3
        assert [e["lambda_min"] for e in doc["strata"]] == \
            ["1/2", "1/4", "0/1"]
        assert doc["version"] == __version__
        assert set(doc["context"]) == {"p", "d", "N", "modulus"}

    def test_tsv(self):
        code, out = run(["catalog", "--n", "4", "--format", "tsv"])
        assert code == 0
        assert "sigma" in out and "xi_4" in out
        assert out.startswith("# n\t4")

    def test_bad_n(self):
        code, _ = run(["catalog", "--n", "2"])
        assert code == 2


class TestSlopes:
    def test_m4_p3(self):
        code, out = run(["slopes", "--module", "M(4)", "--p", "3"])
        assert code == 0
        doc = json.loads(out)
        assert doc["polygon"]["slopes"] == [
            {"num": 1, "den": 4, "mult": 4},
            {"num": 3, "den": 4, "mult": 4}]
        assert doc["signature"] == [1, 3]

    def test_sum_spec(self):
        code, out = run(["slopes", "--module", "M(2)+N", "--p", "2"])
        assert code == 0
        doc = json.loads(out)
        assert doc["module"] == "M(2) + N"
        assert doc["p_rank"] == 2

    def test_deformation_spec(self):
        code, out = run(["slopes", "--module", "def(3; s2=1)", "--p", "3"])
        assert code == 0
        doc = json.loads(out)
        assert doc["polygon"]["slopes"][0] == {"num": 0, "den": 1, "mult": 2}

    def test_unknown_module(self):
        code, _ = run(["slopes", "--module", "Q(3)"])
        assert code == 2

    def test_bad_parameter_assignment(self):
        code, _ = run(["slopes", "--module", "def(3; s9=1)"])
        assert code == 2

    def test_tsv(self):
        code, out = run(["slopes", "--module", "N", "--format", "tsv"])
        assert code == 0
        assert "1/2\t2" in out


class TestGraph:
    def test_dot(self):
        code, out = run(["graph", "--module", "M(7)", "--dot"])
        assert code == 0
        assert out.startswith("digraph")
        assert out.count("->") == 14

    def test_json_with_cycles(self):
        code, out = run(["graph", "--module", "M(3)"])
        assert code == 0
        doc = json.loads(out)
        assert len(doc["edges"]) == 6
        assert doc["cycles_through_u1"] == [
            {"vertices": ["u1", "v3", "u2", "v1", "u3", "v2"],
             "length": 6, "weight": 3}]

    def test_deformation_edge(self):
        code, out = run(["graph", "--module", "def(3; s2=1)", "--dot"])
        assert code == 0
        assert '"v3" -> "u1" [color=gray];' in out


class TestCheck:
    def test_valid_module(self):
        code, out = run(["check", "--module", "ss(4)", "--p", "2"])
        assert code == 0
        doc = json.loads(out)
        assert doc["ok"] is True
        assert doc["polarization_violations"] == []
        names = [c["name"] for c in doc["validation"]["checks"]]
        assert "pairing_alternating" in names

    def test_deformation_points_pass(self):
        for spec in ("def(5; s2=1, s5=1)", "def(4; s0=1, s3=1)",
                     "def(6; s0=1, s2=1, s5=1)"):
            code, out = run(["check", "--module", spec, "--p", "3"])
            assert code == 0, out
            assert json.loads(out)["ok"] is True


class TestVerify:
    def test_exhaustive_n3(self):
        code, out = run(["verify", "--n", "3", "--p", "3", "--d", "1",
                         "--exhaustive"])
        assert code == 0
        doc = json.loads(out)
        assert doc["points"] == 9
        assert doc["agreement_rate"] == "1/1"

    def test_random_mode(self):
        code, out = run(["verify", "--n", "4", "--p", "3", "--d", "1",
                         "--random", "10", "--seed", "7"])
        assert code == 0
        doc = json.loads(out)
        assert doc["mode"]["kind"] == "random"
        assert doc["mode"]["count"] == 10 and doc["mode"]["seed"] == 7
        assert doc["mode"]["precision"] == 24

    def test_budget_exceeded_is_usage_error(self):
        code, _ = run(["verify", "--n", "6", "--p", "5", "--d", "2",
                       "--exhaustive", "--budget", "100"])
        assert code == 2

    def test_tsv(self):
        code, out = run(["verify", "--n", "3", "--p", "2", "--d", "1",
                         "--format", "tsv"])
        assert code == 0
        assert "# agreement_rate\t1/1" in out


class TestDeterminismAndUsage:
    def test_byte_identical_outputs(self):
        for argv in (["catalog", "--n", "6"],
                     ["slopes", "--module", "M(5)"],
                     ["verify", "--n", "4", "--p", "2", "--d", "1",
                      "--random", "5", "--seed", "3"]):
            _, out1 = run(argv)
            _, out2 = run(argv)
            assert out1 == out2

    def test_usage_errors(self):
        assert run(["slopes"])[0] == 2          # missing --module
        assert run(["frobnicate"])[0] == 2      # unknown command
        assert run(["verify", "--n", "5"])[0] == 0  # exhaustive default

    def test_not_prime(self):
        code, _ = run(["slopes", "--module", "N", "--p", "4"])
        assert code == 2

    def test_version_embedded_everywhere(self):
        for argv in (["catalog", "--n", "3"],
                     ["slopes", "--module", "N"],
                     ["verify", "--n", "3", "--p", "2", "--d", "1"]):
            _, out = run(argv)
            assert json.loads(out)["version"] == __version__
