import io
import json
import unittest
from contextlib import redirect_stderr, redirect_stdout
from unittest import mock

from branching import settings
from branching.cli import build_parser, main, parse_cells, parse_columns
from lowering.src.symbolic import IntegralityError
from oracle.src.modrep import OracleConsistencyError


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


class ParsingTests(unittest.TestCase):

    def test_parse_columns(self):
        self.assertEqual(parse_columns(""), ())
        self.assertEqual(parse_columns(None), ())
        self.assertEqual(parse_columns("2,3"), (2, 3))

    def test_parse_cells(self):
        self.assertEqual(parse_cells("3,2;3,3"), [(3, 2), (3, 3)])
        with self.assertRaises(ValueError):
            parse_cells("3,2,1")


class CheckCommandTests(unittest.TestCase):

    def test_holds(self):
        code, out, _ = run("check", "--lambda", "1,0", "--mu", "1", "--p", "3", "--i", "1", "--j", "2", "--d", "1")
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertEqual(payload["schema"], settings.JSON_SCHEMA)
        self.assertTrue(payload["verdict"]["holds"])

    def test_fails(self):
        code, out, _ = run("check", "--lambda", "3,0", "--mu", "3", "--p", "3", "--i", "1", "--j", "2", "--d", "1",
                           "--format", "text")
        self.assertEqual(code, 1)
        self.assertTrue(out.startswith("fails"))

    def test_power_too_large(self):
        code, _, err = run("check", "--lambda", "1,0", "--mu", "1", "--p", "3", "--i", "1", "--j", "2", "--d", "3")
        self.assertEqual(code, 2)
        self.assertIn("error", err)

    def test_not_interlacing(self):
        code, _, _ = run("check", "--lambda", "3,1,0", "--mu", "4,0", "--p", "3", "--i", "1", "--j", "2", "--d", "1")
        self.assertEqual(code, 2)

    def test_exists_m(self):
        code, out, _ = run("exists-m", "--lambda", "3,1,0", "--mu", "3,0", "--p", "3", "--i", "1", "--j", "2",
                           "--d", "1", "--format", "text")
        self.assertEqual(code, 0)
        self.assertEqual(out.strip(), "M = []")


class SymbolicCommandTests(unittest.TestCase):

    def test_expand(self):
        code, out, _ = run("expand", "--i", "1", "--j", "3", "--d", "1", "--M", "2")
        self.assertEqual(code, 0)
        self.assertEqual(out.strip(), "N: [(1,3,1)] coeff: 1")

    def test_expand_json(self):
        code, out, _ = run("expand", "--i", "1", "--j", "2", "--d", "2", "--format", "json")
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["terms"], [{"N": [[1, 2, 2]], "coeff": "2"}])

    def test_rho(self):
        code, out, _ = run("rho", "--C", "0", "--i", "1", "--j", "2", "--K", "2", "--L", "0")
        self.assertEqual(code, 0)
        self.assertEqual(out.strip(), "H1 - H2")

    def test_integrality_error_exit_code(self):
        with mock.patch("branching.cli.expand_T", side_effect=IntegralityError("nonzero remainder")):
            code, out, err = run("expand", "--i", "1", "--j", "3", "--d", "2", "--M", "2")
        self.assertEqual(code, 3)
        self.assertEqual(out, "")
        self.assertIn("IntegralityError: nonzero remainder", err)
        self.assertNotIn("Traceback", err)

    def test_rho_inadmissible(self):
        code, _, _ = run("rho", "--C", "0", "--i", "1", "--j", "2", "--K", "2", "--L", "0", "--R", "1/(zeta-d)")
        self.assertEqual(code, 2)


class ModuleCommandTests(unittest.TestCase):

    def test_oracle(self):
        code, out, _ = run("oracle", "--lambda", "2,1,0", "--p", "3")
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertEqual(payload["dim_simple"], 7)

    def test_oracle_consistency_error_exit_code(self):
        failure = OracleConsistencyError("Weyl dimension mismatch")
        with mock.patch("branching.cli.oracle_summary", side_effect=failure):
            code, _, err = run("oracle", "--lambda", "2,1,0", "--p", "3")
        self.assertEqual(code, 3)
        self.assertIn("OracleConsistencyError: Weyl dimension mismatch", err)

    def test_oracle_query(self):
        code, out, _ = run("oracle", "--lambda", "3,0", "--p", "3", "--mu", "3")
        self.assertEqual(code, 1)
        self.assertFalse(json.loads(out)["query"]["holds"])

    def test_reach(self):
        code, out, _ = run("reach", "--lambda", "1,0", "--p", "3")
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertEqual(payload["reached_d1"], [[1], [0]])
        self.assertEqual(payload["difference_count"], 0)

    def test_table1(self):
        code, out, _ = run("table1", "--cells", "3,2")
        self.assertEqual(code, 0)
        lines = out.strip().splitlines()
        self.assertEqual(lines[0].split("\t"), ["p", "n", "max", "argmax_lambda", "elapsed_ms", "expected"])
        self.assertEqual(lines[1].split("\t")[:3], ["3", "2", "0"])


class VerifyCommandTests(unittest.TestCase):

    def test_size_flags(self):
        args = build_parser().parse_args(["verify", "--symbolic-n", "3", "--symbolic-d", "2", "--integrality-n", "4"])
        self.assertEqual((args.symbolic_n, args.symbolic_d, args.integrality_n), (3, 2, 4))
        defaults = build_parser().parse_args(["verify"])
        self.assertEqual(defaults.integrality_n, settings.INTEGRALITY_N)
        self.assertEqual(defaults.samples, settings.VERIFY_SAMPLES)

    def test_verify_selection(self):
        code, out, _ = run("verify", "--n", "2", "--samples", "0", "--hall-samples", "20", "--only", "matching_vs_hall")
        self.assertEqual(code, 0)
        self.assertTrue(json.loads(out)["passed"])

    def test_injected_fault(self):
        code, out, _ = run("verify", "--n", "2", "--samples", "0", "--inject-fault", "--only", "criteria_vs_oracle")
        self.assertEqual(code, 1)
        payload = json.loads(out)
        self.assertIn("criteria_vs_oracle", payload["failed"])


if __name__ == "__main__":
    unittest.main()
