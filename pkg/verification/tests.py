import unittest

from verification.src.battery import (
    CHECKS,
    BatteryConfig,
    CheckResult,
    T_by_definition,
    carter_lusztig_definition,
    criteria_vs_oracle,
    existence_vs_sweep,
    integrality_sweep,
    matching_vs_hall,
    residue_consistency,
    run_battery,
    summarize,
)


class CheckResultTests(unittest.TestCase):

    def test_first_counterexample_is_kept(self):
        result = CheckResult("demo")
        result.fail({"case": 1})
        result.fail({"case": 2})
        self.assertFalse(result.passed)
        self.assertEqual(result.counterexample, {"case": 1})
        self.assertEqual(result.to_dict()["name"], "demo")

    def test_summarize(self):
        summary = summarize([CheckResult("a"), CheckResult("b", passed=False)])
        self.assertFalse(summary["passed"])
        self.assertEqual(summary["failed"], ["b"])


class BatteryTests(unittest.TestCase):

    def setUp(self):
        self.config = BatteryConfig(p=3, n=2, samples=0, hall_samples=200, symbolic_n=3, symbolic_d=2)

    def test_matching_vs_hall(self):
        result = matching_vs_hall(self.config)
        self.assertTrue(result.passed)
        self.assertEqual(result.cases, 200)

    def test_symbolic_checks(self):
        self.assertTrue(T_by_definition(self.config).passed)
        self.assertTrue(carter_lusztig_definition(self.config).passed)

    def test_T_by_definition_with_cubes(self):
        result = T_by_definition(BatteryConfig(symbolic_n=3, symbolic_d=3))
        self.assertTrue(result.passed)
        self.assertEqual(result.cases, 12)

    def test_integrality_reaches_cubes(self):
        result = integrality_sweep(BatteryConfig(integrality_n=3, symbolic_d=3))
        self.assertTrue(result.passed)
        self.assertEqual(result.cases, 124)

    def test_default_sizes(self):
        config = BatteryConfig()
        self.assertGreaterEqual(config.samples, 500)
        self.assertGreaterEqual(config.hall_samples, 10000)
        self.assertEqual(config.integrality_n, 5)
        self.assertEqual(config.symbolic_d, 3)

    def test_residue_consistency(self):
        result = residue_consistency(self.config)
        self.assertTrue(result.passed)
        self.assertGreater(result.cases, 0)

    def test_existence_vs_sweep(self):
        config = BatteryConfig(p=3, n=3)
        self.assertTrue(existence_vs_sweep(config).passed)

    def test_criteria_vs_oracle(self):
        verdicts, cf_test, bridge = criteria_vs_oracle(self.config)
        self.assertTrue(verdicts.passed)
        self.assertTrue(cf_test.passed)
        self.assertTrue(bridge.passed)
        self.assertGreater(verdicts.cases, 0)

    def test_injected_fault_is_reported(self):
        config = BatteryConfig(p=3, n=2, samples=0, inject_fault=True)
        verdicts, _, _ = criteria_vs_oracle(config)
        self.assertFalse(verdicts.passed)
        self.assertIsNotNone(verdicts.counterexample)
        self.assertEqual(verdicts.counterexample["lambda"], [0, 0])

    def test_run_battery_selection(self):
        config = BatteryConfig(p=3, n=2, samples=0, hall_samples=50, only=("matching_vs_hall", "rho_shift"))
        results = run_battery(config)
        self.assertEqual([r.name for r in results], ["matching_vs_hall", "rho_shift"])
        self.assertTrue(summarize(results)["passed"])

    def test_run_battery_unknown_check(self):
        with self.assertRaises(ValueError):
            run_battery(BatteryConfig(only=("no_such_check",)))

    def test_check_names(self):
        self.assertIn("criteria_vs_oracle", CHECKS)
        self.assertEqual(len(CHECKS), len(set(CHECKS)))


if __name__ == "__main__":
    unittest.main()
