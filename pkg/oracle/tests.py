import unittest

import numpy as np
from fastapi.testclient import TestClient

from lowering.src.symbolic import LoweringElement, UTMatrix, expand_S_power, expand_T, h_ring
from oracle.src.linalg import coordinates, inv_mod_scalar, nullspace_mod, rank_mod, row_basis, rref_mod
from oracle.src.main import app
from oracle.src.modrep import (
    ModuleVector,
    apply,
    apply_lowering,
    build_weyl,
    cf,
    conjugate_partition,
    dual_realization,
    high_weight_vectors,
    highest_vector,
    is_high_weight,
    is_high_weight_by_cf,
    lowering_verdict,
    normal_weights_bruteforce,
    normalized_f,
    simple_quotient,
    tensor_dimension,
    weyl_dimension,
)


class LinalgTests(unittest.TestCase):

    def test_inverse(self):
        self.assertEqual(inv_mod_scalar(2, 5), 3)
        with self.assertRaises(ZeroDivisionError):
            inv_mod_scalar(3, 3)

    def test_rank_and_nullspace(self):
        A = np.array([[1, 2, 0], [2, 4, 0], [0, 0, 1]], dtype=np.int64)
        self.assertEqual(rank_mod(A, 5), 2)
        kernel = nullspace_mod(A, 5)
        self.assertEqual(kernel.shape, (3, 1))
        self.assertFalse(np.any((A @ kernel) % 5))

    def test_rref(self):
        reduced, pivots = rref_mod(np.array([[2, 4], [1, 1]], dtype=np.int64), 3)
        self.assertEqual(pivots, [0, 1])
        self.assertTrue(np.array_equal(reduced, np.eye(2, dtype=np.int64)))

    def test_coordinates(self):
        basis, pivots = row_basis(np.array([[1, 2, 0], [0, 0, 1]], dtype=np.int64), 5)
        w = np.array([2, 4, 3], dtype=np.int64)
        self.assertEqual([int(x) for x in coordinates(basis, pivots, w, 5)], [2, 3])
        with self.assertRaises(ValueError):
            coordinates(basis, pivots, np.array([0, 1, 0], dtype=np.int64), 5)


class DimensionTests(unittest.TestCase):

    def test_weyl_formula(self):
        self.assertEqual(weyl_dimension((1, 0, 0)), 3)
        self.assertEqual(weyl_dimension((1, 1, 0)), 3)
        self.assertEqual(weyl_dimension((2, 1, 0)), 8)
        self.assertEqual(conjugate_partition((2, 1, 0)), (2, 1))
        self.assertEqual(tensor_dimension((2, 1, 0)), 9)

    def test_weyl_modules(self):
        for lam in [(1, 0, 0), (1, 1, 0), (2, 1, 0), (1, 0)]:
            self.assertEqual(build_weyl(lam, 3).dimension, weyl_dimension(lam))

    def test_negative_entries_shift(self):
        delta = build_weyl((0, -1), 3)
        self.assertEqual(delta.dimension, 2)
        self.assertEqual(delta.weights(), [(0, -1), (-1, 0)])

    def test_simple_dimensions(self):
        self.assertEqual(simple_quotient(build_weyl((2, 1, 0), 3)).dimension, 7)
        self.assertEqual(simple_quotient(build_weyl((2, 1, 0), 5)).dimension, 8)
        self.assertEqual(simple_quotient(build_weyl((1, 0, 0), 3)).dimension, 3)

    def test_tensor_limit(self):
        with self.assertRaises(ValueError):
            build_weyl((2, 1, 0), 3, tensor_limit=5)

    def test_rejects_bad_input(self):
        with self.assertRaises(ValueError):
            build_weyl((0, 1), 3)
        with self.assertRaises(ValueError):
            build_weyl((1, 0), 4)


class ActionTests(unittest.TestCase):

    def setUp(self):
        self.natural = build_weyl((1, 0, 0), 3)
        self.v = highest_vector(self.natural)

    def test_lowering_natural(self):
        delta = build_weyl((1, 0), 3)
        T = LoweringElement(2, {UTMatrix.unit(1, 2): h_ring(2).one})
        image = apply_lowering(delta, T, highest_vector(delta))
        self.assertEqual(image.weight, (0, 1))
        self.assertEqual([int(x) for x in image.coords], [1])

    def test_S_on_natural(self):
        image = apply_lowering(self.natural, expand_S_power(1, 3, 1), self.v)
        self.assertEqual(image.weight, (0, 0, 1))
        self.assertEqual([int(x) for x in image.coords], [2])

    def test_divided_power_out_of_range(self):
        wedge = build_weyl((1, 1, 0), 3)
        image = apply(wedge, 2, 1, 2, highest_vector(wedge))
        self.assertTrue(image.is_zero())

    def test_raising_lowering(self):
        lowered = apply(self.natural, 2, 1, 1, self.v)
        raised = apply(self.natural, 1, 2, 1, lowered)
        self.assertEqual(raised.weight, (1, 0, 0))
        self.assertEqual([int(x) for x in raised.coords], [1])

    def test_duality(self):
        delta = build_weyl((2, 1, 0), 3)
        nabla = dual_realization(delta)
        for w in delta.weights():
            for a, b in [(1, 2), (2, 1), (2, 3), (3, 2), (1, 3)]:
                target = tuple(x + (1 if k == a - 1 else -1 if k == b - 1 else 0) for k, x in enumerate(w))
                if not delta.dim(target):
                    continue
                self.assertTrue(np.array_equal(nabla.action(a, b, 1, w), delta.action(b, a, 1, target).T))

    def test_contravariance(self):
        simple = simple_quotient(build_weyl((2, 1, 0), 3), validate=False)
        simple.validate_contravariance()
        self.assertEqual(simple.radical_dimension((1, 1, 1)), 1)


class HighWeightTests(unittest.TestCase):

    def test_wedge(self):
        wedge = build_weyl((1, 1, 0), 3)
        self.assertEqual({mu for mu, _ in high_weight_vectors(wedge)}, {(1, 1), (1, 0)})

    def test_normal_weights(self):
        self.assertEqual(normal_weights_bruteforce((1, 0), 3), {(1,), (0,)})
        self.assertEqual(normal_weights_bruteforce((3, 0), 3), {(3,), (0,)})
        self.assertEqual(normal_weights_bruteforce((1, 1, 0), 3), {(1, 1), (1, 0)})

    def test_cf_of_highest(self):
        nabla = dual_realization(build_weyl((2, 1, 0), 3))
        self.assertEqual(cf(nabla, highest_vector(nabla)), 1)

    def test_cf_after_lowering(self):
        nabla = dual_realization(build_weyl((1, 0), 3))
        image = apply(nabla, 2, 1, 1, highest_vector(nabla))
        self.assertEqual(cf(nabla, image), 1)

    def test_normalized_f(self):
        nabla = dual_realization(build_weyl((2, 1, 0), 3))
        f = normalized_f(nabla, (2, 0))
        self.assertEqual(cf(nabla, f), 1)
        self.assertTrue(is_high_weight(nabla, f))
        self.assertTrue(is_high_weight_by_cf(nabla, f))
        with self.assertRaises(ValueError):
            normalized_f(nabla, (3, 0))

    def test_not_high_weight(self):
        nabla = dual_realization(build_weyl((1, 0, 0), 3))
        v = ModuleVector((0, 1, 0), np.ones(1, dtype=np.int64))
        self.assertFalse(is_high_weight(nabla, v))
        self.assertFalse(is_high_weight_by_cf(nabla, v))


class VerdictTests(unittest.TestCase):

    def test_holds(self):
        nabla = dual_realization(build_weyl((1, 0), 3))
        verdict = lowering_verdict(nabla, expand_T(1, 2, 1, (), 2), (1,))
        self.assertTrue(verdict.holds)
        self.assertEqual(verdict.weight, (0, 1))
        self.assertEqual(verdict.cf, 1)

    def test_fails(self):
        nabla = dual_realization(build_weyl((3, 0), 3))
        verdict = lowering_verdict(nabla, expand_T(1, 2, 1, (), 2), (3,))
        self.assertFalse(verdict.holds)
        self.assertFalse(verdict.nonzero)


class OracleApiTests(unittest.TestCase):

    def setUp(self):
        self.client = TestClient(app)

    def test_oracle(self):
        response = self.client.post("/oracle", json={"lam": [2, 1, 0], "p": 3})
        self.assertEqual(response.status_code, 200)
        body = response.json()
        self.assertEqual(body["dim_delta"], 8)
        self.assertEqual(body["dim_simple"], 7)

    def test_lowering_verdict(self):
        payload = {"lam": [1, 0], "mu": [1], "p": 3, "i": 1, "j": 2, "d": 1, "M": []}
        response = self.client.post("/lowering_verdict", json=payload)
        self.assertTrue(response.json()["holds"])

    def test_bad_weight(self):
        response = self.client.post("/oracle", json={"lam": [0, 1], "p": 3})
        self.assertEqual(response.status_code, 400)


if __name__ == "__main__":
    unittest.main()
