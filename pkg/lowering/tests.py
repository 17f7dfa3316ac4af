import itertools
import unittest
from unittest import mock

import networkx as nx
from fastapi.testclient import TestClient

from lowering.src.combinatorics import (
    BranchContext,
    ResidueKind,
    interlaces,
    is_dominant,
    node_set_K,
    node_sets,
    parse_weight,
    residue,
    weakly_increasing_sequences,
    x_mu,
    x_mu_lambda,
    y_part,
    z_part,
)
from lowering.src.criteria import (
    CriterionQuery,
    check,
    check_inner,
    check_terminal,
    exists_M_inner,
    exists_M_terminal,
    revalidate,
    sweep_M,
)
from lowering.src.generator import (
    ReachMode,
    difference_counts,
    discrepancy_report,
    produced_weight,
    reach_report,
    reachable,
    table1_entry,
    table1_rows,
)
from lowering.src.main import app
from lowering.src.matching import (
    OrderSpec,
    find_monotone_injection,
    hall_cone_check,
    hall_order,
    validate_injection,
)
from lowering.src.symbolic import (
    InadmissibleTagError,
    RationalTag,
    UTMatrix,
    carter_lusztig,
    evaluate_mod_p,
    expand_S_power,
    expand_T,
    expand_T_by_definition,
    falling_factorial,
    fg_polynomials,
    h_ring,
    rho,
    shift_automorphism,
    xy_ring,
)


class WeightTests(unittest.TestCase):

    def test_parse_weight(self):
        self.assertEqual(parse_weight("3,1,0"), (3, 1, 0))
        self.assertEqual(parse_weight("-1,2"), (-1, 2))
        with self.assertRaises(ValueError):
            parse_weight("3,a")
        with self.assertRaises(ValueError):
            parse_weight("")

    def test_is_dominant(self):
        self.assertTrue(is_dominant((3, 1, 0)))
        self.assertFalse(is_dominant((1, 2)))
        self.assertTrue(is_dominant((0, 0, 0)))

    def test_interlaces(self):
        self.assertTrue(interlaces((2, 1), (3, 1, 0)))
        self.assertFalse(interlaces((4, 0), (3, 1, 0)))
        self.assertTrue(interlaces((3, 0), (3, 1, 0)))
        with self.assertRaises(ValueError):
            interlaces((1, 1, 1), (3, 1, 0))

    def test_context_rejects_bad_input(self):
        with self.assertRaises(ValueError):
            BranchContext((3, 1, 0), (2, 1), 4)
        with self.assertRaises(ValueError):
            BranchContext((3, 1, 0), (4, 0), 3)
        with self.assertRaises(ValueError):
            BranchContext((3, 1, 0), (2,), 3)
        ctx = BranchContext((3, 1, 0), (4, 0), 3, require_interlacing=False)
        self.assertEqual(ctx.n, 3)


class ResidueTests(unittest.TestCase):

    def setUp(self):
        self.ctx = BranchContext((2, 1, 0), (2, 1), 3)

    def test_residues(self):
        ctx = BranchContext((3, 1, 0), (3, 1), 3)
        self.assertEqual(residue(ResidueKind.C_MU, ctx, 1, 2), 0)
        self.assertEqual(residue(ResidueKind.B_MU_LAMBDA, self.ctx, 1, 2), 0)
        same = BranchContext((2, 2, 0), (2, 2), 3)
        self.assertEqual(residue(ResidueKind.B_MU_LAMBDA_K, same, 1, 1, k=1), 0)

    def test_residue_needs_split_point(self):
        with self.assertRaises(ValueError):
            residue(ResidueKind.B_MU_LAMBDA_K, self.ctx, 1, 1)

    def test_residue_is_periodic_in_weight_entries(self):
        shifted = BranchContext((2, 4, 0), (2, 1), 3, require_interlacing=False)
        original = BranchContext((2, 1, 0), (2, 1), 3)
        for t in (1, 2):
            self.assertEqual(
                residue(ResidueKind.B_MU_LAMBDA, shifted, 1, t),
                residue(ResidueKind.B_MU_LAMBDA, original, 1, t),
            )

    def test_residue_of_C_sequence_matches_mu_form(self):
        lam, mu = (3, 1, 0), (2, 1)
        ctx = BranchContext(lam, mu, 3)
        # partial sums of lam - mu
        A = (1, 1)
        for t, k in [(1, 1), (1, 2), (1, 3), (2, 3)]:
            self.assertEqual(
                residue(ResidueKind.B_CK, ctx, 1, t, k=k, C=A),
                residue(ResidueKind.B_MU_LAMBDA_K, ctx, 1, t, k=k),
            )


class NodeSetTests(unittest.TestCase):

    def setUp(self):
        self.ctx = BranchContext((2, 1, 0), (2, 1), 3)

    def test_node_sets(self):
        sets = node_sets(self.ctx, 1, 3, 1)
        self.assertEqual(sets.x_mu_lambda, [(2, 1)])
        self.assertIsNone(sets.x_mu)
        ctx = BranchContext((3, 1, 0), (3, 1), 3)
        self.assertEqual(node_sets(ctx, 1, 3, 1).c_mu, [2])

    def test_empty_interval_for_c(self):
        self.assertEqual(node_sets(self.ctx, 1, 2, 1).c_mu, [])

    def test_power_must_stay_below_p(self):
        with self.assertRaises(ValueError):
            node_sets(self.ctx, 1, 3, 3)

    def test_node_set_K(self):
        ctx = BranchContext((3, 1, 0), (3, 0), 3)
        self.assertEqual(node_set_K(ctx, 1, 2, 1, (1,)), [(1, 1)])

    def test_node_set_K_extremes(self):
        ctx = BranchContext((4, 2, 1, 0), (3, 1, 0), 3)
        for d in (1, 2):
            self.assertEqual(node_set_K(ctx, 1, 3, d, (3,) * d), x_mu_lambda(ctx, 1, 3, d))
            self.assertEqual(node_set_K(ctx, 1, 3, d, (1,) * d), x_mu(ctx, 1, 3, d))

    def test_split_parts_are_disjoint(self):
        for K in weakly_increasing_sequences(1, 3, 2):
            Y, Z = set(y_part(K, 1, 3)), set(z_part(K, 1, 3))
            self.assertFalse(Y & Z)
            self.assertEqual(Y | Z, {(t, s) for t in (1, 2) for s in (1, 2)})

    def test_node_set_K_rejects_bad_K(self):
        ctx = BranchContext((4, 2, 1, 0), (3, 1, 0), 3)
        with self.assertRaises(ValueError):
            node_set_K(ctx, 1, 3, 2, (3, 1))
        with self.assertRaises(ValueError):
            node_set_K(ctx, 1, 3, 2, (1, 4))


class MatchingTests(unittest.TestCase):

    def test_examples(self):
        spec = OrderSpec.first_decreasing()
        self.assertEqual(find_monotone_injection({(2, 1)}, {2}, spec), {(2, 1): 2})
        self.assertIsNone(find_monotone_injection({(1, 1)}, {2}, spec))
        self.assertEqual(find_monotone_injection(set(), {2}, spec), {})

    def test_hall_examples(self):
        A = {(1, 1), (2, 1)}
        self.assertTrue(hall_cone_check(A, A))
        self.assertFalse(hall_cone_check(A, {(2, 1)}))

    def test_witness_is_valid(self):
        spec = OrderSpec.increasing_then_decreasing()
        A = [(1, 2), (1, 1), (2, 2)]
        B = [(1, 1), (2, 1), (2, 2), (3, 1)]
        witness = find_monotone_injection(A, B, spec)
        self.assertIsNotNone(witness)
        self.assertTrue(validate_injection(witness, A, B, spec))

    def test_matching_agrees_with_hall_and_networkx(self):
        spec = OrderSpec.increasing_then_decreasing()
        X = [(a, b) for a in range(1, 4) for b in range(1, 3)]
        for size_a in range(0, 4):
            for A in itertools.combinations(X, size_a):
                for size_b in range(0, 4):
                    for B in itertools.combinations(X, size_b):
                        witness = find_monotone_injection(A, B, spec)
                        self.assertEqual(witness is not None, hall_cone_check(A, B, hall_order))
                        G = nx.Graph()
                        G.add_nodes_from(("a", x) for x in A)
                        G.add_nodes_from(("b", y) for y in B)
                        G.add_edges_from(
                            (("a", x), ("b", y)) for x in A for y in B if spec.allows(x, y)
                        )
                        matching = nx.bipartite.hopcroft_karp_matching(G, top_nodes=[("a", x) for x in A])
                        matched = sum(1 for node in matching if node[0] == "a")
                        self.assertEqual(witness is not None, matched == len(A))

    def test_order_spec_needs_a_coordinate(self):
        with self.assertRaises(ValueError):
            OrderSpec(())


class CriterionTests(unittest.TestCase):

    def test_terminal_examples(self):
        q = CriterionQuery(BranchContext((1, 0), (1,), 3), 1, 2, 1)
        self.assertTrue(check_terminal(q).holds)
        for d in (1, 2):
            q = CriterionQuery(BranchContext((3, 0), (3,), 3), 1, 2, d)
            self.assertFalse(check_terminal(q).holds)
        q = CriterionQuery(BranchContext((2, 1, 0), (2, 1), 3), 2, 3, 1)
        self.assertTrue(check(q).holds)

    def test_inner_examples(self):
        q = CriterionQuery(BranchContext((3, 1, 0), (3, 0), 3), 1, 2, 1)
        verdict = check_inner(q)
        self.assertTrue(verdict.holds)
        self.assertEqual([w.K for w in verdict.per_K], [(1,), (2,)])
        self.assertEqual(verdict.per_K[0].distinguished, (1, 1))
        self.assertTrue(revalidate(q, verdict))
        q = CriterionQuery(BranchContext((2, 1, 0), (1, 1), 3), 1, 2, 1)
        self.assertFalse(check(q).holds)

    def test_query_validation(self):
        ctx = BranchContext((3, 1, 0), (2, 1), 3)
        with self.assertRaises(ValueError):
            CriterionQuery(ctx, 1, 2, 1, (2,))
        with self.assertRaises(ValueError):
            CriterionQuery(ctx, 1, 3, 3)
        with self.assertRaises(ValueError):
            CriterionQuery(ctx, 2, 2, 1)
        with self.assertRaises(ValueError):
            check_inner(CriterionQuery(ctx, 1, 3, 1))

    def test_existence_terminal(self):
        verdict = exists_M_terminal(BranchContext((1, 0), (1,), 3), 1, 1)
        self.assertTrue(verdict.holds)
        self.assertEqual(verdict.M, ())
        self.assertFalse(exists_M_terminal(BranchContext((3, 0), (3,), 3), 1, 1).holds)
        self.assertFalse(exists_M_terminal(BranchContext((2, 1, 0), (2, 1), 3), 1, 1).holds)
        with self.assertRaises(ValueError):
            exists_M_terminal(BranchContext((1, 0), (1,), 3), 1, 3)

    def test_existence_inner(self):
        ctx = BranchContext((3, 1, 0), (3, 0), 3)
        verdict = exists_M_inner(ctx, 1, 2, 1)
        self.assertTrue(verdict.holds)
        self.assertEqual(verdict.M, ())
        self.assertEqual(verdict.tau, {})
        self.assertTrue(exists_M_inner(ctx, 1, 2, 1, mode="part1").holds)
        self.assertFalse(exists_M_inner(BranchContext((2, 1, 0), (1, 1), 3), 1, 2, 1).holds)
        with self.assertRaises(ValueError):
            exists_M_inner(ctx, 1, 2, 1, mode="part3")

    def test_rejected_canonical_image_is_reported(self):
        ctx = BranchContext((1, 0), (1,), 3)
        with mock.patch("lowering.src.criteria.check", return_value=mock.Mock(holds=False)):
            with self.assertLogs("lowering.src.criteria", level="WARNING"):
                verdict = exists_M_terminal(ctx, 1, 1)
        self.assertFalse(verdict.holds)
        self.assertEqual(verdict.rejected_M, ())
        self.assertEqual(verdict.to_dict()["rejected_M"], [])
        self.assertIsNone(exists_M_terminal(ctx, 1, 1).rejected_M)

    def test_existence_agrees_with_sweep(self):
        p, n = 3, 3
        for lam in [(2, 1, 0), (3, 1, 0), (4, 2, 0), (2, 2, 0)]:
            for mu in itertools.product(*(range(lam[k + 1], lam[k] + 1) for k in range(n - 1))):
                ctx = BranchContext(lam, tuple(mu), p)
                for i, j in [(1, 2), (1, 3), (2, 3)]:
                    for d in (1, 2):
                        verdict = exists_M_terminal(ctx, i, d) if j == n else exists_M_inner(ctx, i, j, d)
                        passing = sweep_M(ctx, i, j, d)
                        self.assertEqual(verdict.holds, bool(passing))
                        if verdict.holds:
                            self.assertIn(verdict.M, passing)
                        self.assertIsNone(verdict.rejected_M)

    def test_verdicts_revalidate(self):
        ctx = BranchContext((4, 2, 1, 0), (3, 1, 0), 3)
        for i, j in [(1, 3), (1, 4), (2, 4)]:
            for d in (1, 2):
                for size in range(j - i):
                    for M in itertools.combinations(range(i + 1, j), size):
                        q = CriterionQuery(ctx, i, j, d, M)
                        self.assertTrue(revalidate(q, check(q)))


class SymbolicTests(unittest.TestCase):

    def setUp(self):
        self.R = h_ring(3)
        self.H1, self.H2, self.H3 = self.R.gens

    def test_falling_factorial(self):
        R = h_ring(1)
        H1 = R.gens[0]
        self.assertEqual(falling_factorial(H1, 2), H1 ** 2 - H1)
        self.assertEqual(falling_factorial(H1, 0), R.one)

    def test_S_power_expansions(self):
        self.assertEqual(expand_S_power(1, 2, 1).terms, {UTMatrix.unit(1, 2): h_ring(2).one})
        S = expand_S_power(1, 3, 1)
        self.assertEqual(S.terms, {
            UTMatrix.unit(1, 3): 1 + self.H1 - self.H2,
            UTMatrix([(1, 2, 1), (2, 3, 1)]): self.R.one,
        })
        self.assertEqual(expand_S_power(1, 2, 2).terms, {UTMatrix.unit(1, 2, 2): 2 * h_ring(2).one})

    def test_S_power_matches_carter_lusztig(self):
        self.assertEqual(expand_S_power(1, 3, 1), carter_lusztig(1, 3))
        self.assertEqual(expand_S_power(2, 4, 1, 4), carter_lusztig(2, 4, 4))

    def test_T_expansion(self):
        T = expand_T(1, 3, 1, (2,))
        self.assertEqual(T.terms, {UTMatrix.unit(1, 3): self.R.one})
        self.assertEqual(T.to_text(), "N: [(1,3,1)] coeff: 1")

    def test_T_square_expansion(self):
        h = self.H1 - self.H2
        T = expand_T(1, 3, 2, (2,))
        self.assertEqual(T.terms, {
            UTMatrix.unit(1, 3, 2): 2 * h,
            UTMatrix([(1, 2, 1), (1, 3, 1), (2, 3, 1)]): 2 * self.R.one,
        })
        self.assertNotIn(UTMatrix([(1, 2, 2), (2, 3, 2)]), T.terms)

    def test_T_cube_expansion(self):
        h = self.H1 - self.H2
        T = expand_T(1, 3, 3, (2,))
        self.assertEqual(T.terms, {
            UTMatrix.unit(1, 3, 3): 6 * h * (h - 1),
            UTMatrix([(1, 2, 1), (1, 3, 2), (2, 3, 1)]): 6 * h,
            UTMatrix([(1, 2, 2), (1, 3, 1), (2, 3, 2)]): 12 * self.R.one,
        })
        self.assertEqual(T, expand_T_by_definition(1, 3, 3, (2,)))

    def test_T_agrees_with_definition(self):
        for i, j in [(1, 3), (1, 4), (2, 4)]:
            for d in (1, 2, 3):
                for size in range(j - i):
                    for M in itertools.combinations(range(i + 1, j), size):
                        T = expand_T(i, j, d, M, 4)
                        self.assertEqual(T, expand_T_by_definition(i, j, d, M, 4))
                        self.assertTrue(T.is_homogeneous(i, j, d))

    def test_T_rejects_bad_M(self):
        with self.assertRaises(ValueError):
            expand_T(1, 3, 1, (3,))

    def test_shift_automorphism(self):
        self.assertEqual(shift_automorphism(self.H1, UTMatrix.unit(1, 2)), self.H1 - 1)
        self.assertEqual(shift_automorphism(self.H2, UTMatrix.unit(1, 2)), self.H2 + 1)

    def test_evaluate_mod_p(self):
        self.assertEqual(evaluate_mod_p(1 + self.H1 - self.H2, (3, 0, 0), 3), 1)
        self.assertEqual(evaluate_mod_p(self.H1 - self.H3, (0, 0, 2), 3), 1)

    def test_rho(self):
        R2 = h_ring(2)
        H1, H2 = R2.gens
        self.assertEqual(rho((0,), 1, 2, (2,), (0,)), H1 - H2)
        self.assertEqual(rho((0, 0), 1, 3, (3,), (0,), (2,)), self.H1 - self.H2)

    def test_rho_tags(self):
        with self.assertRaises(InadmissibleTagError):
            rho((0,), 1, 2, (2,), (0,), (), RationalTag.INV_ZETA_MINUS_D)
        with self.assertRaises(InadmissibleTagError):
            rho((0,), 1, 2, (1,), (0,), (), RationalTag.INV_ZETA_MINUS_D_MINUS_1)
        with self.assertRaises(ValueError):
            rho((0,), 1, 2, (2,), (0, 0, 0))

    def test_fg_polynomials(self):
        R = xy_ring(2)
        x1, x2, y1, y2 = R.gens
        f, g = fg_polynomials(1, 2, 1)
        self.assertEqual(f, y2 - x1)
        self.assertEqual(g, R.one)
        R3 = xy_ring(3)
        x1, y2 = R3.gens[0], R3.gens[4]
        f, _ = fg_polynomials(1, 3, 1, (2,))
        self.assertEqual(f, y2 - x1)


class GeneratorTests(unittest.TestCase):

    def test_reach_small(self):
        self.assertEqual(reachable((1, 0), 3).reached, {(1,), (0,)})
        self.assertEqual(reachable((3, 0), 3).reached, {(3,)})

    def test_reach_chain(self):
        result = reachable((1, 0), 3, ReachMode.D_EQUALS_1)
        self.assertEqual(result.nodes[(0,)].provenance, ((1, 2, 1, ()),))

    def test_reach_requires_dominant(self):
        with self.assertRaises(ValueError):
            reachable((0, 1), 3)

    def test_produced_weight(self):
        self.assertEqual(produced_weight((2, 1), 1, 3, 1), (1, 1))
        self.assertEqual(produced_weight((2, 1), 1, 2, 1), (1, 2))

    def test_report_difference(self):
        report = reach_report((2, 0), 3)
        self.assertEqual(report.difference, [])
        self.assertEqual(report.to_dict()["difference_count"], 0)

    def test_table_entries(self):
        self.assertEqual(table1_entry(3, 2)[0], 0)
        self.assertEqual(table1_entry(3, 3)[0], 1)
        self.assertEqual(table1_entry(3, 4)[0], 3)
        self.assertEqual(table1_entry(5, 3)[0], 4)

    def test_table_rows_match_known_entries(self):
        rows, discrepancies = table1_rows([(3, 2), (3, 3)])
        self.assertEqual([row["max"] for row in rows], [0, 1])
        self.assertEqual([row["expected"] for row in rows], [0, 1])
        self.assertEqual(discrepancies, [])

    def test_discrepancy_report(self):
        counts = difference_counts(3, 3)
        self.assertIsNone(discrepancy_report(3, 3, 1, counts))
        report = discrepancy_report(3, 3, 0, counts)
        self.assertEqual(report["computed"], 1)
        self.assertEqual(dict(counts)[tuple(report["lambda"])], 1)
        self.assertEqual(len(report["reached_all"]) - len(report["reached_d1"]), 1)
        self.assertEqual(len(report["chains"]), 1)

    def test_discrepancy_report_when_short(self):
        counts = [((2, 0), 0), ((1, 0), 0)]
        report = discrepancy_report(3, 2, 2, counts)
        self.assertEqual(report["computed"], 0)
        self.assertEqual(report["lambda"], [2, 0])
        self.assertEqual(report["chains"], [])


class LoweringApiTests(unittest.TestCase):

    def setUp(self):
        self.client = TestClient(app)

    def test_check(self):
        response = self.client.post("/check", json={"lam": [1, 0], "mu": [1], "p": 3, "i": 1, "j": 2, "d": 1})
        self.assertEqual(response.status_code, 200)
        self.assertTrue(response.json()["verdict"]["holds"])

    def test_check_bad_input(self):
        response = self.client.post("/check", json={"lam": [1, 0], "mu": [1], "p": 3, "i": 1, "j": 2, "d": 3})
        self.assertEqual(response.status_code, 400)

    def test_exists_m_mode(self):
        payload = {"lam": [3, 1, 0], "mu": [3, 0], "p": 3, "i": 1, "j": 2, "d": 1, "mode": "part9"}
        self.assertEqual(self.client.post("/exists_m", json=payload).status_code, 400)
        payload["mode"] = "part2"
        response = self.client.post("/exists_m", json=payload)
        self.assertEqual(response.json()["verdict"]["M"], [])

    def test_expand_and_rho(self):
        response = self.client.post("/expand", json={"i": 1, "j": 3, "d": 1, "M": [2]})
        self.assertEqual(response.json()["text"], "N: [(1,3,1)] coeff: 1")
        response = self.client.post("/rho", json={"C": [0], "i": 1, "j": 2, "K": [2], "L": [0]})
        self.assertEqual(response.json()["rho"], "H1 - H2")

    def test_reach(self):
        response = self.client.post("/reach", json={"lam": [1, 0], "p": 3, "mode": "all_d"})
        self.assertEqual([node["mu"] for node in response.json()["reached"]], [[1], [0]])


if __name__ == "__main__":
    unittest.main()
