import itertools
import logging
import math
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from lowering.src.combinatorics import (
    BranchContext,
    ResidueKind,
    Weight,
    p_restricted_weights,
    residue,
    weakly_increasing_sequences,
    weight_gaps,
)
from lowering.src.criteria import CriterionQuery, check, exists_M_inner, exists_M_terminal, sweep_M
from lowering.src.generator import reach_report
from lowering.src.matching import OrderSpec, find_monotone_injection, hall_cone_check, validate_injection
from lowering.src.symbolic import (
    C_poly,
    IntegralityError,
    RationalTag,
    carter_lusztig,
    commpoly1_product,
    evaluate_at,
    evaluate_mod_p,
    expand_S_power,
    expand_T,
    expand_T_by_definition,
    fg_polynomials,
    G_polynomial,
    h_ring,
    ideal_membership,
    rho,
    solve_generators,
    specialize,
)
from oracle.src.modrep import (
    DEFAULT_TENSOR_LIMIT,
    DualWeylModule,
    ModuleVector,
    OracleConsistencyError,
    apply,
    apply_lowering,
    build_weyl,
    cf,
    dual_realization,
    highest_vector,
    is_high_weight,
    is_high_weight_by_cf,
    normal_weights_bruteforce,
    normalized_f,
    simple_quotient,
    tensor_dimension,
    weyl_dimension,
)


_logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    name: str
    passed: bool = True
    cases: int = 0
    counterexample: Optional[dict] = None
    skipped: int = 0

    def fail(self, counterexample: dict):
        # Keep the first counterexample only
        if self.passed:
            self.passed = False
            self.counterexample = counterexample
            _logger.warning("Check %s failed: %s", self.name, counterexample)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "cases": self.cases,
            "skipped": self.skipped,
            "counterexample": self.counterexample,
        }


@dataclass
class BatteryConfig:
    p: int = 3
    n: int = 3
    seed: int = 14
    samples: int = 500
    hall_samples: int = 10000
    jobs: int = 1
    tensor_limit: int = DEFAULT_TENSOR_LIMIT
    inject_fault: bool = False
    symbolic_n: int = 4
    symbolic_d: int = 3
    integrality_n: int = 5
    only: Tuple[str, ...] = ()

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


def _subsets(inner: Sequence[int]):
    for size in range(len(inner) + 1):
        yield from itertools.combinations(inner, size)


def _intervals(n: int):
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            yield i, j


def _random_subset(rng: np.random.Generator, inner: Sequence[int]) -> Tuple[int, ...]:
    return tuple(m for m in inner if rng.random() < 0.5)


def _random_interlacing(rng: np.random.Generator, lam: Weight) -> Weight:
    return tuple(int(rng.integers(lam[k + 1], lam[k] + 1)) for k in range(len(lam) - 1))


def _random_sequence(rng: np.random.Generator, size: int, lo: int, hi: int) -> Tuple[int, ...]:
    return tuple(int(x) for x in rng.integers(lo, hi + 1, size=size))


def _total_degree(f) -> int:
    return max((sum(monom) for monom in f.itermonoms()), default=0)


# Matching

def matching_vs_hall(config: BatteryConfig) -> CheckResult:
    """Monotone injections exist exactly when the cone counting inequality holds."""
    result = CheckResult("matching_vs_hall")
    rng = config.rng(1)
    spec = OrderSpec.increasing_then_decreasing()
    grid = [(a, b) for a in range(1, 6) for b in range(1, 6)]
    for _ in range(config.hall_samples):
        size_a = int(rng.integers(0, 9))
        size_b = int(rng.integers(0, 21 - size_a))
        A = {grid[k] for k in rng.choice(len(grid), size=size_a, replace=False)}
        B = {grid[k] for k in rng.choice(len(grid), size=size_b, replace=False)}
        witness = find_monotone_injection(A, B, spec)
        hall = hall_cone_check(A, B)
        result.cases += 1
        if (witness is not None) != hall or (witness is not None and not validate_injection(witness, A, B, spec)):
            result.fail({"A": sorted(A), "B": sorted(B), "matching": witness is not None, "hall": hall})
            break
    return result


# Symbolic engine

def integrality_sweep(config: BatteryConfig) -> CheckResult:
    """Every exact division in expand_T, rho and the f/g recursion leaves no remainder."""
    result = CheckResult("integrality")
    rng = config.rng(2)
    n = config.integrality_n
    try:
        for i, j in _intervals(n):
            for d in range(1, config.symbolic_d + 1):
                for M in _subsets(range(i + 1, j)):
                    expand_T(i, j, d, M, n)
                    fg_polynomials(i, j, d, M, n)
                    result.cases += 2
        for i, j in _intervals(n):
            for d in range(1, config.symbolic_d + 1):
                C = _random_sequence(rng, n - 1, -2, 2)
                for K in weakly_increasing_sequences(i, j, d):
                    for M in _subsets(range(i + 1, j)):
                        L = _random_sequence(rng, d + 1, -2, 2)
                        rho(C, i, j, K, L, M, RationalTag.ONE)
                        result.cases += 1
                        if K != tuple([j] * d):
                            rho(C, i, j, K, (0,) + L[1:], M, RationalTag.INV_ZETA_MINUS_D)
                            result.cases += 1
    except IntegralityError as exc:
        result.fail({"error": str(exc)})
    return result


def T_by_definition(config: BatteryConfig) -> CheckResult:
    """The integral P recursion agrees with the defining recursion of T."""
    result = CheckResult("T_by_definition")
    n = config.symbolic_n
    for i, j in _intervals(n):
        for d in range(1, config.symbolic_d + 1):
            for M in _subsets(range(i + 1, j)):
                result.cases += 1
                if expand_T(i, j, d, M, n) != expand_T_by_definition(i, j, d, M, n):
                    result.fail({"i": i, "j": j, "d": d, "M": list(M)})
                    return result
    return result


def carter_lusztig_definition(config: BatteryConfig) -> CheckResult:
    result = CheckResult("carter_lusztig_definition")
    n = config.symbolic_n + 1
    for i, j in _intervals(n):
        result.cases += 1
        if carter_lusztig(i, j, n) != expand_S_power(i, j, 1, n):
            result.fail({"i": i, "j": j})
            break
    return result


def fg_specialization(config: BatteryConfig) -> CheckResult:
    """f and g specialize to rho with K = (j^d) and K = (j-1, j^{d-1}) respectively."""
    result = CheckResult("fg_specialization")
    rng = config.rng(3)
    n = config.symbolic_n
    for i, j in _intervals(n):
        for d in range(1, 3):
            C = _random_sequence(rng, j - 1, -2, 2)
            for M in _subsets(range(i + 1, j)):
                f, g = fg_polynomials(i, j, d, M, j)
                expected_f = rho(C, i, j, (j,) * d, (0,) * (d + 1), M, RationalTag.ONE)
                K = (j - 1,) + (j,) * (d - 1)
                expected_g = rho(C, i, j, K, (0,) * d + (d,), M, RationalTag.INV_ZETA_MINUS_D)
                result.cases += 2
                if specialize(f, C, j) != expected_f or specialize(g, C, j) * d != expected_g:
                    result.fail({"i": i, "j": j, "d": d, "M": list(M), "C": list(C)})
                    return result
    return result


def ideal_membership_check(config: BatteryConfig) -> CheckResult:
    """f(M) lies in the ideal generated by G_{i,l}(M,N), N in M & (i..l), for every l in M."""
    result = CheckResult("ideal_membership")
    for i, j in _intervals(4):
        if j - i > 3:
            continue
        for d in range(1, 3):
            for M in _subsets(range(i + 1, j)):
                if not M:
                    continue
                f, _ = fg_polynomials(i, j, d, M, j)
                for l in M:
                    below = [m for m in M if i < m < l]
                    generators = [G_polynomial(i, l, d, M, N, j) for N in _subsets(below)]
                    cofactors = ideal_membership(f, generators)
                    if cofactors is None:
                        cofactors = ideal_membership(f, generators, degree_bound=_total_degree(f))
                    result.cases += 1
                    if cofactors is None:
                        result.fail({"i": i, "j": j, "d": d, "M": list(M), "l": l})
                        return result
                    Q = cofactors[0].ring
                    total = sum((h * g.set_ring(Q) for h, g in zip(cofactors, generators)), Q.zero)
                    if total != f.set_ring(Q):
                        result.fail({"i": i, "j": j, "d": d, "M": list(M), "l": l, "reason": "cofactors do not recombine"})
                        return result
    return result


def rho_shift(config: BatteryConfig) -> CheckResult:
    """Adding a to c_j equals appending a to L (or adding it to l_{d+1}); entries of C far from [i-1..j] are inert."""
    result = CheckResult("rho_shift")
    rng = config.rng(4)
    n = config.symbolic_n
    for _ in range(max(config.samples, 20)):
        i = int(rng.integers(1, n - 1))
        j = int(rng.integers(i + 1, n))
        d = int(rng.integers(1, 3))
        K = tuple(sorted(_random_sequence(rng, d, i, j)))
        M = _random_subset(rng, range(i + 1, j))
        C = _random_sequence(rng, n - 1, -2, 2)
        a = int(rng.integers(-2, 3))
        L = _random_sequence(rng, d + int(rng.integers(0, 2)), -1, 2)
        shifted = tuple(c + a if k == j - 1 else c for k, c in enumerate(C))
        L_shifted = L + (a,) if len(L) == d else L[:-1] + (L[-1] + a,)
        tags = [RationalTag.ONE]
        if K != (j,) * d and L[0] == 0:
            tags.append(RationalTag.INV_ZETA_MINUS_D)
        for tag in tags:
            result.cases += 1
            if rho(shifted, i, j, K, L, M, tag) != rho(C, i, j, K, L_shifted, M, tag):
                result.fail({"i": i, "j": j, "K": list(K), "L": list(L), "M": list(M), "C": list(C), "a": a,
                             "R": tag.value})
                return result
        far = tuple(c + 7 if not i - 1 <= k + 1 <= j else c for k, c in enumerate(C))
        result.cases += 1
        if rho(far, i, j, K, L, M) != rho(C, i, j, K, L, M):
            result.fail({"i": i, "j": j, "K": list(K), "L": list(L), "M": list(M), "C": list(C), "reason": "locality"})
            return result
    return result


def _random_phi(rng: np.random.Generator, M: Sequence[int], i: int, j: int, d: int) -> Optional[Dict[int, Tuple[int, int]]]:
    phi, taken = {}, set()
    for m in sorted(M, reverse=True):
        options = [(t, s) for t in range(m, j) for s in range(1, d + 1) if (t, s) not in taken]
        if not options:
            return None
        node = options[int(rng.integers(0, len(options)))]
        phi[m] = node
        taken.add(node)
    return phi


def commpoly1_agreement(config: BatteryConfig) -> CheckResult:
    """The product formula equals rho(C,i,j,K,0,M,1) wherever the ideal generators vanish."""
    result = CheckResult("commpoly1_agreement")
    rng = config.rng(5)
    for _ in range(max(config.samples, 20)):
        n = int(rng.integers(3, 5))
        p = int(rng.choice([3, 5]))
        i = int(rng.integers(1, n))
        j = int(rng.integers(i + 1, n + 1))
        d = int(rng.integers(1, 3))
        K = tuple(sorted(_random_sequence(rng, d, i, j)))
        M = _random_subset(rng, range(i + 1, j))
        phi = _random_phi(rng, M, i, j, d)
        if phi is None:
            result.skipped += 1
            continue
        C = _random_sequence(rng, n - 1, -2, 2)
        lam = solve_generators(n, C, K, phi, _random_sequence(rng, n, 0, 6))
        ctx = BranchContext(lam, lam[:-1], p, require_interlacing=False)
        product = commpoly1_product(ctx, C, i, j, K, M, phi)
        value = evaluate_mod_p(rho(C, i, j, K, (0,) * (d + 1), M), lam, p)
        result.cases += 1
        if product != value:
            result.fail({"lambda": list(lam), "p": p, "i": i, "j": j, "K": list(K), "M": list(M), "C": list(C),
                         "phi": {str(m): list(node) for m, node in phi.items()}, "product": product, "rho": value})
            break
    return result


def residue_consistency(config: BatteryConfig) -> CheckResult:
    """B^{A,k}(i,t) at lambda equals B^{mu,lambda,k}(i,t) for A the partial sums of lambda - mu."""
    result = CheckResult("residue_consistency")
    rng = config.rng(6)
    for _ in range(max(config.samples, 20)):
        n = int(rng.integers(2, 6))
        p = int(rng.choice([3, 5, 7]))
        lam = tuple(sorted(_random_sequence(rng, n, 0, 8), reverse=True))
        mu = _random_interlacing(rng, lam)
        ctx = BranchContext(lam, mu, p)
        A = weight_gaps(lam, mu)
        for i in range(1, n):
            for t in range(i, n):
                for k in range(i, n + 1):
                    if k <= t and t + 1 >= n:
                        continue
                    result.cases += 1
                    left = residue(ResidueKind.B_CK, ctx, i, t, k=k, C=A)
                    right = residue(ResidueKind.B_MU_LAMBDA_K, ctx, i, t, k=k)
                    if left != right:
                        result.fail({"lambda": list(lam), "mu": list(mu), "i": i, "t": t, "k": k})
                        return result
    return result


# Oracle

def _partitions(total: int, parts: int, top: Optional[int] = None):
    top = total if top is None else top
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(total, top), -1, -1):
        for rest in _partitions(total - first, parts - 1, first):
            yield (first,) + rest


def oracle_self_consistency(config: BatteryConfig) -> CheckResult:
    """Weyl dimensions, contravariance, duality and the small simple modules with known dimension."""
    result = CheckResult("oracle_self_consistency")
    p = config.p
    for n in range(2, 5):
        for size in range(0, 9):
            for lam in _partitions(size, n):
                if tensor_dimension(lam) > config.tensor_limit:
                    result.skipped += 1
                    continue
                try:
                    delta = build_weyl(lam, p, config.tensor_limit)
                    simple_quotient(delta, validate=True)
                except OracleConsistencyError as exc:
                    result.fail({"lambda": list(lam), "p": p, "error": str(exc)})
                    return result
                result.cases += 1
                if delta.dimension != weyl_dimension(lam):
                    result.fail({"lambda": list(lam), "dimension": delta.dimension})
                    return result
    delta = build_weyl((2, 1, 0), 3)
    nabla = dual_realization(delta)
    top = highest_vector(nabla)
    result.cases += 3
    if simple_quotient(delta).dimension != 7:
        result.fail({"lambda": [2, 1, 0], "p": 3, "reason": "dim L should be 7"})
    if normal_weights_bruteforce((1, 0), p) != {(1,), (0,)}:
        result.fail({"lambda": [1, 0], "p": p, "reason": "normal weights should be {(1), (0)}"})
    for l in range(1, 3):
        for r in range(1, 3):
            if not apply(nabla, l, l + 1, r, top).is_zero():
                result.fail({"lambda": [2, 1, 0], "reason": f"E_{l}^({r}) does not kill f_lambda"})
    for w in delta.weights():
        for l in range(1, 3):
            result.cases += 1
            if not np.array_equal(nabla.E(l, 1, w), delta.F(l, 1, _raised(w, l)).T):
                result.fail({"lambda": [2, 1, 0], "weight": list(w), "reason": "E on Nabla is not the transpose of F on Delta"})
                return result
    return result


def _raised(w: Weight, l: int) -> Weight:
    """w + alpha_l, the source of F_l landing on w."""
    return tuple(x + (1 if k == l - 1 else -1 if k == l else 0) for k, x in enumerate(w))


def _nabla_cache(tensor_limit: int) -> Callable[[Weight, int], Optional[DualWeylModule]]:
    cache: Dict[Tuple[Weight, int], Optional[DualWeylModule]] = {}

    def get(lam: Weight, p: int) -> Optional[DualWeylModule]:
        if (lam, p) not in cache:
            if tensor_dimension(lam) > tensor_limit:
                cache[(lam, p)] = None
            else:
                cache[(lam, p)] = dual_realization(build_weyl(lam, p, tensor_limit))
        return cache[(lam, p)]

    return get


def _criteria_cases(config: BatteryConfig):
    """The exhaustive (p, n) sweep followed by seeded random n = 4 instances."""
    p, n = config.p, config.n
    for lam in p_restricted_weights(p, n):
        for mu in itertools.product(*(range(lam[k + 1], lam[k] + 1) for k in range(n - 1))):
            for i, j in _intervals(n):
                for d in range(1, p):
                    for M in _subsets(range(i + 1, j)):
                        yield lam, tuple(mu), p, i, j, d, M
    rng = config.rng(7)
    pools = {
        q: [lam for lam in p_restricted_weights(q, 4) if tensor_dimension(lam) <= config.tensor_limit] for q in (3, 5)
    }
    for _ in range(config.samples):
        p = int(rng.choice([3, 5]))
        lam = pools[p][int(rng.integers(0, len(pools[p])))]
        mu = _random_interlacing(rng, lam)
        i = int(rng.integers(1, 4))
        j = int(rng.integers(i + 1, 5))
        d = int(rng.integers(1, p))
        yield lam, mu, p, i, j, d, _random_subset(rng, range(i + 1, j))


def criteria_vs_oracle(config: BatteryConfig) -> Tuple[CheckResult, CheckResult, CheckResult]:
    """
    Compares the combinatorial verdict with the direct computation of T f_{mu,lambda} in Nabla(lambda),
    the kernel test with the cf-chain test, and (for j = n) rho at the partial sums with cf.
    """
    verdicts = CheckResult("criteria_vs_oracle")
    cf_test = CheckResult("high_weight_by_cf")
    bridge = CheckResult("cf_bridge")
    nabla_for = _nabla_cache(config.tensor_limit)
    normalized: Dict[Tuple, ModuleVector] = {}
    first = True
    for lam, mu, p, i, j, d, M in _criteria_cases(config):
        nabla = nabla_for(lam, p)
        if nabla is None:
            verdicts.skipped += 1
            continue
        n = len(lam)
        ctx = BranchContext(lam, mu, p)
        holds = check(CriterionQuery(ctx, i, j, d, M)).holds
        if config.inject_fault and first:
            holds = not holds
        first = False
        if (lam, mu, p) not in normalized:
            normalized[(lam, mu, p)] = normalized_f(nabla, mu)
        f = normalized[(lam, mu, p)]
        image = apply_lowering(nabla, expand_T(i, j, d, M, n), f)
        nonzero = not image.is_zero()
        high = nonzero and is_high_weight(nabla, image)
        case = {"lambda": list(lam), "mu": list(mu), "p": p, "i": i, "j": j, "d": d, "M": list(M)}
        verdicts.cases += 1
        if holds != high:
            verdicts.fail({**case, "criterion": holds, "oracle": high})
        cf_test.cases += 1
        if is_high_weight_by_cf(nabla, image) != high:
            cf_test.fail({**case, "kernel_test": high})
        if j == n:
            bridge.cases += 1
            A = weight_gaps(lam, mu)
            expected = evaluate_mod_p(rho(A, i, n, (n,) * d, (0,) * d, M), lam, p)
            actual = cf(nabla, image)
            if expected != actual:
                bridge.fail({**case, "rho": expected, "cf": actual})
    return verdicts, cf_test, bridge


def existence_vs_sweep(config: BatteryConfig) -> CheckResult:
    """exists_M agrees with the exhaustive search over M, and its M passes the criterion."""
    result = CheckResult("existence_vs_sweep")
    p, n = config.p, config.n
    for lam in p_restricted_weights(p, n):
        for mu in itertools.product(*(range(lam[k + 1], lam[k] + 1) for k in range(n - 1))):
            ctx = BranchContext(lam, tuple(mu), p)
            for i, j in _intervals(n):
                for d in range(1, p):
                    verdict = exists_M_terminal(ctx, i, d) if j == n else exists_M_inner(ctx, i, j, d)
                    passing = sweep_M(ctx, i, j, d)
                    result.cases += 1
                    if (verdict.holds != bool(passing) or (verdict.holds and tuple(verdict.M) not in passing)
                            or verdict.rejected_M is not None):
                        result.fail({"lambda": list(lam), "mu": list(mu), "p": p, "i": i, "j": j, "d": d,
                                     "exists": verdict.holds, "sweep": [list(M) for M in passing],
                                     "rejected_M": list(verdict.rejected_M) if verdict.rejected_M is not None else None})
                        return result
    return result


def carter_lusztig_actions(config: BatteryConfig) -> CheckResult:
    """
    On the highest vector of Delta(lambda): E_{l-1} S_{i,j}^d v = 0 for l != j, and
    E_{j-1}^{(l)} S_{i,j}^d v = C(d,l) S_{i,j-1}^l S_{i,j}^{d-l} (C(i,j)-d+l-1)...(C(i,j)-d) v, zero for l > d.
    """
    result = CheckResult("carter_lusztig_actions")
    p = config.p
    for n in (2, 3):
        for lam in p_restricted_weights(p, n):
            delta = build_weyl(lam, p, config.tensor_limit)
            top = highest_vector(delta)
            for i, j in _intervals(n):
                for d in range(1, p):
                    image = apply_lowering(delta, expand_S_power(i, j, d, n), top)
                    for l in range(2, n + 1):
                        if l == j:
                            continue
                        result.cases += 1
                        if not apply(delta, l - 1, l, 1, image).is_zero():
                            result.fail({"lambda": list(lam), "i": i, "j": j, "d": d, "l": l, "reason": "annihilation"})
                            return result
                    C_value = evaluate_at(C_poly(h_ring(n), i, j), lam)
                    for l in range(1, d + 2):
                        left = apply(delta, j - 1, j, l, image)
                        if l > d:
                            right = np.zeros(len(left.coords), dtype=np.int64)
                        else:
                            scalar = math.comb(d, l) * math.prod(C_value - d + q for q in range(l))
                            w = top if d == l else apply_lowering(delta, expand_S_power(i, j, d - l, n), top)
                            if j - 1 > i:
                                w = apply_lowering(delta, expand_S_power(i, j - 1, l, n), w)
                            right = (scalar * w.coords) % p
                        result.cases += 1
                        if not np.array_equal(left.coords % p, right):
                            result.fail({"lambda": list(lam), "i": i, "j": j, "d": d, "l": l, "reason": "commutation"})
                            return result
    return result


def _soundness_case(args: Tuple[Weight, int, int]) -> Optional[dict]:
    lam, p, tensor_limit = args
    report = reach_report(lam, p)
    normal = normal_weights_bruteforce(lam, p, tensor_limit)
    if not report.reached_d1 <= report.reached_all:
        return {"lambda": list(lam), "p": p, "reason": "d = 1 closure is not contained in the full closure"}
    extra = report.reached_all - normal
    if extra:
        return {"lambda": list(lam), "p": p, "reached_but_not_normal": [list(mu) for mu in sorted(extra)]}
    return None


def generation_soundness(config: BatteryConfig) -> CheckResult:
    """Every reached weight is normal according to the oracle."""
    result = CheckResult("generation_soundness")
    p = config.p
    tasks = [(lam, p, config.tensor_limit) for n in range(2, config.n + 1) for lam in p_restricted_weights(p, n)]
    sample = [lam for lam in p_restricted_weights(p, 4) if tensor_dimension(lam) <= config.tensor_limit]
    rng = config.rng(8)
    for k in sorted(rng.choice(len(sample), size=min(10, len(sample)), replace=False)):
        tasks.append((sample[int(k)], p, config.tensor_limit))
    if config.jobs <= 1:
        outcomes = [_soundness_case(task) for task in tasks]
    else:
        with Pool(config.jobs) as pool:
            outcomes = pool.map(_soundness_case, tasks)
    for outcome in outcomes:
        result.cases += 1
        if outcome is not None:
            result.fail(outcome)
            break
    return result


CHECKS = (
    "matching_vs_hall",
    "integrality",
    "T_by_definition",
    "carter_lusztig_definition",
    "fg_specialization",
    "ideal_membership",
    "rho_shift",
    "commpoly1_agreement",
    "residue_consistency",
    "oracle_self_consistency",
    "criteria_vs_oracle",
    "existence_vs_sweep",
    "carter_lusztig_actions",
    "generation_soundness",
)

_SINGLE = {
    "matching_vs_hall": matching_vs_hall,
    "integrality": integrality_sweep,
    "T_by_definition": T_by_definition,
    "carter_lusztig_definition": carter_lusztig_definition,
    "fg_specialization": fg_specialization,
    "ideal_membership": ideal_membership_check,
    "rho_shift": rho_shift,
    "commpoly1_agreement": commpoly1_agreement,
    "residue_consistency": residue_consistency,
    "oracle_self_consistency": oracle_self_consistency,
    "existence_vs_sweep": existence_vs_sweep,
    "carter_lusztig_actions": carter_lusztig_actions,
    "generation_soundness": generation_soundness,
}


def run_battery(config: BatteryConfig) -> List[CheckResult]:
    """
    Runs the selected checks in a fixed order.

    :param config: battery parameters; config.only restricts the checks by name

    :return: one CheckResult per check (criteria_vs_oracle also yields high_weight_by_cf and cf_bridge)
    """
    unknown = set(config.only) - set(CHECKS)
    if unknown:
        raise ValueError(f"checks should be among {', '.join(CHECKS)}, but received {', '.join(sorted(unknown))}")
    results = []
    for name in CHECKS:
        if config.only and name not in config.only:
            continue
        _logger.info("Running check %s", name)
        if name == "criteria_vs_oracle":
            results.extend(criteria_vs_oracle(config))
        else:
            results.append(_SINGLE[name](config))
    return results


def summarize(results: Sequence[CheckResult]) -> dict:
    return {
        "passed": all(r.passed for r in results),
        "checks": [r.to_dict() for r in results],
        "failed": [r.name for r in results if not r.passed],
    }
