import logging
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from multiprocessing import Pool
from typing import Dict, List, Optional, Sequence, Tuple

from .combinatorics import (
    BranchContext,
    Weight,
    add_weights,
    format_weight,
    interlaces,
    is_dominant,
    p_restricted_weights,
    unit_weight,
)
from .criteria import ExistenceVerdict, exists_M_inner, exists_M_terminal


_logger = logging.getLogger(__name__)

# (p, n) -> maximal number of weights reached only through powers d >= 2
KNOWN_TABLE1 = {(3, 2): 0, (3, 3): 1, (3, 4): 3, (5, 3): 4}
EXTENDED_TABLE1 = {(3, 5): 14, (7, 3): 9}

Step = Tuple[int, int, int, Tuple[int, ...]]


class ReachMode(str, Enum):
    ALL_D = "all_d"
    D_EQUALS_1 = "d_equals_1"


@dataclass(frozen=True)
class ReachNode:
    mu: Weight
    provenance: Tuple[Step, ...] = ()

    def to_dict(self) -> dict:
        return {
            "mu": list(self.mu),
            "chain": [{"i": i, "j": j, "d": d, "M": list(M)} for i, j, d, M in self.provenance],
        }


@dataclass
class FlaggedWeight:
    mu: Weight
    parent: Weight
    step: Step
    reason: str

    def to_dict(self) -> dict:
        i, j, d, M = self.step
        return {
            "mu": list(self.mu),
            "parent": list(self.parent),
            "step": {"i": i, "j": j, "d": d, "M": list(M)},
            "reason": self.reason,
        }


@dataclass
class ReachResult:
    lam: Weight
    p: int
    mode: ReachMode
    nodes: Dict[Weight, ReachNode] = field(default_factory=dict)
    flagged: List[FlaggedWeight] = field(default_factory=list)

    @property
    def reached(self) -> set:
        return set(self.nodes)


@dataclass
class ReachReport:
    lam: Weight
    p: int
    all_d: ReachResult
    d1: ReachResult

    @property
    def reached_all(self) -> set:
        return self.all_d.reached

    @property
    def reached_d1(self) -> set:
        return self.d1.reached

    @property
    def difference(self) -> List[Weight]:
        return sorted(self.reached_all - self.reached_d1, reverse=True)

    def to_dict(self) -> dict:
        return {
            "lambda": list(self.lam),
            "p": self.p,
            "reached_all": [self.all_d.nodes[mu].to_dict() for mu in sorted(self.reached_all, reverse=True)],
            "reached_d1": [list(mu) for mu in sorted(self.reached_d1, reverse=True)],
            "difference": [list(mu) for mu in self.difference],
            "difference_count": len(self.difference),
            "flagged": [f.to_dict() for f in self.all_d.flagged],
        }


def _moves(ctx: BranchContext, d: int) -> List[Tuple[int, int, ExistenceVerdict]]:
    """Every (i, j) at power d for which some M works, with its verdict."""
    n = ctx.n
    moves = []
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            if j == n:
                verdict = exists_M_terminal(ctx, i, d)
            else:
                verdict = exists_M_inner(ctx, i, j, d)
            if verdict.holds:
                moves.append((i, j, verdict))
    return moves


def produced_weight(mu: Weight, i: int, j: int, d: int) -> Weight:
    """-d eps_i for the terminal step, -d eps_i + d eps_j otherwise."""
    n = len(mu) + 1
    moved = add_weights(mu + (0,), unit_weight(n, i, -d))
    if j < n:
        moved = add_weights(moved, unit_weight(n, j, d))
    return moved[:-1]


def reachable(lam: Sequence[int], p: int, mode: ReachMode = ReachMode.ALL_D) -> ReachResult:
    """
    Breadth-first closure of the top weight under the lowering steps allowed by the criteria.

    :param lam: dominant GL_n weight
    :param p: prime
    :param mode: all powers 1 <= d < p, or d = 1 only

    :return: reached weights with a witness chain each, plus flagged products
    """
    lam = tuple(lam)
    mode = ReachMode(mode)
    if not is_dominant(lam):
        raise ValueError(f"lambda should be dominant, but received {lam}")
    powers = range(1, p) if mode == ReachMode.ALL_D else range(1, min(2, p))
    start = lam[:-1]
    result = ReachResult(lam, p, mode)
    result.nodes[start] = ReachNode(start)
    queue = deque([start])
    while queue:
        mu = queue.popleft()
        ctx = BranchContext(lam, mu, p)
        chain = result.nodes[mu].provenance
        for d in powers:
            for i, j, verdict in _moves(ctx, d):
                step = (i, j, d, tuple(verdict.M))
                nu = produced_weight(mu, i, j, d)
                if nu in result.nodes:
                    continue
                if not is_dominant(nu) or not interlaces(nu, lam):
                    reason = "not dominant" if not is_dominant(nu) else "does not interlace lambda"
                    _logger.warning("Step %s from %s produced %s, which %s", step, mu, nu, reason)
                    result.flagged.append(FlaggedWeight(nu, mu, step, reason))
                    continue
                result.nodes[nu] = ReachNode(nu, chain + (step,))
                queue.append(nu)
    _logger.debug("Reached %d weights for lambda=%s, p=%d, mode=%s", len(result.nodes), lam, p, mode.value)
    return result


def reach_report(lam: Sequence[int], p: int) -> ReachReport:
    lam = tuple(lam)
    return ReachReport(lam, p, reachable(lam, p, ReachMode.ALL_D), reachable(lam, p, ReachMode.D_EQUALS_1))


def _difference_count(args: Tuple[Weight, int]) -> Tuple[Weight, int]:
    lam, p = args
    return lam, len(reach_report(lam, p).difference)


def difference_counts(p: int, n: int, jobs: int = 1) -> List[Tuple[Weight, int]]:
    """|reached_all - reached_d1| for every p-restricted lambda with lam_n = 0, in enumeration order."""
    if n < 2:
        raise ValueError(f"n should be at least 2, but received {n}")
    tasks = [(lam, p) for lam in p_restricted_weights(p, n)]
    if jobs <= 1:
        return [_difference_count(task) for task in tasks]
    with Pool(jobs) as pool:
        return pool.map(_difference_count, tasks)


def table1_entry(p: int, n: int, jobs: int = 1) -> Tuple[int, Optional[Weight]]:
    """
    Maximum over p-restricted lambda of the number of weights reached only with some d >= 2.

    :return: (maximum, first lambda attaining it)
    """
    return _argmax(difference_counts(p, n, jobs))


def _argmax(counts: List[Tuple[Weight, int]]) -> Tuple[int, Optional[Weight]]:
    best, argmax = -1, None
    for lam, count in counts:
        if count > best:
            best, argmax = count, lam
    return best, argmax


def discrepancy_report(p: int, n: int, expected: int, counts: List[Tuple[Weight, int]]) -> Optional[dict]:
    """
    Localizes a mismatch with a known entry: the first lambda whose count exceeds the expected
    maximum, or the best lambda when every count falls short.
    """
    if not counts:
        return None
    best = max(count for _, count in counts)
    if best == expected:
        return None
    if best > expected:
        lam = next(lam for lam, count in counts if count > expected)
    else:
        lam = next(lam for lam, count in counts if count == best)
    report = reach_report(lam, p)
    return {
        "p": p,
        "n": n,
        "expected": expected,
        "computed": best,
        "lambda": list(lam),
        "reached_all": [list(mu) for mu in sorted(report.reached_all, reverse=True)],
        "reached_d1": [list(mu) for mu in sorted(report.reached_d1, reverse=True)],
        "chains": [report.all_d.nodes[mu].to_dict() for mu in report.difference],
    }


def table1_rows(cells: Sequence[Tuple[int, int]], jobs: int = 1) -> Tuple[List[dict], List[dict]]:
    """
    Computes the requested table entries.

    :return: (rows with p, n, max, argmax_lambda, elapsed_ms, expected; discrepancy reports)
    """
    known = {**KNOWN_TABLE1, **EXTENDED_TABLE1}
    rows, discrepancies = [], []
    for p, n in cells:
        started = time.perf_counter()
        counts = difference_counts(p, n, jobs)
        best, argmax = _argmax(counts)
        elapsed = int((time.perf_counter() - started) * 1000)
        expected = known.get((p, n))
        rows.append({
            "p": p,
            "n": n,
            "max": best,
            "argmax_lambda": format_weight(argmax) if argmax is not None else "",
            "elapsed_ms": elapsed,
            "expected": expected if expected is not None else "",
        })
        _logger.info("Table entry p=%d n=%d: %d (lambda=%s, %d ms)", p, n, best, argmax, elapsed)
        if expected is not None:
            report = discrepancy_report(p, n, expected, counts)
            if report is not None:
                _logger.warning("Table entry p=%d n=%d differs from %d", p, n, expected)
                discrepancies.append(report)
    return rows, discrepancies
