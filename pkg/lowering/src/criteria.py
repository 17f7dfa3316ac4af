import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .combinatorics import (
    BranchContext,
    Node,
    ResidueKind,
    c_set,
    interlaces,
    node_set_K,
    residue,
    weakly_increasing_sequences,
    x_mu,
    x_mu_lambda,
)
from .matching import OrderSpec, augmenting_matching, find_monotone_injection, validate_injection


_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CriterionQuery:
    """
    Asks whether T_{i,j}^{(d)}(M,1) f_{mu,lambda} is a nonzero GL_{n-1}-high weight vector.
    """
    ctx: BranchContext
    i: int
    j: int
    d: int
    M: Tuple[int, ...] = ()

    def __post_init__(self):
        # Validation checks
        n = self.ctx.n
        if not 1 <= self.i < self.j <= n:
            raise ValueError(f"indices should satisfy 1 <= i < j <= {n}, but received i={self.i}, j={self.j}")
        self.ctx.validate_power(self.d)
        if not interlaces(self.ctx.mu, self.ctx.lam):
            raise ValueError(f"mu should interlace lambda, but received mu={self.ctx.mu}, lambda={self.ctx.lam}")
        M = tuple(sorted(set(int(m) for m in self.M)))
        if any(not self.i < m < self.j for m in M):
            raise ValueError(f"M should be a subset of ({self.i}..{self.j}), but received {self.M}")
        # Set attributes
        object.__setattr__(self, "M", M)

    @property
    def terminal(self) -> bool:
        return self.j == self.ctx.n

    def all_nodes(self) -> List[Node]:
        return [(t, s) for t in range(self.i, self.j) for s in range(1, self.d + 1)]


@dataclass
class SplitWitness:
    K: Tuple[int, ...]
    gamma: Dict[int, Node]
    distinguished: Optional[Node] = None

    def to_dict(self) -> dict:
        return {
            "K": list(self.K),
            "gamma": {str(m): list(node) for m, node in self.gamma.items()},
            "distinguished": list(self.distinguished) if self.distinguished else None,
        }


@dataclass
class CriterionVerdict:
    holds: bool
    reason: str = ""
    gamma: Optional[Dict[int, Node]] = None
    per_K: List[SplitWitness] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "reason": self.reason,
            "gamma": {str(m): list(node) for m, node in self.gamma.items()} if self.gamma is not None else None,
            "per_K": [w.to_dict() for w in self.per_K],
        }


@dataclass
class ExistenceVerdict:
    holds: bool
    M: Optional[Tuple[int, ...]] = None
    epsilon: Optional[Dict[Node, int]] = None
    tau: Optional[Dict[Node, Node]] = None
    theta: Optional[Dict[Tuple[int, ...], Dict[int, Node]]] = None
    reason: str = ""
    # Im(epsilon) when the criterion rejected it
    rejected_M: Optional[Tuple[int, ...]] = None

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "M": list(self.M) if self.M is not None else None,
            "rejected_M": list(self.rejected_M) if self.rejected_M is not None else None,
            "epsilon": [[list(x), y] for x, y in self.epsilon.items()] if self.epsilon is not None else None,
            "tau": [[list(x), list(y)] for x, y in self.tau.items()] if self.tau is not None else None,
            "theta": (
                [{"K": list(K), "map": [[x, list(y)] for x, y in m.items()]} for K, m in self.theta.items()]
                if self.theta is not None else None
            ),
            "reason": self.reason,
        }


def _edge(ctx: BranchContext, d: int, K: Optional[Tuple[int, ...]]):
    """Edge predicate of condition (1): t >= m and the residue at (m,t) equals d - s."""
    def adjacent(m: int, node: Node) -> bool:
        t, s = node
        if t < m:
            return False
        if K is None:
            value = residue(ResidueKind.B_MU_LAMBDA, ctx, m, t)
        else:
            value = residue(ResidueKind.B_MU_LAMBDA_K, ctx, m, t, k=K[s - 1])
        return value == (d - s) % ctx.p
    return adjacent


def _match_covering(q: CriterionQuery, forced: List[Node], K: Optional[Tuple[int, ...]]) -> Optional[Dict[int, Node]]:
    """
    Saturating matching of M whose image contains every node of forced.

    The forced nodes are matched into M first, then the matching is augmented from the
    remaining elements of M; augmenting paths never uncover a matched node.
    """
    adjacent = _edge(q.ctx, q.d, K)
    reverse = augmenting_matching(forced, list(q.M), lambda node, m: adjacent(m, node))
    if len(reverse) < len(forced):
        return None
    initial = {m: node for node, m in reverse.items()}
    gamma = augmenting_matching(list(q.M), q.all_nodes(), adjacent, initial=initial)
    if len(gamma) < len(q.M):
        return None
    return {m: gamma[m] for m in q.M}


def _match_avoiding(q: CriterionQuery, avoid: Node, K: Tuple[int, ...]) -> Optional[Dict[int, Node]]:
    adjacent = _edge(q.ctx, q.d, K)
    targets = [node for node in q.all_nodes() if node != avoid]
    gamma = augmenting_matching(list(q.M), targets, adjacent)
    if len(gamma) < len(q.M):
        return None
    return {m: gamma[m] for m in q.M}


def check_terminal(q: CriterionQuery) -> CriterionVerdict:
    """
    Criterion for j = n.

    :param q: query with j = n

    :return: verdict carrying the injection gamma when it holds
    """
    if not q.terminal:
        raise ValueError(f"check_terminal needs j = {q.ctx.n}, but received j={q.j}")
    forced = x_mu_lambda(q.ctx, q.i, q.j, q.d)
    gamma = _match_covering(q, forced, None)
    if gamma is None:
        return CriterionVerdict(
            holds=False,
            reason=f"no injection of M={list(q.M)} covering X^(mu,lambda)={forced}",
        )
    return CriterionVerdict(holds=True, gamma=gamma)


def check_inner(q: CriterionQuery) -> CriterionVerdict:
    """
    Criterion for j < n, checked for every weakly increasing K in [i..j]^d.

    :param q: query with j < n

    :return: verdict with one witness per K; on failure the reason names the first failing K
    """
    if q.terminal:
        raise ValueError(f"check_inner needs j < {q.ctx.n}, but received j={q.j}")
    top = tuple([q.j] * q.d)
    witnesses = []
    for K in weakly_increasing_sequences(q.i, q.j, q.d):
        K = tuple(K)
        if K == top:
            forced = x_mu_lambda(q.ctx, q.i, q.j, q.d)
            gamma = _match_covering(q, forced, K)
            if gamma is None:
                return CriterionVerdict(
                    holds=False, per_K=witnesses,
                    reason=f"K={list(K)}: no injection of M={list(q.M)} covering X^(mu,lambda)={forced}",
                )
            witnesses.append(SplitWitness(K=K, gamma=gamma))
            continue
        candidates = node_set_K(q.ctx, q.i, q.j, q.d, K)
        found = None
        for node in candidates:
            gamma = _match_avoiding(q, node, K)
            if gamma is not None:
                found = SplitWitness(K=K, gamma=gamma, distinguished=node)
                break
        if found is None:
            return CriterionVerdict(
                holds=False, per_K=witnesses,
                reason=f"K={list(K)}: every node of X^(mu,lambda,K)={candidates} is needed by M={list(q.M)}",
            )
        witnesses.append(found)
    return CriterionVerdict(holds=True, per_K=witnesses)


def check(q: CriterionQuery) -> CriterionVerdict:
    return check_terminal(q) if q.terminal else check_inner(q)


def _candidate_images(sources: List[Node], targets: List[int], spec: OrderSpec):
    """Yields (image, epsilon) for every |sources|-subset of targets admitting a bijection under spec."""
    for image in itertools.combinations(targets, len(sources)):
        epsilon = find_monotone_injection(sources, image, spec)
        if epsilon is not None:
            yield tuple(image), epsilon


def _first_valid_M(ctx: BranchContext, i: int, j: int, d: int, preferred: Tuple[int, ...],
                   sources: List[Node], targets: List[int]):
    """
    Returns (M, epsilon) for the first image that passes the criterion, starting with the preferred one.
    """
    if check(CriterionQuery(ctx, i, j, d, preferred)).holds:
        return preferred, None
    _logger.warning("M=%s from the canonical epsilon fails the criterion at lambda=%s mu=%s (%d,%d,%d); "
                    "trying other images", preferred, ctx.lam, ctx.mu, i, j, d)
    for image, epsilon in _candidate_images(sources, targets, OrderSpec.first_decreasing()):
        if check(CriterionQuery(ctx, i, j, d, image)).holds:
            return image, epsilon
    return None, None


def exists_M_terminal(ctx: BranchContext, i: int, d: int, validate: bool = True) -> ExistenceVerdict:
    """
    Decides whether some M makes T_{i,n}^{(d)}(M,1) f_{mu,lambda} a nonzero high weight vector.

    :param ctx: branch context
    :param i: column index, 1 <= i < n
    :param d: power, 1 <= d < p
    :param validate: re-check the produced M with check_terminal

    :return: verdict with M = Im(epsilon)
    """
    n = ctx.n
    if not 1 <= i < n:
        raise ValueError(f"i should be in [1..{n - 1}], but received {i}")
    ctx.validate_power(d)
    sources = x_mu_lambda(ctx, i, n, d)
    targets = c_set(ctx, i, n)
    epsilon = find_monotone_injection(sources, targets, OrderSpec.first_decreasing())
    if epsilon is None:
        return ExistenceVerdict(holds=False, reason=f"no decreasing injection {sources} -> {targets}")
    M = tuple(sorted(epsilon.values()))
    rejected = None
    if validate:
        valid, other = _first_valid_M(ctx, i, n, d, M, sources, targets)
        if valid is None:
            return ExistenceVerdict(holds=False, rejected_M=M,
                                    reason=f"no image of {sources} in {targets} passes the criterion")
        if other is not None:
            rejected, M, epsilon = M, valid, other
    return ExistenceVerdict(holds=True, M=M, epsilon=epsilon, rejected_M=rejected)


def _theta_maps(ctx: BranchContext, i: int, j: int, d: int, M: Tuple[int, ...]) -> Optional[dict]:
    top = tuple([j] * d)
    theta = {}
    for K in weakly_increasing_sequences(i, j, d):
        K = tuple(K)
        if K == top:
            continue
        targets = node_set_K(ctx, i, j, d, K)
        found = find_monotone_injection((i,) + M, targets, OrderSpec.first_increasing())
        if found is None:
            return None
        theta[K] = found
    return theta


def exists_M_inner(ctx: BranchContext, i: int, j: int, d: int, mode: str = "part2",
                   validate: bool = True) -> ExistenceVerdict:
    """
    Decides whether some M makes T_{i,j}^{(d)}(M,1) f_{mu,lambda} a nonzero high weight vector, j < n.

    :param ctx: branch context
    :param i: column index
    :param j: column index, i < j < n
    :param d: power, 1 <= d < p
    :param mode: "part2" uses the epsilon/tau formulation, "part1" the epsilon/theta_K one
    :param validate: re-check the produced M with check_inner

    :return: verdict with M and the witnesses of the chosen formulation
    """
    n = ctx.n
    if not 1 <= i < j < n:
        raise ValueError(f"indices should satisfy 1 <= i < j < {n}, but received i={i}, j={j}")
    ctx.validate_power(d)
    sources = x_mu_lambda(ctx, i, j, d)
    targets = c_set(ctx, i, j)
    if mode == "part1":
        for image, epsilon in _candidate_images(sources, targets, OrderSpec.first_decreasing()):
            theta = _theta_maps(ctx, i, j, d, image)
            if theta is not None:
                return ExistenceVerdict(holds=True, M=image, epsilon=epsilon, theta=theta)
        return ExistenceVerdict(holds=False, reason="no image of epsilon admits every theta_K")
    if mode != "part2":
        raise ValueError(f"mode should be one of ['part1', 'part2'], but received {mode}")

    corner = (j - 1, 1)
    layer = x_mu(ctx, i, j, d)
    if corner not in layer:
        return ExistenceVerdict(holds=False, reason=f"{corner} is not in X^mu={layer}")
    if corner in sources:
        return ExistenceVerdict(holds=False, reason=f"{corner} is in X^(mu,lambda)={sources}")
    epsilon = find_monotone_injection(sources, targets, OrderSpec.first_decreasing())
    if epsilon is None:
        return ExistenceVerdict(holds=False, reason=f"no decreasing injection {sources} -> {targets}")
    tau = find_monotone_injection(
        sources, [node for node in layer if node != corner], OrderSpec.increasing_then_decreasing()
    )
    if tau is None:
        return ExistenceVerdict(holds=False, reason=f"no tau injection {sources} -> {layer} without {corner}")
    M = tuple(sorted(epsilon.values()))
    rejected = None
    if validate:
        valid, other = _first_valid_M(ctx, i, j, d, M, sources, targets)
        if valid is None:
            return ExistenceVerdict(holds=False, rejected_M=M,
                                    reason=f"no image of {sources} in {targets} passes the criterion")
        if other is not None:
            rejected, M, epsilon = M, valid, other
    return ExistenceVerdict(holds=True, M=M, epsilon=epsilon, tau=tau, rejected_M=rejected)


def sweep_M(ctx: BranchContext, i: int, j: int, d: int) -> List[Tuple[int, ...]]:
    """Every M in (i..j) passing the criterion, by exhaustive enumeration."""
    inner = list(range(i + 1, j))
    passing = []
    for size in range(len(inner) + 1):
        for M in itertools.combinations(inner, size):
            if check(CriterionQuery(ctx, i, j, d, M)).holds:
                passing.append(M)
    return passing


def revalidate(q: CriterionQuery, verdict: CriterionVerdict) -> bool:
    """Independently re-checks every witness of a holding verdict against its defining conditions."""
    if not verdict.holds:
        return True
    if q.terminal:
        adjacent = _edge(q.ctx, q.d, None)
        gamma = verdict.gamma
        if not validate_injection(gamma, q.M, q.all_nodes(), OrderSpec.first_increasing()):
            return False
        if not all(adjacent(m, node) for m, node in gamma.items()):
            return False
        return set(x_mu_lambda(q.ctx, q.i, q.j, q.d)) <= set(gamma.values())
    top = tuple([q.j] * q.d)
    for witness in verdict.per_K:
        adjacent = _edge(q.ctx, q.d, witness.K)
        if not validate_injection(witness.gamma, q.M, q.all_nodes(), OrderSpec.first_increasing()):
            return False
        if not all(adjacent(m, node) for m, node in witness.gamma.items()):
            return False
        image = set(witness.gamma.values())
        if witness.K == top:
            if not set(x_mu_lambda(q.ctx, q.i, q.j, q.d)) <= image:
                return False
        elif witness.distinguished is None or witness.distinguished in image or \
                witness.distinguished not in node_set_K(q.ctx, q.i, q.j, q.d, witness.K):
            return False
    return len(verdict.per_K) == sum(1 for _ in weakly_increasing_sequences(q.i, q.j, q.d))
