import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

from sympy import isprime


Weight = Tuple[int, ...]
Node = Tuple[int, int]


def parse_weight(text: str) -> Weight:
    """
    Parses the comma-separated text form of a weight, e.g. "3,1,0".

    :param text: comma-separated integers

    :return: weight as a tuple of integers
    """
    if text is None or not str(text).strip():
        raise ValueError(f"weight should be a comma-separated list of integers, but received {text!r}")
    try:
        return tuple(int(part) for part in str(text).split(","))
    except ValueError:
        raise ValueError(f"weight should be a comma-separated list of integers, but received {text!r}")


def format_weight(w: Sequence[int]) -> str:
    return ",".join(str(x) for x in w)


def is_dominant(w: Sequence[int]) -> bool:
    return all(w[k] >= w[k + 1] for k in range(len(w) - 1))


def interlaces(mu: Sequence[int], lam: Sequence[int]) -> bool:
    """
    Checks the branching relation lam_{i+1} <= mu_i <= lam_i for every i.

    :param mu: weight of length n-1
    :param lam: weight of length n

    :return: True if mu interlaces lam
    """
    if len(mu) != len(lam) - 1:
        raise ValueError(f"mu should have length {len(lam) - 1}, but received {len(mu)}")
    return all(lam[k + 1] <= mu[k] <= lam[k] for k in range(len(mu)))


def unit_weight(n: int, i: int, scale: int = 1) -> Weight:
    """Returns scale * epsilon_i (1-based) of length n."""
    return tuple(scale if k == i - 1 else 0 for k in range(n))


def add_weights(*weights: Sequence[int]) -> Weight:
    return tuple(sum(parts) for parts in zip(*weights))


def weight_gaps(lam: Sequence[int], mu: Sequence[int]) -> Tuple[int, ...]:
    """
    Partial sums a_i = sum_{s <= i} (lam_s - mu_s) for i in [1..n-1].

    The same sequence is the E-exponent vector of the normalization product and the
    sequence C fed to the coefficient polynomials in the cf bridge.
    """
    return tuple(itertools.accumulate(lam[k] - mu[k] for k in range(len(mu))))


def p_restricted_weights(p: int, n: int) -> Iterator[Weight]:
    """
    Enumerates the p-restricted weights with last entry 0, in lexicographic order of the
    gap vector (lam_1 - lam_2, ..., lam_{n-1} - lam_n).
    """
    for gaps in itertools.product(range(p), repeat=n - 1):
        lam = [0] * n
        for k in range(n - 2, -1, -1):
            lam[k] = lam[k + 1] + gaps[k]
        yield tuple(lam)


def weakly_increasing_sequences(lo: int, hi: int, d: int) -> Iterator[Tuple[int, ...]]:
    """All K = (k_1 <= ... <= k_d) with entries in [lo..hi]; there are C(hi - lo + d, d) of them."""
    return itertools.combinations_with_replacement(range(lo, hi + 1), d)


def clamp_sequence(K: Sequence[int], lo: int, hi: int) -> Tuple[int, ...]:
    """K^{(lo,hi)}: every entry clamped into [lo..hi]."""
    return tuple(min(hi, max(lo, k)) for k in K)


@dataclass(frozen=True)
class BranchContext:
    """
    A pair of weights lam (GL_n) and mu (GL_{n-1}) together with the characteristic p.
    """
    lam: Weight
    mu: Weight
    p: int
    require_interlacing: bool = True

    def __post_init__(self):
        # Validation checks
        if not isinstance(self.p, int) or self.p <= 0 or not isprime(self.p):
            raise ValueError(f"p should be a prime number, but received {self.p}")
        if len(self.lam) < 2:
            raise ValueError(f"lambda should have at least 2 entries, but received {self.lam}")
        if len(self.mu) != len(self.lam) - 1:
            raise ValueError(
                f"mu should have length {len(self.lam) - 1} to match lambda {self.lam}, but received {self.mu}"
            )
        if self.require_interlacing and not interlaces(self.mu, self.lam):
            raise ValueError(f"mu should interlace lambda {self.lam}, but received {self.mu}")
        # Set attributes
        object.__setattr__(self, "lam", tuple(int(x) for x in self.lam))
        object.__setattr__(self, "mu", tuple(int(x) for x in self.mu))

    @property
    def n(self) -> int:
        return len(self.lam)

    def lam_at(self, k: int) -> int:
        if not 1 <= k <= self.n:
            raise ValueError(f"lambda index should be in [1..{self.n}], but received {k}")
        return self.lam[k - 1]

    def mu_at(self, k: int) -> int:
        if not 1 <= k <= self.n - 1:
            raise ValueError(f"mu index should be in [1..{self.n - 1}], but received {k}")
        return self.mu[k - 1]

    def validate_power(self, d: int):
        if not 1 <= d < self.p:
            raise ValueError(f"d should be in [1..{self.p - 1}], but received {d}")


class ResidueKind(str, Enum):
    B_MU_LAMBDA = "B_mu_lambda"
    B_MU_LAMBDA_K = "B_mu_lambda_k"
    C_MU = "C_mu"
    B_CK = "B_Ck"


def residue(kind: ResidueKind, ctx: BranchContext, i: int, t: int, k: Optional[int] = None,
            C: Optional[Sequence[int]] = None) -> int:
    """
    Evaluates one of the residues driving the node sets, reduced to [0..p).

    :param kind: which residue to evaluate
    :param ctx: branch context holding lam, mu and p
    :param i: row index (1-based)
    :param t: column index (1-based)
    :param k: split point, required for B_mu_lambda_k and B_Ck
    :param C: integer sequence of length n-1, required for B_Ck

    :return: residue in [0..p)
    """
    kind = ResidueKind(kind)
    if kind in (ResidueKind.B_MU_LAMBDA_K, ResidueKind.B_CK) and k is None:
        raise ValueError(f"residue {kind.value} needs the split point k")
    if kind == ResidueKind.C_MU:
        value = t - i + ctx.mu_at(i) - ctx.mu_at(t)
    elif kind == ResidueKind.B_MU_LAMBDA:
        value = t - i + ctx.mu_at(i) - ctx.lam_at(t + 1)
    elif kind == ResidueKind.B_MU_LAMBDA_K:
        # mu-form once the split point has been passed
        tail = ctx.mu_at(t + 1) if k <= t else ctx.lam_at(t + 1)
        value = t - i + ctx.mu_at(i) - tail
    else:
        c = padded_sequence(C, ctx.n)
        if not 1 <= i < ctx.n or not 1 <= t < ctx.n:
            raise ValueError(f"indices should be in [1..{ctx.n - 1}], but received i={i}, t={t}")
        value = t - i + ctx.lam_at(i) - ctx.lam_at(t + 1) + c[i - 1] - c[i]
        if t >= k:
            value += c[t + 1] - c[t]
    return value % ctx.p


def padded_sequence(C: Optional[Sequence[int]], n: int) -> Tuple[int, ...]:
    """
    Returns (c_0, c_1, ..., c_{n-1}, c_n) with c_0 = c_n = 0.

    :param C: integer sequence (c_1, ..., c_{n-1})
    :param n: rank
    """
    if C is None or len(C) != n - 1:
        raise ValueError(f"C should have length {n - 1}, but received {C}")
    return (0,) + tuple(int(c) for c in C) + (0,)


class NodeSets(NamedTuple):
    c_mu: List[int]
    x_mu: Optional[List[Node]]
    x_mu_lambda: List[Node]


def _validate_range(ctx: BranchContext, i: int, j: int, d: int):
    if not 1 <= i < j <= ctx.n:
        raise ValueError(f"indices should satisfy 1 <= i < j <= {ctx.n}, but received i={i}, j={j}")
    ctx.validate_power(d)


def c_set(ctx: BranchContext, i: int, j: int) -> List[int]:
    """The columns t in (i..j) with C^mu(i,t) = 0 mod p."""
    return [t for t in range(i + 1, j) if residue(ResidueKind.C_MU, ctx, i, t) == 0]


def x_mu(ctx: BranchContext, i: int, j: int, d: int) -> List[Node]:
    if j >= ctx.n:
        raise ValueError(f"X^mu is only defined for j < {ctx.n}, but received j={j}")
    return [
        (t, s) for t in range(i, j) for s in range(1, d + 1)
        if residue(ResidueKind.B_MU_LAMBDA_K, ctx, i, t, k=t) == (d - s) % ctx.p
    ]


def x_mu_lambda(ctx: BranchContext, i: int, j: int, d: int) -> List[Node]:
    return [
        (t, s) for t in range(i, j) for s in range(1, d + 1)
        if residue(ResidueKind.B_MU_LAMBDA, ctx, i, t) == (d - s) % ctx.p
    ]


def node_sets(ctx: BranchContext, i: int, j: int, d: int) -> NodeSets:
    """
    Computes the three residue node sets for the interval [i..j).

    :return: (c^mu(i,j), X^mu_d(i,j) or None when j = n, X^{mu,lambda}_d(i,j)), each sorted
    """
    _validate_range(ctx, i, j, d)
    return NodeSets(
        c_mu=c_set(ctx, i, j),
        x_mu=x_mu(ctx, i, j, d) if j < ctx.n else None,
        x_mu_lambda=x_mu_lambda(ctx, i, j, d),
    )


def validate_split_sequence(K: Sequence[int], i: int, j: int, d: int):
    if len(K) != d:
        raise ValueError(f"K should have {d} entries, but received {tuple(K)}")
    if any(not i <= k <= j for k in K):
        raise ValueError(f"K entries should lie in [{i}..{j}], but received {tuple(K)}")
    if any(K[s] > K[s + 1] for s in range(len(K) - 1)):
        raise ValueError(f"K should be weakly increasing, but received {tuple(K)}")


def y_part(K: Sequence[int], i: int, j: int) -> List[Node]:
    """Y_K: the nodes (t,s) of [i..j) x [1..d] with t < k_s."""
    return [(t, s) for t in range(i, j) for s in range(1, len(K) + 1) if t < K[s - 1]]


def z_part(K: Sequence[int], i: int, j: int) -> List[Node]:
    """Z_K: the nodes (t,s) of [i..j) x [1..d] with t >= k_s."""
    return [(t, s) for t in range(i, j) for s in range(1, len(K) + 1) if t >= K[s - 1]]


def node_set_K(ctx: BranchContext, i: int, j: int, d: int, K: Sequence[int]) -> List[Node]:
    """
    X^{mu,lambda,K}_d(i,j) = (X^{mu,lambda} & Y_K) | (X^mu & Z_K).

    Membership of (t,s) is the congruence B^{mu,lambda,k_s}(i,t) = d - s mod p.
    """
    _validate_range(ctx, i, j, d)
    if j >= ctx.n:
        raise ValueError(f"X^(mu,lambda,K) is only defined for j < {ctx.n}, but received j={j}")
    validate_split_sequence(K, i, j, d)
    return [
        (t, s) for t in range(i, j) for s in range(1, d + 1)
        if residue(ResidueKind.B_MU_LAMBDA_K, ctx, i, t, k=K[s - 1]) == (d - s) % ctx.p
    ]
