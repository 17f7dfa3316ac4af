import itertools
import logging
import math
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ, ZZ
from sympy.polys.fields import field
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, ring

from .combinatorics import BranchContext, ResidueKind, clamp_sequence, padded_sequence, residue, validate_split_sequence


_logger = logging.getLogger(__name__)


class IntegralityError(ArithmeticError):
    """An exact division left a nonzero remainder."""


class InadmissibleTagError(ValueError):
    """A polynomial was requested for a rational tag outside the admissible cases."""


class RationalTag(str, Enum):
    ONE = "1"
    INV_ZETA_MINUS_D = "1/(zeta-d)"
    INV_ZETA_MINUS_D_MINUS_1 = "1/(zeta-d-1)"


def _names(prefix: str, n: int) -> str:
    return ",".join(f"{prefix}{k}" for k in range(1, n + 1))


@lru_cache(maxsize=None)
def h_field(n: int):
    """Fraction field of Z[H1, ..., Hn]."""
    return field(_names("H", n), ZZ, grlex)[0]


def h_ring(n: int):
    return h_field(n).ring


@lru_cache(maxsize=None)
def hx_ring(n: int):
    """Z[H1, ..., Hn, x]; x is the auxiliary variable of the P recursion."""
    return ring(_names("H", n) + ",x", ZZ, grlex)[0]


@lru_cache(maxsize=None)
def xy_ring(n: int):
    """Z[x1, ..., xn, y1, ..., yn]."""
    return ring(_names("x", n) + "," + _names("y", n), ZZ, grlex)[0]


def H(R, k: int) -> PolyElement:
    return R.gens[k - 1]


def C_poly(R, i: int, j: int) -> PolyElement:
    """C(i,j) = j - i + H_i - H_j."""
    return H(R, i) - H(R, j) + (j - i)


def B_poly(R, i: int, j: int) -> PolyElement:
    """B(i,j) = j - i + H_i - H_{j+1}."""
    return H(R, i) - H(R, j + 1) + (j - i)


def falling_factorial(f, k: int):
    """
    Descending factorial power f (f - 1) ... (f - k + 1).

    :param f: polynomial (or any ring element)
    :param k: number of factors, k >= 0

    :return: the product; 1 for k = 0
    """
    if k < 0:
        raise ValueError(f"k should be nonnegative, but received {k}")
    result = f * 0 + 1
    for r in range(k):
        result = result * (f - r)
    return result


def exact_div(f: PolyElement, g: PolyElement, what: str = "") -> PolyElement:
    q, r = f.div(g)
    if r:
        raise IntegralityError(f"nonzero remainder dividing {what or f} by {g}: {r}")
    return q


def lift(f: PolyElement, n: int) -> PolyElement:
    """Moves an H-polynomial into Z[H1..Hn]."""
    R = h_ring(n)
    if f.ring == R:
        return f
    return f.set_ring(R)


def evaluate_at(f, w: Sequence[int]) -> int:
    """
    Substitutes H_k -> w_k (or the ring's k-th generator -> w_k) and returns the integer value.
    """
    if isinstance(f, int):
        return f
    total = 0
    for monom, coeff in f.iterterms():
        value = int(coeff)
        for k, e in enumerate(monom):
            if e:
                if k >= len(w):
                    raise ValueError(f"weight {tuple(w)} is too short for variable index {k + 1}")
                value *= w[k] ** e
        total += value
    return total


def evaluate_mod_p(f, w: Sequence[int], p: int) -> int:
    """
    Evaluation pi_lambda: H_k -> w_k followed by reduction mod p.

    :param f: polynomial in H-variables
    :param w: weight
    :param p: modulus

    :return: residue in [0..p)
    """
    return evaluate_at(f, w) % p


class UTMatrix(tuple):
    """
    Strictly upper triangular matrix with nonnegative entries, stored as sorted (a, b, count) triples.
    """

    def __new__(cls, entries=()):
        if isinstance(entries, dict):
            entries = [(a, b, c) for (a, b), c in entries.items()]
        cleaned = {}
        for a, b, c in entries:
            if a >= b:
                raise ValueError(f"UT entries should satisfy a < b, but received ({a},{b})")
            if c < 0:
                raise ValueError(f"UT entries should be nonnegative, but received {c} at ({a},{b})")
            if c:
                cleaned[(a, b)] = cleaned.get((a, b), 0) + c
        return super().__new__(cls, tuple(sorted((a, b, c) for (a, b), c in cleaned.items())))

    @classmethod
    def unit(cls, a: int, b: int, count: int = 1) -> "UTMatrix":
        return cls([(a, b, count)])

    def column_sum(self, t: int) -> int:
        return sum(c for a, b, c in self if b == t)

    def crossing(self, t: int) -> int:
        """Number of intervals [a, b) containing t."""
        return sum(c for a, b, c in self if a <= t < b)

    def __add__(self, other: "UTMatrix") -> "UTMatrix":
        return UTMatrix(tuple(self) + tuple(other))

    def shift(self, R, k: int) -> PolyElement:
        """tau_N(H_k) = H_k + sum_a N_{a,k} - sum_b N_{k,b}."""
        return H(R, k) + sum(c for a, b, c in self if b == k) - sum(c for a, b, c in self if a == k)

    def max_column(self) -> int:
        return max((b for a, b, c in self), default=0)

    def min_column(self) -> int:
        return min((b for a, b, c in self), default=0)

    def flattened(self, n: int) -> Tuple[int, ...]:
        values = {(a, b): c for a, b, c in self}
        return tuple(values.get((a, b), 0) for a in range(1, n) for b in range(a + 1, n + 1))

    def to_text(self) -> str:
        return "[" + ", ".join(f"({a},{b},{c})" for a, b, c in self) + "]"


def shift_automorphism(f: PolyElement, N: UTMatrix) -> PolyElement:
    """
    Applies tau_N: H_i -> H_i + sum_{a<i} N_{a,i} - sum_{i<b} N_{i,b}.

    :param f: polynomial in H-variables
    :param N: strictly upper triangular matrix

    :return: tau_N(f)
    """
    R = f.ring
    n = R.ngens
    replacements = [(H(R, k), N.shift(R, k)) for k in range(1, n + 1) if N.shift(R, k) != H(R, k)]
    if not replacements:
        return f
    return f.compose(replacements)


class LoweringElement:
    """
    Element sum_N F^{(N)} coeff_N of the negative-Cartan part, coefficients written to the right.

    The coefficient dict is shared by cached expansions and should be treated as read-only.
    """

    def __init__(self, n: int, terms: Optional[Dict[UTMatrix, PolyElement]] = None):
        self.n = n
        self.ring = h_ring(n)
        self.terms = {}
        for N, coeff in (terms or {}).items():
            coeff = lift(coeff, n) if isinstance(coeff, PolyElement) else self.ring(coeff)
            if coeff:
                self.terms[UTMatrix(N)] = coeff

    def __eq__(self, other) -> bool:
        if not isinstance(other, LoweringElement):
            return NotImplemented
        m = max(self.n, other.n)
        mine = {N: lift(c, m) for N, c in self.terms.items()}
        theirs = {N: lift(c, m) for N, c in other.terms.items()}
        return mine == theirs

    def __repr__(self) -> str:
        return f"LoweringElement(n={self.n}, terms={len(self.terms)})"

    def __add__(self, other: "LoweringElement") -> "LoweringElement":
        n = max(self.n, other.n)
        terms = {N: lift(c, n) for N, c in self.terms.items()}
        for N, c in other.terms.items():
            terms[N] = terms.get(N, h_ring(n).zero) + lift(c, n)
        return LoweringElement(n, terms)

    def __neg__(self) -> "LoweringElement":
        return LoweringElement(self.n, {N: -c for N, c in self.terms.items()})

    def __sub__(self, other: "LoweringElement") -> "LoweringElement":
        return self + (-other)

    def divide_polynomial(self, f: PolyElement) -> "LoweringElement":
        """Right division by an H-polynomial; every coefficient must be divisible."""
        n = max(self.n, f.ring.ngens)
        g = lift(f, n)
        return LoweringElement(n, {N: exact_div(lift(c, n), g, f"F^{N.to_text()}") for N, c in self.terms.items()})

    def __mul__(self, other: "LoweringElement") -> "LoweringElement":
        """
        Product of two elements whose F-factors are already in column order.

        F^{(A)} h_A F^{(B)} h_B = F^{(A+B)} tau_B(h_A) h_B, valid when every column of A
        precedes every column of B.
        """
        n = max(self.n, other.n)
        terms = {}
        for A, hA in self.terms.items():
            for B, hB in other.terms.items():
                if A and B and A.max_column() >= B.min_column():
                    raise ValueError(f"product needs columns of {A.to_text()} before those of {B.to_text()}")
                coeff = shift_automorphism(lift(hA, n), B) * lift(hB, n)
                AB = A + B
                terms[AB] = terms.get(AB, h_ring(n).zero) + coeff
        return LoweringElement(n, terms)

    def is_homogeneous(self, i: int, j: int, d: int) -> bool:
        """Column-sum law: every N crosses t exactly d times for t in [i..j) and never elsewhere."""
        for N in self.terms:
            for t in range(1, self.n):
                if N.crossing(t) != (d if i <= t < j else 0):
                    return False
        return True

    def sorted_terms(self) -> List[Tuple[UTMatrix, PolyElement]]:
        return sorted(
            self.terms.items(),
            key=lambda item: (sum(item[0].flattened(self.n)), item[0].flattened(self.n)),
            reverse=True,
        )

    def to_text(self) -> str:
        return "\n".join(f"N: {N.to_text()} coeff: {coeff}" for N, coeff in self.sorted_terms())

    def to_dict(self) -> List[dict]:
        return [
            {"N": [list(entry) for entry in N], "coeff": str(coeff)}
            for N, coeff in self.sorted_terms()
        ]


def lowering_supports(i: int, j: int, d: int) -> Iterator[UTMatrix]:
    """
    Every N of weight -d alpha(i,j): the intervals [a,b) of N lie in [i,j) and cross each t in [i..j) d times.

    Intervals opened at i are closed in groups while sweeping b; whatever closes at b < j reopens at b.
    """
    def sweep(b: int, open_counts: Dict[int, int], chosen: Dict[Tuple[int, int], int]):
        starts = sorted(open_counts)
        if b == j:
            final = dict(chosen)
            for a in starts:
                final[(a, b)] = final.get((a, b), 0) + open_counts[a]
            yield UTMatrix(final)
            return
        for closing in itertools.product(*(range(open_counts[a] + 1) for a in starts)):
            closed = sum(closing)
            remaining = {a: open_counts[a] - c for a, c in zip(starts, closing) if open_counts[a] - c}
            updated = dict(chosen)
            for a, c in zip(starts, closing):
                if c:
                    updated[(a, b)] = c
            if closed:
                remaining[b] = closed
            yield from sweep(b + 1, remaining, updated)

    yield from sweep(i + 1, {i: d}, {})


def _validate_interval(i: int, j: int, d: int, n: Optional[int] = None):
    if not 1 <= i < j:
        raise ValueError(f"indices should satisfy 1 <= i < j, but received i={i}, j={j}")
    if n is not None and j > n:
        raise ValueError(f"j should be at most n={n}, but received {j}")
    if d < 1:
        raise ValueError(f"d should be positive, but received {d}")


@lru_cache(maxsize=None)
def expand_S_power(i: int, j: int, d: int, n: Optional[int] = None) -> LoweringElement:
    """
    PBW expansion of S_{i,j}^d = sum_N F^{(N)} prod_{i<t<=j} N_t! C(i,t)^{(d - N_t) falling}.

    :param i: first column
    :param j: last column
    :param d: power
    :param n: number of H-variables (defaults to j)

    :return: lowering element
    """
    n = n or j
    _validate_interval(i, j, d, n)
    R = h_ring(n)
    terms = {}
    for N in lowering_supports(i, j, d):
        coeff = R.one
        for t in range(i + 1, j + 1):
            Nt = N.column_sum(t)
            coeff *= math.factorial(Nt) * falling_factorial(C_poly(R, i, t), d - Nt)
        terms[N] = coeff
    return LoweringElement(n, terms)


def carter_lusztig(i: int, j: int, n: Optional[int] = None) -> LoweringElement:
    """
    S_{i,j} from its defining sum over A in (i..j): F_{a0,a1} ... F_{am,am+1} prod_{t not in A} C(i,t).

    S_{i,i} = 1.
    """
    n = n or j
    R = h_ring(n)
    if i == j:
        return LoweringElement(n, {UTMatrix(): R.one})
    inner = list(range(i + 1, j))
    terms = {}
    for size in range(len(inner) + 1):
        for A in itertools.combinations(inner, size):
            path = (i,) + A + (j,)
            N = UTMatrix([(path[r], path[r + 1], 1) for r in range(len(path) - 1)])
            coeff = R.one
            for t in inner:
                if t not in A:
                    coeff *= C_poly(R, i, t)
            terms[N] = coeff
    return LoweringElement(n, terms)


@lru_cache(maxsize=None)
def _P(N: UTMatrix, M: Tuple[int, ...], j: int, d: int, n: int) -> PolyElement:
    """P_{N,M}(x) of the integral recursion, an element of Z[H..., x]."""
    R = hx_ring(n)
    x = R.gens[n]
    m, rest = M[0], M[1:]
    m2 = rest[0] if rest else j

    shifted = R.one
    plain = R.one
    for t in range(m + 1, m2):
        Nt = N.column_sum(t)
        shifted *= math.factorial(Nt) * falling_factorial(x + C_poly(R, m, t), d - Nt)
        plain *= math.factorial(Nt) * falling_factorial(C_poly(R, m, t), d - Nt)
    if rest:
        inner = _P(N, rest, j, d, n)
        shifted *= inner.compose(x, x + C_poly(R, m, m2))
        plain *= inner.compose(x, C_poly(R, m, m2))

    Nm = N.column_sum(m)
    if Nm < d:
        # x^{(d - Nm) falling} / x
        return math.factorial(Nm) * falling_factorial(x - 1, d - Nm - 1) * shifted
    return exact_div(math.factorial(d) * (shifted - plain), x, f"P_(N={N.to_text()},M={M})")


@lru_cache(maxsize=None)
def expand_T(i: int, j: int, d: int, M: Tuple[int, ...] = (), n: Optional[int] = None) -> LoweringElement:
    """
    PBW expansion of T_{i,j}^{(d)}(M,1) through the integral P recursion.

    For M nonempty the F^{(N)}-coefficient is
    d! prod_{i<t<min M} N_t! C(i,t)^{(d - N_t) falling} P_{N,M}(C(i, min M)).

    :param i: first column
    :param j: last column
    :param d: power
    :param M: subset of (i..j)
    :param n: number of H-variables (defaults to j)

    :return: lowering element
    """
    n = n or j
    _validate_interval(i, j, d, n)
    M = tuple(sorted(set(M)))
    if any(not i < m < j for m in M):
        raise ValueError(f"M should be a subset of ({i}..{j}), but received {M}")
    if not M:
        return expand_S_power(i, j, d, n)
    R = hx_ring(n)
    x = R.gens[n]
    m = M[0]
    terms = {}
    for N in lowering_supports(i, j, d):
        coeff = R(math.factorial(d))
        for t in range(i + 1, m):
            Nt = N.column_sum(t)
            coeff *= math.factorial(Nt) * falling_factorial(C_poly(R, i, t), d - Nt)
        coeff *= _P(N, M, j, d, n).compose(x, C_poly(R, i, m))
        terms[N] = coeff.set_ring(h_ring(n))
    return LoweringElement(n, terms)


def expand_T_by_definition(i: int, j: int, d: int, M: Tuple[int, ...] = (), n: Optional[int] = None) -> LoweringElement:
    """T(M) = (T(M') - S_{i,m}^d T_{m,j}(M')) C(i,m)^{-1}, with m = min M."""
    n = n or j
    M = tuple(sorted(set(M)))
    if not M:
        return expand_S_power(i, j, d, n)
    m, rest = M[0], M[1:]
    numerator = expand_T_by_definition(i, j, d, rest, n) - expand_S_power(i, m, d, n) * expand_T_by_definition(m, j, d, rest, n)
    return numerator.divide_polynomial(C_poly(h_ring(n), i, m))


def BC_poly(R, c: Sequence[int], k: int, i: int, t: int) -> PolyElement:
    """B^{C,k}(i,t) = B(i,t) + c_{i-1} - c_i + [t >= k](c_{t+1} - c_t); c is padded with c_0 = c_n = 0."""
    value = B_poly(R, i, t) + c[i - 1] - c[i]
    if t >= k:
        value += c[t + 1] - c[t]
    return value


def zeta_poly(R, c: Sequence[int], i: int, m: int, K: Sequence[int]) -> PolyElement:
    d = len(K)
    value = R.one
    for s in range(1, d + 1):
        k = K[s - 1]
        for t in range(i, m):
            factor = BC_poly(R, c, k, i, t) + (int(t < m - 1) + int(t == m - 1 < k)) * (s - d)
            if t == m - 1 >= k:
                factor *= d - s + 1
            value *= factor
    return value


def _rho_base(R, c: Sequence[int], i: int, j: int, K: Sequence[int], L: Sequence[int]) -> PolyElement:
    d, q = len(K), len(L)
    value = R.one
    for s in range(1, d + 1):
        k = K[s - 1]
        for t in range(i, j):
            flagged = t == j - 1 >= k
            factor = BC_poly(R, c, k, i, t) - d + s
            if flagged:
                factor = (d - s + 1) * (factor + sum(L[h - 1] for h in range(s + 1, q + 1)))
            value *= factor
    return value


def _rho_argument(R, c: Sequence[int], i: int, j: int, L: Sequence[int]) -> PolyElement:
    return C_poly(R, i, j) + c[i - 1] - c[i] - c[j - 1] + c[j] + sum(L)


def _validate_rho(C, i, j, K, L, M, n):
    if not 1 <= i < j <= n:
        raise ValueError(f"indices should satisfy 1 <= i < j <= {n}, but received i={i}, j={j}")
    d = len(K)
    if d < 1:
        raise ValueError(f"K should be nonempty, but received {tuple(K)}")
    validate_split_sequence(K, i, j, d)
    if len(L) not in (d, d + 1):
        raise ValueError(f"L should have {d} or {d + 1} entries, but received {tuple(L)}")
    if any(not i < m < j for m in M):
        raise ValueError(f"M should be a subset of ({i}..{j}), but received {tuple(M)}")


def rho_rational(C: Sequence[int], i: int, j: int, K: Sequence[int], L: Sequence[int], M: Sequence[int] = (),
                 R: RationalTag = RationalTag.ONE):
    """
    rho^{(C)}(i,j,K,L,M,R) as an element of the fraction field of Z[H1..Hn], n = len(C) + 1.
    """
    n = len(C) + 1
    K, L, M = tuple(K), tuple(L), tuple(sorted(set(M)))
    _validate_rho(C, i, j, K, L, M, n)
    R = RationalTag(R)
    F = h_field(n)
    P = F.ring
    c = padded_sequence(C, n)

    def compute(a: int, K_: Tuple[int, ...], M_: Tuple[int, ...]):
        if not M_:
            value = F(_rho_base(P, c, a, j, K_, L))
            if R != RationalTag.ONE:
                shift = len(K_) if R == RationalTag.INV_ZETA_MINUS_D else len(K_) + 1
                denominator = _rho_argument(P, c, a, j, L) - shift
                value = value / F(denominator)
            return value
        m, rest = M_[0], M_[1:]
        numerator = compute(a, K_, rest) - F(zeta_poly(P, c, a, m, K_)) * compute(m, clamp_sequence(K_, m, j), rest)
        return numerator / F(C_poly(P, a, m) + c[a - 1] - c[a] - c[m - 1] + c[m])

    return compute(i, K, M)


def rho(C: Sequence[int], i: int, j: int, K: Sequence[int], L: Sequence[int], M: Sequence[int] = (),
        R: RationalTag = RationalTag.ONE) -> PolyElement:
    """
    Coefficient polynomial rho^{(C)}(i,j,K,L,M,R) in Z[H1..Hn], n = len(C) + 1.

    :param C: integer sequence (c_1, ..., c_{n-1})
    :param i: first column
    :param j: last column
    :param K: weakly increasing split sequence in [i..j], |K| = d
    :param L: integer sequence with d or d + 1 entries
    :param M: subset of (i..j)
    :param R: rational tag; 1/(zeta-d) needs K != (j^d) and l_1 = 0

    :return: polynomial; every recursive division is exact
    """
    n = len(C) + 1
    K, L, M = tuple(K), tuple(L), tuple(sorted(set(M)))
    _validate_rho(C, i, j, K, L, M, n)
    R = RationalTag(R)
    d = len(K)
    if R == RationalTag.INV_ZETA_MINUS_D and (K == tuple([j] * d) or L[0] != 0):
        raise InadmissibleTagError(f"R=1/(zeta-d) needs K != (j^d) and l_1 = 0, but received K={K}, L={L}")
    if R == RationalTag.INV_ZETA_MINUS_D_MINUS_1:
        raise InadmissibleTagError(f"R={R.value} does not yield a polynomial; use rho_rational")
    if R != RationalTag.ONE:
        return _to_polynomial(rho_rational(C, i, j, K, L, M, R), f"rho({i},{j},{K},{L},{M},{R.value})")

    P = h_ring(n)
    c = padded_sequence(C, n)

    def compute(a: int, K_: Tuple[int, ...], M_: Tuple[int, ...]) -> PolyElement:
        if not M_:
            return _rho_base(P, c, a, j, K_, L)
        m, rest = M_[0], M_[1:]
        numerator = compute(a, K_, rest) - zeta_poly(P, c, a, m, K_) * compute(m, clamp_sequence(K_, m, j), rest)
        divisor = C_poly(P, a, m) + c[a - 1] - c[a] - c[m - 1] + c[m]
        return exact_div(numerator, divisor, f"rho step at m={m}")

    return compute(i, K, M)


def _to_polynomial(f, what: str) -> PolyElement:
    numer, denom = f.numer, f.denom
    if not denom.is_ground:
        raise IntegralityError(f"{what} has a non-constant denominator {denom}")
    den = int(denom.LC)
    coeffs = {}
    for monom, coeff in numer.iterterms():
        if int(coeff) % den:
            raise IntegralityError(f"{what} has a coefficient {coeff} not divisible by {den}")
        coeffs[monom] = int(coeff) // den
    return numer.ring.from_dict(coeffs)


def commpoly1_product(ctx: BranchContext, C: Sequence[int], i: int, j: int, K: Sequence[int], M: Sequence[int],
                      phi: Dict[int, Tuple[int, int]]) -> int:
    """
    Value mod p of d^{(r) falling} prod{B^{C,k_s}(i,t) - d + s : (t,s) not in Im phi} at lambda.

    :param ctx: context holding lambda and p
    :param C: integer sequence (c_1, ..., c_{n-1})
    :param i: first column
    :param j: last column
    :param K: weakly increasing split sequence
    :param M: subset of (i..j)
    :param phi: injection m -> (t, s) with t >= m

    :return: residue; raises ValueError when a generator B^{C,k_s}(m,t) - d + s does not vanish at lambda
    """
    d = len(K)
    p = ctx.p
    M = tuple(sorted(set(M)))
    validate_split_sequence(K, i, j, d)
    if set(phi) != set(M):
        raise ValueError(f"phi should be defined on M={M}, but received {phi}")
    image = list(phi.values())
    if len(set(image)) != len(image):
        raise ValueError(f"phi should be injective, but received {phi}")
    for m, (t, s) in phi.items():
        if not (t >= m and i <= t < j and 1 <= s <= d):
            raise ValueError(f"phi({m}) should lie in [{m}..{j})x[1..{d}], but received {(t, s)}")
        value = residue(ResidueKind.B_CK, ctx, m, t, k=K[s - 1], C=C)
        if (value - d + s) % p:
            raise ValueError(f"generator at m={m}, (t,s)={(t, s)} does not vanish at lambda={ctx.lam}")
    r = sum(1 for k in K if k < j)
    product = math.perm(d, r) % p
    taken = set(image)
    for t in range(i, j):
        for s in range(1, d + 1):
            if (t, s) not in taken:
                value = residue(ResidueKind.B_CK, ctx, i, t, k=K[s - 1], C=C)
                product = product * ((value - d + s) % p) % p
    return product


def solve_generators(n: int, C: Sequence[int], K: Sequence[int], phi: Dict[int, Tuple[int, int]],
                     free: Sequence[int]) -> Tuple[int, ...]:
    """
    A weight at which every generator B^{C,k_s}(m,t) - d + s of phi vanishes exactly.

    H_t for t not in phi comes from free; H_m is solved from its generator, from the top index down.
    """
    c = padded_sequence(C, n)
    d = len(K)
    values = dict(enumerate(free[:n], start=1))
    for m in sorted(phi, reverse=True):
        t, s = phi[m]
        offset = c[m - 1] - c[m] + ((c[t + 1] - c[t]) if t >= K[s - 1] else 0)
        values[m] = d - s - (t - m) + values[t + 1] - offset
    return tuple(values[k] for k in range(1, n + 1))


def _xy(n: int):
    R = xy_ring(n)
    xs = {t: R.gens[t - 1] for t in range(1, n + 1)}
    ys = {t: R.gens[n + t - 1] for t in range(1, n + 1)}
    return R, xs, ys


def _f_empty(R, xs, ys, i: int, j: int, d: int) -> PolyElement:
    value = R.one
    for t in range(i, j):
        value *= falling_factorial(ys[t + 1] - xs[i], d)
    return value


def _g_empty(R, xs, ys, i: int, j: int, d: int) -> PolyElement:
    value = falling_factorial(ys[j] - xs[i], d - 1)
    for t in range(i, j - 1):
        value *= falling_factorial(ys[t + 1] - xs[i], d)
    return value


@lru_cache(maxsize=None)
def _fg(i: int, j: int, d: int, M: Tuple[int, ...], n: int) -> Tuple[PolyElement, PolyElement]:
    R, xs, ys = _xy(n)
    if not M:
        return _f_empty(R, xs, ys, i, j, d), _g_empty(R, xs, ys, i, j, d)
    m, rest = M[0], M[1:]
    f_rest, g_rest = _fg(i, j, d, rest, n)
    f_tail, g_tail = _fg(m, j, d, rest, n)
    head = _f_empty(R, xs, ys, i, m, d)
    divisor = xs[m] - xs[i]
    f = exact_div(f_rest - head * f_tail, divisor, f"f_({i},{j})({M})")
    g = exact_div(g_rest - head * g_tail, divisor, f"g_({i},{j})({M})")
    return f, g


def fg_polynomials(i: int, j: int, d: int, M: Sequence[int] = (), n: Optional[int] = None) -> Tuple[PolyElement, PolyElement]:
    """
    The pair (f_{i,j}^{(d)}(M), g_{i,j}^{(d)}(M)) in Z[x1..xn, y1..yn].

    :param n: number of x (and y) variables, defaults to j
    """
    n = n or j
    _validate_interval(i, j, d, n)
    M = tuple(sorted(set(M)))
    if any(not i < m < j for m in M):
        raise ValueError(f"M should be a subset of ({i}..{j}), but received {M}")
    return _fg(i, j, d, M, n)


def G_polynomial(i: int, l: int, d: int, M: Sequence[int], N: Sequence[int], n: Optional[int] = None) -> PolyElement:
    """
    G_{i,l}^{(d)}(M,N) = prod_r g_{i_r,i_{r+1}}^{(d)}(M & (i_r..i_{r+1})), i_0 = i, i_{k+1} = l.
    """
    n = n or l
    M = tuple(sorted(set(M)))
    N = tuple(N)
    if any(N[r] >= N[r + 1] for r in range(len(N) - 1)):
        raise ValueError(f"N should be strictly increasing, but received {N}")
    if any(not (a in M and i < a < l) for a in N):
        raise ValueError(f"N should be a subset of M & ({i}..{l}), but received {N}")
    cuts = (i,) + N + (l,)
    R = xy_ring(n)
    value = R.one
    for a, b in zip(cuts, cuts[1:]):
        value *= fg_polynomials(a, b, d, tuple(m for m in M if a < m < b), n)[1]
    return value


def specialize(f: PolyElement, C: Sequence[int], n: int) -> PolyElement:
    """
    Substitution y_t -> t - 1 - H_t, x_t -> t - H_t - c_{t-1} + c_t from Z[x, y] into Z[H1..Hn].
    """
    c = padded_sequence(C, n)
    R = h_ring(n)
    k = f.ring.ngens // 2
    images = [R(t - c[t - 1] + c[t]) - H(R, t) if t <= n else None for t in range(1, k + 1)]
    images += [R(t - 1) - H(R, t) if t <= n else None for t in range(1, k + 1)]
    result = R.zero
    for monom, coeff in f.iterterms():
        term = R(int(coeff))
        for idx, e in enumerate(monom):
            if e:
                if images[idx] is None:
                    raise ValueError(f"variable {f.ring.symbols[idx]} has no image in Z[H1..H{n}]")
                term *= images[idx] ** e
        result += term
    return result


def ideal_membership(f: PolyElement, generators: Sequence[PolyElement],
                     degree_bound: Optional[int] = None) -> Optional[List[PolyElement]]:
    """
    Searches for cofactors h_k with f = sum_k h_k g_k, deg h_k bounded, by exact linear algebra over QQ.

    :param f: polynomial
    :param generators: polynomials in the same ring
    :param degree_bound: cofactor degree bound (default deg f - deg g_k, at least 0)

    :return: cofactors over QQ, or None when the bounded system has no solution
    """
    R = f.ring
    if not f:
        return [R.zero for _ in generators]
    used = set()
    for g in list(generators) + [f]:
        for monom in g.itermonoms():
            used.update(k for k, e in enumerate(monom) if e)
    used = sorted(used)
    top = _total_degree(f)

    columns = []
    for index, g in enumerate(generators):
        if not g:
            continue
        bound = degree_bound if degree_bound is not None else max(top - _total_degree(g), 0)
        for exps in _exponents(len(used), bound):
            monom = [0] * R.ngens
            for k, e in zip(used, exps):
                monom[k] = e
            columns.append((index, tuple(monom)))

    rows = {}
    entries = {}
    for col, (index, u) in enumerate(columns):
        for monom, coeff in generators[index].iterterms():
            w = tuple(a + b for a, b in zip(monom, u))
            r = rows.setdefault(w, len(rows))
            entries.setdefault(r, {})[col] = entries.get(r, {}).get(col, QQ(0)) + QQ(int(coeff))
    last = len(columns)
    for monom, coeff in f.iterterms():
        r = rows.setdefault(monom, len(rows))
        entries.setdefault(r, {})[last] = QQ(int(coeff))
    entries = {r: {col: v for col, v in row.items() if v} for r, row in entries.items()}
    entries = {r: row for r, row in entries.items() if row}

    system = DomainMatrix(entries, (len(rows), last + 1), QQ)
    reduced, pivots = system.rref()
    if last in pivots:
        _logger.debug("no cofactors of the given degree: system inconsistent")
        return None
    dod = reduced.to_dod()
    solution = {}
    for r, col in enumerate(pivots):
        solution[col] = dod.get(r, {}).get(last, QQ(0))
    Q = R.clone(domain=QQ)
    cofactors = [Q.zero for _ in generators]
    for col, value in solution.items():
        if value:
            index, u = columns[col]
            cofactors[index] += Q({u: value})
    return cofactors


def _total_degree(f: PolyElement) -> int:
    return max((sum(monom) for monom in f.itermonoms()), default=0)


def _exponents(k: int, bound: int) -> Iterator[Tuple[int, ...]]:
    for total in range(bound + 1):
        for combo in itertools.combinations_with_replacement(range(k), total):
            exps = [0] * k
            for idx in combo:
                exps[idx] += 1
            yield tuple(exps)
