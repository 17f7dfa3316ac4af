import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy import sparse
from sympy import isprime

from lowering.src.combinatorics import Weight, add_weights, interlaces, is_dominant, unit_weight, weight_gaps
from lowering.src.symbolic import LoweringElement, evaluate_mod_p
from oracle.src.linalg import inv_mod_scalar, mod_p, nullspace_mod, row_basis


_logger = logging.getLogger(__name__)

DEFAULT_TENSOR_LIMIT = 20000

Wedge = Tuple[int, ...]
WedgeTensorBasisElement = Tuple[Wedge, ...]


class OracleConsistencyError(RuntimeError):
    """An internal cross-check of the brute-force realization failed."""


def conjugate_partition(lam: Sequence[int]) -> Tuple[int, ...]:
    """Column heights of the diagram of a nonnegative dominant weight."""
    if any(x < 0 for x in lam):
        raise ValueError(f"lambda should be nonnegative here, but received {tuple(lam)}")
    top = lam[0] if lam else 0
    return tuple(sum(1 for x in lam if x >= c) for c in range(1, top + 1))


def weyl_dimension(lam: Sequence[int]) -> int:
    """prod_{i<j} (lam_i - lam_j + j - i) / (j - i)."""
    num, den = 1, 1
    for i, j in itertools.combinations(range(len(lam)), 2):
        num *= lam[i] - lam[j] + j - i
        den *= j - i
    return num // den


def tensor_dimension(lam: Sequence[int]) -> int:
    n = len(lam)
    return math.prod(math.comb(n, h) for h in conjugate_partition(lam))


def root(n: int, a: int, b: int, r: int = 1) -> Weight:
    """r * (eps_a - eps_b)."""
    return add_weights(unit_weight(n, a, r), unit_weight(n, b, -r))


class TensorSpace:
    """
    Tensor product of exterior powers of the natural module, one factor per column of the diagram.

    Basis elements are tuples of sorted index sets and are grouped by weight. The divided power
    X_{ab}^{(r)} (sending e_b to e_a) acts by moving b to a in r distinct factors, since every
    factor admits at most one such move.
    """

    def __init__(self, lam: Sequence[int], limit: int = DEFAULT_TENSOR_LIMIT):
        self.n = len(lam)
        self.heights = conjugate_partition(lam)
        size = tensor_dimension(lam)
        if size > limit:
            raise ValueError(
                f"tensor space for {tuple(lam)} has dimension {size}, which exceeds the limit {limit}"
            )
        self.by_weight: Dict[Weight, List[WedgeTensorBasisElement]] = {}
        columns = [itertools.combinations(range(1, self.n + 1), h) for h in self.heights]
        for element in itertools.product(*columns):
            self.by_weight.setdefault(self.weight_of(element), []).append(element)
        self.index = {w: {e: k for k, e in enumerate(elements)} for w, elements in self.by_weight.items()}
        self._operators: Dict[Tuple, sparse.csr_matrix] = {}
        _logger.debug("Tensor space for %s: dimension %d, %d weights", tuple(lam), size, len(self.by_weight))

    def weight_of(self, element: WedgeTensorBasisElement) -> Weight:
        counts = [0] * self.n
        for column in element:
            for a in column:
                counts[a - 1] += 1
        return tuple(counts)

    def highest_element(self) -> WedgeTensorBasisElement:
        return tuple(tuple(range(1, h + 1)) for h in self.heights)

    def dim(self, weight: Weight) -> int:
        return len(self.by_weight.get(weight, ()))

    def operator(self, a: int, b: int, r: int, weight: Weight) -> sparse.csr_matrix:
        """
        Matrix of X_{ab}^{(r)} from the weight space `weight` to weight + r(eps_a - eps_b).

        :return: sparse (target dimension x source dimension) integer matrix
        """
        if a == b or r < 1:
            raise ValueError(f"operator needs a != b and r >= 1, but received a={a}, b={b}, r={r}")
        key = (a, b, r, weight)
        if key in self._operators:
            return self._operators[key]
        target = add_weights(weight, root(self.n, a, b, r))
        sources = self.by_weight.get(weight, [])
        target_index = self.index.get(target, {})
        rows, cols, vals = [], [], []
        lo, hi = min(a, b), max(a, b)
        if target_index:
            for k, element in enumerate(sources):
                movable = [c for c, column in enumerate(element) if b in column and a not in column]
                for chosen in itertools.combinations(movable, r):
                    sign = 1
                    image = list(element)
                    for c in chosen:
                        column = element[c]
                        # Sorting a into place passes every entry strictly between a and b
                        if sum(1 for x in column if lo < x < hi) % 2:
                            sign = -sign
                        image[c] = tuple(sorted((set(column) - {b}) | {a}))
                    rows.append(target_index[tuple(image)])
                    cols.append(k)
                    vals.append(sign)
        matrix = sparse.coo_matrix(
            (np.array(vals, dtype=np.int64), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
            shape=(len(target_index), len(sources)),
        ).tocsr()
        self._operators[key] = matrix
        return matrix


@dataclass(frozen=True, eq=False)
class ModuleVector:
    """Coordinates over F_p of a weight vector in a realization's weight space."""
    weight: Weight
    coords: np.ndarray

    def is_zero(self) -> bool:
        return not np.any(self.coords)

    def to_dict(self) -> dict:
        return {"weight": list(self.weight), "coords": [int(x) for x in self.coords]}


class ModuleRealization:
    """
    A finite-dimensional GL_n-module over F_p given by weight spaces and divided-power actions.

    Weights are reported unshifted; subclasses provide `_dims` and `_compute_action`.
    """
    kind = ""

    def __init__(self, lam: Weight, p: int, shift: int):
        self.lam = tuple(lam)
        self.p = p
        self.shift = shift
        self.n = len(lam)
        self._dims: Dict[Weight, int] = {}
        self._actions: Dict[Tuple, np.ndarray] = {}
        self._r_max: Dict[int, int] = {}

    def weights(self) -> List[Weight]:
        return sorted(self._dims, reverse=True)

    def dim(self, weight: Sequence[int]) -> int:
        return self._dims.get(tuple(weight), 0)

    @property
    def dimension(self) -> int:
        return sum(self._dims.values())

    def r_max(self, l: int) -> int:
        """Largest r for which nu and nu + r*alpha_l can both be weights."""
        if l not in self._r_max:
            values = [w[l - 1] for w in self._dims]
            self._r_max[l] = max(values) - min(values) if values else 0
        return self._r_max[l]

    def action(self, a: int, b: int, r: int, weight: Sequence[int]) -> np.ndarray:
        """
        Matrix of X_{ab}^{(r)} from the weight space at `weight` to the one at weight + r(eps_a - eps_b).

        Rows index the target basis, columns the source basis.
        """
        weight = tuple(weight)
        key = (a, b, r, weight)
        if key not in self._actions:
            target = add_weights(weight, root(self.n, a, b, r))
            if r == 0:
                matrix = np.eye(self.dim(weight), dtype=np.int64)
            elif self.dim(weight) == 0 or self.dim(target) == 0:
                matrix = np.zeros((self.dim(target), self.dim(weight)), dtype=np.int64)
            else:
                matrix = self._compute_action(a, b, r, weight, target)
            self._actions[key] = matrix
        return self._actions[key]

    def E(self, l: int, r: int, weight: Sequence[int]) -> np.ndarray:
        return self.action(l, l + 1, r, weight)

    def F(self, l: int, r: int, weight: Sequence[int]) -> np.ndarray:
        return self.action(l + 1, l, r, weight)

    def _compute_action(self, a: int, b: int, r: int, weight: Weight, target: Weight) -> np.ndarray:
        raise NotImplementedError


class WeylModule(ModuleRealization):
    """
    Delta(lam): the span of divided powers F_l^{(r)} applied to the highest vector of the tensor space.

    Weight spaces are stored as RREF row bases inside the tensor weight spaces.
    """
    kind = "Delta"

    def __init__(self, lam: Sequence[int], p: int, tensor_limit: int = DEFAULT_TENSOR_LIMIT):
        lam = tuple(int(x) for x in lam)
        # Validation checks
        if not isprime(p):
            raise ValueError(f"p should be a prime number, but received {p}")
        if not lam or not is_dominant(lam):
            raise ValueError(f"lambda should be dominant, but received {lam}")
        # Set attributes
        super().__init__(lam, p, -lam[-1])
        self.shifted = tuple(x + self.shift for x in lam)
        self.tensor = TensorSpace(self.shifted, tensor_limit)
        self._spans: Dict[Weight, Tuple[np.ndarray, List[int]]] = {}
        self._generate()
        self._dims = {w: basis.shape[0] for w, (basis, _) in self._spans.items()}
        expected = weyl_dimension(lam)
        if self.dimension != expected:
            raise OracleConsistencyError(
                f"Delta{lam} over F_{p} has dimension {self.dimension}, but the Weyl formula gives {expected}"
            )
        _logger.info("Built Delta%s over F_%d: dimension %d", lam, p, self.dimension)

    def _to_tensor(self, weight: Weight) -> Weight:
        return tuple(x + self.shift for x in weight)

    def _from_tensor(self, weight: Weight) -> Weight:
        return tuple(x - self.shift for x in weight)

    def _generate(self):
        p, n = self.p, self.n
        top = self.shifted
        highest = np.zeros((1, self.tensor.dim(top)), dtype=np.int64)
        highest[0, self.tensor.index[top][self.tensor.highest_element()]] = 1
        spans = {top: (highest, [int(self.tensor.index[top][self.tensor.highest_element()])])}

        def depth(w: Weight) -> int:
            return sum(weight_gaps(top, w[:-1]))

        # Sources of F_l^{(r)} sit at strictly smaller depth
        pending = sorted((w for w in self.tensor.by_weight if w != top), key=lambda w: (depth(w), w))
        for w in pending:
            blocks = []
            for l in range(1, n):
                r = 1
                while True:
                    source = add_weights(w, root(n, l, l + 1, r))
                    if source not in self.tensor.by_weight:
                        break
                    if source in spans:
                        op = self.tensor.operator(l + 1, l, r, source)
                        blocks.append(mod_p(np.asarray(op @ spans[source][0].T).T, p))
                    r += 1
            if blocks:
                basis, pivots = row_basis(np.vstack(blocks), p)
                if basis.shape[0]:
                    spans[w] = (basis, pivots)
        self._spans = {self._from_tensor(w): span for w, span in spans.items()}

    def basis_rows(self, weight: Sequence[int]) -> np.ndarray:
        """Basis of the weight space as rows of tensor coordinates."""
        weight = tuple(weight)
        if weight not in self._spans:
            return np.zeros((0, self.tensor.dim(self._to_tensor(weight))), dtype=np.int64)
        return self._spans[weight][0]

    def _compute_action(self, a, b, r, weight, target):
        source_rows = self._spans[weight][0]
        target_rows, target_pivots = self._spans[target]
        op = self.tensor.operator(a, b, r, self._to_tensor(weight))
        image = mod_p(np.asarray(op @ source_rows.T).T, self.p)
        coords = image[:, target_pivots]
        if np.any(mod_p(coords @ target_rows - image, self.p)):
            raise OracleConsistencyError(f"X_{a}{b}^({r}) leaves Delta{self.lam} at weight {weight}")
        return coords.T.copy()


class SimpleModule(ModuleRealization):
    """
    L(lam) = Delta(lam) modulo the radical of the contravariant form.

    The class of x in Delta_nu has coordinates Q_nu x, where Q_nu is the RREF row basis of the
    Gram matrix; the pivot columns of Q_nu give a section.
    """
    kind = "Simple"

    def __init__(self, delta: WeylModule, validate: bool = True):
        super().__init__(delta.lam, delta.p, delta.shift)
        self.delta = delta
        self._gram: Dict[Weight, np.ndarray] = {}
        self._quotient: Dict[Weight, Tuple[np.ndarray, List[int]]] = {}
        for w in delta.weights():
            rows = delta.basis_rows(w)
            self._gram[w] = mod_p(rows @ rows.T, self.p)
            Q, pivots = row_basis(self._gram[w], self.p)
            if Q.shape[0]:
                self._quotient[w] = (Q, pivots)
        self._dims = {w: Q.shape[0] for w, (Q, _) in self._quotient.items()}
        if validate:
            self.validate_contravariance()
        _logger.info("Built L%s over F_%d: dimension %d", self.lam, self.p, self.dimension)

    def radical_dimension(self, weight: Sequence[int]) -> int:
        return self.delta.dim(weight) - self.dim(weight)

    def validate_contravariance(self):
        """Checks A_F^T G_{nu - alpha} = G_nu A_E for every simple root and weight."""
        delta, p = self.delta, self.p
        for w in delta.weights():
            for l in range(1, self.n):
                lower = add_weights(w, root(self.n, l + 1, l))
                if not delta.dim(lower):
                    continue
                lhs = mod_p(delta.F(l, 1, w).T @ self._gram[lower], p)
                rhs = mod_p(self._gram[w] @ delta.E(l, 1, lower), p)
                if not np.array_equal(lhs, rhs):
                    raise OracleConsistencyError(f"contravariant form fails for alpha_{l} at weight {w}")

    def _compute_action(self, a, b, r, weight, target):
        A = self.delta.action(a, b, r, weight)
        Q_target, _ = self._quotient[target]
        _, source_pivots = self._quotient[weight]
        return mod_p(Q_target @ A, self.p)[:, source_pivots]


class DualWeylModule(ModuleRealization):
    """Nabla(lam) on the dual basis: X_{ab}^{(r)} acts by the transpose of X_{ba}^{(r)} on Delta."""
    kind = "Nabla"

    def __init__(self, delta: WeylModule):
        super().__init__(delta.lam, delta.p, delta.shift)
        self.delta = delta
        self._dims = {w: delta.dim(w) for w in delta.weights()}

    def _compute_action(self, a, b, r, weight, target):
        return self.delta.action(b, a, r, target).T.copy()


def build_weyl(lam: Sequence[int], p: int, tensor_limit: Optional[int] = None) -> WeylModule:
    return WeylModule(lam, p, DEFAULT_TENSOR_LIMIT if tensor_limit is None else tensor_limit)


def simple_quotient(delta: WeylModule, validate: bool = True) -> SimpleModule:
    return SimpleModule(delta, validate)


def dual_realization(delta: WeylModule) -> DualWeylModule:
    return DualWeylModule(delta)


def highest_vector(mod: ModuleRealization) -> ModuleVector:
    """f_lambda: the coordinate 1 on the one-dimensional highest weight space."""
    if mod.dim(mod.lam) != 1:
        raise OracleConsistencyError(f"highest weight space of {mod.kind}{mod.lam} is not one-dimensional")
    return ModuleVector(mod.lam, np.ones(1, dtype=np.int64))


def apply(mod: ModuleRealization, a: int, b: int, r: int, v: ModuleVector) -> ModuleVector:
    """X_{ab}^{(r)} v."""
    matrix = mod.action(a, b, r, v.weight)
    if matrix.shape[1] != len(v.coords):
        raise ValueError(
            f"vector has {len(v.coords)} coordinates, but weight {v.weight} has dimension {matrix.shape[1]}"
        )
    target = add_weights(v.weight, root(mod.n, a, b, r))
    return ModuleVector(target, mod_p(matrix @ v.coords, mod.p))


def joint_kernel(mod: ModuleRealization, weight: Sequence[int], levels: Iterable[int]) -> np.ndarray:
    """
    Common kernel of E_l^{(r)} (l in levels, r >= 1) on a weight space.

    :return: matrix whose columns form a basis of the kernel
    """
    weight = tuple(weight)
    blocks = []
    for l in levels:
        for r in range(1, mod.r_max(l) + 1):
            if mod.dim(add_weights(weight, root(mod.n, l, l + 1, r))):
                blocks.append(mod.E(l, r, weight))
    if not blocks:
        return np.eye(mod.dim(weight), dtype=np.int64)
    return nullspace_mod(np.vstack(blocks), mod.p)


def high_weight_vectors(mod: ModuleRealization) -> List[Tuple[Weight, np.ndarray]]:
    """
    GL_{n-1}-high weight spaces: for every weight, the joint kernel of E_l^{(r)}, l <= n-2.

    :return: list of (mu, basis) with mu the first n-1 coordinates of the weight
    """
    levels = range(1, mod.n - 1)
    found = []
    for w in mod.weights():
        basis = joint_kernel(mod, w, levels)
        if basis.shape[1]:
            found.append((w[:-1], basis))
    return found


def branch_weight(lam: Sequence[int], mu: Sequence[int]) -> Weight:
    """The GL_n-weight (mu, |lam| - |mu|) carried by f_{mu,lam}."""
    return tuple(mu) + (sum(lam) - sum(mu),)


def high_weight_space(mod: ModuleRealization, mu: Sequence[int]) -> np.ndarray:
    return joint_kernel(mod, branch_weight(mod.lam, mu), range(1, mod.n - 1))


def normal_weights_bruteforce(lam: Sequence[int], p: int, tensor_limit: Optional[int] = None) -> Set[Weight]:
    simple = simple_quotient(build_weyl(lam, p, tensor_limit))
    return {mu for mu, _ in high_weight_vectors(simple)}


def cf(nabla: ModuleRealization, v: ModuleVector) -> int:
    """
    The scalar with E_1^{(a_1)} ... E_{n-1}^{(a_{n-1})} v = cf(v) f_lambda, a_i = sum_{s<=i} (lam_s - nu_s).

    The rightmost factor E_{n-1}^{(a_{n-1})} acts first.
    """
    gaps = weight_gaps(nabla.lam, v.weight[:-1])
    if any(a < 0 for a in gaps):
        return 0
    w = v
    for l in range(nabla.n - 1, 0, -1):
        if gaps[l - 1]:
            w = apply(nabla, l, l + 1, gaps[l - 1], w)
    if w.weight != nabla.lam:
        raise ValueError(f"vector of weight {v.weight} does not have the degree of lambda {nabla.lam}")
    return int(w.coords[0]) % nabla.p if len(w.coords) else 0


def normalized_f(nabla: ModuleRealization, mu: Sequence[int]) -> ModuleVector:
    """
    f_{mu,lam}: the GL_{n-1}-high weight vector of weight mu scaled so that cf = 1.
    """
    mu = tuple(mu)
    if not interlaces(mu, nabla.lam):
        raise ValueError(f"mu should interlace lambda {nabla.lam}, but received {mu}")
    basis = high_weight_space(nabla, mu)
    if basis.shape[1] != 1:
        raise OracleConsistencyError(
            f"high weight space of weight {mu} in {nabla.kind}{nabla.lam} has dimension {basis.shape[1]}, expected 1"
        )
    candidate = ModuleVector(branch_weight(nabla.lam, mu), basis[:, 0])
    scale = cf(nabla, candidate)
    if scale == 0:
        raise OracleConsistencyError(f"cannot normalize the high weight vector of weight {mu}: cf vanishes")
    return ModuleVector(candidate.weight, mod_p(candidate.coords * inv_mod_scalar(scale, nabla.p), nabla.p))


def lowering_weight(N, n: int) -> Weight:
    """Weight change of F^{(N)}: each F_{ab}^{(c)} moves c from a to b."""
    change = [0] * n
    for a, b, c in N:
        change[a - 1] -= c
        change[b - 1] += c
    return tuple(change)


def apply_lowering(mod: ModuleRealization, T: LoweringElement, v: ModuleVector) -> ModuleVector:
    """
    sum_N pi_nu(h_N) F^{(N)} v for T = sum_N F^{(N)} h_N.

    Factors of F^{(N)} are ordered by increasing column, so the one with the largest column acts first.
    """
    if T.n > mod.n:
        raise ValueError(f"lowering element for n={T.n} cannot act on a GL_{mod.n}-module")
    target, total = None, None
    for N, coeff in T.sorted_terms():
        weight = add_weights(v.weight, lowering_weight(N, mod.n))
        if target is None:
            target = weight
            total = np.zeros(mod.dim(target), dtype=np.int64)
        elif weight != target:
            raise ValueError(f"lowering element is not weight-homogeneous: {N.to_text()} lands at {weight}")
        scalar = evaluate_mod_p(coeff, v.weight, mod.p)
        if not scalar:
            continue
        w = v
        for a, b, c in sorted(N, key=lambda entry: (entry[1], entry[0]), reverse=True):
            w = apply(mod, b, a, c, w)
        total = mod_p(total + scalar * w.coords, mod.p)
    if target is None:
        return ModuleVector(v.weight, np.zeros(len(v.coords), dtype=np.int64))
    return ModuleVector(target, total)


def is_high_weight(mod: ModuleRealization, v: ModuleVector, levels: Optional[Iterable[int]] = None) -> bool:
    """True when E_l^{(r)} v = 0 for all r >= 1 and l in levels (default: l <= n-2)."""
    levels = range(1, mod.n - 1) if levels is None else levels
    for l in levels:
        for r in range(1, mod.r_max(l) + 1):
            if not apply(mod, l, l + 1, r, v).is_zero():
                return False
    return True


def is_high_weight_by_cf(nabla: ModuleRealization, v: ModuleVector) -> bool:
    """
    High-weight test through cf alone: cf(v) != 0 and cf vanishes on every vector obtained from v
    by a nonempty chain of E_l^{(r)}, l <= n-2.

    Since cf is linear, it suffices to test a basis of the span reached at each weight.
    """
    if cf(nabla, v) == 0:
        return False
    p = nabla.p
    spans: Dict[Weight, np.ndarray] = {}
    frontier = {v.weight: v.coords.reshape(1, -1)}
    while frontier:
        weight = max(frontier)
        rows = frontier.pop(weight)
        for l in range(1, nabla.n - 1):
            for r in range(1, nabla.r_max(l) + 1):
                target = add_weights(weight, root(nabla.n, l, l + 1, r))
                if not nabla.dim(target):
                    continue
                image = mod_p(rows @ nabla.E(l, r, weight).T, p)
                stacked = image if target not in spans else np.vstack([spans[target], image])
                basis, _ = row_basis(stacked, p)
                if target not in spans or basis.shape[0] > spans[target].shape[0]:
                    spans[target] = basis
                    frontier[target] = basis
    for weight, basis in spans.items():
        for row in basis:
            if cf(nabla, ModuleVector(weight, row)):
                return False
    return True


@dataclass(frozen=True)
class LoweringVerdict:
    holds: bool
    nonzero: bool
    high_weight: bool
    cf: int
    weight: Weight

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "nonzero": self.nonzero,
            "high_weight": self.high_weight,
            "cf": self.cf,
            "weight": list(self.weight),
        }


def lowering_verdict(nabla: ModuleRealization, T: LoweringElement, mu: Sequence[int],
                     f: Optional[ModuleVector] = None) -> LoweringVerdict:
    """
    Decides directly whether T f_{mu,lam} is a nonzero GL_{n-1}-high weight vector of Nabla(lam).
    """
    f = normalized_f(nabla, mu) if f is None else f
    image = apply_lowering(nabla, T, f)
    nonzero = not image.is_zero()
    high = is_high_weight(nabla, image) if nonzero else False
    value = cf(nabla, image) if nonzero else 0
    return LoweringVerdict(nonzero and high, nonzero, high, value, image.weight)


def oracle_summary(lam: Sequence[int], p: int, tensor_limit: Optional[int] = None) -> dict:
    """Dimensions of Delta and L together with the normal weights, as reported by the oracle command."""
    delta = build_weyl(lam, p, tensor_limit)
    simple = simple_quotient(delta)
    normal = sorted({mu for mu, _ in high_weight_vectors(simple)}, reverse=True)
    return {
        "lambda": list(delta.lam),
        "p": p,
        "dim_delta": delta.dimension,
        "dim_simple": simple.dimension,
        "weyl_dimension": weyl_dimension(delta.lam),
        "normal_weights": [list(mu) for mu in normal],
    }
