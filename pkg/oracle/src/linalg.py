from typing import List, Tuple

import numpy as np


def mod_p(A: np.ndarray, p: int) -> np.ndarray:
    return np.asarray(A % p, dtype=np.int64)


def inv_mod_scalar(a, p: int) -> int:
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


def rref_mod(A: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """
    RREF over GF(p).

    :param A: integer matrix
    :param p: prime

    :return: (RREF of A, pivot columns)
    """
    A = mod_p(np.array(A, dtype=np.int64, copy=True), p)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-dimensional matrix, but received shape {A.shape}")
    m, n = A.shape
    r = 0
    pivots: List[int] = []
    for c in range(n):
        if r >= m:
            break
        nonzero = np.nonzero(A[r:, c])[0]
        if nonzero.size == 0:
            continue
        piv = r + int(nonzero[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * inv_mod_scalar(A[r, c], p) % p
        # Eliminate the column everywhere else in one step
        factors = A[:, c].copy()
        factors[r] = 0
        if factors.any():
            A = (A - np.outer(factors, A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def row_basis(A: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """Nonzero rows of the RREF of A (a basis of the row space) and their pivots."""
    if A.shape[0] == 0:
        return np.zeros((0, A.shape[1]), dtype=np.int64), []
    R, pivots = rref_mod(A, p)
    return R[:len(pivots)], pivots


def rank_mod(A: np.ndarray, p: int) -> int:
    if A.size == 0:
        return 0
    return len(rref_mod(A, p)[1])


def nullspace_mod(A: np.ndarray, p: int) -> np.ndarray:
    """Right nullspace basis of A over GF(p); columns form a basis."""
    A = mod_p(np.asarray(A, dtype=np.int64), p)
    m, n = A.shape
    if m == 0:
        return np.eye(n, dtype=np.int64)
    R, pivots = rref_mod(A, p)
    free = [j for j in range(n) if j not in set(pivots)]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for row, pc in enumerate(pivots):
            basis[pc, k] = (-R[row, f]) % p
    return basis


def coordinates(basis: np.ndarray, pivots: List[int], w: np.ndarray, p: int) -> np.ndarray:
    """
    Coordinates of w in the row space spanned by an RREF basis.

    Reading w at the pivot columns gives the coordinates; w must lie in the span.
    """
    coords = mod_p(w[pivots], p)
    if np.any(mod_p(coords @ basis - w, p)):
        raise ValueError("vector is not in the span of the basis")
    return coords
