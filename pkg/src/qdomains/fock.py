"""Degree-truncated creation-operator representation on the n-mode q-Fock space.

For 0 < q < 1 the generators act on the occupation basis e_k by

    x_j e_k = sqrt(1 - q^2) sqrt([k_j + 1]_{q^2}) q^(k_{j+1} + ... + k_n) e_{k + delta_j}

which realizes the commutation relations of the coordinate algebra
together with their adjoint (twisted CCR) counterparts.  Truncating at
total degree K keeps every matrix entry exact; only columns within the
validity window |k| <= K - deg(element) represent the untruncated
operator faithfully, so norms are computed on that column block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .qcombinatorics import MultiIndex, degree, multi_indices_up_to, q_int
from .qspace import QElement, QParameter, scale_auto


class FockTruncation:
    """Graded basis e_k, |k| <= cap, with index lookup."""

    def __init__(self, n: int, q: float, cap: int) -> None:
        if n < 1:
            raise ValueError("n must be >= 1")
        if not (0.0 < q < 1.0):
            raise ValueError("q must lie strictly between 0 and 1")
        if cap < 0:
            raise ValueError("cap must be >= 0")
        self.n = n
        self.q = float(q)
        self.cap = cap
        self.basis: tuple[MultiIndex, ...] = tuple(multi_indices_up_to(n, cap))
        self.index: dict[MultiIndex, int] = {k: i for i, k in enumerate(self.basis)}
        self.degrees = np.array([degree(k) for k in self.basis], dtype=np.int64)

    @property
    def size(self) -> int:
        return len(self.basis)

    def __repr__(self) -> str:
        return f"FockTruncation(n={self.n}, q={self.q:g}, cap={self.cap}, size={self.size})"


@dataclass
class RepMatrix:
    """Truncated operator matrix plus the degree window where it is exact."""

    matrix: sp.csr_matrix
    fock: FockTruncation
    valid_degree: int

    def window_columns(self) -> np.ndarray:
        return np.nonzero(self.fock.degrees <= self.valid_degree)[0]


def rep_generator(j: int, fock: FockTruncation) -> RepMatrix:
    """Matrix of the j-th generator (1-based); exact on columns |k| <= cap-1."""
    if not 1 <= j <= fock.n:
        raise ValueError(f"generator index {j} outside 1..{fock.n}")
    q = fock.q
    q2 = q * q
    amp = math.sqrt(1.0 - q2)
    rows: list[int] = []
    cols: list[int] = []
    data: list[float] = []
    for col, k in enumerate(fock.basis):
        if degree(k) >= fock.cap:
            continue  # image leaves the truncation; column stays zero
        target = tuple(e + 1 if i == j - 1 else e for i, e in enumerate(k))
        tail = sum(k[j:])  # k_{j+1} + ... + k_n
        entry = amp * math.sqrt(q_int(k[j - 1] + 1, q2)) * q ** tail
        rows.append(fock.index[target])
        cols.append(col)
        data.append(entry)
    mat = sp.csr_matrix(
        (np.array(data), (np.array(rows, dtype=int), np.array(cols, dtype=int))),
        shape=(fock.size, fock.size),
        dtype=complex,
    )
    return RepMatrix(mat, fock, fock.cap - 1)


def _check_element(a: QElement, fock: FockTruncation) -> None:
    if a.n != fock.n:
        raise ValueError(f"dimension mismatch: element n={a.n}, fock n={fock.n}")
    if a.q.phase != 0.0 or not math.isclose(a.q.modulus, fock.q, rel_tol=0, abs_tol=1e-12):
        raise ValueError("element parameter must equal the (real, in (0,1)) Fock q")
    if a.degree() > fock.cap:
        raise ValueError("element degree exceeds the Fock truncation cap")


def rep_element(a: QElement, fock: FockTruncation) -> RepMatrix:
    """Sum of c_k pi(x)^k over the stored support; window K - deg(a)."""
    _check_element(a, fock)
    gens = [rep_generator(j, fock).matrix for j in range(1, fock.n + 1)]
    cache: dict[MultiIndex, sp.csr_matrix] = {
        (0,) * fock.n: sp.identity(fock.size, dtype=complex, format="csr")
    }

    def monomial(k: MultiIndex) -> sp.csr_matrix:
        mat = cache.get(k)
        if mat is None:
            j = max(i for i, e in enumerate(k) if e > 0)  # last nonzero coordinate
            prev = tuple(e - 1 if i == j else e for i, e in enumerate(k))
            mat = monomial(prev) @ gens[j]
            cache[k] = mat
        return mat

    acc = sp.csr_matrix((fock.size, fock.size), dtype=complex)
    for k, c in a.items():
        acc = acc + c * monomial(k)
    return RepMatrix(acc.tocsr(), fock, fock.cap - a.degree())


def op_norm(M: RepMatrix, tol: float = 1e-10, max_iter: int = 10_000, seed: int = 0) -> float:
    """Largest singular value of the window-column block, by power iteration.

    Iterates v <- B*B v / ||.|| tracking sigma = ||B v||; stops when sigma
    stabilizes to relative ``tol``.  With the crowded singular spectra of
    shift-type operators the iterate may keep rotating inside the top
    cluster, but the tracked value settles within the cluster width, which
    is what the stopping rule measures.
    """
    cols = M.window_columns()
    if cols.size == 0:
        raise ValueError("empty validity window")
    B = M.matrix.tocsc()[:, cols]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(B.shape[1]) + 1j * rng.standard_normal(B.shape[1])
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return 0.0
    v /= nv
    sigma = 0.0
    BH = B.conj().T.tocsr()
    for _ in range(max_iter):
        w = B @ v
        s = float(np.linalg.norm(w))
        if s == 0.0:
            return 0.0
        u = BH @ w
        nu = float(np.linalg.norm(u))
        if nu == 0.0:
            return s
        v = u / nu
        if abs(s - sigma) <= tol * max(s, 1e-300):
            return s
        sigma = s
    return sigma


def vaksman_norm(a: QElement, rho: float, fock: FockTruncation) -> float:
    """Operator norm of the representation of the rho-rescaled element.

    Increasing the truncation cap can only refine the value; the window
    restriction keeps truncation artifacts out of the returned number.
    """
    if not (rho > 0 and math.isfinite(rho)):
        raise ValueError("rho must be positive and finite")
    return op_norm(rep_element(scale_auto(a, rho), fock))


def verify_tw_ccr(fock: FockTruncation, include_boundary: bool = False) -> float:
    """Max residual of the twisted commutation relations on the window.

    Checks, with X_i the truncated generators and * the adjoint:
      X_i X_j - q X_j X_i            (i < j)
      X_i* X_j - q X_j X_i*          (i != j)
      X_i* X_i - q^2 X_i X_i* - (1-q^2)(1 - sum_{k>i} X_k X_k*)
    on columns |k| <= cap-2; ``include_boundary`` widens to all columns,
    where the truncation makes the relations genuinely fail.
    """
    if fock.cap < 2:
        raise ValueError("need cap >= 2 to compose two generators")
    n, q = fock.n, fock.q
    X = [rep_generator(j, fock).matrix for j in range(1, n + 1)]
    Xs = [x.conj().T.tocsr() for x in X]
    eye = sp.identity(fock.size, dtype=complex, format="csr")
    if include_boundary:
        cols = np.arange(fock.size)
    else:
        cols = np.nonzero(fock.degrees <= fock.cap - 2)[0]

    def residual(mat: sp.spmatrix) -> float:
        block = mat.tocsc()[:, cols]
        return float(np.max(np.abs(block.data))) if block.nnz else 0.0

    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            worst = max(worst, residual(X[i] @ X[j] - q * (X[j] @ X[i])))
    for i in range(n):
        for j in range(n):
            if i != j:
                worst = max(worst, residual(Xs[i] @ X[j] - q * (X[j] @ Xs[i])))
    for i in range(n):
        tail = sp.csr_matrix((fock.size, fock.size), dtype=complex)
        for k in range(i + 1, n):
            tail = tail + X[k] @ Xs[k]
        rel = Xs[i] @ X[i] - q * q * (X[i] @ Xs[i]) - (1.0 - q * q) * (eye - tail)
        worst = max(worst, residual(rel))
    return worst


def element_for(fock: FockTruncation, coefficients, cap: int | None = None) -> QElement:
    """Convenience: a QElement with the matching real parameter q."""
    return QElement(
        fock.n,
        QParameter(fock.q, 0.0),
        coefficients,
        cap=fock.cap if cap is None else cap,
    )
