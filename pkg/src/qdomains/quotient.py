"""Quotient seminorms over the q-commutation ideal, degree slice by degree slice.

The two-sided ideal generated by z_i z_j - q z_j z_i (i < j) is graded, so
the quotient norm of a polynomial coset only involves finite-dimensional
degree slices.  Within a degree the slice is the direct sum, over the
letter-count fibers, of the kernels of the projection functional
c |-> sum_w q^(-inv(w)) c_w; the production solver therefore works fiber
by fiber (one linear constraint each), while ``method="joint"`` runs the
same splitting on whole degree slices parametrized by the spanning
vectors, as an independent cross-check.

Minimization is Douglas-Rachford splitting: alternate the proximal map of
the weighted l1 (or fiberwise l2) objective - complex respectively group
soft-thresholding - with the projection onto the affine set of lifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .freeseries import FreeElement
from .qcombinatorics import (
    MultiIndex,
    Word,
    as_multi_index,
    degree,
    fiber_words,
    inv_count,
    p_proj,
    s_stat,
    words_of_degree,
)
from .qspace import QParameter

#: solver defaults: successive relative objective change below STOP_TOL for
#: STOP_PATIENCE iterations, hard cap MAX_ITER
STOP_TOL = 1e-10
STOP_PATIENCE = 20
MAX_ITER = 100_000


@dataclass(frozen=True)
class IdealSlice:
    """Spanning vectors of the degree-d slice of the commutation ideal."""

    n: int
    q: QParameter
    degree: int
    generators: tuple[FreeElement, ...]


def build_slice(n: int, q: QParameter, d: int) -> IdealSlice:
    """All vectors z_b (z_i z_j - q z_j z_i) z_c with |b| + |c| = d - 2, i < j."""
    if d < 0:
        raise ValueError("degree must be >= 0")
    gens: list[FreeElement] = []
    qv = q.value
    for a in range(max(d - 1, 0)):
        for beta in words_of_degree(n, a):
            for gamma in words_of_degree(n, d - 2 - a):
                for i in range(1, n + 1):
                    for j in range(i + 1, n + 1):
                        gens.append(
                            FreeElement(
                                n,
                                {
                                    beta + (i, j) + gamma: 1.0,
                                    beta + (j, i) + gamma: -qv,
                                },
                                cap=d,
                            )
                        )
    return IdealSlice(n, q, d, tuple(gens))


def slice_matrix(s: IdealSlice) -> tuple[list[Word], np.ndarray]:
    """Degree-d word list (sorted) and the matrix whose columns span the slice."""
    words = sorted(words_of_degree(s.n, s.degree))
    index = {w: i for i, w in enumerate(words)}
    mat = np.zeros((len(words), len(s.generators)), dtype=complex)
    for col, g in enumerate(s.generators):
        for w, c in g.coefficients.items():
            mat[index[w], col] = c
    return words, mat


def slice_rank(s: IdealSlice) -> int:
    if not s.generators:
        return 0
    _, mat = slice_matrix(s)
    return int(np.linalg.matrix_rank(mat))


def theoretical_slice_rank(n: int, d: int) -> int:
    """n^d minus the number of degree-d monomials, i.e. the kernel dimension."""
    return n ** d - math.comb(d + n - 1, n - 1)


def canonical_lift(k: Sequence[int], *, cap: int | None = None) -> FreeElement:
    """The nondecreasing word with letter counts k, as a free element."""
    kk = as_multi_index(k)
    word = tuple(i + 1 for i, e in enumerate(kk) for _ in range(e))
    if cap is None:
        cap = len(word)
    return FreeElement(len(kk), {word: 1.0}, cap=cap)


@dataclass
class QuotientResult:
    value: float
    per_degree: dict[int, float]
    residual: float
    iterations: int
    converged: bool
    method: str
    flags: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Douglas-Rachford core


def _dr_minimize(
    proj: Callable[[np.ndarray], np.ndarray],
    prox: Callable[[np.ndarray, float], np.ndarray],
    objective: Callable[[np.ndarray], float],
    z0: np.ndarray,
    gamma: float,
    tol: float,
    max_iter: int,
) -> tuple[float, np.ndarray, int, bool, float]:
    """Minimize objective over the affine set fixed by proj.

    Returns (best value, best feasible point, iterations, converged, gap)
    where gap is the final splitting residual ||u - P(u)||_inf.
    """
    z = z0.copy()
    best_c = proj(z0)
    best = objective(best_c)
    prev = best
    stall = 0
    gap = math.inf
    for it in range(1, max_iter + 1):
        u = prox(z, gamma)
        v = proj(2.0 * u - z)
        z += v - u
        cand = proj(u)
        val = objective(cand)
        if val < best:
            best, best_c = val, cand
        gap = float(np.max(np.abs(u - v))) if u.size else 0.0
        if abs(val - prev) <= tol * max(abs(val), 1.0e-30):
            stall += 1
            if stall >= STOP_PATIENCE:
                return best, best_c, it, True, gap
        else:
            stall = 0
        prev = val
    return best, best_c, max_iter, False, gap


def _prox_weighted_l1(weights: np.ndarray) -> Callable[[np.ndarray, float], np.ndarray]:
    def prox(z: np.ndarray, gamma: float) -> np.ndarray:
        mag = np.abs(z)
        scale = np.maximum(0.0, 1.0 - gamma * weights / np.maximum(mag, 1e-300))
        return z * scale

    return prox


def _prox_group_l2(
    groups: list[np.ndarray], weights: np.ndarray
) -> Callable[[np.ndarray, float], np.ndarray]:
    # groups: index arrays; weights: one weight per group
    def prox(z: np.ndarray, gamma: float) -> np.ndarray:
        out = z.copy()
        for idx, wg in zip(groups, weights):
            nrm = math.sqrt(float(np.sum(np.abs(z[idx]) ** 2)))
            out[idx] *= max(0.0, 1.0 - gamma * wg / max(nrm, 1e-300))
        return out

    return prox


def _hyperplane_proj(g: np.ndarray, y: complex) -> Callable[[np.ndarray], np.ndarray]:
    gbar = np.conj(g)
    gg = float(np.vdot(g, g).real)

    def proj(c: np.ndarray) -> np.ndarray:
        return c - gbar * ((np.dot(g, c) - y) / gg)

    return proj


def _solve_fiber(
    g: np.ndarray,
    y: complex,
    weights: np.ndarray,
    groups: list[np.ndarray] | None,
    group_weights: np.ndarray | None,
    tol: float,
    max_iter: int,
) -> tuple[float, int, bool, float]:
    """min sum w_i |c_i| (or w_g ||c||_2 with one group) s.t. g . c = y."""
    if len(g) == 1:
        w0 = float(weights[0]) if groups is None else float(group_weights[0])
        return w0 * abs(y) / abs(g[0]), 0, True, 0.0
    proj = _hyperplane_proj(g, y)
    if groups is None:
        prox = _prox_weighted_l1(weights)

        def objective(c: np.ndarray) -> float:
            return float(np.sum(weights * np.abs(c)))

        wmax = float(np.max(weights))
    else:
        prox = _prox_group_l2(groups, group_weights)

        def objective(c: np.ndarray) -> float:
            return math.fsum(
                float(wg) * math.sqrt(float(np.sum(np.abs(c[idx]) ** 2)))
                for idx, wg in zip(groups, group_weights)
            )

        wmax = float(np.max(group_weights))
    scale = abs(y) / math.sqrt(float(np.vdot(g, g).real))
    gamma = max(scale / wmax, 1e-300)
    z0 = proj(np.zeros(len(g), dtype=complex))
    value, _, iters, ok, gap = _dr_minimize(proj, prox, objective, z0, gamma, tol, max_iter)
    return value, iters, ok, gap


# ---------------------------------------------------------------------------
# weights


def _l1_weights(words: Sequence[Word], rho: float, tau: float | None) -> np.ndarray:
    if tau is None:
        return np.array([rho ** len(w) for w in words], dtype=float)
    return np.array([rho ** len(w) * tau ** (s_stat(w) + 1) for w in words], dtype=float)


def _fiber_image(
    target: FreeElement, q: QParameter
) -> dict[int, dict[MultiIndex, complex]]:
    """Projection coefficient y_k = sum_w q^(-inv w) t_w per degree and fiber."""
    out: dict[int, dict[MultiIndex, complex]] = {}
    for w, c in target.coefficients.items():
        d = len(w)
        k = p_proj(w, target.n)
        level = out.setdefault(d, {})
        level[k] = level.get(k, 0j) + c * q.power(-inv_count(w))
    return out


def _resolve_q(
    q: QParameter | None, slices: Mapping[int, IdealSlice] | None
) -> QParameter:
    if slices:
        qs = {s.q for s in slices.values()}
        if len(qs) > 1:
            raise ValueError("slices disagree on q")
        sq = next(iter(qs))
        if q is not None and q != sq:
            raise ValueError("explicit q disagrees with slices")
        return sq
    if q is None:
        raise ValueError("need q (directly or via slices)")
    return q


def _quotient_fiber(
    target: FreeElement,
    q: QParameter,
    weight_of: Callable[[Sequence[Word]], np.ndarray],
    grouped: bool,
    rho: float,
    tol: float,
    max_iter: int,
    method_name: str,
) -> QuotientResult:
    per_degree: dict[int, float] = {}
    residual = 0.0
    iterations = 0
    converged = True
    for d, fibers in sorted(_fiber_image(target, q).items()):
        total = 0.0
        for k, y in sorted(fibers.items()):
            if y == 0:
                continue
            words = sorted(fiber_words(k))
            g = np.array([q.power(-inv_count(w)) for w in words], dtype=complex)
            if grouped:
                weights = None
                groups = [np.arange(len(words))]
                group_weights = np.array([rho ** d], dtype=float)
                value, iters, ok, gap = _solve_fiber(
                    g, y, weights, groups, group_weights, tol, max_iter
                )
            else:
                weights = weight_of(words)
                value, iters, ok, gap = _solve_fiber(
                    g, y, weights, None, None, tol, max_iter
                )
            total += value
            iterations += iters
            converged = converged and ok
            residual = max(residual, gap)
        per_degree[d] = total
    value = math.fsum(per_degree.values())
    flags = [] if converged else ["non-convergence"]
    return QuotientResult(value, per_degree, residual, iterations, converged, method_name, flags)


# ---------------------------------------------------------------------------
# joint (whole degree slice) path


def _quotient_joint(
    target: FreeElement,
    q: QParameter,
    slices: Mapping[int, IdealSlice] | None,
    weight_of: Callable[[Sequence[Word]], np.ndarray],
    grouped: bool,
    rho: float,
    tol: float,
    max_iter: int,
) -> QuotientResult:
    degrees = sorted({len(w) for w in target.coefficients})
    if slices is None:
        slices = {d: build_slice(target.n, q, d) for d in degrees}
    per_degree: dict[int, float] = {}
    residual = 0.0
    iterations = 0
    converged = True
    for d in degrees:
        s = slices.get(d)
        if s is None:
            s = build_slice(target.n, q, d)
        if s.n != target.n or s.degree != d:
            raise ValueError("slice does not match target degree/dimension")
        words, mat = slice_matrix(s)
        t0 = np.array([target.coefficients.get(w, 0j) for w in words], dtype=complex)
        if mat.shape[1]:
            u_svd, sv, _ = np.linalg.svd(mat, full_matrices=False)
            rank = int(np.sum(sv > sv[0] * max(mat.shape) * np.finfo(float).eps)) if sv.size else 0
            basis = u_svd[:, :rank]
        else:
            basis = np.zeros((len(words), 0), dtype=complex)

        def proj(c: np.ndarray, t0=t0, basis=basis) -> np.ndarray:
            diff = c - t0
            return t0 + basis @ (basis.conj().T @ diff)

        if grouped:
            fibers: dict[MultiIndex, list[int]] = {}
            for i, w in enumerate(words):
                fibers.setdefault(p_proj(w, target.n), []).append(i)
            groups = [np.array(idx) for idx in fibers.values()]
            group_weights = np.array([rho ** d] * len(groups), dtype=float)
            prox = _prox_group_l2(groups, group_weights)

            def objective(c: np.ndarray) -> float:
                return math.fsum(
                    float(wg) * math.sqrt(float(np.sum(np.abs(c[idx]) ** 2)))
                    for idx, wg in zip(groups, group_weights)
                )

            wmax = float(np.max(group_weights))
        else:
            weights = weight_of(words)
            prox = _prox_weighted_l1(weights)

            def objective(c: np.ndarray) -> float:
                return float(np.sum(weights * np.abs(c)))

            wmax = float(np.max(weights))
        scale = float(np.max(np.abs(t0))) if np.any(t0) else 0.0
        if scale == 0.0:
            per_degree[d] = 0.0
            continue
        gamma = max(scale / wmax, 1e-300)
        value, _, iters, ok, gap = _dr_minimize(
            proj, prox, objective, t0.copy(), gamma, tol, max_iter
        )
        per_degree[d] = value
        iterations += iters
        converged = converged and ok
        residual = max(residual, gap)
    value = math.fsum(per_degree.values())
    flags = [] if converged else ["non-convergence"]
    return QuotientResult(value, per_degree, residual, iterations, converged, "joint", flags)


# ---------------------------------------------------------------------------
# public entry points


def quotient_norm_l1(
    target: FreeElement,
    rho: float,
    tau: float | None = None,
    q: QParameter | None = None,
    slices: Mapping[int, IdealSlice] | None = None,
    *,
    method: str = "fiber",
    tol: float = STOP_TOL,
    max_iter: int = MAX_ITER,
) -> QuotientResult:
    """Quotient of the weighted-l1 family by the commutation ideal slices.

    tau=None gives the plain coefficient (Taylor) weights rho^|w|;
    numeric tau >= 1 adds the block-count factor tau^(s(w)+1).
    """
    if not (rho > 0 and math.isfinite(rho)):
        raise ValueError("rho must be positive and finite")
    if tau is not None and tau < 1.0:
        raise ValueError("tau must be >= 1")
    qq = _resolve_q(q, slices)

    def weight_of(words: Sequence[Word]) -> np.ndarray:
        return _l1_weights(words, rho, tau)

    if method == "fiber":
        return _quotient_fiber(target, qq, weight_of, False, rho, tol, max_iter, "fiber")
    if method == "joint":
        return _quotient_joint(target, qq, slices, weight_of, False, rho, tol, max_iter)
    raise ValueError(f"unknown method {method!r}")


def quotient_norm_l2(
    target: FreeElement,
    rho: float,
    q: QParameter | None = None,
    slices: Mapping[int, IdealSlice] | None = None,
    *,
    method: str = "fiber",
    tol: float = STOP_TOL,
    max_iter: int = MAX_ITER,
) -> QuotientResult:
    """Quotient of the fiberwise-l2 (free ball) norm by the ideal slices."""
    if not (rho > 0 and math.isfinite(rho)):
        raise ValueError("rho must be positive and finite")
    qq = _resolve_q(q, slices)
    if method == "fiber":
        return _quotient_fiber(target, qq, lambda ws: None, True, rho, tol, max_iter, "fiber")
    if method == "joint":
        return _quotient_joint(target, qq, slices, lambda ws: None, True, rho, tol, max_iter)
    raise ValueError(f"unknown method {method!r}")
