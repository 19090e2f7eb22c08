"""Truncated elements of the q-commuting coordinate algebra and their seminorms.

Elements are stored on the normal-ordered monomial basis x^k =
x_1^{k_1} ... x_n^{k_n}; the generators satisfy x_i x_j = q x_j x_i for
i < j.  Products above the degree cap are dropped and the element is
marked saturated; norms of saturated elements are lower bounds for the
untruncated values.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .qcombinatorics import (
    MultiIndex,
    Word,
    as_multi_index,
    ball_weight,
    cross_degree_sum,
    degree,
    log_ball_weight,
    log_w_q,
    multi_indices_up_to,
    p_proj,
    w_q,
)

_TWO_PI = 2.0 * math.pi


class IncompatibilityError(ValueError):
    """Raised when combining elements with different n, q, or degree cap."""


@dataclass(frozen=True)
class QParameter:
    """Deformation parameter q kept in polar form.

    Storing modulus and phase separately keeps |q| exact in the weight
    formulas (abs() of a complex would lose digits) and makes integer
    powers q**e cheap and stable.
    """

    modulus: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        if not (self.modulus > 0 and math.isfinite(self.modulus)):
            raise ValueError("modulus must be positive and finite")
        if not math.isfinite(self.phase):
            raise ValueError("phase must be finite")
        object.__setattr__(self, "modulus", float(self.modulus))
        object.__setattr__(self, "phase", float(self.phase) % _TWO_PI)

    @property
    def value(self) -> complex:
        return self.modulus * cmath.exp(1j * self.phase)

    def power(self, e: int) -> complex:
        """q**e with exact modulus |q|**e and exact phase e*arg(q) mod 2pi."""
        return self.modulus ** e * cmath.exp(1j * ((e * self.phase) % _TWO_PI))

    def inverse(self) -> "QParameter":
        return QParameter(1.0 / self.modulus, -self.phase)

    @classmethod
    def from_complex(cls, z: complex) -> "QParameter":
        z = complex(z)
        if z == 0:
            raise ValueError("q must be nonzero")
        return cls(abs(z), cmath.phase(z))


def normal_order_exponent(k: MultiIndex, m: MultiIndex) -> int:
    """Integer e with x^k x^m = q**e x^(k+m); equals -sum_{i<j} k_j m_i."""
    total = 0
    prefix = 0  # sum of m_i over i < current position
    for i in range(len(k)):
        total += k[i] * prefix
        prefix += m[i]
    return -total


def normal_order_word(word: Word, q: QParameter, n: int) -> tuple[complex, MultiIndex]:
    """Brute-force rewriting oracle for the normal form of a generator word.

    Applies the defining relation literally: an adjacent descent
    x_j x_i (j > i) is swapped to x_i x_j at the cost of one factor
    q^(-1).  Each swap removes exactly one inversion, so this terminates.
    Kept as the independent reference for the closed form used by
    :func:`multiply`; do not use in hot paths.
    """
    letters = list(word)
    coeff = 1.0 + 0.0j
    q_inv = q.power(-1)
    while True:
        for s in range(len(letters) - 1):
            if letters[s] > letters[s + 1]:
                letters[s], letters[s + 1] = letters[s + 1], letters[s]
                coeff *= q_inv
                break
        else:
            break
    return coeff, p_proj(tuple(letters), n)


class QElement:
    """Degree-truncated series on the normal-ordered monomial basis.

    Treat instances as immutable: all arithmetic returns new elements.
    ``saturated`` is sticky; once a product has dropped a term past the
    cap the flag propagates to everything computed from the result.
    """

    __slots__ = ("n", "q", "cap", "coefficients", "saturated")

    def __init__(
        self,
        n: int,
        q: QParameter,
        coefficients: Mapping[MultiIndex, complex] | None = None,
        *,
        cap: int,
        saturated: bool = False,
    ) -> None:
        if n < 1:
            raise ValueError("n must be >= 1")
        if cap < 0:
            raise ValueError("cap must be >= 0")
        if not isinstance(q, QParameter):
            raise TypeError("q must be a QParameter")
        coeffs: dict[MultiIndex, complex] = {}
        for key, c in (coefficients or {}).items():
            kk = as_multi_index(key, n)
            if degree(kk) > cap:
                raise ValueError(f"monomial {kk} exceeds degree cap {cap}")
            cc = complex(c)
            if cc != 0:
                coeffs[kk] = cc
        self.n = n
        self.q = q
        self.cap = cap
        self.coefficients = coeffs
        self.saturated = bool(saturated)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n: int, q: QParameter, *, cap: int) -> "QElement":
        return cls(n, q, {}, cap=cap)

    @classmethod
    def unit(cls, n: int, q: QParameter, *, cap: int) -> "QElement":
        return cls(n, q, {(0,) * n: 1.0}, cap=cap)

    @classmethod
    def monomial(
        cls, n: int, q: QParameter, k: Iterable[int], coeff: complex = 1.0, *, cap: int
    ) -> "QElement":
        return cls(n, q, {tuple(k): coeff}, cap=cap)

    @classmethod
    def generator(cls, n: int, q: QParameter, i: int, *, cap: int) -> "QElement":
        """The generator x_i, 1-based."""
        if not 1 <= i <= n:
            raise ValueError(f"generator index {i} outside 1..{n}")
        k = tuple(1 if j == i - 1 else 0 for j in range(n))
        return cls(n, q, {k: 1.0}, cap=cap)

    # -- basics ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coefficients

    def degree(self) -> int:
        return max((degree(k) for k in self.coefficients), default=0)

    def coefficient(self, k: Iterable[int]) -> complex:
        return self.coefficients.get(as_multi_index(k, self.n), 0j)

    def items(self) -> list[tuple[MultiIndex, complex]]:
        """Coefficients sorted by (degree, index) for deterministic output."""
        return sorted(self.coefficients.items(), key=lambda kv: (degree(kv[0]), kv[0]))

    def _with(self, coefficients: dict[MultiIndex, complex], saturated: bool) -> "QElement":
        out = QElement.__new__(QElement)
        out.n = self.n
        out.q = self.q
        out.cap = self.cap
        out.coefficients = coefficients
        out.saturated = saturated
        return out

    def __repr__(self) -> str:
        return (
            f"QElement(n={self.n}, |q|={self.q.modulus:g}, arg q={self.q.phase:g}, "
            f"terms={len(self.coefficients)}, cap={self.cap}, saturated={self.saturated})"
        )

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "QElement") -> "QElement":
        _check_compatible(self, other)
        out = dict(self.coefficients)
        for k, c in other.coefficients.items():
            acc = out.get(k, 0j) + c
            if acc == 0:
                out.pop(k, None)
            else:
                out[k] = acc
        return self._with(out, self.saturated or other.saturated)

    def __neg__(self) -> "QElement":
        return self._with({k: -c for k, c in self.coefficients.items()}, self.saturated)

    def __sub__(self, other: "QElement") -> "QElement":
        return self + (-other)

    def scaled(self, c: complex) -> "QElement":
        c = complex(c)
        if c == 0:
            return self._with({}, self.saturated)
        return self._with({k: v * c for k, v in self.coefficients.items()}, self.saturated)

    def __mul__(self, other):
        if isinstance(other, QElement):
            return multiply(self, other)
        if isinstance(other, (int, float, complex)):
            return self.scaled(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scaled(other)
        return NotImplemented


def _check_compatible(a: QElement, b: QElement) -> None:
    if a.n != b.n:
        raise IncompatibilityError(f"dimension mismatch: {a.n} vs {b.n}")
    if a.q != b.q:
        raise IncompatibilityError(f"parameter mismatch: {a.q} vs {b.q}")
    if a.cap != b.cap:
        raise IncompatibilityError(f"cap mismatch: {a.cap} vs {b.cap}")


def multiply(a: QElement, b: QElement) -> QElement:
    """Product in the q-commuting algebra, truncated at the common cap.

    Uses the closed form x^k x^m = q**e(k,m) x^(k+m) with
    e(k,m) = -sum_{i<j} k_j m_i, whose sign is pinned down by the
    rewriting oracle :func:`normal_order_word`.
    """
    _check_compatible(a, b)
    out: dict[MultiIndex, complex] = {}
    truncated = False
    q = a.q
    cap = a.cap
    for k, ck in a.coefficients.items():
        for m, cm in b.coefficients.items():
            s = tuple(x + y for x, y in zip(k, m))
            if degree(s) > cap:
                truncated = True
                continue
            c = ck * cm * q.power(normal_order_exponent(k, m))
            acc = out.get(s, 0j) + c
            if acc == 0:
                out.pop(s, None)
            else:
                out[s] = acc
    return a._with(out, a.saturated or b.saturated or truncated)


def scale_auto(a: QElement, rho: float) -> QElement:
    """Automorphism-style rescaling x_i -> rho x_i: multiplies c_k by rho^|k|."""
    if not (rho > 0 and math.isfinite(rho)):
        raise ValueError("rho must be positive and finite")
    return a._with(
        {k: c * rho ** degree(k) for k, c in a.coefficients.items()}, a.saturated
    )


def reversal_iso(a: QElement) -> QElement:
    """Order-reversing isomorphism onto the inverse-parameter algebra.

    Sends x_i to x_{n+1-i}; on monomials x^k the image normal-orders to
    q**cross_degree_sum(k) x^(reversed k), the coefficient fixed by the
    rewriting oracle.  Isometric for both norm families and multiplicative
    (checked in the tests).
    """
    out: dict[MultiIndex, complex] = {}
    for k, c in a.coefficients.items():
        out[k[::-1]] = c * a.q.power(cross_degree_sum(k))
    return QElement(a.n, a.q.inverse(), out, cap=a.cap, saturated=a.saturated)


# ---------------------------------------------------------------------------
# seminorms

FAMILIES = (
    "polydisk",
    "ball",
    "free_polydisk",
    "free_taylor",
    "free_ball",
    "vaksman",
    "popescu",
)


@dataclass(frozen=True)
class SeminormSpec:
    """Which seminorm to evaluate: family name plus its shape parameters."""

    family: str
    rho: float
    tau: float = 1.0
    radius: float = math.inf

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise ValueError("rho must be positive and finite")
        if self.rho >= self.radius:
            raise ValueError("rho must be < radius")
        if self.tau < 1.0:
            raise ValueError("tau must be >= 1")


def polydisk_norm(a: QElement, spec: SeminormSpec) -> float:
    """Weighted coefficient norm sum |c_k| w_q(k) rho^|k|.

    For saturated elements the value is a lower bound of the untruncated
    norm (dropped tail terms are nonnegative contributions).
    """
    if spec.family != "polydisk":
        raise ValueError(f"spec family {spec.family!r}, expected 'polydisk'")
    mod = a.q.modulus
    rho = spec.rho
    return math.fsum(
        abs(c) * w_q(k, mod) * rho ** degree(k) for k, c in a.coefficients.items()
    )


def ball_norm(a: QElement, spec: SeminormSpec) -> float:
    """Weighted coefficient norm sum |c_k| ball_weight(k) rho^|k| (lower bound when saturated)."""
    if spec.family != "ball":
        raise ValueError(f"spec family {spec.family!r}, expected 'ball'")
    mod = a.q.modulus
    rho = spec.rho
    return math.fsum(
        abs(c) * ball_weight(k, mod) * rho ** degree(k) for k, c in a.coefficients.items()
    )


@dataclass(frozen=True)
class WeightRatioScan:
    """Extremes of ball_weight(k)/w_q(k) over all |k| <= d_max in dimension n."""

    q_mod: float
    n: int
    d_max: int
    min_ratio: float
    max_ratio: float
    min_at: MultiIndex
    max_at: MultiIndex


def weight_ratio_scan(q_mod: float, n: int, d_max: int) -> WeightRatioScan:
    """Scan the two weight systems against each other for |q| != 1.

    The ratio being pinched inside (0, 1] for |q| > 1 witnesses that the
    two seminorm families generate the same series space there (and, via
    reversal_iso, for |q| < 1).
    """
    if q_mod == 1.0:
        raise ValueError("weight ratio scan requires |q| != 1")
    best_min = math.inf
    best_max = -math.inf
    min_at: MultiIndex = (0,) * n
    max_at: MultiIndex = (0,) * n
    for k in multi_indices_up_to(n, d_max):
        log_ratio = log_ball_weight(k, q_mod) - log_w_q(k, q_mod)
        ratio = math.exp(log_ratio)
        if ratio < best_min:
            best_min, min_at = ratio, k
        if ratio > best_max:
            best_max, max_at = ratio, k
    return WeightRatioScan(q_mod, n, d_max, best_min, best_max, min_at, max_at)
