"""Truncated q-commuting arithmetic, reversal, coefficient seminorms."""

import cmath
import math
from itertools import product

import pytest

from qdomains.qcombinatorics import (
    cross_degree_sum,
    degree,
    inv_count,
    multi_indices_up_to,
    words_of_degree,
)
from qdomains.qspace import (
    IncompatibilityError,
    QElement,
    QParameter,
    SeminormSpec,
    ball_norm,
    multiply,
    normal_order_exponent,
    normal_order_word,
    polydisk_norm,
    reversal_iso,
    scale_auto,
    weight_ratio_scan,
)

Q_HALF = QParameter(0.5, 0.0)
Q_UNIT = QParameter(1.0, math.pi / 3)
Q_BIG = QParameter(2.0, 0.7)


def test_qparameter_basics():
    q = QParameter(2.0, 1.0)
    assert q.value == pytest.approx(2.0 * cmath.exp(1j), rel=1e-15)
    assert q.power(3) == pytest.approx(8.0 * cmath.exp(3j), rel=1e-14)
    assert q.power(0) == pytest.approx(1.0 + 0j, abs=1e-15)
    inv = q.inverse()
    assert inv.modulus == pytest.approx(0.5, rel=1e-15)
    assert inv.power(1) * q.power(1) == pytest.approx(1.0 + 0j, rel=1e-14)
    r = QParameter.from_complex(q.value)
    assert r.modulus == pytest.approx(q.modulus, rel=1e-12)
    assert cmath.exp(1j * r.phase) == pytest.approx(cmath.exp(1j * q.phase), rel=1e-12)
    with pytest.raises(ValueError):
        QParameter(-1.0, 0.0)
    with pytest.raises(ValueError):
        QParameter(0.0, 0.0)


def test_rewriting_oracle_is_inversion_count():
    # every adjacent descent swap costs one factor of 1/q
    for q in (Q_HALF, Q_UNIT, Q_BIG):
        for n in (2, 3):
            for d in range(0, 5):
                for w in words_of_degree(n, d):
                    coeff, k = normal_order_word(w, q, n)
                    assert sum(k) == d
                    assert coeff == pytest.approx(q.power(-inv_count(w)), rel=1e-12)


def test_closed_form_product_matches_oracle():
    # x^k x^m concatenated as sorted words and reordered from scratch
    for q in (Q_HALF, Q_UNIT, Q_BIG):
        for k in multi_indices_up_to(3, 3):
            for m in multi_indices_up_to(3, 3):
                word = tuple(
                    i + 1 for i, c in enumerate(k) for _ in range(c)
                ) + tuple(i + 1 for i, c in enumerate(m) for _ in range(c))
                coeff, total = normal_order_word(word, q, 3)
                e = normal_order_exponent(k, m)
                assert total == tuple(a + b for a, b in zip(k, m))
                assert coeff == pytest.approx(q.power(e), rel=1e-12)


def test_multiply_spot():
    # x2 x1 = q^{-1} x1 x2, so at q = 1/2 the reordered coefficient is 2
    x1 = QElement.generator(2, Q_HALF, 1, cap=8)
    x2 = QElement.generator(2, Q_HALF, 2, cap=8)
    p = x2 * x1
    assert p.coefficient((1, 1)) == pytest.approx(2.0 + 0j, rel=1e-15)
    p2 = p * x1
    assert p2.coefficient((2, 1)) == pytest.approx(4.0 + 0j, rel=1e-15)


def test_multiply_associative_and_distributive():
    q = Q_BIG
    a = QElement(2, q, {(1, 0): 1.5, (0, 2): 1j, (0, 0): -0.5}, cap=12)
    b = QElement(2, q, {(0, 1): -2.0, (1, 1): 0.25 + 0.5j}, cap=12)
    c = QElement(2, q, {(1, 0): 1.0, (0, 0): 3.0}, cap=12)
    lhs = multiply(multiply(a, b), c)
    rhs = multiply(a, multiply(b, c))
    for k in set(lhs.coefficients) | set(rhs.coefficients):
        assert lhs.coefficient(k) == pytest.approx(rhs.coefficient(k), rel=1e-12, abs=1e-12)
    dist = multiply(a, b + c)
    ref = multiply(a, b) + multiply(a, c)
    for k in set(dist.coefficients) | set(ref.coefficients):
        assert dist.coefficient(k) == pytest.approx(ref.coefficient(k), rel=1e-12, abs=1e-12)


def test_classical_degeneration_commutes():
    q1 = QParameter(1.0, 0.0)
    a = QElement(2, q1, {(1, 0): 2.0, (0, 1): -1.0}, cap=8)
    b = QElement(2, q1, {(0, 1): 1.0, (1, 1): 0.5}, cap=8)
    ab, ba = multiply(a, b), multiply(b, a)
    assert ab.coefficients.keys() == ba.coefficients.keys()
    for k in ab.coefficients:
        assert ab.coefficient(k) == pytest.approx(ba.coefficient(k), rel=1e-14)


def test_unit_and_zero():
    one = QElement.unit(2, Q_HALF, cap=6)
    zero = QElement.zero(2, Q_HALF, cap=6)
    a = QElement(2, Q_HALF, {(2, 1): 1.0 + 1j}, cap=6)
    assert multiply(one, a).coefficient((2, 1)) == a.coefficient((2, 1))
    assert multiply(a, one).coefficient((2, 1)) == a.coefficient((2, 1))
    assert multiply(zero, a).is_zero()
    assert (a - a).is_zero()


def test_cap_truncation_is_sticky():
    x1 = QElement.generator(1, Q_HALF, 1, cap=2)
    sq = x1 * x1
    assert not sq.saturated
    cube = sq * x1
    assert cube.saturated
    assert cube.is_zero()  # degree-3 term dropped entirely
    back = cube + QElement.unit(1, Q_HALF, cap=2)
    assert back.saturated  # flag survives later arithmetic


def test_incompatible_operands_rejected():
    a = QElement.unit(2, Q_HALF, cap=4)
    b = QElement.unit(2, Q_BIG, cap=4)
    c = QElement.unit(3, Q_HALF, cap=4)
    with pytest.raises(IncompatibilityError):
        multiply(a, b)
    with pytest.raises(IncompatibilityError):
        a + c


def test_seminorm_spec_validation():
    with pytest.raises(ValueError):
        SeminormSpec("cube", 1.0)
    with pytest.raises(ValueError):
        SeminormSpec("polydisk", -1.0)
    with pytest.raises(ValueError):
        SeminormSpec("polydisk", 2.0, radius=1.0)
    with pytest.raises(ValueError):
        SeminormSpec("polydisk", 1.0, tau=0.5)
    with pytest.raises(ValueError):
        polydisk_norm(QElement.unit(1, Q_HALF, cap=2), SeminormSpec("ball", 1.0))
    with pytest.raises(ValueError):
        ball_norm(QElement.unit(1, Q_HALF, cap=2), SeminormSpec("polydisk", 1.0))


def test_polydisk_norm_values():
    a = QElement(2, Q_HALF, {(1, 1): 2.0, (0, 0): 1.0}, cap=8)
    spec = SeminormSpec("polydisk", 0.5)
    # w((1,1)) = mod^1 = 0.5 at modulus 1/2; contribution 2 * 0.5 * 0.25
    assert polydisk_norm(a, spec) == pytest.approx(1.0 + 0.25, rel=1e-14)
    b = QElement(2, Q_BIG, {(1, 1): 2.0, (0, 0): 1.0}, cap=8)
    assert polydisk_norm(b, spec) == pytest.approx(1.0 + 0.5, rel=1e-14)


def test_ball_norm_value():
    b = QElement(2, Q_BIG, {(1, 1): 1.0}, cap=8)
    spec = SeminormSpec("ball", 1.0)
    assert ball_norm(b, spec) == pytest.approx(0.8944271909999159, rel=1e-13)


def test_scale_auto_moves_rho():
    a = QElement(2, Q_BIG, {(1, 1): 2.0, (2, 0): -1j, (0, 0): 3.0}, cap=8)
    for rho in (0.3, 0.9, 1.7):
        scaled = scale_auto(a, rho)
        assert polydisk_norm(scaled, SeminormSpec("polydisk", 1.0)) == pytest.approx(
            polydisk_norm(a, SeminormSpec("polydisk", rho)), rel=1e-13
        )


@pytest.mark.parametrize("q", [Q_HALF, Q_UNIT, Q_BIG])
def test_reversal_involution_and_homomorphism(q):
    a = QElement(3, q, {(1, 0, 2): 1.0 + 2j, (0, 1, 0): -0.5}, cap=10)
    b = QElement(3, q, {(0, 0, 1): 2.0, (1, 1, 0): 1j}, cap=10)
    ra, rb = reversal_iso(a), reversal_iso(b)
    assert ra.q.modulus == pytest.approx(1.0 / q.modulus, rel=1e-14)
    back = reversal_iso(ra)
    for k in a.coefficients:
        assert back.coefficient(k) == pytest.approx(a.coefficient(k), rel=1e-12)
    lhs = reversal_iso(multiply(a, b))
    rhs = multiply(ra, rb)
    for k in set(lhs.coefficients) | set(rhs.coefficients):
        assert lhs.coefficient(k) == pytest.approx(rhs.coefficient(k), rel=1e-11, abs=1e-12)


@pytest.mark.parametrize("q", [Q_HALF, Q_UNIT, Q_BIG])
def test_reversal_is_isometric(q):
    a = QElement(3, q, {(2, 0, 1): 1.5, (0, 3, 0): -2j, (1, 1, 1): 0.25}, cap=10)
    ra = reversal_iso(a)
    for family, norm in (("polydisk", polydisk_norm), ("ball", ball_norm)):
        for rho in (0.4, 1.0, 1.6):
            spec = SeminormSpec(family, rho)
            assert norm(ra, spec) == pytest.approx(norm(a, spec), rel=1e-12)


def test_weight_ratio_scan_pinches():
    scan = weight_ratio_scan(2.0, 2, 50)
    assert scan.max_ratio == pytest.approx(1.0, abs=1e-15)
    assert scan.max_at == (0, 0)
    # infimum over all degrees is prod_m (1 - 4^-m) to the power (n-1)/2
    phi = 1.0
    m = 1
    while 0.25 ** m >= 1e-18:
        phi *= 1.0 - 0.25 ** m
        m += 1
    assert scan.min_ratio >= math.sqrt(phi) - 1e-6
    assert scan.min_ratio == pytest.approx(0.8297816201389013, rel=1e-12)
    assert scan.min_at == (25, 25)  # balanced index maximises the crossing count
    with pytest.raises(ValueError):
        weight_ratio_scan(1.0, 2, 10)


def test_weight_ratio_scan_small_modulus_via_reversal_regime():
    # same pinch for |q| < 1 since both weights transform the same way
    scan = weight_ratio_scan(0.5, 2, 30)
    assert 0.0 < scan.min_ratio <= scan.max_ratio <= 1.0 + 1e-12
