"""Joint spectral radius partials, extrapolation, domain-radius scaling."""

import math

import pytest

from qdomains.jsr import (
    ENUMERATION_LIMIT,
    JsrEstimate,
    canonical_partials,
    default_rho_grid,
    estimate_canonical_jsr,
    jsr_extrapolate,
    jsr_monotone_check,
    jsr_partials,
)
from qdomains.qspace import QElement, QParameter, SeminormSpec

Q_UNIT = QParameter(1.0, math.pi / 4)
Q_HALF = QParameter(0.5, 0.0)
Q_TWO = QParameter(2.0, 0.3)


def canonical_tuple(n, q, cap):
    return tuple(QElement.generator(n, q, i + 1, cap=cap) for i in range(n))


def test_polydisk_partials_unit_modulus_are_constant():
    # all weights are 1, so R_d = (n^d)^(1/(p d)) = n^(1/p)
    for n in (2, 3):
        for p in (1.0, 2.0, 4.0):
            seq = canonical_partials("polydisk", n, Q_UNIT, p, 20)
            assert [d for d, _ in seq] == list(range(1, 21))
            for _, v in seq:
                assert v == pytest.approx(n ** (1.0 / p), rel=1e-12)


def test_ball_partials_unit_modulus_closed_form():
    # p=2 collapses to the count of degree-d indices: (d+1 choose 1) for n=2
    seq = canonical_partials("ball", 2, Q_UNIT, 2.0, 24)
    for d, v in seq:
        assert v == pytest.approx((d + 1.0) ** (1.0 / (2 * d)), rel=1e-12)
    seq3 = canonical_partials("ball", 3, Q_UNIT, 2.0, 12)
    for d, v in seq3:
        count = math.comb(d + 2, 2)
        assert v == pytest.approx(count ** (1.0 / (2 * d)), rel=1e-12)


@pytest.mark.parametrize("q", [Q_HALF, Q_UNIT, Q_TWO])
def test_sup_partials_equal_rho_for_polydisk(q):
    # p = inf: the fiber maximum always cancels the weight exactly
    seq = canonical_partials("polydisk", 2, q, math.inf, 15, rho=0.7)
    for _, v in seq:
        assert v == pytest.approx(0.7, rel=1e-12)


@pytest.mark.parametrize("family", ["polydisk", "ball"])
@pytest.mark.parametrize("q", [Q_HALF, Q_TWO])
def test_enumeration_agrees_with_collapse(family, q):
    # the n^d brute force and the fiber-collapsed sums are the same numbers
    spec = SeminormSpec(family, 0.9)
    gens = canonical_tuple(2, q, cap=6)
    brute, flags = jsr_partials(gens, 2.0, spec, 5, force_enumeration=True)
    assert "general-tuple-enumeration" in flags
    collapsed = canonical_partials(family, 2, q, 2.0, 5, rho=0.9)
    assert len(brute) == len(collapsed) == 5
    for (d1, v1), (d2, v2) in zip(brute, collapsed):
        assert d1 == d2
        assert v1 == pytest.approx(v2, rel=1e-10)


def test_canonical_tuple_routes_to_collapse():
    gens = canonical_tuple(2, Q_HALF, cap=4)
    _, flags = jsr_partials(gens, 2.0, SeminormSpec("polydisk", 1.0), 3)
    assert flags == []


def test_general_tuple_is_flagged_and_guarded():
    q = Q_HALF
    g1 = QElement(2, q, {(1, 0): 0.5, (0, 1): 0.5}, cap=4)
    g2 = QElement.generator(2, q, 2, cap=4)
    partials, flags = jsr_partials((g1, g2), 2.0, SeminormSpec("polydisk", 1.0), 3)
    assert "general-tuple-enumeration" in flags
    assert len(partials) == 3
    with pytest.raises(ValueError):
        jsr_partials((g1, g2), 2.0, SeminormSpec("polydisk", 1.0), 40)
    assert 2 ** 40 > ENUMERATION_LIMIT


def test_saturation_stops_enumeration():
    q = Q_HALF
    g1 = QElement(2, q, {(1, 0): 0.5, (0, 1): 0.5}, cap=2)
    g2 = QElement.generator(2, q, 2, cap=2)
    partials, flags = jsr_partials((g1, g2), 2.0, SeminormSpec("polydisk", 1.0), 6)
    assert any(f.startswith("saturated-at-d=") for f in flags)
    assert len(partials) < 6


def test_partials_scale_linearly_in_rho():
    for family in ("polydisk", "ball"):
        base = canonical_partials(family, 2, Q_TWO, 2.0, 10, rho=1.0)
        scaled = canonical_partials(family, 2, Q_TWO, 2.0, 10, rho=0.3)
        for (_, v1), (_, v0) in zip(scaled, base):
            assert v1 == pytest.approx(0.3 * v0, rel=1e-12)


def test_free_taylor_partials_constant():
    seq = canonical_partials("free_taylor", 2, None, 2.0, 16, rho=0.5)
    for _, v in seq:
        assert v == pytest.approx(0.5 * math.sqrt(2.0), rel=1e-12)


def test_free_polydisk_partials_closed_form():
    n, p, tau, rho = 2, 2.0, 1.5, 0.8
    seq = canonical_partials("free_polydisk", n, None, p, 10, rho=rho, tau=tau)
    for d, v in seq:
        # block refinement: first letter carries tau^p, each later letter
        # either extends its block (1) or opens a new one ((n-1) tau^p)
        total = n * tau ** p * (1.0 + (n - 1) * tau ** p) ** (d - 1)
        assert v == pytest.approx(rho * total ** (1.0 / (p * d)), rel=1e-10)


def test_free_ball_partials_match_brute_sum():
    # fiberwise l2 of single words: same n^d count as taylor at p=2
    seq = canonical_partials("free_ball", 3, None, 2.0, 8, rho=1.0)
    for _, v in seq:
        assert v == pytest.approx(math.sqrt(3.0), rel=1e-12)


def test_default_rho_grid():
    grid = default_rho_grid(1.0, 4)
    assert grid == [0.5, 0.75, 0.875, 0.9375]
    with pytest.raises(ValueError):
        default_rho_grid(math.inf)


def test_extrapolate_recovers_constant_sequences():
    seqs = {rho: [(d, rho * 2.0) for d in range(1, 30)] for rho in (0.5, 0.75)}
    est = jsr_extrapolate(seqs, 1.0, 2.0)
    assert est.extrapolated == pytest.approx(1.5, rel=1e-9)
    assert est.per_rho_limit[0.5] == pytest.approx(1.0, rel=1e-9)
    assert max(est.residuals.values()) < 1e-9
    assert est.flags == []
    assert est.partials[(0.75, 7)] == pytest.approx(1.5)


def test_extrapolate_flags_bad_fits():
    # oscillation that the smooth model cannot absorb
    seq = {0.5: [(d, 2.0 + 0.5 * (-1) ** d) for d in range(1, 30)]}
    est = jsr_extrapolate(seq, 1.0, 2.0)
    assert any(f.startswith("poor-fit") for f in est.flags)


def test_extrapolate_needs_enough_points():
    with pytest.raises(ValueError):
        jsr_extrapolate({0.5: [(d, 1.0) for d in range(1, 5)]}, 1.0, 2.0)


def test_estimate_unit_ball_value():
    est = estimate_canonical_jsr("ball", 2, Q_UNIT, 2.0, 1.0, d_max=120)
    assert est.family == "ball" and est.n == 2
    # (d+1)^(1/(2d)) -> 1, so the sup over rho < 1 is 1
    assert 0.99 <= est.extrapolated <= 1.01
    assert max(est.residuals.values()) <= 1e-3


def test_estimate_divergent_on_infinite_radius():
    est = estimate_canonical_jsr("polydisk", 2, Q_UNIT, 2.0, math.inf)
    assert math.isinf(est.extrapolated)
    assert any("divergent" in f for f in est.flags)
    assert est.rho_grid == []


def test_monotone_check_contract():
    a = estimate_canonical_jsr("polydisk", 2, Q_UNIT, 2.0, 1.0, d_max=60)
    b = estimate_canonical_jsr("ball", 2, Q_UNIT, 2.0, 1.0, d_max=60)
    chk = jsr_monotone_check(a, b)
    assert chk.passed  # ball partials sit below the polydisk ones
    assert chk.image_value <= chk.source_value * 1.01
    with pytest.raises(ValueError):
        jsr_monotone_check(a, estimate_canonical_jsr("ball", 2, Q_UNIT, 4.0, 1.0, d_max=60))
    with pytest.raises(ValueError):
        jsr_monotone_check(a, estimate_canonical_jsr("ball", 3, Q_UNIT, 2.0, 1.0, d_max=60))


def test_family_and_argument_validation():
    with pytest.raises(ValueError):
        canonical_partials("cube", 2, Q_UNIT, 2.0, 5)
    with pytest.raises(ValueError):
        jsr_partials((), 2.0, SeminormSpec("polydisk", 1.0), 5)
    with pytest.raises(ValueError):
        jsr_partials(canonical_tuple(2, Q_UNIT, 4), 2.0, SeminormSpec("free_ball", 1.0), 3)
