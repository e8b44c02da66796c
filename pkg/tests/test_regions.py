from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from memsconv import nelp
from memsconv import qcore as q
from memsconv import regions as R
from memsconv.regions import Region, RegionClass


@pytest.mark.parametrize("s,expected", [
    ((0.25, 0.25, 0.25, 0.25), True),
    ((1 / 3, 1 / 3, 1 / 3, 0), True),
    ((0.7, 0.2, 0.07, 0.03), False),
])
def test_all_separable(s, expected):
    assert R.all_separable(s) == expected


@given(st.integers(0, 2**32 - 1))
def test_all_separable_matches_ppt_of_mems(seed):
    s = q.random_spectrum(np.random.default_rng(seed))
    if not R.near_boundary(s, 1e-6):
        assert R.all_separable(s) == (not q.is_entangled(q.mems(s)))


def test_thm3_applicable():
    assert R.thm3_applicable((0.4, 0.3, 0.2, 0.1))
    assert not R.thm3_applicable((0.75, 0.25, 0, 0))
    rng = np.random.default_rng(0)
    for _ in range(100):
        s = q.random_spectrum(rng, rank=2)
        assert not R.thm3_applicable(s)


def test_channel_maps_mems_to_target():
    rng = np.random.default_rng(1)
    for _ in range(50):
        s = q.random_spectrum(rng)
        if not R.thm3_applicable(s):
            continue
        c = R.NeChannelSpec(s)
        assert np.max(np.abs(R.thm3_channel_apply(c, q.mems(s)) - q.bell_diagonal(s))) <= 1e-12


def test_channel_on_maximally_mixed():
    c = R.NeChannelSpec(q.Spectrum((0.4, 0.3, 0.2, 0.1)))
    out = R.thm3_channel_apply(c, np.eye(4) / 4)
    assert q.overlap(out, 1) == pytest.approx(0.25)
    assert np.trace(out).real == pytest.approx(1)
    # Bell-diagonal output
    b = np.array([q.bell_ket(i) for i in range(1, 5)])
    d = b.conj() @ out @ b.T
    assert np.allclose(d, np.diag(np.diag(d)), atol=1e-15)


def test_channel_is_non_entangling_on_separable_inputs():
    rng = np.random.default_rng(2)
    c = R.NeChannelSpec(q.Spectrum((0.45, 0.25, 0.2, 0.1)))
    for _ in range(300):
        x = q.random_separable_state(rng)
        # separable inputs have Phi_1 fidelity <= 1/2, hence separable Bell-diagonal outputs
        assert q.overlap(x, 1) <= 0.5 + 1e-12
        assert q.min_pt_eigenvalue(R.thm3_channel_apply(c, x)) >= -1e-10


def test_channel_spec_validation():
    with pytest.raises(ValueError):
        R.NeChannelSpec(q.Spectrum((1, 0, 0, 0)))
    with pytest.raises(ValueError):
        R.NeChannelSpec(q.Spectrum((0.75, 0.25, 0, 0)))


@pytest.mark.parametrize("s,expected", [
    ((0.75, 0.25, 0, 0), True),
    ((0.6, 0.4, 0, 0), True),
    ((0.5, 0.5, 0, 0), False),
    ((1, 0, 0, 0), False),
    ((0.65, 0.2, 0.15, 0), False),
])
def test_thm4(s, expected):
    assert R.thm4_infeasible(s) == expected


@pytest.mark.parametrize("s,expected", [
    ((0.65, 0.2, 0.15, 0), True),
    ((0.6, 0.2, 0.2, 0), False),
    ((0.5, 0.3, 0.2, 0), False),
])
def test_thm5(s, expected):
    assert R.thm5_infeasible(s) == expected


@pytest.mark.parametrize("s,expected", [
    ((0.7, 0.2, 0.07, 0.03), "A"),
    ((0.62, 0.2, 0.09, 0.09), "B"),
    ((0.62, 0.22, 0.12, 0.04), "C"),
    ((0.55, 0.25, 0.15, 0.05), None),
])
def test_thm6(s, expected):
    assert R.thm6_region(s) == expected


def test_thm6_needs_lambda1_above_half():
    with pytest.raises(ValueError):
        R.thm6_region((0.4, 0.3, 0.2, 0.1))


def test_thm6_regions_disjoint_by_sampling():
    # re-evaluate each region's defining inequalities independently and count overlaps
    rng = np.random.default_rng(3)
    for _ in range(3000):
        l1, l2, l3, l4 = q.random_spectrum(rng)
        if l1 <= 0.5:
            continue
        base = 2 * l2 + l3 - l1 < 0
        a = base and 2 * l3 + l4 - l2 < 0
        b = base and 2 * l3 + l4 - l2 >= 0 and l3 <= 2 * l4 and l2 > l3 + l4
        c = base and 2 * l3 + l4 - l2 >= 0 and l3 > 2 * l4 and l2 > 1.5 * l3
        assert a + b + c <= 1
        got = R.thm6_region((l1, l2, l3, l4))
        if not R.near_boundary((l1, l2, l3, l4), 1e-8):
            assert got == ("A" if a else "B" if b else "C" if c else None)


def test_forced_values():
    assert R.forced_rank2_values(0.75) == pytest.approx((5 / 6, 1 / 6, 0.5, 0.5))
    f11, f21, _, _ = R.forced_rank2_values(1 - 1e-9)
    assert f11 == pytest.approx(1, abs=1e-8) and f21 == pytest.approx(0, abs=1e-8)
    for bad in (0.5, 1.0, 0.2):
        with pytest.raises(ValueError):
            R.forced_rank2_values(bad)


def test_forced_point_violation_exact():
    # exact rational arithmetic as the oracle
    lam, a = Fraction(3, 4), Fraction(2, 3)
    f11 = (3 * lam - 1) / (2 * lam)
    exact = 2 * a * (1 - a) * f11 + a * a / 2 - Fraction(1, 2)
    assert exact == Fraction(5, 54)
    assert R.forced_rank2_excess(0.75, 2 / 3) == pytest.approx(5 / 54, abs=1e-15)


@given(st.floats(0.5001, 0.9999))
def test_forced_excess_closed_forms(lam):
    closed = (12 * lam**2 - 9 * lam + 2) / (8 * lam**3) - 0.5
    assert R.forced_rank2_excess(lam) == pytest.approx(closed, abs=1e-12)
    assert closed == pytest.approx((lam - 0.5) ** 2 * (2 - lam) / (2 * lam**3), abs=1e-12)
    assert closed > 0


@given(st.floats(0.5001, 0.9999))
def test_forced_point_satisfies_equality_rows(lam):
    s = (lam, 1 - lam, 0, 0)
    f = np.zeros((4, 4))
    f11, f21, f12, f22 = R.forced_rank2_values(lam)
    f[0, 0], f[1, 0], f[0, 1], f[1, 1] = f11, f21, f12, f22
    p = nelp.build_lp(s, s, [0, 0.5, 1])
    assert np.allclose((p.eq_lhs @ f.ravel())[:2], [lam, 1 - lam], atol=1e-12)
    assert np.allclose((p.eq_lhs @ f.ravel())[4:6], [1, 1], atol=1e-12)


@pytest.mark.parametrize("s,expected", [
    ((0.75, 0.25, 0, 0), "BlackInfeasible(Thm4)"),
    ((0.65, 0.2, 0.15, 0), "BlackInfeasible(Thm5)"),
    ((0.7, 0.2, 0.07, 0.03), "BlackInfeasible(Thm6A)"),
    ((0.25, 0.25, 0.25, 0.25), "AllSeparable"),
    ((0.4, 0.3, 0.2, 0.1), "AllSeparable"),  # also satisfies the green condition; priority wins
    ((0.5, 0.4, 0.1, 0.0), "TargetSeparable"),
    ((0.6, 0.2, 0.1, 0.1), "GreenFeasible"),
])
def test_classify(s, expected):
    assert str(R.classify(s, nelp.feasible_for_spectrum(s))) == expected


def test_classify_orange_and_blue():
    s_orange = (0.6, 0.24, 0.13, 0.03)
    s_blue = (0.55, 0.25, 0.15, 0.05)
    assert R.classify(s_orange, nelp.feasible_for_spectrum(s_orange)).tag is Region.ORANGE
    assert R.classify(s_blue, nelp.feasible_for_spectrum(s_blue)).tag is Region.BLUE


def test_classify_raises_on_inconsistency():
    s = (0.75, 0.25, 0, 0)
    fake = nelp.feasible_for_spectrum((0.5, 0.3, 0.1, 0.1))
    with pytest.raises(R.RegionInconsistency):
        R.classify(s, fake)


def test_region_class_validation():
    with pytest.raises(ValueError):
        RegionClass(Region.GREEN, "Thm4")
    with pytest.raises(ValueError):
        RegionClass(Region.BLACK)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 4]))
def test_soundness_chain(seed, rank):
    s = q.random_spectrum(np.random.default_rng(seed), rank)
    v = nelp.feasible_for_spectrum(s)
    c = R.classify(s, v)  # raises on analytic/LP disagreement
    if R.thm3_applicable(s):
        assert v.feasible
    if R.black_detail(s):
        assert not v.feasible
    assert c == R.classify(s, v)
