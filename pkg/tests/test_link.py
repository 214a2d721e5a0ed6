import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linkrate import (LinkParams, ParameterError, binary_entropy, jstep, jstep_by_matrix_power,
                      jstep_entropy_rate, link_entropy, stationary, step_information)
from linkrate.link import EPS_DOMAIN, transition_matrix

probs = st.floats(0.001, 0.999)
GRID = np.linspace(0.05, 0.95, 20)


# values below were computed with mpmath at 40 digits from the defining formulas
HX_31 = 0.57206941999963407
HX2_31 = 0.72544354997922499


def test_stationary_examples():
    assert stationary(LinkParams(0.5, 0.5)) == (0.5, 0.5)
    s = stationary(LinkParams(0.3, 0.1))
    assert s.U == pytest.approx(0.75, abs=1e-15) and s.D == pytest.approx(0.25, abs=1e-15)
    s = stationary(LinkParams(0.01, 0.99))
    assert s.U == pytest.approx(0.01, abs=1e-15) and s.D == pytest.approx(0.99, abs=1e-15)


@given(probs, probs)
def test_stationary_sums_to_one_and_is_fixed_point(u, d):
    p = LinkParams(u, d)
    s = stationary(p)
    assert s.U + s.D == 1.0
    np.testing.assert_allclose(transition_matrix(p) @ [s.U, s.D], [s.U, s.D], atol=1e-14)


@pytest.mark.parametrize("u,d", [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0), (0.5, 5e-10), (-0.1, 0.2),
                                 (math.nan, 0.3)])
def test_domain_rejected(u, d):
    with pytest.raises(ParameterError):
        LinkParams(u, d)


def test_domain_margin_accepted():
    p = LinkParams(EPS_DOMAIN, 1 - EPS_DOMAIN)
    assert abs(p.lam) < 1


def test_bad_base():
    with pytest.raises(ParameterError):
        LinkParams(0.3, 0.1, "decibans")


def test_jstep_examples(p31, p55):
    assert jstep(p31, 1)[1:] == (0.3, 0.1)
    k = jstep(p31, 2)
    assert k.u_j == pytest.approx(0.48, abs=1e-15) and k.d_j == pytest.approx(0.16, abs=1e-15)
    assert jstep(p55, 5)[1:] == pytest.approx((0.5, 0.5), abs=1e-15)


@pytest.mark.parametrize("j", [0, -1])
def test_jstep_rejects_nonpositive(p31, j):
    with pytest.raises(ParameterError):
        jstep(p31, j)
    with pytest.raises(ParameterError):
        jstep_entropy_rate(p31, j)


@settings(max_examples=60)
@given(probs, probs, st.integers(1, 64))
def test_jstep_matches_matrix_power(u, d, j):
    p = LinkParams(u, d)
    a, b = jstep(p, j), jstep_by_matrix_power(p, j)
    assert abs(a.u_j - b.u_j) <= 1e-12 and abs(a.d_j - b.d_j) <= 1e-12


@given(probs, probs)
def test_jstep_converges_monotonically_in_abs_lambda(u, d):
    p = LinkParams(u, d)
    devs = [abs(jstep(p, j).u_j - p.U) for j in range(1, 30)]
    assert all(b <= a + 1e-16 for a, b in zip(devs, devs[1:]))


def test_binary_entropy_examples():
    assert binary_entropy(0.5) == pytest.approx(1.0, abs=1e-15)
    assert binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0
    assert binary_entropy(0.75) == pytest.approx(0.8112781244591328, abs=1e-12)
    assert binary_entropy(0.5, "nats") == pytest.approx(math.log(2), abs=1e-15)


@pytest.mark.parametrize("x", [-1e-3, 1.0001, math.nan])
def test_binary_entropy_domain(x):
    with pytest.raises(ParameterError):
        binary_entropy(x)


def test_link_entropy_examples(p31, p55):
    assert link_entropy(p55) == pytest.approx(1.0, abs=1e-15)
    assert link_entropy(p31) == pytest.approx(0.8112781244591328, abs=1e-12)
    assert link_entropy(LinkParams(0.1, 0.1)) == pytest.approx(1.0, abs=1e-15)


def test_jstep_entropy_rate_examples(p31, p55):
    assert jstep_entropy_rate(p55, 1) == pytest.approx(1.0, abs=1e-15)
    assert jstep_entropy_rate(p31, 1) == pytest.approx(HX_31, abs=1e-12)
    assert jstep_entropy_rate(p31, 2) == pytest.approx(HX2_31, abs=1e-12)
    assert abs(jstep_entropy_rate(p31, 64) - link_entropy(p31)) < 1e-12


def test_spec_printed_value_is_an_arithmetic_slip(p31):
    # 0.75 h(0.1) + 0.25 h(0.3) evaluates to 0.5720694, not the printed 0.572191
    direct = 0.75 * binary_entropy(0.1) + 0.25 * binary_entropy(0.3)
    assert direct == pytest.approx(jstep_entropy_rate(p31, 1), abs=1e-15)
    assert abs(direct - 0.572191) > 1e-4


def test_entropies_on_grid_bounded_and_monotone():
    for u in GRID:
        for d in GRID:
            p = LinkParams(float(u), float(d))
            hx = link_entropy(p)
            vals = [jstep_entropy_rate(p, j) for j in range(1, 41)]
            assert max(vals) <= hx + 1e-15
            if p.lam > 0:
                assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))


@settings(max_examples=50)
@given(probs, probs, st.integers(1, 200))
def test_step_information_is_accurate_difference(u, d, j):
    p = LinkParams(u, d)
    i = step_information(p, j)
    assert i >= 0
    assert i == pytest.approx(link_entropy(p) - jstep_entropy_rate(p, j), abs=1e-13)


def test_gap_to_link_entropy_decays_geometrically():
    for u, d in [(0.3, 0.1), (0.9, 0.9), (0.05, 0.05)]:
        p = LinkParams(u, d)
        js = np.arange(4, 41)
        gaps = np.array([step_information(p, int(j)) for j in js])
        slope = np.polyfit(js, np.log(gaps), 1)[0]
        assert slope <= math.log(abs(p.lam)) + 0.05


@given(probs, probs, st.integers(1, 10))
def test_nats_equal_bits_times_ln2(u, d, j):
    b, n = LinkParams(u, d), LinkParams(u, d, "nats")
    assert jstep_entropy_rate(n, j) == pytest.approx(jstep_entropy_rate(b, j) * math.log(2), rel=4e-16, abs=1e-300)
    assert link_entropy(n) == pytest.approx(link_entropy(b) * math.log(2), rel=4e-16)
