import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from analog_ecc import (
    AnalogCode,
    HeightReport,
    construct_code,
    gamma_of,
    gamma_upper_bound,
    coherence_profile,
    m_height_exact,
    m_height_sample,
    m_height_vector,
    simplex_code,
)
from analog_ecc.errors import BudgetExceededError, DomainError
from analog_ecc.height import enumeration_size

from conftest import random_unit_code

# exact value for the t = 4 ring code, frozen from a full enumeration
T4_GAMMA2 = 87.8061197520669


def test_vector_height_examples():
    assert m_height_vector([3, -1, 2], 0) == 1.0
    assert m_height_vector([3, -1, 2], 1) == 1.5
    assert m_height_vector([3, -1, 2], 2) == 3.0
    assert m_height_vector([3, 0, 0], 1) == math.inf
    assert m_height_vector([0, 0, 0], 1) == 0.0
    assert m_height_vector([1, 2], 2) == math.inf


def test_gamma_of():
    assert gamma_of(1.0) == 4.0
    assert gamma_of(math.inf) == math.inf
    with pytest.raises(DomainError):
        gamma_of(-1.0)


def test_repetition_code_has_floor_height():
    rep = simplex_code(3)
    report = m_height_exact(rep, 2)
    assert report.value == pytest.approx(1.0, abs=1e-9)
    assert report.gamma == pytest.approx(4.0, abs=1e-6)
    assert report.lps_solved == enumeration_size(3, 2) == 12


def _pencil_height(G, m):
    # k = 2: c(phi) = cos(phi) g1 + sin(phi) g2; each magnitude ratio is monotone
    # between breakpoints, so the maximum sits at a zero or a magnitude crossing
    g1, g2 = G
    n = G.shape[1]
    angles = [math.atan2(-g1[i], g2[i]) for i in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        for s in (1.0, -1.0):
            angles.append(math.atan2(-(g1[i] - s * g1[j]), g2[i] - s * g2[j]))
    best = 0.0
    for phi in angles:
        c = math.cos(phi) * g1 + math.sin(phi) * g2
        mags = np.sort(np.abs(c))[::-1]
        # round-off zeros are the breakpoint entry itself
        mags[np.abs(mags) < 1e-13 * mags[0]] = 0.0
        best = max(best, m_height_vector(mags, m))
    return best


@pytest.mark.parametrize("r", [2, 3, 4])
def test_exact_matches_pencil_oracle(rng, r):
    for _ in range(6):
        code = random_unit_code(rng, r, r + 2)
        for m in range(1, r + 1):
            exact = m_height_exact(code, m).value
            oracle = _pencil_height(np.array(code.G), m)
            if math.isinf(oracle) or oracle > 1e8:
                assert exact > 1e6
            else:
                assert exact == pytest.approx(oracle, rel=1e-8)


def test_sampled_never_exceeds_exact(rng):
    for _ in range(8):
        code = random_unit_code(rng, 3, 7)
        for m in (1, 2, 3):
            exact = m_height_exact(code, m).value
            sampled = m_height_sample(code, m, 2000, seed=1).value
            assert sampled <= exact * (1 + 1e-9)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_exact_below_coherence_bound(rng, m):
    for _ in range(8):
        code = random_unit_code(rng, 3, 8)
        rho_m = coherence_profile(code.H, m)
        report = m_height_exact(code, m)
        assert report.gamma <= gamma_upper_bound(code.n, rho_m) + 1e-6


def test_height_is_monotone_in_m(rng):
    for _ in range(6):
        code = random_unit_code(rng, 3, 7)
        values = [m_height_exact(code, m).value for m in (1, 2, 3)]
        assert values[0] <= values[1] * (1 + 1e-12) <= values[2] * (1 + 1e-12)


def test_certificate_is_a_codeword_with_reported_height(rng):
    code = random_unit_code(rng, 3, 7)
    report = m_height_exact(code, 2)
    c = report.certificate
    assert np.max(np.abs(code.H @ c)) <= 1e-8 * np.max(np.abs(c))
    assert m_height_vector(c, 2) == report.value
    sampled = m_height_sample(code, 2, 500, seed=3)
    assert m_height_vector(sampled.certificate, 2) == sampled.value


def test_coplanar_columns_give_infinite_height():
    # columns 0, 1, 2 span a plane, so a codeword lives on those three positions
    s = 1 / math.sqrt(2)
    H = np.array([
        [1.0, 0.0, s, 0.0, 0.6],
        [0.0, 1.0, s, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.8],
    ])
    code = AnalogCode(H)
    report = m_height_exact(code, 3)
    assert report.value == math.inf
    supp = set(np.flatnonzero(report.certificate).tolist())
    assert len(supp) <= 3
    assert np.max(np.abs(H @ report.certificate)) < 1e-8


def test_m_range_checked(three_column_code):
    with pytest.raises(DomainError):
        m_height_exact(three_column_code, 0)
    with pytest.raises(DomainError):
        m_height_exact(three_column_code, 3)
    with pytest.raises(DomainError):
        m_height_sample(three_column_code, 2, 0)


def test_budget_guard():
    code = construct_code(4)
    with pytest.raises(BudgetExceededError) as info:
        m_height_exact(code, 2, budget=100)
    assert info.value.count == 2112


def test_workers_do_not_change_result(rng):
    code = random_unit_code(rng, 3, 7)
    a = m_height_exact(code, 2, workers=1)
    b = m_height_exact(code, 2, workers=2)
    assert a.value == b.value
    assert a.lps_solved == b.lps_solved


def test_sample_is_deterministic(rng):
    code = random_unit_code(rng, 3, 8)
    a = m_height_sample(code, 2, 9000, seed=11)
    b = m_height_sample(code, 2, 9000, seed=11)
    assert a.value == b.value
    np.testing.assert_array_equal(a.certificate, b.certificate)


def test_report_round_trip():
    rep = HeightReport(2, math.inf, "ExactLP", np.array([1.0, 0.0]), 5)
    d = rep.to_dict()
    assert d["value"] == "inf" and d["gamma"] == "inf"
    back = HeightReport.from_dict(d)
    assert back.value == math.inf and back.lps_solved == 5


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10.0))
def test_exact_height_scale_and_sign_invariant(seed, lam):
    rng = np.random.default_rng(seed)
    code = random_unit_code(rng, 2, 5)
    flipped = AnalogCode(code.H * np.where(rng.random(5) < 0.5, -1.0, 1.0))
    a = m_height_exact(code, 2).value
    b = m_height_exact(flipped, 2).value
    # flipping parity-check column signs flips codeword coordinates only
    assert b == pytest.approx(a, rel=1e-8)
    assert m_height_vector(lam * m_height_exact(code, 2).certificate, 2) == pytest.approx(a, rel=1e-12)


@pytest.mark.slow
def test_t4_regression_constant():
    report = m_height_exact(construct_code(4), 2)
    assert report.lps_solved == 2112
    assert report.gamma == pytest.approx(T4_GAMMA2, abs=1e-6)
