import numpy as np
import pytest

from analog_ecc import construct_code
from analog_ecc.channel import (
    CSV_HEADER,
    FixedAbove,
    NoError,
    TrialConfig,
    UniformRange,
    adversarial_epsilon,
    append_csv,
    parse_magnitude,
    read_csv,
    run_campaign,
    sample_disturbance,
    sample_single_error,
)
from analog_ecc.errors import DomainError

from conftest import random_unit_code


@pytest.fixture(scope="module")
def t4():
    return construct_code(4)


def test_disturbance_in_box(rng):
    eps = sample_disturbance(1000, 0.3, rng)
    assert eps.shape == (1000,)
    assert np.max(np.abs(eps)) <= 0.3
    assert np.all(sample_disturbance(5, 0.0, rng) == 0)
    with pytest.raises(DomainError):
        sample_disturbance(3, -1.0, rng)


def test_single_error(rng):
    e, j0 = sample_single_error(10, 4.0, rng)
    assert np.count_nonzero(e) == 1 and abs(e[j0]) == 4.0
    e, _ = sample_single_error(10, 0.0, rng)
    assert not e.any()


def test_adversarial_epsilon_is_extreme(t4):
    for j0 in (0, 5, 32):
        eps = adversarial_epsilon(t4, j0, 0.7)
        np.testing.assert_allclose(np.abs(eps), 0.7)
    assert not adversarial_epsilon(t4, 0, 0.0).any()


def test_adversarial_epsilon_raises_competitor_correlation(t4, rng):
    H = np.asarray(t4.H)
    gram = H.T @ H
    j0 = 7
    eps = adversarial_epsilon(t4, j0, 1.0)
    row = np.abs(gram[j0]).copy()
    row[j0] = -1
    j = int(np.argmax(row))
    push = abs(gram[j] @ eps)
    for _ in range(200):
        other = rng.uniform(-1, 1, t4.n)
        assert abs(gram[j] @ other) <= push + 1e-12


def test_fixed_above_campaign_is_exact(t4):
    stats = run_campaign(TrialConfig(t4, 5000, seed=1, magnitude=FixedAbove(2.0)))
    assert stats.trials == 5000 and stats.exact == 5000
    assert stats.violations == 0
    assert all(v == 0 for v in stats.audit.values())


def test_adversarial_campaign_is_exact(t4):
    stats = run_campaign(TrialConfig(t4, 300, seed=2, magnitude=FixedAbove(2.0), adversarial=True))
    assert stats.exact == 300


def test_subthreshold_campaign_is_safe(t4):
    Delta = t4.thresholds(1.0).delta_threshold
    stats = run_campaign(TrialConfig(t4, 5000, seed=3, magnitude=UniformRange(0.0, Delta)))
    assert stats.violation_d1 == 0 and stats.violation_d2 == 0
    assert stats.exact + stats.safe_subset == 5000
    assert stats.safe_subset > 0


def test_no_error_campaign(t4):
    stats = run_campaign(TrialConfig(t4, 3000, seed=4, magnitude=NoError()))
    assert stats.exact == 3000
    assert stats.max_xi_no_error <= t4.thresholds(1.0).theta


def test_workers_do_not_change_counts(t4):
    cfg = TrialConfig(t4, 6000, seed=5, magnitude=UniformRange(0.0, 300.0))
    a = run_campaign(cfg, workers=1)
    b = run_campaign(cfg, workers=2)
    assert a.csv_row() == b.csv_row()
    assert a.audit == b.audit


def test_classify_delta_override_exposes_violations(rng):
    # with an impossible threshold every small error must be reported as a miss
    code = random_unit_code(rng, 3, 8)
    cfg = TrialConfig(code, 2000, seed=6, magnitude=UniformRange(1.0, 2.0), classify_delta=0.5)
    stats = run_campaign(cfg)
    assert stats.violation_d2 > 0


def test_csv_round_trip(tmp_path, t4):
    path = tmp_path / "runs.csv"
    s1 = run_campaign(TrialConfig(t4, 100, seed=1, magnitude=FixedAbove(2.0)))
    s2 = run_campaign(TrialConfig(t4, 200, seed=2, magnitude=NoError()))
    append_csv(path, s1)
    append_csv(path, s2)
    rows = read_csv(path)
    assert list(rows[0]) == list(CSV_HEADER)
    assert [int(r["trials"]) for r in rows] == [100, 200]
    assert float(rows[0]["Delta"]) == s1.Delta
    assert path.read_text().count("label,") == 1


def test_config_validation(t4):
    with pytest.raises(DomainError):
        TrialConfig(t4, 0)
    with pytest.raises(DomainError):
        TrialConfig(t4, 10, delta=0.0)
    with pytest.raises(DomainError):
        TrialConfig(t4, 10, magnitude=UniformRange(2.0, 1.0))


def test_parse_magnitude():
    assert parse_magnitude("2xDelta") == FixedAbove(2.0)
    assert parse_magnitude("none") == NoError()
    assert parse_magnitude("uniform:0:5") == UniformRange(0.0, 5.0)
    assert parse_magnitude("uniform:0:1xDelta", 10.0) == UniformRange(0.0, 10.0)
    for bad in ("2Delta", "uniform:1", "uniform:a:b", "fooxDelta"):
        with pytest.raises(DomainError):
            parse_magnitude(bad, 1.0)
    with pytest.raises(DomainError):
        parse_magnitude("uniform:0:1xDelta")
