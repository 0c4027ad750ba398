import numpy as np
import pytest

import royden as R
from royden.errors import InvalidParameter, KillingUnsupported, UnmaskedSection

from conftest import random_section


def test_forced_escape_probability_one():
    # star with masked leaves: first step always hits the mask
    s = R.build_section(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)], dirichlet=[1, 2, 3])
    est = R.escape_probability(s, 0, trials=500, seed=0)
    assert est.estimate == 1.0
    assert est.successes == 500


def test_p3_escape_half(p3_end_masked):
    est = R.escape_probability(p3_end_masked, 0, trials=100_000, seed=1)
    assert est.estimate == pytest.approx(0.5, abs=4 * est.stderr)
    assert est.stderr == pytest.approx(
        np.sqrt(est.estimate * (1 - est.estimate) / est.trials)
    )


def test_weighted_step_distribution():
    # from 1: weight 3 to masked 0, weight 1 to masked 2 -> p(hit 0) = 3/4,
    # but both absorb, so escape = 1; instead check origin-return asymmetry:
    # path 0-1-2 with weights 3 and 1, mask {2}: from 0 forced to 1, then
    # p(2) = 1/4, p(back to 0) = 3/4 -> escape probability 1/4
    s = R.build_section(3, [(0, 1, 3.0), (1, 2, 1.0)], dirichlet=[2])
    est = R.escape_probability(s, 0, trials=200_000, seed=2)
    assert est.estimate == pytest.approx(0.25, abs=4 * est.stderr)
    # capacity cross-check: pi(0) * p = cap(0)
    cap = R.equilibrium_potential(s, 0).cap
    assert 3.0 * est.estimate == pytest.approx(cap, abs=3 * 3.0 * est.stderr)


def test_thread_count_invariance(p3_end_masked):
    runs = [
        R.escape_probability(p3_end_masked, 0, trials=50_000, seed=9, threads=k)
        for k in (1, 2, 4, 7)
    ]
    assert len({r.successes for r in runs}) == 1


def test_seed_sensitivity(p3_end_masked):
    a = R.escape_probability(p3_end_masked, 0, trials=50_000, seed=1)
    b = R.escape_probability(p3_end_masked, 0, trials=50_000, seed=2)
    assert a.successes != b.successes


def test_validations(p3_end_masked, killed_point):
    with pytest.raises(InvalidParameter):
        R.escape_probability(p3_end_masked, 0, trials=0, seed=0)
    with pytest.raises(InvalidParameter):
        R.escape_probability(p3_end_masked, 2, trials=10, seed=0)  # masked start
    with pytest.raises(KillingUnsupported):
        R.escape_probability(killed_point, 0, trials=10, seed=0)
    free = R.build_section(2, [(0, 1, 1.0)])
    with pytest.raises(UnmaskedSection):
        R.escape_probability(free, 0, trials=10, seed=0)


def test_random_fixture_capacity_match():
    rng = np.random.default_rng(40)
    for _ in range(5):
        s = random_section(rng, n_max=20)
        o = s.labels[int(rng.choice(s.interior))]
        oi = s.index_of(o)
        est = R.escape_probability(s, o, trials=100_000, seed=13)
        cap = R.equilibrium_potential(s, o).cap
        pi = float(s.weighted_degree[oi])
        assert pi * est.estimate == pytest.approx(cap, abs=3.5 * pi * max(est.stderr, 1e-5))
