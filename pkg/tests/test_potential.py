import math

import numpy as np
import pytest

import royden as R
from royden.errors import (
    DisconnectedPair,
    InvalidParameter,
    MonotonicityViolation,
    SameVertex,
)

from conftest import random_section


def brute_cap(s, x):
    """Independent oracle: solve the constrained quadratic by dense algebra."""
    from royden.energy import energy_matrix

    xi = s.index_of(x)
    inter = [v for v in s.interior if v != xi]
    A = energy_matrix(s, np.array(inter + [xi], dtype=int)).dense()
    k = len(inter)
    if k == 0:
        return float(A[-1, -1])
    Ab = A[:k, :k]
    rhs = -A[:k, -1]
    u = np.linalg.solve(Ab, rhs)
    full = np.concatenate([u, [1.0]])
    return float(full @ A @ full)


def test_equilibrium_p3(p3_end_masked):
    res = R.equilibrium_potential(p3_end_masked, 0)
    assert res.cap == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(res.u.values, [1.0, 0.5, 0.0], atol=1e-12)
    assert not res.degenerate
    # minimizer is harmonic off x and the mask
    lap = R.formal_laplacian(p3_end_masked, res.u)
    assert abs(lap.values[1]) < 1e-10


def test_equilibrium_star_and_killing(star, killed_point):
    assert R.equilibrium_potential(star, 0).cap == pytest.approx(3.0, abs=1e-12)
    assert R.equilibrium_potential(killed_point, 0).cap == pytest.approx(2.0, abs=1e-12)


def test_equilibrium_degenerate_without_ground():
    s = R.build_section(2, [(0, 1, 1.0)])  # no mask, no killing
    res = R.equilibrium_potential(s, 0)
    assert res.degenerate
    assert res.cap == 0.0
    np.testing.assert_array_equal(res.u.values, [1.0, 1.0])


def test_equilibrium_matches_brute_force():
    rng = np.random.default_rng(9)
    for _ in range(25):
        s = random_section(rng, n_max=20, with_killing=bool(rng.integers(0, 2)))
        x = s.labels[int(rng.choice(s.interior))]
        assert R.equilibrium_potential(s, x).cap == pytest.approx(
            brute_cap(s, x), abs=1e-8
        )


def test_capacity_monotone_in_mask():
    # enlarging the graph (pushing the mask out) can only lower the capacity
    gen = R.lattice_generator(2)
    caps = [R.equilibrium_potential(gen.section(r), gen.origin).cap for r in (2, 3, 4, 6)]
    assert all(a >= b - 1e-12 for a, b in zip(caps, caps[1:]))


def test_profile_and_extrapolation_models():
    prof = R.capacity_profile(R.lattice_generator(3), levels=(4, 6, 8, 12))
    assert prof.extrapolation.model == "plateau"
    assert prof.extrapolation.limit > 3.5
    prof = R.capacity_profile(R.lattice_generator(2), levels=(4, 8, 16, 32))
    assert prof.extrapolation.model == "log-decay"
    assert prof.extrapolation.limit == 0.0


def test_profile_rejects_bad_levels():
    with pytest.raises(InvalidParameter):
        R.capacity_profile(R.lattice_generator(2), levels=(4, 4, 8))
    with pytest.raises(InvalidParameter):
        R.capacity_profile(R.lattice_generator(2), levels=(0, 2))


def test_classify_all_families():
    assert R.classify_transience(R.lattice_generator(1)).verdict == "recurrent"
    assert R.classify_transience(R.lattice_generator(3)).verdict == "transient"
    assert R.classify_transience(R.tree_generator(3)).verdict == "transient"
    v = R.classify_transience(R.lattice_generator(2, c_const=0.1))
    assert v.verdict == "transient"
    assert "killing" in v.reason


def test_gamma_small_oracles(p3_end_masked):
    assert float(R.gamma(p3_end_masked, 0, 1)) == pytest.approx(1.0, abs=1e-10)
    assert float(R.gamma(p3_end_masked, 0, 2)) == pytest.approx(
        math.sqrt(2.0), abs=1e-10
    )
    assert R.gamma(p3_end_masked, 0, 2).regime == "wired"
    with pytest.raises(SameVertex):
        R.gamma(p3_end_masked, 1, 1)


def test_gamma_free_fallback_and_infinite():
    # ungrounded single edge: kernel is the constants, differences see the
    # pseudo-inverse, so gamma equals the free resistance root
    s = R.build_section(2, [(0, 1, 1.0)])
    g = R.gamma(s, 0, 1)
    assert float(g) == pytest.approx(1.0, abs=1e-10)
    assert g.regime == "free-fallback"
    # vertices separated by the kernel: supremum is infinite
    two = R.build_section(4, [(0, 1, 1.0), (2, 3, 1.0)])
    g = R.gamma(two, 0, 2)
    assert math.isinf(float(g))
    assert g.regime == "recurrent-section"


def test_gamma_o_single_edge():
    s = R.build_section(2, [(0, 1, 1.0)])
    assert R.gamma_o(s, 0, 0, 1) == pytest.approx(1.0, abs=1e-10)


def test_gamma_brute_force_dual_norm():
    # gamma(x,y)^2 must equal the dual norm chi^T A^{-1} chi computed densely
    from royden.energy import energy_matrix

    rng = np.random.default_rng(10)
    for _ in range(20):
        s = random_section(rng, n_max=18, with_killing=True)
        inter = list(s.interior)
        if len(inter) < 2:
            continue
        a, b = rng.choice(inter, size=2, replace=False)
        A = energy_matrix(s, s.interior).dense()
        chi = np.zeros(len(inter))
        chi[inter.index(a)] = 1.0
        chi[inter.index(b)] = -1.0
        expected = math.sqrt(float(chi @ np.linalg.solve(A, chi)))
        got = float(R.gamma(s, s.labels[int(a)], s.labels[int(b)]))
        assert got == pytest.approx(expected, abs=1e-8)


def test_free_resistance_oracles():
    tri = R.build_section(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
    assert R.free_resistance(tri, 0, 1) == pytest.approx(2.0 / 3.0, abs=1e-10)
    dbl = R.build_section(2, [(0, 1, 2.0)])
    assert R.free_resistance(dbl, 0, 1) == pytest.approx(0.5, abs=1e-10)
    two = R.build_section(4, [(0, 1, 1.0), (2, 3, 1.0)])
    with pytest.raises(DisconnectedPair):
        R.free_resistance(two, 0, 2)


def test_sup_norm_constant_certifies_bound():
    rng = np.random.default_rng(12)
    for _ in range(10):
        s = random_section(rng, n_max=15)
        c = R.sup_norm_constant(s)
        # check the certified inequality on random admissible functions
        for _ in range(10):
            vals = rng.normal(size=s.n)
            vals[s.mask] = 0.0
            f = s.fn(vals)
            q = R.energy(s, f).value
            assert f.sup_norm <= c.C * math.sqrt(q) + 1e-9


def test_ut_report_verdicts():
    assert R.uniform_transience_report(R.lattice_generator(1)).verdict == "refuted"
    rep = R.uniform_transience_report(R.lattice_generator(3))
    assert rep.verdict == "certified-UT" and rep.evidence == "transitivity"
    rep = R.uniform_transience_report(R.tree_generator(3))
    assert rep.verdict == "certified-UT" and rep.evidence == "spectral-gap"
    assert rep.gamma_diameter_bound == pytest.approx(2.0 * rep.C)


def test_profile_monotonicity_guard():
    # a generator whose capacity increases with the level violates exhaustion
    calls = {}

    def build(level):
        # growing killing term: capacity grows with the level
        calls[level] = True
        return R.build_section(1, [], c={0: float(level)})

    gen = R.custom_generator(build, origin=0, family="custom")
    with pytest.raises(MonotonicityViolation):
        R.capacity_profile(gen, levels=(1, 2, 3))
