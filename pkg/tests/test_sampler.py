import math

import numpy as np
import numpy.testing as npt
import pytest
from scipy import stats

from kuramoto_polytopes.core import project_rows
from kuramoto_polytopes.norms import PolytopeSpec, norm_for, spread
from kuramoto_polytopes.points import tau
from kuramoto_polytopes.sampler import (
    BLOCK_SIZE,
    block_rng,
    covering_half_width,
    estimate_spec_volume,
    estimate_true_volume,
    fiber_length,
    indicator_for,
    poke_estimate,
    poke_estimate_many,
    poke_samples,
    poke_weight,
    sample_hypercube,
    weight_tail_check,
)
from kuramoto_polytopes.volumes import exact_volume


def test_hypercube_moments():
    X = sample_hypercube(4, 2.0, block_rng(0, 0), 200_000)
    assert X.shape == (200_000, 4)
    assert np.all(np.abs(X) <= 2.0)
    npt.assert_allclose(X.mean(axis=0), 0, atol=0.02)
    npt.assert_allclose(X.var(axis=0), 4 / 3, rtol=0.02)
    assert sample_hypercube(3, 1.0, block_rng(0, 0)).shape == (3,)


def test_spread_of_three_uniforms_is_beta():
    X = sample_hypercube(3, 1.0, block_rng(1, 0), 20_000)
    r = spread(X) / 2
    assert stats.kstest(r, stats.beta(2, 2).cdf).pvalue > 1e-3


def test_fiber_length_identity():
    rng = np.random.default_rng(2)
    n, h = 4, 1.5
    ss = np.linspace(-10, 10, 400_001)
    ds = ss[1] - ss[0]
    for w in project_rows(rng.uniform(-1, 1, size=(10, n))):
        pts = w[None, :] + ss[:, None] / math.sqrt(n)
        numeric = np.all(np.abs(pts) <= h, axis=1).sum() * ds
        assert fiber_length(n, w, h) == pytest.approx(numeric, abs=3 * ds)
        assert poke_weight(n, w, h) * fiber_length(n, w, h) == pytest.approx((2 * h) ** n)


def test_weight_zero_outside_support():
    t = tau(4).value
    assert poke_weight(4, np.array([t, -t, 0, 0]) * 1.01) == 0
    assert poke_weight(4, np.zeros(4)) == pytest.approx((2 * t) ** 4 / (2 * 2 * t))


def test_indicator_false_gives_zero():
    est = poke_estimate(5, lambda W: np.zeros(len(W), dtype=bool), 5000, 0)
    assert est.value == 0 and est.std_error == 0


def test_sample_count_validation():
    with pytest.raises(ValueError):
        poke_estimate(4, lambda W: np.ones(len(W), dtype=bool), 999, 0)
    with pytest.raises(ValueError):
        estimate_true_volume(2, 10**4, 0)


@pytest.mark.parametrize("kind", ["C_CS", "I_DB", "I_CS", "C_DB"])
def test_estimates_match_exact_volumes(kind):
    spec = PolytopeSpec(kind, 4)
    est = estimate_spec_volume(spec, 200_000, 12345)
    assert abs(est.value - exact_volume(spec)) < 3 * est.std_error


def test_full_cube_projection_volume():
    # the whole C_CS(4) region: the weight integrates to its volume
    est = poke_estimate(4, lambda W: np.ones(len(W), dtype=bool), 100_000, 3)
    assert abs(est.value - exact_volume(PolytopeSpec("C_CS", 4))) < 3 * est.std_error


def test_deterministic_across_threads():
    specs = {k: indicator_for(PolytopeSpec(k, 5)) for k in ("I_DB", "I_CS", "C_CS")}
    m = 3 * BLOCK_SIZE + 17
    ref = poke_estimate_many(5, specs, m, 99, threads=1)
    for t in (2, 8):
        assert poke_estimate_many(5, specs, m, 99, threads=t) == ref
    assert poke_estimate_many(5, specs, m, 100)["I_DB"] != ref["I_DB"]


def test_debug_invariance_check():
    def shifted(W):
        return W[:, 0] > 0.5

    poke_estimate(4, indicator_for(PolytopeSpec("I_DB", 4)), 2000, 0, debug=True)
    with pytest.raises(ValueError, match="invariant"):
        poke_estimate(4, shifted, 2000, 0, debug=True)


def test_intersection_below_members():
    inter = PolytopeSpec.intersection(PolytopeSpec("C_DB", 6), PolytopeSpec("C_CS", 6))
    h = covering_half_width(PolytopeSpec("C_DB", 6))
    fs = {str(s): indicator_for(s) for s in (inter, *inter.members)}
    est = poke_estimate_many(6, fs, 50_000, 4, half_width=h)
    for m in inter.members:
        assert est[str(inter)].value <= est[str(m)].value


def test_covering_half_width_contains_region():
    rng = np.random.default_rng(5)
    for n in (4, 6, 9):
        for spec in [PolytopeSpec("C_DB", n)] + [PolytopeSpec("C_CS_gen", n, j) for j in range(1, n // 2 + 1)]:
            h = covering_half_width(spec)
            Y = project_rows(rng.normal(size=(5000, n)))
            Y /= norm_for(spec, Y)[:, None]
            assert np.all(spread(Y) <= 2 * h * (1 + 1e-12))
    assert covering_half_width(PolytopeSpec("I_DB", 5)) == tau(5).value


def test_true_volume_sandwich():
    n = 5
    est = estimate_true_volume(n, 100_000, 6)
    assert exact_volume(PolytopeSpec("I_CS", n)) < est.value < exact_volume(PolytopeSpec("C_CS", n))


def test_poke_samples_inspection():
    s = poke_samples(4, 10, 7)
    assert len(s) == 10
    for p in s:
        assert abs(p.omega.sum()) < 1e-12 and p.weight > 0


def test_weight_tail_slope():
    a = weight_tail_check(5, 10**5, 8)
    b = weight_tail_check(5, 2 * 10**5, 8)
    assert -2.5 <= a.slope <= -1.5
    assert abs(a.slope - b.slope) < 0.3
