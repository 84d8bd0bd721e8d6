import math

import numpy as np
import numpy.testing as npt
import pytest
from scipy.optimize import linprog

from kuramoto_polytopes.core import project_rows
from kuramoto_polytopes.membership import (
    HullDefectError,
    eig_stability_oracle,
    hull_membership,
    in_polytope,
    jacobian,
    numeric_jacobian,
    order_param_locking_test,
    rado_membership,
    stability_check,
    vertex_matrix,
)
from kuramoto_polytopes.norms import PolytopeSpec, norm_for, spread
from kuramoto_polytopes.points import (
    cs_configuration,
    cs_points,
    db_points,
    frequency_from_configuration,
    optimal_phase,
    tau,
    tau_general,
)

ALPHA_PLUS = math.acos((-1 + math.sqrt(33)) / 8)


def test_in_polytope_examples():
    for n in (3, 4, 6):
        for spec in (PolytopeSpec("I_DB", n), PolytopeSpec("C_CS_all", n)):
            assert in_polytope(spec, np.zeros(n))
        y = np.zeros(n)
        y[0], y[1] = (n + 1) / 2, -(n + 1) / 2
        assert not in_polytope(PolytopeSpec("I_DB", n), y)
    with pytest.raises(ValueError, match="dimension mismatch"):
        in_polytope(PolytopeSpec("I_DB", 4), np.zeros(3))


def test_hull_membership_examples():
    V = db_points(4)
    v = V.array()[0]
    cert = hull_membership(V, v)
    assert cert.inside and cert.objective == pytest.approx(1.0)
    cert0 = hull_membership(V, np.zeros(4))
    assert cert0.inside and cert0.objective == pytest.approx(0.0, abs=1e-12)
    out = hull_membership(V, 1.01 * v)
    assert not out.inside and out.objective == pytest.approx(1.01)


def test_hull_certificate_reconstructs():
    rng = np.random.default_rng(0)
    fams = [db_points(5), cs_points(5)]
    V = vertex_matrix(fams)
    for y in project_rows(rng.normal(size=(50, 5))) * 3:
        cert = hull_membership(fams, y)
        assert np.all(cert.coefficients >= -1e-12)
        npt.assert_allclose(V.T @ cert.coefficients, y, atol=1e-7 * (1 + np.linalg.norm(y)))
        assert cert.objective == pytest.approx(cert.coefficients.sum())


def test_hull_lp_matches_scipy():
    rng = np.random.default_rng(1)
    V = vertex_matrix([db_points(5), cs_points(5, 2)])
    for y in project_rows(rng.normal(size=(40, 5))) * 2:
        ref = linprog(np.ones(len(V)), A_eq=V.T, b_eq=y, bounds=(0, None), method="highs")
        assert hull_membership(V, y).objective == pytest.approx(ref.fun, rel=1e-8, abs=1e-10)


def test_hull_defect_when_not_spanning():
    V = np.array([[1.0, -1.0, 0.0], [-1.0, 1.0, 0.0]])
    with pytest.raises(HullDefectError):
        hull_membership(V, np.array([1.0, 0.0, -1.0]))


def test_rado_examples():
    v = tau_general(6, 2).value * np.array([1, 1, -1, -1, 0, 0])
    assert rado_membership(v, v)
    assert rado_membership(np.zeros(5), [1, 0, 0, 0, -1])
    with pytest.raises(ValueError, match="sum mismatch"):
        rado_membership([1, 0, 0], [1, 0, -1])
    rng = np.random.default_rng(2)
    V = cs_points(6, 2)
    for y in project_rows(rng.normal(size=(200, 6))) * 2:
        assert rado_membership(y, v) == hull_membership(V, y).inside


def test_hull_of_union_contains_members():
    rng = np.random.default_rng(3)
    for n in (4, 5):
        i_db, i_cs = PolytopeSpec("I_DB", n), PolytopeSpec("I_CS", n)
        hull = PolytopeSpec.hull_of_union(i_db, i_cs)
        Y = project_rows(rng.normal(size=(300, n)))
        Y *= 2 * tau(n).value / spread(Y)[:, None] * rng.uniform(0.3, 1.0, size=(300, 1))
        inside = in_polytope(hull, Y)
        either = in_polytope(i_db, Y) | in_polytope(i_cs, Y)
        assert np.all(inside[either])
        assert np.any(inside & ~either)


def test_prefilter_is_exact():
    rng = np.random.default_rng(4)
    for n in (4, 5):
        hull = PolytopeSpec.hull_of_union(PolytopeSpec("I_CS", n), PolytopeSpec("I_DB", n))
        Y = project_rows(rng.uniform(-1, 1, size=(400, n))) * tau(n).value
        npt.assert_array_equal(in_polytope(hull, Y, prefilter=True), in_polytope(hull, Y))


def test_locking_examples():
    assert order_param_locking_test(np.zeros(4), 4.0)
    assert not order_param_locking_test(np.array([5.0, -5.0, 0.0, 0.0]), 4.0)
    with pytest.raises(ValueError):
        order_param_locking_test(np.zeros(3), 0.0)
    w = np.array([0.5, -0.5, 0.1, -0.1])
    assert order_param_locking_test(w, 4.0) == order_param_locking_test(w / 4.0, 1.0)
    batch = np.stack([np.zeros(4), np.array([5.0, -5.0, 0, 0]), w])
    npt.assert_array_equal(order_param_locking_test(batch, 4.0), [True, False, True])


def test_locking_monotone_in_coupling():
    rng = np.random.default_rng(5)
    W = project_rows(rng.normal(size=(500, 6)))
    prev = np.zeros(500, dtype=bool)
    for gamma in np.linspace(0.5, 20, 40):
        cur = order_param_locking_test(W, gamma)
        assert np.all(cur >= prev)
        prev = cur


def test_stability_examples():
    rep = stability_check(np.zeros(5))
    npt.assert_allclose(rep.kappas, 5.0)
    assert rep.tau_sum == pytest.approx(1.0) and rep.verdict == "stable"

    rep = stability_check(np.array([-0.9, 0.0, 0.9]))
    assert rep.verdict == "stable" and math.cos(1.8) < 0

    rep = stability_check(np.array([-ALPHA_PLUS, 0.0, ALPHA_PLUS]))
    assert rep.verdict == "marginal"
    assert rep.tau_sum == pytest.approx(2.0, abs=1e-12)
    npt.assert_allclose(rep.kappas, [(15 + math.sqrt(33)) / 16, (3 + math.sqrt(33)) / 4, (15 + math.sqrt(33)) / 16], atol=1e-12)


def test_three_oscillator_family():
    alphas = np.linspace(0.01, ALPHA_PLUS - 1e-6, 50)
    assert np.any(alphas > math.pi / 4)
    for a in alphas:
        assert stability_check(np.array([-a, 0.0, a])).verdict == "stable"
    for a in np.linspace(ALPHA_PLUS + 1e-6, math.pi / 2, 20):
        assert stability_check(np.array([-a, 0.0, a])).verdict in ("unstable", "marginal")
    assert math.cos(2 * ALPHA_PLUS) == pytest.approx(-0.296535, abs=1e-5)


def test_jacobian_examples():
    n = 5
    J = jacobian(np.zeros(n))
    npt.assert_allclose(J, np.ones((n, n)) - n * np.eye(n))
    ev = np.sort(np.linalg.eigvalsh(J))
    npt.assert_allclose(ev, [-n] * (n - 1) + [0], atol=1e-12)
    assert eig_stability_oracle(J) == "stable"

    theta = cs_configuration(n, [0], [n - 1]).angles
    J = jacobian(theta)
    w, U = np.linalg.eigh(J)
    kernel = U[:, np.abs(w) < 1e-9]
    assert kernel.shape[1] == 2
    omega = frequency_from_configuration(theta).entries
    for v in (np.ones(n), omega):
        resid = v - kernel @ (kernel.T @ v)
        assert np.linalg.norm(resid) < 1e-8 * np.linalg.norm(v)


def test_jacobian_properties_and_finite_differences():
    rng = np.random.default_rng(6)
    for n in range(2, 9):
        for th in rng.uniform(-np.pi, np.pi, size=(20, n)):
            J = jacobian(th)
            npt.assert_allclose(J, J.T)
            npt.assert_allclose(J.sum(axis=1), 0, atol=1e-12)
            npt.assert_allclose(numeric_jacobian(th), J, atol=1e-6)


def test_stability_criterion_matches_eigenvalues():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(200):
        width = rng.uniform(0.1, math.pi)
        th = rng.uniform(-width, width, size=5)
        rep = stability_check(th)
        if min(abs(rep.kappas)) < 1e-6 or abs(rep.tau_sum - 2) < 1e-6:
            continue
        checked += 1
        assert rep.verdict == eig_stability_oracle(jacobian(th))
    assert checked > 190


def test_hull_and_norms_agree_on_vertex_hulls():
    rng = np.random.default_rng(8)
    for spec in (PolytopeSpec("I_DB", 5), PolytopeSpec("I_CS", 5), PolytopeSpec("I_CS_gen", 6, 2)):
        V = vertex_matrix(spec.vertex_families())
        Y = project_rows(rng.normal(size=(200, spec.n)))
        Y /= norm_for(spec, Y)[:, None]
        Y *= rng.uniform(0.5, 1.5, size=(200, 1))
        keep = np.abs(norm_for(spec, Y) - 1) > 1e-7
        for y in Y[keep]:
            assert hull_membership(V, y).inside == (norm_for(spec, y) <= 1)


def test_phase_maximizer_in_range():
    assert 0 < optimal_phase(5) < math.pi / 2
