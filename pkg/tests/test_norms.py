import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kuramoto_polytopes.core import project_rows
from kuramoto_polytopes.norms import (
    CIRCUMSCRIBED,
    INSCRIBED,
    PolytopeSpec,
    circ_norm_generic,
    greedy_l1_decompose,
    norm_for,
    parse_spec,
    spread,
)
from kuramoto_polytopes.points import cs_points, db_points, tau, tau_general


def all_specs(n):
    out = [PolytopeSpec(k, n) for k in ("I_DB", "I_CS", "C_DB", "C_CS", "C_CS_all")]
    for j in range(1, n // 2 + 1):
        out += [PolytopeSpec("I_CS_gen", n, j), PolytopeSpec("C_CS_gen", n, j)]
    out.append(PolytopeSpec.intersection(PolytopeSpec("C_DB", n), PolytopeSpec("C_CS", n)))
    return out


def test_spread_examples():
    assert spread(np.zeros(3)) == 0
    assert spread([2, -1, -1]) == 3
    for n in range(2, 8):
        npt.assert_array_equal(spread(db_points(n).array()), n)


def test_norm_examples():
    t4 = tau(4).value
    y = t4 * np.array([1, -1, 0, 0])
    assert norm_for(PolytopeSpec("C_CS", 4), y) == pytest.approx(1.0, abs=1e-15)
    assert norm_for(PolytopeSpec("C_DB", 3), [2, -1, -1]) == pytest.approx(1.0)
    assert norm_for(PolytopeSpec("I_CS", 4), [1, -1, 0, 0]) == pytest.approx(2 / (3 * math.sqrt(3)))


def test_c_db_hand_values():
    # descending partial sums of (3,1,-1,-3): 3, 4, 3 over k(N-k) = 3, 4, 3
    assert norm_for(PolytopeSpec("C_DB", 4), [3, 1, -1, -3]) == pytest.approx(1.0)
    assert norm_for(PolytopeSpec("C_DB", 4), [1, 1, -1, -1]) == pytest.approx(0.5)


def test_norm_errors():
    with pytest.raises(ValueError, match="dimension mismatch"):
        norm_for(PolytopeSpec("I_DB", 4), np.zeros(5))
    hull = PolytopeSpec.hull_of_union(PolytopeSpec("I_DB", 4), PolytopeSpec("I_CS", 4))
    with pytest.raises(ValueError):
        norm_for(hull, np.zeros(4))


def test_spec_validation():
    with pytest.raises(ValueError):
        PolytopeSpec("C_XX", 4)
    with pytest.raises(ValueError):
        PolytopeSpec("C_CS_gen", 4, 3)
    with pytest.raises(ValueError):
        PolytopeSpec("I_DB", 2)
    with pytest.raises(ValueError):
        PolytopeSpec.intersection(PolytopeSpec("C_DB", 4), PolytopeSpec("C_CS", 5))
    with pytest.raises(ValueError):
        PolytopeSpec.intersection(PolytopeSpec("I_DB", 4))
    with pytest.raises(ValueError):
        PolytopeSpec.hull_of_union(PolytopeSpec("C_DB", 4))


@pytest.mark.parametrize(
    "text, expect",
    [
        ("I_DB(4)", "I_DB(4)"),
        ("C_CS_gen(10,3)", "C_CS_gen(10,3)"),
        ("Intersect(C_DB(4),C_CS(4))", "Intersect(C_DB(4),C_CS(4))"),
        (" Intersection( C_DB(5) , C_CS_all(5) ) ", "Intersect(C_DB(5),C_CS_all(5))"),
        ("Hull(I_CS(5),I_DB(5))", "Hull(I_CS(5),I_DB(5))"),
        ("HullOfUnion(I_CS_gen(6,2),I_DB(6))", "Hull(I_CS_gen(6,2),I_DB(6))"),
    ],
)
def test_parse_round_trip(text, expect):
    spec = parse_spec(text)
    assert str(spec) == expect
    assert parse_spec(str(spec)) == spec


@pytest.mark.parametrize("text", ["I_DB", "I_DB(4", "I_DB(4))", "Foo(4)", "I_DB(4,1,2)", "Hull(C_DB(4))", ""])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        parse_spec(text)


def test_generic_norm_matches_closed_forms():
    rng = np.random.default_rng(1)
    for n in range(3, 9):
        Y = project_rows(rng.normal(size=(300, n)))
        npt.assert_allclose(circ_norm_generic(db_points(n), Y), norm_for(PolytopeSpec("C_DB", n), Y), rtol=1e-10)
        npt.assert_allclose(circ_norm_generic(cs_points(n), Y), norm_for(PolytopeSpec("C_CS", n), Y), rtol=1e-10)
        for j in range(1, n // 2 + 1):
            npt.assert_allclose(
                circ_norm_generic(cs_points(n, j), Y),
                norm_for(PolytopeSpec("C_CS_gen", n, j), Y),
                rtol=1e-10,
            )


def test_generic_norm_examples():
    assert circ_norm_generic(cs_points(4), np.zeros(4)) == 0
    assert circ_norm_generic(cs_points(4), tau(4).value * np.array([1, -1, 0, 0])) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        circ_norm_generic(np.zeros((0, 3)), np.zeros(3))


def test_c_cs_all_is_max_over_j():
    rng = np.random.default_rng(2)
    for n in (4, 7, 10):
        Y = project_rows(rng.normal(size=(100, n)))
        per_j = np.stack([norm_for(PolytopeSpec("C_CS_gen", n, j), Y) for j in range(1, n // 2 + 1)])
        npt.assert_allclose(norm_for(PolytopeSpec("C_CS_all", n), Y), per_j.max(axis=0))


def test_i_cs_gen_j1_reduces_to_i_cs():
    rng = np.random.default_rng(3)
    for n in range(3, 10):
        Y = project_rows(rng.normal(size=(100, n)))
        npt.assert_allclose(norm_for(PolytopeSpec("I_CS_gen", n, 1), Y), norm_for(PolytopeSpec("I_CS", n), Y))


def test_vertices_on_their_own_boundary():
    for n in range(3, 8):
        npt.assert_allclose(norm_for(PolytopeSpec("I_DB", n), db_points(n).array()), 1.0)
        npt.assert_allclose(norm_for(PolytopeSpec("C_DB", n), db_points(n).array()), 1.0)
        npt.assert_allclose(norm_for(PolytopeSpec("I_CS", n), cs_points(n).array()), 1.0)
        npt.assert_allclose(norm_for(PolytopeSpec("C_CS", n), cs_points(n).array()), 1.0)
        for j in range(1, n // 2 + 1):
            V = cs_points(n, j).array()
            npt.assert_allclose(norm_for(PolytopeSpec("I_CS_gen", n, j), V), 1.0)
            npt.assert_allclose(norm_for(PolytopeSpec("C_CS_gen", n, j), V), 1.0)


def test_inscribed_inside_circumscribed():
    rng = np.random.default_rng(4)
    for n in range(3, 11):
        Y = project_rows(rng.normal(size=(10**4, n)))
        Y *= 2 * tau(n).value / spread(Y)[:, None] * rng.uniform(0, 1.2, size=(10**4, 1))
        i_cs = norm_for(PolytopeSpec("I_CS", n), Y) <= 1
        i_db = norm_for(PolytopeSpec("I_DB", n), Y) <= 1
        assert np.all(norm_for(PolytopeSpec("C_CS", n), Y[i_cs]) <= 1 + 1e-12)
        assert np.all(norm_for(PolytopeSpec("C_DB", n), Y[i_db]) <= 1 + 1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 10), st.integers(0, 2**32 - 1), st.floats(-5, 5))
def test_seminorm_axioms(n, seed, alpha):
    rng = np.random.default_rng(seed)
    x, y = project_rows(rng.normal(size=(2, n)))
    for spec in all_specs(n):
        nx, ny = norm_for(spec, x), norm_for(spec, y)
        assert norm_for(spec, alpha * x) == pytest.approx(abs(alpha) * nx, rel=1e-9, abs=1e-12)
        assert norm_for(spec, x + y) <= nx + ny + 1e-12
        assert norm_for(spec, np.zeros(n)) == 0


def test_batch_matches_single():
    rng = np.random.default_rng(5)
    Y = project_rows(rng.normal(size=(20, 6)))
    for spec in all_specs(6):
        npt.assert_allclose(norm_for(spec, Y), [norm_for(spec, y) for y in Y])


def test_greedy_examples():
    assert greedy_l1_decompose([1.0, -1.0, 0.0]) == [(1.0, (0, 1))]
    terms = greedy_l1_decompose([2.0, -1.0, -1.0])
    assert sorted(terms) == [(1.0, (0, 1)), (1.0, (0, 2))]
    assert greedy_l1_decompose(np.zeros(4)) == []


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_greedy_reconstructs(n, seed):
    y = project_rows(np.random.default_rng(seed).normal(size=n))
    terms = greedy_l1_decompose(y)
    assert len(terms) <= n - 1
    rebuilt = np.zeros(n)
    for c, (i, j) in terms:
        assert c > 0
        rebuilt[i] += c
        rebuilt[j] -= c
    npt.assert_allclose(rebuilt, y, atol=1e-12)
    assert math.fsum(c for c, _ in terms) == pytest.approx(np.abs(y).sum() / 2, rel=1e-12)


def test_kind_lists():
    assert set(INSCRIBED).isdisjoint(CIRCUMSCRIBED)
    assert tau_general(5, 2).value > 0
