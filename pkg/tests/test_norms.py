import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doilab.norms import (
    EXACT,
    INF,
    LOWER_BOUND,
    CapacityError,
    ExponentError,
    SearchConfig,
    check_exponent,
    conjugate_exponent,
    dual_map,
    opnorm,
    opnorm_bruteforce,
    opnorm_upper,
    power_iteration_pq,
    vector_norm,
)

FINITE_P = st.floats(min_value=1.0, max_value=10.0, allow_nan=False)


def small_real_matrix(rng, m=3, n=3):
    return rng.standard_normal((m, n))


# ---------------------------------------------------------------- exponents


def test_check_exponent_accepts_range():
    assert check_exponent(1) == 1.0
    assert check_exponent(INF) == INF
    assert check_exponent(2.5) == 2.5


@pytest.mark.parametrize("bad", [0.5, 0.0, -1.0, math.nan])
def test_check_exponent_rejects(bad):
    with pytest.raises(ExponentError):
        check_exponent(bad)


def test_conjugate_exponent_endpoints():
    assert conjugate_exponent(1.0) == INF
    assert conjugate_exponent(INF) == 1.0
    assert conjugate_exponent(2.0) == 2.0
    assert conjugate_exponent(1.5) == pytest.approx(3.0)


@given(p=st.floats(min_value=1.0 + 1e-6, max_value=50.0))
def test_conjugate_exponent_holder_identity(p):
    ps = conjugate_exponent(p)
    assert 1.0 / p + 1.0 / ps == pytest.approx(1.0, abs=1e-12)


# ------------------------------------------------------------- vector norms


def test_vector_norm_examples():
    assert vector_norm([3, 4], 2) == pytest.approx(5.0)
    assert vector_norm([1, 1, 1], 1) == pytest.approx(3.0)
    assert vector_norm([1, -2j, 2], INF) == pytest.approx(2.0)


def test_vector_norm_empty_rejected():
    with pytest.raises(ValueError):
        vector_norm([], 2)


def test_vector_norm_large_exponent_no_overflow():
    x = np.array([1e200, 2e200])
    assert vector_norm(x, 100.0) == pytest.approx(2e200, rel=1e-6)


@given(
    x=st.lists(st.floats(min_value=-10, max_value=10), min_size=1, max_size=6),
    p=FINITE_P,
)
def test_vector_norm_monotone_in_p(x, p):
    # ||x||_q <= ||x||_p for q >= p on finite vectors
    assert vector_norm(x, p + 1.0) <= vector_norm(x, p) + 1e-9


# -------------------------------------------------------------- exact opnorm


def test_opnorm_identity_2_2():
    est = opnorm(np.eye(2), 2, 2)
    assert est.value == pytest.approx(1.0)
    assert est.certainty == EXACT


def test_opnorm_hadamard_2_2():
    est = opnorm([[1, 1], [1, -1]], 2, 2)
    assert est.value == pytest.approx(math.sqrt(2.0))
    assert est.certainty == EXACT


def test_opnorm_ones_inf_1_matches_sign_oracle():
    S = [[1, 1], [1, 1]]
    est = opnorm(S, INF, 1)
    oracle = opnorm_bruteforce(S, INF, 1)
    assert oracle.value == pytest.approx(4.0)
    assert oracle.certainty == EXACT
    assert est.certainty == LOWER_BOUND
    assert est.value == pytest.approx(4.0, rel=1e-8)


def test_opnorm_diag_1_4():
    est = opnorm([[2, 0], [0, 3]], 1, 4)
    assert est.value == pytest.approx(3.0)
    assert est.certainty == EXACT


def test_opnorm_rejects_empty_and_nonfinite():
    with pytest.raises(ValueError):
        opnorm(np.zeros((0, 0)), 2, 2)
    with pytest.raises(ValueError):
        opnorm([[math.inf]], 2, 2)


# ----------------------------------------------------------- power iteration


def test_power_iteration_identity():
    val, w, label = power_iteration_pq(np.eye(2), 2, 2, [1.0, 1.0])
    assert val == pytest.approx(1.0)


def test_power_iteration_diagonal_p3():
    val, w, _ = power_iteration_pq(np.diag([1.0, 5.0]), 3, 3, [1.0, 1.0])
    assert val == pytest.approx(5.0, rel=1e-6)
    w = np.abs(w)
    # the objective converges much faster than the witness coordinates
    assert w[1] == pytest.approx(1.0, abs=1e-3)
    assert w[0] == pytest.approx(0.0, abs=1e-3)


def test_power_iteration_hadamard_matches_svd():
    val, _, _ = power_iteration_pq([[1, 1], [1, -1]], 2, 2, [1.0, 0.0])
    assert val == pytest.approx(math.sqrt(2.0), abs=1e-8)


def test_power_iteration_zero_matrix():
    val, w, label = power_iteration_pq(np.zeros((2, 2)), 2, 2, [1.0, 0.0])
    assert val == 0.0
    assert "zero_matrix" in label


def test_power_iteration_rejects_unsupported_exponents():
    with pytest.raises(ExponentError):
        power_iteration_pq(np.eye(2), 1, 2, [1.0, 0.0])
    with pytest.raises(ExponentError):
        power_iteration_pq(np.eye(2), 2, INF, [1.0, 0.0])


@settings(deadline=None, max_examples=40)
@given(
    seed=st.integers(min_value=0, max_value=10_000),
    p=st.sampled_from([1.5, 2.0, 3.0, INF]),
    q=st.sampled_from([1.0, 1.5, 2.0, 4.0]),
)
def test_power_iteration_objective_nondecreasing(seed, p, q):
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((3, 3))
    x = np.array([1.0, 1.0, 1.0], dtype=complex)
    x /= vector_norm(x, p)
    pstar = conjugate_exponent(p)
    prev = vector_norm(S @ x, q)
    for _ in range(25):
        z = S.T @ dual_map(S @ x, q)
        xn = dual_map(z, pstar)
        nn = vector_norm(xn, p)
        if nn == 0.0:
            break
        x = xn / nn
        cur = vector_norm(S @ x, q)
        assert cur >= prev - 1e-12 * max(1.0, prev)
        prev = cur


# ------------------------------------------------------------- brute force


def test_bruteforce_sign_enumeration_exact():
    est = opnorm_bruteforce([[1, 1], [1, 1]], INF, 1)
    assert est.value == pytest.approx(4.0)
    assert est.certainty == EXACT


def test_bruteforce_identity_inf_inf():
    est = opnorm_bruteforce(np.eye(3), INF, INF)
    assert est.value == pytest.approx(1.0)


def test_bruteforce_grid_approaches_svd():
    est = opnorm_bruteforce([[1, 1], [1, -1]], 2, 2, resolution=720)
    assert est.value >= math.sqrt(2.0) - 1e-4
    assert est.value <= math.sqrt(2.0) + 1e-9
    assert est.certainty == LOWER_BOUND


def test_bruteforce_capacity_errors():
    with pytest.raises(CapacityError):
        opnorm_bruteforce(np.eye(5), 2, 2)
    with pytest.raises(CapacityError):
        opnorm_bruteforce(np.eye(21), INF, 1)
    with pytest.raises(ValueError):
        opnorm_bruteforce(np.eye(2) * 1j, INF, 1)


# --------------------------------------------------------------- invariants


@settings(deadline=None, max_examples=25)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_exact_branches_dominate_grid(seed):
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((3, 3))
    for p, q in [(1.0, 2.0), (2.0, 2.0), (2.0, INF)]:
        exact = opnorm(S, p, q)
        assert exact.certainty == EXACT
        if p != INF:
            grid = opnorm_bruteforce(S, p, q, resolution=40)
            assert exact.value >= grid.value - 1e-9


@settings(deadline=None, max_examples=20)
@given(
    seed=st.integers(min_value=0, max_value=10_000),
    c=st.floats(min_value=0.1, max_value=10.0),
)
def test_scaling_invariance(seed, c):
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((3, 3))
    cfg = SearchConfig(multistarts=6, seed=7)
    a = opnorm(S, 3, 2, cfg).value
    b = opnorm(c * S, 3, 2, cfg).value
    assert b == pytest.approx(c * a, rel=1e-8)


@settings(deadline=None, max_examples=25)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_monotonicity_in_q_on_exact_branch(seed):
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((4, 4))
    vals = [opnorm(S, 1, q).value for q in (1.0, 2.0, 4.0, INF)]
    for lo, hi in zip(vals, vals[1:]):
        assert lo >= hi - 1e-12


@settings(deadline=None, max_examples=25)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_witness_achieves_reported_value(seed):
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    for p, q in [(1.0, 3.0), (2.0, INF), (2.0, 2.0), (3.0, 1.5)]:
        est = opnorm(S, p, q, SearchConfig(multistarts=6))
        assert est.reevaluate(S, p, q) == pytest.approx(est.value, rel=1e-9, abs=1e-12)


@settings(deadline=None, max_examples=25)
@given(
    seed=st.integers(min_value=0, max_value=10_000),
    p=st.sampled_from([1.0, 1.5, 2.0, 3.0, INF]),
)
def test_upper_bound_dominates_lower_bound(seed, p):
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((4, 4))
    lower = opnorm(S, p, p, SearchConfig(multistarts=6)).value
    upper = opnorm_upper(S, p)
    assert upper >= lower - 1e-9 * max(1.0, lower)


def test_upper_bound_exact_at_anchors():
    rng = np.random.default_rng(3)
    S = rng.standard_normal((4, 4))
    assert opnorm_upper(S, 1) == pytest.approx(opnorm(S, 1, 1).value)
    assert opnorm_upper(S, 2) == pytest.approx(opnorm(S, 2, 2).value)
    a = np.abs(S)
    assert opnorm_upper(S, INF) == pytest.approx(a.sum(axis=1).max())
