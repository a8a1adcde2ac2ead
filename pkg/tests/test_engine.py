import numpy as np
import pytest

from pfcm import (Centroids, DataSet, DegenerateError, Parameters, fuzzy_memberships,
                  objective_value, possibilistic_memberships, run_pfcm, squared_distances,
                  typicality_scales, update_centroids)
from pfcm.engine import initial_centroids


# ---------------------------------------------------------------- Step II

def test_fuzzy_equidistant_is_uniform():
    np.testing.assert_allclose(fuzzy_memberships([[4.0], [4.0]], 2.0)[:, 0], [0.5, 0.5])


def test_fuzzy_hand_value():
    # 1 / (1 + 1/4) and 1 / (1 + 4)
    np.testing.assert_allclose(fuzzy_memberships([[1.0], [4.0]], 2.0)[:, 0], [0.8, 0.2],
                               rtol=0, atol=1e-15)


def test_fuzzy_zero_distance_convention():
    u = fuzzy_memberships([[0.0, 3.0, 0.0], [9.0, 0.0, 0.0]], 2.0)
    np.testing.assert_array_equal(u, [[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])


def test_fuzzy_columns_stochastic(kernels):
    rng = np.random.default_rng(0)
    d2 = rng.exponential(size=(4, 200))
    d2[1, :5] = 0.0
    for m in (1.1, 2.0, 3.5):
        u = kernels["fuzzy_memberships"](d2, m)
        np.testing.assert_allclose(u.sum(axis=0), 1.0, rtol=0, atol=1e-12)
        assert u.min() >= 0.0 and u.max() <= 1.0


def test_fuzzy_minimises_first_term_against_random_memberships():
    """Brute force: no random column-stochastic U beats the closed form at fixed V."""
    rng = np.random.default_rng(42)
    x = rng.normal(size=(5, 2))
    v = np.array([[-0.5, 0.0], [0.7, 0.3]])
    alpha, m = 1.0, 2.0
    d2 = squared_distances(x, v)
    best = (alpha * fuzzy_memberships(d2, m) ** m * d2).sum()
    for _ in range(1000):
        u = rng.dirichlet(np.ones(2), size=5).T
        assert best <= (alpha * u ** m * d2).sum() + 1e-12


# ---------------------------------------------------------------- Step III

def test_typicality_hand_value():
    # (1*2 + 1*4) / (1 + 1)
    assert typicality_scales([[1.0, 1.0]], [[2.0, 4.0]], 2.0)[0] == pytest.approx(3.0)


def test_typicality_floor():
    assert typicality_scales([[1.0, 1.0]], [[0.0, 0.0]], 2.0)[0] == 1e-10


def test_typicality_homogeneous():
    u = np.array([[0.3, 0.9, 0.5]])
    d2 = np.array([[1.0, 2.0, 5.0]])
    np.testing.assert_allclose(typicality_scales(u, 10 * d2, 2.0),
                               10 * typicality_scales(u, d2, 2.0), rtol=1e-14)


# ----------------------------------------------------------------- Step IV

def test_possibilistic_values():
    t = possibilistic_memberships([[0.0, 1.0]], [1.0], 1.0, 2.0)
    assert t[0, 0] == 1.0
    assert t[0, 1] == pytest.approx(0.5)
    np.testing.assert_array_equal(possibilistic_memberships([[3.0, 8.0]], [0.5], 0.0, 2.0), 1.0)


@pytest.mark.parametrize("beta,delta,d2,tau", [
    (1.0, 1.0, 1.0, 2.0), (0.5, 2.0, 3.0, 1.5), (2.0, 0.7, 0.4, 3.0), (1.0, 5.0, 10.0, 2.5)])
def test_possibilistic_is_stationary(beta, delta, d2, tau):
    """Central differences of beta*t^tau*d2 + delta*(1-t)^tau vanish at the update."""
    t = possibilistic_memberships([[d2]], [delta], beta, tau)[0, 0]

    def f(x):
        return beta * x ** tau * d2 + delta * (1 - x) ** tau

    h = 1e-6
    assert abs((f(t + h) - f(t - h)) / (2 * h)) < 1e-4


# ------------------------------------------------------------------ Step V

def test_centroids_uniform_weights_give_mean():
    x = np.array([[0.0, 1.0], [2.0, 5.0], [4.0, 0.0]])
    u = np.full((1, 3), 1.0)
    t = np.full((1, 3), 0.5)
    v = update_centroids(DataSet.complete(x), u, t, Parameters())
    np.testing.assert_allclose(v.v[0], x.mean(axis=0), rtol=1e-15)


def test_single_cluster_fcm_reduction_is_mean():
    x = np.array([[1.0], [2.0], [6.0]])
    v = update_centroids(DataSet.complete(x), np.ones((1, 3)), np.ones((1, 3)),
                         Parameters(beta=0.0))
    assert v.v[0, 0] == pytest.approx(3.0)


def test_centroid_weighted_mean_hand_value(kernels):
    # (0.9*0 + 0.1*10) / (0.9 + 0.1)
    v = kernels["weighted_means"](np.array([[0.9, 0.1]]), np.array([[0.0], [10.0]]))
    assert v[0, 0] == pytest.approx(1.0, abs=1e-15)


def test_centroid_weight_forms():
    u, t = np.array([[0.5]]), np.array([[0.5]])
    from pfcm.engine import centroid_weights
    lit = centroid_weights(u, t, Parameters(alpha=2.0, beta=3.0))
    cla = centroid_weights(u, t, Parameters(alpha=2.0, beta=3.0, weight_form="classic"))
    assert lit[0, 0] == pytest.approx((2 * 0.5) ** 2 + (3 * 0.5) ** 2)
    assert cla[0, 0] == pytest.approx(2 * 0.25 + 3 * 0.25)


def test_centroid_zero_weight_row_is_degenerate():
    with pytest.raises(DegenerateError):
        update_centroids(DataSet.complete([[0.0], [1.0]]), np.zeros((1, 2)), np.zeros((1, 2)),
                         Parameters())


# --------------------------------------------------------------- objective

def test_objective_zero_when_points_on_centroids():
    x = np.array([[2.0, -1.0], [2.0, -1.0]])
    u = np.array([[1.0, 0.0], [0.0, 1.0]])
    j = objective_value(DataSet.complete(x), u, np.ones((2, 2)), [1.0, 1.0],
                        Centroids(x), Parameters())
    assert j == 0.0


def test_objective_hand_value():
    # (1*1 + 1*0.25)*1 + 1*0.25
    j = objective_value(np.array([[1.0]]), [[1.0]], [[0.5]], [1.0], [[0.0]],
                        Parameters(c=2))
    assert j == pytest.approx(1.5)


def test_objective_linear_in_alpha():
    x = np.array([[0.0], [3.0]])
    u, t, delta, v = [[0.6, 0.2]], [[0.4, 0.3]], [2.0], [[1.0]]
    base = objective_value(x, u, t, delta, v, Parameters(alpha=1.0))
    doubled = objective_value(x, u, t, delta, v, Parameters(alpha=2.0))
    fuzzy = (np.array(u) ** 2 * np.array([[1.0, 4.0]])).sum()
    assert doubled - base == pytest.approx(fuzzy)


# ------------------------------------------------------------------- loop

def _fcm_reference(x, v, m, eps, max_iter):
    """Plain fuzzy c-means, written independently of the package kernels."""
    for it in range(1, max_iter + 1):
        d2 = ((x[None, :, :] - v[:, None, :]) ** 2).sum(axis=2)
        u = np.empty_like(d2)
        for k in range(d2.shape[1]):
            col = d2[:, k]
            zero = np.flatnonzero(col < 1e-12)
            if zero.size:
                u[:, k] = 0.0
                u[zero[0], k] = 1.0
            else:
                u[:, k] = [1.0 / sum((col[i] / col[j]) ** (1.0 / (m - 1.0))
                                     for j in range(len(col))) for i in range(len(col))]
        um = u ** m
        v_new = um @ x / um.sum(axis=1, keepdims=True)
        done = np.linalg.norm(v_new - v) < eps
        v = v_new
        if done:
            break
    return v, it


@pytest.mark.parametrize("alpha", [1.0, 3.0])
def test_beta_zero_reduces_to_fcm(iris, alpha):
    p = Parameters(beta=0.0, alpha=alpha)
    for seed in range(3):
        res = run_pfcm(iris, p, seed)
        np.testing.assert_array_equal(res.partition.t, 1.0)
        v_ref, it_ref = _fcm_reference(iris.values, initial_centroids(iris.values, 2, seed),
                                       2.0, p.epsilon, p.max_iter)
        np.testing.assert_allclose(res.centroids.v, v_ref, rtol=0, atol=1e-9)
        assert res.iterations == it_ref


def test_two_separated_groups_recover_means():
    cross = np.array([[0.1, 0.0], [-0.1, 0.0], [0.0, 0.1], [0.0, -0.1]])
    a, b = np.array([0.0, 0.0]), np.array([100.0, 100.0])
    data = DataSet.complete(np.vstack([a + cross, b + cross]))
    res = run_pfcm(data, Parameters(epsilon=1e-9), seed=3)
    got = res.centroids.v[np.argsort(res.centroids.v[:, 0])]
    np.testing.assert_allclose(got, [a, b], rtol=0, atol=1e-6)


def test_run_is_deterministic(iris):
    assert run_pfcm(iris, Parameters(c=3), 11) == run_pfcm(iris, Parameters(c=3), 11)


def test_run_result_invariants(iris):
    p = Parameters(c=3, max_iter=200)
    res = run_pfcm(iris, p, 5)
    part = res.partition
    np.testing.assert_allclose(part.u.sum(axis=0), 1.0, rtol=0, atol=1e-12)
    assert part.t.min() > 0 and part.t.max() <= 1
    assert np.all(part.delta > 0)
    lo, hi = iris.values.min(axis=0), iris.values.max(axis=0)
    assert np.all(res.centroids.v >= lo) and np.all(res.centroids.v <= hi)
    assert res.iterations <= p.max_iter
    assert len(res.objective_trace) == res.iterations
    assert res.imputed.is_complete


def test_iteration_cap_flags_non_convergence(iris):
    res = run_pfcm(iris, Parameters(max_iter=2, epsilon=1e-12), 0)
    assert res.iterations == 2 and not res.converged


def test_initial_centroids_are_distinct_points(iris):
    v = initial_centroids(iris.values, 5, 9)
    assert len({tuple(r) for r in v}) == 5
    assert all(any(np.array_equal(r, x) for x in iris.values) for r in v)


def test_run_pfcm_rejects_incomplete():
    from pfcm import ContractViolation
    d = DataSet([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]],
                [[True, False], [True, True], [True, True]])
    with pytest.raises(ContractViolation):
        run_pfcm(d, Parameters(), 0)
