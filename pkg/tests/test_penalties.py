import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from costreg.errors import ConfigError, DimensionMismatch
from costreg.penalties import (PenaltySpec, elastic_net, eval_penalty, l0, l1,
                               l2, prox_penalty, weighted_l2)

vectors = arrays(float, st.integers(1, 8), elements=st.floats(-50, 50))
SPECS = [l0(), l1(), l2(), elastic_net(0.3)]


def test_eval_examples():
    assert eval_penalty(l1(), [1, -2, 3]) == 6
    assert eval_penalty(l2(), [1, -2, 3]) == 14
    assert eval_penalty(l0(), [0, 0.5, -3]) == 2
    assert eval_penalty(elastic_net(0.5), [1, -2]) == 4
    assert eval_penalty(weighted_l2([1, 2]), [1, -2]) == 9


def test_config_names():
    assert PenaltySpec("elastic_net", mix=0.2).kind.value == "elastic_net"
    with pytest.raises(ConfigError):
        PenaltySpec("scad")
    with pytest.raises(ConfigError):
        PenaltySpec("l1", mix=0.5)
    with pytest.raises(ConfigError):
        PenaltySpec("elastic_net")
    with pytest.raises(ConfigError):
        PenaltySpec("weighted_l2", weights=(1.0, 0.0))


def test_weights_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        eval_penalty(weighted_l2([1, 2]), [1, 2, 3])
    with pytest.raises(DimensionMismatch):
        prox_penalty(weighted_l2([1, 2]), [1, 2, 3], 1.0)


def test_prox_examples():
    assert prox_penalty(l1(), [3.0], 1.0)[0] == 2.0
    assert prox_penalty(l1(), [-0.5], 1.0)[0] == 0.0
    assert prox_penalty(l2(), [4.0], 1.0)[0] == pytest.approx(4 / 3, abs=1e-15)
    np.testing.assert_array_equal(prox_penalty(l0(), [3.0, 1.0], 2.0), [3.0, 0.0])
    # tie at sqrt(2 theta) keeps the coordinate
    np.testing.assert_array_equal(prox_penalty(l0(), [2.0, -2.0], 2.0), [2.0, -2.0])


def test_prox_rejects_non_positive_theta():
    with pytest.raises(ValueError):
        prox_penalty(l1(), [1.0], 0.0)


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind.value)
@given(w=vectors)
def test_nonnegative_and_zero_at_origin(spec, w):
    assert eval_penalty(spec, w) >= 0
    assert eval_penalty(spec, np.zeros_like(w)) == 0


@given(w=vectors, c=st.floats(-10, 10))
def test_homogeneity(w, c):
    assert eval_penalty(l1(), c * w) == pytest.approx(abs(c) * eval_penalty(l1(), w), rel=1e-12, abs=1e-12)
    assert eval_penalty(l2(), c * w) == pytest.approx(c * c * eval_penalty(l2(), w), rel=1e-12, abs=1e-12)


@given(w=vectors)
def test_elastic_net_endpoints(w):
    assert eval_penalty(elastic_net(1.0), w) == eval_penalty(l1(), w)
    assert eval_penalty(elastic_net(0.0), w) == eval_penalty(l2(), w)


@pytest.mark.parametrize("spec", SPECS + [weighted_l2([0.5, 2.0, 1.0])], ids=lambda s: s.kind.value)
def test_prox_optimality_against_perturbations(spec, rng):
    for _ in range(20):
        v = rng.normal(scale=3, size=3)
        theta = rng.uniform(0.05, 3)
        w = prox_penalty(spec, v, theta)
        best = 0.5 * np.sum((v - w) ** 2) + theta * eval_penalty(spec, w)
        trials = w + rng.normal(scale=rng.uniform(0.01, 3), size=(1000, 3))
        # include exact zeros per coordinate, where L0 and L1 have their kinks
        trials[::7, rng.integers(3)] = 0.0
        for t in trials:
            assert best <= 0.5 * np.sum((v - t) ** 2) + theta * eval_penalty(spec, t) + 1e-12


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind.value)
def test_prox_matches_scalar_enumeration(spec, rng):
    # separable penalty: each coordinate is a 1-D problem, enumerate densely
    grid = np.linspace(-10, 10, 200001)
    for _ in range(5):
        v, theta = rng.normal(scale=3), rng.uniform(0.1, 2)
        vals = 0.5 * (v - grid) ** 2 + theta * _vec_penalty(spec, grid)
        w = prox_penalty(spec, [v], theta)[0]
        obj = 0.5 * (v - w) ** 2 + theta * eval_penalty(spec, [w])
        assert obj <= vals.min() + 1e-9
        assert abs(w - grid[np.argmin(vals)]) <= 1e-4 + 1e-9


def _vec_penalty(spec, g):
    kind = spec.kind.value
    if kind == "l0":
        return (g != 0).astype(float)
    if kind == "l1":
        return np.abs(g)
    if kind == "l2":
        return g ** 2
    return spec.mix * np.abs(g) + (1 - spec.mix) * g ** 2
