import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lightlike.minkowski import (
    CausalClass,
    InvalidIsometryError,
    Isometry,
    apply_isometry,
    boost,
    causal_class,
    inner,
    mvec,
    random_isometry,
    rotation,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
vec3 = arrays(np.float64, 3, elements=finite)
scalar = st.floats(-10, 10, allow_nan=False)


@pytest.mark.parametrize(
    "v, w, expected",
    [((1, 1, 0), (1, 1, 0), 0.0), ((1, 0, 0), (1, 0, 0), -1.0), ((0, 1, 2), (3, 4, 5), 14.0)],
)
def test_inner_examples(v, w, expected):
    assert inner(v, w) == expected


def test_inner_broadcasts():
    V = np.array([[1.0, 0, 0], [0, 1, 0]])
    np.testing.assert_array_equal(inner(V, V), [-1.0, 1.0])


def test_mvec_rejects_nonfinite():
    with pytest.raises(ValueError):
        mvec(0.0, np.nan, 1.0)


@given(vec3, vec3, vec3, scalar, scalar)
def test_inner_symmetric_bilinear(u, v, w, a, b):
    scale = 1 + np.abs(u).max() * (np.abs(v).max() + np.abs(w).max()) * (abs(a) + abs(b) + 1)
    assert inner(v, w) == pytest.approx(inner(w, v), abs=1e-12 * scale)
    lhs = inner(u, a * v + b * w)
    assert lhs == pytest.approx(a * inner(u, v) + b * inner(u, w), abs=1e-12 * scale)


@pytest.mark.parametrize(
    "v, cls",
    [((0, 1, 0), CausalClass.SPACELIKE), ((1, 0, 0), CausalClass.TIMELIKE), ((1, 1, 0), CausalClass.NULL), ((0, 0, 0), CausalClass.ZERO)],
)
def test_causal_class_examples(v, cls):
    assert causal_class(v) is cls


def test_identity_and_translation():
    x = np.array([0.3, -1.2, 2.0])
    np.testing.assert_array_equal(apply_isometry(Isometry.identity(), x), x)
    np.testing.assert_array_equal(apply_isometry(Isometry.translation((1, 2, 3)), np.zeros(3)), [1, 2, 3])


def test_boost_preserves_inner(rng):
    A = np.array([[np.cosh(1), np.sinh(1), 0], [np.sinh(1), np.cosh(1), 0], [0, 0, 1]])
    np.testing.assert_allclose(A.T @ np.diag([-1, 1, 1]) @ A, np.diag([-1, 1, 1]), atol=1e-14)
    T = Isometry(A)
    v, w = rng.normal(size=(2, 3))
    assert inner(T.linear(v), T.linear(w)) == pytest.approx(inner(v, w), abs=1e-12)
    np.testing.assert_allclose(boost(1.0), A, atol=0)


def test_invalid_isometry_rejected():
    with pytest.raises(InvalidIsometryError):
        Isometry(np.diag([1.0, 2.0, 1.0]))
    with pytest.raises(InvalidIsometryError):
        Isometry(np.eye(3), np.zeros(2))


def test_isometry_is_immutable():
    T = Isometry(rotation(0.3), np.ones(3))
    with pytest.raises(ValueError):
        T.A[0, 0] = 2.0


def test_compose_matches_sequential_application(rng):
    S, T = random_isometry(rng), random_isometry(rng)
    x = rng.normal(size=(4, 3))
    np.testing.assert_allclose(S.compose(T)(x), S(T(x)), atol=1e-12)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.booleans(), vec3, vec3)
def test_isometry_invariance(seed, proper, v, w):
    T = random_isometry(np.random.default_rng(seed), proper=proper)
    scale = 1 + np.abs(v).max() * np.abs(w).max()
    assert inner(T.linear(v), T.linear(w)) == pytest.approx(inner(v, w), abs=1e-10 * scale)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(0, 1, 0), (1, 0.2, 0.1), (1, 1, 0), (1, 0, -1)]))
def test_causal_class_invariant(seed, v):
    T = random_isometry(np.random.default_rng(seed), proper=False)
    v = np.asarray(v, float)
    Tv = T.linear(v)
    assert causal_class(Tv / np.linalg.norm(Tv)) is causal_class(v / np.linalg.norm(v))
