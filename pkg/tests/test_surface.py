import numpy as np
import pytest

from lightlike.classify import induced_metric
from lightlike.frames import relation_residuals, standard_frame, verify_frame
from lightlike.minkowski import Isometry, boost, inner, random_isometry, rotation
from lightlike.ode import Constant, IntegrationError
from lightlike.surface import (
    ClosedForm,
    closed_form_example,
    frame_field,
    make_cone,
    make_plane,
    parametrize_nonconical,
    reparametrize,
    transform,
)

R2 = np.sqrt(2.0)
GRID41 = np.meshgrid(np.linspace(-1, 1, 41), np.linspace(-1, 1, 41), indexing="ij")


@pytest.mark.parametrize("spec, example", [("const:0", "f0"), ("const:1", "f1"), ("const:-1", "fm1")])
def test_matches_closed_forms(surfaces, spec, example):
    U, V = GRID41
    assert np.max(np.abs(surfaces[spec](U, V) - closed_form_example(example, U, V))) < 1e-7


def test_closed_form_values():
    for name in ("f0", "f1", "fm1"):
        np.testing.assert_allclose(closed_form_example(name, 0.0, 0.0), 0.0, atol=1e-15)
    # first component (11 - 11) / (4 sqrt2), second (21 - 29) / (12 sqrt2), third (9 - 4) / 6
    np.testing.assert_allclose(closed_form_example("f0", 0.0, 1.0), [0.0, -R2 / 3, 5 / 6], atol=1e-15)
    with pytest.raises(ValueError):
        closed_form_example("f2", 0.0, 0.0)


@pytest.mark.parametrize("name", ["f0", "f1", "fm1"])
def test_closed_forms_are_lightlike(name):
    U, V = GRID41
    assert np.max(induced_metric(ClosedForm(name), U[1:-1, 1:-1], V[1:-1, 1:-1]).det_rel) < 1e-6


def test_initial_data(surfaces):
    for S in surfaces.values():
        x = S(0.0, 0.0)
        assert np.all(x == 0.0)
        F = S.frame(0.0, 0.0)
        for a, b in zip((F.e0, F.e1, F.e2), (standard_frame().e0, standard_frame().e1, standard_frame().e2)):
            assert np.max(np.abs(a - b)) < 1e-12
    h = 1e-6
    xu = (surfaces["sin"](h, 0.0) - surfaces["sin"](-h, 0.0)) / (2 * h)
    np.testing.assert_allclose(xu, [1 / R2, 1 / R2, 0.0], atol=1e-9)


def test_frame_field_relations(surfaces):
    U, V = np.meshgrid(np.linspace(-1, 1, 21), np.linspace(-1, 1, 21), indexing="ij")
    for S in surfaces.values():
        F = frame_field(S, U, V)
        assert verify_frame(F, tol=1e-7).passed
        assert np.max(np.abs(inner(F.e0, F.e0))) < 1e-8


def test_frame_is_tangent(surfaces):
    S = surfaces["id"]
    u, v, h = 0.3, -0.4, 1e-5
    F = S.frame(u, v)
    xu = (S(u + h, v) - S(u - h, v)) / (2 * h)
    xv = (S(u, v + h) - S(u, v - h)) / (2 * h)
    np.testing.assert_allclose(xu, F.e0, atol=1e-8)
    # x_v = e^u e1 in these coordinates
    np.testing.assert_allclose(xv, np.exp(u) * F.e1, atol=1e-8)


def test_out_of_domain(surfaces):
    S = surfaces["sin"]
    with pytest.raises(ValueError):
        S.frame(0.0, 1.1)
    with pytest.raises(ValueError):
        S(0.0, 1.3)  # beyond the integrated range
    with pytest.raises(ValueError):
        parametrize_nonconical(Constant(0.0), domain=((0.1, 1), (-1, 1)))


def test_integration_failure_propagates():
    with pytest.raises(IntegrationError):
        parametrize_nonconical(Constant(1e6))


def test_nonconical_ruled(surfaces):
    v0 = 0.37
    u = np.array([-0.9, 0.1, 0.8])
    for S in surfaces.values():
        P = S(u, v0)
        d = P[2] - P[0]
        cross = np.cross(P[1] - P[0], d)
        assert np.linalg.norm(cross) / np.linalg.norm(d) < 1e-9
        assert abs(inner(d, d)) / np.dot(d, d) < 1e-8


def test_plane_and_cone():
    P = make_plane()
    U, V = np.meshgrid(np.linspace(-0.9, 0.9, 5), np.linspace(-0.9, 0.9, 5), indexing="ij")
    np.testing.assert_allclose(induced_metric(P, U, V).g, np.broadcast_to([[0, 0], [0, 1]], (5, 5, 2, 2)), atol=1e-12)
    C = make_cone()
    X = C.sample(np.linspace(-0.5, 0.5, 7), np.linspace(0, 2, 9))
    assert np.max(np.abs(inner(X, X))) < 1e-12
    assert verify_frame(C.frame(U, V)).passed
    assert verify_frame(P.frame(U, V)).passed
    with pytest.raises(ValueError):
        make_plane(null_dir=(1, 0, 0))
    with pytest.raises(ValueError):
        make_plane(spacelike_dir=(0, 1, 0))


def test_reparametrize_identity_and_definition(surfaces):
    S = surfaces["sin"]
    u, v = np.array([0.1, -0.3]), np.array([0.5, 0.2])
    np.testing.assert_array_equal(reparametrize(S, 0.0, 0.0)(u, v), S(u, v))
    r, s = 0.3, 0.1
    np.testing.assert_allclose(reparametrize(S, r, s)(u, v), S(u + r, np.exp(-r) * v + s), atol=0)
    R = reparametrize(S, r, s)
    (ulo, uhi), (vlo, vhi) = R.domain
    assert (ulo, uhi) == pytest.approx((-1.3, 0.7))
    assert (vlo, vhi) == pytest.approx((np.exp(r) * -1.1, np.exp(r) * 0.9))


def test_isometry_covariance(surfaces, rng):
    S = surfaces["id"]
    T = random_isometry(rng, proper=False)
    u, v = rng.uniform(-0.9, 0.9, size=(2, 6))
    np.testing.assert_allclose(transform(S, T)(u, v), T(S(u, v)), atol=1e-12)
    improper = Isometry(rotation(0.4) @ boost(0.3) @ np.diag([1.0, 1.0, -1.0]), (1, 0, 2))
    assert verify_frame(transform(S, improper).frame(u, v), tol=1e-9).passed


def test_mirror_orientation():
    f = Constant(0.5)
    S, M = parametrize_nonconical(f), parametrize_nonconical(f, orientation=-1)
    u, v = np.array([0.2, -0.5]), np.array([0.7, -0.1])
    np.testing.assert_allclose(M(u, v), S(u, v) * [1, 1, -1], atol=0)
    assert verify_frame(M.frame(u, v), tol=1e-9).passed
    with pytest.raises(ValueError):
        parametrize_nonconical(f, orientation=0)


def test_relation_residuals_are_pointwise(surfaces):
    U, V = np.meshgrid(np.linspace(-1, 1, 3), np.linspace(-1, 1, 4), indexing="ij")
    res = relation_residuals(surfaces["const:1"].frame(U, V))
    assert all(r.shape == (3, 4) for r in res.values())
