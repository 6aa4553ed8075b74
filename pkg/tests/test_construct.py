import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvadapt.construct import (
    ConstructedHypersurface,
    ProfileCurve,
    admissible_radius,
    as_hypersurface,
    curve_diagnostics,
    flat_section,
    focal_radius,
    focal_table,
    make_curve,
    product_angle,
    strongly_jacobi_field,
    tube_map,
    unit_normal,
    validate_curve,
)
from curvadapt.errors import CurveValidationError, FocalPointError
from curvadapt.hypersurface import Equator, GeodesicSphere, Horosphere
from curvadapt.matfun import commutator_residual
from curvadapt.oracle import fd_shape_operator
from curvadapt.spaceform import ProductSpace, SpaceForm

S2, H2, E2 = SpaceForm.sphere(2), SpaceForm.hyperbolic(2), SpaceForm.euclidean(2)
SPH = GeodesicSphere(S2, 0.5)
HYP = GeodesicSphere(H2, 0.5)


def rows_by_name(C, p1, p2, theta):
    return {r.name: r for r in C.eigen_rows(p1, p2, theta)}


# -- curves ---------------------------------------------------------------


def test_circle_diagnostics():
    c = make_curve("circle", radius=0.1)
    d = curve_diagnostics(c)
    assert d.winding == 1
    assert d.min_speed == pytest.approx(0.1, rel=1e-12)
    np.testing.assert_allclose(np.hypot(*c.du(np.linspace(0, 6, 50))), 0.1, rtol=1e-12)


def test_ellipse_diagnostics():
    d = curve_diagnostics(make_curve("ellipse", a=0.1, b=0.05))
    assert d.winding == 1
    assert d.min_speed == pytest.approx(0.05, rel=1e-12)


def test_fourier_derivatives():
    c = make_curve("fourier", u1=[(1, 0.1, 0.0), (2, 0.01, 0.02)], u2=[(0, 0.01, 0.0), (1, 0.0, 0.1)])
    th, h = 0.7, 1e-5
    np.testing.assert_allclose(c.du(th), (c.u(th + h) - c.u(th - h)) / (2 * h), atol=1e-10)
    np.testing.assert_allclose(c.ddu(th), (c.du(th + h) - c.du(th - h)) / (2 * h), atol=1e-9)
    assert validate_curve(c).winding == 1


@pytest.mark.parametrize(
    "curve, msg",
    [
        (ProfileCurve("fourier", {}, ((1, 0.1, 0.0), (1.5, 0.0, 0.01)), ((1, 0.0, 0.1),)), "not closed"),
        (make_curve("fourier", u1=[(0, 0.1, 0.0)], u2=[(0, 0.1, 0.0)]), "not regular"),
        (make_curve("fourier", u1=[(0, 0.1, 0.0), (1, 0.1, 0.0)], u2=[(1, 0.0, 0.1)]), "origin"),
        (make_curve("fourier", u1=[(0, 0.5, 0.0), (1, 0.1, 0.0)], u2=[(1, 0.0, 0.1)]), "winding = 0"),
        (make_curve("circle", radius=0.1).reversed(), "winding = -1"),
        (make_curve("fourier", u1=[(2, 0.1, 0.0)], u2=[(2, 0.0, 0.1)]), "winding = 2"),
    ],
    ids=["seam", "constant", "origin", "outside", "clockwise", "double"],
)
def test_validate_rejects(curve, msg):
    with pytest.raises(CurveValidationError, match=msg):
        validate_curve(curve)


def test_unknown_curve():
    with pytest.raises(ValueError, match="unknown curve"):
        make_curve("spiral")
    with pytest.raises(ValueError, match="integer"):
        make_curve("fourier", u1=[(0.5, 1.0, 0.0)], u2=[])


# -- focal radii and admissibility -------------------------------------------


@pytest.mark.parametrize(
    "lam, mu, expected",
    [(1 / math.tan(0.5), 1.0, 0.5), (1 / math.tanh(0.5), -1.0, 0.5), (1.0, -1.0, math.inf)],
)
def test_focal_radius(lam, mu, expected):
    assert focal_radius(lam, mu) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize(
    "m1, m2, expected",
    [
        (SPH, HYP, 0.45),
        (Horosphere(H2), Horosphere(H2), math.inf),
        (Equator(S2), Equator(S2), 0.9 * math.pi / 2),
        (GeodesicSphere(E2, 2.0), SPH, 0.45),
    ],
    ids=["spheres", "horospheres", "equators", "euclidean"],
)
def test_admissible_radius(m1, m2, expected):
    assert admissible_radius(m1, m2) == pytest.approx(expected, rel=1e-12)


def test_focal_table_deterministic():
    a = focal_table(SPH, HYP, budget=4)
    assert len(a) == 8
    assert [r.factor for r in a] == [1] * 4 + [2] * 4
    assert a == focal_table(SPH, HYP, budget=4)


def test_focal_guard():
    assert validate_curve(make_curve("circle", radius=0.44), SPH, SPH).admissible == pytest.approx(0.45)
    with pytest.raises(CurveValidationError, match=r"focal bound 0\.5\b"):
        validate_curve(make_curve("circle", radius=0.6), SPH, SPH)


def test_focal_point_error():
    C = ConstructedHypersurface(SPH, SPH, make_curve("circle", radius=0.5), validate=False)
    with pytest.raises(FocalPointError, match="factor 1"):
        C.eigen_rows(SPH.base_param(), SPH.base_param(), 0.0)


# -- tube map and normal -----------------------------------------------------


def test_tube_map_distances(mixed_scene, rng):
    C = mixed_scene
    X1, X2 = C.ambient.factors
    for _ in range(10):
        p1, p2, th = C.sample_param(rng)
        y1, y2 = C.ambient.split(tube_map(C, p1, p2, th))
        u = C.curve.u(th)
        assert X1.distance(C.m1.embed(p1), y1) == pytest.approx(abs(u[0]), abs=1e-12)
        assert X2.distance(C.m2.embed(p2), y2) == pytest.approx(abs(u[1]), abs=1e-12)


def test_tube_map_zero_component(spheres_scene):
    C = spheres_scene
    p1, p2, _ = C.base_param()
    y1, y2 = C.ambient.split(C.tube_map(p1, p2, math.pi / 2))
    np.testing.assert_allclose(y1, C.m1.embed(p1), atol=1e-16)
    assert S2.distance(C.m2.embed(p2), y2) == pytest.approx(0.1, abs=1e-12)


def test_tube_map_membership(mixed_scene, rng):
    C = mixed_scene
    for _ in range(100):
        assert C.ambient.membership_residual(C.embed(C.sample_param(rng))) <= 1e-10


def test_unit_normal_circle(spheres_scene):
    p1, p2, _ = spheres_scene.base_param()
    n, rho = unit_normal(spheres_scene, p1, p2, 0.0)
    assert rho == pytest.approx((-1.0, 0.0), abs=1e-15)


@pytest.mark.parametrize("scene", ["spheres_scene", "mixed_scene", "horo_scene"])
def test_normal_orthonormal_to_differential(scene, request, rng):
    C = request.getfixturevalue(scene)
    X = C.ambient
    for _ in range(10):
        p1, p2, th = C.sample_param(rng)
        n, _ = C.unit_normal(p1, p2, th)
        D = C.tube_differential(p1, p2, th)
        assert X.inner(n, n) == pytest.approx(1.0, abs=1e-12)
        assert np.abs(X.gram(D, n[:, None])).max() <= 1e-10
        G = X.gram(D)
        np.testing.assert_allclose(G - np.diag(np.diag(G)), 0.0, atol=1e-10)


def test_scale_factor(spheres_scene):
    p1, p2, _ = spheres_scene.base_param()
    rows = rows_by_name(spheres_scene, p1, p2, 0.0)
    expected = math.sin(0.4) / math.sin(0.5)
    assert expected == pytest.approx(math.cos(0.1) - math.sin(0.1) / math.tan(0.5), rel=1e-15)
    assert expected == pytest.approx(0.8122603, abs=1e-7)
    assert spheres_scene.ambient.norm(rows["E1_0"].vectors[:, 0]) == pytest.approx(expected, rel=1e-12)


def test_zero_offset_images_are_seed_frames(spheres_scene, rng):
    C = spheres_scene
    p1, p2 = C.m1.sample_param(rng), C.m2.sample_param(rng)
    rows = rows_by_name(C, p1, p2, math.pi / 2)  # u1 = 0
    img = C.ambient.split(rows["E1_0"].vectors[:, 0])[0]
    d = C.m1.point_data(p1)
    np.testing.assert_allclose(img, d.frame @ d.spectra.pairs[0].basis[:, 0], atol=1e-15)


def test_theta_vector_norm(mixed_scene, rng):
    C = make_ellipse_scene()
    for th in rng.uniform(0, 2 * math.pi, 5):
        v = rows_by_name(C, *C.base_param()[:2], th)["theta"].vectors[:, 0]
        assert C.ambient.norm(v) == pytest.approx(math.hypot(*C.curve.du(th)), abs=1e-12)


def make_ellipse_scene():
    return ConstructedHypersurface(SPH, HYP, make_curve("ellipse", a=0.1, b=0.05))


# -- product angle -----------------------------------------------------------


@pytest.mark.parametrize("th", np.linspace(0, 2 * math.pi, 9))
def test_product_angle_circle(spheres_scene, th):
    assert product_angle(spheres_scene, th) == pytest.approx(math.cos(2 * th), abs=1e-12)


def test_product_angle_special_values(spheres_scene):
    assert product_angle(spheres_scene, math.pi / 4) == pytest.approx(0.0, abs=1e-15)
    assert product_angle(spheres_scene, 0.0) == 1.0  # u1' = 0


@given(
    st.lists(st.tuples(st.integers(2, 4), st.floats(-0.02, 0.02), st.floats(-0.02, 0.02)), max_size=3),
    st.floats(0, 2 * math.pi),
)
@settings(max_examples=50, deadline=None)
def test_product_angle_bounded_and_two_paths(extra, th):
    curve = make_curve("fourier", u1=[(1, 0.1, 0.0), *extra], u2=[(1, 0.0, 0.1)])
    C = ConstructedHypersurface(SPH, HYP, curve, validate=False)
    if math.hypot(*curve.du(th)) < 1e-3:
        return
    c = C.product_angle(th)
    assert abs(c) <= 1.0
    assert C.product_angle_via_structure(*C.base_param()[:2], th) == pytest.approx(c, abs=1e-10)


# -- eigen rows -----------------------------------------------------------------


def test_eigen_rows_spherical_theta0(spheres_scene):
    p1, p2, _ = spheres_scene.base_param()
    rows = rows_by_name(spheres_scene, p1, p2, 0.0)
    assert list(rows) == ["E1_0", "E2_0", "theta"]
    assert rows["E1_0"].shape == pytest.approx(-1 / math.tan(0.4), abs=1e-12)
    assert rows["E1_0"].shape == pytest.approx(-2.3652224, abs=1e-7)
    assert rows["E2_0"].shape == 0.0
    assert rows["theta"].shape == pytest.approx(10.0, rel=1e-12)
    assert rows["E1_0"].jacobi == pytest.approx(1.0, abs=1e-15)
    assert rows["E2_0"].jacobi == 0.0
    assert rows["theta"].jacobi == 0.0


def test_eigen_rows_hyperbolic_half_pi(mixed_scene):
    p1, p2, _ = mixed_scene.base_param()
    rows = rows_by_name(mixed_scene, p1, p2, math.pi / 2)
    assert rows["E2_0"].shape == pytest.approx(-1 / math.tanh(0.4), abs=1e-12)
    assert rows["E2_0"].shape == pytest.approx(-2.6319324, abs=1e-7)


def test_equal_split_of_mu(mixed_scene):
    # theta = 3 pi / 4 on a circle: u1' = u2'
    p1, p2, _ = mixed_scene.base_param()
    rows = rows_by_name(mixed_scene, p1, p2, 3 * math.pi / 4)
    assert rows["E1_0"].jacobi == pytest.approx(0.5, abs=1e-15)
    assert rows["E2_0"].jacobi == pytest.approx(-0.5, abs=1e-15)


def test_spectrum_lists(spheres_scene):
    p1, p2, _ = spheres_scene.base_param()
    shape = spheres_scene.shape_spectrum(p1, p2, 0.0)
    jac = spheres_scene.normal_jacobi_spectrum(p1, p2, 0.0)
    assert [r.label for r in shape] == ["E1_0", "E2_0", "theta"]
    assert [r.value for r in jac] == pytest.approx([1.0, 0.0, 0.0])
    assert sum(r.multiplicity for r in shape) == spheres_scene.dim


def test_multiplicities_in_higher_dimension():
    C = ConstructedHypersurface(Horosphere(SpaceForm.hyperbolic(4)), GeodesicSphere(SpaceForm.sphere(3), 0.5),
                                make_curve("circle", radius=0.2))
    rows = C.eigen_rows(*C.base_param())
    assert [(r.label, r.multiplicity) for r in rows] == [("E1", 3), ("E2", 2), ("theta", 1)]
    assert C.dim == 6 and C.point_data(C.base_param()).shape.shape == (6, 6)


def test_reversed_orientation(mixed_scene, rng):
    C = mixed_scene
    R = ConstructedHypersurface(C.m1, C.m2, C.curve.reversed(), validate=False)
    for _ in range(5):
        p1, p2, th = C.sample_param(rng)
        a, b = C.eigen_rows(p1, p2, th), R.eigen_rows(p1, p2, 2 * math.pi - th)
        np.testing.assert_allclose(C.tube_map(p1, p2, th), R.tube_map(p1, p2, 2 * math.pi - th), atol=1e-15)
        np.testing.assert_allclose(C.normal((p1, p2, th)), -R.normal((p1, p2, 2 * math.pi - th)), atol=1e-15)
        np.testing.assert_allclose([r.shape for r in a], [-r.shape for r in b], atol=1e-12)
        np.testing.assert_allclose([r.jacobi for r in a], [r.jacobi for r in b], atol=1e-15)


def test_circle_theta_eigenvalue_periodic(mixed_scene, rng):
    C = mixed_scene
    p1, p2, _ = C.sample_param(rng)
    for th in rng.uniform(0, 2 * math.pi, 5):
        a, b = C.eigen_rows(p1, p2, th), C.eigen_rows(p1, p2, th + 2 * math.pi)
        assert a[-1].shape == pytest.approx(10.0, rel=1e-12)
        np.testing.assert_allclose([r.shape for r in a], [r.shape for r in b], atol=1e-12)


def test_eigenvectors_of_fd_shape(mixed_scene, rng):
    C = mixed_scene
    X = C.ambient
    p = C.sample_param(rng)
    fd = fd_shape_operator(X, C.chart(p), C.dim, h=1e-4, reference_normal=C.normal(p))
    for r in C.eigen_rows(*p):
        c = X.gram(fd.frame, r.vectors)[:, 0]
        assert np.linalg.norm(fd.shape @ c - r.shape * c) <= 1e-5 * np.linalg.norm(c)


# -- Hypersurface interface ----------------------------------------------------


def test_as_hypersurface(mixed_scene, rng):
    H = as_hypersurface(mixed_scene)
    p = H.sample_param(rng)
    data = H.point_data(p)
    assert commutator_residual(data.shape, data.normal_jacobi) <= 1e-10
    closed = sorted((r.value, j.value) for r, j in zip(H.shape_spectrum(*p), H.normal_jacobi_spectrum(*p)))
    np.testing.assert_allclose(sorted(zip(*data.spectra.expanded())), closed, atol=1e-12)
    np.testing.assert_allclose(H.joint_spectrum(*p).expanded(), data.spectra.expanded())
    with pytest.raises(TypeError):
        as_hypersurface(SPH)


def test_recursive_ambient(spheres_scene):
    D = ConstructedHypersurface(spheres_scene, Horosphere(H2), make_curve("circle", radius=0.05))
    assert D.ambient == ProductSpace((ProductSpace((S2, S2)), H2))
    assert D.dim == 5
    values = D.point_data(D.base_param()).spectra.values()
    assert [v[2] for v in values] == [1, 2, 1, 1]


# -- flat section ----------------------------------------------------------------


def test_flat_section_identities(mixed_scene, rng):
    C = mixed_scene
    p1, p2, _ = C.sample_param(rng)
    sigma = flat_section(C, p1, p2)
    np.testing.assert_array_equal(sigma((0.0, 0.0)), C.ambient.join([C.m1.embed(p1), C.m2.embed(p2)]))
    for th in rng.uniform(0, 2 * math.pi, 5):
        np.testing.assert_array_equal(C.tube_map(p1, p2, th), sigma(C.curve.u(th)))


# -- strongly Jacobi fields --------------------------------------------------------


def test_jacobi_field_initial_value(mixed_scene, rng):
    H = mixed_scene
    p = H.sample_param(rng)
    v0 = H.point_data(p).frame @ rng.standard_normal(H.dim)
    np.testing.assert_allclose(strongly_jacobi_field(H, p, v0, 0.0), v0, atol=1e-15)


def test_jacobi_field_sphere_seed(rng):
    p = SPH.sample_param(rng)
    v0 = SPH.point_data(p).frame[:, 0]
    assert S2.norm(strongly_jacobi_field(SPH, p, v0, 0.1)) == pytest.approx(0.8122603219, abs=1e-10)
    assert S2.norm(strongly_jacobi_field(SPH, p, v0, 0.5)) <= 1e-15


@pytest.mark.parametrize("scene", ["mixed_scene", "horo_scene"])
def test_jacobi_equation_residual(scene, request, rng):
    """Y'' + R(Y, g')g' = 0 in a parallel frame, by second differences."""
    H = request.getfixturevalue(scene)
    X = H.ambient
    p = H.sample_param(rng)
    data = H.point_data(p)
    v0 = data.frame @ rng.standard_normal(H.dim)
    x, n = data.point, data.normal
    E = X.tangent_frame(x)

    def coords(s):
        F = np.column_stack([X.parallel_transport(x, n, s, e) for e in E.T])
        return F, X.gram(F, strongly_jacobi_field(H, p, v0, s)[:, None])[:, 0]

    h = 1e-3
    for s in (0.05, 0.2):
        ypp = (coords(s + h)[1] - 2 * coords(s)[1] + coords(s - h)[1]) / h**2
        F, y = coords(s)
        g = X.velocity(x, n, s)
        Ry = X.gram(F, X.jacobi_operator(X.geodesic(x, n, s), F @ y, g)[:, None])[:, 0]
        assert np.linalg.norm(ypp + Ry) <= 1e-6 * (1 + np.linalg.norm(y))
