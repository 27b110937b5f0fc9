import numpy as np
import pytest

from metaequiv import harness, linalg, reparam, risk
from metaequiv.errors import DimensionMismatch, IllConditioned
from metaequiv.reparam import AffineMap, Chart

from conftest import general_spec


def random_map(dim, rng):
    return reparam.random_affine_map(dim, rng)


def test_apply_examples():
    rng = np.random.default_rng(0)
    w = rng.standard_normal((3, 3))
    np.testing.assert_array_equal(reparam.apply(reparam.identity_map(3), w), w)
    np.testing.assert_array_equal(reparam.apply(reparam.form_b_map(3), w), np.eye(3) - w)
    t = AffineMap(2 * np.eye(2), np.eye(2), np.eye(2))
    np.testing.assert_array_equal(reparam.apply(t, np.eye(2)), 3 * np.eye(2))
    with pytest.raises(DimensionMismatch):
        reparam.apply(t, np.eye(3))


def test_invert_examples():
    fb = reparam.form_b_map(3)
    inv = reparam.invert(fb)
    for name in ("a", "b", "k_off"):
        np.testing.assert_array_equal(getattr(inv, name), getattr(fb, name))
    ident = reparam.invert(reparam.identity_map(2))
    np.testing.assert_array_equal(ident.a, np.eye(2))
    np.testing.assert_array_equal(ident.k_off, np.zeros((2, 2)))

    t = AffineMap(2 * np.eye(2), np.eye(2), np.eye(2))
    inv = reparam.invert(t)
    np.testing.assert_allclose(inv.a, np.eye(2) / 2)
    np.testing.assert_allclose(inv.b, np.eye(2))
    np.testing.assert_allclose(inv.k_off, -np.eye(2) / 2)
    w = np.random.default_rng(1).standard_normal((2, 2))
    np.testing.assert_allclose(reparam.apply(inv, reparam.apply(t, w)), w, atol=1e-15)


def test_apply_invert_round_trip():
    rng = np.random.default_rng(2)
    for _ in range(100):
        dim = int(rng.integers(1, 5))
        t = random_map(dim, rng)
        w = rng.standard_normal((dim, dim))
        back = reparam.apply(reparam.invert(t), reparam.apply(t, w))
        assert linalg.frobenius_norm(back - w) <= 1e-9 * (1 + linalg.frobenius_norm(w))


def test_compose():
    rng = np.random.default_rng(3)
    s, t = random_map(3, rng), random_map(3, rng)
    w = rng.standard_normal((3, 3))
    np.testing.assert_allclose(
        reparam.apply(reparam.compose(s, t), w), reparam.apply(s, reparam.apply(t, w)), atol=1e-12
    )


def test_singular_map_rejected():
    with pytest.raises(IllConditioned):
        AffineMap(np.zeros((2, 2)), np.eye(2), np.zeros((2, 2)))
    with pytest.raises(IllConditioned):
        AffineMap(np.eye(2), [[1.0, 1.0], [1.0, 1.0]], np.zeros((2, 2)))


def test_form_b_involution():
    rng = np.random.default_rng(4)
    fb = reparam.form_b_map(4)
    for _ in range(50):
        w = rng.standard_normal((4, 4)) * 10
        twice = reparam.apply(fb, reparam.apply(fb, w))
        assert np.max(np.abs(twice - w)) <= 1e-15 * (1 + np.max(np.abs(w))) * 4


def test_form_b_chart_is_general_map():
    chart = Chart.form_b(3)
    np.testing.assert_array_equal(chart.transform.a, -np.eye(3))
    np.testing.assert_array_equal(chart.transform.b, np.eye(3))
    np.testing.assert_array_equal(chart.transform.k_off, np.eye(3))
    assert Chart.from_tag("b", 3).tag == "B"
    with pytest.raises(ValueError):
        Chart.from_tag("C", 3)


def test_pullback_identity_is_base():
    spec = general_spec(3, 0)
    ev = reparam.pullback_risk(spec, reparam.identity_map(3))
    w = np.random.default_rng(0).standard_normal((3, 3))
    assert ev.value(w) == risk.risk(spec, w)
    np.testing.assert_allclose(ev.gradient(w), risk.gradient(spec, w), rtol=1e-15)


def test_pullback_form_b_scalar(canonical):
    ev = reparam.chart_risk(canonical, Chart.form_b(1))
    assert ev.value([[0.25]]) == pytest.approx(0.875, rel=1e-15)
    assert ev([[0.25]]) == risk.risk(canonical, [[0.75]])


def test_pullback_scalar_line_mirror(canonical):
    ev = reparam.chart_risk(canonical, Chart.form_b(1))
    for w in np.linspace(-1, 2, 61):
        assert ev.value([[w]]) == pytest.approx(risk.risk(canonical, [[1 - w]]), rel=1e-14)


def test_pullback_consistency():
    rng = np.random.default_rng(5)
    for trial in range(100):
        dim = int(rng.integers(1, 4))
        spec = general_spec(dim, trial)
        t = random_map(dim, rng)
        w = rng.standard_normal((dim, dim))
        r = risk.risk(spec, w)
        r2 = reparam.pullback_risk(spec, t).value(reparam.apply(t, w))
        assert abs(r - r2) <= 1e-10 * (1 + abs(r))


def test_transform_gradient_form_b():
    spec = general_spec(3, 6)
    ev_b = reparam.chart_risk(spec, Chart.form_b(3))
    w = np.random.default_rng(6).standard_normal((3, 3))
    expected = -ev_b.gradient(np.eye(3) - w)
    np.testing.assert_allclose(
        reparam.transform_gradient(reparam.form_b_map(3), ev_b.gradient(np.eye(3) - w)), expected
    )
    np.testing.assert_allclose(risk.gradient(spec, w), expected, rtol=1e-12, atol=1e-12)


def test_transform_gradient_zero():
    t = random_map(3, np.random.default_rng(7))
    np.testing.assert_array_equal(reparam.transform_gradient(t, np.zeros((3, 3))), np.zeros((3, 3)))
    with pytest.raises(DimensionMismatch):
        reparam.transform_gradient(t, np.zeros((2, 2)))


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_gradient_transformation_law(dim):
    """A^T grad R2(T(W)) B^T equals grad R(W), with both sides from central differences."""
    rng = np.random.default_rng(10 + dim)
    for trial in range(100):
        spec = general_spec(dim, trial)
        t = random_map(dim, rng)
        w = rng.standard_normal((dim, dim))
        ev = reparam.pullback_risk(spec, t)
        pulled = reparam.transform_gradient(t, ev.gradient(reparam.apply(t, w)))
        base = risk.gradient(spec, w)
        assert linalg.frobenius_norm(pulled - base) <= 1e-8 * (1 + linalg.frobenius_norm(base))
        # finite-difference oracle on both sides
        pulled_fd = reparam.transform_gradient(t, ev.fd_gradient(reparam.apply(t, w)))
        base_fd = risk.fd_gradient(spec, w)
        assert linalg.frobenius_norm(pulled_fd - base_fd) <= 1e-5 * (1 + linalg.frobenius_norm(base_fd))


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_pullback_preserves_strict_convexity(dim):
    rng = np.random.default_rng(20 + dim)
    for trial in range(20):
        spec = general_spec(dim, trial)
        t = random_map(dim, rng)
        ev = reparam.pullback_risk(spec, t)
        analytic = reparam.pullback_hessian(spec, t)
        # the gradient is affine, so differencing it gives the Hessian
        n = dim * dim
        g0 = linalg.vec(ev.gradient(np.zeros((dim, dim))))
        fd = np.empty((n, n))
        for j in range(n):
            e = np.zeros(n)
            e[j] = 1.0
            fd[:, j] = linalg.vec(ev.gradient(linalg.unvec(e, dim))) - g0
        np.testing.assert_allclose(fd, analytic, atol=1e-8 * np.abs(analytic).max())
        assert np.linalg.eigvalsh(linalg.symmetrize(fd))[0] > 0


def test_random_affine_map_conditioning():
    rng = np.random.default_rng(0)
    for _ in range(50):
        t = reparam.random_affine_map(5, rng)
        assert linalg.condition_estimate(t.a) < 1e3
        assert linalg.condition_estimate(t.b) < 1e3


def test_combination_matrices_sum_to_identity():
    rng = np.random.default_rng(1)
    chart = Chart.general(random_map(3, rng))
    a1, a2 = chart.combination_matrices(rng.standard_normal((3, 3)))
    np.testing.assert_allclose(a1 + a2, np.eye(3), atol=1e-15)


def test_random_spec_used_by_harness_is_valid():
    spec = harness.random_spec(3, 123)
    assert spec.dim == 3
