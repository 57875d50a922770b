import numpy as np
import pytest

from anisodiff import (
    DiffusionTensor,
    Image,
    StencilParams,
    apply_operator,
    assemble_matrix,
    assemble_stencil,
    constant_field,
    delta_value,
    directional_weights,
    stencil_weights,
)
from conftest import make_random_field


class TestStencilParams:
    def test_defaults(self):
        p = StencilParams()
        assert (p.alpha, p.gamma) == (0.0, 0.0)

    @pytest.mark.parametrize("alpha, gamma", [(-0.1, 0.0), (0.6, 0.0), (0.2, 1.5), (0.2, -1.5)])
    def test_out_of_range(self, alpha, gamma):
        with pytest.raises(ValueError):
            StencilParams(alpha, gamma)


class TestDelta:
    def test_example(self):
        t = DiffusionTensor(2.0, -1.0, 1.0)
        # 0.4*(2+1) + 0.5*(1-0.8)*|-1| = 1.3
        assert delta_value(t, StencilParams(0.4, 0.5)) == pytest.approx(1.3, abs=1e-15)

    def test_alpha_zero_gamma_zero(self):
        assert delta_value(DiffusionTensor(2.0, -1.0, 1.0), StencilParams()) == 0.0

    def test_alpha_half_ignores_gamma(self):
        t = DiffusionTensor(2.0, 1.0, 3.0)
        for gamma in (-1.0, 0.0, 1.0):
            assert delta_value(t, StencilParams(0.5, gamma)) == pytest.approx(2.5, abs=1e-15)


class TestDirectionalWeights:
    def test_example(self):
        t = DiffusionTensor(2.0, -1.0, 1.0)
        w = directional_weights(t, 1.3)
        assert w == pytest.approx((0.7, 0.3, -0.3, 2.3), abs=1e-15)

    def test_trace_identity(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            f = make_random_field(rng, (1, 1))
            t = DiffusionTensor(f.a[0, 0], f.b[0, 0], f.c[0, 0])
            d = delta_value(t, StencilParams(rng.uniform(0, 0.5), rng.uniform(-1, 1)))
            w = directional_weights(t, d)
            assert sum(w) == pytest.approx(t.a + t.c, rel=1e-13)

    def test_nonnegative_in_parameter_range(self):
        """For alpha in [|b|/(a+c+2|b|), 1/2] with gamma = 1, all four
        directional weights are nonnegative (one-sided stencils)."""
        t = DiffusionTensor(1.0, 0.6, 1.0)
        alpha = abs(t.b) / (t.a + t.c + 2 * abs(t.b))
        d = delta_value(t, StencilParams(alpha, 1.0))
        w = directional_weights(t, d)
        assert min(w) >= -1e-15


class TestStencilAssembly:
    def test_five_point_laplacian(self):
        f = constant_field(DiffusionTensor(1.0, 0.0, 1.0), (3, 3))
        mask = assemble_stencil(f, StencilParams(), 1, 1)
        expected = np.array([[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]])
        assert np.array_equal(mask, expected)

    def test_pure_diagonal_tensor(self):
        """a = c = b = 1 with alpha = 0, gamma = 1 gives delta = 1 and pure
        (1,1)-diagonal diffusion: only the NE/SW weights survive."""
        f = constant_field(DiffusionTensor(1.0, 1.0, 1.0), (3, 3))
        mask = assemble_stencil(f, StencilParams(0.0, 1.0), 1, 1)
        expected = np.array([[0.0, 0.0, 1.0], [0.0, -2.0, 0.0], [1.0, 0.0, 0.0]])
        assert np.allclose(mask, expected, atol=1e-15)

    def test_anisotropic_interior_weights(self):
        t = DiffusionTensor(2.0, -1.0, 1.0)
        f = constant_field(t, (3, 3))
        p = StencilParams(0.4, 0.5)
        mask = assemble_stencil(f, p, 1, 1)
        # gates from delta = 1.3: axial a-d = 0.7, c-d = -0.3; diagonals
        # (d+b)/2 = 0.15, (d-b)/2 = 1.15
        expected = np.array(
            [[1.15, -0.3, 0.15], [0.7, -3.4, 0.7], [0.15, -0.3, 1.15]]
        )
        assert np.allclose(mask, expected, atol=1e-13)
        assert mask.sum() == pytest.approx(0.0, abs=1e-13)

    def test_no_diagonals_when_b_zero_and_alpha_zero(self):
        f = constant_field(DiffusionTensor(1.5, 0.0, 0.25), (4, 4))
        sf = stencil_weights(f, StencilParams(0.0, 0.7))
        for corner in (sf.ne, sf.nw, sf.se, sf.sw):
            assert np.all(corner == 0.0)

    def test_border_weights_zero(self):
        rng = np.random.default_rng(9)
        f = make_random_field(rng, (4, 5))
        sf = stencil_weights(f, StencilParams(0.3, -0.5))
        assert np.all(sf.w[:, 0] == 0.0) and np.all(sf.e[:, -1] == 0.0)
        assert np.all(sf.s[0, :] == 0.0) and np.all(sf.n[-1, :] == 0.0)
        assert np.all(sf.nw[:, 0] == 0.0) and np.all(sf.nw[-1, :] == 0.0)
        assert np.all(sf.se[:, -1] == 0.0) and np.all(sf.se[0, :] == 0.0)


class TestApplyOperator:
    def test_constant_image_maps_to_zero(self):
        rng = np.random.default_rng(2)
        f = make_random_field(rng, (5, 5))
        img = Image(np.full((6, 6), 17.0), h=0.5)
        out = apply_operator(img, f, StencilParams(0.25, 0.5))
        assert np.all(out.values == 0.0)

    def test_laplacian_of_quadratic(self):
        # u = x^2 with D = I: div(grad u) = 2 away from the x boundary
        h = 0.1
        y, x = np.mgrid[0:6, 0:8] * h
        img = Image(x * x, h)
        f = constant_field(DiffusionTensor(1.0, 0.0, 1.0), (6, 8))
        out = apply_operator(img, f, StencilParams())
        assert np.allclose(out.values[:, 1:-1], 2.0, atol=1e-10)

    def test_shape_mismatch_raises(self):
        f = constant_field(DiffusionTensor(1.0, 0.0, 1.0), (4, 4))
        with pytest.raises(ValueError):
            apply_operator(Image(np.zeros((5, 6))), f, StencilParams())

    @pytest.mark.parametrize("threads", [2, 3, 7])
    def test_threaded_apply_bit_identical(self, threads):
        rng = np.random.default_rng(11)
        f = make_random_field(rng, (15, 12))
        img = Image(rng.uniform(0, 255, (16, 13)))
        p = StencilParams(0.45, -0.8)
        ref = apply_operator(img, f, p, threads=1)
        out = apply_operator(img, f, p, threads=threads)
        assert np.array_equal(out.values, ref.values)

    def test_matches_matrix_oracle(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            hgt, wdt = rng.integers(2, 9, 2)
            f = make_random_field(rng, (hgt - 1, wdt - 1))
            p = StencilParams(rng.uniform(0, 0.5), rng.uniform(-1, 1))
            h = rng.uniform(0.2, 2.0)
            A = assemble_matrix(f, p, h)
            u = rng.standard_normal((hgt, wdt))
            via_matrix = (A @ u.ravel()).reshape(hgt, wdt)
            via_apply = apply_operator(Image(u, h), f, p).values
            assert np.max(np.abs(via_matrix - via_apply)) < 1e-10


class TestAssembleMatrix:
    def test_symmetric_with_zero_row_sums(self):
        rng = np.random.default_rng(17)
        f = make_random_field(rng, (4, 4))
        A = assemble_matrix(f, StencilParams(0.2, 0.9))
        assert np.array_equal(A, A.T)
        # entries cancel in exact +v/-v pairs; summation order leaves roundoff
        assert np.max(np.abs(A.sum(axis=1))) < 1e-14

    def test_minimal_grid(self):
        f = make_random_field(np.random.default_rng(0), (1, 1))
        A = assemble_matrix(f, StencilParams(0.5, 0.0))
        assert A.shape == (4, 4)
        assert np.array_equal(A, A.T)

    def test_size_limit(self):
        f = constant_field(DiffusionTensor(1.0, 0.0, 1.0), (101, 101))
        with pytest.raises(ValueError):
            assemble_matrix(f, StencilParams())


def test_consistency_order_two():
    """Empirical order of apply_operator against the continuous operator on
    u = sin(x)cos(2y) with a constant anisotropic tensor."""
    t = DiffusionTensor(1.0, 0.4, 0.7)
    p = StencilParams(0.44, 0.9)
    errors = []
    for m in (32, 64):
        h = np.pi / m
        y, x = np.mgrid[0 : m + 1, 0 : m + 1] * h
        u = np.sin(x) * np.cos(2 * y)
        exact = -(t.a + 4 * t.c) * u - 4 * t.b * np.cos(x) * np.sin(2 * y)
        f = constant_field(t, (m + 1, m + 1))
        num = apply_operator(Image(u, h), f, p).values
        errors.append(np.max(np.abs(num - exact)[1:-1, 1:-1]))
    order = np.log2(errors[0] / errors[1])
    assert order >= 1.85
