import numpy as np
import pytest

from poisswell.grid import Grid
from poisswell import operators as ops

from conftest import random_band_limited


def x_of(grid, axis=0):
    return grid.coordinates()[axis]


class TestGradient:
    def test_cosine_eigenfunction(self):
        g = Grid((64,))
        x = x_of(g)
        grad = ops.gradient(g, np.cos(x) * np.ones(g.shape))
        assert np.max(np.abs(grad[0] + np.sin(x))) < 1e-12
        assert np.max(np.abs(grad[1])) == 0.0

    def test_constant_maps_to_zero(self):
        g = Grid((32,))
        grad = ops.gradient(g, np.full(g.shape, 3.7))
        assert np.max(np.abs(grad)) < 1e-13

    def test_2d_product_against_symbolic_derivative(self):
        # oracle: d/dx1 cos(2 x1)cos(3 x2) = -2 sin(2 x1)cos(3 x2)
        #         d/dx2 cos(2 x1)cos(3 x2) = -3 cos(2 x1)sin(3 x2)
        g = Grid((32, 48))
        x1, x2 = g.coordinates()
        f = np.cos(2 * x1) * np.cos(3 * x2)
        grad = ops.gradient(g, f)
        assert np.max(np.abs(grad[0] + 2 * np.sin(2 * x1) * np.cos(3 * x2))) < 1e-11
        assert np.max(np.abs(grad[1] + 3 * np.cos(2 * x1) * np.sin(3 * x2))) < 1e-11

    def test_linearity(self, rng):
        g = Grid((32,))
        f1 = random_band_limited(g, rng)
        f2 = random_band_limited(g, rng)
        left = ops.gradient(g, 2.0 * f1 - 0.5 * f2)
        right = 2.0 * ops.gradient(g, f1) - 0.5 * ops.gradient(g, f2)
        assert np.max(np.abs(left - right)) < 1e-12


class TestCurl:
    def test_symbolic_curl_x1(self):
        # oracle: curl(0,0,sin x1) = (d2 A3 - d3 A2, d3 A1 - d1 A3, d1 A2 - d2 A1)
        #       = (0, -cos x1, 0)
        g = Grid((64,))
        x = x_of(g)
        A = np.zeros((3,) + g.shape)
        A[2] = np.sin(x).ravel()
        B = ops.curl(g, A)
        assert np.max(np.abs(B[0])) < 1e-12
        assert np.max(np.abs(B[1] + np.cos(x).ravel())) < 1e-12
        assert np.max(np.abs(B[2])) < 1e-12

    def test_symbolic_curl_x2(self):
        # oracle: curl(0,0,sin x2) = (cos x2, 0, 0)
        g = Grid((16, 64))
        x2 = g.coordinates()[1]
        A = np.zeros((3,) + g.shape)
        A[2] = (np.sin(x2) * np.ones(g.shape))
        B = ops.curl(g, A)
        assert np.max(np.abs(B[0] - np.cos(x2) * np.ones(g.shape))) < 1e-12
        assert np.max(np.abs(B[1])) < 1e-12

    def test_curl_of_gradient_vanishes(self, rng):
        g = Grid((16, 16))
        phi = random_band_limited(g, rng)
        B = ops.curl(g, ops.gradient(g, phi))
        assert np.max(np.abs(B)) < 1e-12

    def test_divergence_of_curl_vanishes(self, rng):
        g = Grid((16, 16, 16))
        A = random_band_limited(g, rng, components=3)
        divB = ops.divergence(g, ops.curl(g, A))
        assert np.max(np.abs(divB)) < 1e-12


class TestNorms:
    def test_l2_of_cosine(self):
        # integral of cos^2 over [0, 2pi) is pi
        g = Grid((64,))
        x = x_of(g)
        assert ops.l2_norm(g, np.cos(x).ravel()) == pytest.approx(np.sqrt(np.pi), rel=1e-13)

    def test_parseval(self, rng):
        g = Grid((32, 32))
        f = random_band_limited(g, rng)
        assert ops.l2_norm(g, f) == pytest.approx(
            ops.l2_norm_spectral(g, g.fft(f)), rel=1e-12
        )

    def test_sobolev_reduces_to_l2_at_zero(self, rng):
        g = Grid((64,))
        f = random_band_limited(g, rng)
        assert ops.sobolev_norm(g, f, 0.0) == pytest.approx(ops.l2_norm(g, f), rel=1e-12)

    def test_sobolev_fourier_cosine(self):
        # oracle: single mode k=1 carries weight (1+1)^1 = 2 => sqrt(2) sqrt(pi)
        g = Grid((64,))
        x = x_of(g)
        val = ops.sobolev_norm(g, np.cos(x).ravel(), 1.0)
        assert val == pytest.approx(np.sqrt(2.0) * np.sqrt(np.pi), rel=1e-12)

    def test_sobolev_monotone_in_s(self, rng):
        g = Grid((64,))
        f = random_band_limited(g, rng)
        vals = [ops.sobolev_norm(g, f, s) for s in (0.0, 0.5, 1.0, 2.0, 4.0)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_zero_field_zero_norm(self):
        g = Grid((32,))
        for s in (0.0, 1.0, 3.0):
            assert ops.sobolev_norm(g, np.zeros(g.shape), s) == 0.0

    def test_sobolev_index_carries_variant(self):
        g = Grid((64,))
        x = x_of(g)
        f = np.cos(2 * x).ravel()
        idx = ops.SobolevIndex(2.0, "sum")
        assert ops.sobolev_norm(g, f, idx) == ops.sobolev_norm(g, f, 2.0, variant="sum")

    def test_variants_agree_on_monochromatic_fields(self):
        # on a single mode both variants are explicit: fourier gives
        # (1+k^2)^{s/2} ||f||_2, sum gives (1 + k + k^2) ||f||_2 for s=2
        g = Grid((64,))
        x = x_of(g)
        f = np.cos(2 * x).ravel()
        l2 = ops.l2_norm(g, f)
        four = ops.sobolev_norm(g, f, 2.0, variant="fourier")
        summ = ops.sobolev_norm(g, f, 2.0, variant="sum")
        assert four == pytest.approx((1 + 4.0) * l2, rel=1e-12)
        assert summ == pytest.approx((1 + 2.0 + 4.0) * l2, rel=1e-12)

    def test_pointwise_norms_cosine(self):
        g = Grid((128,))
        x = x_of(g)
        pw = ops.pointwise_norms(g, np.cos(x).ravel())
        assert pw.l_inf == pytest.approx(1.0, abs=1e-14)
        assert pw.w1_inf == pytest.approx(2.0, abs=1e-12)

    def test_pointwise_norms_zero(self):
        g = Grid((32,))
        pw = ops.pointwise_norms(g, np.zeros(g.shape))
        assert (pw.l_inf, pw.w1_inf, pw.w2_3) == (0.0, 0.0, 0.0)

    def test_pointwise_sup_sampling_error(self):
        # grid max of sin(3x) reaches 1 up to O(dx^2) sampling error
        g = Grid((64,))
        x = x_of(g)
        pw = ops.pointwise_norms(g, np.sin(3 * x).ravel())
        dx = g.spacings[0]
        assert 1.0 - pw.l_inf <= dx**2
        assert pw.l_inf <= 1.0 + 1e-14

    def test_w23_cosine_against_quadrature(self):
        # oracle: fine-grid quadrature of |cos|^3, |sin|^3 on [0, 2pi)
        g = Grid((128,))
        x = x_of(g).ravel()
        fine = np.linspace(0, 2 * np.pi, 200001)
        c3 = (np.trapezoid(np.abs(np.cos(fine)) ** 3, fine)) ** (1 / 3)
        s3 = (np.trapezoid(np.abs(np.sin(fine)) ** 3, fine)) ** (1 / 3)
        pw = ops.pointwise_norms(g, np.cos(x))
        assert pw.w2_3 == pytest.approx(2 * c3 + s3, rel=1e-6)


class TestStructure:
    def test_translation_commutes_with_gradient_and_curl(self, rng):
        g = Grid((32, 32))
        f = random_band_limited(g, rng)
        A = random_band_limited(g, rng, components=3)
        rolled = np.roll(f, 1, axis=-1)
        assert np.allclose(
            ops.gradient(g, rolled), np.roll(ops.gradient(g, f), 1, axis=-1), atol=1e-12
        )
        rolledA = np.roll(A, 1, axis=-1)
        assert np.allclose(
            ops.curl(g, rolledA), np.roll(ops.curl(g, A), 1, axis=-1), atol=1e-12
        )

    def test_shift_is_spectral_interpolation(self):
        g = Grid((64,))
        x = x_of(g).ravel()
        f = np.cos(3 * x)
        shifted = ops.shift(g, f, (0.1,))
        assert np.max(np.abs(shifted - np.cos(3 * (x + 0.1)))) < 1e-12

    def test_gradient_part_recovers_gradient(self, rng):
        g = Grid((32, 32))
        phi = random_band_limited(g, rng)
        u = ops.gradient(g, phi)
        proj = ops.gradient_part(g, u)
        assert np.max(np.abs(proj - u)) < 1e-12

    def test_gradient_part_kills_solenoidal(self, rng):
        g = Grid((32, 32))
        A = random_band_limited(g, rng, components=3)
        sol = ops.curl(g, A)
        sol -= sol.mean(axis=(-2, -1), keepdims=True)
        proj = ops.gradient_part(g, sol)
        assert np.max(np.abs(proj)) < 1e-11

    def test_dealias_idempotent(self, rng):
        g = Grid((64,))
        f = rng.standard_normal(g.shape)
        once = ops.dealias(g, f)
        twice = ops.dealias(g, once)
        assert np.allclose(once, twice, atol=1e-13)

    def test_spectral_tail_fraction_detects_high_modes(self):
        g = Grid((96,))
        x = x_of(g).ravel()
        smooth = np.cos(x)
        rough = np.cos(30 * x)  # inside kept band (|k|<=32), top third (>21)
        assert ops.spectral_tail_fraction(g, smooth) < 1e-20
        assert ops.spectral_tail_fraction(g, rough) > 0.99
