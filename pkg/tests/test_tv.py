"""Split Bregman machinery for the TV-regularized image reconstruction."""

from __future__ import annotations

import numpy as np
import pytest

from dcen.core import DcenParams
from dcen.datagen import radial_mask, rng_from, shepp_logan
from dcen.tv import (
    BregmanState,
    Image2D,
    KSpaceData,
    data_consistency_update,
    grad_x,
    grad_x_adj,
    grad_y,
    grad_y_adj,
    gradient_direction,
    laplacian_eigenvalues,
    make_kspace,
    reconstruct_dcen_tv,
    shrink_update,
    u_update,
)
from reference_impls import classical_tv_bregman_ref, dense_u_solve_ref


def random_state(rng, n):
    arrays = [rng.standard_normal((n, n)) for _ in range(4)]
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    t = gradient_direction(rng.standard_normal((n, n)))
    return BregmanState(d_x=arrays[0], d_y=arrays[1], b_x=arrays[2], b_y=arrays[3],
                        z=z, t_x=t[0], t_y=t[1])


class TestContainers:
    def test_image_validation(self):
        with pytest.raises(ValueError):
            Image2D(data=np.zeros((4, 5)), n_side=4)
        with pytest.raises(ValueError):
            Image2D(data=np.full((4, 4), np.nan), n_side=4)
        assert Image2D.from_array(np.zeros((6, 6))).n_side == 6

    def test_kspace_validation(self):
        mask = np.zeros((4, 4), dtype=bool)
        mask[0, 0] = True
        samples = np.zeros((4, 4), dtype=complex)
        samples[1, 1] = 1.0  # off the mask
        with pytest.raises(ValueError):
            KSpaceData(samples=samples, mask=mask)
        with pytest.raises(ValueError):
            KSpaceData(samples=np.zeros((4, 4)), mask=mask.astype(float))
        with pytest.raises(ValueError):
            KSpaceData(samples=np.zeros((3, 4)), mask=mask)

    def test_cold_state_shapes(self):
        kspace = make_kspace(np.zeros((5, 5)), np.eye(5, dtype=bool))
        state = BregmanState.cold(kspace)
        assert state.d_x.shape == (5, 5) and state.z.dtype == complex

    def test_make_kspace_vanishes_off_mask(self):
        rng = rng_from(0)
        img = rng.standard_normal((8, 8))
        mask = rng.random((8, 8)) < 0.3
        kspace = make_kspace(img, mask)
        assert np.all(kspace.samples[~mask] == 0.0)
        expected = np.fft.fft2(img, norm="ortho")[mask]
        np.testing.assert_allclose(kspace.samples[mask], expected, rtol=1e-12)


class TestDifferentialOperators:
    def test_adjoint_identities(self):
        rng = rng_from(1)
        for _ in range(20):
            u = rng.standard_normal((7, 7))
            v = rng.standard_normal((7, 7))
            assert np.sum(grad_x(u) * v) == pytest.approx(np.sum(u * grad_x_adj(v)), abs=1e-10)
            assert np.sum(grad_y(u) * v) == pytest.approx(np.sum(u * grad_y_adj(v)), abs=1e-10)

    def test_laplacian_diagonalized_by_dft(self):
        rng = rng_from(2)
        n = 8
        lap = laplacian_eigenvalues(n)
        assert lap[0, 0] == 0.0 and np.all(lap.ravel()[1:] > 0.0)
        for _ in range(10):
            u = rng.standard_normal((n, n))
            dtd = grad_x_adj(grad_x(u)) + grad_y_adj(grad_y(u))
            lhs = np.fft.fft2(dtd, norm="ortho")
            rhs = lap * np.fft.fft2(u, norm="ortho")
            np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_gradient_direction_on_ramp(self):
        n = 8
        u = np.tile(np.arange(n, dtype=float), (n, 1))  # increases along x
        t_x, t_y = gradient_direction(u)
        np.testing.assert_allclose(t_x[:, : n - 1], 1.0, atol=1e-14)
        np.testing.assert_allclose(t_y[:, : n - 1], 0.0, atol=1e-14)

    def test_gradient_direction_unit_or_zero(self):
        rng = rng_from(3)
        u = rng.standard_normal((9, 9))
        t_x, t_y = gradient_direction(u)
        mag = t_x**2 + t_y**2
        assert np.all((np.abs(mag - 1.0) < 1e-12) | (mag == 0.0))
        zx, zy = gradient_direction(np.ones((5, 5)))
        assert np.all(zx == 0.0) and np.all(zy == 0.0)


class TestUUpdate:
    def test_matches_dense_normal_equations(self):
        rng = rng_from(4)
        n = 8
        for trial in range(5):
            mask = rng.random((n, n)) < 0.4
            mask[0, 0] = True  # keep the operator nonsingular
            img = rng.standard_normal((n, n))
            kspace = make_kspace(img, mask)
            state = random_state(rng, n)
            state.z = np.where(mask, state.z, 0.0) + kspace.samples
            mu, beta = 10.0, 1.5
            u = u_update(state, kspace, mu, beta)
            div = grad_x_adj(state.d_x - state.b_x) + grad_y_adj(state.d_y - state.b_y)
            dense = dense_u_solve_ref(div, state.z, mask, mu, beta)
            assert np.max(np.abs(u - dense)) < 1e-8

    def test_dc_gauge_when_mask_excludes_dc(self):
        rng = rng_from(5)
        n = 8
        mask = rng.random((n, n)) < 0.4
        mask[0, 0] = False
        img = rng.standard_normal((n, n))
        kspace = KSpaceData(
            samples=np.where(mask, np.fft.fft2(img, norm="ortho"), 0.0), mask=mask
        )
        state = random_state(rng, n)
        u = u_update(state, kspace, mu=5.0, beta=1.0)
        assert abs(np.fft.fft2(u, norm="ortho")[0, 0]) < 1e-12


class TestShrinkUpdate:
    def test_componentwise_grid_oracle(self):
        # Each d component solves gamma*|d| - gamma*alpha*t*d + (1-gamma)*d^2
        # + (beta/2)*(d - v)^2; compare a few against a dense 1-d grid.
        rng = rng_from(6)
        n = 6
        params = DcenParams(lam=1.0, gamma=0.8, alpha=0.6)
        beta = 1.3
        state = random_state(rng, n)
        u = rng.standard_normal((n, n))
        bx_before = state.b_x.copy()
        gx_before = grad_x(u)
        out = shrink_update(state, u, params, beta)
        v = gx_before + bx_before
        grid = np.linspace(-6.0, 6.0, 24001)
        for i, j in [(0, 0), (2, 3), (5, 1)]:
            objective = (
                params.gamma * np.abs(grid)
                - params.gamma * params.alpha * out.t_x[i, j] * grid
                + (1.0 - params.gamma) * grid**2
                + 0.5 * beta * (grid - v[i, j]) ** 2
            )
            assert abs(out.d_x[i, j] - grid[np.argmin(objective)]) < 1e-3

    def test_bregman_multiplier_accumulates_residual(self):
        rng = rng_from(7)
        n = 5
        state = random_state(rng, n)
        u = rng.standard_normal((n, n))
        bx_before = state.b_x.copy()
        gx = grad_x(u)
        out = shrink_update(state, u, DcenParams(lam=1.0, gamma=0.9, alpha=0.5), 2.0)
        np.testing.assert_allclose(out.b_x, bx_before + gx - out.d_x, atol=1e-14)

    def test_classical_limit_is_plain_shrinkage(self):
        # gamma = 1, alpha = 0: d = soft(Du + b, 1/beta).
        rng = rng_from(8)
        n = 5
        state = random_state(rng, n)
        u = rng.standard_normal((n, n))
        v = grad_x(u) + state.b_x
        beta = 2.5
        out = shrink_update(state, u, DcenParams(lam=1.0, gamma=1.0, alpha=0.0), beta)
        expected = np.sign(v) * np.maximum(np.abs(v) - 1.0 / beta, 0.0)
        np.testing.assert_allclose(out.d_x, expected, atol=1e-14)


class TestDataConsistency:
    def test_adds_on_mask_residual(self):
        rng = rng_from(9)
        n = 6
        img = rng.standard_normal((n, n))
        mask = rng.random((n, n)) < 0.5
        mask[0, 0] = True
        kspace = make_kspace(img, mask)
        state = BregmanState.cold(kspace)
        u = rng.standard_normal((n, n))
        z_before = state.z.copy()
        out = data_consistency_update(state, u, kspace)
        expected = z_before + kspace.samples - mask * np.fft.fft2(u, norm="ortho")
        np.testing.assert_allclose(out.z, expected, atol=1e-12)


class TestReconstruction:
    def test_classical_tv_matches_reference_loop(self):
        phantom = shepp_logan(32)
        mask = radial_mask(32, 6)
        kspace = make_kspace(phantom, mask)
        params = DcenParams(lam=1.0, gamma=1.0, alpha=0.0)
        mu, beta = 50.0, 1.0
        recon = reconstruct_dcen_tv(kspace, params, mu=mu, beta=beta,
                                    max_outer=3, max_inner=4)
        ref = classical_tv_bregman_ref(kspace.samples, mask, mu, beta, 3, 4)
        assert np.max(np.abs(recon.data - ref)) < 1e-8

    def test_zero_data_reconstructs_zero(self):
        mask = radial_mask(16, 4)
        kspace = KSpaceData(samples=np.zeros((16, 16), dtype=complex), mask=mask)
        recon = reconstruct_dcen_tv(kspace, DcenParams(lam=1.0, gamma=0.9, alpha=0.5),
                                    mu=10.0, beta=1.0, max_outer=2, max_inner=3)
        assert np.all(recon.data == 0.0)

    def test_fully_sampled_recovery(self):
        phantom = shepp_logan(32)
        mask = np.ones((32, 32), dtype=bool)
        kspace = make_kspace(phantom, mask)
        params = DcenParams(lam=1.0, gamma=0.999, alpha=0.0)
        recon = reconstruct_dcen_tv(kspace, params, mu=80.0, beta=2.0,
                                    max_outer=8, max_inner=20)
        rel = np.linalg.norm(recon.data - phantom.data) / np.linalg.norm(phantom.data)
        assert rel < 1e-6

    def test_auto_mu_runs(self):
        phantom = shepp_logan(16)
        kspace = make_kspace(phantom, radial_mask(16, 4))
        recon = reconstruct_dcen_tv(kspace, DcenParams(lam=1.0, gamma=0.95, alpha=0.3),
                                    max_outer=1, max_inner=2)
        assert np.all(np.isfinite(recon.data))

    def test_validation(self):
        kspace = make_kspace(np.zeros((16, 16)), np.ones((16, 16), dtype=bool))
        params = DcenParams(lam=1.0, gamma=0.9, alpha=0.5)
        empty = KSpaceData(samples=np.zeros((16, 16), dtype=complex),
                           mask=np.zeros((16, 16), dtype=bool))
        with pytest.raises(ValueError):
            reconstruct_dcen_tv(empty, params)
        with pytest.raises(ValueError):
            reconstruct_dcen_tv(kspace, params, mu=-1.0)
        with pytest.raises(ValueError):
            reconstruct_dcen_tv(kspace, params, beta=0.0)
        with pytest.raises(ValueError):
            reconstruct_dcen_tv(kspace, params, max_outer=0)
