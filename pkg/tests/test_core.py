"""Domain types, objective/regularizer evaluation, and the DC split."""

from __future__ import annotations

import numpy as np
import pytest

from dcen.core import (
    DcenParams,
    Problem,
    SolveReport,
    Termination,
    ZeroIterate,
    concave_gradient,
    eval_dc_parts,
    eval_objective,
    eval_regularizer,
    l2_norm,
    smallest_gram_eigenvalue,
    strong_convexity_modulus,
)
from dcen.datagen import rng_from


def params(**kw):
    base = dict(lam=1.0, gamma=0.8, alpha=0.7)
    base.update(kw)
    return DcenParams(**base)


class TestDcenParams:
    def test_defaults_valid(self):
        p = DcenParams()
        assert p.lam == 1e-3 and p.gamma == 0.8 and p.alpha == 0.7

    @pytest.mark.parametrize(
        "bad",
        [
            dict(lam=0.0),
            dict(lam=-1.0),
            dict(gamma=0.0),
            dict(gamma=1.2),
            dict(alpha=1.0),
            dict(alpha=-0.1),
            dict(rho=0.0),
            dict(eps_abs=0.0),
            dict(eps_rel=-1e-9),
            dict(eps_machine=0.0),
            dict(dca_eps=0.0),
            dict(max_outer=0),
            dict(max_inner=0),
        ],
    )
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(ValueError):
            DcenParams(**bad)

    def test_gamma_one_allowed(self):
        assert DcenParams(gamma=1.0, alpha=0.0).gamma == 1.0

    def test_max_inner_default_is_5n(self):
        assert DcenParams().resolve_max_inner(30) == 150
        assert DcenParams(max_inner=7).resolve_max_inner(30) == 7


class TestProblem:
    def test_shape_checks(self):
        a = np.eye(3)
        with pytest.raises(ValueError):
            Problem(a=a, b=np.zeros(2))
        with pytest.raises(ValueError):
            Problem(a=np.zeros(3), b=np.zeros(3))
        with pytest.raises(ValueError):
            Problem(a=a, b=np.zeros(3), truth=np.zeros(2))

    def test_rejects_non_finite(self):
        a = np.eye(2)
        b = np.array([1.0, np.nan])
        with pytest.raises(ValueError):
            Problem(a=a, b=b)

    def test_dimensions(self):
        prob = Problem(a=np.ones((4, 7)), b=np.ones(4))
        assert prob.m == 4 and prob.n == 7


class TestNorms:
    def test_l2_matches_numpy(self):
        x = rng_from(0).standard_normal(257)
        assert l2_norm(x) == pytest.approx(np.linalg.norm(x), rel=1e-15)

    def test_l2_compensated_path(self):
        x = np.ones(200_001)
        assert l2_norm(x) == pytest.approx(np.sqrt(200_001), rel=1e-15)

    def test_l2_zero(self):
        assert l2_norm(np.zeros(5)) == 0.0


class TestRegularizer:
    def test_hand_value(self):
        # x = (3, -4): ||x||_1 = 7, ||x||_2 = 5, so with gamma=0.5, alpha=0.5
        # r = 0.5*(7 - 2.5) + 0.5*25 = 2.25 + 12.5 = 14.75.
        x = np.array([3.0, -4.0])
        assert eval_regularizer(x, params(gamma=0.5, alpha=0.5)) == pytest.approx(14.75)

    def test_lasso_degeneration(self):
        x = rng_from(1).standard_normal(20)
        p = params(gamma=1.0, alpha=0.0)
        assert eval_regularizer(x, p) == pytest.approx(np.sum(np.abs(x)), rel=1e-14)

    def test_elastic_net_degeneration(self):
        x = rng_from(2).standard_normal(20)
        p = params(gamma=0.3, alpha=0.0)
        expected = 0.3 * np.sum(np.abs(x)) + 0.7 * np.dot(x, x)
        assert eval_regularizer(x, p) == pytest.approx(expected, rel=1e-14)

    def test_nonnegative_and_zero_at_origin(self):
        p = params()
        assert eval_regularizer(np.zeros(4), p) == 0.0
        rng = rng_from(3)
        for _ in range(100):
            x = 10.0 * rng.standard_normal(6)
            assert eval_regularizer(x, p) > 0.0

    def test_rejects_matrix_input(self):
        with pytest.raises(ValueError):
            eval_regularizer(np.eye(2), params())


class TestObjectiveAndSplit:
    def test_objective_hand_value(self):
        # A = I2, b = (1, 0), x = (1, 1): misfit 0.5, r = gamma*(2 - alpha*sqrt(2))
        # + (1-gamma)*2 at gamma=0.5, alpha=0.5 -> 0.5*(2 - 0.7071) + 1.
        prob = Problem(a=np.eye(2), b=np.array([1.0, 0.0]))
        p = params(gamma=0.5, alpha=0.5)
        expected = 0.5 + 0.5 * (2.0 - 0.5 * np.sqrt(2.0)) + 0.5 * 2.0
        assert eval_objective(np.ones(2), prob, p) == pytest.approx(expected, rel=1e-14)

    def test_dc_parts_reassemble_objective(self):
        rng = rng_from(4)
        a = rng.standard_normal((8, 12))
        prob = Problem(a=a, b=rng.standard_normal(8))
        p = params(lam=0.37)
        for _ in range(50):
            x = 3.0 * rng.standard_normal(12)
            g, h = eval_dc_parts(x, prob, p)
            assert g - h == pytest.approx(eval_objective(x, prob, p), rel=1e-12, abs=1e-12)

    def test_dc_parts_hand_value(self):
        # x = e1, A = I, b = 0, lam=1, gamma=0.5, alpha=0.5.  Data term
        # 0.5*||e1||^2 = 0.5, penalty part 0.5*1 + 1.5*0.5*1 = 1.25, so
        # g = 1.75; h = 0.25 + 0.25 = 0.5; g - h = 1.25 equals H directly.
        prob = Problem(a=np.eye(2), b=np.zeros(2))
        p = params(gamma=0.5, alpha=0.5)
        x = np.array([1.0, 0.0])
        g, h = eval_dc_parts(x, prob, p)
        assert g == pytest.approx(1.75, rel=1e-14)
        assert h == pytest.approx(0.5, rel=1e-14)
        assert g - h == pytest.approx(eval_objective(x, prob, p), rel=1e-14)

    def test_length_mismatch(self):
        prob = Problem(a=np.eye(2), b=np.zeros(2))
        with pytest.raises(ValueError):
            eval_objective(np.zeros(3), prob, params())


class TestConcaveGradient:
    def test_hand_value(self):
        # x = 2*e1, alpha=0.5, gamma=0.5: (0.5*0.5/2 + 0.5) * x = 0.625 * x.
        x = np.array([2.0, 0.0])
        grad = concave_gradient(x, params(gamma=0.5, alpha=0.5))
        np.testing.assert_allclose(grad, np.array([1.25, 0.0]), rtol=1e-14)

    def test_zero_iterate_raises(self):
        with pytest.raises(ZeroIterate):
            concave_gradient(np.zeros(3), params())

    def test_vanishes_in_lasso_limit(self):
        x = rng_from(5).standard_normal(6)
        grad = concave_gradient(x, params(gamma=1.0, alpha=0.0))
        np.testing.assert_allclose(grad, np.zeros(6), atol=0.0)

    def test_is_gradient_of_h(self):
        # Finite-difference check of h(x) = lam*(alpha*gamma*||x|| + 0.5*(1-gamma)*||x||^2).
        rng = rng_from(6)
        prob = Problem(a=np.eye(5), b=np.zeros(5))
        p = params(lam=0.9)
        x = rng.standard_normal(5) + 2.0
        grad = p.lam * concave_gradient(x, p)
        eps = 1e-6
        for i in range(5):
            e = np.zeros(5)
            e[i] = eps
            hp = eval_dc_parts(x + e, prob, p)[1]
            hm = eval_dc_parts(x - e, prob, p)[1]
            assert grad[i] == pytest.approx((hp - hm) / (2 * eps), rel=1e-5, abs=1e-8)


class TestSpectralHelpers:
    def test_identity_gram(self):
        assert smallest_gram_eigenvalue(np.eye(6)) == pytest.approx(1.0, abs=1e-12)

    def test_wide_matrix_is_zero(self):
        assert smallest_gram_eigenvalue(np.ones((3, 9))) == 0.0

    def test_matches_numpy_eigvalsh(self):
        a = rng_from(7).standard_normal((30, 12))
        expected = float(np.linalg.eigvalsh(a.T @ a)[0])
        assert smallest_gram_eigenvalue(a) == pytest.approx(expected, rel=1e-10)

    def test_strong_convexity_modulus(self):
        prob = Problem(a=2.0 * np.eye(3), b=np.zeros(3))
        p = params(lam=0.5, gamma=0.6)
        # lambda_min(A^T A) = 4, plus 3*0.5*0.4 = 0.6.
        assert strong_convexity_modulus(prob, p) == pytest.approx(4.6, rel=1e-12)


class TestSolveReport:
    def test_to_dict_round_trips_through_json_types(self):
        rep = SolveReport(
            x=np.array([1.0, -2.0]),
            objective_trace=[3.0, 1.0],
            primal_residuals=[0.1],
            dual_residuals=[0.2],
            outer_iters=1,
            inner_iters_total=4,
            termination=Termination.Converged,
        )
        d = rep.to_dict()
        assert d["x"] == [1.0, -2.0]
        assert d["termination"] == "converged"
        assert d["outer_iters"] == 1 and d["inner_iters_total"] == 4
        assert all(isinstance(v, float) for v in d["objective_trace"])
