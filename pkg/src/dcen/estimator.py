"""Scikit-learn-style estimator wrapper around the DCEN solvers.

``DcenRegressor`` follows the usual conventions — parameters stored verbatim
in ``__init__``, validation deferred to ``fit``, fitted state in trailing-
underscore attributes, ``get_params``/``set_params`` driven by the constructor
signature — so it composes with ``sklearn.base.clone`` and grid-search
utilities without this package depending on scikit-learn.
"""

from __future__ import annotations

import inspect

import numpy as np

from .admm import solve_admm
from .core import DcenParams, Problem
from .dca import solve_dca
from .validation import check_array, check_consistent_length, check_is_fitted, check_vector

__all__ = ["DcenRegressor"]


class DcenRegressor:
    """Sparse linear regression with the DCEN penalty.

    Minimizes (1/2)*||X w - y||^2 + lam*(gamma*(||w||_1 - alpha*||w||_2)
    + (1-gamma)*||w||_2^2) with no intercept.  ``method`` picks the solver:
    "dca" (outer linearization with an ADMM subproblem) or "admm" (direct
    splitting).  ``warm_start=True`` initializes from the LASSO solution
    obtained by the same ADMM engine at (gamma=1, alpha=0) — the standard
    protocol for avoiding poor stationary points — and is a per-fit
    initialization strategy, not the incremental-refit semantics the flag has
    in scikit-learn.

    Attributes after fit: ``coef_`` (weights), ``report_`` (solver trace),
    ``n_iter_`` (outer iterations), ``n_features_in_``.
    """

    def __init__(
        self,
        lam: float = 1e-3,
        gamma: float = 0.8,
        alpha: float = 0.7,
        rho: float = 1.0,
        method: str = "dca",
        warm_start: bool = False,
        eps_abs: float = 1e-6,
        eps_rel: float = 1e-6,
        dca_eps: float = 1e-6,
        max_outer: int = 50,
        max_inner: int | None = None,
    ):
        self.lam = lam
        self.gamma = gamma
        self.alpha = alpha
        self.rho = rho
        self.method = method
        self.warm_start = warm_start
        self.eps_abs = eps_abs
        self.eps_rel = eps_rel
        self.dca_eps = dca_eps
        self.max_outer = max_outer
        self.max_inner = max_inner

    def _solver_params(self) -> DcenParams:
        return DcenParams(
            lam=self.lam,
            gamma=self.gamma,
            alpha=self.alpha,
            rho=self.rho,
            eps_abs=self.eps_abs,
            eps_rel=self.eps_rel,
            dca_eps=self.dca_eps,
            max_outer=self.max_outer,
            max_inner=self.max_inner,
        )

    def fit(self, X, y) -> "DcenRegressor":
        X = check_array(X)
        y = check_vector(y)
        check_consistent_length(X, y)
        if self.method not in ("dca", "admm"):
            raise ValueError(f"method must be 'dca' or 'admm', got {self.method!r}")
        params = self._solver_params()
        problem = Problem(a=X, b=y)

        x0 = None
        if self.warm_start:
            from .datagen import warm_start as lasso_start

            x0 = lasso_start(problem, params)
        if self.method == "dca":
            report = solve_dca(problem, params, x0)
        else:
            report = solve_admm(problem, params, x0)

        self.coef_ = report.x
        self.report_ = report
        self.n_iter_ = report.outer_iters
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self)
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return X @ self.coef_

    def score(self, X, y) -> float:
        """Coefficient of determination R^2, matching the sklearn convention."""
        y = check_vector(y)
        pred = self.predict(X)
        ss_res = float(np.sum((y - pred) ** 2))
        ss_tot = float(np.sum((y - np.mean(y)) ** 2))
        if ss_tot == 0.0:
            return 1.0 if ss_res == 0.0 else 0.0
        return 1.0 - ss_res / ss_tot

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [p for p in sig.parameters if p != "self"]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "DcenRegressor":
        valid = set(self._param_names())
        for key, value in params.items():
            if key not in valid:
                raise ValueError(
                    f"invalid parameter {key!r} for DcenRegressor; "
                    f"valid parameters: {sorted(valid)}"
                )
            setattr(self, key, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={getattr(self, k)!r}" for k in self._param_names())
        return f"DcenRegressor({args})"
