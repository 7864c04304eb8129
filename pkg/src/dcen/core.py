"""Shared domain types and objective/regularizer evaluation.

The regularizer implemented throughout this package is

    r_gamma(x) = gamma * (||x||_1 - alpha * ||x||_2) + (1 - gamma) * ||x||_2^2

with mixing weight ``gamma`` and difference strength ``alpha``, and the
least-squares objective

    H(x) = 0.5 * ||A x - b||_2^2 + lam * r_gamma(x).

H admits the difference-of-convex split H = g - h with

    g(x) = 0.5 * ||A x - b||_2^2 + lam * (gamma * ||x||_1
                                          + 1.5 * (1 - gamma) * ||x||_2^2)
    h(x) = lam * (alpha * gamma * ||x||_2 + 0.5 * (1 - gamma) * ||x||_2^2)

used by the DCA solver, which linearizes h at the current iterate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "DcenParams",
    "Problem",
    "SolveReport",
    "Termination",
    "ZeroIterate",
    "NumericalFailure",
    "eval_regularizer",
    "eval_objective",
    "eval_dc_parts",
    "concave_gradient",
    "strong_convexity_modulus",
    "smallest_gram_eigenvalue",
    "l2_norm",
]

# Above this size plain accumulation of squares can lose digits; switch to
# compensated summation.
_COMPENSATED_N = 100_000


class ZeroIterate(Exception):
    """Signals that the concave-part gradient was requested at x = 0.

    The gradient direction x / ||x||_2 is undefined there; callers must take
    the zero-iterate branch of the outer iteration instead.
    """


class NumericalFailure(RuntimeError):
    """Non-finite values or a failed factorization inside a solver.

    Carries the iteration index at which the failure was detected.
    """

    def __init__(self, message: str, iteration: int = -1):
        super().__init__(message)
        self.iteration = iteration


class Termination(Enum):
    Converged = "converged"
    MaxIterations = "max_iterations"


@dataclass(frozen=True)
class DcenParams:
    """Regularization and solver hyperparameters.

    Parameters
    ----------
    lam : float
        Regularization weight, > 0.
    gamma : float
        Mixing weight between the l1 - alpha*l2 difference and the squared
        l2 term, in (0, 1].  gamma = 1 drops the quadratic part entirely
        (the pure l1 - alpha*l2 / LASSO degenerations); the CLI restricts
        itself to the open interval.
    alpha : float
        Difference strength in [0, 1).
    rho : float
        ADMM penalty, > 0.
    eps_abs, eps_rel : float
        Absolute/relative feasibility tolerances of the ADMM stopping rule.
    eps_machine : float
        Floor in the relative-error denominator max(||x||, ||z||, eps_machine).
    dca_eps : float
        Outer stopping tolerance: ||x_{k+1} - x_k|| <= dca_eps * (1 + ||x_k||).
    max_outer : int
        Outer iteration cap K.
    max_inner : int, optional
        Inner ADMM iteration cap T.  None means 5 * n, resolved at solve time.
    """

    lam: float = 1e-3
    gamma: float = 0.8
    alpha: float = 0.7
    rho: float = 1.0
    eps_abs: float = 1e-6
    eps_rel: float = 1e-6
    eps_machine: float = 1e-6
    dca_eps: float = 1e-6
    max_outer: int = 50
    max_inner: int | None = None

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not 0 < self.gamma <= 1:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if not 0 <= self.alpha < 1:
            raise ValueError(f"alpha must be in [0, 1), got {self.alpha}")
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        for name in ("eps_abs", "eps_rel", "eps_machine", "dca_eps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_outer < 1:
            raise ValueError("max_outer must be >= 1")
        if self.max_inner is not None and self.max_inner < 1:
            raise ValueError("max_inner must be >= 1 (or None for 5n)")

    def resolve_max_inner(self, n: int) -> int:
        return 5 * n if self.max_inner is None else self.max_inner


@dataclass(frozen=True)
class Problem:
    """A sensing matrix, an observation, and optionally the ground truth.

    ``a`` is a dense m-by-n real matrix, ``b`` has length m, and ``truth``
    (when present, used only for metrics) has length n.
    """

    a: np.ndarray
    b: np.ndarray
    truth: np.ndarray | None = None

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.ndim != 2:
            raise ValueError(f"a must be a 2-d matrix, got ndim={a.ndim}")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"a must be at least 1x1, got {a.shape}")
        if b.ndim != 1 or b.shape[0] != a.shape[0]:
            raise ValueError(
                f"b must be a vector of length {a.shape[0]}, got shape {b.shape}"
            )
        if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
            raise ValueError("a and b must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.truth is not None:
            t = np.asarray(self.truth, dtype=float)
            if t.ndim != 1 or t.shape[0] != a.shape[1]:
                raise ValueError(
                    f"truth must be a vector of length {a.shape[1]}, "
                    f"got shape {t.shape}"
                )
            object.__setattr__(self, "truth", t)

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.a.shape[1]


@dataclass
class SolveReport:
    """Outcome of a solver run.

    ``objective_trace`` holds H at the initial point and after every outer
    iteration; ``primal_residuals``/``dual_residuals`` hold one entry per
    recorded inner (ADMM) iteration, concatenated across outer steps.
    """

    x: np.ndarray
    objective_trace: list[float] = field(default_factory=list)
    primal_residuals: list[float] = field(default_factory=list)
    dual_residuals: list[float] = field(default_factory=list)
    outer_iters: int = 0
    inner_iters_total: int = 0
    termination: Termination = Termination.MaxIterations

    def to_dict(self) -> dict:
        """JSON-ready representation (used by the CLI report files)."""
        return {
            "x": [float(v) for v in self.x],
            "objective_trace": [float(v) for v in self.objective_trace],
            "primal_residuals": [float(v) for v in self.primal_residuals],
            "dual_residuals": [float(v) for v in self.dual_residuals],
            "outer_iters": self.outer_iters,
            "inner_iters_total": self.inner_iters_total,
            "termination": self.termination.value,
        }


def l2_norm(x: np.ndarray) -> float:
    """Euclidean norm; compensated summation beyond ~1e5 entries."""
    x = np.asarray(x)
    if x.size > _COMPENSATED_N:
        return math.sqrt(math.fsum((x * x).ravel().tolist()))
    return float(np.linalg.norm(x))


def _check_finite_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got ndim={x.ndim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input vector must be finite")
    return x


def eval_regularizer(x, params: DcenParams) -> float:
    """Evaluate r_gamma(x) = gamma*(||x||_1 - alpha*||x||_2) + (1-gamma)*||x||_2^2.

    Nonnegative, and zero exactly at x = 0 (since alpha < 1 implies
    ||x||_1 - alpha*||x||_2 >= (1-alpha)*||x||_2 > 0 for x != 0).
    """
    x = _check_finite_vector(x)
    nrm2 = l2_norm(x)
    return float(
        params.gamma * (np.sum(np.abs(x)) - params.alpha * nrm2)
        + (1.0 - params.gamma) * nrm2 * nrm2
    )


def eval_objective(x, problem: Problem, params: DcenParams) -> float:
    """Evaluate H(x) = 0.5*||Ax - b||^2 + lam * r_gamma(x)."""
    x = _check_finite_vector(x)
    if x.shape[0] != problem.n:
        raise ValueError(f"x has length {x.shape[0]}, expected {problem.n}")
    resid = problem.a @ x - problem.b
    return float(0.5 * np.dot(resid, resid) + params.lam * eval_regularizer(x, params))


def eval_dc_parts(x, problem: Problem, params: DcenParams) -> tuple[float, float]:
    """Return (g(x), h(x)) of the convex split H = g - h.

    g(x) = 0.5*||Ax-b||^2 + lam*(gamma*||x||_1 + 1.5*(1-gamma)*||x||_2^2)
    h(x) = lam*(alpha*gamma*||x||_2 + 0.5*(1-gamma)*||x||_2^2)
    """
    x = _check_finite_vector(x)
    if x.shape[0] != problem.n:
        raise ValueError(f"x has length {x.shape[0]}, expected {problem.n}")
    resid = problem.a @ x - problem.b
    nrm2 = l2_norm(x)
    g = (
        0.5 * float(np.dot(resid, resid))
        + params.lam
        * (params.gamma * float(np.sum(np.abs(x)))
           + 1.5 * (1.0 - params.gamma) * nrm2 * nrm2)
    )
    h = params.lam * (
        params.alpha * params.gamma * nrm2 + 0.5 * (1.0 - params.gamma) * nrm2 * nrm2
    )
    return g, h


def concave_gradient(x, params: DcenParams) -> np.ndarray:
    """Gradient direction d(x) = (alpha*gamma/||x||_2 + 1 - gamma) * x.

    lam * d(x) is a subgradient of the concave part h at x.  Raises
    :class:`ZeroIterate` at x = 0, where the direction is undefined and the
    caller must branch.
    """
    x = _check_finite_vector(x)
    nrm2 = l2_norm(x)
    if nrm2 == 0.0:
        raise ZeroIterate("concave gradient undefined at x = 0")
    return (params.alpha * params.gamma / nrm2 + 1.0 - params.gamma) * x


def smallest_gram_eigenvalue(a: np.ndarray) -> float:
    """Smallest eigenvalue of A^T A.

    Exact zero for m < n (rank deficiency); dense symmetric
    eigen-decomposition up to n = 2048; 50 inverse-power iterations beyond.
    Only used in diagnostics and test assertions, never on a hot path.
    """
    a = np.asarray(a, dtype=float)
    m, n = a.shape
    if m < n:
        return 0.0
    gram = a.T @ a
    if n <= 2048:
        return float(np.linalg.eigvalsh(gram)[0])
    # Inverse power iteration on a slightly shifted Gram matrix.
    import scipy.linalg

    shift = 1e-12 * float(np.trace(gram)) / n
    lu, piv = scipy.linalg.lu_factor(gram + shift * np.eye(n))
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    for _ in range(50):
        v = scipy.linalg.lu_solve((lu, piv), v)
        v /= np.linalg.norm(v)
    lam = float(v @ gram @ v)
    return max(lam, 0.0)


def strong_convexity_modulus(problem: Problem, params: DcenParams) -> float:
    """Strong-convexity modulus mu_g = lambda_min(A^T A) + 3*lam*(1-gamma) of g."""
    return smallest_gram_eigenvalue(problem.a) + 3.0 * params.lam * (1.0 - params.gamma)
