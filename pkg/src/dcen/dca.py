"""DCA outer loop for the DCEN objective with an ADMM inner solver.

Each outer step linearizes the concave part of the objective at the current
iterate x_k (d_vec = lam * (alpha*gamma/||x_k|| + 1 - gamma) * x_k, or the zero
vector when x_k = 0) and minimizes the strongly convex surrogate

    (1/2)||Ax - b||^2 + lam*gamma*||x||_1 + (3*lam*(1-gamma)/2)*||x||^2
        - <x, d_vec>

by ADMM on the x/z splitting.  The x-update solves (A^T A + eta*I) x = R_t
with eta = 3*lam*(1-gamma) + rho through a cached factorization; the z-update
is plain soft thresholding at lam*gamma/rho.

Outer stop: ||x_{k+1} - x_k|| <= dca_eps * (1 + ||x_k||), capped at max_outer.
Inner stop: primal/dual residual tolerances plus a relative x-z gap, all three
at once, capped at max_inner (5n when unset).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    DcenParams,
    NumericalFailure,
    Problem,
    SolveReport,
    Termination,
    ZeroIterate,
    concave_gradient,
    eval_objective,
    l2_norm,
)
from .linalg import LinearSolveCache
from .prox import soft_threshold

__all__ = [
    "DcaState",
    "InnerAdmmState",
    "solve_dca",
    "solve_subproblem_admm",
    "check_admm_stop",
]

_BALANCE_FACTOR = 2.0
_BALANCE_RATIO = 10.0


@dataclass(frozen=True)
class DcaState:
    """Outer iterate x_k together with its linearization vector."""

    x_k: np.ndarray
    d_vec: np.ndarray
    k: int


@dataclass
class InnerAdmmState:
    """Mutable ADMM splitting state, carried across outer iterations."""

    x_t: np.ndarray
    z_t: np.ndarray
    y_t: np.ndarray
    eta: float
    r_vec_t: np.ndarray
    s_vec_t: np.ndarray
    t: int = 0
    primal_norms: list = field(default_factory=list)
    dual_norms: list = field(default_factory=list)

    @classmethod
    def cold(cls, n: int, eta: float) -> "InnerAdmmState":
        z = np.zeros(n)
        return cls(x_t=z.copy(), z_t=z.copy(), y_t=z.copy(), eta=eta,
                   r_vec_t=z.copy(), s_vec_t=z.copy())

    def is_finite(self) -> bool:
        return bool(
            np.all(np.isfinite(self.x_t))
            and np.all(np.isfinite(self.z_t))
            and np.all(np.isfinite(self.y_t))
        )


def check_admm_stop(state: InnerAdmmState, params: DcenParams, n: int) -> bool:
    """All three stopping conditions of the inner/direct ADMM loops.

    ||r|| <= sqrt(n)*eps_abs + eps_rel*max(||x||, ||z||)   (non-strict)
    ||s|| <= sqrt(n)*eps_abs + eps_rel*||y||               (non-strict)
    ||x - z|| / max(||x||, ||z||, eps_machine) < eps_rel   (strict)
    """
    rn = l2_norm(state.r_vec_t)
    sn = l2_norm(state.s_vec_t)
    xn = l2_norm(state.x_t)
    zn = l2_norm(state.z_t)
    yn = l2_norm(state.y_t)
    root_n = np.sqrt(n)
    if rn > root_n * params.eps_abs + params.eps_rel * max(xn, zn):
        return False
    if sn > root_n * params.eps_abs + params.eps_rel * yn:
        return False
    relerr = rn / max(xn, zn, params.eps_machine)
    return relerr < params.eps_rel


def solve_subproblem_admm(
    problem: Problem,
    params: DcenParams,
    d_vec: np.ndarray,
    warm: InnerAdmmState | None,
    cache: LinearSolveCache | None = None,
    atb: np.ndarray | None = None,
    adaptive_rho: bool = False,
) -> tuple[np.ndarray, InnerAdmmState]:
    """Minimize the linearized convex surrogate by ADMM.

    ``warm`` carries z/y from the previous outer iteration (pass None to start
    cold; a non-finite warm state is silently reset).  ``cache`` and ``atb``
    let the outer loop amortize the factorization and A^T b across calls.
    ``d_vec`` must already include the lam factor (zero for the x_k = 0 branch).
    """
    a, b = problem.a, problem.b
    n = problem.n
    lam, gamma = params.lam, params.gamma
    rho = params.rho
    eta = 3.0 * lam * (1.0 - gamma) + rho

    if warm is None or not warm.is_finite():
        state = InnerAdmmState.cold(n, eta)
    else:
        state = warm
        state.eta = eta
    if cache is None:
        cache = LinearSolveCache.build(a, eta)
    if atb is None:
        atb = a.T @ b

    x = state.x_t
    max_inner = params.resolve_max_inner(n)
    for _ in range(max_inner):
        rhs = atb + d_vec - state.y_t + rho * state.z_t
        x = cache.solve(a, eta, rhs)
        z_prev = state.z_t
        z = soft_threshold(x + state.y_t / rho, lam * gamma / rho)
        y = state.y_t + rho * (x - z)
        state.x_t, state.z_t, state.y_t = x, z, y
        state.r_vec_t = x - z
        state.s_vec_t = rho * (z - z_prev)
        state.t += 1
        state.primal_norms.append(l2_norm(state.r_vec_t))
        state.dual_norms.append(l2_norm(state.s_vec_t))
        if not state.is_finite():
            raise NumericalFailure(
                f"non-finite ADMM iterate at inner step {state.t}", iteration=state.t
            )
        if check_admm_stop(state, params, n):
            break
        if adaptive_rho:
            rho, eta = _balance_rho(state, rho, lam, gamma)
    return x, state


def _balance_rho(state: InnerAdmmState, rho: float, lam: float, gamma: float):
    """Residual-balancing rho update (off by default; doubles/halves rho)."""
    rn, sn = state.primal_norms[-1], state.dual_norms[-1]
    if rn > _BALANCE_RATIO * sn:
        rho *= _BALANCE_FACTOR
    elif sn > _BALANCE_RATIO * rn:
        rho /= _BALANCE_FACTOR
    eta = 3.0 * lam * (1.0 - gamma) + rho
    state.eta = eta
    return rho, eta


def solve_dca(
    problem: Problem,
    params: DcenParams,
    x0: np.ndarray | None = None,
    adaptive_rho: bool = False,
) -> SolveReport:
    """Run the full DCA outer loop from x0 (zeros when omitted)."""
    n = problem.n
    if x0 is None:
        x0 = np.zeros(n)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (n,):
        raise ValueError(f"x0 must have shape ({n},), got {x0.shape}")
    if not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be finite")

    lam = params.lam
    eta = 3.0 * lam * (1.0 - params.gamma) + params.rho
    cache = LinearSolveCache.build(problem.a, eta)
    atb = problem.a.T @ problem.b

    state = DcaState(x_k=x0, d_vec=np.zeros(n), k=0)
    inner: InnerAdmmState | None = None
    trace = [eval_objective(state.x_k, problem, params)]
    termination = Termination.MaxIterations

    for k in range(params.max_outer):
        try:
            d_vec = lam * concave_gradient(state.x_k, params)
        except ZeroIterate:
            d_vec = np.zeros(n)
        x_next, inner = solve_subproblem_admm(
            problem, params, d_vec, inner,
            cache=cache, atb=atb, adaptive_rho=adaptive_rho,
        )
        if not np.all(np.isfinite(x_next)):
            raise NumericalFailure(
                f"non-finite outer iterate at step {k + 1}", iteration=k + 1
            )
        trace.append(eval_objective(x_next, problem, params))
        step = l2_norm(x_next - state.x_k)
        converged = step <= params.dca_eps * (1.0 + l2_norm(state.x_k))
        state = DcaState(x_k=x_next, d_vec=d_vec, k=k + 1)
        if converged:
            termination = Termination.Converged
            break

    return SolveReport(
        x=state.x_k,
        objective_trace=np.asarray(trace),
        primal_residuals=np.asarray(inner.primal_norms if inner else []),
        dual_residuals=np.asarray(inner.dual_norms if inner else []),
        outer_iters=state.k,
        inner_iters_total=inner.t if inner else 0,
        termination=termination,
    )
