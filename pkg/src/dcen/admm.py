"""Direct ADMM on the full DCEN objective.

One splitting, one loop: the x-update solves the ridge system
(A^T A + rho*I) x = A^T b + rho*(z_k - u_k), the z-update applies the DCEN
proximal operator at step lam/rho, and the scaled dual u accumulates the
feasibility gap.  With (alpha=0, gamma=1) this is exactly LASSO-ADMM; with
(alpha=0, gamma<1) Elastic-Net ADMM; with (gamma=1, alpha>0) the l1-minus-l2
scheme — the same loop doubles as the baseline engine for all three.

Stopping reuses the primal/dual residual tolerances of the DCA inner solver
(with unscaled dual y = rho*u), capped at max_outer sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DcenParams,
    NumericalFailure,
    Problem,
    SolveReport,
    Termination,
    eval_objective,
    l2_norm,
)
from .dca import InnerAdmmState, check_admm_stop
from .linalg import LinearSolveCache, admm_x_update
from .prox import prox_dcen

__all__ = ["AdmmState", "solve_admm"]


@dataclass
class AdmmState:
    """Primal/split/scaled-dual triple plus the current ridge right-hand side."""

    x_k: np.ndarray
    z_k: np.ndarray
    u_k: np.ndarray
    b_tilde: np.ndarray


def solve_admm(
    problem: Problem,
    params: DcenParams,
    x0: np.ndarray | None = None,
) -> SolveReport:
    """Run ADMM sweeps until the residual tolerances hold or max_outer is hit."""
    a, b = problem.a, problem.b
    n = problem.n
    rho, lam = params.rho, params.lam
    step = lam / rho

    if x0 is None:
        x0 = np.zeros(n)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (n,):
        raise ValueError(f"x0 must have shape ({n},), got {x0.shape}")
    if not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be finite")

    cache = LinearSolveCache.build(a, rho)
    atb = a.T @ b
    state = AdmmState(x_k=x0.copy(), z_k=x0.copy(), u_k=np.zeros(n), b_tilde=atb.copy())

    trace = [eval_objective(state.x_k, problem, params)]
    primal_norms: list[float] = []
    dual_norms: list[float] = []
    termination = Termination.MaxIterations
    sweeps = 0

    for k in range(params.max_outer):
        state.b_tilde = atb + rho * (state.z_k - state.u_k)
        x = admm_x_update(cache, a, rho, state.b_tilde)
        z_prev = state.z_k
        z, _ = prox_dcen(x + state.u_k, step, params)
        u = state.u_k + x - z
        state.x_k, state.z_k, state.u_k = x, z, u
        sweeps = k + 1

        r_vec = x - z
        s_vec = rho * (z - z_prev)
        primal_norms.append(l2_norm(r_vec))
        dual_norms.append(l2_norm(s_vec))
        trace.append(eval_objective(x, problem, params))
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(z)) and np.all(np.isfinite(u))):
            raise NumericalFailure(
                f"non-finite ADMM iterate at sweep {sweeps}", iteration=sweeps
            )
        residuals = InnerAdmmState(
            x_t=x, z_t=z, y_t=rho * u, eta=rho, r_vec_t=r_vec, s_vec_t=s_vec, t=sweeps
        )
        if check_admm_stop(residuals, params, n):
            termination = Termination.Converged
            break

    return SolveReport(
        x=state.x_k,
        objective_trace=np.asarray(trace),
        primal_residuals=np.asarray(primal_norms),
        dual_residuals=np.asarray(dual_norms),
        outer_iters=sweeps,
        inner_iters_total=sweeps,
        termination=termination,
    )
