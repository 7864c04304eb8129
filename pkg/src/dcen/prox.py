"""Closed-form proximal operator of the DCEN regularizer.

``prox_dcen(y, step)`` solves

    argmin_x  gamma*(||x||_1 - alpha*||x||_2) + (1-gamma)*||x||_2^2
              + 1/(2*step) * ||x - y||_2^2

exactly.  Completing the square in the two quadratic terms turns this into
an l1 - alpha*l2 proximal problem at a rescaled threshold/point

    lam_t = step*gamma / c,   y_t = y / c,   c = 1 + 2*step*(1-gamma),

which splits into four regimes of ||y_t||_inf (equivalently ||y||_inf, the
thresholds scale identically):

    interior      ||y_t||_inf >  lam_t           dilated soft threshold
    boundary tie  ||y_t||_inf == lam_t           1-sparse, magnitude alpha*lam_t
    one-sparse    (1-alpha)*lam_t < ||y_t||_inf < lam_t
    zero          ||y_t||_inf <= (1-alpha)*lam_t

In the tie regimes the minimizer is non-unique; this implementation always
places the mass on the smallest maximizing index so results are
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import DcenParams, l2_norm

__all__ = [
    "ProxTag",
    "ProxCase",
    "soft_threshold",
    "prox_dcen",
    "prox_objective",
    "prox_objective_gap",
]

# Relative tolerance used to resolve which side of a case boundary a point
# falls on; ties within this band take the boundary branch.
_BOUNDARY_RTOL = 1e-12


class ProxTag(Enum):
    Interior = "interior"
    BoundaryTie = "boundary_tie"
    OneSparse = "one_sparse"
    Zero = "zero"


@dataclass(frozen=True)
class ProxCase:
    """Which closed-form branch produced the prox output.

    ``chosen_index`` records the support index for the two 1-sparse branches
    (BoundaryTie / OneSparse) and is None otherwise.
    """

    tag: ProxTag
    chosen_index: int | None = None

    def __post_init__(self):
        onesparse = self.tag in (ProxTag.BoundaryTie, ProxTag.OneSparse)
        if onesparse != (self.chosen_index is not None):
            raise ValueError("chosen_index must be set exactly for the 1-sparse branches")


def soft_threshold(y: np.ndarray, kappa: float) -> np.ndarray:
    """Componentwise shrink sign(y) * max(|y| - kappa, 0)."""
    return np.sign(y) * np.maximum(np.abs(y) - kappa, 0.0)


def _validate(y, step: float) -> np.ndarray:
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise ValueError(f"y must be a 1-d vector, got ndim={y.ndim}")
    if not np.all(np.isfinite(y)):
        raise ValueError("y must be finite")
    return y


def prox_dcen(y, step: float, params: DcenParams) -> tuple[np.ndarray, ProxCase]:
    """Exact proximal point of step * r_gamma at y, with the branch taken.

    The output satisfies sign(x_i) * y_i >= 0 componentwise and
    supp(x) <= supp(y).
    """
    y = _validate(y, step)
    gamma, alpha = params.gamma, params.alpha

    c = 1.0 + 2.0 * step * (1.0 - gamma)
    lam_t = step * gamma / c
    y_t = y / c

    y_max = float(np.max(np.abs(y_t))) if y_t.size else 0.0

    if y_max > lam_t * (1.0 + _BOUNDARY_RTOL):
        shrunk = soft_threshold(y_t, lam_t)
        scale = (l2_norm(shrunk) + alpha * lam_t) / l2_norm(shrunk)
        return scale * shrunk, ProxCase(ProxTag.Interior)

    if y_max > lam_t * (1.0 - _BOUNDARY_RTOL):
        # ||y_t||_inf == lam_t up to rounding: mass alpha*lam_t on the first
        # maximizing index (any split over the tied indices is optimal).
        idx = int(np.argmax(np.abs(y_t) >= y_max * (1.0 - _BOUNDARY_RTOL)))
        x = np.zeros_like(y_t)
        x[idx] = np.sign(y_t[idx]) * alpha * lam_t
        return x, ProxCase(ProxTag.BoundaryTie, idx)

    if y_max > (1.0 - alpha) * lam_t * (1.0 + _BOUNDARY_RTOL):
        idx = int(np.argmax(np.abs(y_t) >= y_max * (1.0 - _BOUNDARY_RTOL)))
        x = np.zeros_like(y_t)
        x[idx] = np.sign(y_t[idx]) * (y_max + (alpha - 1.0) * lam_t)
        return x, ProxCase(ProxTag.OneSparse, idx)

    return np.zeros_like(y_t), ProxCase(ProxTag.Zero)


def prox_objective(x, y, step: float, params: DcenParams) -> float:
    """The function prox_dcen minimizes, evaluated at x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    nrm2 = l2_norm(x)
    diff = x - y
    return float(
        params.gamma * (np.sum(np.abs(x)) - params.alpha * nrm2)
        + (1.0 - params.gamma) * nrm2 * nrm2
        + np.dot(diff, diff) / (2.0 * step)
    )


def prox_objective_gap(
    x_star, x, y, step: float, params: DcenParams
) -> tuple[float, float]:
    """Gap f(x*) - f(x) of the prox objective and its certified upper bound.

    The bound is

        min( 0.5*(gamma*alpha/||x*||_2 - 1/step - (1-gamma)), 0 ) * ||x*-x||^2

    where gamma*alpha/0 is read as 0 when alpha = 0 and +inf when alpha > 0
    (making the coefficient 0 in the latter case).  For any x the gap never
    exceeds the bound when x* = prox_dcen(y, step).
    """
    x_star = np.asarray(x_star, dtype=float)
    x = np.asarray(x, dtype=float)
    gap = prox_objective(x_star, y, step, params) - prox_objective(x, y, step, params)

    nrm = l2_norm(x_star)
    if nrm > 0.0:
        coef = min(
            0.5 * (params.gamma * params.alpha / nrm - 1.0 / step - (1.0 - params.gamma)),
            0.0,
        )
    elif params.alpha == 0.0:
        coef = 0.5 * (-1.0 / step - (1.0 - params.gamma))
    else:
        coef = 0.0
    diff = x_star - x
    return gap, coef * float(np.dot(diff, diff))
