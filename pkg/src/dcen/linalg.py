"""Cached solvers for the regularized normal equations (A^T A + eta*I) x = r.

Both ADMM loops spend essentially all of their time in this solve, with A and
eta fixed across iterations, so the factorization is computed once and reused:

* ``CholeskyGram``     -- factor A^T A + eta*I directly (n modest, n <= m);
* ``SmwFactor``        -- factor the m-by-m matrix I + eta^{-1} A A^T and apply
                          x = eta^{-1} r - eta^{-2} A^T (I + eta^{-1} A A^T)^{-1} A r,
                          the cheap route when m < n;
* ``ConjugateGradient``-- matrix-free CG with warm start for large instances.

A cache is bound to the exact (A, eta) pair it was built for.  Passing a
different matrix raises :class:`StaleCacheError`; passing a different eta
transparently refactors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.sparse.linalg import LinearOperator, cg

__all__ = [
    "SolveMode",
    "StaleCacheError",
    "LinearSolveCache",
    "smw_apply",
    "admm_x_update",
]

_CHOLESKY_THRESHOLD = 1500
_CG_RTOL = 1e-12


class SolveMode(Enum):
    CHOLESKY_GRAM = "cholesky_gram"
    SMW_FACTOR = "smw_factor"
    CONJUGATE_GRADIENT = "conjugate_gradient"


class StaleCacheError(RuntimeError):
    """The cache was applied to a matrix other than the one it was built for."""


def _pick_mode(m: int, n: int, threshold: int) -> SolveMode:
    if n <= threshold and n <= m:
        return SolveMode.CHOLESKY_GRAM
    if m < n:
        return SolveMode.SMW_FACTOR
    return SolveMode.CONJUGATE_GRADIENT


@dataclass
class LinearSolveCache:
    """Factorization handle for (A^T A + eta*I) solves at fixed (A, eta)."""

    mode: SolveMode
    eta: float
    threshold: int = _CHOLESKY_THRESHOLD
    _a: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]
    _factor: Any = field(repr=False, default=None)
    _warm: np.ndarray | None = field(repr=False, default=None)

    @classmethod
    def build(
        cls,
        a: np.ndarray,
        eta: float,
        mode: SolveMode | None = None,
        threshold: int = _CHOLESKY_THRESHOLD,
    ) -> "LinearSolveCache":
        if eta <= 0:
            raise ValueError(f"eta must be positive, got {eta}")
        m, n = a.shape
        if mode is None:
            mode = _pick_mode(m, n, threshold)
        cache = cls(mode=mode, eta=float(eta), threshold=threshold, _a=a)
        cache._refactor()
        return cache

    def _refactor(self) -> None:
        a, eta = self._a, self.eta
        if self.mode is SolveMode.CHOLESKY_GRAM:
            gram = a.T @ a
            gram[np.diag_indices_from(gram)] += eta
            self._factor = cho_factor(gram, lower=True)
        elif self.mode is SolveMode.SMW_FACTOR:
            m = a.shape[0]
            small = np.eye(m) + (a @ a.T) / eta
            self._factor = cho_factor(small, lower=True)
        else:
            n = a.shape[1]
            self._factor = LinearOperator(
                (n, n), matvec=lambda v: a.T @ (a @ v) + eta * v, dtype=float
            )

    def _validate(self, a: np.ndarray, eta: float) -> None:
        if a is not self._a:
            raise StaleCacheError(
                "cache was built for a different matrix object; rebuild it"
            )
        if eta != self.eta:
            # Same matrix, new shift: refactor in place rather than erroring.
            self.eta = float(eta)
            self._refactor()

    def solve(self, a: np.ndarray, eta: float, rhs: np.ndarray) -> np.ndarray:
        """Return x with (A^T A + eta*I) x = rhs to ~1e-10 relative residual."""
        self._validate(a, eta)
        if self.mode is SolveMode.CHOLESKY_GRAM:
            return cho_solve(self._factor, rhs)
        if self.mode is SolveMode.SMW_FACTOR:
            correction = a.T @ cho_solve(self._factor, a @ rhs)
            return rhs / eta - correction / (eta * eta)
        x0 = self._warm if self._warm is not None and self._warm.shape == rhs.shape else None
        x, info = _cg_compat(self._factor, rhs, x0)
        if info != 0:
            raise RuntimeError(f"conjugate gradient failed to converge (info={info})")
        self._warm = x
        return x


def _cg_compat(op: LinearOperator, rhs: np.ndarray, x0: np.ndarray | None):
    try:
        return cg(op, rhs, x0=x0, rtol=_CG_RTOL, atol=0.0, maxiter=20 * rhs.size)
    except TypeError:  # older scipy spells the relative tolerance "tol"
        return cg(op, rhs, x0=x0, tol=_CG_RTOL, atol=0.0, maxiter=20 * rhs.size)


def smw_apply(
    cache: LinearSolveCache, a: np.ndarray, eta: float, rhs: np.ndarray
) -> np.ndarray:
    """Apply (A^T A + eta*I)^{-1} via the Sherman-Morrison-Woodbury identity.

    Requires a cache built in ``SmwFactor`` mode for this exact (a, eta).
    """
    if cache.mode is not SolveMode.SMW_FACTOR:
        raise StaleCacheError(f"smw_apply needs an SmwFactor cache, got {cache.mode}")
    return cache.solve(a, eta, rhs)


def admm_x_update(
    cache: LinearSolveCache, a: np.ndarray, rho: float, b_tilde: np.ndarray
) -> np.ndarray:
    """x-update of the direct ADMM loop: solve (A^T A + rho*I) x = b_tilde."""
    return cache.solve(a, rho, b_tilde)
