"""Recovery-condition constants and bound inequalities.

Pure arithmetic on the quantities that govern when the DCEN program recovers
a sparse signal: the sandwich bounds on ||x||_1 - alpha*||x||_2, the RIP-based
exact-recovery factor a(s, gamma, alpha, p) and stability constant C_s, the
null-space-property ratio kappa(r), and the zero-stationarity certificate.
These feed the CLI condition report and the property-test suite; they never
gate solver execution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DcenParams, Problem, l2_norm, strong_convexity_modulus

__all__ = [
    "RecoveryConstants",
    "ConditionViolated",
    "harmonic_sum",
    "bound_l1_minus_al2",
    "decay_lower_bound",
    "regularizer_bounds",
    "a_factor",
    "rip_exact_recovery_check",
    "stability_constant",
    "nsp_kappa",
    "zero_not_stationary",
    "rip_delta_lower_bound",
    "condition_report",
]


class ConditionViolated(ValueError):
    """A constant was requested outside its guaranteed-positive regime."""


@dataclass(frozen=True)
class RecoveryConstants:
    """Bundle of the condition-report quantities for one configuration."""

    a_factor: float
    c_s: float | None
    kappa_r: float
    mu_g: float | None
    h_np: float
    big_m: float
    p_exp: float
    c_decay: float
    delta_3s: float
    delta_4s: float


def harmonic_sum(n: int, p: float) -> float:
    """Partial sum H_{n,p} = sum_{i=1..n} i^(-p)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if p < 0:
        raise ValueError(f"p must be >= 0, got {p}")
    i = np.arange(1, n + 1, dtype=float)
    return float(np.sum(i ** (-p)))


def _support_stats(x: np.ndarray):
    x = np.asarray(x, dtype=float)
    nz = np.abs(x[x != 0.0])
    if nz.size == 0:
        raise ValueError("x must be nonzero")
    return nz, int(nz.size), float(np.min(nz))


def bound_l1_minus_al2(x, alpha: float) -> tuple[float, float]:
    """Sandwich for ||x||_1 - alpha*||x||_2 on the support of x.

    lower = (s - alpha*sqrt(s))*x_min + (1-alpha)*(||x_S||_1 - s*x_min)
    upper = (sqrt(s) - alpha)*||x||_2

    with s the support size and x_min the smallest nonzero magnitude.  The
    lower bound is exact for flat vectors (all nonzeros of equal magnitude).
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    nz, s, x_min = _support_stats(x)
    l1 = float(np.sum(nz))
    lower = (s - alpha * np.sqrt(s)) * x_min + (1.0 - alpha) * (l1 - s * x_min)
    upper = (np.sqrt(s) - alpha) * l2_norm(np.asarray(x, dtype=float))
    return float(lower), float(upper)


def decay_lower_bound(s: int, x_min: float, alpha: float, c: float, p: float) -> float:
    """Tightened lower bound on ||x_S||_1 - alpha*||x_S||_2 under power decay.

    Valid whenever the sorted nonzero magnitudes satisfy
    |x_(i)| >= c * i^(-p) * x_min for i = 1..s with c >= 1:

        c * x_min * (alpha * s^(1/2-p) * (sqrt(s) - 1) + (1-alpha) * H_{s,p})

    With c = s^p this equals x_min*(alpha*(s - sqrt(s)) + (1-alpha)*s^p*H_{s,p})
    and dominates the flat bound (s - alpha*sqrt(s))*x_min.
    """
    if c < 1:
        raise ValueError(f"c must be >= 1, got {c}")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    h = harmonic_sum(s, p)
    return float(c * x_min * (alpha * s ** (0.5 - p) * (np.sqrt(s) - 1.0) + (1.0 - alpha) * h))


def regularizer_bounds(x, gamma: float, alpha: float, p: float) -> tuple[float, float]:
    """Sandwich for the full regularizer r_gamma under the c = s^p decay law.

    lower = gamma*(alpha*s - alpha*sqrt(s) + (1-alpha)*s^p*H_{s,p})*x_min
            + (1-gamma)*||x||_2^2
    upper = gamma*(sqrt(s) - alpha)*||x||_2 + (1-gamma)*||x||_2^2

    The lower bound requires |x_(i)| >= s^p * i^(-p) * x_min on the sorted
    support (callers are responsible for that hypothesis).
    """
    nz, s, x_min = _support_stats(x)
    nrm = l2_norm(np.asarray(x, dtype=float))
    h = harmonic_sum(s, p)
    lower = (
        gamma * (alpha * s - alpha * np.sqrt(s) + (1.0 - alpha) * s**p * h) * x_min
        + (1.0 - gamma) * nrm * nrm
    )
    upper = gamma * (np.sqrt(s) - alpha) * nrm + (1.0 - gamma) * nrm * nrm
    return float(lower), float(upper)


def a_factor(s: int, gamma: float, alpha: float, p: float, big_m: float) -> float:
    """Exact-recovery factor

    a(s,gamma,alpha,p) = ( gamma*(alpha*sqrt(3s) - alpha
                           + (1-alpha)*(3s)^p * H_{3s,p} / sqrt(3s))
                         / (gamma*sqrt(s) + gamma*alpha + 2*(1-gamma)*M) )^2

    Recovery statements require a > 1 together with the RIP inequality in
    :func:`rip_exact_recovery_check`.
    """
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    if not big_m > 0:
        raise ValueError(f"big_m must be positive, got {big_m}")
    three_s = 3 * s
    h = harmonic_sum(three_s, p)
    num = gamma * (
        alpha * np.sqrt(three_s) - alpha + (1.0 - alpha) * three_s**p * h / np.sqrt(three_s)
    )
    den = gamma * np.sqrt(s) + gamma * alpha + 2.0 * (1.0 - gamma) * big_m
    return float((num / den) ** 2)


def rip_exact_recovery_check(delta_3s: float, delta_4s: float, a: float) -> bool:
    """True iff a > 1 and delta_3s + a*delta_4s < a - 1."""
    for name, d in (("delta_3s", delta_3s), ("delta_4s", delta_4s)):
        if not 0 <= d < 1:
            raise ValueError(f"{name} must be in [0, 1), got {d}")
    return a > 1.0 and delta_3s + a * delta_4s < a - 1.0


def stability_constant(a: float, delta_3s: float, delta_4s: float) -> float:
    """Stable-recovery constant C_s = 2*sqrt(1+a) / (sqrt(a*(1-delta_4s)) - sqrt(1+delta_3s)).

    Raises :class:`ConditionViolated` when the denominator is not positive
    (equivalently, when the exact-recovery condition fails).
    """
    den = np.sqrt(a * (1.0 - delta_4s)) - np.sqrt(1.0 + delta_3s)
    if not den > 0:
        raise ConditionViolated(
            f"sqrt(a*(1-delta_4s)) - sqrt(1+delta_3s) = {den:.3g} is not positive"
        )
    return float(2.0 * np.sqrt(1.0 + a) / den)


def nsp_kappa(gamma: float, alpha: float, r: float) -> float:
    """Null-space-property ratio kappa(r) = gamma*(1-alpha) / (gamma*(1+alpha) + 2*(1-gamma)*r)."""
    if not 0 < gamma < 1 or not 0 < alpha < 1:
        raise ValueError("gamma and alpha must lie in (0, 1)")
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    return float(gamma * (1.0 - alpha) / (gamma * (1.0 + alpha) + 2.0 * (1.0 - gamma) * r))


def zero_not_stationary(problem: Problem, params: DcenParams) -> bool:
    """Certify that x = 0 is not a stationary point of the objective.

    True iff ||A^T b||_2 > lam*gamma*(sqrt(n) + alpha) strictly.
    """
    lhs = l2_norm(problem.a.T @ problem.b)
    rhs = params.lam * params.gamma * (np.sqrt(problem.n) + params.alpha)
    return bool(lhs > rhs)


def rip_delta_lower_bound(a: np.ndarray, s: int, n_supports: int = 1000, seed: int = 0) -> float:
    """Monte-Carlo LOWER BOUND on the RIP constant delta_s of a matrix.

    Samples ``n_supports`` random s-column submatrices and returns the worst
    spectral deviation of their Gram matrices from the identity.  Exact RIP
    computation is combinatorial; this only certifies delta_s >= returned
    value, never an upper bound.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[1]
    if not 1 <= s <= n:
        raise ValueError(f"s must be in [1, {n}], got {s}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    worst = 0.0
    for _ in range(n_supports):
        cols = rng.choice(n, size=s, replace=False)
        sub = a[:, cols]
        eigs = np.linalg.eigvalsh(sub.T @ sub)
        worst = max(worst, abs(float(eigs[0]) - 1.0), abs(float(eigs[-1]) - 1.0))
    return worst


def condition_report(
    s: int,
    gamma: float,
    alpha: float,
    p: float,
    big_m: float,
    delta_3s: float,
    delta_4s: float,
    r: float = 0.0,
    problem: Problem | None = None,
    params: DcenParams | None = None,
) -> dict:
    """Assemble the JSON-ready condition report the CLI prints.

    When a problem/params pair is supplied the report also includes the
    strong-convexity modulus mu_g and the zero-stationarity verdict.
    """
    a = a_factor(s, gamma, alpha, p, big_m)
    recoverable = rip_exact_recovery_check(delta_3s, delta_4s, a)
    try:
        c_s = stability_constant(a, delta_3s, delta_4s)
    except ConditionViolated:
        c_s = None
    report = {
        "a_factor": a,
        "rip_exact_recovery": recoverable,
        "stability_constant": c_s,
        "nsp_kappa": nsp_kappa(gamma, alpha, r),
        "harmonic_sum_3s": harmonic_sum(3 * s, p),
        "inputs": {
            "s": s,
            "gamma": gamma,
            "alpha": alpha,
            "p": p,
            "big_m": big_m,
            "delta_3s": delta_3s,
            "delta_4s": delta_4s,
            "r": r,
        },
    }
    if problem is not None and params is not None:
        report["mu_g"] = strong_convexity_modulus(problem, params)
        report["zero_not_stationary"] = zero_not_stationary(problem, params)
    return report
