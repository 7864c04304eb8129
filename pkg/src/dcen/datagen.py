"""Seeded generators for every experimental input.

Determinism contract: each generator is a pure function of its arguments and
a 64-bit seed.  Randomness always flows through numpy's Philox counter-based
bit generator keyed by ``SeedSequence(seed)``; when one call produces several
random objects it spawns one child sequence per object, in the documented
order, so outputs are bit-identical across platforms and process counts.

Draw orders (fixed forever):
  * gen_dct_matrix      -- single stream: w = uniform(m)
  * gen_gaussian_matrix -- single stream: Z = normal(m, n), then g = normal(m)
  * gen_sparse_signal   -- single stream: support draw, then values
  * add_awgn            -- single stream: noise = normal(m)
  * gen_correlated_design -- children [block, rest, noise]; block draws
    Z = normal(n, 3) then g = normal(n)
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .admm import solve_admm
from .core import DcenParams, Problem
from .tv import Image2D

__all__ = [
    "RngSeed",
    "ValueDist",
    "SparseSignalSpec",
    "rng_from",
    "child_seeds",
    "gen_dct_matrix",
    "gen_gaussian_matrix",
    "gen_sparse_signal",
    "add_awgn",
    "shepp_logan",
    "radial_mask",
    "gen_correlated_design",
    "warm_start",
]

_BETA_TRUE_BLOCK = (3.0, 3.0, 3.0)
_DESIGN_ROWS = 20
_DESIGN_COLS = 100
_DESIGN_RHO = 0.99
_DESIGN_NOISE_STD = 1.2

# Ten-ellipse phantom table (intensity, semi-x, semi-y, x0, y0, angle in deg),
# contrast-adjusted variant whose interior values stay inside [0, 1].
_PHANTOM_ELLIPSES = (
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0),
    (-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0),
    (-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0),
    (0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0),
    (0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0),
    (0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0),
    (0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0),
    (0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0),
    (0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0),
)


@dataclass(frozen=True)
class RngSeed:
    """64-bit unsigned seed."""

    seed: int

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in uint64, got {self.seed}")


class ValueDist(Enum):
    STANDARD_NORMAL = "standard_normal"
    RADEMACHER_SCALED = "rademacher_scaled"


@dataclass(frozen=True)
class SparseSignalSpec:
    """Sparse-vector recipe: length, sparsity, support separation, amplitudes."""

    n: int
    s: int
    min_sep: int = 1
    value_dist: ValueDist = ValueDist.STANDARD_NORMAL

    def __post_init__(self):
        if self.s < 1:
            raise ValueError(f"s must be >= 1, got {self.s}")
        if self.min_sep < 1:
            raise ValueError(f"min_sep must be >= 1, got {self.min_sep}")
        if self.s * self.min_sep > self.n:
            raise ValueError(
                f"infeasible placement: s*min_sep = {self.s * self.min_sep} > n = {self.n}"
            )


def _as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, RngSeed):
        return np.random.SeedSequence(seed.seed)
    return np.random.SeedSequence(seed)


def rng_from(seed) -> np.random.Generator:
    """Philox generator keyed by an int, RngSeed, entropy tuple, or SeedSequence."""
    return np.random.Generator(np.random.Philox(_as_seed_sequence(seed)))


def child_seeds(seed, k: int) -> list[np.random.SeedSequence]:
    return _as_seed_sequence(seed).spawn(k)


def gen_dct_matrix(m: int, n: int, f_factor: float, seed) -> np.ndarray:
    """Oversampled cosine sensing matrix A[i, j] = cos(2*pi*w_i*(j+1)/F)/sqrt(m).

    w is drawn uniformly on [0, 1]^m once per matrix; larger F packs the
    column phases closer together and raises mutual coherence.
    """
    if m < 1 or n < 1:
        raise ValueError(f"need m, n >= 1, got {m}, {n}")
    if f_factor <= 0:
        raise ValueError(f"f_factor must be positive, got {f_factor}")
    w = rng_from(seed).random(m)
    j = np.arange(1, n + 1, dtype=float)
    return np.cos(2.0 * np.pi * np.outer(w, j) / f_factor) / np.sqrt(m)


def gen_gaussian_matrix(m: int, n: int, r: float, seed) -> np.ndarray:
    """Rows i.i.d. N(0, (1-r)*I + r*ones), sampled exactly.

    Uses the factor x = sqrt(1-r)*z + sqrt(r)*g*ones (g scalar per row), whose
    covariance is (1-r)*I + r*ones by construction.
    """
    if not 0 < r < 1:
        raise ValueError(f"r must be in (0, 1), got {r}")
    rng = rng_from(seed)
    z = rng.standard_normal((m, n))
    g = rng.standard_normal(m)
    return np.sqrt(1.0 - r) * z + np.sqrt(r) * g[:, None]


def gen_sparse_signal(spec: SparseSignalSpec, seed) -> np.ndarray:
    """Exactly s nonzeros with pairwise index gaps >= min_sep.

    Support is uniform over all feasible supports: sorted draws t_1 < ... < t_s
    from {0, ..., n - (s-1)*(min_sep-1) - 1} map bijectively to separated
    supports via index_i = t_i + i*(min_sep - 1).
    """
    rng = rng_from(seed)
    n, s, sep = spec.n, spec.s, spec.min_sep
    compressed = n - (s - 1) * (sep - 1)
    t = np.sort(rng.choice(compressed, size=s, replace=False))
    support = t + np.arange(s) * (sep - 1)
    if spec.value_dist is ValueDist.STANDARD_NORMAL:
        values = rng.standard_normal(s)
    else:
        signs = rng.choice([-1.0, 1.0], size=s)
        values = signs * 10.0 ** rng.random(s)
    x = np.zeros(n)
    x[support] = values
    return x


def add_awgn(b: np.ndarray, snr_db: float, seed) -> np.ndarray:
    """Add white Gaussian noise at the requested SNR relative to measured power."""
    b = np.asarray(b, dtype=float)
    power = float(np.sum(b * b)) / b.size
    if power == 0.0:
        raise ValueError("b must be nonzero: SNR is undefined for a zero signal")
    sigma = np.sqrt(power * 10.0 ** (-snr_db / 10.0))
    return b + sigma * rng_from(seed).standard_normal(b.size)


def shepp_logan(n_side: int) -> Image2D:
    """Head phantom rasterized on [-1, 1]^2 by additive ellipse superposition.

    Pixel centers sit on an inclusive linspace(-1, 1, n_side) grid; row 0 is
    the top of the image (y = +1).
    """
    if n_side < 16:
        raise ValueError(f"n_side must be >= 16, got {n_side}")
    coords = np.linspace(-1.0, 1.0, n_side)
    x = coords[None, :]
    y = coords[::-1, None]
    img = np.zeros((n_side, n_side))
    for amp, a, b, x0, y0, phi_deg in _PHANTOM_ELLIPSES:
        phi = np.deg2rad(phi_deg)
        dx, dy = x - x0, y - y0
        xr = dx * np.cos(phi) + dy * np.sin(phi)
        yr = -dx * np.sin(phi) + dy * np.cos(phi)
        img += amp * ((xr / a) ** 2 + (yr / b) ** 2 <= 1.0)
    return Image2D.from_array(img)


def radial_mask(n_side: int, n_lines: int) -> np.ndarray:
    """Union of n_lines rasterized diameters through the DC bin.

    Line angles are theta_l = l*pi/n_lines; each diameter walks integer radii
    r in [-n_side/2, n_side/2], rounding (r*sin, r*cos) to the nearest bin,
    taken modulo n_side in unshifted DFT index space.  DC is always sampled.
    """
    if n_lines < 1:
        raise ValueError(f"n_lines must be >= 1, got {n_lines}")
    mask = np.zeros((n_side, n_side), dtype=bool)
    radii = np.arange(-(n_side // 2), n_side // 2 + 1)
    for line in range(n_lines):
        theta = line * np.pi / n_lines
        rows = np.rint(radii * np.sin(theta)).astype(int) % n_side
        cols = np.rint(radii * np.cos(theta)).astype(int) % n_side
        mask[rows, cols] = True
    mask[0, 0] = True
    return mask


def gen_correlated_design(seed) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Highly correlated regression testbed: 20 samples, 100 predictors.

    Predictors 1-3 are jointly normal with unit variances and pairwise
    correlation 0.99; predictors 4-100 are i.i.d. standard normal; the
    response is y = X @ beta_true + eps with beta_true = (3, 3, 3, 0, ..., 0)
    and eps ~ N(0, 1.2^2).
    """
    block_seed, rest_seed, noise_seed = child_seeds(seed, 3)
    n, p, rho = _DESIGN_ROWS, _DESIGN_COLS, _DESIGN_RHO

    rng = np.random.Generator(np.random.Philox(block_seed))
    z = rng.standard_normal((n, 3))
    g = rng.standard_normal(n)
    block = np.sqrt(1.0 - rho) * z + np.sqrt(rho) * g[:, None]

    rest = np.random.Generator(np.random.Philox(rest_seed)).standard_normal((n, p - 3))
    x = np.hstack([block, rest])

    beta_true = np.zeros(p)
    beta_true[:3] = _BETA_TRUE_BLOCK
    eps = np.random.Generator(np.random.Philox(noise_seed)).standard_normal(n)
    y = x @ beta_true + _DESIGN_NOISE_STD * eps
    return x, y, beta_true


def warm_start(problem: Problem, params: DcenParams) -> np.ndarray:
    """LASSO initialization: the (gamma=1, alpha=0) degeneration of the ADMM
    solver at the same lam and tolerances, budgeted at 5n sweeps."""
    lasso = replace(
        params,
        gamma=1.0,
        alpha=0.0,
        max_outer=params.resolve_max_inner(problem.n),
    )
    return solve_admm(problem, lasso).x
