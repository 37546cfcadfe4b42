"""Monte Carlo sampling of Bessel-type paths on the unit interval.

Paths are advanced on the squared radius X = R^2, which solves the
squared-Bessel equation with dimension delta = 2 (nu + 1).  Over a step of
length h the transition is sampled exactly through the Poisson-Gamma
mixture

    X' = 2 h * Gamma(nu + 1 + K),    K ~ Poisson(X / (2 h)),

so the discretisation touches the dynamics only through the boundary
handling:

* killing at 0 (negative index mu) is exact as well: with c = X / (2 h)
  and a = |mu| the one-step survival probability of the absorbed process
  is the regularised incomplete gamma P(a, c), and conditional on survival
  the mixture index K has weights exp(-c) c^(a+k) / Gamma(a+k+1) and the
  endpoint is Gamma(K + 1) scaled by 2 h.  One uniform per path decides
  death and, reused, inverts the mixture.  For c >= 40 the kill
  probability is below 1e-16 and the plain reflecting step is used;
* absorption at 1 kills a path when the step endpoint lands at or beyond
  1, and otherwise with the Brownian bridge crossing probability
  exp(-2 (1-r0)(1-r1) / h), which removes the O(sqrt(h)) boundary bias of
  endpoint-only checks.

Randomness comes from counter-based Philox streams: block b of paths uses
``Philox(key=seed, counter=b * 2**128)``, so results are reproducible bit
for bit for a given configuration regardless of how blocks are scheduled
over threads.

Histograms are reported as densities with respect to the speed measure
m(dy) = y^(2 nu + 1) dy, the normalisation in which the analytic kernels
of :mod:`bessel_heat.kernels` are expressed.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

from .errors import ConfigurationError, DomainError

_KILL_EXACT_CUTOFF = 40.0
_DEFAULT_BLOCK = 8192


@dataclass(frozen=True)
class PathEnsembleConfig:
    """Configuration of one simulation ensemble.

    Attributes
    ----------
    nu : float
        Index of the process, -1 < nu <= 30.  Killing at 0 requires
        nu < 0 (for nu >= 0 the origin is never reached).
    start_x : float
        Starting radius, nonnegative; must be below 1 when paths are
        absorbed at 1 and positive when they are killed at 0.
    horizon_t : float
        Time at which the ensemble is sampled.
    step_h : float
        Step size; ``horizon_t / step_h`` must be an integer within 1e-9.
    paths : int
        Number of paths.
    boundary_at_zero : str
        "reflect" (default dynamics for nu > -1) or "kill" (nu < 0 only).
    boundary_at_one : str
        "absorb" or "none" (free evolution on the half line).
    seed : int
        Base key of the Philox streams.
    """

    nu: float
    start_x: float
    horizon_t: float
    step_h: float
    paths: int
    boundary_at_zero: str = "reflect"
    boundary_at_one: str = "absorb"
    seed: int = 0

    def __post_init__(self) -> None:
        if not math.isfinite(self.nu) or not (-1.0 < self.nu <= 30.0):
            raise ConfigurationError(f"nu must lie in (-1, 30], got {self.nu!r}")
        if self.boundary_at_zero not in ("reflect", "kill"):
            raise ConfigurationError(
                f"boundary_at_zero must be 'reflect' or 'kill', "
                f"got {self.boundary_at_zero!r}"
            )
        if self.boundary_at_one not in ("absorb", "none"):
            raise ConfigurationError(
                f"boundary_at_one must be 'absorb' or 'none', "
                f"got {self.boundary_at_one!r}"
            )
        if self.boundary_at_zero == "kill" and self.nu >= 0.0:
            raise ConfigurationError(
                "killing at 0 requires a negative index; paths with nu >= 0 "
                "never reach the origin"
            )
        if not math.isfinite(self.start_x) or self.start_x < 0.0:
            raise ConfigurationError(f"start_x must be >= 0, got {self.start_x!r}")
        if self.boundary_at_zero == "kill" and self.start_x == 0.0:
            raise ConfigurationError("killed-at-0 paths cannot start at 0")
        if self.boundary_at_one == "absorb" and self.start_x >= 1.0:
            raise ConfigurationError(
                f"absorbing runs need start_x < 1, got {self.start_x!r}"
            )
        if not (math.isfinite(self.horizon_t) and self.horizon_t > 0.0):
            raise ConfigurationError(f"horizon_t must be > 0, got {self.horizon_t!r}")
        if not (math.isfinite(self.step_h) and 0.0 < self.step_h <= self.horizon_t):
            raise ConfigurationError(
                f"step_h must lie in (0, horizon_t], got {self.step_h!r}"
            )
        ratio = self.horizon_t / self.step_h
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ConfigurationError(
                f"horizon_t / step_h = {ratio!r} is not an integer"
            )
        if int(self.paths) != self.paths or self.paths < 1:
            raise ConfigurationError("paths must be a positive integer")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigurationError("seed must be a nonnegative integer")

    @property
    def steps(self) -> int:
        return int(round(self.horizon_t / self.step_h))


@dataclass(frozen=True)
class HistogramDensity:
    """Histogram estimate of a transition density w.r.t. the speed measure.

    ``estimates[i]`` is (count_i / paths_total) / bin_speed_mass[i], the
    natural estimator of the (sub-)probability density in the bin, and
    ``std_errors`` the matching binomial standard errors.  Killed and
    overflowing paths are accounted separately so that estimates, kill
    fractions and overflow add up to 1 in probability.
    """

    nu: float
    bin_edges: np.ndarray
    estimates: np.ndarray
    std_errors: np.ndarray
    bin_speed_mass: np.ndarray
    survivors: int
    paths_total: int
    killed_at_zero: int
    killed_at_one: int
    overflow: int


@dataclass(frozen=True)
class HistogramComparison:
    """Per-bin comparison of a histogram against an analytic density."""

    reference: np.ndarray
    z_scores: np.ndarray
    max_abs_z: float


def _simulate_block(
    config: PathEnsembleConfig, block_index: int, block_paths: int, edges: np.ndarray
) -> tuple[np.ndarray, int, int, int, int]:
    """Run one path block on its own Philox stream; return bin counts."""
    rng = np.random.Generator(
        np.random.Philox(key=config.seed, counter=block_index << 128)
    )
    h = config.step_h
    two_h = 2.0 * h
    nu = config.nu
    kill0 = config.boundary_at_zero == "kill"
    absorb1 = config.boundary_at_one == "absorb"
    a = -nu  # order of the killed twin, used only when kill0

    x = np.full(block_paths, config.start_x * config.start_x, dtype=np.float64)
    alive = np.ones(block_paths, dtype=bool)
    dead_at_zero = 0
    dead_at_one = 0

    for _ in range(config.steps):
        c = x / two_h
        shape = np.ones(block_paths, dtype=np.float64)
        if kill0:
            u = rng.random(block_paths)
            exact = alive & (c < _KILL_EXACT_CUTOFF)
            plain = alive & ~exact
            if np.any(exact):
                idx = np.nonzero(exact)[0]
                ci = c[idx]
                ui = u[idx]
                survival = gammainc(a, ci)
                died = ui >= survival
                # Invert the mixture weights pi_k = exp(-c) c^(a+k) /
                # Gamma(a+k+1) at the same uniform (valid because death
                # was decided by u >= survival = sum of all pi_k).
                live_idx = idx[~died]
                if live_idx.size:
                    cl = ci[~died]
                    ul = ui[~died]
                    pi = np.exp(-cl + a * np.log(cl) - math.lgamma(a + 1.0))
                    cum = pi.copy()
                    kk = np.zeros(live_idx.size, dtype=np.int64)
                    pending = cum < ul
                    k = 0
                    while np.any(pending):
                        k += 1
                        if k > 500:
                            raise ConfigurationError(
                                "mixture inversion failed to terminate"
                            )
                        pi = pi * cl / (a + k)
                        cum = cum + pi
                        kk[pending] = k
                        pending = cum < ul
                    shape[live_idx] = kk + 1.0
                if np.any(died):
                    kill_idx = idx[died]
                    alive[kill_idx] = False
                    dead_at_zero += kill_idx.size
        else:
            plain = alive.copy()

        lam = np.where(plain, c, 0.0)
        k_plain = rng.poisson(lam)
        shape = np.where(plain, nu + 1.0 + k_plain, shape)
        x_new = two_h * rng.standard_gamma(shape)

        if absorb1:
            u_bridge = rng.random(block_paths)
            r0 = np.sqrt(np.where(alive, x, 0.25))
            r1 = np.sqrt(np.where(alive, x_new, 0.25))
            hit = alive & (r1 >= 1.0)
            crossed = (
                alive
                & ~hit
                & (u_bridge < np.exp(-2.0 * (1.0 - r0) * (1.0 - r1) / h))
            )
            gone = hit | crossed
            if np.any(gone):
                alive[gone] = False
                dead_at_one += int(np.count_nonzero(gone))

        x = np.where(alive, x_new, x)

    r = np.sqrt(x[alive])
    counts = np.zeros(edges.size - 1, dtype=np.int64)
    pos = np.searchsorted(edges, r, side="right") - 1
    inside = (pos >= 0) & (pos < counts.size) & (r < edges[-1])
    np.add.at(counts, pos[inside], 1)
    overflow = int(np.count_nonzero(~inside))
    return counts, int(np.count_nonzero(alive)), dead_at_zero, dead_at_one, overflow


def _bin_speed_mass(nu: float, edges: np.ndarray) -> np.ndarray:
    """Speed-measure mass of each bin, (y_hi^(2nu+2) - y_lo^(2nu+2))/(2nu+2)."""
    p = 2.0 * nu + 2.0
    return (edges[1:] ** p - edges[:-1] ** p) / p


def simulate_density(
    config: PathEnsembleConfig,
    bins=60,
    block_size: int = _DEFAULT_BLOCK,
    threads: int | None = None,
) -> HistogramDensity:
    """Sample the ensemble and histogram the surviving endpoints.

    Parameters
    ----------
    config : PathEnsembleConfig
        Process, boundaries, horizon and seed.
    bins : int or array_like, optional
        Number of equal-width bins, or explicit increasing bin edges.
        Integer bins span [0, 1] when paths are absorbed at 1 and
        [0, start_x + 5 sqrt(horizon) + 1] otherwise.
    block_size : int, optional
        Paths per Philox block.  Results are independent of the choice
        only through the stream layout, so changing it changes the draws;
        the default keeps blocks large enough for vectorised stepping.
    threads : int, optional
        Worker threads over blocks; defaults to the BESSEL_HEAT_THREADS
        environment variable, else 1.  The result is identical for any
        thread count.

    Returns
    -------
    HistogramDensity
    """
    if not isinstance(config, PathEnsembleConfig):
        raise ConfigurationError("config must be a PathEnsembleConfig")
    if np.isscalar(bins):
        n_bins = int(bins)
        if n_bins < 1:
            raise ConfigurationError(f"bins must be >= 1, got {bins!r}")
        if config.boundary_at_one == "absorb":
            hi = 1.0
        else:
            hi = config.start_x + 5.0 * math.sqrt(config.horizon_t) + 1.0
        edges = np.linspace(0.0, hi, n_bins + 1)
    else:
        edges = np.asarray(bins, dtype=np.float64)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0.0):
            raise ConfigurationError("explicit bins must be increasing edges")
        if edges[0] < 0.0:
            raise ConfigurationError("bin edges must be nonnegative")
    if block_size < 1:
        raise ConfigurationError(f"block_size must be >= 1, got {block_size!r}")
    if threads is None:
        threads = int(os.environ.get("BESSEL_HEAT_THREADS", "1"))
    if threads < 1:
        raise ConfigurationError(f"threads must be >= 1, got {threads!r}")

    total = int(config.paths)
    n_blocks = (total + block_size - 1) // block_size
    sizes = [
        min(block_size, total - b * block_size) for b in range(n_blocks)
    ]

    if threads == 1:
        results = [
            _simulate_block(config, b, sizes[b], edges) for b in range(n_blocks)
        ]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_simulate_block, config, b, sizes[b], edges)
                for b in range(n_blocks)
            ]
            results = [f.result() for f in futures]

    counts = np.zeros(edges.size - 1, dtype=np.int64)
    survivors = killed0 = killed1 = overflow = 0
    for block_counts, block_alive, block_k0, block_k1, block_over in results:
        counts += block_counts
        survivors += block_alive
        killed0 += block_k0
        killed1 += block_k1
        overflow += block_over

    mass = _bin_speed_mass(config.nu, edges)
    frac = counts / float(total)
    estimates = frac / mass
    std_errors = np.sqrt(frac * (1.0 - frac) / float(total)) / mass
    return HistogramDensity(
        nu=config.nu,
        bin_edges=edges,
        estimates=estimates,
        std_errors=std_errors,
        bin_speed_mass=mass,
        survivors=survivors,
        paths_total=total,
        killed_at_zero=killed0,
        killed_at_one=killed1,
        overflow=overflow,
    )


def compare_histogram(
    hist: HistogramDensity, analytic, subnodes: int = 16
) -> HistogramComparison:
    """Compare a histogram against an analytic density bin by bin.

    The analytic callable is averaged over each bin with respect to the
    speed measure using a midpoint rule on ``subnodes`` subintervals, so
    the reference has the same meaning as the histogram estimator; z
    scores are (estimate - reference) / std_error, NaN where the standard
    error vanishes.
    """
    if subnodes < 1:
        raise ConfigurationError(f"subnodes must be >= 1, got {subnodes!r}")
    edges = hist.bin_edges
    nu = hist.nu
    reference = np.empty(edges.size - 1, dtype=np.float64)
    for i in range(edges.size - 1):
        sub = np.linspace(edges[i], edges[i + 1], subnodes + 1)
        mid = 0.5 * (sub[1:] + sub[:-1])
        vals = np.array([float(analytic(u)) for u in mid])
        weights = _bin_speed_mass(nu, sub)
        reference[i] = float(np.dot(vals, weights) / hist.bin_speed_mass[i])
    with np.errstate(divide="ignore", invalid="ignore"):
        z = (hist.estimates - reference) / hist.std_errors
    z = np.where(hist.std_errors > 0.0, z, np.nan)
    finite = z[np.isfinite(z)]
    max_abs = float(np.max(np.abs(finite))) if finite.size else math.nan
    return HistogramComparison(reference=reference, z_scores=z, max_abs_z=max_abs)
