"""Numerical verification drivers for the kernel and density routines.

Each function here checks one structural property of the analytic layer
and returns a small report object; nothing is asserted.  The checks are
consumed by the test suite and by the command line front end.

* :func:`ratio_scan` sweeps kernel / comparator ratios over a standard
  grid, confirming that the comparator envelopes are two-sided with
  moderate constants.
* :func:`inequality_suite` samples three classical modified-Bessel
  inequalities that underpin the comparator proofs.
* :func:`semigroup_check` integrates G_t(x, u) G_s(u, y) against the
  speed measure and compares with G_(t+s)(x, y).  The integral splits at
  u = 0.1: on (0, 0.1] the substitution z = u^2 turns the integrand into
  an analytic function times z^nu, which a Gauss-Jacobi rule integrates
  exactly in the weight; on [0.1, 1] composite Gauss-Legendre panels are
  used.
* :func:`large_time_check` measures the relative weight of modes n >= 2,
  summing them directly so the result is free of cancellation.
* :func:`asymptotics_check` probes J_nu against its limit forms at 0 and
  at infinity and reports deviations together with the size of the first
  neglected correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi

from .errors import BesselHeatError, DomainError, IllConditionedError
from .kernels import (
    _mode_shapes,
    _mode_table,
    comparator_free,
    comparator_killed,
    comparator_main,
    comparator_reflected,
    eigen_series_kernel,
    eigen_series_kernel_grid,
    free_density,
)
from .specfun import bessel_i_scaled, bessel_j

_STANDARD_X = (
    0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.98,
)
_STANDARD_T = (0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0)


def standard_grid() -> tuple[np.ndarray, np.ndarray]:
    """Default scan grid: interior nodes and a decade-spanning time list."""
    return np.array(_STANDARD_X), np.array(_STANDARD_T)


@dataclass(frozen=True)
class RatioReport:
    """Extremes of kernel / comparator over a scan grid.

    Nodes refused by the series conditioning floor are counted in
    ``ill_conditioned_count`` rather than silently dropped; ``n_points``
    is the number of nodes that were actually evaluated.
    """

    nu: float
    which: str
    x_nodes: tuple
    y_nodes: tuple
    t_nodes: tuple
    n_points: int
    min_ratio: float
    max_ratio: float
    argmin: tuple[float, float, float]
    argmax: tuple[float, float, float]
    ill_conditioned_count: int = 0

    @property
    def spread(self) -> float:
        return self.max_ratio / self.min_ratio


def ratio_scan(nu: float, grid=None, which: str = "main") -> RatioReport:
    """Scan the ratio of a kernel to its comparator envelope.

    Parameters
    ----------
    nu : float
        Order (the index mu < 0 itself for ``which="killed"``).
    grid : tuple of (nodes, times), optional
        Defaults to :func:`standard_grid`.  Nodes must be interior, in
        (0, 1) for the spectral kernels; "free" scans accept any
        positive nodes.
    which : str
        One of "main", "reflected", "killed", "free".

    Returns
    -------
    RatioReport
        Minimum and maximum of kernel / comparator with their locations
        (t, x, y).  A sound two-sided comparator keeps both extremes
        within fixed positive constants.

    Notes
    -----
    Two postconditions are enforced at every counted node: the certified
    series tail must stay below 1% of the kernel value (so each ratio is
    trustworthy to that level) and the comparator must exceed 1e-300 (no
    denormal divisions).  Either failure raises ``BesselHeatError``.
    """
    if grid is None:
        grid = standard_grid()
    xs, ts = np.asarray(grid[0], float), np.asarray(grid[1], float)
    if xs.size == 0 or ts.size == 0:
        raise DomainError("scan grid is empty")
    if which not in ("main", "reflected", "killed", "free"):
        raise DomainError(f"unknown scan target {which!r}")
    if which == "killed" and not nu < 0.0:
        raise DomainError(
            f"killed scans need a negative index, got nu={nu!r}"
        )
    hi = math.inf if which == "free" else 1.0
    if np.any(xs <= 0.0) or np.any(xs >= hi):
        raise DomainError("scan nodes must be interior")

    best_min = math.inf
    best_max = -math.inf
    arg_min = arg_max = (math.nan, math.nan, math.nan)
    n_points = 0
    refused = 0
    for t in ts:
        tail = None
        try:
            if which == "main":
                out = eigen_series_kernel_grid(nu, t, xs, xs)
                values, tail = out.value, out.tail_bound
                comp = lambda x, y: comparator_main(nu, t, x, y)
            elif which == "reflected":
                out = eigen_series_kernel_grid(nu, 0.5 * t, xs, xs)
                values, tail = out.value, out.tail_bound
                comp = lambda x, y: comparator_reflected(nu, t, x, y)
            elif which == "killed":
                out = eigen_series_kernel_grid(-nu, 0.5 * t, xs, xs)
                pref = np.multiply.outer(xs, xs) ** (-2.0 * nu)
                values, tail = out.value * pref, out.tail_bound * pref
                comp = lambda x, y: comparator_killed(nu, t, x, y)
            else:
                values = np.array(
                    [[free_density(nu, t, x, y) for y in xs] for x in xs]
                )
                comp = lambda x, y: comparator_free(nu, t, x, y)
        except IllConditionedError:
            refused += xs.size * xs.size
            continue
        if tail is not None and not np.all(tail < 0.01 * np.abs(values)):
            bad = int(np.sum(tail >= 0.01 * np.abs(values)))
            raise BesselHeatError(
                f"series tail bound reached 1% of the kernel value at "
                f"{bad} node(s) (nu={nu}, t={t}); ratios there would not "
                f"be trustworthy"
            )
        for i, x in enumerate(xs):
            for j, y in enumerate(xs):
                denom = comp(x, y)
                if not denom > 1e-300:
                    raise BesselHeatError(
                        f"comparator underflow at (t={t}, x={x}, y={y}): "
                        f"{denom!r}"
                    )
                ratio = values[i, j] / denom
                n_points += 1
                if ratio < best_min:
                    best_min = ratio
                    arg_min = (float(t), float(x), float(y))
                if ratio > best_max:
                    best_max = ratio
                    arg_max = (float(t), float(x), float(y))
    if n_points == 0:
        raise DomainError(
            "every grid node was refused by the series conditioning floor"
        )
    return RatioReport(
        nu=float(nu),
        which=which,
        x_nodes=tuple(float(v) for v in xs),
        y_nodes=tuple(float(v) for v in xs),
        t_nodes=tuple(float(v) for v in ts),
        n_points=n_points,
        min_ratio=float(best_min),
        max_ratio=float(best_max),
        argmin=arg_min,
        argmax=arg_max,
        ill_conditioned_count=refused,
    )


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of the sampled modified-Bessel inequality suite.

    ``witnesses`` holds, per family, the draw that achieved the worst
    (smallest) margin — a near-equality witness when the family is clean
    and a counterexample when it is violated.
    """

    samples: int
    violations: dict = field(default_factory=dict)
    safe_violations: dict = field(default_factory=dict)
    worst_margins: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    @property
    def total_violations(self) -> int:
        return sum(self.violations.values())

    @property
    def total_safe_violations(self) -> int:
        return sum(self.safe_violations.values())


_SLACK = 1e-12


def _nu_mixture(rng, lo: float, hi: float, n: int) -> np.ndarray:
    """Orders in (lo, hi], over-weighting the sharp corner near lo."""
    u = rng.random(n)
    broad = rng.uniform(lo + 1e-3, hi, n)
    corner = lo + 1e-3 + 0.12 * rng.random(n) ** 2
    low = rng.uniform(lo + 1e-3, min(hi, lo + 1.0), n)
    return np.where(u < 0.5, broad, np.where(u < 0.75, corner, low))


def _log_i_shifted(nu: float, z: np.ndarray) -> np.ndarray:
    """log I_nu(z) - z, via the scaled function (no overflow)."""
    return np.log(bessel_i_scaled(nu, z))


def inequality_suite(samples: int = 200, seed: int = 0) -> InequalityReport:
    """Sample three classical modified-Bessel inequalities.

    Each family is sampled on its stated domain, ``samples`` draws per
    family, with the sampler deliberately over-weighting the domain
    corners where the bounds are sharp:

    * "laforgia": I_nu(y)/I_nu(x) <= exp(y-x) (y/x)^nu for nu >= -1/2
      and y >= x > 0;
    * "ratio_lemma": I_nu(y)/I_nu(x) <= exp(y-x) (y/x)^(nu+1) for
      nu > -1 and y > x > 1;
    * "nasell": I_(nu+1)(z)/I_nu(z) < z/(z + nu + 1/2) for nu > -1 and
      z > 0.

    The first family is a theorem on its whole domain.  The other two
    are genuinely false near the order floor: at nu = -0.99 and z = 1
    the true ratio I_(nu+1)/I_nu is about 2.16 while the nasell bound is
    1.96, and the ratio_lemma bound inherits counterexamples for orders
    near -1 with x close to 1 (it only becomes safe from x of about 1.6
    upward).  The suite does not narrow the domains; it reports the
    violations it finds, with the worst witness per family.

    Two counters are kept per family: ``violations`` over the full
    stated domain, and ``safe_violations`` restricted to the classically
    proven subdomain (all of it for laforgia; x >= 1.6 for ratio_lemma;
    nu >= -1/2 for nasell).  A correct implementation must report zero
    safe violations; nonzero stated-domain counts for the last two
    families reflect the mathematics, not the code.

    Margins are normalized (logarithmic for the ratio families, relative
    to the bound for nasell); a draw counts as a violation when its
    margin is below -1e-12.
    """
    if samples < 1:
        raise DomainError(f"samples must be >= 1, got {samples!r}")
    rng = np.random.default_rng(seed)
    families = ("laforgia", "ratio_lemma", "nasell")
    violations = dict.fromkeys(families, 0)
    safe_violations = dict.fromkeys(families, 0)
    worst = dict.fromkeys(families, math.inf)
    witnesses = {}
    batch_size = 512

    def track(family: str, margins: np.ndarray, draws: dict, safe) -> None:
        bad = margins < -_SLACK
        violations[family] += int(np.sum(bad))
        safe_violations[family] += int(np.sum(bad & safe))
        k = int(np.argmin(margins))
        if margins[k] < worst[family]:
            worst[family] = float(margins[k])
            witnesses[family] = {
                "margin": float(margins[k]),
                **{name: float(arr[k]) for name, arr in draws.items()},
            }

    done = 0
    while done < samples:
        n = min(batch_size, samples - done)
        done += n

        # laforgia: log ratio bounded by (y - x) + nu log(y/x)
        nu = float(_nu_mixture(rng, -0.5, 15.0, 1)[0])
        u = rng.random(n)
        x = np.where(
            u < 0.3,
            10.0 ** rng.uniform(-3.0, 0.0, n),
            rng.uniform(0.01, 25.0, n),
        )
        gap = np.where(
            rng.random(n) < 0.5,
            rng.uniform(1e-3, 1.0, n),
            rng.uniform(1.0, 20.0, n),
        )
        y = x + gap
        margins = (
            nu * np.log(y / x)
            - (_log_i_shifted(nu, y) - _log_i_shifted(nu, x))
        )
        track(
            "laforgia", margins, {"nu": np.full(n, nu), "x": x, "y": y},
            np.ones(n, dtype=bool),
        )

        # ratio_lemma: same shape with exponent nu + 1, domain x > 1
        nu = float(_nu_mixture(rng, -1.0, 15.0, 1)[0])
        u = rng.random(n)
        x = 1.0 + np.where(
            u < 0.4,
            rng.uniform(0.0, 0.55, n) ** 2,
            rng.uniform(0.0, 20.0, n),
        ) + 1e-6
        gap = np.where(
            rng.random(n) < 0.5,
            rng.uniform(1e-4, 0.6, n),
            rng.uniform(0.6, 15.0, n),
        )
        y = x + gap
        margins = (
            (nu + 1.0) * np.log(y / x)
            - (_log_i_shifted(nu, y) - _log_i_shifted(nu, x))
        )
        track(
            "ratio_lemma", margins, {"nu": np.full(n, nu), "x": x, "y": y},
            x >= 1.6,
        )

        # nasell: relative slack of the ratio bound
        nu = float(_nu_mixture(rng, -1.0, 15.0, 1)[0])
        u = rng.random(n)
        z = np.where(
            u < 0.4,
            rng.uniform(1e-3, 30.0, n),
            np.where(
                u < 0.8,
                rng.uniform(0.5, 3.0, n),
                10.0 ** rng.uniform(-3.0, 0.0, n),
            ),
        )
        value = bessel_i_scaled(nu + 1.0, z) / bessel_i_scaled(nu, z)
        bound = z / (z + nu + 0.5)
        margins = (bound - value) / np.abs(bound)
        track(
            "nasell", margins, {"nu": np.full(n, nu), "z": z},
            np.full(n, nu >= -0.5),
        )

    return InequalityReport(
        samples=samples,
        violations=violations,
        safe_violations=safe_violations,
        worst_margins=worst,
        witnesses=witnesses,
    )


@dataclass(frozen=True)
class SemigroupReport:
    """Chapman-Kolmogorov defect of the series kernel."""

    nu: float
    t: float
    s: float
    x: float
    y: float
    lhs: float
    rhs: float
    defect: float
    nodes_used: int


def semigroup_check(
    nu: float, t: float, s: float, x: float, y: float, quad_nodes: int = 24
) -> SemigroupReport:
    """Verify int G_t(x,u) G_s(u,y) dm(u) = G_(t+s)(x,y) by quadrature.

    The speed measure is m(du) = u^(2 nu + 1) du.  On (0, 0.1] the
    substitution z = u^2 gives (1/2) int g(z) z^nu dz with g analytic, so
    a Gauss-Jacobi rule with weight z^nu is exact up to the analytic
    remainder even for nu near -1; on [0.1, 1] nine Gauss-Legendre panels
    of width 0.1 resolve the kernel peak at any t >= 0.01.
    """
    if quad_nodes < 4:
        raise DomainError(f"quad_nodes must be >= 4, got {quad_nodes!r}")
    nu = float(nu)
    t = float(t)
    s = float(s)

    # Gauss-Jacobi segment on z in (0, 0.01], weight z^nu.
    zj, wj = roots_jacobi(quad_nodes, 0.0, nu)
    z_hi = 0.01
    z_nodes = 0.5 * z_hi * (zj + 1.0)
    # int_0^a g(z) z^nu dz = (a/2)^(nu+1) sum w_i g(a (x_i+1)/2)
    jac_scale = (0.5 * z_hi) ** (nu + 1.0)
    u_jacobi = np.sqrt(z_nodes)
    w_jacobi = 0.5 * jac_scale * wj  # the 1/2 from du = dz / (2 sqrt(z))

    # Composite Gauss-Legendre panels on [0.1, 1.0].
    gl_x, gl_w = np.polynomial.legendre.leggauss(quad_nodes)
    panels = np.linspace(0.1, 1.0, 10)
    u_parts = []
    w_parts = []
    for lo, hi in zip(panels[:-1], panels[1:]):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        u_p = mid + half * gl_x
        u_parts.append(u_p)
        w_parts.append(half * gl_w * u_p ** (2.0 * nu + 1.0))
    u_all = np.concatenate([u_jacobi] + u_parts)
    w_all = np.concatenate([w_jacobi] + w_parts)

    left = eigen_series_kernel_grid(nu, t, np.array([x]), u_all).value[0]
    right = eigen_series_kernel_grid(nu, s, u_all, np.array([y])).value[:, 0]
    lhs = float(np.dot(w_all, left * right))
    rhs = eigen_series_kernel(nu, t + s, x, y).value
    defect = abs(lhs - rhs) / abs(rhs)
    return SemigroupReport(
        nu=nu, t=t, s=s, x=float(x), y=float(y),
        lhs=lhs, rhs=rhs, defect=defect, nodes_used=u_all.size,
    )


@dataclass(frozen=True)
class LargeTimeReport:
    """Relative weight of the non-leading modes at a list of times."""

    nu: float
    x: float
    y: float
    t_values: np.ndarray
    defects: np.ndarray
    spectral_gap: float


def large_time_check(nu: float, x: float, y: float, t_list=None) -> LargeTimeReport:
    """Measure how fast G_t collapses onto its leading mode.

    For each time the report contains

        defect(t) = sum_(n >= 2) term_n(t, x, y) / G_t(x, y),

    computed directly from the mode table (no subtraction of nearly equal
    quantities), which should decay like exp(-(lambda_2^2-lambda_1^2) t).
    """
    lam, wt = _mode_table(nu, 64)
    if t_list is None:
        base = 1.0 / (lam[0] * lam[0])
        t_list = [base, 2.0 * base, 4.0 * base]
    t_arr = np.asarray(t_list, dtype=np.float64)
    if np.any(t_arr <= 0.0):
        raise DomainError("all times must be positive")

    fx = _mode_shapes(nu, lam, np.array([float(x)]))[0]
    fy = _mode_shapes(nu, lam, np.array([float(y)]))[0]
    defects = np.empty(t_arr.size)
    for i, t in enumerate(t_arr):
        needed = eigen_series_kernel(nu, t, x, y, eps=1e-14).terms_used
        if needed > lam.size:
            lam, wt = _mode_table(nu, needed)
            fx = _mode_shapes(nu, lam, np.array([float(x)]))[0]
            fy = _mode_shapes(nu, lam, np.array([float(y)]))[0]
        with np.errstate(under="ignore"):
            terms = wt * np.exp(-lam * lam * t) * fx * fy
        total = float(np.sum(terms))
        defects[i] = float(np.sum(terms[1:])) / total
    gap = float(lam[1] * lam[1] - lam[0] * lam[0])
    return LargeTimeReport(
        nu=float(nu), x=float(x), y=float(y),
        t_values=t_arr, defects=defects, spectral_gap=gap,
    )


@dataclass(frozen=True)
class AsymptoticsReport:
    """Deviations of J_nu from its limiting forms at 0 and at infinity."""

    nu: float
    zero_points: np.ndarray
    zero_deviations: np.ndarray
    zero_tolerances: np.ndarray
    infinity_points: np.ndarray
    infinity_deviations: np.ndarray
    infinity_tolerances: np.ndarray
    first_correction: np.ndarray

    @property
    def passed(self) -> bool:
        return bool(
            np.all(self.zero_deviations <= self.zero_tolerances)
            and np.all(self.infinity_deviations <= self.infinity_tolerances)
        )


def asymptotics_check(nu: float) -> AsymptoticsReport:
    """Probe J_nu against its limit forms.

    Near zero the leading form is (z/2)^nu / Gamma(nu+1) with relative
    deviation ~ z^2 / (4 (nu+1)); at infinity the amplitude-phase form
    sqrt(2/(pi z)) cos(z - nu pi/2 - pi/4), with deviation relative to the
    amplitude governed by the first phase correction (4 nu^2 - 1)/(8 z).
    The tolerances (1e-5, 1e-3) at z = (1e-6, 1e-4) and (1e-2, 2.5e-3) at
    z = (50, 200) hold for moderate orders; for larger nu the infinity-
    side correction (4 nu^2 - 1)/(8 z) itself exceeds them, and the
    report's ``first_correction`` quantifies the expected size.
    """
    nu = float(nu)
    zero_pts = np.array([1e-6, 1e-4])
    zero_tol = np.array([1e-5, 1e-3])
    lead = (zero_pts / 2.0) ** nu / math.gamma(nu + 1.0)
    zero_dev = np.abs(bessel_j(nu, zero_pts) - lead) / lead

    inf_pts = np.array([50.0, 200.0])
    inf_tol = np.array([1e-2, 2.5e-3])
    amp = np.sqrt(2.0 / (np.pi * inf_pts))
    phase = inf_pts - nu * np.pi / 2.0 - np.pi / 4.0
    inf_dev = np.abs(bessel_j(nu, inf_pts) - amp * np.cos(phase)) / amp
    correction = np.abs(4.0 * nu * nu - 1.0) / (8.0 * inf_pts)
    return AsymptoticsReport(
        nu=nu,
        zero_points=zero_pts,
        zero_deviations=zero_dev,
        zero_tolerances=zero_tol,
        infinity_points=inf_pts,
        infinity_deviations=inf_dev,
        infinity_tolerances=inf_tol,
        first_correction=correction,
    )
