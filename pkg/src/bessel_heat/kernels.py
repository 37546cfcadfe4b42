"""Heat kernels on the unit interval and Bessel transition densities.

The central object is the eigenfunction series

    G_t(x, y) = (x y)^(-nu) * sum_n d_n exp(-lambda_n^2 t)
                J_nu(lambda_n x) J_nu(lambda_n y),
    d_n = 2 / J_(nu+1)(lambda_n)^2,

over the positive zeros lambda_n of J_nu.  It is the transition kernel,
taken with respect to the speed measure m(dy) = y^(2 nu + 1) dy, of the
diffusion with generator (1/2) (d^2/dx^2 + ((2 nu + 1)/x) d/dx) on (0, 1),
run at twice speed (G_t corresponds to generator time t, the probabilistic
densities below use G_(t/2)), with absorption at 1 and the natural boundary
behaviour at 0.

Every series evaluation returns a certified truncation bound.  The bound
is a product of three ingredients, each either proven from the ascending
series or pinned by a unit test over the declared parameter range
(-1 < nu <= 15, tail start index >= 10):

* weights: d_n <= 1.15 pi lambda_n for n >= 10;
* spacing: lambda_(N+m) is trapped between lambda_N + 0.9 pi m and
  lambda_N + 1.1 pi m for N >= 10, m >= 1;
* mode shapes: with psi(z) = z^(-nu) |J_nu(z)| one has
  u^(-nu) |J_nu(lambda u)| = lambda^nu psi(lambda u), and psi(z) is at
  most 2^(-nu) C_nu for z <= 1 (proven from the ascending series with
  C_nu = (1 + 0.35/(nu+1)) / Gamma(nu+1)) and at most
  1.3 z^(-nu-1/2) for z >= 1.

Splitting each tail term into an n-factor and node factors H(x) H(y) and
summing the n-factors with a geometric closeout gives a rigorous bound on
the omitted mass.  The iteration stops once the bound drops below
``eps * max(|partial sum|, exp(-lambda_1^2 t))``; the second argument keeps
the stopping rule meaningful where the kernel itself is exponentially
small through cancellation.

For lambda_1^2 t below a floor (default 0.05) the alternating series loses
all relative accuracy to cancellation and evaluation is refused with
``IllConditionedError``; callers may lower ``t_floor`` explicitly, in which
case the result is flagged ``ill_conditioned``.

The remaining functions are closed-form companions: two-sided comparator
envelopes, the free half-line density, and method-of-images evaluators
used as independent cross-checks of the series.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import (
    BesselHeatError,
    DomainError,
    IllConditionedError,
    IterationError,
    PoleError,
)
from .specfun import _zeros_up_to, bessel_i_scaled, bessel_j

_LD = np.longdouble

NU_SERIES_MAX = 15.0
DEFAULT_T_FLOOR = 0.05

# Tested envelope constants, see tests/test_kernels.py::TestTailCertificate.
_WEIGHT_SLOPE = 1.15 * math.pi
_SPACING_LO = 0.9 * math.pi
_SPACING_HI = 1.1 * math.pi
_AMPLITUDE_BOUND = 1.3

_MIN_MODES = 10
_MAX_MODES = 20000


@dataclass(frozen=True)
class SeriesValue:
    """A series evaluation together with its truncation certificate.

    Attributes
    ----------
    value : float or ndarray
        The partial sum actually computed.
    terms_used : int
        Number of eigenmodes summed explicitly.
    tail_bound : float or ndarray
        Rigorous bound on the omitted tail, same shape as ``value``.
    ill_conditioned : bool
        True when lambda_1^2 t lies below the default floor, i.e. the
        caller lowered ``t_floor`` and relative accuracy is not protected
        against cancellation.
    """

    value: object
    terms_used: int
    tail_bound: object
    ill_conditioned: bool = False


_table_lock = threading.Lock()
_mode_tables: dict[float, tuple[np.ndarray, np.ndarray]] = {}


def _mode_table(nu: float, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Zeros and weights (lambda_n, d_n), n = 1..count, cached per order."""
    with _table_lock:
        cached = _mode_tables.get(nu)
        if cached is None or cached[0].size < count:
            grow = count if cached is None else max(count, 2 * cached[0].size)
            lam = _zeros_up_to(nu, max(grow, 16))
            j1 = bessel_j(nu + 1.0, lam)
            wt = 2.0 / (j1 * j1)
            _mode_tables[nu] = (lam, wt)
            cached = (lam, wt)
        return cached[0][:count], cached[1][:count]


def _check_series_order(nu: float) -> float:
    nu = float(nu)
    if not math.isfinite(nu) or not (-1.0 < nu <= NU_SERIES_MAX):
        raise DomainError(
            f"series kernels require -1 < nu <= {NU_SERIES_MAX}, got {nu!r}"
        )
    return nu


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t <= 0.0:
        raise DomainError(f"time must be positive and finite, got {t!r}")
    return t


def _check_unit_nodes(u, name: str) -> np.ndarray:
    arr = np.asarray(u, dtype=np.float64)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional")
    if arr.size == 0:
        raise DomainError(f"{name} must be nonempty")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{name} must lie in [0, 1]")
    return arr


def _small_argument_constant(nu: float) -> float:
    """C_nu with (s/2)^(-nu) |J_nu(s)| <= C_nu for 0 < s <= 1 (proven)."""
    return (1.0 + 0.35 / (nu + 1.0)) / math.gamma(nu + 1.0)


def _mode_shapes(nu: float, lam: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Matrix F[i, n] = u_i^(-nu) J_nu(lambda_n u_i) with boundary limits.

    The u = 0 column limit is (lambda_n / 2)^nu / Gamma(nu+1); at u = 1
    the value is exactly 0 because lambda_n is a zero of J_nu.
    """
    F = np.empty((u.size, lam.size), dtype=np.float64)
    interior = (u > 0.0) & (u < 1.0)
    if np.any(interior):
        ui = u[interior]
        args = np.multiply.outer(ui, lam)
        jv = bessel_j(nu, args.reshape(-1)).reshape(args.shape)
        F[interior] = jv * (ui[:, None] ** (-nu))
    at_zero = u == 0.0
    if np.any(at_zero):
        F[at_zero] = (lam / 2.0) ** nu / math.gamma(nu + 1.0)
    at_one = u == 1.0
    if np.any(at_one):
        F[at_one] = 0.0
    return F


def _tail_scalar_series(nu: float, t: float, lam_last: float) -> float:
    """Sum over the omitted modes of the n-dependent envelope factor.

    With l_m = lam_last + 0.9 pi m and u_m = lam_last + 1.1 pi m trapping
    lambda_(N+m), each omitted term is at most scalar_m * H(x) * H(y)
    where scalar_m collects the weight bound, the exponential and the
    lambda-dependent part of the shape bound.  The scalars are summed
    explicitly until a provably decreasing ratio bound falls below 1/2,
    after which a geometric closeout covers the rest.
    """
    power = 1.0 + max(2.0 * nu, 0.0)
    total = 0.0
    m = 1
    while m < 200000:
        lo = lam_last + _SPACING_LO * m
        hi = lam_last + _SPACING_HI * m
        decay = math.exp(-lo * lo * t)
        if nu >= -0.5:
            lam_hat = hi if nu >= 0.0 else lo
            scalar = _WEIGHT_SLOPE * hi * (lam_hat / 2.0) ** (2.0 * nu) * decay
        else:
            scalar = _WEIGHT_SLOPE * hi * 2.0 ** (-2.0 * nu) * decay / lo
        total += scalar
        if scalar == 0.0:
            return total
        # Ratio bound r_hat >= scalar_(m+1)/scalar_m, decreasing in m.
        step = _SPACING_LO * (2.0 * lo + _SPACING_LO)
        r_hat = (1.0 + _SPACING_HI / hi) ** power * math.exp(-t * step)
        if r_hat <= 0.5:
            return total + scalar * r_hat / (1.0 - r_hat)
        m += 1
    raise IterationError("tail envelope series failed to close")


def _tail_node_factor(nu: float, lam_last: float, u: np.ndarray) -> np.ndarray:
    """Node factor H(u) paired with ``_tail_scalar_series``.

    For every omitted mode, u^(-nu) |J_nu(lambda u)| <= scalar-part * H(u).
    """
    c_small = _small_argument_constant(nu)
    l_next = lam_last + _SPACING_LO
    u_next = lam_last + _SPACING_HI
    out = np.empty_like(u)
    pos = u > 0.0
    if nu >= -0.5:
        lam_hat = u_next if nu >= 0.0 else l_next
        coef = (
            _AMPLITUDE_BOUND
            * (lam_hat / 2.0) ** (-nu)
            / (c_small * math.sqrt(l_next))
        )
        # Global cap: psi(z) <= max(2^-nu C_nu, 1.3) for every z when
        # nu >= -1/2, which keeps H finite as u -> 0+.
        cap = max(1.0, 2.0**nu * _AMPLITUDE_BOUND / c_small)
        with np.errstate(over="ignore"):
            grow = coef * u[pos] ** (-nu - 0.5)
        out[pos] = c_small * np.maximum(1.0, np.minimum(cap, grow))
        out[~pos] = c_small
    else:
        base = c_small * l_next ** (nu + 0.5)
        out[pos] = np.maximum(
            base, _AMPLITUDE_BOUND * 2.0**nu * u[pos] ** (-nu - 0.5)
        )
        out[~pos] = base
    return out


def _series_eval(
    nu: float,
    t: float,
    xs: np.ndarray,
    ys: np.ndarray,
    eps: float,
    t_floor: float,
) -> tuple[np.ndarray, np.ndarray, int, bool]:
    """Shared certified evaluation over a grid of nodes."""
    eps = float(eps)
    if not (1e-15 <= eps < 0.5):
        raise DomainError(f"eps must lie in [1e-15, 0.5), got {eps!r}")
    t_floor = float(t_floor)
    if t_floor < 0.0 or not math.isfinite(t_floor):
        raise DomainError(f"t_floor must be a nonnegative float, got {t_floor!r}")

    lam, wt = _mode_table(nu, _MIN_MODES)
    gap = lam[0] * lam[0] * t
    if gap < t_floor:
        raise IllConditionedError(
            f"lambda_1^2 t = {gap:.3e} is below the floor {t_floor:.3e}; "
            f"the alternating series would cancel to noise "
            f"(need t >= {t_floor / (lam[0] * lam[0]):.3e})"
        )
    ill = bool(gap < DEFAULT_T_FLOOR)
    floor_ref = math.exp(-gap)

    partial = np.zeros((xs.size, ys.size), dtype=np.float64)
    count = _MIN_MODES
    start = 0
    while True:
        lam, wt = _mode_table(nu, count)
        sl = slice(start, count)
        with np.errstate(under="ignore"):
            coef = wt[sl] * np.exp(-lam[sl] * lam[sl] * t)
        fx = _mode_shapes(nu, lam[sl], xs)
        fy = _mode_shapes(nu, lam[sl], ys)
        partial += np.einsum("m,im,jm->ij", coef, fx, fy)

        scalar_sum = _tail_scalar_series(nu, t, lam[count - 1])
        tail = scalar_sum * np.outer(
            _tail_node_factor(nu, lam[count - 1], xs),
            _tail_node_factor(nu, lam[count - 1], ys),
        )
        if np.all(tail <= eps * np.maximum(np.abs(partial), floor_ref)):
            return partial, tail, count, ill
        if count >= _MAX_MODES:
            raise IterationError(
                f"series did not certify within {_MAX_MODES} modes "
                f"(nu={nu}, t={t}, eps={eps})"
            )
        start = count
        count = min(int(count * 1.6) + 4, _MAX_MODES)


def eigen_series_kernel(
    nu: float,
    t: float,
    x: float,
    y: float,
    eps: float = 1e-12,
    t_floor: float = DEFAULT_T_FLOOR,
) -> SeriesValue:
    """Heat kernel G_t(x, y) on (0, 1) by the certified eigenfunction series.

    Parameters
    ----------
    nu : float
        Order, -1 < nu <= 15.
    t : float
        Positive series time (generator time; the probabilistic densities
        correspond to G_(t/2)).
    x, y : float
        Nodes in [0, 1].  At x = 1 or y = 1 the kernel vanishes
        identically and is returned exactly.
    eps : float, optional
        Stopping tolerance: the certified truncation bound is pushed below
        ``eps * max(|value|, exp(-lambda_1^2 t))``.
    t_floor : float, optional
        Refusal floor for lambda_1^2 t (default 0.05).  Below it the
        series cancels to noise and ``IllConditionedError`` is raised;
        lowering the floor computes anyway and flags the result.

    Returns
    -------
    SeriesValue
        Scalar value, number of modes used, certified tail bound, and the
        conditioning flag.
    """
    nu = _check_series_order(nu)
    t = _check_time(t)
    xs = _check_unit_nodes([x], "x")
    ys = _check_unit_nodes([y], "y")
    if xs[0] == 1.0 or ys[0] == 1.0:
        return SeriesValue(value=0.0, terms_used=0, tail_bound=0.0)
    value, tail, used, ill = _series_eval(nu, t, xs, ys, eps, t_floor)
    return SeriesValue(
        value=float(value[0, 0]),
        terms_used=used,
        tail_bound=float(tail[0, 0]),
        ill_conditioned=ill,
    )


def eigen_series_kernel_grid(
    nu: float,
    t: float,
    xs,
    ys,
    eps: float = 1e-12,
    t_floor: float = DEFAULT_T_FLOOR,
) -> SeriesValue:
    """Vectorised ``eigen_series_kernel`` over a rectangle of nodes.

    ``value[i, j]`` approximates G_t(xs[i], ys[j]) and ``tail_bound[i, j]``
    certifies each entry individually; the mode count is shared and chosen
    so that every entry meets the tolerance.
    """
    nu = _check_series_order(nu)
    t = _check_time(t)
    xs = _check_unit_nodes(xs, "xs")
    ys = _check_unit_nodes(ys, "ys")
    value, tail, used, ill = _series_eval(nu, t, xs, ys, eps, t_floor)
    return SeriesValue(value=value, terms_used=used, tail_bound=tail,
                       ill_conditioned=ill)


def reflected_density(
    nu: float, t: float, x: float, y: float, eps: float = 1e-12
) -> SeriesValue:
    """Transition density at time t of the reflected process on (0, 1].

    The process solves the Bessel-type stochastic equation with index nu
    on the unit interval, is absorbed at 1, and has the boundary at 0
    acting by reflection (entrance for nu >= 0).  The density with respect
    to the speed measure y^(2 nu + 1) dy equals G_(t/2)(x, y).
    """
    return eigen_series_kernel(nu, 0.5 * _check_time(t), x, y, eps=eps)


def killed_density(
    mu: float, t: float, x: float, y: float, eps: float = 1e-12
) -> SeriesValue:
    """Transition density of the process with index mu < 0 killed at 0 and 1.

    For negative index the origin is reached with positive probability and
    the process is killed there; the density with respect to the speed
    measure of the reflected twin with index |mu| is

        kappa_t(x, y) = (x y)^(2 |mu|) G_(t/2) with order |mu|.

    The certificate scales along with the prefactor.
    """
    mu = float(mu)
    if not math.isfinite(mu) or mu >= 0.0 or mu < -NU_SERIES_MAX:
        raise DomainError(
            f"killed_density requires -{NU_SERIES_MAX} <= mu < 0, got {mu!r}"
        )
    base = eigen_series_kernel(-mu, 0.5 * _check_time(t), x, y, eps=eps)
    pref = (float(x) * float(y)) ** (-2.0 * mu)
    return SeriesValue(
        value=pref * base.value,
        terms_used=base.terms_used,
        tail_bound=pref * base.tail_bound,
        ill_conditioned=base.ill_conditioned,
    )


def free_density(nu: float, t: float, x: float, y: float) -> float:
    """Transition density of the free Bessel-type process on the half line.

    With respect to the speed measure y^(2 nu + 1) dy,

        q_t(x, y) = (x y)^(-nu) t^(-1) I_nu(x y / t) exp(-(x^2+y^2)/(2 t)),

    evaluated through the scaled I_nu so only the regular factor
    exp(-(x-y)^2 / (2 t)) remains.  At x = 0 (or y = 0) the limit

        q_t(0, y) = exp(-y^2/(2 t)) / (2^nu t^(nu+1) Gamma(nu+1))

    is used.  For nu < 0 the corner x = y = 0 is a pole of the analytic
    continuation and ``PoleError`` is raised.
    """
    nu = float(nu)
    if not math.isfinite(nu) or not (-1.0 < nu <= 30.0):
        raise DomainError(f"free_density requires -1 < nu <= 30, got {nu!r}")
    t = _check_time(t)
    x = float(x)
    y = float(y)
    if not (math.isfinite(x) and math.isfinite(y)) or x < 0.0 or y < 0.0:
        raise DomainError("nodes must be finite and nonnegative")
    if x == 0.0 and y == 0.0 and nu < 0.0:
        raise PoleError("free density has a pole at x = y = 0 for nu < 0")
    if x == 0.0 or y == 0.0:
        r = max(x, y)
        return math.exp(-r * r / (2.0 * t)) / (
            2.0**nu * t ** (nu + 1.0) * math.gamma(nu + 1.0)
        )
    return (
        (x * y) ** (-nu)
        / t
        * bessel_i_scaled(nu, x * y / t)
        * math.exp(-((x - y) ** 2) / (2.0 * t))
    )


def comparator_main(nu: float, t: float, x: float, y: float) -> float:
    """Two-sided comparator envelope for the series kernel G_t(x, y).

    The kernel is bounded above and below by dimension-dependent constants
    times

        (1+t)^(nu+2) / (t+xy)^(nu+1/2) * min(1, (1-x)(1-y)/t)
        * t^(-1/2) * exp(-(x-y)^2/(4 t) - lambda_1^2 t),

    uniformly in 0 < t < infinity and x, y in [0, 1].
    """
    nu = _check_series_order(nu)
    t = _check_time(t)
    x = float(x)
    y = float(y)
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise DomainError("nodes must lie in [0, 1]")
    lam1 = _mode_table(nu, 1)[0][0]
    with np.errstate(under="ignore"):
        return (
            (1.0 + t) ** (nu + 2.0)
            / (t + x * y) ** (nu + 0.5)
            * min(1.0, (1.0 - x) * (1.0 - y) / t)
            / math.sqrt(t)
            * math.exp(-((x - y) ** 2) / (4.0 * t) - lam1 * lam1 * t)
        )


def comparator_reflected(nu: float, t: float, x: float, y: float) -> float:
    """Comparator matched to ``reflected_density`` (time convention t/2)."""
    return comparator_main(nu, 0.5 * float(t), x, y)


def comparator_killed(mu: float, t: float, x: float, y: float) -> float:
    """Comparator matched to ``killed_density``.

    The envelope of the killed kernel is min(1, (xy)^(-2 mu)) times the
    main comparator of order |mu| at series time t/2; the first factor is
    the boundary decay (xy)^(2 |mu|) of the killed process at the origin.
    """
    mu = float(mu)
    if not math.isfinite(mu) or mu >= 0.0 or mu < -NU_SERIES_MAX:
        raise DomainError(
            f"comparator_killed requires -{NU_SERIES_MAX} <= mu < 0, got {mu!r}"
        )
    x = float(x)
    y = float(y)
    return min(1.0, (x * y) ** (-2.0 * mu)) * comparator_main(
        -mu, 0.5 * float(t), x, y
    )


def comparator_free(nu: float, t: float, x: float, y: float) -> float:
    """Two-sided comparator for the free half-line density.

    q_t(x, y) is comparable to (xy + t)^(-nu-1/2) t^(-1/2)
    exp(-(x-y)^2/(2 t)) with constants depending only on nu.
    """
    nu = float(nu)
    if not math.isfinite(nu) or not (-1.0 < nu <= 30.0):
        raise DomainError(f"comparator_free requires -1 < nu <= 30, got {nu!r}")
    t = _check_time(t)
    x = float(x)
    y = float(y)
    if x < 0.0 or y < 0.0:
        raise DomainError("nodes must be nonnegative")
    return (
        (x * y + t) ** (-nu - 0.5)
        / math.sqrt(t)
        * math.exp(-((x - y) ** 2) / (2.0 * t))
    )


def hunt_remainder(
    nu: float, t: float, x: float, y: float, eps: float = 1e-12
) -> SeriesValue:
    """Density deficit of the absorbed process against the free one.

    The difference

        r_t(x, y) = q_t(x, y) - p_t(x, y)

    between the free density and the reflected-absorbed density on (0, 1]
    is the contribution of paths that reach 1 before time t, so it must be
    nonnegative.  The computed difference is clamped at 0; a negative
    value beyond the series certificate plus roundoff would indicate an
    internal inconsistency and raises ``BesselHeatError``.
    """
    free = free_density(nu, t, x, y)
    absorbed = reflected_density(nu, t, x, y, eps=eps)
    diff = free - absorbed.value
    slack = absorbed.tail_bound + 1e-12 * (abs(free) + abs(absorbed.value))
    if diff < -slack:
        raise BesselHeatError(
            f"free minus absorbed density is {diff:.3e}, more negative than "
            f"the certificate {slack:.3e} allows (nu={nu}, t={t}, x={x}, y={y})"
        )
    return SeriesValue(
        value=max(diff, 0.0),
        terms_used=absorbed.terms_used,
        tail_bound=absorbed.tail_bound,
        ill_conditioned=absorbed.ill_conditioned,
    )


def _phi_ring(t_ld, u) -> np.longdouble:
    """Gaussian kernel (2 pi t)^(-1/2) exp(-u^2 / (2 t)) in long double."""
    return np.exp(-(u * u) / (2.0 * t_ld)) / np.sqrt(
        2.0 * _LD("3.141592653589793238462643383279502884") * t_ld
    )


def images_dirichlet_interval(
    a: float, b: float, t: float, x: float, y: float
) -> float:
    """Heat kernel on (a, b), Dirichlet at both ends, by method of images.

    Evaluates sum over integer n of

        phi_t(x - y - 2 L n) - phi_t(x + y - 2 a - 2 L n),   L = b - a,

    with phi_t the Gaussian kernel of variance t, accumulated ring by ring
    in extended precision.  Time matches the series convention: the
    eigenvalues are k^2 pi^2 / (2 L^2) in probabilistic time t.

    Absolute accuracy is near 1e-19; for t much larger than L^2 the value
    itself is exponentially small and relative accuracy degrades (on the
    unit interval, roughly beyond t ~ 6).
    """
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise DomainError(f"need a < b, got a={a!r}, b={b!r}")
    t = _check_time(t)
    x = float(x)
    y = float(y)
    if not (a <= x <= b and a <= y <= b):
        raise DomainError("nodes must lie in [a, b]")
    t_ld = _LD(t)
    length = _LD(b) - _LD(a)
    diff = _LD(x) - _LD(y)
    summ = _LD(x) + _LD(y) - 2.0 * _LD(a)
    total = _phi_ring(t_ld, diff) - _phi_ring(t_ld, summ)
    scale = _phi_ring(t_ld, _LD(0.0))
    for ring in range(1, 200000):
        shift = 2.0 * length * ring
        contrib = (
            _phi_ring(t_ld, diff - shift)
            + _phi_ring(t_ld, diff + shift)
            - _phi_ring(t_ld, summ - shift)
            - _phi_ring(t_ld, summ + shift)
        )
        total += contrib
        # Ring magnitudes decay like a Gaussian in the shift; once a ring
        # is below resolution the remainder is a geometric tail of it.
        if (
            abs(contrib) < _LD("1e-24") * scale
            and shift - 2.0 * length > abs(diff) + abs(summ)
        ):
            return float(total)
    raise IterationError("image sum failed to converge")


def images_dirichlet(t: float, x: float, y: float) -> float:
    """Dirichlet heat kernel on (0, 1) by images; cross-check twin of
    the nu = -1/2 eigenfunction sine series at time t/2 convention,
    i.e. it equals sum_k 2 sin(k pi x) sin(k pi y) exp(-k^2 pi^2 t / 2).
    """
    return images_dirichlet_interval(0.0, 1.0, t, x, y)


def images_neumann_dirichlet(t: float, x: float, y: float) -> float:
    """Heat kernel on (0, 1), Neumann at 0 and Dirichlet at 1, by images.

    Evaluates sum over integer n of

        (-1)^n [phi_t(x - y - 2 n) + phi_t(x + y - 2 n)]

    which equals the cosine series
    sum_k 2 cos((k-1/2) pi x) cos((k-1/2) pi y) exp(-(k-1/2)^2 pi^2 t / 2)
    and coincides with the order -1/2 eigenfunction kernel G_(t/2).
    """
    t = _check_time(t)
    x = float(x)
    y = float(y)
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise DomainError("nodes must lie in [0, 1]")
    t_ld = _LD(t)
    diff = _LD(x) - _LD(y)
    summ = _LD(x) + _LD(y)
    total = _phi_ring(t_ld, diff) + _phi_ring(t_ld, summ)
    scale = _phi_ring(t_ld, _LD(0.0))
    for ring in range(1, 200000):
        shift = _LD(2.0 * ring)
        sign = -1.0 if ring % 2 else 1.0
        contrib = sign * (
            _phi_ring(t_ld, diff - shift)
            + _phi_ring(t_ld, diff + shift)
            + _phi_ring(t_ld, summ - shift)
            + _phi_ring(t_ld, summ + shift)
        )
        total += contrib
        if abs(contrib) < _LD("1e-24") * scale and shift - 2.0 > abs(diff) + abs(
            summ
        ):
            return float(total)
    raise IterationError("image sum failed to converge")
