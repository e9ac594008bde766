"""Finite-dimensional bounds on the error probability of infinite constellations.

Setting: an n-dimensional constellation of normalized log density (NLD)
delta nats per dimension, used over an AWGN channel with per-dimension
noise variance sigma2 and no power constraint.  The converse is the
sphere bound (noise escaping the effective-radius ball); the
achievability side is the ML-decoder bound and the weaker
typicality-decoder bound, each with a free radius parameter whose
optimizer is known in closed form.

All bound values are computed in the log domain.  The ML bound's radial
integral is evaluated analytically through the lower incomplete gamma
(substitution t = r^2/sigma^2), not by quadrature: at n in the thousands
the integrand r^(2n-1) overflows any direct evaluation while the gamma
form stays exact.
"""

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import integrate_adaptive
from .specfn import (
    LogProb,
    log_add,
    log_reg_gamma_lower,
    log_reg_gamma_upper,
    log_vn,
    reg_gamma_lower,
    reg_gamma_upper,
)

__all__ = [
    "ChannelPoint",
    "BoundValue",
    "delta_star",
    "delta_cr",
    "delta_ex",
    "effective_radius",
    "sphere_bound",
    "sphere_bound_by_volume",
    "ml_bound",
    "typicality_bound",
    "poltyrev_ml_bound",
    "poltyrev_radius",
    "d_section_prob",
    "equivalence_sides",
    "equivalence_check",
]


@dataclass(frozen=True)
class ChannelPoint:
    """An evaluation point: dimension n, NLD delta (nats/dim), noise variance sigma2."""

    n: int
    nld: float
    sigma2: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if not (self.sigma2 > 0.0):
            raise ValueError(f"noise variance must be > 0, got {self.sigma2}")
        if not math.isfinite(self.nld):
            raise ValueError(f"NLD must be finite, got {self.nld}")

    @property
    def density(self) -> float:
        """Constellation density gamma = e^(n delta), points per unit volume."""
        return math.exp(self.n * self.nld)


@dataclass(frozen=True)
class BoundValue:
    """A bound evaluation: kind, raw log-domain value, radius applied, clamp flag.

    ``log_value`` holds the bound exactly as computed (it may exceed 1 when
    the bound is vacuous); ``clamped`` reports that, and ``value`` yields
    the linear probability clamped into [0, 1].
    """

    kind: str
    log_value: LogProb
    radius_used: float
    clamped: bool

    @property
    def value(self) -> float:
        return self.log_value.probability

    @property
    def log_raw(self) -> float:
        """Unclamped natural log of the bound."""
        return self.log_value.log_value


def delta_star(sigma2: float) -> float:
    """Capacity of the setting, (1/2) ln(1/(2 pi e sigma2)): the supremum NLD
    at which the error probability can still vanish with the dimension."""
    if not (sigma2 > 0.0):
        raise ValueError(f"noise variance must be > 0, got {sigma2}")
    return -0.5 * math.log(2.0 * math.pi * math.e * sigma2)


def delta_cr(sigma2: float) -> float:
    """Critical NLD (1/2) ln(1/(4 pi e sigma2)), where the achievability exponent flattens."""
    if not (sigma2 > 0.0):
        raise ValueError(f"noise variance must be > 0, got {sigma2}")
    return -0.5 * math.log(4.0 * math.pi * math.e * sigma2)


def delta_ex(sigma2: float) -> float:
    """Expurgation threshold delta* - ln 2.

    Exposed as a reference constant only; the expurgated achievability
    bound below it is out of scope.
    """
    return delta_star(sigma2) - math.log(2.0)


def effective_radius(point: ChannelPoint) -> float:
    """Radius of the sphere whose volume equals the mean Voronoi cell volume.

    r_eff = e^(-delta) V_n^(-1/n), computed through the exact log ball volume.
    """
    return math.exp(-point.nld - log_vn(point.n) / point.n)


def poltyrev_radius(point: ChannelPoint) -> float:
    """The classical suboptimal decoding radius sqrt(n) sigma e^(delta* - delta)."""
    sigma = math.sqrt(point.sigma2)
    return math.sqrt(point.n) * sigma * math.exp(delta_star(point.sigma2) - point.nld)


def _log_norm_tail(n: int, r: float, sigma2: float) -> LogProb:
    # Pr{||Z|| > r} for Z ~ N(0, sigma2 I_n): chi-square upper tail.
    return log_reg_gamma_upper(0.5 * n, r * r / (2.0 * sigma2))


def sphere_bound(point: ChannelPoint) -> BoundValue:
    """Converse: Pr{||Z|| > r_eff}, a lower bound on the error probability of
    any constellation at this (n, delta, sigma2)."""
    r = effective_radius(point)
    lp = _log_norm_tail(point.n, r, point.sigma2)
    return BoundValue(kind="sphere", log_value=lp, radius_used=r, clamped=False)


def sphere_bound_by_volume(n: int, v: float, sigma2: float) -> float:
    """Probability that the noise leaves a sphere of volume v.

    Equals Q(n/2, (v/V_n)^(2/n) / (2 sigma2)); convex in v, which is what
    lets the converse extend to unequal Voronoi cell volumes.
    """
    if not (v > 0.0):
        raise ValueError(f"volume must be > 0, got {v}")
    if not (sigma2 > 0.0):
        raise ValueError(f"noise variance must be > 0, got {sigma2}")
    r2 = math.exp(2.0 * (math.log(v) - log_vn(n)) / n)
    return reg_gamma_upper(0.5 * n, r2 / (2.0 * sigma2))


def _ml_first_term(point: ChannelPoint, r: float) -> LogProb:
    # gamma V_n int_0^r f_R(t) t^n dt
    #   = exp[n delta + ln V_n + n ln sigma + (n/2) ln 2
    #         + ln Gamma(n) - ln Gamma(n/2)] * P(n, r^2/(2 sigma2))
    n = point.n
    lg = (n * point.nld + log_vn(n) + 0.5 * n * math.log(point.sigma2)
          + 0.5 * n * math.log(2.0) + math.lgamma(float(n)) - math.lgamma(0.5 * n))
    tail = log_reg_gamma_lower(float(n), r * r / (2.0 * point.sigma2))
    if tail.is_zero:
        return LogProb.zero()
    return LogProb(lg + tail.log_value)


def ml_bound(point: ChannelPoint, r: float | None = None) -> BoundValue:
    """Achievability via the ML decoder: there exist constellations with

        P_e <= gamma V_n int_0^r f_R(t) t^n dt + Pr{||Z|| > r},

    f_R being the noise-norm pdf.  Defaults to the optimizing radius r_eff.
    """
    if r is None:
        r = effective_radius(point)
    elif not (r > 0.0):
        raise ValueError(f"radius must be > 0, got {r}")
    total = log_add(_ml_first_term(point, r), _log_norm_tail(point.n, r, point.sigma2))
    return BoundValue(kind="ml", log_value=total, radius_used=r,
                      clamped=total.log_value > 0.0)


def typicality_bound(point: ChannelPoint, r: float | None = None) -> BoundValue:
    """Achievability via a single-ball typicality decoder:

        P_e <= gamma V_n r^n + Pr{||Z|| > r},

    defaulting to the optimizing radius sigma sqrt(n (1 + 2 delta* - 2 delta)).
    """
    n = point.n
    if r is None:
        radicand = 1.0 + 2.0 * (delta_star(point.sigma2) - point.nld)
        if radicand <= 0.0:
            raise ValueError(
                f"default typicality radius undefined: 1 + 2(delta* - delta) = {radicand} <= 0")
        r = math.sqrt(point.sigma2 * n * radicand)
    elif not (r > 0.0):
        raise ValueError(f"radius must be > 0, got {r}")
    first = LogProb(n * point.nld + log_vn(n) + n * math.log(r))
    total = log_add(first, _log_norm_tail(n, r, point.sigma2))
    return BoundValue(kind="typicality", log_value=total, radius_used=r,
                      clamped=total.log_value > 0.0)


def poltyrev_ml_bound(point: ChannelPoint) -> BoundValue:
    """The ML bound evaluated at the classical radius sqrt(n) sigma e^(delta*-delta)."""
    r = poltyrev_radius(point)
    inner = ml_bound(point, r=r)
    return BoundValue(kind="poltyrev_r", log_value=inner.log_value,
                      radius_used=r, clamped=inner.clamped)


def d_section_prob(n: int, r: float, w: float, sigma2: float) -> float:
    """Probability that the noise lands in the sphere section D(r, w): the part
    of the radius-r ball cut off by a hyperplane at distance w/2 from the origin.

    Reduction to one dimension plus a chi tail:
        Pr{Z in D(r, w)} = int_{w/2}^r f_Z(z) P_chi(n-1)(sqrt(r^2 - z^2)/sigma) dz,
    evaluated by adaptive quadrature with the chi CDF through the
    incomplete-gamma machinery.
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    if not (r > 0.0):
        raise ValueError(f"radius must be > 0, got {r}")
    if not (0.0 <= w <= 2.0 * r):
        raise ValueError(f"chord offset must lie in [0, 2r], got w={w}, r={r}")
    if w == 2.0 * r:
        return 0.0
    a = 0.5 * (n - 1)
    norm = 1.0 / math.sqrt(2.0 * math.pi * sigma2)

    def integrand(z):
        z = np.asarray(z)
        t2 = (r * r - z * z) / sigma2
        chi_cdf = np.array([reg_gamma_lower(a, 0.5 * max(v, 0.0)) for v in np.atleast_1d(t2)])
        return norm * np.exp(-z * z / (2.0 * sigma2)) * chi_cdf

    val, _ = integrate_adaptive(integrand, 0.5 * w, r, rel_tol=1e-11, abs_tol=1e-14)
    return val


def _log_chi_pdf_times_rn(n: int, t, sigma2: float):
    # ln[f_R(t) t^n] with f_R the noise-norm pdf: chi_n scaled by sigma.
    sigma = math.sqrt(sigma2)
    y = t / sigma
    return ((1.0 - 0.5 * n) * math.log(2.0) - math.lgamma(0.5 * n)
            + (n - 1.0) * np.log(y) - 0.5 * y * y - math.log(sigma) + n * np.log(t))


def equivalence_sides(n: int, r: float, sigma2: float):
    """Both sides of the section-integral identity

        n int_0^{2r} w^(n-1) Pr{Z in D(r, w)} dw  =  int_0^r f_R(t) t^n dt,

    each evaluated by its own adaptive quadrature.  Nested integration on
    the left limits this to small n (2..8).
    """
    if not (2 <= n <= 8):
        raise ValueError(f"equivalence check supports n in 2..8, got {n}")
    if not (r > 0.0):
        raise ValueError(f"radius must be > 0, got {r}")
    if not (sigma2 > 0.0):
        raise ValueError(f"noise variance must be > 0, got {sigma2}")

    def outer(ws):
        ws = np.atleast_1d(ws)
        out = np.empty_like(ws, dtype=float)
        for i, w in enumerate(ws):
            out[i] = n * w ** (n - 1) * d_section_prob(n, r, float(w), sigma2)
        return out

    lhs, _ = integrate_adaptive(outer, 0.0, 2.0 * r, rel_tol=1e-9, abs_tol=1e-15)

    def rhs_f(ts):
        ts = np.maximum(np.atleast_1d(ts), 1e-300)
        return np.exp(_log_chi_pdf_times_rn(n, ts, sigma2))

    rhs, _ = integrate_adaptive(rhs_f, 0.0, r, rel_tol=1e-12, abs_tol=1e-300)
    return lhs, rhs


def equivalence_check(n: int, r: float, sigma2: float) -> float:
    """Relative discrepancy |lhs - rhs| / rhs of the section-integral identity."""
    lhs, rhs = equivalence_sides(n, r, sigma2)
    return abs(lhs - rhs) / rhs
