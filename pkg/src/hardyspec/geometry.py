"""Model geometries and the radial curvature scalars feeding the Hardy weight.

A model end is either a warped product dr^2 + h(r)^2 g_N (with h from a small
catalogue of closed-form profiles, or sampled), or the four-dimensional
expanding/shrinking example dr^2 + e^{2r} g_h + e^{-2r} omega (x) omega.

Everything downstream consumes four radial scalars:

    A(r) = Delta r          (mean curvature of the level sphere),
    B(r) = |Hess r|^2,
    C(r) = Ric(grad r, grad r),
    s(r)                    (the r-dependent factor of the volume density),

tied together by  C = -A' - B  and  A = (log s)'.  The uncertainty-principle
weight is

    W(r) = 1/(4 r^2) + A^2/4 - B/2 - C/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, UnsupportedProfileError

__all__ = [
    "Euclidean",
    "Hyperbolic",
    "Periodic",
    "BergerExpShrink",
    "ALEModel",
    "AHModel",
    "CustomSampled",
    "WarpProfile",
    "ModelGeometry",
    "unit_sphere_area",
    "laplacian_r",
    "laplacian_r_derivative",
    "hessian_norm_sq",
    "radial_ricci",
    "volume_density",
    "log_volume_density",
    "hardy_weight",
    "boundary_coefficient",
    "essential_threshold",
]


def unit_sphere_area(n: int) -> float:
    """Volume of the unit (n-1)-sphere in R^n: 2 pi^{n/2} / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


# ---------------------------------------------------------------------------
# Warp profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Euclidean:
    """h(r) = r (flat space)."""

    def h(self, r):
        return np.asarray(r, dtype=float)

    def dh(self, r):
        return np.ones_like(np.asarray(r, dtype=float))

    def d2h(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    def log_h(self, r):
        return np.log(np.asarray(r, dtype=float))

    def dlog_h(self, r):
        return 1.0 / np.asarray(r, dtype=float)

    def d2h_over_h(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))


@dataclass(frozen=True)
class Hyperbolic:
    """h(r) = sinh(sqrt(kappa) r)/sqrt(kappa); constant curvature -kappa."""

    kappa: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")

    def h(self, r):
        rk = math.sqrt(self.kappa)
        return np.sinh(rk * np.asarray(r, dtype=float)) / rk

    def dh(self, r):
        rk = math.sqrt(self.kappa)
        return np.cosh(rk * np.asarray(r, dtype=float))

    def d2h(self, r):
        rk = math.sqrt(self.kappa)
        return rk * np.sinh(rk * np.asarray(r, dtype=float))

    def log_h(self, r):
        # log(sinh x) = x + log1p(-exp(-2x)) - log 2, stable for large x
        x = math.sqrt(self.kappa) * np.asarray(r, dtype=float)
        return x + np.log1p(-np.exp(-2.0 * x)) - math.log(2.0) - 0.5 * math.log(self.kappa)

    def dlog_h(self, r):
        # sqrt(kappa) coth(sqrt(kappa) r) via expm1: accurate near 0, no
        # overflow at large radii
        rk = math.sqrt(self.kappa)
        em = np.expm1(-2.0 * rk * np.asarray(r, dtype=float))
        return rk * (2.0 + em) / (-em)

    def d2h_over_h(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.kappa)


@dataclass(frozen=True)
class Periodic:
    """h(r) = 2 + sin r; an end that oscillates without expanding."""

    def h(self, r):
        return 2.0 + np.sin(np.asarray(r, dtype=float))

    def dh(self, r):
        return np.cos(np.asarray(r, dtype=float))

    def d2h(self, r):
        return -np.sin(np.asarray(r, dtype=float))

    def log_h(self, r):
        return np.log(self.h(r))

    def dlog_h(self, r):
        r = np.asarray(r, dtype=float)
        return np.cos(r) / (2.0 + np.sin(r))

    def d2h_over_h(self, r):
        r = np.asarray(r, dtype=float)
        return -np.sin(r) / (2.0 + np.sin(r))


@dataclass(frozen=True)
class BergerExpShrink:
    """R^4 metric dr^2 + e^{2r} g_h + e^{-2r} omega (x) omega for r >= r0.

    One expanding and one shrinking direction; the radial invariants are the
    constants A = 1, B = 3, C = -3 and the density is s = mu^2 nu = e^r.
    Only valid for dimension n = 4, and only queried at r >= r0.
    """

    r0: float

    def __post_init__(self):
        if not self.r0 > 0:
            raise DomainError(f"r0 must be positive, got {self.r0}")


@dataclass(frozen=True)
class ALEModel:
    """h(r) = r (1 + c r^{-tau}): leading-order asymptotically flat end."""

    tau: float
    c: float

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise DomainError(f"tau must lie in (0, 1), got {self.tau}")

    def h(self, r):
        r = np.asarray(r, dtype=float)
        return r * (1.0 + self.c * r ** (-self.tau))

    def dh(self, r):
        r = np.asarray(r, dtype=float)
        return 1.0 + self.c * (1.0 - self.tau) * r ** (-self.tau)

    def d2h(self, r):
        r = np.asarray(r, dtype=float)
        return -self.c * self.tau * (1.0 - self.tau) * r ** (-self.tau - 1.0)

    def log_h(self, r):
        r = np.asarray(r, dtype=float)
        return np.log(r) + np.log1p(self.c * r ** (-self.tau))

    def dlog_h(self, r):
        return self.dh(r) / self.h(r)

    def d2h_over_h(self, r):
        return self.d2h(r) / self.h(r)


@dataclass(frozen=True)
class AHModel:
    """h(r) = e^r (1 + c e^{-r}): leading-order asymptotically hyperbolic end."""

    c: float

    def h(self, r):
        return np.exp(np.asarray(r, dtype=float)) + self.c

    def dh(self, r):
        return np.exp(np.asarray(r, dtype=float))

    def d2h(self, r):
        return np.exp(np.asarray(r, dtype=float))

    def log_h(self, r):
        r = np.asarray(r, dtype=float)
        return r + np.log1p(self.c * np.exp(-r))

    def dlog_h(self, r):
        r = np.asarray(r, dtype=float)
        return 1.0 / (1.0 + self.c * np.exp(-r))

    def d2h_over_h(self, r):
        return self.dlog_h(r)


@dataclass(frozen=True)
class CustomSampled:
    """Warp profile given by samples (nodes, h_values); differentiated numerically.

    Derivatives are taken at the nodes with 5-point finite-difference stencils
    (4th-order central in the interior, one-sided near the edges) and
    interpolated linearly in between.
    """

    nodes: tuple
    h_values: tuple

    def __post_init__(self):
        nodes = tuple(float(x) for x in self.nodes)
        values = tuple(float(x) for x in self.h_values)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "h_values", values)
        if len(nodes) < 4:
            raise DomainError("sampled profile needs at least 4 nodes")
        if len(nodes) != len(values):
            raise DomainError("nodes and h_values must have equal length")
        if not np.all(np.diff(nodes) > 0):
            raise DomainError("nodes must be strictly increasing")
        if not np.all(np.asarray(values) > 0):
            raise DomainError("h_values must all be positive")

    def h(self, r):
        return np.interp(np.asarray(r, dtype=float), self.nodes, self.h_values)

    def dh(self, r):
        x = np.asarray(self.nodes)
        d = differentiate_table(x, np.asarray(self.h_values), 1)
        return np.interp(np.asarray(r, dtype=float), x, d)

    def log_h(self, r):
        return np.log(self.h(r))

    def dlog_h(self, r):
        x = np.asarray(self.nodes)
        hv = np.asarray(self.h_values)
        d = differentiate_table(x, hv, 1) / hv
        return np.interp(np.asarray(r, dtype=float), x, d)


WarpProfile = Union[
    Euclidean, Hyperbolic, Periodic, BergerExpShrink, ALEModel, AHModel, CustomSampled
]

_WARPED = (Euclidean, Hyperbolic, Periodic, ALEModel, AHModel)


# ---------------------------------------------------------------------------
# Finite differences on sampled tables (Fornberg weights)
# ---------------------------------------------------------------------------


def fd_weights(x0: float, xs: np.ndarray, m: int) -> np.ndarray:
    """Finite-difference weights for derivatives 0..m at x0 on nodes xs.

    Fornberg's recursion; exact for polynomials of degree < len(xs).
    Returns an (m+1, len(xs)) array whose row d gives the weights of the
    d-th derivative.
    """
    xs = np.asarray(xs, dtype=float)
    n = len(xs)
    w = np.zeros((m + 1, n))
    w[0, 0] = 1.0
    c1 = 1.0
    c4 = xs[0] - x0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    w[k, i] = c1 * (k * w[k - 1, i - 1] - c5 * w[k, i - 1]) / c2
                w[0, i] = -c1 * c5 * w[0, i - 1] / c2
            for k in range(mn, 0, -1):
                w[k, j] = (c4 * w[k, j] - k * w[k - 1, j]) / c3
            w[0, j] = c4 * w[0, j] / c3
        c1 = c2
    return w


def differentiate_table(nodes: np.ndarray, values: np.ndarray, order: int) -> np.ndarray:
    """Derivative of a sampled function at its own nodes via 5-point stencils."""
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values, dtype=float)
    n = len(nodes)
    width = min(5, n)
    out = np.empty(n)
    for i in range(n):
        lo = min(max(i - width // 2, 0), n - width)
        w = fd_weights(nodes[i], nodes[lo : lo + width], order)
        out[i] = w[order] @ values[lo : lo + width]
    return out


# ---------------------------------------------------------------------------
# Model geometry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelGeometry:
    """A model end: dimension, warp profile, domain start R and cross-section volume.

    R is the radius from which all radial quantities are defined (the mean
    curvature of the level set at R is at least 1/R for the profiles above).
    base_volume defaults to the unit-sphere volume of the cross-section.
    """

    n: int
    profile: WarpProfile
    R: float
    base_volume: float | None = None

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"dimension must be >= 2, got {self.n}")
        if not self.R > 0:
            raise DomainError(f"R must be positive, got {self.R}")
        if isinstance(self.profile, BergerExpShrink) and self.n != 4:
            raise DomainError("the expanding/shrinking profile requires n = 4")
        if self.base_volume is None:
            object.__setattr__(self, "base_volume", unit_sphere_area(self.n))
        if not self.base_volume > 0:
            raise DomainError(f"base_volume must be positive, got {self.base_volume}")

    @property
    def domain_start(self) -> float:
        if isinstance(self.profile, BergerExpShrink):
            return max(self.R, self.profile.r0)
        if isinstance(self.profile, CustomSampled):
            return max(self.R, self.profile.nodes[0])
        return self.R

    @property
    def domain_end(self) -> float:
        if isinstance(self.profile, CustomSampled):
            return self.profile.nodes[-1]
        return math.inf


def _check_radius(geom: ModelGeometry, r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    lo, hi = geom.domain_start, geom.domain_end
    if np.any(r < lo) or np.any(r > hi):
        raise DomainError(
            f"radius outside model domain [{lo}, {hi}]: min {r.min()}, max {r.max()}"
        )
    return r


def _scalarize(x, scalar_input: bool):
    return float(x) if scalar_input else x


# ---------------------------------------------------------------------------
# Radial curvature scalars
# ---------------------------------------------------------------------------


def laplacian_r(geom: ModelGeometry, r):
    """A(r) = Delta r at radius r; equals (n-1) h'/h on warped ends, 1 on the
    expanding/shrinking R^4 end."""
    scalar = np.isscalar(r)
    r = _check_radius(geom, r)
    p = geom.profile
    if isinstance(p, BergerExpShrink):
        out = np.ones_like(r)
    else:
        out = (geom.n - 1) * p.dlog_h(r)
    return _scalarize(out, scalar)


def laplacian_r_derivative(geom: ModelGeometry, r):
    """A'(r).  Closed form for analytic profiles; for sampled profiles the
    tabulated A values are re-differentiated with the same stencils."""
    scalar = np.isscalar(r)
    r = _check_radius(geom, r)
    p = geom.profile
    if isinstance(p, BergerExpShrink):
        out = np.zeros_like(r)
    elif isinstance(p, CustomSampled):
        x = np.asarray(p.nodes)
        a_nodes = (geom.n - 1) * differentiate_table(x, np.asarray(p.h_values), 1) / np.asarray(
            p.h_values
        )
        out = np.interp(r, x, differentiate_table(x, a_nodes, 1))
    else:
        out = (geom.n - 1) * (p.d2h_over_h(r) - p.dlog_h(r) ** 2)
    return _scalarize(out, scalar)


def hessian_norm_sq(geom: ModelGeometry, r):
    """B(r) = |Hess r|^2; equals (n-1)(h'/h)^2 on warped ends, 3 on the R^4 end."""
    scalar = np.isscalar(r)
    r = _check_radius(geom, r)
    p = geom.profile
    if isinstance(p, BergerExpShrink):
        out = 3.0 * np.ones_like(r)
    else:
        out = (geom.n - 1) * p.dlog_h(r) ** 2
    return _scalarize(out, scalar)


def radial_ricci(geom: ModelGeometry, r):
    """C(r) = Ric(grad r, grad r); satisfies C = -A'(r) - B(r) identically."""
    scalar = np.isscalar(r)
    r = _check_radius(geom, r)
    p = geom.profile
    if isinstance(p, BergerExpShrink):
        out = -3.0 * np.ones_like(r)
    elif isinstance(p, CustomSampled):
        # Built from -A' - B so the defining identity holds exactly for the
        # numerically differentiated profile as well.
        out = -laplacian_r_derivative(geom, r) - hessian_norm_sq(geom, r)
        return _scalarize(out, scalar)
    else:
        out = -(geom.n - 1) * p.d2h_over_h(r)
    return _scalarize(out, scalar)


def volume_density(geom: ModelGeometry, r):
    """s(r): the r-dependent factor of the volume density.

    h^{n-1} on warped ends, mu^2 nu = e^r on the R^4 end.  Satisfies
    (log s)' = Delta r.
    """
    scalar = np.isscalar(r)
    r = _check_radius(geom, r)
    p = geom.profile
    if isinstance(p, BergerExpShrink):
        out = np.exp(r)
    else:
        out = p.h(r) ** (geom.n - 1)
    return _scalarize(out, scalar)


def log_volume_density(geom: ModelGeometry, r):
    """log s(r), stable at radii where s itself would overflow."""
    scalar = np.isscalar(r)
    r = _check_radius(geom, r)
    p = geom.profile
    if isinstance(p, BergerExpShrink):
        out = np.asarray(r, dtype=float) + 0.0
    else:
        out = (geom.n - 1) * p.log_h(r)
    return _scalarize(out, scalar)


def hardy_weight(geom: ModelGeometry, r):
    """The uncertainty-principle weight W(r) = 1/(4r^2) + A^2/4 - B/2 - C/2."""
    scalar = np.isscalar(r)
    rr = _check_radius(geom, r)
    a = np.asarray(laplacian_r(geom, rr))
    b = np.asarray(hessian_norm_sq(geom, rr))
    c = np.asarray(radial_ricci(geom, rr))
    out = 1.0 / (4.0 * rr**2) + 0.25 * a**2 - 0.5 * b - 0.5 * c
    return _scalarize(out, scalar)


def boundary_coefficient(geom: ModelGeometry, R):
    """Delta r - 1/R at the inner radius R: the coefficient of the boundary
    integral in the uncertainty-principle inequality."""
    scalar = np.isscalar(R)
    R = _check_radius(geom, R)
    out = np.asarray(laplacian_r(geom, R)) - 1.0 / R
    return _scalarize(out, scalar)


def essential_threshold(geom: ModelGeometry) -> float:
    """Bottom of the essential spectrum of -Laplacian on the model end.

    0 for flat-type ends (Euclidean, asymptotically flat, periodic),
    (n-1)^2 kappa / 4 for curvature -kappa, (n-1)^2/4 for the asymptotically
    hyperbolic model, 1/4 for the expanding/shrinking R^4 end.
    """
    p = geom.profile
    if isinstance(p, (Euclidean, ALEModel, Periodic)):
        return 0.0
    if isinstance(p, Hyperbolic):
        return (geom.n - 1) ** 2 * p.kappa / 4.0
    if isinstance(p, AHModel):
        return (geom.n - 1) ** 2 / 4.0
    if isinstance(p, BergerExpShrink):
        return 0.25
    raise UnsupportedProfileError(
        "no closed-form essential-spectrum threshold for sampled profiles"
    )
