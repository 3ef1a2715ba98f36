"""Quadratic forms by quadrature, Hardy/uncertainty slack checks, and the
explicit test-function factory certifying infinitely many bound states.

The central construction: a piecewise-linear cutoff chi supported on
[R, 2kR] times the weight t^{1/2}.  Against any potential with
Q(t) <= -(1+d)/(4 t^2) on the support, the 1-D energy of chi * t^{1/2} is
at most 3 - (d/4) log(k/2), so it is negative once k is large enough, and
disjointly supported copies certify as many bound states as desired.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import geometry as geo
from .errors import DomainError, RefinementCapError
from .geometry import Euclidean, ModelGeometry
from .reduction import RadialPotential, ReducedOperator, liouville_potential

__all__ = [
    "Grid1D",
    "CutoffSpec",
    "cutoff_chi",
    "TestFunction",
    "smooth_bump",
    "form_value",
    "hardy_slack",
    "uncertainty_slack",
    "CutoffCertificate",
    "negativity_certificate",
    "WitnessEntry",
    "witness_family",
]


# ---------------------------------------------------------------------------
# Quadrature grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Grid1D:
    """Composite quadrature rule on [a, b].

    ``N`` is the total node budget; integrands with kinks are split at the
    kinks and the budget distributed across the smooth pieces.  ``log``
    spacing integrates in x = log t with a uniform rule (useful when the
    integrand lives on several decades), and requires a > 0.
    """

    a: float
    b: float
    N: int = 4097
    rule: str = "simpson"
    spacing: str = "linear"

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError(f"grid needs a < b, got [{self.a}, {self.b}]")
        if self.N < 3:
            raise DomainError(f"grid needs at least 3 nodes, got {self.N}")
        if self.rule not in ("simpson", "trapezoid"):
            raise DomainError(f"unknown quadrature rule {self.rule!r}")
        if self.rule == "simpson" and self.N % 2 == 0:
            raise DomainError("composite Simpson requires an odd node count")
        if self.spacing not in ("linear", "log"):
            raise DomainError(f"unknown grid spacing {self.spacing!r}")
        if self.spacing == "log" and not self.a > 0:
            raise DomainError("log spacing requires a > 0")


def _panel_integral(f, a: float, b: float, n: int, rule: str, spacing: str) -> float:
    """Integrate f over one smooth panel [a, b] with n nodes.

    Endpoint evaluations are nudged infinitesimally into the interior so
    that one-sided values at kinks belong to the correct piece.
    """
    if spacing == "log":
        x = np.linspace(math.log(a), math.log(b), n)
        t = np.exp(x)
        t[0], t[-1] = a, b
        hstep = x[1] - x[0]
        jac = t
    else:
        t = np.linspace(a, b, n)
        hstep = t[1] - t[0]
        jac = 1.0
    teval = t.copy()
    teval[0] += (t[1] - t[0]) * 1e-9
    teval[-1] -= (t[-1] - t[-2]) * 1e-9
    y = np.asarray(f(teval), dtype=float) * jac
    if rule == "simpson":
        w = np.ones(n)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return float(hstep / 3.0 * (w @ y))
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return float(hstep * (w @ y))


def _odd(n: int) -> int:
    return n if n % 2 == 1 else n + 1


def _piecewise_quadrature(f, breaks: Sequence[float], grid: Grid1D) -> float:
    """Integrate f over [breaks[0], breaks[-1]], splitting at every break."""
    breaks = [float(x) for x in breaks]
    panels = [(a, b) for a, b in zip(breaks[:-1], breaks[1:]) if b > a]
    if not panels:
        return 0.0
    if grid.spacing == "log":
        widths = [math.log(b / a) for a, b in panels]
    else:
        widths = [b - a for a, b in panels]
    total_width = sum(widths)
    out = 0.0
    for (a, b), w in zip(panels, widths):
        n = _odd(max(5, round(grid.N * w / total_width)))
        out += _panel_integral(f, a, b, n, grid.rule, grid.spacing)
    return out


# ---------------------------------------------------------------------------
# Cutoffs and test functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CutoffSpec:
    """Piecewise-linear cutoff: 0 / up-ramp / plateau / down-ramp / 0.

    chi = 0 outside [R, 2kR], ramps linearly up on [R, 2R], holds 1 on
    [2R, kR], and ramps linearly down on [kR, 2kR].
    """

    R: float
    k: float

    def __post_init__(self):
        if not self.R > 0:
            raise DomainError(f"cutoff start R must be positive, got {self.R}")
        if not self.k > 1:
            raise DomainError(f"cutoff ratio k must exceed 1, got {self.k}")

    @property
    def support(self) -> tuple[float, float]:
        return (self.R, 2.0 * self.k * self.R)

    @property
    def kinks(self) -> tuple[float, ...]:
        R, k = self.R, self.k
        if k >= 2.0:
            return (R, 2.0 * R, k * R, 2.0 * k * R)
        # ramps cross before the plateau forms
        return (R, 3.0 * k * R / (k + 1.0), 2.0 * k * R)

    def chi(self, t):
        t = np.asarray(t, dtype=float)
        up = (t - self.R) / self.R
        down = (2.0 * self.k * self.R - t) / (self.k * self.R)
        return np.clip(np.minimum(up, down), 0.0, 1.0)

    def chi_prime(self, t):
        t = np.asarray(t, dtype=float)
        up = (t - self.R) / self.R
        down = (2.0 * self.k * self.R - t) / (self.k * self.R)
        active = np.minimum(up, down)
        out = np.zeros_like(t)
        rising = (up < down) & (active > 0.0) & (active < 1.0)
        falling = (down <= up) & (active > 0.0) & (active < 1.0)
        out[rising] = 1.0 / self.R
        out[falling] = -1.0 / (self.k * self.R)
        return out


def cutoff_chi(spec: CutoffSpec, t):
    """Value of the piecewise-linear cutoff at t."""
    scalar = np.isscalar(t)
    out = spec.chi(t)
    return float(out) if scalar else out


@dataclass(frozen=True)
class TestFunction:
    """Compactly supported, piecewise-C^1 function with analytic derivative.

    Quadrature code relies on ``support`` and ``kinks`` to split integrals
    into smooth pieces; ``value``/``derivative`` vanish outside the support.
    """

    __test__ = False  # not a pytest collection target

    support: tuple[float, float]
    kinks: tuple[float, ...]
    value_fn: Callable[[np.ndarray], np.ndarray]
    derivative_fn: Callable[[np.ndarray], np.ndarray]
    cutoff: CutoffSpec | None = None
    label: str = "custom"

    def _masked(self, fn, t):
        scalar = np.isscalar(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros_like(t)
        lo, hi = self.support
        mask = (t >= lo) & (t <= hi)
        if np.any(mask):
            out[mask] = fn(t[mask])
        return float(out[0]) if scalar else out

    def value(self, t):
        return self._masked(self.value_fn, t)

    def derivative(self, t):
        return self._masked(self.derivative_fn, t)

    # -- factories ---------------------------------------------------------

    @classmethod
    def chi_only(cls, cutoff: CutoffSpec) -> "TestFunction":
        return cls(cutoff.support, cutoff.kinks, cutoff.chi, cutoff.chi_prime, cutoff, "chi")

    @classmethod
    def sqrt_t(cls, cutoff: CutoffSpec) -> "TestFunction":
        """chi(t) * t^{1/2}."""

        def val(t):
            return cutoff.chi(t) * np.sqrt(t)

        def der(t):
            return cutoff.chi_prime(t) * np.sqrt(t) + cutoff.chi(t) / (2.0 * np.sqrt(t))

        return cls(cutoff.support, cutoff.kinks, val, der, cutoff, "sqrt_t")

    @classmethod
    def sqrt_t_density(cls, cutoff: CutoffSpec, geom: ModelGeometry) -> "TestFunction":
        """chi(t) * t^{1/2} * s(t)^{-1/2} (the function seen on the manifold side)."""

        def weight(t):
            return np.sqrt(t) * np.exp(-0.5 * np.asarray(geo.log_volume_density(geom, t)))

        def val(t):
            return cutoff.chi(t) * weight(t)

        def der(t):
            w = weight(t)
            a = np.asarray(geo.laplacian_r(geom, t), dtype=float)
            wprime = w * (1.0 / (2.0 * t) - 0.5 * a)
            return cutoff.chi_prime(t) * w + cutoff.chi(t) * wprime

        return cls(cutoff.support, cutoff.kinks, val, der, cutoff, "sqrt_t_density")

    @classmethod
    def from_callables(
        cls,
        value,
        derivative,
        support: tuple[float, float],
        kinks: Sequence[float] = (),
        label: str = "custom",
    ) -> "TestFunction":
        return cls(tuple(support), tuple(kinks), value, derivative, None, label)


def smooth_bump(a: float, b: float) -> TestFunction:
    """C^infinity bump exp(-1/(1-x^2)) scaled to (a, b), zero outside."""
    if not a < b:
        raise DomainError(f"bump needs a < b, got ({a}, {b})")
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)

    def _x(t):
        return (np.asarray(t, dtype=float) - mid) / half

    def val(t):
        x = _x(t)
        out = np.zeros_like(x)
        inside = np.abs(x) < 1.0 - 1e-12
        xin = x[inside]
        out[inside] = np.exp(-1.0 / (1.0 - xin**2))
        return out

    def der(t):
        x = _x(t)
        out = np.zeros_like(x)
        inside = np.abs(x) < 1.0 - 1e-12
        xin = x[inside]
        core = np.exp(-1.0 / (1.0 - xin**2))
        out[inside] = core * (-2.0 * xin / (1.0 - xin**2) ** 2) / half
        return out

    return TestFunction((a, b), (), val, der, None, "bump")


def random_piecewise_cubic(rng: np.random.Generator, lo: float, hi: float, knots: int = 7) -> TestFunction:
    """Random C^1 cubic spline, clamped to zero value and slope at the ends
    of a random support inside [lo, hi]."""
    from scipy.interpolate import CubicSpline

    width = hi - lo
    a = lo + rng.uniform(0.0, 0.35) * width
    b = hi - rng.uniform(0.0, 0.35) * width
    xs = np.linspace(a, b, knots)
    ys = rng.normal(size=knots)
    ys[0] = ys[-1] = 0.0
    spline = CubicSpline(xs, ys, bc_type="clamped")
    dspline = spline.derivative()
    return TestFunction((a, b), tuple(xs[1:-1]), spline, dspline, None, "piecewise_cubic")


def random_bump(rng: np.random.Generator, lo: float, hi: float) -> TestFunction:
    """Smooth bump with a random support inside [lo, hi]."""
    width = hi - lo
    a = lo + rng.uniform(0.0, 0.5) * width
    b = a + rng.uniform(0.25, 0.95) * (hi - a)
    return smooth_bump(a, b)


# ---------------------------------------------------------------------------
# Form evaluation and slack checks
# ---------------------------------------------------------------------------


def _potential_callable(Q):
    if isinstance(Q, ReducedOperator):
        return Q.potential
    if callable(Q):
        return Q
    raise TypeError(f"expected a ReducedOperator or callable, got {Q!r}")


def _check_coverage(grid: Grid1D, lo: float, hi: float):
    if grid.a > lo * (1 + 1e-12) or grid.b < hi * (1 - 1e-12):
        raise DomainError(
            f"grid [{grid.a}, {grid.b}] does not cover the integration range [{lo}, {hi}]"
        )


def form_value(Q, u: TestFunction, grid: Grid1D) -> float:
    """Quadrature value of  int (u'^2 + Q u^2) dt  over the support of u."""
    qfun = _potential_callable(Q)
    lo, hi = u.support
    _check_coverage(grid, lo, hi)

    def integrand(t):
        return u.derivative(t) ** 2 + np.asarray(qfun(t), dtype=float) * u.value(t) ** 2

    breaks = sorted({lo, hi, *(x for x in u.kinks if lo < x < hi)})
    return _piecewise_quadrature(integrand, breaks, grid)


def hardy_slack(f: TestFunction, R: float, grid: Grid1D) -> float:
    """Slack of the half-line Hardy inequality:

        int_R^inf f'^2 dt - int_R^inf f^2/(4 t^2) dt + f(R)^2/(2R)  >=  0.
    """
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    hi = f.support[1]
    boundary = f.value(R) ** 2 / (2.0 * R)
    if hi <= R:
        return boundary

    def integrand(t):
        return f.derivative(t) ** 2 - f.value(t) ** 2 / (4.0 * t**2)

    _check_coverage(grid, R, hi)
    lo_eff = max(R, f.support[0])
    breaks = sorted({R, hi, lo_eff, *(x for x in f.kinks if R < x < hi)})
    return _piecewise_quadrature(integrand, breaks, grid) + boundary


def uncertainty_slack(geom: ModelGeometry, u: TestFunction, R: float, grid: Grid1D) -> float:
    """Slack of the weighted uncertainty inequality on [R, infinity):

        int u'^2 s dr - int W u^2 s dr - (1/2)(A(R) - 1/R) u(R)^2 s(R)  >=  0,

    everything scaled by the cross-section volume.  The boundary coefficient
    is expected to be nonnegative for a validly chosen R; a warning is issued
    otherwise.
    """
    if R < geom.domain_start:
        raise DomainError(f"R = {R} below model domain start {geom.domain_start}")
    bc = geo.boundary_coefficient(geom, R)
    if bc < 0:
        warnings.warn(
            f"boundary coefficient at R = {R} is negative ({bc}); "
            "the inequality is not guaranteed at this radius",
            stacklevel=2,
        )
    hi = u.support[1]
    boundary = 0.5 * bc * u.value(R) ** 2 * geo.volume_density(geom, R)
    if hi <= R:
        return -geom.base_volume * boundary

    def integrand(t):
        s = np.asarray(geo.volume_density(geom, t), dtype=float)
        w = np.asarray(geo.hardy_weight(geom, t), dtype=float)
        return (u.derivative(t) ** 2 - w * u.value(t) ** 2) * s

    _check_coverage(grid, R, hi)
    lo_eff = max(R, u.support[0])
    breaks = sorted({R, hi, lo_eff, *(x for x in u.kinks if R < x < hi)})
    integral = _piecewise_quadrature(integrand, breaks, grid)
    return geom.base_volume * (integral - boundary)


# ---------------------------------------------------------------------------
# Negativity certificate and witness families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CutoffCertificate:
    """Analytic energy bound for chi * t^{1/2} against a supercritical envelope.

    For Q <= -(1 + excess)/(4 t^2) on [R, 2kR] the form value is at most
    bound(k) = 3 - (excess/4) log(k/2); ``k_min`` is the smallest integer k
    making it negative.
    """

    excess: float
    k_min: int

    def bound(self, k) -> float:
        return 3.0 - self.excess / 4.0 * math.log(k / 2.0)


def negativity_certificate(excess: float) -> CutoffCertificate:
    """Smallest integer cutoff ratio whose analytic bound is negative.

    Solving 3 = (excess/4) log(k/2) gives k = 2 e^{12/excess}; the smallest
    strictly-negative integer is the floor of that plus one.
    """
    if not excess > 0:
        raise DomainError(f"excess must be positive, got {excess}")
    k0 = int(math.floor(2.0 * math.exp(12.0 / excess))) + 1
    while 3.0 - excess / 4.0 * math.log(k0 / 2.0) >= 0.0:  # float-edge paranoia
        k0 += 1
    while k0 > 2 and 3.0 - excess / 4.0 * math.log((k0 - 1) / 2.0) < 0.0:
        k0 -= 1
    return CutoffCertificate(excess, k0)


@dataclass(frozen=True)
class WitnessEntry:
    """One member of a disjointly supported negative-energy family."""

    test_function: TestFunction
    R: float
    k: int
    support: tuple[float, float]
    form_value: float
    analytic_bound: float


def _supercritical_start(op: ReducedOperator, excess: float, R_start: float, end: float) -> float:
    """First sampled radius from which Q(t) <= -(1+excess)/(4 t^2) holds through ``end``."""
    samples = np.geomspace(R_start, end, 4096)
    env = -(1.0 + excess) / (4.0 * samples**2)
    ok = op.potential(samples) <= env + np.abs(env) * 1e-9
    if not ok[-1]:
        raise DomainError(
            "potential violates the supercritical envelope near the far end of the family"
        )
    bad = np.nonzero(~ok)[0]
    if len(bad) == 0:
        return R_start
    return float(samples[bad[-1] + 1])


def witness_family(
    geom: ModelGeometry,
    V: RadialPotential,
    excess: float,
    R_start: float,
    m: int,
    nodes_per_support: int = 8193,
) -> list[WitnessEntry]:
    """Build m disjointly supported test functions with negative energy.

    The potential (reduced and shifted by the essential-spectrum threshold)
    must satisfy Q(t) <= -(1+excess)/(4 t^2) from some radius on; the family
    starts at the first sampled radius where that holds (at least R_start).
    Supports are [R_i, 2 k R_i] with R_{i+1} = 2 k R_i and k the certified
    cutoff ratio, so consecutive supports meet only at endpoints.

    Each entry's ``form_value`` is evaluated in the transformed 1-D picture
    (cutoff times t^{1/2} against the shifted reduced potential); by
    unitarity this equals the density-weighted energy of the recorded
    ``test_function`` on the model end.
    """
    if m <= 0:
        raise DomainError(f"family size must be positive, got {m}")
    if R_start < geom.domain_start:
        raise DomainError(f"R_start = {R_start} below model domain start {geom.domain_start}")
    cert = negativity_certificate(excess)
    k0 = cert.k_min
    op = liouville_potential(geom, V).shifted(geo.essential_threshold(geom))

    start = R_start
    for _ in range(2):  # second pass re-checks the envelope over the shifted range
        end = start * (2.0 * k0) ** m
        new_start = _supercritical_start(op, excess, start, end)
        if new_start == start:
            break
        start = new_start

    entries = []
    R_i = start
    for _ in range(m):
        cutoff = CutoffSpec(R_i, float(k0))
        flat = TestFunction.sqrt_t(cutoff)
        grid = Grid1D(*cutoff.support, N=nodes_per_support, rule="simpson", spacing="log")
        fv = form_value(op, flat, grid)
        if not fv < 0.0:
            raise RefinementCapError(
                f"witness energy not negative at stated resolution (got {fv})"
            )
        if isinstance(geom.profile, Euclidean):
            member = flat
        else:
            member = TestFunction.sqrt_t_density(cutoff, geom)
        entries.append(
            WitnessEntry(
                test_function=member,
                R=R_i,
                k=k0,
                support=cutoff.support,
                form_value=fv,
                analytic_bound=cert.bound(k0),
            )
        )
        R_i = cutoff.support[1]
    return entries
