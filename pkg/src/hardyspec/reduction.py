"""Unitary reduction of the radial operator to -d^2/dt^2 + Q(t) on L^2(dt).

The map psi -> s^{1/2} psi carries the radial part of -Laplacian + V on the
weighted half-line L^2(s dr) to a flat 1-D operator with potential

    Q(r) = A(r)^2/4 + A'(r)/2 + V(r),        A = Delta r,

which satisfies Q - V = W - 1/(4r^2) identically (W the Hardy weight).
This module also checks, by quadrature, the energy identity behind that
weight: the weighted Dirichlet integral of u equals the flat Dirichlet
integral of s^{1/2} u plus curvature and boundary terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import geometry as geo
from .errors import DomainError
from .geometry import ModelGeometry

__all__ = [
    "Zero",
    "InverseSquare",
    "ShiftedInverseSquare",
    "HyperbolicBorderline",
    "SampledPotential",
    "RadialPotential",
    "potential_value",
    "ReducedOperator",
    "liouville_potential",
    "to_reduced",
    "from_reduced",
    "energy_identity_residual",
]


# ---------------------------------------------------------------------------
# Radial potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Zero:
    """V = 0."""


@dataclass(frozen=True)
class InverseSquare:
    """V(r) = -c / (4 r^2)."""

    c: float


@dataclass(frozen=True)
class ShiftedInverseSquare:
    """V(r) = -c / (4 r^2) + shift."""

    c: float
    shift: float


@dataclass(frozen=True)
class HyperbolicBorderline:
    """The borderline envelope on curvature -kappa space:

    V(r) = -[ 1/(4 r^2) + (n-1)(n-3) kappa / (4 sinh^2(sqrt(kappa) r)) ].
    """

    kappa: float
    n: int

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")


@dataclass(frozen=True)
class SampledPotential:
    """V given by samples, linearly interpolated between nodes."""

    nodes: tuple
    values: tuple

    def __post_init__(self):
        nodes = tuple(float(x) for x in self.nodes)
        values = tuple(float(x) for x in self.values)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        if len(nodes) < 2:
            raise DomainError("sampled potential needs at least 2 nodes")
        if len(nodes) != len(values):
            raise DomainError("nodes and values must have equal length")
        if not np.all(np.diff(nodes) > 0):
            raise DomainError("nodes must be strictly increasing")


RadialPotential = Union[Zero, InverseSquare, ShiftedInverseSquare, HyperbolicBorderline, SampledPotential]


def potential_value(V: RadialPotential, r):
    """Evaluate a radial potential at r (scalar or array)."""
    scalar = np.isscalar(r)
    r = np.asarray(r, dtype=float)
    if isinstance(V, Zero):
        out = np.zeros_like(r)
    elif isinstance(V, InverseSquare):
        out = -V.c / (4.0 * r**2)
    elif isinstance(V, ShiftedInverseSquare):
        out = -V.c / (4.0 * r**2) + V.shift
    elif isinstance(V, HyperbolicBorderline):
        # 1/sinh^2(x) = 4(1+em)/em^2 with em = expm1(-2x); no overflow at large x
        em = np.expm1(-2.0 * np.sqrt(V.kappa) * r)
        inv_sinh_sq = 4.0 * (1.0 + em) / em**2
        out = -(1.0 / (4.0 * r**2) + (V.n - 1) * (V.n - 3) * V.kappa * inv_sinh_sq / 4.0)
    elif isinstance(V, SampledPotential):
        out = np.interp(r, V.nodes, V.values)
    else:
        raise TypeError(f"not a radial potential: {V!r}")
    return float(out) if scalar else out


# ---------------------------------------------------------------------------
# Reduced operator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReducedOperator:
    """-d^2/dt^2 + Q(t) on [a, infinity), acting on L^2(dt).

    ``energy_shift`` is the constant subtracted when evaluating the
    effective potential; counters and classifiers set it to the bottom of
    the essential spectrum so "bound states" always means spectrum below 0.
    """

    Q: Callable[[np.ndarray], np.ndarray]
    a: float
    provenance: str = "custom"
    energy_shift: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"interval start must be positive, got {self.a}")

    def potential(self, t):
        """Effective (shifted) potential Q(t) - energy_shift."""
        scalar = np.isscalar(t)
        t = np.asarray(t, dtype=float)
        if np.any(t < self.a):
            raise DomainError(f"t below interval start {self.a}")
        out = np.asarray(self.Q(t), dtype=float) - self.energy_shift
        if not np.all(np.isfinite(out)):
            raise DomainError("reduced potential is not finite on the queried points")
        return float(out) if scalar else out

    def shifted(self, energy_shift: float) -> "ReducedOperator":
        return ReducedOperator(self.Q, self.a, self.provenance, energy_shift)


def liouville_potential(geom: ModelGeometry, V: RadialPotential) -> ReducedOperator:
    """Reduced 1-D potential Q(r) = A^2/4 + A'/2 + V(r) for the model end."""

    def Q(t):
        a = np.asarray(geo.laplacian_r(geom, t), dtype=float)
        da = np.asarray(geo.laplacian_r_derivative(geom, t), dtype=float)
        return 0.25 * a**2 + 0.5 * da + potential_value(V, t)

    return ReducedOperator(Q=Q, a=geom.domain_start, provenance=f"{type(geom.profile).__name__}/n={geom.n}")


# ---------------------------------------------------------------------------
# The unitary map and its inverse
# ---------------------------------------------------------------------------


def to_reduced(r, u, geom: ModelGeometry):
    """Map samples of u on the weighted half-line to s^{1/2} u on L^2(dt)."""
    r = np.asarray(r, dtype=float)
    u = np.asarray(u, dtype=float)
    s = np.asarray(geo.volume_density(geom, r), dtype=float)
    return np.sqrt(s) * u


def from_reduced(r, u_tilde, geom: ModelGeometry):
    """Inverse of :func:`to_reduced`: s^{-1/2} u~."""
    r = np.asarray(r, dtype=float)
    u_tilde = np.asarray(u_tilde, dtype=float)
    s = np.asarray(geo.volume_density(geom, r), dtype=float)
    return u_tilde / np.sqrt(s)


# ---------------------------------------------------------------------------
# Energy identity check
# ---------------------------------------------------------------------------


def energy_identity_residual(geom: ModelGeometry, u, R: float, grid) -> float:
    """|LHS - RHS| of the 1-D energy identity on [R, infinity):

        int |u'|^2 s dr  =  int |(s^{1/2} u)'|^2 dr
                            + int (A^2/4 - B/2 - C/2) u^2 s dr
                            + (1/2) A(R) u(R)^2 s(R).

    ``u`` must expose value/derivative/support (see forms.TestFunction);
    the residual is pure quadrature error and is reported as-is, however
    coarse the grid.
    """
    from .forms import _piecewise_quadrature  # local import to avoid a cycle

    if R < geom.domain_start:
        raise DomainError(f"R = {R} below model domain start {geom.domain_start}")
    lo, hi = u.support
    lo = max(lo, R)
    if hi <= lo:
        return 0.0
    if grid.a > lo or grid.b < hi:
        raise DomainError("grid does not cover the support of u")

    def lhs_integrand(t):
        s = np.asarray(geo.volume_density(geom, t), dtype=float)
        return u.derivative(t) ** 2 * s

    def rhs_integrand(t):
        s = np.asarray(geo.volume_density(geom, t), dtype=float)
        a = np.asarray(geo.laplacian_r(geom, t), dtype=float)
        b = np.asarray(geo.hessian_norm_sq(geom, t), dtype=float)
        c = np.asarray(geo.radial_ricci(geom, t), dtype=float)
        uval = u.value(t)
        dval = u.derivative(t)
        flat = s * (dval + 0.5 * a * uval) ** 2  # |(s^{1/2} u)'|^2
        curv = (0.25 * a**2 - 0.5 * b - 0.5 * c) * uval**2 * s
        return flat + curv

    breaks = sorted({lo, hi, *(x for x in u.kinks if lo < x < hi)})
    lhs = _piecewise_quadrature(lhs_integrand, breaks, grid)
    rhs = _piecewise_quadrature(rhs_integrand, breaks, grid)
    boundary = 0.5 * geo.laplacian_r(geom, R) * u.value(R) ** 2 * geo.volume_density(geom, R)
    return float(abs(lhs - (rhs + boundary)))
