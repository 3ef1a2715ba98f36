"""Finiteness/infiniteness decision rules for the discrete spectrum.

Each classifier matches a claimed potential envelope against the hypothesis
template of one model criterion and returns Finite, Infinite or
Indeterminate, never an error, when no rule applies.  Verdicts are
conditional: the underlying criteria assume essential self-adjointness and a
known essential spectrum, which the classifier cannot check, so those
assumptions ride along in ``notes``.

Envelope semantics: ``side="lower"`` claims V(r) >= -(1-delta) c/(4r^2)
(minus the curved-space correction when ``model_correction`` is set) for
r >= R0; ``side="upper"`` claims V(r) <= -(1+delta) c/(4r^2) for r >= R0.
The classifier trusts the claim; pass the actual potential via ``V`` to have
it sampled against the claim (violations downgrade to Indeterminate).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .reduction import RadialPotential, potential_value

__all__ = [
    "PotentialEnvelope",
    "Verdict",
    "classify_euclidean",
    "classify_hyperbolic",
    "classify_ale",
    "classify_ah",
    "classify_berger",
    "pinching_margin",
    "classify_pinched",
    "pinched_weight_lower_bound",
]

_SELF_ADJOINT_NOTE = "assumes the Schrodinger operator is essentially self-adjoint"


@dataclass(frozen=True)
class PotentialEnvelope:
    """A claimed inverse-square envelope for the potential beyond radius R0."""

    side: str
    c: float
    delta: float = 0.0
    R0: float = 1.0
    model_correction: bool = False

    def __post_init__(self):
        if self.side not in ("lower", "upper"):
            raise DomainError(f"envelope side must be 'lower' or 'upper', got {self.side!r}")
        if self.delta < 0:
            raise DomainError(f"delta must be nonnegative, got {self.delta}")
        if not self.R0 > 0:
            raise DomainError(f"R0 must be positive, got {self.R0}")


@dataclass(frozen=True)
class Verdict:
    """Outcome of a classification rule."""

    result: str  # "Finite" | "Infinite" | "Indeterminate"
    rule: str
    threshold: float
    notes: tuple[str, ...] = ()


def _matches(c: float, scale: float) -> bool:
    return abs(c - scale) <= 1e-12 * max(abs(scale), 1.0)


def _at_least(c: float, scale: float) -> bool:
    return c >= scale * (1.0 - 1e-12)


def _claim_holds(env: PotentialEnvelope, V: RadialPotential, correction=None) -> bool:
    """Sample the claimed envelope against the actual potential on
    [R0, 100 R0] (1000 log-spaced points)."""
    r = np.geomspace(env.R0, 100.0 * env.R0, 1000)
    if env.side == "lower":
        bound = -(1.0 - env.delta) * env.c / (4.0 * r**2)
        if correction is not None:
            bound = bound - correction(r)
        tol = np.abs(bound) * 1e-9
        return bool(np.all(potential_value(V, r) >= bound - tol))
    bound = -(1.0 + env.delta) * env.c / (4.0 * r**2)
    tol = np.abs(bound) * 1e-9
    return bool(np.all(potential_value(V, r) <= bound + tol))


def _downgrade_if_violated(verdict: Verdict, env, V, correction=None) -> Verdict:
    if V is None or verdict.result == "Indeterminate":
        return verdict
    if _claim_holds(env, V, correction):
        return verdict
    return Verdict(
        "Indeterminate",
        verdict.rule,
        verdict.threshold,
        verdict.notes + ("claimed envelope violated by the sampled potential",),
    )


def classify_euclidean(n: int, env: PotentialEnvelope, V: RadialPotential | None = None) -> Verdict:
    """Flat-space rule: at or above the borderline -(n-2)^2/(4r^2) the
    discrete spectrum is finite; strictly below a (1+delta) multiple of it,
    infinite."""
    if n < 3:
        raise DomainError(f"the flat-space rule needs n >= 3, got {n}")
    scale = (n - 2) ** 2
    notes = (_SELF_ADJOINT_NOTE, "assumes sigma_ess = [0, infinity)")
    if env.side == "lower" and _at_least(env.c, scale):
        v = Verdict("Finite", "euclidean_lower_borderline", 0.0, notes)
    elif env.side == "upper" and _matches(env.c, scale) and env.delta > 0:
        v = Verdict("Infinite", "euclidean_upper_supercritical", 0.0, notes)
    else:
        return Verdict("Indeterminate", "none", 0.0, notes)
    return _downgrade_if_violated(v, env, V)


def classify_hyperbolic(
    n: int, kappa: float, env: PotentialEnvelope, V: RadialPotential | None = None
) -> Verdict:
    """Constant-curvature -kappa rule; threshold (n-1)^2 kappa / 4.

    The finiteness side needs the claimed lower envelope to carry the
    curved-space correction (n-1)(n-3) kappa / (4 sinh^2(sqrt(kappa) r)).
    """
    if kappa <= 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    threshold = (n - 1) ** 2 * kappa / 4.0
    notes = (_SELF_ADJOINT_NOTE, f"assumes sigma_ess = [{threshold}, infinity)")

    def correction(r):
        return (n - 1) * (n - 3) * kappa / (4.0 * np.sinh(np.sqrt(kappa) * r) ** 2)

    if env.side == "lower" and env.model_correction and _at_least(env.c, 1.0):
        v = Verdict("Finite", "hyperbolic_lower_borderline", threshold, notes)
    elif env.side == "upper" and _matches(env.c, 1.0) and env.delta > 0:
        v = Verdict("Infinite", "hyperbolic_upper_supercritical", threshold, notes)
    else:
        return Verdict("Indeterminate", "none", threshold, notes)
    return _downgrade_if_violated(v, env, V, correction if env.side == "lower" else None)


def classify_ale(n: int, env: PotentialEnvelope, V: RadialPotential | None = None) -> Verdict:
    """Asymptotically-locally-Euclidean rule: strict delta on either side.

    Unlike the flat-space rule, equality with the borderline decides
    nothing here.
    """
    if n < 3:
        raise DomainError(f"the asymptotically flat rule needs n >= 3, got {n}")
    scale = (n - 2) ** 2
    notes = (
        _SELF_ADJOINT_NOTE,
        "assumes curvature decay |Riem| <= L r^-(2+tau) with Ricci-gradient decay",
        "assumes Euclidean volume growth Vol(B_t) >= K t^n",
        "assumes sigma_ess = [0, infinity)",
    )
    if env.side == "lower" and _at_least(env.c, scale) and env.delta > 0:
        v = Verdict("Finite", "ale_lower_subcritical", 0.0, notes)
    elif env.side == "upper" and _matches(env.c, scale) and env.delta > 0:
        v = Verdict("Infinite", "ale_upper_supercritical", 0.0, notes)
    else:
        return Verdict("Indeterminate", "none", 0.0, notes)
    return _downgrade_if_violated(v, env, V)


def classify_ah(n: int, env: PotentialEnvelope, V: RadialPotential | None = None) -> Verdict:
    """Asymptotically hyperbolic rule: coefficient scale 1, strict delta on
    either side; threshold (n-1)^2/4."""
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    threshold = (n - 1) ** 2 / 4.0
    notes = (
        _SELF_ADJOINT_NOTE,
        "assumes an asymptotically hyperbolic end of class C^2",
        f"assumes sigma_ess = [{threshold}, infinity)",
    )
    if env.side == "lower" and _at_least(env.c, 1.0) and env.delta > 0:
        v = Verdict("Finite", "ah_lower_subcritical", threshold, notes)
    elif env.side == "upper" and _matches(env.c, 1.0) and env.delta > 0:
        v = Verdict("Infinite", "ah_upper_supercritical", threshold, notes)
    else:
        return Verdict("Indeterminate", "none", threshold, notes)
    return _downgrade_if_violated(v, env, V)


def classify_berger(env: PotentialEnvelope, V: RadialPotential | None = None) -> Verdict:
    """Rule for the expanding/shrinking R^4 end: borderline -1/(4r^2),
    threshold 1/4; equality allowed on the finiteness side."""
    notes = (_SELF_ADJOINT_NOTE, "assumes sigma_ess = [1/4, infinity)")
    if env.side == "lower" and _at_least(env.c, 1.0):
        v = Verdict("Finite", "berger_lower_borderline", 0.25, notes)
    elif env.side == "upper" and _matches(env.c, 1.0) and env.delta > 0:
        v = Verdict("Infinite", "berger_upper_supercritical", 0.25, notes)
    else:
        return Verdict("Indeterminate", "none", 0.25, notes)
    return _downgrade_if_violated(v, env, V)


def pinching_margin(n: int, delta1: float, delta2: float) -> float:
    """1 - (2n-5) delta1 + (n^2-4) delta2: positive margin means the pinched
    negative-curvature rule certifies a finite discrete spectrum."""
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    if delta1 < delta2:
        raise DomainError("pinching requires delta1 >= delta2")
    return 1.0 - (2.0 * n - 5.0) * delta1 + (n**2 - 4.0) * delta2


def classify_pinched(n: int, kappa: float, delta1: float, delta2: float) -> Verdict:
    """Pinched-curvature rule (V = 0): radial curvatures squeezed between
    -(kappa + delta_i / r^2) and a positive margin give a finite discrete
    spectrum with threshold (n-1)^2 kappa / 4."""
    if kappa <= 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    margin = pinching_margin(n, delta1, delta2)
    threshold = (n - 1) ** 2 * kappa / 4.0
    notes = (
        "assumes Hess r >= 0 on the inner boundary",
        "assumes nonpositive radial curvatures outside a compact set",
        f"assumes the pinching -(kappa + delta1/r^2) <= radial curvature <= -(kappa + delta2/r^2)",
    )
    if margin > 0:
        return Verdict("Finite", "pinched_radial_curvature", threshold, notes)
    return Verdict("Indeterminate", "none", threshold, notes + (f"margin {margin} <= 0",))


def pinched_weight_lower_bound(n: int, kappa: float, delta1: float, delta2: float, r: float) -> float:
    """Diagnostic lower bound for the uncertainty weight under pinched
    curvature, with Hessian eigenvalues squeezed between

        t(r) = sqrt(kappa) + delta2/(2 sqrt(kappa) r^2)   and
        T(r) = sqrt(kappa) + delta1/(2 sqrt(kappa) r^2)

    (the o(r^-2) remainders dropped, so this is a diagnostic, not a
    certified bound):

        [ (T + (n-2) t)^2 - 2((n-2) T^2 + t^2) ] / 4
            + (n-1)(kappa + delta2/r^2)/2 + 1/(4 r^2).
    """
    if kappa <= 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    if delta1 < delta2:
        raise DomainError("pinching requires delta1 >= delta2")
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    rk = np.sqrt(kappa)
    t = rk + delta2 / (2.0 * rk * r**2)
    T = rk + delta1 / (2.0 * rk * r**2)
    if t < 0 or T < 0:
        raise DomainError("Hessian bounds negative at this radius (outside asymptotic validity)")
    quad = (T + (n - 2) * t) ** 2 - 2.0 * ((n - 2) * T**2 + t**2)
    return float(quad / 4.0 + 0.5 * (n - 1) * (kappa + delta2 / r**2) + 1.0 / (4.0 * r**2))
