"""Scaling regimes: the small parameter and the three coupling constants.

A regime fixes the Knudsen-type parameter epsilon together with the field
coupling strengths (alpha, beta, gamma) entering the kinetic system.  The
constants are not independent: alpha * gamma = epsilon * beta must hold
exactly (it is what makes the electromagnetic energy exchange close), and the
admissible ranges are alpha <= epsilon and gamma <= alpha / epsilon.

Three named ladders reach the three diffusive fluid limits as epsilon -> 0:

  tag    (alpha, beta, gamma)    limit system
  nsf    (eps^2, eps^2, eps)     Navier-Stokes-Fourier, fields decouple
  nsp    (eps,   eps,   eps)     Navier-Stokes-Poisson, electrostatic field
  nsw    (eps,   1,     1)       Navier-Stokes-Maxwell, full wave dynamics

The limit constants returned by limit_constants() are the limits of
(alpha/epsilon, beta, gamma) along each ladder; they select which coupling
terms survive in the reference fluid solver.
"""

from __future__ import annotations

from dataclasses import dataclass

_RELATION_TOL = 1e-14

PRESET_TAGS = ("nsf", "nsp", "nsw")

_LIMIT_CONSTANTS = {
    "nsf": (0.0, 0.0, 0.0),
    "nsp": (1.0, 0.0, 0.0),
    "nsw": (1.0, 1.0, 1.0),
}


@dataclass(frozen=True)
class ScalingRegime:
    epsilon: float
    alpha: float
    beta: float
    gamma: float
    tag: str | None = None

    def __post_init__(self) -> None:
        for name in ("epsilon", "alpha", "beta", "gamma"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.epsilon >= 1.0:
            raise ValueError("epsilon must be below 1")
        lhs = self.alpha * self.gamma
        rhs = self.epsilon * self.beta
        scale = max(abs(lhs), abs(rhs), 1.0)
        if abs(lhs - rhs) > _RELATION_TOL * scale:
            raise ValueError(
                f"coupling relation violated: alpha*gamma = {lhs:.17g} but "
                f"epsilon*beta = {rhs:.17g}"
            )
        slack = 1.0 + 1e-12
        if self.alpha > self.epsilon * slack:
            raise ValueError("alpha must not exceed epsilon")
        if self.gamma > (self.alpha / self.epsilon) * slack:
            raise ValueError("gamma must not exceed alpha / epsilon")
        if self.tag is not None and self.tag not in PRESET_TAGS:
            raise ValueError(f"unknown regime tag {self.tag!r}")

    @classmethod
    def from_preset(cls, tag: str, epsilon: float) -> "ScalingRegime":
        if tag == "nsf":
            return cls(epsilon, epsilon**2, epsilon**2, epsilon, tag)
        if tag == "nsp":
            return cls(epsilon, epsilon, epsilon, epsilon, tag)
        if tag == "nsw":
            return cls(epsilon, epsilon, 1.0, 1.0, tag)
        raise ValueError(f"unknown regime tag {tag!r}, expected one of {PRESET_TAGS}")

    @classmethod
    def custom(cls, epsilon: float, alpha: float, gamma: float) -> "ScalingRegime":
        """Custom regime; beta is determined by the coupling relation."""
        beta = alpha * gamma / epsilon
        return cls(epsilon, alpha, beta, gamma, None)

    @property
    def alpha_eff(self) -> float:
        """Field coupling per transport time, alpha / epsilon."""
        return self.alpha / self.epsilon

    @property
    def beta_eff(self) -> float:
        return self.beta

    def limit_constants(self) -> tuple[float, float, float]:
        """Limits of (alpha/epsilon, beta, gamma) along the tagged ladder."""
        if self.tag is None:
            raise ValueError("limit constants are defined only for preset regimes")
        return _LIMIT_CONSTANTS[self.tag]
