"""Linearizations of the double-well nonlinearity phi(x) = (1 - x^2) x.

Each scheme writes phi evaluated at the new iterate as an affine map of that
iterate, phi(x_new) ~= a(p) * x_new + g(p), with coefficients depending only
on the previous value p. Nodally, a becomes a weighted mass matrix on the
implicit side and g a load vector on the explicit side.

    OD2  quadratic expansion with second-order dissipation:
         a = 1/2 - (3/2) p^2,  g = (p + p^3)/2
    WVV  piecewise convex-concave splitting of Crank-Nicolson type; outside
         [-1, 1] the quartic well is continued quadratically:
         p < -1:      a = 3,                 g = -p - 2
         -1<=p<=1:    a = 3 + (3/2)(1-p^2),  g = (p + p^3)/2
         p > 1:       a = 3,                 g = -p + 2
         At a fixed point the middle branch gives 5p - p^3, not phi(p). That
         mismatch is a property of the method as defined; no corrected
         variant is offered, and the tests assert the 5p - p^3 value as-is.
         WVV also splits the gradient term (below).
    EY   constant implicit slope with explicit concave rest:
         a = -2,  g = 3p - p^3
    LS   quadratic factor frozen at the previous step:
         a = 1 - p^2,  g = 0

OD2, EY and LS are exact at a fixed point: a(p) p + g(p) = p - p^3.
"""

import enum
from dataclasses import dataclass

import numpy as np


class SchemeKind(enum.Enum):
    OD2 = "od2"
    WVV = "wvv"
    EY = "ey"
    LS = "ls"

    @classmethod
    def from_name(cls, name: str) -> "SchemeKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown scheme {name!r} (expected one of: {valid})") from None


@dataclass(frozen=True)
class LinearizedPotential:
    """phi(x_new) ~= a * x_new + g, nodally."""

    a: np.ndarray
    g: np.ndarray


@dataclass(frozen=True)
class GradientSplit:
    """Coefficients of the interface term eps^2 int grad(x) . grad(test).

    c_implicit multiplies the stiffness matrix acting on the new iterate,
    c_explicit the one acting on the previous iterate (moved to the RHS).
    Only WVV splits: c_implicit = eps^2/2 + stab, c_explicit = eps^2/2 - stab;
    all other schemes use the fully implicit eps^2.
    """

    c_implicit: float
    c_explicit: float
    stab: float = 0.0


def linearize(kind: SchemeKind, prev) -> LinearizedPotential:
    """Affine coefficients (a, g) at each node from the previous values."""
    p = np.asarray(prev, dtype=float)
    if kind is SchemeKind.OD2:
        a = 0.5 - 1.5 * p * p
        g = 0.5 * p + 0.5 * p**3
    elif kind is SchemeKind.EY:
        a = np.full_like(p, -2.0)
        g = 3.0 * p - p**3
    elif kind is SchemeKind.LS:
        a = 1.0 - p * p
        g = np.zeros_like(p)
    elif kind is SchemeKind.WVV:
        below = p < -1.0
        above = p > 1.0
        a = np.where(below | above, 3.0, 3.0 + 1.5 * (1.0 - p * p))
        g = np.select([below, above], [-p - 2.0, -p + 2.0], default=0.5 * p + 0.5 * p**3)
    else:
        raise ValueError(f"unknown scheme kind {kind!r}")
    return LinearizedPotential(a=a, g=g)


def gradient_split(kind: SchemeKind, eps: float, stab: float = 0.0) -> GradientSplit:
    """Implicit/explicit stiffness coefficients for interface parameter eps."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if stab < 0:
        raise ValueError(f"stabilization must be >= 0, got {stab}")
    if kind is SchemeKind.WVV:
        half = 0.5 * eps * eps
        return GradientSplit(c_implicit=half + stab, c_explicit=half - stab, stab=stab)
    return GradientSplit(c_implicit=eps * eps, c_explicit=0.0, stab=0.0)
