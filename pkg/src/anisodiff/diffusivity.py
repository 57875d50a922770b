"""Scalar diffusivities g and the flux function used by the 1-D scheme and
the edge-enhancing tensor model.

All diffusivities map the squared gradient magnitude to (0, 1] and are
nonincreasing, so strong gradients diffuse less.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TAGS = ("peronamalik", "charbonnier", "wexp")

# Constant of the exponential edge-enhancing diffusivity with exponent 8;
# chosen in the literature so that the flux is maximal at s = lambda.
_WEXP_C = 3.31488


@dataclass(frozen=True)
class DiffusivityKind:
    """Selects a diffusivity formula and its contrast parameter lambda > 0."""

    tag: str = "peronamalik"
    lam: float = 1.0

    def __post_init__(self) -> None:
        if self.tag not in TAGS:
            raise ValueError(f"unknown diffusivity tag {self.tag!r}, expected one of {TAGS}")
        if not self.lam > 0:
            raise ValueError("contrast parameter lambda must be positive")


def diffusivity(s2, kind: DiffusivityKind):
    """Evaluate g(s2) for squared gradient magnitude s2 >= 0.

    Accepts scalars or arrays; returns the same shape with values in (0, 1].
    """
    s2 = np.asarray(s2, dtype=np.float64)
    if np.any(s2 < 0):
        raise ValueError("squared gradient magnitude must be nonnegative")
    r = s2 / (kind.lam * kind.lam)
    if kind.tag == "peronamalik":
        g = 1.0 / (1.0 + r)
    elif kind.tag == "charbonnier":
        g = 1.0 / np.sqrt(1.0 + r)
    else:  # wexp
        with np.errstate(divide="ignore"):
            g = np.where(r > 0, -np.expm1(-_WEXP_C / np.power(r, 4, where=r > 0, out=np.ones_like(r))), 1.0)
    if g.ndim == 0:
        return float(g)
    return g


def flux(p, kind: DiffusivityKind | None):
    """Flux Phi(p) = g(p^2) * p; an odd function.  kind=None means linear flux."""
    p = np.asarray(p, dtype=np.float64)
    out = p if kind is None else diffusivity(p * p, kind) * p
    if np.ndim(out) == 0:
        return float(out)
    return out
