"""Staggered diffusion-tensor fields: constant fields for analysis and the
edge-enhancing diffusion (EED) model for nonlinear filtering.

A tensor field stores the entries (a, b, c) of symmetric positive
semidefinite 2x2 tensors at the cell corners (i+1/2, j+1/2) of an image,
i.e. in arrays of shape (height-1, width-1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffusivity import DiffusivityKind, diffusivity
from .grid import Image, gaussian_smooth, staggered_gradient

PSD_TOL = 1e-12


@dataclass(frozen=True)
class DiffusionTensor:
    """Entries of the symmetric 2x2 tensor ((a, b), (b, c))."""

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        if self.a < -PSD_TOL or self.c < -PSD_TOL or self.a * self.c - self.b * self.b < -PSD_TOL:
            raise ValueError(f"tensor ({self.a}, {self.b}, {self.c}) is not positive semidefinite")


@dataclass
class TensorField:
    """Per-corner diffusion tensors; arrays a, b, c of shape (H-1, W-1)."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self) -> None:
        self.a = np.asarray(self.a, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        self.c = np.asarray(self.c, dtype=np.float64)
        if not (self.a.shape == self.b.shape == self.c.shape) or self.a.ndim != 2:
            raise ValueError("tensor field entries must be three equal-shape 2-D arrays")
        det = self.a * self.c - self.b * self.b
        if np.any(self.a < -PSD_TOL) or np.any(self.c < -PSD_TOL) or np.any(det < -PSD_TOL):
            raise ValueError("tensor field contains an indefinite tensor")

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def matches(self, img: Image) -> bool:
        return self.shape == (img.height - 1, img.width - 1)


def constant_field(t: DiffusionTensor, image_shape: tuple[int, int]) -> TensorField:
    """Homogeneous field holding t at every corner of an (H, W) image."""
    height, width = image_shape
    if height < 2 or width < 2:
        raise ValueError("image shape must be at least 2x2")
    shape = (height - 1, width - 1)
    return TensorField(
        np.full(shape, t.a), np.full(shape, t.b), np.full(shape, t.c)
    )


def eed_field(img: Image, sigma: float, kind: DiffusivityKind) -> TensorField:
    """Edge-enhancing diffusion tensor from the Gaussian-smoothed gradient.

    Across the edge (gradient direction) the eigenvalue is g(|grad|^2),
    along it 1.  Vanishing gradients yield the identity tensor, the
    continuous limit of g(0) = 1.
    """
    gx, gy = staggered_gradient(gaussian_smooth(img, sigma))
    mag2 = gx * gx + gy * gy
    g = diffusivity(mag2, kind)
    nz = mag2 > 0
    inv = np.where(nz, mag2, 1.0)
    # a = g*vx^2 + vy^2, b = (g-1)*vx*vy, c = g*vy^2 + vx^2 with v = grad/|grad|
    a = np.where(nz, (g * gx * gx + gy * gy) / inv, 1.0)
    b = np.where(nz, (g - 1.0) * gx * gy / inv, 0.0)
    c = np.where(nz, (g * gy * gy + gx * gx) / inv, 1.0)
    return TensorField(a, b, c)
