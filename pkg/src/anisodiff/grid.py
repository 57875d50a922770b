"""Image grid containers, reflecting-boundary indexing, Gaussian presmoothing,
and the staggered-grid gradient shared by the tensor models and stencils.

Convention: ``values[j, i]`` is the sample at ``x = i*h``, ``y = j*h``, with the
x axis along columns and the y axis along rows.  Staggered quantities live at
cell corners ``(i + 1/2, j + 1/2)`` and are stored in arrays of shape
``(height - 1, width - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def reflect_index(i: int, n: int) -> int:
    """Mirror an index into [0, n-1] with whole-sample reflection.

    -1 maps to 0 and n maps to n-1 (zero-flux / Neumann mirroring).  Works
    for arbitrarily far out-of-range indices via the 2n periodicity.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    m = i % (2 * n)
    return m if m < n else 2 * n - 1 - m


@dataclass
class Image:
    """Dense 2-D grey-value grid with grid size h (default 1)."""

    values: np.ndarray
    h: float = 1.0

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.size == 0:
            raise ValueError("image values must form a non-empty 2-D array")
        if not self.h > 0:
            raise ValueError("grid size h must be positive")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("image contains non-finite values")

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def copy(self) -> "Image":
        return Image(self.values.copy(), self.h)

    def norm(self) -> float:
        """Euclidean norm of the pixel vector."""
        return float(np.linalg.norm(self.values))

    def mean(self) -> float:
        return float(self.values.mean())


def gaussian_kernel(sigma: float, h: float = 1.0) -> np.ndarray:
    """Sampled 1-D Gaussian, truncated at radius ceil(3*sigma/h), renormalized."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    radius = math.ceil(3.0 * sigma / h)
    x = np.arange(-radius, radius + 1) * h
    w = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return w / w.sum()


def gaussian_smooth(img: Image, sigma: float) -> Image:
    """Separable Gaussian convolution under reflecting boundaries.

    sigma = 0 returns an exact copy.  The kernel sums to 1, so constant
    images are reproduced exactly and the image mean is conserved.
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0:
        return img.copy()
    k = gaussian_kernel(sigma, img.h)
    v = _convolve_axis(img.values, k, axis=0)
    v = _convolve_axis(v, k, axis=1)
    return Image(v, img.h)


def _convolve_axis(values: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    radius = len(kernel) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    padded = np.pad(values, pad, mode="symmetric")
    out = np.zeros_like(values)
    n = values.shape[axis]
    for t, w in enumerate(kernel):
        sl = [slice(None), slice(None)]
        sl[axis] = slice(t, t + n)
        out += w * padded[tuple(sl)]
    return out


def staggered_gradient(img: Image) -> tuple[np.ndarray, np.ndarray]:
    """Gradient at cell corners (i+1/2, j+1/2) from 2x2 central differences.

    Returns (ux, uy), each of shape (height-1, width-1).  Exact for affine
    images.
    """
    if img.width < 2 or img.height < 2:
        raise ValueError("staggered gradient needs an image of at least 2x2")
    u = img.values
    inv = 1.0 / (2.0 * img.h)
    ux = ((u[:-1, 1:] + u[1:, 1:]) - (u[:-1, :-1] + u[1:, :-1])) * inv
    uy = ((u[1:, :-1] + u[1:, 1:]) - (u[:-1, :-1] + u[:-1, 1:])) * inv
    return ux, uy
