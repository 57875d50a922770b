"""Directional splitting of div(D grad u) on a 3x3 stencil.

The 2-D anisotropic diffusion operator is split into four 1-D diffusions
along the axes and diagonals.  The splitting has one free parameter delta
per corner tensor; we parametrise it as

    delta = alpha*(a + c) + gamma*(1 - 2*alpha)*|b|

with alpha in [0, 1/2] and |gamma| <= 1, the range in which the operator
matrix is negative semidefinite.  Corner quantities are averaged onto edge
midpoints (mirroring the staggered tensor field at the border), which gives
second-order consistency.

Boundary semantics: fluxes crossing the image border are zero.  Every
remaining flux connects two pixels inside the grid with opposite signs, so
the operator matrix is exactly symmetric with zero row sums and constants
are exact steady states.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .grid import Image
from .tensors import DiffusionTensor, TensorField

MAX_ORACLE_PIXELS = 10_000


@dataclass(frozen=True)
class StencilParams:
    """Free parameters (alpha, gamma) selecting a member of the stencil family."""

    alpha: float = 0.0
    gamma: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 0.5:
            raise ValueError("alpha must lie in [0, 0.5]")
        if not -1.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [-1, 1]")


class DirectionalWeights(NamedTuple):
    """Diffusivities along x, the (1,1) diagonal, y, and the (-1,1) diagonal."""

    w0: float
    w1: float
    w2: float
    w3: float


def delta_value(t: DiffusionTensor, p: StencilParams) -> float:
    """Splitting parameter alpha*(a+c) + gamma*(1-2*alpha)*|b| for one tensor."""
    return float(_delta(np.float64(t.a), np.float64(t.b), np.float64(t.c), p))


def _delta(a, b, c, p: StencilParams):
    # beta = gamma*(1-2*alpha)*sgn(b); beta*b collapses to ...*|b|
    return p.alpha * (a + c) + p.gamma * (1.0 - 2.0 * p.alpha) * np.abs(b)


def directional_weights(t: DiffusionTensor, delta: float) -> DirectionalWeights:
    """Solve the directional-splitting system; w0+w1+w2+w3 = a+c."""
    return DirectionalWeights(t.a - delta, delta + t.b, t.c - delta, delta - t.b)


def _pad_corners(x: np.ndarray) -> np.ndarray:
    """Mirror-extend a corner array by one site in every direction."""
    return np.pad(x, 1, mode="symmetric")


class Gates(NamedTuple):
    """Directional diffusivities at their staggered positions.

    g0: (H, W-1) at (i+1/2, j), x direction (edge-midpoint averages).
    g2: (H-1, W) at (i, j+1/2), y direction.
    g1, g3: (H-1, W-1) at corners, diagonals (1,1) and (-1,1).
    """

    g0: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    g3: np.ndarray


def directional_gates(field: TensorField, p: StencilParams) -> Gates:
    d = _delta(field.a, field.b, field.c, p)
    a_d = field.a - d
    c_d = field.c - d
    # Mirrored ghost corners enter the edge averages with their delta set to
    # zero (their diagonal fluxes are cut off by the border, so their full
    # axial diffusivity a resp. c flows into the boundary edge).  This keeps
    # the operator matrix negative semidefinite: it is a sum of one
    # per-corner four-pixel form per real corner, each negative
    # semidefinite for alpha in [0, 1/2], |gamma| <= 1, plus half-weighted
    # collapsed forms of the mirrored corners.
    row_pad = np.vstack([field.a[:1], a_d, field.a[-1:]])
    col_pad = np.hstack([field.c[:, :1], c_d, field.c[:, -1:]])
    g0 = 0.5 * (row_pad[1:, :] + row_pad[:-1, :])
    g2 = 0.5 * (col_pad[:, 1:] + col_pad[:, :-1])
    return Gates(g0, d + field.b, g2, d - field.b)


@dataclass
class StencilField:
    """Per-pixel 9-point weights (unscaled; divide by h^2 on application).

    Direction names follow the grid convention: n/s step along +/-y (rows),
    e/w along +/-x (columns).  Weights pointing across the image border are
    zero; center equals minus the sum of the other eight, so constants are
    steady states.
    """

    center: np.ndarray
    e: np.ndarray
    w: np.ndarray
    n: np.ndarray
    s: np.ndarray
    ne: np.ndarray
    nw: np.ndarray
    se: np.ndarray
    sw: np.ndarray


def stencil_weights(field: TensorField, p: StencilParams) -> StencilField:
    """Assemble the per-pixel 9-point weights for a whole (H, W) image."""
    hc, wc = field.shape
    height, width = hc + 1, wc + 1
    zeros = lambda: np.zeros((height, width))  # noqa: E731
    e, w, n, s = zeros(), zeros(), zeros(), zeros()
    ne, nw, se, sw = zeros(), zeros(), zeros(), zeros()
    if hc > 0 and wc > 0:
        gates = directional_gates(field, p)
        e[:, :-1] = gates.g0
        w[:, 1:] = gates.g0
        n[:-1, :] = gates.g2
        s[1:, :] = gates.g2
        ne[:-1, :-1] = 0.5 * gates.g1
        sw[1:, 1:] = 0.5 * gates.g1
        nw[:-1, 1:] = 0.5 * gates.g3
        se[1:, :-1] = 0.5 * gates.g3
    center = -(e + w + n + s + ne + nw + se + sw)
    return StencilField(center, e, w, n, s, ne, nw, se, sw)


def assemble_stencil(field: TensorField, p: StencilParams, i: int, j: int) -> np.ndarray:
    """3x3 weight mask of pixel (i, j), rows top-down: [[nw, n, ne], [w, c, e], [sw, s, se]]."""
    sf = stencil_weights(field, p)
    return np.array(
        [
            [sf.nw[j, i], sf.n[j, i], sf.ne[j, i]],
            [sf.w[j, i], sf.center[j, i], sf.e[j, i]],
            [sf.sw[j, i], sf.s[j, i], sf.se[j, i]],
        ]
    )


def _row_blocks(height: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, height))
    bounds = np.linspace(0, height, parts + 1, dtype=int)
    return [(int(bounds[k]), int(bounds[k + 1])) for k in range(parts) if bounds[k] < bounds[k + 1]]


def _stencil_rows(U, sf: StencilField, inv_h2: float, out, j0: int, j1: int) -> None:
    """Apply the stencil to output rows [j0, j1) from the edge-padded image U.

    Difference form w*(u_neighbor - u_center): constants map to exactly zero.
    Padded border values only ever meet zero weights.
    """
    u = U[j0 + 1 : j1 + 1, 1:-1]
    r = slice(j0, j1)
    acc = sf.e[r] * (U[j0 + 1 : j1 + 1, 2:] - u)
    acc += sf.w[r] * (U[j0 + 1 : j1 + 1, :-2] - u)
    acc += sf.n[r] * (U[j0 + 2 : j1 + 2, 1:-1] - u)
    acc += sf.s[r] * (U[j0:j1, 1:-1] - u)
    acc += sf.ne[r] * (U[j0 + 2 : j1 + 2, 2:] - u)
    acc += sf.nw[r] * (U[j0 + 2 : j1 + 2, :-2] - u)
    acc += sf.se[r] * (U[j0:j1, 2:] - u)
    acc += sf.sw[r] * (U[j0:j1, :-2] - u)
    out[r] = acc * inv_h2


def apply_operator(img: Image, field: TensorField, p: StencilParams, threads: int = 1) -> Image:
    """Apply the discrete div(D grad u) to an image (stencil backend)."""
    if not field.matches(img):
        raise ValueError(
            f"tensor field shape {field.shape} does not match image {img.height}x{img.width}"
        )
    sf = stencil_weights(field, p)
    U = np.pad(img.values, 1, mode="edge")
    out = np.empty_like(img.values)
    inv_h2 = 1.0 / (img.h * img.h)
    blocks = _row_blocks(img.height, threads)
    if len(blocks) == 1:
        _stencil_rows(U, sf, inv_h2, out, 0, img.height)
    else:
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            futures = [pool.submit(_stencil_rows, U, sf, inv_h2, out, j0, j1) for j0, j1 in blocks]
            for f in futures:
                f.result()
    return Image(out, img.h)


def assemble_matrix(field: TensorField, p: StencilParams, h: float = 1.0) -> np.ndarray:
    """Dense symmetric operator matrix acting on row-major vectorized images.

    Oracle-scale only (N <= 10000).  Rows sum to zero exactly; symmetry is
    exact because every nonzero weight pairs two in-range pixels.
    """
    hc, wc = field.shape
    height, width = hc + 1, wc + 1
    n = height * width
    if n > MAX_ORACLE_PIXELS:
        raise ValueError(f"grid with {n} pixels exceeds the oracle limit of {MAX_ORACLE_PIXELS}")
    sf = stencil_weights(field, p)
    offsets = [
        (sf.e, 0, 1), (sf.w, 0, -1), (sf.n, 1, 0), (sf.s, -1, 0),
        (sf.ne, 1, 1), (sf.nw, 1, -1), (sf.se, -1, 1), (sf.sw, -1, -1),
    ]
    inv_h2 = 1.0 / (h * h)
    A = np.zeros((n, n))
    for j in range(height):
        for i in range(width):
            r = j * width + i
            for wgt, dj, di in offsets:
                v = wgt[j, i]
                if v == 0.0:
                    continue
                q = (j + dj) * width + (i + di)
                A[r, q] += v * inv_h2
                A[r, r] -= v * inv_h2
    return A
