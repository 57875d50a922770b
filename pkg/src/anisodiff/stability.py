"""Euclidean-norm stability toolkit for the stencil family.

Three nested bounds on the spectral norm of the operator matrix A:

  exact spectral norm  <=  data-dependent Gershgorin field bound
                       <=  worst-site eigenvalue bound

The eigenvalue bound depends only on the tensor eigenvalues and (alpha,
gamma); the Gershgorin bound groups the actual stencil entries by the four
corner tensors of each pixel.  An explicit step with tau <= 2/rho(A) never
increases the Euclidean norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stencil import StencilParams, _delta, _pad_corners
from .tensors import DiffusionTensor, TensorField


@dataclass(frozen=True)
class EigenPair:
    """Ordered eigenvalues lambda1 >= lambda2 of a diffusion tensor."""

    lambda1: float
    lambda2: float


@dataclass
class StabilityReport:
    theorem_bound: float
    gershgorin_bound: float
    tau_max: float
    oracle_norm: float | None = None


def eigenvalues_2x2(t: DiffusionTensor) -> EigenPair:
    """Closed-form eigenvalues of the symmetric 2x2 tensor."""
    mean = 0.5 * (t.a + t.c)
    r = np.hypot(0.5 * (t.a - t.c), t.b)
    return EigenPair(float(mean + r), float(mean - r))


def field_eigenvalues(field: TensorField) -> tuple[np.ndarray, np.ndarray]:
    """Per-corner ordered eigenvalue arrays (lambda1, lambda2)."""
    mean = 0.5 * (field.a + field.c)
    r = np.hypot(0.5 * (field.a - field.c), field.b)
    return mean + r, mean - r


def theorem_bound(e: EigenPair, p: StencilParams, h: float = 1.0) -> float:
    """Spectral-norm bound from the tensor eigenvalues alone."""
    return float(_theorem_bound(np.float64(e.lambda1), np.float64(e.lambda2), p, h))


def _theorem_bound(l1, l2, p: StencilParams, h: float):
    return (
        4.0 * (1.0 - p.alpha) * (l1 + l2)
        + 2.0 * (1.0 - p.gamma * (1.0 - 2.0 * p.alpha)) * (l1 - l2)
    ) / (h * h)


def worst_site_theorem_bound(field: TensorField, p: StencilParams, h: float = 1.0) -> float:
    """Maximum of the eigenvalue bound over all corner tensors of a field."""
    l1, l2 = field_eigenvalues(field)
    return float(np.max(_theorem_bound(l1, l2, p, h)))


def gershgorin_field_bound(field: TensorField, p: StencilParams, h: float = 1.0) -> float:
    """Data-dependent spectral-norm bound grouping stencil entries by corner.

    Per pixel, each of its four (mirror-extended) corners contributes
    (x + |x|) for x in {a-delta, delta+/-b, c-delta}, with +b on the NE/SW
    corners and -b on NW/SE; the maximum pixel sum is divided by 2 h^2.
    """
    d = _delta(field.a, field.b, field.c, p)
    pd = _pad_corners(d)
    pb = _pad_corners(field.b)
    pad_ = _pad_corners(field.a) - pd
    pcd = _pad_corners(field.c) - pd

    def pos2(x):
        return x + np.abs(x)

    base = pos2(pad_) + pos2(pcd)
    plus = base + pos2(pd + pb)
    minus = base + pos2(pd - pb)
    s = plus[:-1, :-1] + plus[1:, 1:] + minus[1:, :-1] + minus[:-1, 1:]
    return float(np.max(s)) / (2.0 * h * h)


def spectral_norm_oracle(A: np.ndarray, rtol: float = 1e-10, maxiter: int = 100_000) -> float:
    """Largest absolute eigenvalue of a dense symmetric matrix.

    Dense eigensolve for small matrices; deterministic power iteration on
    larger ones.
    """
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    if n == 0:
        return 0.0
    if n <= 400:
        return float(np.max(np.abs(np.linalg.eigvalsh(A))))
    rng = np.random.default_rng(1234)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(maxiter):
        w = A @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v_new = w / nw
        lam_new = float(v_new @ (A @ v_new))
        if abs(lam_new - lam) <= rtol * max(1.0, abs(lam_new)):
            return abs(lam_new)
        lam, v = lam_new, v_new
    raise RuntimeError(f"power iteration did not converge in {maxiter} iterations")


def max_step(field: TensorField, p: StencilParams, h: float = 1.0, mode: str = "theorem") -> float:
    """Largest time step with guaranteed Euclidean-norm stability, tau = 2/bound."""
    if mode == "theorem":
        bound = worst_site_theorem_bound(field, p, h)
    elif mode == "gershgorin":
        bound = gershgorin_field_bound(field, p, h)
    else:
        raise ValueError("mode must be 'theorem' or 'gershgorin'")
    if bound <= 0.0:
        raise ValueError("field diffuses nowhere; no time step limit applies")
    return 2.0 / bound


def stability_report(
    field: TensorField,
    p: StencilParams,
    h: float = 1.0,
    mode: str = "theorem",
    oracle_matrix: np.ndarray | None = None,
) -> StabilityReport:
    report = StabilityReport(
        theorem_bound=worst_site_theorem_bound(field, p, h),
        gershgorin_bound=gershgorin_field_bound(field, p, h),
        tau_max=max_step(field, p, h, mode),
    )
    if oracle_matrix is not None:
        report.oracle_norm = spectral_norm_oracle(oracle_matrix)
    return report
