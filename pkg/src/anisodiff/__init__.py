"""Anisotropic diffusion filtering with directional-split 3x3 stencils,
Euclidean-norm stability bounds, and an equivalent conv-form backend."""

from .diffusivity import DiffusivityKind, diffusivity, flux
from .grid import Image, gaussian_smooth, reflect_index, staggered_gradient
from .pgm import PgmError, load_pgm, save_pgm
from .schemes import (
    ConstantModel,
    EedModel,
    RunTrace,
    SchemeConfig,
    convform_apply,
    explicit_step_1d,
    explicit_step_2d,
    run_diffusion,
)
from .stability import (
    EigenPair,
    StabilityReport,
    eigenvalues_2x2,
    gershgorin_field_bound,
    max_step,
    spectral_norm_oracle,
    stability_report,
    theorem_bound,
    worst_site_theorem_bound,
)
from .stencil import (
    DirectionalWeights,
    StencilField,
    StencilParams,
    apply_operator,
    assemble_matrix,
    assemble_stencil,
    delta_value,
    directional_weights,
    stencil_weights,
)
from .tensors import DiffusionTensor, TensorField, constant_field, eed_field

__version__ = "0.1.0"

__all__ = [
    "DiffusivityKind", "diffusivity", "flux",
    "Image", "gaussian_smooth", "reflect_index", "staggered_gradient",
    "PgmError", "load_pgm", "save_pgm",
    "ConstantModel", "EedModel", "RunTrace", "SchemeConfig",
    "convform_apply", "explicit_step_1d", "explicit_step_2d", "run_diffusion",
    "EigenPair", "StabilityReport", "eigenvalues_2x2", "gershgorin_field_bound",
    "max_step", "spectral_norm_oracle", "stability_report", "theorem_bound",
    "worst_site_theorem_bound",
    "DirectionalWeights", "StencilField", "StencilParams", "apply_operator",
    "assemble_matrix", "assemble_stencil", "delta_value", "directional_weights",
    "stencil_weights",
    "DiffusionTensor", "TensorField", "constant_field", "eed_field",
    "__version__",
]
