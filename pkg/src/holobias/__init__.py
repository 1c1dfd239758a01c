"""Bias in the holonomy of closed geodesics, computed from spectral data."""

from ._backend import BACKEND
from .bias import (
    BiasConstant,
    GeodesicRecord,
    bias_constant,
    eval_ET,
    geometric_bias_sum,
    load_geodesics,
    trace_rhs_spectral,
    weyl_weight,
)
from .bessel import bessel_j0
from .catalog import (
    ExactFrequency,
    RelationLattice,
    SpectralLine,
    SpectrumCatalog,
    load_catalog,
    relation_lattice,
    validate_weyl,
)
from .dihedral import (
    CyclotomicElement,
    ResidueField,
    cyclo_mul,
    discrete_log,
    element_order,
    export_progression,
    residue_field,
    solve_hecke,
)
from .distribution import (
    AmplitudeSet,
    BiasDistribution,
    arcsine_reference,
    char_fn,
    density_inversion,
    sample_distribution,
    time_average,
)
from .errors import (
    ConfigError,
    HolobiasError,
    NumericGuardError,
    ParseError,
    PreconditionError,
)
from .kernels import HolonomyTestFunction, KernelScale, SmoothingKernel, c_s_eta

__version__ = "0.1.0"
