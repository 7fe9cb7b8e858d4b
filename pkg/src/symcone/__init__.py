"""Euclidean Jordan algebra / symmetric cone toolkit with a Wishart engine
and an independence-characterization verification lab."""

from .algebra import (
    Algebra,
    AlgebraKind,
    Element,
    LinearMap,
    apply,
    basis_elements,
    det,
    eigenvalues,
    element_from_matrix,
    inner,
    inv_sqrt_in_cone,
    inverse,
    jordan_product,
    l_map,
    p_map,
    sqrt_in_cone,
    trace,
    unit,
)
from .errors import (
    AlgebraMismatch,
    DimensionMismatch,
    JacobiConvergenceError,
    NotInCone,
    OutOfRegion,
    PoleError,
    SingularElement,
)
from .funceq import (
    ScalarField,
    SolutionFamily,
    cocycle_residual,
    homogeneity_defect,
    log_quadratic_residual,
    make_regular_solution,
    olkin_baker_residual,
    pexider_fit,
    wishart_dictionary,
)
from .geometry import ConeElement, contains_closure, contains_open, in_domain_D, positivity_pairing
from .harness import (
    IndependenceReport,
    SplitPair,
    density_factorization_check,
    forward_experiment,
    negative_experiment,
    run_repetitions,
    split,
)
from .wishart import (
    SampleBatch,
    WishartParams,
    laplace_transform,
    log_density,
    log_multivariate_gamma,
    mean,
    multivariate_gamma,
    sample,
    shape_threshold,
)

__version__ = "0.1.0"
