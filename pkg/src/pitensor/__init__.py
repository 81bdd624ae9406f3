"""Projective tensor norms in finite dimensions, with dual certificates.

Modules
-------
banach       normed spaces, dual norms, linear oracles over unit balls
tensor       tensors, atomic decompositions, dual operators, injective norm
projnorm     projective and nuclear norms with primal and dual bounds
attain       attainment certificates, Caratheodory reduction, perturbation
pi_property  norm-one projections and the truncate-project-attain pipeline
cli          JSON batch front end (``python -m pitensor``)
"""

from .banach import (
    NormedSpace,
    ball_argmax,
    discrete_lp,
    dual_norm_eval,
    dual_space,
    lp,
    norm_eval,
    norming_functional,
    polyhedral,
    vertices,
    weighted_lp,
)
from .config import SolverConfig
from .tensor import (
    Decomposition,
    DualOperator,
    Tensor,
    assemble,
    injective_norm,
    normalize_atoms,
    pairing,
)
from .projnorm import (
    nuclear_norm,
    operator_norm,
    proj_norm,
    proj_norm_colgen,
    proj_norm_exact_polyhedral,
    proj_norm_oracle_hilbert,
    proj_norm_oracle_l1,
)
from .attain import (
    caratheodory_reduce,
    certify_attainment,
    extract_attainment_pairs,
    perturb_to_attaining,
)
from .pi_property import (
    AbsoluteNorm,
    SeriesTensor,
    approx_pipeline,
    conditional_expectation_projection,
    direct_sum_projection,
    metric_pi_witness,
    norm_agreement_check,
    tensor_projection,
    truncation_projection,
)

__all__ = [name for name in dir() if not name.startswith("_")]
