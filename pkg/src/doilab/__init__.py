"""doilab: operator norms, Schur multipliers, discrete double operator
integrals and commutator Lipschitz estimates on finite l_p -> l_q spaces."""

from .norms import (
    INF,
    NormEstimate,
    SearchConfig,
    conjugate_exponent,
    opnorm,
    opnorm_bruteforce,
    opnorm_upper,
    power_iteration_pq,
    vector_norm,
)
from .spectral import (
    ConstantEstimate,
    DiagonalizableOperator,
    assemble,
    diagonalizability_constant,
    functional_calculus,
    spectral_constant,
    spectral_projection,
)
from .schur import (
    MultiplierMask,
    StaircaseDescriptor,
    abs_divided_difference,
    canonicalize_mask,
    divided_difference_matrix,
    hilbert_type_witness,
    multiplier_norm,
    repeat_first_column,
    schur_product,
    sequence_truncation,
    standard_truncation,
    standard_truncation_mask,
)
from .doi import (
    CommutatorReport,
    abs_kernel_constant,
    commutator_transform,
    doi_apply,
    sobolev_weight_norm,
    truncation_bound_check,
)
from .psumming import (
    PSummingContext,
    lipschitz_commutator_check,
    pi_p_norm,
    psumming_definition_ratio,
    psumming_multiplier_norm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
