from .norm import (
    FinSupp,
    NormWitness,
    SupportTooLarge,
    as_finsupp,
    fixed_point_residual,
    fixed_point_rhs,
    tp_norm,
    tp_weights,
    tstar_level,
    tstar_norm,
    tstar_weight_vectors,
    tstar_witness,
)
