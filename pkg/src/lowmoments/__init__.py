"""Low moments of character sums, zeta sums and random multiplicative functions."""

from .arith import (
    ModulusContext,
    PrimeTable,
    build_modulus_context,
    factorize,
    find_primitive_root,
    is_prime,
    sieve,
)
from .bounds import BoundShape, bound, ratio_report
from .chaos import (
    EulerGrid,
    chaos_discrete_moment,
    chaos_integral_moment,
    discretization_defect,
    euler_product_at,
    expected_defect,
    mertens_product,
    parseval_check,
)
from .charsums import (
    CharacterSumTable,
    bulk_character_sums,
    conditioned_average_char,
    empirical_moment,
    naive_character_sums,
    polynomial_moment_check,
    prime_sums_char,
    tail_fraction,
    theta_moment,
    theta_values,
)
from .estimate import MomentEstimate
from .limits import CAPS, CapacityError
from .partition import (
    PartitionParams,
    SmoothPartition,
    beurling_B,
    derivative_bound_check,
    g_eval,
    partition_eval,
    select_parameters,
    selberg_majorant,
)
from .rmf import (
    RmfSample,
    conditioned_average_rmf,
    evaluate_sum,
    prime_sums_rmf,
    rmf_moment,
    sample_rmf,
    smooth_restricted_sum,
)
from .spectral import dft, idft
from .zetasums import (
    TAverageSpec,
    mv_mean_value_check,
    smoothed_average,
    zeta_moment,
    zeta_partial_sum,
)

__version__ = "0.1.0"
