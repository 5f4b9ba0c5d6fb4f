"""Exact block-stable matrix algebra for finite-time consensus and averaging."""

from .chains import (
    ChainCertificate,
    PartitionChain,
    grouped_product,
    similarity_key,
    stable_rows,
    structural_preconditions,
    swap_similar,
    validate_chain,
)
from .degroot import (
    ConsensusCertificate,
    DeGrootModel,
    certify,
    check_submodel,
    find_chain,
    freeze_check,
    simulate,
    step,
)
from .distributed import (
    Graph,
    VertexLabeling,
    WeightSchedule,
    hybrid_leader_scenario,
    hypercube_schedule,
    run_schedule,
    s3_swapping_schedule,
    verify_embedding,
)
from .errors import (
    ConsistencyError,
    GMethodError,
    InvalidInputError,
    NotBlockStableError,
    NotCertifiedError,
    SimilarityError,
)
from .matrix import RMatrix
from .partitions import Partition, is_finer, singletons, split_around, trivial
from .stable import (
    GroupedMatrix,
    MatrixClass,
    classify,
    coarsest_stable_partition,
    grouped,
    is_block_stable,
    is_generalized_stochastic,
    is_stable,
)

__version__ = "0.1.0"
