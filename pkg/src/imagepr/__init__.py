"""Image partition regularity of matrices at finite scale."""
__version__ = "0.1.0"

from .matrix_core import (  # noqa: E402
    SCHUR,
    VDW_AP2,
    VDW_AP3,
    VDW_AP4,
    RationalMatrix,
    check_first_entries,
    dedup_rows,
    diag_sum,
    drop_irrelevant_columns,
    validate,
)
from .sequence_tools import compress, fs_enumerate, ip_star_falsify, mt_enumerate, mt_matrix_rows  # noqa: E402
from .constructions import BlockStructure, InsertionSpec, block_concat, build_insertion, segmented_check  # noqa: E402
from .ipr_engine import (  # noqa: E402
    Coloring,
    build_image_hypergraph,
    min_forcing_N,
    solve_coloring,
    verify_ipr_at,
    witness_for_coloring,
)
from .near_idempotent import NearZeroContext, diag_sum_witness, near_zero_transfer, search_provider  # noqa: E402
