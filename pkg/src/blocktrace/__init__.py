"""Block-matrix partial traces, determinant and trace inequalities, and a
seeded fuzzing harness that checks them."""

from .blockops import (BlockMatrix, embed, partial_det, partial_trace, partial_transpose,
                       phi_map, ppt_test, reshuffle)
from .errors import BlockTraceError, DomainError, SizeError, UsageError
from .linalg import hermitian_eigs, kron, psd_test
from .randgen import GenSpec, derive_trial_seed, generate
from .sector import sector_angle, sector_membership
from .spectral import complete_sym, elem_sym, schatten_norm

__all__ = [
    "BlockMatrix", "BlockTraceError", "DomainError", "GenSpec", "SizeError", "UsageError",
    "complete_sym", "derive_trial_seed", "elem_sym", "embed", "generate", "hermitian_eigs",
    "kron", "partial_det", "partial_trace", "partial_transpose", "phi_map", "ppt_test",
    "psd_test", "reshuffle", "schatten_norm", "sector_angle", "sector_membership",
]
__version__ = "0.1.0"
