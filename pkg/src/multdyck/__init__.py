"""Quadratic characters with non-negative partial sums, multiplicative Dyck
paths and random multiplicative functions."""

from multdyck.errors import CapacityError, DomainError
from multdyck.numtheory import (
    KernelMaskTable,
    PrimeTable,
    kernel_masks,
    legendre,
    mobius_squarefree,
    residue_sign_table,
    sieve,
)
from multdyck.lplus import CharacterWalk, ScanReport, is_member, nth_member, scan, walk
from multdyck.paths import (
    MCountResult,
    SignAssignment,
    Table1Row,
    exact_m,
    is_incomplete_dyck,
    table1,
)
from multdyck.random_mult import (
    MCEstimate,
    MomentRecord,
    RMFSample,
    SubGaussianResult,
    TailEstimate,
    ZetaEval,
    mc_m,
    sample_assignment,
    second_moment_bruteforce,
    second_moment_formula,
    subgaussian_check,
    tail_integral,
    wilson_interval,
    zeta_truncated,
)

__version__ = "0.1.0"
