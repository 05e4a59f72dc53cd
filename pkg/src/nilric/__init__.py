"""Ricci curvature signatures of left-invariant metrics on nilpotent Lie groups."""

__version__ = "0.1.0"

from .algebra import (
    MetricFrame,
    StructureTensor,
    Subspace,
    act,
    center,
    central_series,
    derivations,
    derived_ideal,
)
from .catalog import builtin, builtin_names, load, resolve, sample_metrics, save
from .curvature import linearization, moment_pairing, pi_action, pq_forms, ricci
from .invariants import (
    InvariantProfile,
    SignatureTriple,
    conjecture_set,
    lower_bounds,
    profile,
    r_mu,
    signature,
    theorem_set,
)
from .orbit_flow import FlowOptions, FlowReport, SubgroupSpec, minimize, standard_decomposition, verify_kernel
from .realization import (
    RealizationResult,
    check_s_transversality,
    homotopy_signature_check,
    realize,
    schur_reduce,
)
