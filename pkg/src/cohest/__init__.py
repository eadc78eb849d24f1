"""Lower bounds on multipartite coherence from stabilizer expectation values."""
from .coherence import (
    CoherenceReport,
    Family,
    Measure,
    exact_cg_pure,
    exact_cl1,
    exact_cl2,
    exact_cr,
    family_exact,
    lower_cg,
    lower_cl1_cr_pair,
    lower_cl2,
    lower_cr,
    spectrum_bounds,
    tightness,
    uv_sequence,
    witness_bound,
)
from .majorization import join, majorizes, meet_explicit, meet_over_polytope, min_topk_sum
from .measurement import ExpectationRecord, build_constraints, ingest_csv, simulate_record
from .stabilizers import PauliString, expand_group, ghz_generators, graph_generators
from .states import depolarize, ghz, graph_state, linear_cluster

__version__ = "0.1.0"

__all__ = [
    "CoherenceReport",
    "Family",
    "Measure",
    "exact_cg_pure",
    "exact_cl1",
    "exact_cl2",
    "exact_cr",
    "family_exact",
    "lower_cg",
    "lower_cl1_cr_pair",
    "lower_cl2",
    "lower_cr",
    "spectrum_bounds",
    "tightness",
    "uv_sequence",
    "witness_bound",
    "join",
    "majorizes",
    "meet_explicit",
    "meet_over_polytope",
    "min_topk_sum",
    "ExpectationRecord",
    "build_constraints",
    "ingest_csv",
    "simulate_record",
    "PauliString",
    "expand_group",
    "ghz_generators",
    "graph_generators",
    "depolarize",
    "ghz",
    "graph_state",
    "linear_cluster",
]
