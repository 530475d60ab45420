"""Exact symbolic topology of definable subsets of the real line."""

from .deciders import (AlternatingWitness, DisjointOpenCover, SchemaTailChain,
                       SurjectionOntoN, Transversal, WindowChain,
                       build_transversal, chain_valid, clopen_chain_intersection,
                       cover_to_surjection, decide_ccc, decide_gcc_sequences,
                       decide_gcc_transversal, split_clopen, verify_cover,
                       witness_non_gcc_cover)
from .dsl import format_set, parse_dsl
from .engine import (complement_in, intersect, normalize, semantic_equal,
                     semantic_subset, union)
from .errors import (DomainError, InvalidCut, NotApplicable, NotCompact, NotGcc,
                     NotMember, ParseError, RealLineError, Unnormalizable,
                     UnsupportedConfig)
from .maps import PLMap, eval_map, extremum_report, pushforward
from .planar import (PlanarExampleConfig, check_xn_in_closure_An,
                     detect_height_collisions, fixture_verdicts, member_planar)
from .report import analyze
from .sets import IntervalAtom, PointAtom, RealSet, SchemaAtom, member, raw_member
from .surject import (build_surjection, cantor_eval, cantor_path_to,
                      continuity_samples, eval_surjection, solve_preimage)
from .topology import (closure, components, interior,
                       local_connectedness_defects, predicates)

__version__ = "0.1.0"
