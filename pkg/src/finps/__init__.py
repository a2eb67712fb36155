"""Exact finite probability spaces, measure-preserving kernels and their dynamics."""

from .core import (ONE, UNIT, ZERO, Dist, FinSpace, Kernel, associator, commutes_with_copy,
                   compose, compose_all, constant, copy, delete, dirac, discard, fmt_rat,
                   identity, is_deterministic, left_unitor, marginals, parse_rat, push, rat,
                   relabel, right_unitor, swap, tensor)
from .ps import (Partition, ProbSpace, PSMorphism, as_equal, bayesian_inverse, block_masses,
                 check_dag_id, dagger, find_ps_iso, is_as_deterministic,
                 partitions_as_isomorphic, ps_compose, ps_equal, ps_identity,
                 quotient_by_partition)
from .dynamics import (DynSystem, EquilibriumReport, InvariantObject, alt_erg_holds,
                       det_invariance_witness, equilibrium_checks, ergodic_decomposition,
                       factor_left_invariant, factor_right_invariant, invariant_object,
                       invariant_partition, is_as_invariant_set, is_det_invariant, is_ergodic,
                       is_left_invariant, is_right_invariant, mixture, reduce_decomposition,
                       reverse_system, strict_invariant_partition)
from .idempotents import (Splitting, absorbing_subset, is_as_idempotent, split_idempotent,
                          splittings_isomorphic, strictify_idempotent,
                          verify_equalizer_coequalizer)
from .exchangeability import (finite_definetti, hewitt_savage_finite, iid, orbit_count,
                              orbit_structure, permutation_system, product_power,
                              uniform_on_orbit, uniform_on_orbit_rdag)
from .errors import (ConsistencyError, FinPSError, InvalidPartition, NotExchangeable,
                     NotMeasurePreserving, NotStochastic, PreconditionError, SpaceMismatch,
                     SpecError)
from .fixtures import fixture, fixtures
from .laws import CaseGen, LawReport, run_law
from .chainspec import ChainSpec, parse_chain_spec

__version__ = "0.1.0"
