"""Holomorphic flows, composition semigroups and weighted Hardy spaces."""

__version__ = "0.1.0"

from .errors import (ConfigError, DomainEscape, NoConvergence, SemiflowError,
                     TruncationWarning, UnknownCatalogEntry)
from .series import (DiscPoint, PowerSeries, add, compose, compose_with_error, derivative,
                     evaluate, multiply, power_sequence)
from .flow import (Flow, FlowCheckReport, GeneratorFunction, catalog, check_flow_axioms,
                   flow_at_point, solve_cp_series)
from .space import (OperatorMatrix, SpaceNormReport, WeightSequence, check_contraction_property,
                    composition_matrix, evaluation_norm, generator_matrix, operator_norm,
                    space_norm, weights)
from .quasi import (CritsupReport, LambdaReport, check_dirichlet_domination,
                    check_proposition_univ, coupling_sequence, critsup, lambda_report, mobius,
                    univalent_bound, verify_quasicontractive_bound)
from .verify import (GrowthBound, TheoremReport, check_claim1, check_generator_identity,
                     flow_from_semigroup, generator_from_flow, growth_bound, verify_theorem)
