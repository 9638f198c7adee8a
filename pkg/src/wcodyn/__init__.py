"""Transitivity certificates for weighted composition operators on weighted
solid function spaces over integer lattices.

The package decides — and certifies by explicit witness construction —
topological transitivity of ``f -> w * (f ∘ alpha)`` on weighted spaces,
disjoint transitivity of several such operators at fixed powers, and
tail-filtered semi-transitivity of operator families with positive scalings.
"""

from .domain import (
    AffineLatticeMap,
    DomainError,
    Region,
    aperiodicity_bound,
    disjoint_aperiodicity_bound,
    iterate_point,
)
from .spaces import (
    ConstantWeight,
    EllPNorm,
    ExpYoung,
    MorreyNorm,
    OrliczNorm,
    PowerYoung,
    ProductWeight,
    RadialPowerWeight,
    SampleFunction,
    SpaceError,
    TableWeight,
    Weight,
    WeightError,
    inf_weight_on,
    norm,
    sup_weight_on,
    validate_weight,
    weighted_norm,
)
from .operators import (
    OperatorError,
    WeightedCompositionOperator,
    apply,
    apply_inverse,
    iterate,
    iterate_log,
    operator_norm_bound,
)
from .criteria import (
    NO_TAIL,
    NO_WITNESS,
    TAIL_FOUND,
    WITNESS_FOUND,
    CriterionError,
    CriterionReport,
    DisjointAperiodicityError,
    DisjointReport,
    DisjointSystem,
    EpsilonReport,
    OperatorFamily,
    Scenario,
    check_disjoint_transitivity,
    check_semi_transitivity,
    check_transitivity,
    gamma_cross,
    lambda_backward,
    lambda_forward,
)
from .witness import (
    OracleResult,
    WitnessError,
    WitnessVector,
    build_supercyclic_witness,
    build_witness,
    epsilon_for_gap,
    feasibility_oracle,
    flatten,
    verify_report,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
