"""Conditional-expectation sets of finite-branch correspondences, with
constructive convexity witnesses, escape certificates, and an application
layer for finite-action Bayesian games (equilibria, purification, and the
triangular-prior matching-pennies lab)."""

from .attainable import (
    AtomObstruction,
    CondExpBlockSet,
    CondExpSet,
    block_set,
    cond_exp_set,
    convexify_witness,
    derandomize_selection,
    indicator_correspondence,
    limit_escape_certificate,
    membership,
    rademacher_escape,
    uhc_audit,
)
from .correspondences import (
    FiniteIndexedCorrespondence,
    MixedSelection,
    Selection,
    mixed_value,
    one_hot,
    selection_value,
)
from .equilibrium import (
    EquilibriumReport,
    SolveOptions,
    improving_deviation,
    purify_equilibrium,
    solve_behavioral,
    verify_equilibrium,
)
from .games import (
    BayesianGame,
    BehavioralStrategy,
    Entry,
    PlayerSpec,
    PureStrategy,
    TypeCell,
    coarser_info_check,
    derive_interplayer_info,
    expected_payoff,
    interim_payoff,
)
from .measure import Cell, CellKind, MeasureSpaceModel, StepFunction
from .pennies import (
    IntervalUnionStrategy,
    PenniesGame,
    TrianglePrior,
    balance_defect,
    interim_weight,
    no_pure_equilibrium_search,
    pure_profile_gain,
)
from .purification import PurificationCertificate, audit_equivalence, strong_purify

__version__ = "0.1.0"

__all__ = [
    "AtomObstruction",
    "BayesianGame",
    "BehavioralStrategy",
    "Cell",
    "CellKind",
    "CondExpBlockSet",
    "CondExpSet",
    "Entry",
    "EquilibriumReport",
    "FiniteIndexedCorrespondence",
    "IntervalUnionStrategy",
    "MeasureSpaceModel",
    "MixedSelection",
    "PenniesGame",
    "PlayerSpec",
    "PureStrategy",
    "PurificationCertificate",
    "Selection",
    "SolveOptions",
    "StepFunction",
    "TrianglePrior",
    "TypeCell",
    "audit_equivalence",
    "balance_defect",
    "block_set",
    "coarser_info_check",
    "cond_exp_set",
    "convexify_witness",
    "derandomize_selection",
    "derive_interplayer_info",
    "expected_payoff",
    "improving_deviation",
    "indicator_correspondence",
    "interim_payoff",
    "interim_weight",
    "limit_escape_certificate",
    "membership",
    "mixed_value",
    "no_pure_equilibrium_search",
    "one_hot",
    "pure_profile_gain",
    "purify_equilibrium",
    "rademacher_escape",
    "selection_value",
    "solve_behavioral",
    "strong_purify",
    "uhc_audit",
    "verify_equilibrium",
]
