"""Finitary partial Horn logic: theories, partial structures, a
deterministic chase, canonical decompositions of homomorphisms, gauge
certificates, n-category term normalization, monotone-light towers of
finite continuous maps, and dependency ranks of GAT signatures."""

from .chase import (
    BUDGET_EXCEEDED,
    COMPLETE,
    INVALID,
    STOPPED,
    UNKNOWN,
    VALID,
    ChaseBudget,
    ChaseResult,
    Presentation,
    ProveResult,
    chase,
    coequalizer,
    induced_hom,
    prove_sequent,
    reduces,
    representing_model,
    term_equivalent,
)
from .decompose import (
    NOT_STABILIZED,
    STABILIZED,
    DecompositionTrace,
    ImageFactorization,
    Scale,
    ScaleEntry,
    StepResult,
    canonical_decomposition,
    decnum,
    equational_scale,
    image_factorization,
    parse_scale,
    scale_step,
    scale_to_text,
)
from .gatrank import (
    AxiomDecl,
    GatSpec,
    OpDecl,
    RankReport,
    SortDecl,
    Violation,
    analyze,
    decnum_bound,
    dependency_rank,
    gat_from_json,
    gat_to_json,
    gat_to_text,
    load_gat,
    parse_gat,
)
from .gauge import (
    GaugeCertificate,
    GaugeEntry,
    GaugeRow,
    GaugeRules,
    NcatGaugeRules,
    TableGaugeRules,
    check_gauge,
    enumerate_terms,
    ladder_gauge_rules,
    ladder_theory,
    load_gauge_rules,
    ncat_gauge_rules,
    ncat_is_normal,
    ncat_normalize,
    ncat_sharp,
    ncat_theory,
)
from .structure import (
    Hom,
    HomReport,
    ModelReport,
    NamedModel,
    PartialStructure,
    assignments,
    check_structure,
    compose_hom,
    empty_structure,
    enumerate_homs,
    eval_term,
    find_isomorphism,
    holds,
    hom_from_json,
    hom_to_json,
    hom_to_text,
    identity_hom,
    is_hom,
    is_model,
    load_hom,
    load_model,
    model_from_json,
    model_to_json,
    model_to_text,
    parse_hom,
    parse_model,
    validates,
)
from .syntax import (
    TOP,
    App,
    Atom,
    Context,
    Def,
    Eq,
    FuncDecl,
    HornFormula,
    ParseError,
    RawTerm,
    Rel,
    RelDecl,
    Sequent,
    Signature,
    SortError,
    Theory,
    Var,
    check_sequent,
    check_term,
    check_theory,
    formula_to_text,
    load_theory,
    parse_formula,
    parse_sequent,
    parse_term,
    parse_theory,
    sequent_to_text,
    term_to_text,
    theory_from_json,
    theory_to_json,
    theory_to_text,
)
from .topdec import (
    ContMap,
    FinSpace,
    TopStep,
    TopTrace,
    connected_components,
    discrete_space,
    indiscrete_space,
    is_continuous,
    is_light,
    is_monotone,
    is_open,
    koizumi_map,
    koizumi_space,
    monotone_light_decomposition,
    monotone_light_step,
)

__version__ = "0.1.0"
