//! Numerical and exact analysis of pretangent spaces of pointed metric
//! spaces: the three uniqueness conditions, non-uniqueness witnesses, finite
//! pretangent approximations, tangency and tangent equivalence.

pub mod analysis;
pub mod error;
pub mod exact;
pub mod functionals;
pub mod limit;
pub mod metric;
pub mod sequence;
pub mod spaces;
pub mod stability;
pub mod ternary;

pub use analysis::{emit_outputs, parse_config, run_analysis, AnalysisConfig, Report, ScaleSpec, Task};
pub use error::{Error, Result};
pub use exact::{Exact, Real};
pub use functionals::{
    annulus_diameter, condition_i, condition_ii, condition_iii, sphere_gap, tangent_equivalence_epsilon,
    uniqueness_verdict, AnnulusSpec, Condition, ConditionReport, SpherePair, TangentEquivalence, Uniqueness,
    UniquenessVerdict, Verdict,
};
pub use limit::{estimate_limit, LimitEstimate, LimitStatus, Tolerances};
pub use metric::{
    metric_axiom_audit, Exactness, MetricAudit, Point, PointTag, PointedSpace, RadiusProbe, SpaceKind,
    SpaceOracle, SphereSample,
};
pub use sequence::{IndexSelector, NormalizingSequence, PointSequence};
pub use spaces::{build_space, curve_tangent_ray, SpaceSpec};
pub use stability::{
    candidate_library, dtilde, filter_stable, interleave_witness, kappa_cross_check, lemma26_audit,
    nonuniqueness_witness, pretangent_approximation, tangency_check, value_map, AuditOutcome, AuditReport,
    FinitePretangent, KappaCheck, Tangency, TangencyReport, ValueMap, WitnessPair,
};
pub use ternary::{
    ce_truncation, is_cantor, is_extended_cantor, scale3, ternary_value, Membership, MembershipVerdict,
    TernaryNumber,
};
