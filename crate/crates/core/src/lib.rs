//! Risk scoring engine for outsourcing provider selection.
//!
//! Two tiers of expert input feed the engine:
//!
//! * market-wide panel surveys, bucketed into score pockets, which yield a
//!   mean risk per factor and from it a normalized factor weight
//!   ([`WeightProfile`]); these change rarely;
//! * customer-side 1–5 scores of each candidate provider on every factor
//!   ([`ProviderAssessment`]); these are refreshed as often as needed.
//!
//! The weighted sum of a provider's scores is its integral risk. Each
//! [`RiskReport`] also breaks the risk down per factor into weight,
//! relevance and contribution shares.
//!
//! Everything here is pure computation. Persistence lives in
//! `provrisk-store`, the HTTP API in `provrisk-service`.

pub mod assessment;
pub mod catalog;
pub mod distribution;
mod error;
pub mod panels;
pub mod present;
pub mod ranking;
pub mod scale;
pub mod scoring;
pub mod weights;

pub use assessment::{ProviderAssessment, ProviderId, Score};
pub use catalog::{FactorCatalog, FactorId, RiskCategory, RiskFactor};
pub use distribution::{
    mean_factor_score, renormalize_distribution, validate_distribution, DistributionCheck,
    FactorDistribution, DEFAULT_TOLERANCE,
};
pub use error::{Error, Result};
pub use panels::{
    average_panels, build_weight_profile, panel_consistency, pearson, ConsistencyVerdict,
    DistributionDiagnostic, Panel, PanelSurvey, ProfileBuild, WeightPolicy,
    DEFAULT_CONSISTENCY_THRESHOLD,
};
pub use ranking::{rank_providers, ranked_reports, Direction, RankedProvider, RankedReport};
pub use scale::PocketScale;
pub use scoring::{
    evaluate, factor_contributions, integral_risk, relevance_coefficients, FactorBreakdown,
    RiskReport,
};
pub use weights::{normalize_weights, FactorWeight, WeightProfile};
