//! Risk factor catalog.

use std::borrow::Borrow;
use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Stable identifier of a risk factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactorId(String);

impl FactorId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for FactorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&self.0)
    }
}

impl Borrow<str> for FactorId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for FactorId {
    fn from(id: &str) -> Self {
        Self(id.to_owned())
    }
}

impl From<String> for FactorId {
    fn from(id: String) -> Self {
        Self(id)
    }
}

/// External risks are uncontrolled, internal ones controlled by the customer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RiskCategory {
    /// Price, exchange-rate, currency and market risks.
    ExternalEconomic,
    /// Changes of statutory documents, payment-related risks.
    ExternalAdministrative,
    /// Breach of contract, information leaks, price growth on the provider side.
    ExternalProvider,
    /// Untimely receipt of information.
    InternalInformation,
    /// Low professional level of decision makers.
    InternalPersonal,
    /// Lack of funding.
    InternalFinancial,
    Uncategorized,
}

impl RiskCategory {
    pub fn is_external(self) -> bool {
        matches!(
            self,
            Self::ExternalEconomic | Self::ExternalAdministrative | Self::ExternalProvider
        )
    }

    pub fn is_internal(self) -> bool {
        matches!(
            self,
            Self::InternalInformation | Self::InternalPersonal | Self::InternalFinancial
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RiskFactor {
    pub id: FactorId,
    pub name: String,
    pub category: RiskCategory,
}

impl RiskFactor {
    pub fn new(id: impl Into<FactorId>, name: impl Into<String>, category: RiskCategory) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            category,
        }
    }
}

/// Ordered set of risk factors with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<RiskFactor>", into = "Vec<RiskFactor>")]
pub struct FactorCatalog {
    factors: Vec<RiskFactor>,
}

impl FactorCatalog {
    pub fn new(factors: Vec<RiskFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Empty("factor catalog"));
        }
        ensure_unique("factor", factors.iter().map(|f| f.id.as_str()))?;
        Ok(Self { factors })
    }

    /// The nine factors of the reference survey, in survey order.
    pub fn reference() -> Self {
        use RiskCategory::*;
        let factors = vec![
            RiskFactor::new("experience", "Experience", ExternalProvider),
            RiskFactor::new("image", "Image", ExternalProvider),
            RiskFactor::new(
                "production_scale",
                "The scale of production",
                ExternalProvider,
            ),
            RiskFactor::new("execution_term", "The term of execution", ExternalProvider),
            RiskFactor::new(
                "financial_condition",
                "Financial condition",
                ExternalProvider,
            ),
            RiskFactor::new(
                "service_price",
                "The price of the service",
                ExternalEconomic,
            ),
            RiskFactor::new(
                "financing_source",
                "The source of financing",
                InternalFinancial,
            ),
            RiskFactor::new(
                "national_identity",
                "National identity",
                ExternalAdministrative,
            ),
            RiskFactor::new(
                "advertising_activity",
                "Advertising activity",
                Uncategorized,
            ),
        ];
        Self { factors }
    }

    pub fn factors(&self) -> &[RiskFactor] {
        &self.factors
    }

    pub fn ids(&self) -> impl Iterator<Item = &FactorId> {
        self.factors.iter().map(|f| &f.id)
    }

    pub fn get(&self, id: &str) -> Option<&RiskFactor> {
        self.factors.iter().find(|f| f.id.as_str() == id)
    }

    /// Display name for `id`, falling back to the id itself.
    pub fn name_of<'a>(&'a self, id: &'a str) -> &'a str {
        self.get(id).map_or(id, |f| f.name.as_str())
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

impl TryFrom<Vec<RiskFactor>> for FactorCatalog {
    type Error = Error;

    fn try_from(factors: Vec<RiskFactor>) -> Result<Self> {
        Self::new(factors)
    }
}

impl From<FactorCatalog> for Vec<RiskFactor> {
    fn from(catalog: FactorCatalog) -> Self {
        catalog.factors
    }
}

pub(crate) fn ensure_unique<'a>(
    kind: &'static str,
    ids: impl IntoIterator<Item = &'a str>,
) -> Result<()> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::DuplicateId {
                kind,
                id: id.to_owned(),
            });
        }
    }
    Ok(())
}

/// Compares two factor id sets, returning a structural error that lists the
/// ids missing from `actual` and the ones it has in excess.
pub(crate) fn ensure_same_factors<'a, 'b>(
    expected: impl IntoIterator<Item = &'a FactorId>,
    actual: impl IntoIterator<Item = &'b FactorId>,
) -> Result<()> {
    let expected: Vec<&FactorId> = expected.into_iter().collect();
    let actual: Vec<&FactorId> = actual.into_iter().collect();
    let expected_set: HashSet<&str> = expected.iter().map(|id| id.as_str()).collect();
    let actual_set: HashSet<&str> = actual.iter().map(|id| id.as_str()).collect();
    let missing: Vec<String> = expected
        .iter()
        .filter(|id| !actual_set.contains(id.as_str()))
        .map(|id| id.to_string())
        .collect();
    let extra: Vec<String> = actual
        .iter()
        .filter(|id| !expected_set.contains(id.as_str()))
        .map(|id| id.to_string())
        .collect();
    if missing.is_empty() && extra.is_empty() {
        Ok(())
    } else {
        Err(Error::FactorSetMismatch { missing, extra })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_catalog_has_nine_unique_factors() {
        let catalog = FactorCatalog::reference();
        assert_eq!(catalog.len(), 9);
        assert!(FactorCatalog::new(catalog.factors().to_vec()).is_ok());
        assert_eq!(catalog.name_of("experience"), "Experience");
        assert_eq!(
            catalog.name_of("advertising_activity"),
            "Advertising activity"
        );
        assert_eq!(catalog.name_of("nope"), "nope");
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let f = RiskFactor::new("a", "A", RiskCategory::Uncategorized);
        let err = FactorCatalog::new(vec![f.clone(), f]).unwrap_err();
        assert!(matches!(err, Error::DuplicateId { kind: "factor", .. }));
        assert!(FactorCatalog::new(vec![]).is_err());
    }

    #[test]
    fn category_serializes_kebab_case() {
        let json = serde_json::to_string(&RiskCategory::ExternalEconomic).unwrap();
        assert_eq!(json, "\"external-economic\"");
        assert!(RiskCategory::InternalPersonal.is_internal());
        assert!(RiskCategory::ExternalProvider.is_external());
        assert!(!RiskCategory::Uncategorized.is_external());
    }

    #[test]
    fn factor_set_mismatch_lists_both_sides() {
        let a: Vec<FactorId> = vec!["x".into(), "y".into()];
        let b: Vec<FactorId> = vec!["y".into(), "z".into()];
        let err = ensure_same_factors(&a, &b).unwrap_err();
        assert_eq!(
            err,
            Error::FactorSetMismatch {
                missing: vec!["x".into()],
                extra: vec!["z".into()],
            }
        );
        assert!(err.is_structural());
    }
}
