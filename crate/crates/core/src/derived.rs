//! Indicators computed from lower-level counts rather than observed directly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::model::{CountryCode, ObservationTable, Year};

/// Indicator id under which [`inverted_hhi`] values are stored.
pub const ACADEMIA_INDUSTRY_CONCENTRATION: &str = "academia_industry_concentration";
/// Indicator id under which [`gender_equality_index`] values are stored.
pub const TALENT_GENDER_EQUALITY: &str = "ai_talent_gender_equality";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("no notable models recorded")]
    ZeroTotal,
    #[error("both talent concentrations are zero")]
    BothZero,
    #[error("academia-only plus industry-only models exceed the total")]
    CountsExceedTotal,
    #[error("talent concentration must be a finite non-negative number")]
    InvalidConcentration,
}

/// Notable-model counts for one country-year. `total` includes models
/// produced in academia-industry collaboration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelProductionCounts {
    pub country: CountryCode,
    pub year: Year,
    pub academia_only: u64,
    pub industry_only: u64,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TalentConcentrationPair {
    pub country: CountryCode,
    pub year: Year,
    pub female: f64,
    pub male: f64,
}

/// `1 - (a² + i²)` where `a` and `i` are the academia-only and industry-only
/// shares of all notable models. Zero means production is fully concentrated
/// in one sector; collaborations push the value up.
pub fn inverted_hhi(counts: &ModelProductionCounts) -> Result<f64, MetricError> {
    if counts.total == 0 {
        return Err(MetricError::ZeroTotal);
    }
    if counts.academia_only.saturating_add(counts.industry_only) > counts.total {
        return Err(MetricError::CountsExceedTotal);
    }
    let total = counts.total as f64;
    let academia = counts.academia_only as f64 / total;
    let industry = counts.industry_only as f64 / total;
    Ok(1.0 - (academia * academia + industry * industry))
}

/// `min(female, male) / max(female, male)`: 1 is parity, 0 is complete imbalance.
pub fn gender_equality_index(pair: &TalentConcentrationPair) -> Result<f64, MetricError> {
    let valid = |x: f64| x.is_finite() && x >= 0.0;
    if !valid(pair.female) || !valid(pair.male) {
        return Err(MetricError::InvalidConcentration);
    }
    let hi = pair.female.max(pair.male);
    if hi == 0.0 {
        return Err(MetricError::BothZero);
    }
    Ok(pair.female.min(pair.male) / hi)
}

/// Writes both derived indicators into `table`. Country-years where a metric
/// is undefined (no models, both concentrations zero) are left missing so
/// imputation fills them later.
pub fn insert_derived(
    table: &mut ObservationTable,
    counts: &[ModelProductionCounts],
    pairs: &[TalentConcentrationPair],
) -> Result<(), Error> {
    for c in counts {
        if let Ok(value) = inverted_hhi(c) {
            table.insert(c.country.clone(), c.year, ACADEMIA_INDUSTRY_CONCENTRATION, value)?;
        }
    }
    for p in pairs {
        if let Ok(value) = gender_equality_index(p) {
            table.insert(p.country.clone(), p.year, TALENT_GENDER_EQUALITY, value)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(academia_only: u64, industry_only: u64, total: u64) -> ModelProductionCounts {
        ModelProductionCounts {
            country: "USA".parse().unwrap(),
            year: 2023,
            academia_only,
            industry_only,
            total,
        }
    }

    fn pair(female: f64, male: f64) -> TalentConcentrationPair {
        TalentConcentrationPair {
            country: "USA".parse().unwrap(),
            year: 2023,
            female,
            male,
        }
    }

    #[test]
    fn hhi_examples() {
        assert_eq!(inverted_hhi(&counts(10, 10, 20)), Ok(0.5));
        assert_eq!(inverted_hhi(&counts(20, 0, 20)), Ok(0.0));
        assert_eq!(inverted_hhi(&counts(5, 5, 20)), Ok(0.875));
        assert_eq!(inverted_hhi(&counts(0, 0, 0)), Err(MetricError::ZeroTotal));
        assert_eq!(inverted_hhi(&counts(15, 10, 20)), Err(MetricError::CountsExceedTotal));
    }

    #[test]
    fn gender_examples() {
        assert_eq!(gender_equality_index(&pair(0.03, 0.03)), Ok(1.0));
        assert_eq!(gender_equality_index(&pair(0.02, 0.04)), Ok(0.5));
        assert_eq!(gender_equality_index(&pair(0.0, 0.05)), Ok(0.0));
        assert_eq!(gender_equality_index(&pair(0.0, 0.0)), Err(MetricError::BothZero));
        assert_eq!(gender_equality_index(&pair(-1.0, 0.5)), Err(MetricError::InvalidConcentration));
    }

    #[test]
    fn undefined_values_stay_missing() {
        let mut table = ObservationTable::new();
        let mut zero = counts(0, 0, 0);
        zero.country = "CHN".parse().unwrap();
        insert_derived(&mut table, &[counts(10, 10, 20), zero], &[pair(0.0, 0.0)]).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(
            table.get(&"USA".parse().unwrap(), 2023, ACADEMIA_INDUSTRY_CONCENTRATION),
            Some(0.5)
        );
        assert!(table.countries().contains(&"USA".parse().unwrap()));
    }
}
