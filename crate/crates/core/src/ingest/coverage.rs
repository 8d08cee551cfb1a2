use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::model::{CountryCode, Metadata, ObservationTable, Year};
use crate::num::{ser_f64, ser_map_f64, ser_map_opt_f64};

/// Minimum mean coverage over the recent window before a country is flagged.
pub const COVERAGE_THRESHOLD: f64 = 0.70;
/// Number of most recent years averaged by [`validate_inclusion`].
pub const COVERAGE_WINDOW: usize = 3;

// Means are sums of a few fractions; allow for rounding at the threshold.
const THRESHOLD_SLACK: f64 = 1e-9;

/// Share of data present, per country-year and per indicator-year.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub years: Vec<Year>,
    /// country -> year -> share of that year's applicable indicators present
    pub by_country_year: BTreeMap<CountryCode, CountryCoverage>,
    /// indicator -> year -> share of countries present; `None` when nobody
    /// reported the indicator that year
    pub by_indicator_year: BTreeMap<String, IndicatorCoverage>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CountryCoverage(#[serde(serialize_with = "ser_map_f64")] pub BTreeMap<Year, f64>);

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct IndicatorCoverage(#[serde(serialize_with = "ser_map_opt_f64")] pub BTreeMap<Year, Option<f64>>);

/// An indicator is applicable in a year when at least one country reported it.
pub fn compute_coverage(observations: &ObservationTable, metadata: &Metadata) -> CoverageReport {
    let countries = observations.countries();
    let years: Vec<Year> = observations.years().iter().copied().collect();

    let mut by_indicator_year = BTreeMap::new();
    let mut applicable: BTreeMap<Year, BTreeSet<&str>> = BTreeMap::new();
    let mut present: BTreeMap<(&CountryCode, Year), usize> = BTreeMap::new();
    for indicator in &metadata.indicators {
        let mut per_year = BTreeMap::new();
        for &year in &years {
            let reporters: Vec<&CountryCode> = observations
                .slice(year, &indicator.id)
                .map(|(c, _)| c)
                .filter(|c| countries.contains(*c))
                .collect();
            if reporters.is_empty() {
                per_year.insert(year, None);
                continue;
            }
            applicable.entry(year).or_default().insert(&indicator.id);
            for c in &reporters {
                *present.entry((c, year)).or_default() += 1;
            }
            per_year.insert(year, Some(reporters.len() as f64 / countries.len() as f64));
        }
        by_indicator_year.insert(indicator.id.clone(), IndicatorCoverage(per_year));
    }

    let by_country_year = countries
        .iter()
        .map(|country| {
            let per_year = years
                .iter()
                .map(|&year| {
                    let denominator = applicable.get(&year).map_or(0, BTreeSet::len);
                    let count = present.get(&(country, year)).copied().unwrap_or(0);
                    let fraction = if denominator == 0 {
                        0.0
                    } else {
                        count as f64 / denominator as f64
                    };
                    (year, fraction)
                })
                .collect();
            (country.clone(), CountryCoverage(per_year))
        })
        .collect();

    CoverageReport {
        years,
        by_country_year,
        by_indicator_year,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoteKind {
    /// Below threshold and not on the override list.
    Warning,
    /// Below threshold but kept deliberately; interpret with caution.
    Caution,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionNote {
    pub country: CountryCode,
    pub kind: NoteKind,
    #[serde(serialize_with = "ser_f64")]
    pub mean_coverage: f64,
    pub years: Vec<Year>,
}

impl std::fmt::Display for InclusionNote {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let span = match (self.years.first(), self.years.last()) {
            (Some(a), Some(b)) if a != b => format!("{a}-{b}"),
            (Some(a), _) => a.to_string(),
            _ => String::new(),
        };
        let pct = self.mean_coverage * 100.0;
        match self.kind {
            NoteKind::Warning => write!(
                f,
                "warning: {} averages {pct:.1}% data coverage over {span}, below the inclusion threshold",
                self.country
            ),
            NoteKind::Caution => write!(
                f,
                "note: {} averages {pct:.1}% data coverage over {span}; included by override, interpret with caution",
                self.country
            ),
        }
    }
}

/// Flags countries whose mean coverage over the last `window` years falls
/// below `threshold`. Countries at exactly the threshold pass. Nothing is
/// ever excluded; override countries get a caution note instead of a warning.
pub fn validate_inclusion(
    coverage: &CoverageReport,
    threshold: f64,
    window: usize,
    overrides: &BTreeSet<CountryCode>,
) -> Vec<InclusionNote> {
    let start = coverage.years.len().saturating_sub(window.max(1));
    let recent = &coverage.years[start..];
    if recent.is_empty() {
        return Vec::new();
    }
    coverage
        .by_country_year
        .iter()
        .filter_map(|(country, per_year)| {
            let mean = recent.iter().map(|y| per_year.0.get(y).copied().unwrap_or(0.0)).sum::<f64>() / recent.len() as f64;
            if mean >= threshold - THRESHOLD_SLACK {
                return None;
            }
            Some(InclusionNote {
                country: country.clone(),
                kind: if overrides.contains(country) {
                    NoteKind::Caution
                } else {
                    NoteKind::Warning
                },
                mean_coverage: mean,
                years: recent.to_vec(),
            })
        })
        .collect()
}
