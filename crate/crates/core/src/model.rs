//! Domain types shared by every stage of the pipeline.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type Year = i32;

/// Lowest and highest weight a pillar or indicator may carry.
pub const MIN_WEIGHT: f64 = 0.0;
pub const MAX_WEIGHT: f64 = 10.0;

/// ISO-3166 alpha-3 country code, always three upper-case ASCII letters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CountryCode(String);

impl CountryCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for CountryCode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.len() == 3 && s.bytes().all(|b| b.is_ascii_uppercase()) {
            Ok(CountryCode(s.to_owned()))
        } else {
            Err(format!("`{s}` is not an ISO-3166 alpha-3 code"))
        }
    }
}

impl TryFrom<String> for CountryCode {
    type Error = String;

    fn try_from(value: String) -> std::result::Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<CountryCode> for String {
    fn from(code: CountryCode) -> Self {
        code.0
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Whether the per-capita view divides an indicator by population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleMode {
    /// Counts and currency totals; divided by population in the per-capita view.
    Absolute,
    /// Ratios, shares, indices, speeds and binary flags; never rescaled.
    Rate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorDefinition {
    pub id: String,
    pub display_name: String,
    pub pillar_id: String,
    pub default_weight: f64,
    pub scale_mode: ScaleMode,
    pub sub_indices: BTreeSet<String>,
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PillarDefinition {
    pub id: String,
    pub display_name: String,
    pub default_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryDefinition {
    pub code: CountryCode,
    pub display_name: String,
}

/// An index computed over a restricted set of indicators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubIndexDefinition {
    pub id: String,
    pub display_name: String,
    pub indicator_ids: Vec<String>,
}

impl SubIndexDefinition {
    pub const INNOVATION: &'static str = "innovation";
    pub const ECONOMIC_COMPETITIVENESS: &'static str = "economic_competitiveness";
    pub const POLICY_GOVERNANCE_PUBLIC: &'static str = "policy_governance_public";

    pub fn new(id: impl Into<String>, indicator_ids: impl IntoIterator<Item = impl Into<String>>) -> Self {
        let id = id.into();
        SubIndexDefinition {
            display_name: id.clone(),
            id,
            indicator_ids: indicator_ids.into_iter().map(Into::into).collect(),
        }
    }

    pub fn indicator_set(&self) -> BTreeSet<String> {
        self.indicator_ids.iter().cloned().collect()
    }
}

/// Pillars, indicators, sub-indices and the country universe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub pillars: Vec<PillarDefinition>,
    pub indicators: Vec<IndicatorDefinition>,
    pub sub_indices: Vec<SubIndexDefinition>,
    pub countries: Vec<CountryDefinition>,
    /// Countries kept regardless of the coverage threshold.
    pub inclusion_overrides: BTreeSet<CountryCode>,
}

impl Metadata {
    pub fn pillar(&self, id: &str) -> Option<&PillarDefinition> {
        self.pillars.iter().find(|p| p.id == id)
    }

    pub fn indicator(&self, id: &str) -> Option<&IndicatorDefinition> {
        self.indicators.iter().find(|i| i.id == id)
    }

    pub fn sub_index(&self, id: &str) -> Option<&SubIndexDefinition> {
        self.sub_indices.iter().find(|s| s.id == id)
    }

    pub fn indicators_of<'a>(&'a self, pillar_id: &'a str) -> impl Iterator<Item = &'a IndicatorDefinition> + 'a {
        self.indicators.iter().filter(move |i| i.pillar_id == pillar_id)
    }

    pub fn indicator_ids(&self) -> BTreeSet<String> {
        self.indicators.iter().map(|i| i.id.clone()).collect()
    }

    pub fn country_codes(&self) -> BTreeSet<CountryCode> {
        self.countries.iter().map(|c| c.code.clone()).collect()
    }

    pub fn default_weights(&self) -> WeightConfig {
        WeightConfig {
            indicator_weights: self.indicators.iter().map(|i| (i.id.clone(), i.default_weight)).collect(),
            pillar_weights: self.pillars.iter().map(|p| (p.id.clone(), p.default_weight)).collect(),
        }
    }

    /// Copy of this metadata with one indicator removed everywhere.
    pub fn without_indicator(&self, id: &str) -> Metadata {
        let mut out = self.clone();
        out.indicators.retain(|i| i.id != id);
        for sub in &mut out.sub_indices {
            sub.indicator_ids.retain(|i| i != id);
        }
        out
    }

    /// Checks id uniqueness, pillar references, sub-index membership and weight ranges.
    pub fn validate(&self) -> Result<()> {
        let mut pillar_ids = BTreeSet::new();
        for pillar in &self.pillars {
            if !pillar_ids.insert(pillar.id.as_str()) {
                return Err(Error::InvalidMetadata(format!("duplicate pillar id `{}`", pillar.id)));
            }
            check_weight(&pillar.id, pillar.default_weight)?;
        }
        let mut indicator_ids = BTreeSet::new();
        for indicator in &self.indicators {
            if !indicator_ids.insert(indicator.id.as_str()) {
                return Err(Error::InvalidMetadata(format!(
                    "duplicate indicator id `{}`",
                    indicator.id
                )));
            }
            if !pillar_ids.contains(indicator.pillar_id.as_str()) {
                return Err(Error::UnknownPillar(indicator.pillar_id.clone()));
            }
            check_weight(&indicator.id, indicator.default_weight)?;
        }
        let mut sub_ids = BTreeSet::new();
        for sub in &self.sub_indices {
            if !sub_ids.insert(sub.id.as_str()) {
                return Err(Error::InvalidMetadata(format!("duplicate sub-index id `{}`", sub.id)));
            }
            if sub.indicator_ids.is_empty() {
                return Err(Error::InvalidMetadata(format!("sub-index `{}` lists no indicators", sub.id)));
            }
            for id in &sub.indicator_ids {
                if !indicator_ids.contains(id.as_str()) {
                    return Err(Error::UnknownIndicator(id.clone()));
                }
            }
        }
        let mut codes = BTreeSet::new();
        for country in &self.countries {
            if !codes.insert(&country.code) {
                return Err(Error::InvalidMetadata(format!("duplicate country `{}`", country.code)));
            }
        }
        if let Some(code) = self.inclusion_overrides.iter().find(|c| !codes.contains(c)) {
            return Err(Error::InvalidMetadata(format!("override country `{code}` is not listed")));
        }
        Ok(())
    }
}

pub(crate) fn check_weight(id: &str, value: f64) -> Result<()> {
    if (MIN_WEIGHT..=MAX_WEIGHT).contains(&value) {
        Ok(())
    } else {
        Err(Error::WeightOutOfRange { id: id.to_owned(), value })
    }
}

/// Indicator weights and pillar weights, each in [0, 10].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    pub indicator_weights: BTreeMap<String, f64>,
    pub pillar_weights: BTreeMap<String, f64>,
}

impl WeightConfig {
    /// Weight of an indicator; ids without an entry weigh nothing.
    pub fn indicator(&self, id: &str) -> f64 {
        self.indicator_weights.get(id).copied().unwrap_or(0.0)
    }

    pub fn pillar(&self, id: &str) -> f64 {
        self.pillar_weights.get(id).copied().unwrap_or(0.0)
    }

    /// Range checks, id checks against `metadata`, and a positive pillar-weight total.
    ///
    /// A pillar whose indicator weights are all zero is allowed: the pipeline
    /// drops it the same way it drops a pillar with no data.
    pub fn validate(&self, metadata: &Metadata) -> Result<()> {
        for (id, &w) in &self.indicator_weights {
            if metadata.indicator(id).is_none() {
                return Err(Error::UnknownIndicator(id.clone()));
            }
            check_weight(id, w)?;
        }
        for (id, &w) in &self.pillar_weights {
            if metadata.pillar(id).is_none() {
                return Err(Error::UnknownPillar(id.clone()));
            }
            check_weight(id, w)?;
        }
        if self.pillar_weights.values().sum::<f64>() <= 0.0 {
            return Err(Error::ZeroWeightSum {
                scope: "pillar weights".into(),
            });
        }
        Ok(())
    }

    /// Merges a partial override on top of these weights and validates the result.
    pub fn with_overrides(&self, overrides: &WeightOverrides, metadata: &Metadata) -> Result<WeightConfig> {
        let mut merged = self.clone();
        for (id, &w) in &overrides.indicator_weights {
            if metadata.indicator(id).is_none() {
                return Err(Error::UnknownIndicator(id.clone()));
            }
            check_weight(id, w)?;
            merged.indicator_weights.insert(id.clone(), w);
        }
        for (id, &w) in &overrides.pillar_weights {
            if metadata.pillar(id).is_none() {
                return Err(Error::UnknownPillar(id.clone()));
            }
            check_weight(id, w)?;
            merged.pillar_weights.insert(id.clone(), w);
        }
        merged.validate(metadata)?;
        Ok(merged)
    }

    /// Short stable digest identifying this weight configuration.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for (label, map) in [("i", &self.indicator_weights), ("p", &self.pillar_weights)] {
            for (id, w) in map {
                hasher.update(label.as_bytes());
                hasher.update(id.as_bytes());
                hasher.update([0u8]);
                // -0.0 and 0.0 mean the same weight
                hasher.update((w + 0.0).to_bits().to_le_bytes());
            }
        }
        hasher.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Partial weight map; ids that are not listed keep their current weight.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightOverrides {
    #[serde(default)]
    pub indicator_weights: BTreeMap<String, f64>,
    #[serde(default)]
    pub pillar_weights: BTreeMap<String, f64>,
}

/// Raw observations keyed by (country, year, indicator). A missing key is a
/// missing observation; stored values are always finite.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservationTable {
    // keyed year-first so one indicator-year slice is a contiguous range
    entries: BTreeMap<(Year, String, CountryCode), f64>,
    countries: BTreeSet<CountryCode>,
    years: BTreeSet<Year>,
}

impl ObservationTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_countries(countries: impl IntoIterator<Item = CountryCode>) -> Self {
        ObservationTable {
            countries: countries.into_iter().collect(),
            ..Self::default()
        }
    }

    /// Adds a country to the scored universe even if it has no observations.
    pub fn register_country(&mut self, country: CountryCode) {
        self.countries.insert(country);
    }

    pub fn register_year(&mut self, year: Year) {
        self.years.insert(year);
    }

    pub fn insert(&mut self, country: CountryCode, year: Year, indicator: impl Into<String>, value: f64) -> Result<()> {
        let indicator = indicator.into();
        if !value.is_finite() {
            return Err(Error::NonFiniteValue { country, year, indicator });
        }
        let key = (year, indicator, country);
        if self.entries.contains_key(&key) {
            let (year, indicator, country) = key;
            return Err(Error::DuplicateKey { country, year, indicator });
        }
        self.countries.insert(key.2.clone());
        self.years.insert(year);
        self.entries.insert(key, value);
        Ok(())
    }

    pub fn get(&self, country: &CountryCode, year: Year, indicator: &str) -> Option<f64> {
        self.entries.get(&(year, indicator.to_owned(), country.clone())).copied()
    }

    /// Observed values of one indicator in one year.
    pub fn slice<'a>(&'a self, year: Year, indicator: &'a str) -> impl Iterator<Item = (&'a CountryCode, f64)> + 'a {
        self.entries
            .range((year, indicator.to_owned(), min_code())..)
            .take_while(move |((y, i, _), _)| *y == year && i == indicator)
            .map(|((_, _, c), v)| (c, *v))
    }

    /// All entries ordered by (year, indicator, country).
    pub fn iter(&self) -> impl Iterator<Item = (&CountryCode, Year, &str, f64)> {
        self.entries.iter().map(|((y, i, c), v)| (c, *y, i.as_str(), *v))
    }

    pub fn countries(&self) -> &BTreeSet<CountryCode> {
        &self.countries
    }

    pub fn years(&self) -> &BTreeSet<Year> {
        &self.years
    }

    pub fn has_year(&self, year: Year) -> bool {
        self.years.contains(&year)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Same countries, only the entries of `year`.
    pub fn restrict_to_year(&self, year: Year) -> ObservationTable {
        ObservationTable {
            entries: self
                .entries
                .range((year, String::new(), min_code())..)
                .take_while(|((y, _, _), _)| *y == year)
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
            countries: self.countries.clone(),
            years: self.years.iter().copied().filter(|y| *y == year).collect(),
        }
    }

    /// Drops every value of `indicator` (the country and year universes are kept).
    pub fn remove_indicator(&mut self, indicator: &str) {
        self.entries.retain(|(_, i, _), _| i != indicator);
    }

    pub fn remove(&mut self, country: &CountryCode, year: Year, indicator: &str) -> Option<f64> {
        self.entries.remove(&(year, indicator.to_owned(), country.clone()))
    }

    /// Applies `f` to every stored value. `f` must return finite numbers.
    pub(crate) fn map_values(&self, mut f: impl FnMut(&CountryCode, Year, &str, f64) -> Result<f64>) -> Result<ObservationTable> {
        let mut entries = BTreeMap::new();
        for ((y, i, c), v) in &self.entries {
            let value = f(c, *y, i, *v)?;
            debug_assert!(value.is_finite());
            entries.insert((*y, i.clone(), c.clone()), value);
        }
        Ok(ObservationTable {
            entries,
            countries: self.countries.clone(),
            years: self.years.clone(),
        })
    }
}

fn min_code() -> CountryCode {
    CountryCode(String::new())
}

/// Population by (country, year), in persons.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PopulationTable {
    entries: BTreeMap<(CountryCode, Year), u64>,
}

impl PopulationTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, country: CountryCode, year: Year, population: u64) -> Result<()> {
        if population == 0 {
            return Err(Error::NonPositivePopulation { country, year });
        }
        let key = (country, year);
        if self.entries.contains_key(&key) {
            return Err(Error::DuplicateKey {
                country: key.0,
                year: key.1,
                indicator: "population".into(),
            });
        }
        self.entries.insert(key, population);
        Ok(())
    }

    pub fn get(&self, country: &CountryCode, year: Year) -> Option<u64> {
        self.entries.get(&(country.clone(), year)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CountryCode, Year, u64)> {
        self.entries.iter().map(|((c, y), p)| (c, *y, *p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
