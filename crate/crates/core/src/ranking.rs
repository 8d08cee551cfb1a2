//! Annual ranking tables, the per-capita view and rank trajectories.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CountryCode, Metadata, ObservationTable, PopulationTable, ScaleMode, WeightConfig, Year};
use crate::num::{ser_f64, ser_map_f64};
use crate::pipeline::{compute_scores, IndicatorScore, ScoreCard};

/// Absolute indicators are expressed per this many persons in the per-capita view.
pub const PER_CAPITA_UNIT: f64 = 1_000_000.0;

/// Divides every absolute-mode value by its country-year population in
/// millions. Rate-mode indicators pass through unchanged.
pub fn per_capita_transform(
    observations: &ObservationTable,
    metadata: &Metadata,
    population: &PopulationTable,
) -> Result<ObservationTable> {
    let absolute: BTreeSet<&str> = metadata
        .indicators
        .iter()
        .filter(|i| i.scale_mode == ScaleMode::Absolute)
        .map(|i| i.id.as_str())
        .collect();
    observations.map_values(|country, year, indicator, value| {
        if !absolute.contains(indicator) {
            return Ok(value);
        }
        let persons = population
            .get(country, year)
            .ok_or_else(|| Error::MissingPopulation {
                country: country.clone(),
                year,
            })?;
        Ok(value / (persons as f64 / PER_CAPITA_UNIT))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingRow {
    pub rank: u32,
    pub country: CountryCode,
    #[serde(serialize_with = "ser_f64")]
    pub index_value: f64,
    #[serde(serialize_with = "ser_map_f64")]
    pub pillar_scores: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub indicator_scores: BTreeMap<String, IndicatorScore>,
}

/// Countries of one year ordered by index value, with competition ranks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingTable {
    pub year: Year,
    pub per_capita: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sub_index: Option<String>,
    pub weight_fingerprint: String,
    pub rows: Vec<RankingRow>,
}

impl RankingTable {
    /// Table built from already ranked score cards.
    pub fn from_cards(cards: Vec<ScoreCard>, year: Year, per_capita: bool, sub_index: Option<String>, weights: &WeightConfig) -> Self {
        let mut rows: Vec<RankingRow> = cards
            .into_iter()
            .map(|card| RankingRow {
                rank: card.rank,
                country: card.country,
                index_value: card.index_value,
                pillar_scores: card.pillar_scores,
                indicator_scores: card.indicator_scores,
            })
            .collect();
        rows.sort_by(|a, b| a.rank.cmp(&b.rank).then_with(|| a.country.cmp(&b.country)));
        RankingTable {
            year,
            per_capita,
            sub_index,
            weight_fingerprint: weights.fingerprint(),
            rows,
        }
    }

    pub fn rank_of(&self, country: &CountryCode) -> Option<u32> {
        self.rows.iter().find(|r| &r.country == country).map(|r| r.rank)
    }
}

/// Ranks `scores` descending. Equal values share a rank and the next rank
/// skips (1, 1, 3); ties are listed alphabetically by country code.
pub fn rank_by_score(scores: &[(CountryCode, f64)], year: Year) -> Result<RankingTable> {
    if scores.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut seen = BTreeSet::new();
    for (country, _) in scores {
        if !seen.insert(country) {
            return Err(Error::DuplicateCountry(country.clone()));
        }
    }
    let mut sorted: Vec<&(CountryCode, f64)> = scores.iter().collect();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let mut rows = Vec::with_capacity(sorted.len());
    let mut rank = 1;
    for (position, (country, value)) in sorted.iter().enumerate() {
        if position > 0 && *value != sorted[position - 1].1 {
            rank = position as u32 + 1;
        }
        rows.push(RankingRow {
            rank,
            country: country.clone(),
            index_value: *value,
            pillar_scores: BTreeMap::new(),
            indicator_scores: BTreeMap::new(),
        });
    }
    Ok(RankingTable {
        year,
        per_capita: false,
        sub_index: None,
        weight_fingerprint: String::new(),
        rows,
    })
}

/// Full ranking table for one year.
pub fn rank_year(
    observations: &ObservationTable,
    metadata: &Metadata,
    weights: &WeightConfig,
    year: Year,
    per_capita: bool,
    population: Option<&PopulationTable>,
) -> Result<RankingTable> {
    let cards = compute_scores(observations, metadata, weights, year, per_capita, population)?;
    Ok(RankingTable::from_cards(cards, year, per_capita, None, weights))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankTrajectory {
    pub country: CountryCode,
    pub points: BTreeMap<Year, u32>,
}

/// Rank of every country in each year of `years`, each year computed on its own.
pub fn rank_trajectories(
    observations: &ObservationTable,
    metadata: &Metadata,
    weights: &WeightConfig,
    years: RangeInclusive<Year>,
    per_capita: bool,
    population: Option<&PopulationTable>,
) -> Result<Vec<RankTrajectory>> {
    if years.is_empty() {
        return Err(Error::EmptyYearRange {
            from: *years.start(),
            to: *years.end(),
        });
    }
    if let Some(year) = years.clone().find(|y| !observations.has_year(*y)) {
        return Err(Error::UnknownYear(year));
    }
    let mut by_country: BTreeMap<CountryCode, BTreeMap<Year, u32>> = BTreeMap::new();
    for year in years {
        for card in compute_scores(observations, metadata, weights, year, per_capita, population)? {
            by_country.entry(card.country).or_default().insert(year, card.rank);
        }
    }
    Ok(by_country
        .into_iter()
        .map(|(country, points)| RankTrajectory { country, points })
        .collect())
}
