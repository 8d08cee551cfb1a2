//! The full scoring pipeline for one year: per-capita transform, imputation,
//! normalization, pillar scores, index value and rank.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::aggregate::{pillar_score, vibrancy_index};
use crate::error::{Error, Result};
use crate::impute::impute_year;
use crate::model::{check_weight, CountryCode, Metadata, ObservationTable, PopulationTable, SubIndexDefinition, WeightConfig, Year};
use crate::normalize::normalize_year;
use crate::num::{ser_f64, ser_map_f64, ser_opt_f64};
use crate::ranking::{per_capita_transform, rank_by_score};

/// Normalized scores for one year.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormalizedTable {
    pub year: Year,
    /// indicator -> country -> score in [0, 100]
    pub entries: BTreeMap<String, BTreeMap<CountryCode, f64>>,
    /// indicator -> country -> value fed into normalization (observed or median)
    pub completed: BTreeMap<String, BTreeMap<CountryCode, f64>>,
    pub imputed_flags: BTreeSet<(String, CountryCode)>,
    pub excluded_indicators: BTreeSet<String>,
}

impl NormalizedTable {
    pub fn score(&self, indicator: &str, country: &CountryCode) -> Option<f64> {
        self.entries.get(indicator)?.get(country).copied()
    }

    pub fn is_imputed(&self, indicator: &str, country: &CountryCode) -> bool {
        self.imputed_flags.contains(&(indicator.to_owned(), country.clone()))
    }
}

/// Imputes then normalizes every listed indicator for `year`, over all
/// countries registered in `observations`.
pub fn normalize_observations(observations: &ObservationTable, indicator_ids: &BTreeSet<String>, year: Year) -> NormalizedTable {
    let imputed = impute_year(observations, year, indicator_ids, observations.countries());
    let entries = imputed
        .values
        .iter()
        .map(|(id, slice)| {
            // impute_year never emits an empty slice for a kept indicator
            let scores = normalize_year(slice).expect("completed slice is non-empty");
            (id.clone(), scores)
        })
        .collect();
    NormalizedTable {
        year,
        entries,
        completed: imputed.values,
        imputed_flags: imputed.imputed,
        excluded_indicators: imputed.excluded,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorScore {
    /// Observed value (after any per-capita transform); `None` when imputed.
    #[serde(serialize_with = "ser_opt_f64")]
    pub raw_value: Option<f64>,
    #[serde(serialize_with = "ser_f64")]
    pub normalized: f64,
    /// Share of the pillar's surviving indicator weight, in [0, 1].
    #[serde(serialize_with = "ser_f64")]
    pub effective_weight_share: f64,
    pub imputed: bool,
}

/// Result for one country in one year.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreCard {
    pub country: CountryCode,
    pub year: Year,
    pub rank: u32,
    #[serde(serialize_with = "ser_f64")]
    pub index_value: f64,
    #[serde(serialize_with = "ser_map_f64")]
    pub pillar_scores: BTreeMap<String, f64>,
    pub indicator_scores: BTreeMap<String, IndicatorScore>,
}

/// Scores every country for `year` with the full indicator set.
pub fn compute_scores(
    observations: &ObservationTable,
    metadata: &Metadata,
    weights: &WeightConfig,
    year: Year,
    per_capita: bool,
    population: Option<&PopulationTable>,
) -> Result<Vec<ScoreCard>> {
    let scope = metadata.indicator_ids();
    run(observations, metadata, weights, year, per_capita, population, &scope)
}

/// Scores every country on a sub-index: the same pipeline restricted to the
/// listed indicators, aggregated through the pillars they belong to.
pub fn compute_sub_index(
    observations: &ObservationTable,
    metadata: &Metadata,
    weights: &WeightConfig,
    sub_index: &SubIndexDefinition,
    year: Year,
    per_capita: bool,
    population: Option<&PopulationTable>,
) -> Result<Vec<ScoreCard>> {
    if sub_index.indicator_ids.is_empty() {
        return Err(Error::InvalidMetadata(format!("sub-index `{}` lists no indicators", sub_index.id)));
    }
    let scope = sub_index.indicator_set();
    if let Some(id) = scope.iter().find(|id| metadata.indicator(id).is_none()) {
        return Err(Error::UnknownIndicator(id.clone()));
    }
    run(observations, metadata, weights, year, per_capita, population, &scope)
}

/// Applies the per-capita transform when requested, restricted to one year.
pub fn prepare_year(
    observations: &ObservationTable,
    metadata: &Metadata,
    year: Year,
    per_capita: bool,
    population: Option<&PopulationTable>,
) -> Result<ObservationTable> {
    if !observations.has_year(year) {
        return Err(Error::UnknownYear(year));
    }
    let slice = observations.restrict_to_year(year);
    if per_capita {
        let empty = PopulationTable::new();
        per_capita_transform(&slice, metadata, population.unwrap_or(&empty))
    } else {
        Ok(slice)
    }
}

fn run(
    observations: &ObservationTable,
    metadata: &Metadata,
    weights: &WeightConfig,
    year: Year,
    per_capita: bool,
    population: Option<&PopulationTable>,
    scope: &BTreeSet<String>,
) -> Result<Vec<ScoreCard>> {
    for (id, &w) in weights.indicator_weights.iter().chain(&weights.pillar_weights) {
        check_weight(id, w)?;
    }
    let prepared = prepare_year(observations, metadata, year, per_capita, population)?;
    let normalized = normalize_observations(&prepared, scope, year);
    score_normalized(&normalized, &prepared, metadata, weights, scope)
}

/// Aggregates a normalized year into ranked score cards.
///
/// A pillar is dropped for the year when none of its in-scope indicators
/// survived exclusion, or when their weights sum to zero.
pub fn score_normalized(
    normalized: &NormalizedTable,
    observations: &ObservationTable,
    metadata: &Metadata,
    weights: &WeightConfig,
    scope: &BTreeSet<String>,
) -> Result<Vec<ScoreCard>> {
    let year = normalized.year;
    let mut pillars: Vec<(&str, BTreeMap<String, f64>)> = Vec::new();
    let mut shares: BTreeMap<String, f64> = BTreeMap::new();
    for pillar in &metadata.pillars {
        let members: BTreeMap<String, f64> = metadata
            .indicators_of(&pillar.id)
            .filter(|i| scope.contains(&i.id) && normalized.entries.contains_key(&i.id))
            .map(|i| (i.id.clone(), weights.indicator(&i.id)))
            .collect();
        let total: f64 = members.values().sum();
        for (id, w) in &members {
            let share = if total > 0.0 { w / total } else { 0.0 };
            shares.insert(id.clone(), share);
        }
        if total > 0.0 {
            pillars.push((pillar.id.as_str(), members));
        }
    }
    let pillar_weights: BTreeMap<String, f64> = pillars
        .iter()
        .map(|(id, _)| ((*id).to_owned(), weights.pillar(id)))
        .collect();
    if pillar_weights.values().sum::<f64>() <= 0.0 {
        return Err(Error::ZeroWeightSum {
            scope: format!("pillar weights in {year}"),
        });
    }

    let mut cards = Vec::with_capacity(observations.countries().len());
    for country in observations.countries() {
        let mut pillar_scores = BTreeMap::new();
        for (pillar_id, members) in &pillars {
            let scores: BTreeMap<String, f64> = members
                .keys()
                .map(|id| (id.clone(), normalized.entries[id][country]))
                .collect();
            let score = pillar_score(&scores, members).map_err(|_| Error::ZeroWeightSum {
                scope: format!("pillar `{pillar_id}`"),
            })?;
            pillar_scores.insert((*pillar_id).to_owned(), score);
        }
        let index_value = vibrancy_index(&pillar_scores, &pillar_weights)?;

        let indicator_scores = normalized
            .entries
            .iter()
            .filter(|(id, _)| scope.contains(*id))
            .map(|(id, by_country)| {
                let imputed = normalized.is_imputed(id, country);
                let score = IndicatorScore {
                    raw_value: if imputed { None } else { observations.get(country, year, id) },
                    normalized: by_country[country],
                    effective_weight_share: shares.get(id).copied().unwrap_or(0.0),
                    imputed,
                };
                (id.clone(), score)
            })
            .collect();

        cards.push(ScoreCard {
            country: country.clone(),
            year,
            rank: 0,
            index_value,
            pillar_scores,
            indicator_scores,
        });
    }

    if cards.is_empty() {
        return Ok(cards);
    }
    let ranking = rank_by_score(
        &cards.iter().map(|c| (c.country.clone(), c.index_value)).collect::<Vec<_>>(),
        year,
    )?;
    let ranks: BTreeMap<&CountryCode, u32> = ranking.rows.iter().map(|r| (&r.country, r.rank)).collect();
    for card in &mut cards {
        card.rank = ranks[&card.country];
    }
    cards.sort_by(|a, b| a.rank.cmp(&b.rank).then_with(|| a.country.cmp(&b.country)));
    Ok(cards)
}
