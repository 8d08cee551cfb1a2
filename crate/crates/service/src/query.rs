//! Request-level operations shared by the HTTP handlers and the CLI, so both
//! front ends produce the same payloads for the same query.

use std::collections::BTreeMap;

use serde::Serialize;
use vibrancy_core::ingest::{weight_shares, WeightShares};
use vibrancy_core::num::ser_opt_f64;
use vibrancy_core::{
    compute_scores, compute_sub_index, rank_trajectories, CountryCode, DatasetBundle, Error, IndicatorDefinition,
    Metadata, RankTrajectory, RankingTable, WeightConfig, WeightOverrides, Year,
};

#[derive(Debug, Clone, PartialEq)]
pub enum QueryError {
    /// Error raised by the engine.
    Core(Error),
    /// A malformed or inconsistent request parameter.
    BadParameter(String),
    UnknownCountry(String),
}

impl std::fmt::Display for QueryError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QueryError::Core(e) => e.fmt(f),
            QueryError::BadParameter(msg) => f.write_str(msg),
            QueryError::UnknownCountry(code) => write!(f, "unknown country `{code}`"),
        }
    }
}

impl std::error::Error for QueryError {}

impl From<Error> for QueryError {
    fn from(err: Error) -> Self {
        QueryError::Core(err)
    }
}

/// Merges request weights onto the bundle defaults.
///
/// Unknown ids and out-of-range values are parameter errors; a zero pillar
/// total stays a [`Error::ZeroWeightSum`].
pub fn effective_weights(bundle: &DatasetBundle, overrides: &WeightOverrides) -> Result<WeightConfig, QueryError> {
    bundle
        .default_weights
        .with_overrides(overrides, &bundle.metadata)
        .map_err(|e| match e {
            Error::ZeroWeightSum { .. } => QueryError::Core(e),
            Error::WeightOutOfRange { .. } => QueryError::Core(e),
            other => QueryError::BadParameter(other.to_string()),
        })
}

/// Defaults to the latest year of the dataset.
pub fn resolve_year(bundle: &DatasetBundle, year: Option<Year>) -> Result<Year, QueryError> {
    let year = match year {
        Some(y) => y,
        None => bundle.last_year().ok_or(Error::EmptyInput)?,
    };
    if !bundle.observations.has_year(year) {
        return Err(Error::UnknownYear(year).into());
    }
    Ok(year)
}

/// Ranking table for one year, optionally on a sub-index.
pub fn rankings(
    bundle: &DatasetBundle,
    weights: &WeightConfig,
    year: Year,
    per_capita: bool,
    sub_index: Option<&str>,
) -> Result<RankingTable, QueryError> {
    let population = Some(&bundle.population);
    let cards = match sub_index {
        None => compute_scores(&bundle.observations, &bundle.metadata, weights, year, per_capita, population)?,
        Some(id) => {
            let def = bundle.sub_index(id)?;
            compute_sub_index(&bundle.observations, &bundle.metadata, weights, def, year, per_capita, population)?
        }
    };
    Ok(RankingTable::from_cards(
        cards,
        year,
        per_capita,
        sub_index.map(str::to_owned),
        weights,
    ))
}

/// Year range with dataset bounds as defaults; `from > to` is rejected.
pub fn resolve_range(bundle: &DatasetBundle, from: Option<Year>, to: Option<Year>) -> Result<(Year, Year), QueryError> {
    let from = match from {
        Some(y) => y,
        None => bundle.first_year().ok_or(Error::EmptyInput)?,
    };
    let to = match to {
        Some(y) => y,
        None => bundle.last_year().ok_or(Error::EmptyInput)?,
    };
    if from > to {
        return Err(Error::EmptyYearRange { from, to }.into());
    }
    for year in [from, to] {
        if !bundle.observations.has_year(year) {
            return Err(Error::UnknownYear(year).into());
        }
    }
    Ok((from, to))
}

pub fn trajectories(
    bundle: &DatasetBundle,
    weights: &WeightConfig,
    from: Year,
    to: Year,
    per_capita: bool,
) -> Result<Vec<RankTrajectory>, QueryError> {
    Ok(rank_trajectories(
        &bundle.observations,
        &bundle.metadata,
        weights,
        from..=to,
        per_capita,
        Some(&bundle.population),
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricPoint {
    pub year: Year,
    #[serde(serialize_with = "ser_opt_f64")]
    pub value: Option<f64>,
    pub missing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountrySeries {
    pub country: CountryCode,
    pub points: Vec<MetricPoint>,
}

/// Raw values of one indicator over time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSeries {
    pub indicator: IndicatorDefinition,
    pub from: Year,
    pub to: Year,
    pub series: Vec<CountrySeries>,
}

pub fn metric_series(
    bundle: &DatasetBundle,
    indicator_id: &str,
    country: Option<&str>,
    from: Option<Year>,
    to: Option<Year>,
) -> Result<MetricSeries, QueryError> {
    let indicator = bundle
        .metadata
        .indicator(indicator_id)
        .ok_or_else(|| Error::UnknownIndicator(indicator_id.to_owned()))?
        .clone();
    let countries: Vec<CountryCode> = match country {
        Some(raw) => {
            let code: CountryCode = raw.parse().map_err(|_| QueryError::UnknownCountry(raw.to_owned()))?;
            if !bundle.observations.countries().contains(&code) {
                return Err(QueryError::UnknownCountry(raw.to_owned()));
            }
            vec![code]
        }
        None => bundle.observations.countries().iter().cloned().collect(),
    };
    let (from, to) = resolve_range(bundle, from, to)?;
    let years: Vec<Year> = bundle.observations.years().range(from..=to).copied().collect();
    let series = countries
        .into_iter()
        .map(|country| {
            let points = years
                .iter()
                .map(|&year| {
                    let value = bundle.observations.get(&country, year, indicator_id);
                    MetricPoint {
                        year,
                        value,
                        missing: value.is_none(),
                    }
                })
                .collect();
            CountrySeries { country, points }
        })
        .collect();
    Ok(MetricSeries {
        indicator,
        from,
        to,
        series,
    })
}

/// Everything a client needs to draw controls: definitions, default
/// weights, their percentage shares and the available years.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaResponse {
    pub metadata: Metadata,
    pub default_weights: WeightConfig,
    pub weight_fingerprint: String,
    pub weight_shares: WeightShares,
    pub years: Vec<Year>,
    pub pillar_indicators: BTreeMap<String, Vec<String>>,
}

pub fn meta(bundle: &DatasetBundle) -> Result<MetaResponse, QueryError> {
    let metadata = &bundle.metadata;
    let pillar_indicators = metadata
        .pillars
        .iter()
        .map(|p| (p.id.clone(), metadata.indicators_of(&p.id).map(|i| i.id.clone()).collect()))
        .collect();
    Ok(MetaResponse {
        metadata: metadata.clone(),
        default_weights: bundle.default_weights.clone(),
        weight_fingerprint: bundle.default_weights.fingerprint(),
        weight_shares: weight_shares(&bundle.default_weights, metadata)?,
        years: bundle.observations.years().iter().copied().collect(),
        pillar_indicators,
    })
}
