use thiserror::Error;

use crate::model::{CountryCode, Year};

/// Errors raised by the scoring pipeline and ranking operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no country has a value to normalize")]
    EmptySlice,

    #[error("weights sum to zero for {scope}")]
    ZeroWeightSum { scope: String },

    #[error("year {0} is not present in the dataset")]
    UnknownYear(Year),

    #[error("no population recorded for {country} in {year}")]
    MissingPopulation { country: CountryCode, year: Year },

    #[error("unknown sub-index `{0}`")]
    UnknownSubIndex(String),

    #[error("unknown indicator `{0}`")]
    UnknownIndicator(String),

    #[error("unknown pillar `{0}`")]
    UnknownPillar(String),

    #[error("invalid metadata: {0}")]
    InvalidMetadata(String),

    #[error("weight for `{id}` is {value}, expected a value in [0, 10]")]
    WeightOutOfRange { id: String, value: f64 },

    #[error("duplicate observation for ({country}, {year}, {indicator})")]
    DuplicateKey {
        country: CountryCode,
        year: Year,
        indicator: String,
    },

    #[error("value for ({country}, {year}, {indicator}) is not a finite number")]
    NonFiniteValue {
        country: CountryCode,
        year: Year,
        indicator: String,
    },

    #[error("population for {country} in {year} must be positive")]
    NonPositivePopulation { country: CountryCode, year: Year },

    #[error("nothing to rank")]
    EmptyInput,

    #[error("country {0} appears more than once")]
    DuplicateCountry(CountryCode),

    #[error("empty year range {from}..={to}")]
    EmptyYearRange { from: Year, to: Year },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
