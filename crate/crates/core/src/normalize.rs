//! Min-max rescaling of one indicator-year onto [0, 100].

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::CountryCode;

/// Score given to every country when all values of a slice are equal.
pub const DEGENERATE_SCORE: f64 = 50.0;

/// Rescales `values` so the smallest maps to 0 and the largest to 100.
///
/// Bounds are taken over exactly the countries passed in. If every value is
/// the same the indicator cannot discriminate and all countries get 50.
pub fn normalize_year(values: &BTreeMap<CountryCode, f64>) -> Result<BTreeMap<CountryCode, f64>> {
    let (min, max) = values
        .values()
        .fold(None, |acc: Option<(f64, f64)>, &v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
        .ok_or(Error::EmptySlice)?;

    let range = max - min;
    Ok(values
        .iter()
        .map(|(country, &v)| {
            let score = if range > 0.0 {
                (v - min) / range * 100.0
            } else {
                DEGENERATE_SCORE
            };
            (country.clone(), score)
        })
        .collect())
}
