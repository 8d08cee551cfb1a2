//! Weighted averages at the pillar and index level.
//!
//! An excluded indicator (or pillar) simply leaves the sum, which shrinks the
//! denominator. That is the same as handing its weight to the survivors in
//! proportion to their own weights, so no separate redistribution step exists.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Weighted mean of `scores`, with weights looked up by key (absent = 0).
///
/// The result is clamped into the [min, max] of the positively weighted
/// inputs so rounding can never push it outside that interval.
pub(crate) fn weighted_mean<'a>(
    scores: impl IntoIterator<Item = (&'a String, &'a f64)>,
    weights: &BTreeMap<String, f64>,
    scope: &str,
) -> Result<f64> {
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (id, &score) in scores {
        let w = weights.get(id).copied().unwrap_or(0.0);
        if w > 0.0 {
            numerator += w * score;
            denominator += w;
            lo = lo.min(score);
            hi = hi.max(score);
        }
    }
    if denominator <= 0.0 {
        return Err(Error::ZeroWeightSum { scope: scope.to_owned() });
    }
    Ok((numerator / denominator).clamp(lo, hi))
}

/// Score of one pillar from the normalized scores of its surviving indicators.
pub fn pillar_score(normalized: &BTreeMap<String, f64>, weights: &BTreeMap<String, f64>) -> Result<f64> {
    weighted_mean(normalized, weights, "pillar indicators")
}

/// Index value from the scores of the pillars that produced one.
pub fn vibrancy_index(pillar_scores: &BTreeMap<String, f64>, pillar_weights: &BTreeMap<String, f64>) -> Result<f64> {
    weighted_mean(pillar_scores, pillar_weights, "pillar weights")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn pillar_is_weighted_average() {
        let scores = map(&[("a", 100.0), ("b", 0.0)]);
        assert_eq!(pillar_score(&scores, &map(&[("a", 8.0), ("b", 2.0)])).unwrap(), 80.0);
        let scores = map(&[("a", 30.0), ("b", 60.0), ("c", 90.0)]);
        let w = map(&[("a", 1.0), ("b", 1.0), ("c", 1.0)]);
        assert!((pillar_score(&scores, &w).unwrap() - 60.0).abs() < 1e-12);
    }

    #[test]
    fn single_indicator_is_identity() {
        let s = map(&[("a", 42.0)]);
        assert_eq!(pillar_score(&s, &map(&[("a", 5.0)])).unwrap(), 42.0);
    }

    #[test]
    fn zero_weights_are_an_error() {
        let s = map(&[("a", 42.0), ("b", 1.0)]);
        assert!(matches!(
            pillar_score(&s, &map(&[("a", 0.0)])),
            Err(Error::ZeroWeightSum { .. })
        ));
        assert!(matches!(
            vibrancy_index(&BTreeMap::new(), &map(&[("a", 3.0)])),
            Err(Error::ZeroWeightSum { .. })
        ));
    }

    #[test]
    fn index_of_two_pillars() {
        let v = vibrancy_index(&map(&[("p", 70.0), ("q", 35.0)]), &map(&[("p", 10.0), ("q", 2.0)])).unwrap();
        assert!((v - 770.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn constant_scores_under_default_pillar_weights() {
        let weights = [10.0, 2.0, 8.0, 2.0, 1.0, 4.0, 2.0, 6.0];
        let ids: Vec<String> = (0..8).map(|i| format!("p{i}")).collect();
        let w: BTreeMap<_, _> = ids.iter().cloned().zip(weights).collect();
        let s: BTreeMap<_, _> = ids.iter().map(|id| (id.clone(), 100.0)).collect();
        assert_eq!(vibrancy_index(&s, &w).unwrap(), 100.0);
        let tripled: BTreeMap<_, _> = w.iter().map(|(k, v)| (k.clone(), v * 3.0)).collect();
        let mixed: BTreeMap<_, _> = ids.iter().enumerate().map(|(i, id)| (id.clone(), i as f64 * 13.7)).collect();
        let a = vibrancy_index(&mixed, &w).unwrap();
        let b = vibrancy_index(&mixed, &tripled).unwrap();
        assert!((a - b).abs() <= 1e-12);
    }
}
