//! Median imputation within one year.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{CountryCode, ObservationTable, Year};

/// Median of `values`; the mean of the two central values for an even count.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    })
}

/// One year of indicator values after filling gaps.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ImputedYear {
    /// indicator -> country -> value, complete for every non-excluded indicator
    pub values: BTreeMap<String, BTreeMap<CountryCode, f64>>,
    /// (indicator, country) pairs whose value is a median fill
    pub imputed: BTreeSet<(String, CountryCode)>,
    /// Indicators with no observation at all this year
    pub excluded: BTreeSet<String>,
}

/// Completes each indicator's slice for `year` over `countries`.
///
/// Missing countries receive the median of the observed values of that
/// indicator-year. An indicator nobody reported is excluded and gets no values.
/// Observations from countries outside `countries` are ignored.
pub fn impute_year(
    observations: &ObservationTable,
    year: Year,
    indicator_ids: &BTreeSet<String>,
    countries: &BTreeSet<CountryCode>,
) -> ImputedYear {
    let mut out = ImputedYear::default();
    for indicator in indicator_ids {
        let observed: BTreeMap<CountryCode, f64> = observations
            .slice(year, indicator)
            .filter(|(c, _)| countries.contains(*c))
            .map(|(c, v)| (c.clone(), v))
            .collect();
        let Some(fill) = median(&observed.values().copied().collect::<Vec<_>>()) else {
            out.excluded.insert(indicator.clone());
            continue;
        };
        let mut complete = observed;
        for country in countries {
            if !complete.contains_key(country) {
                complete.insert(country.clone(), fill);
                out.imputed.insert((indicator.clone(), country.clone()));
            }
        }
        out.values.insert(indicator.clone(), complete);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(s: &str) -> CountryCode {
        s.parse().unwrap()
    }

    fn table(rows: &[(&str, f64)]) -> ObservationTable {
        let mut t = ObservationTable::new();
        for (c, v) in rows {
            t.insert(code(c), 2023, "v", *v).unwrap();
        }
        t
    }

    fn set<T: Ord + Clone>(items: &[T]) -> BTreeSet<T> {
        items.iter().cloned().collect()
    }

    #[test]
    fn odd_count_uses_middle_value() {
        let t = table(&[("AAA", 1.0), ("BBB", 3.0), ("DDD", 7.0)]);
        let countries = set(&[code("AAA"), code("BBB"), code("CCC"), code("DDD")]);
        let out = impute_year(&t, 2023, &set(&["v".to_owned()]), &countries);
        assert_eq!(out.values["v"][&code("CCC")], 3.0);
        assert_eq!(out.imputed, set(&[("v".to_owned(), code("CCC"))]));
        assert!(out.excluded.is_empty());
    }

    #[test]
    fn even_count_averages_the_central_pair() {
        let t = table(&[("AAA", 1.0), ("BBB", 3.0), ("CCC", 7.0), ("DDD", 9.0)]);
        let countries = set(&[code("AAA"), code("BBB"), code("CCC"), code("DDD"), code("EEE")]);
        let out = impute_year(&t, 2023, &set(&["v".to_owned()]), &countries);
        assert_eq!(out.values["v"][&code("EEE")], 5.0);
        assert_eq!(out.values["v"][&code("AAA")], 1.0);
        assert_eq!(out.imputed.len(), 1);
    }

    #[test]
    fn unreported_indicator_is_excluded() {
        let t = table(&[("AAA", 1.0)]);
        let countries = set(&[code("AAA"), code("BBB")]);
        let ids = set(&["v".to_owned(), "w".to_owned()]);
        let out = impute_year(&t, 2023, &ids, &countries);
        assert_eq!(out.excluded, set(&["w".to_owned()]));
        assert!(!out.values.contains_key("w"));
        // other years are not consulted
        let out = impute_year(&t, 2022, &ids, &countries);
        assert_eq!(out.excluded, ids);
    }

    #[test]
    fn median_basics() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[4.0]), Some(4.0));
        assert_eq!(median(&[9.0, 1.0, 3.0]), Some(3.0));
        assert_eq!(median(&[9.0, 1.0, 3.0, 7.0]), Some(5.0));
    }
}
