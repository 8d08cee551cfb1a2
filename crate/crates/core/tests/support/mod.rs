//! Random datasets and a straight-line reference evaluation of the index.
//!
//! The reference reads raw cells only and redoes every step by hand: no
//! engine function is called. Shared by the core tests and the acceptance run.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use vibrancy_core::{
    CountryCode, CountryDefinition, IndicatorDefinition, Metadata, ObservationTable, PillarDefinition, PopulationTable,
    ScaleMode, WeightConfig, Year,
};

pub const MISSING_SHARE: f64 = 0.15;

#[derive(Debug, Clone)]
pub struct RandomCase {
    pub metadata: Metadata,
    pub observations: ObservationTable,
    pub population: PopulationTable,
    pub weights: WeightConfig,
    pub years: Vec<Year>,
    pub per_capita: bool,
}

pub fn country(i: usize) -> CountryCode {
    let letters = [b'A' + (i / 26 / 26 % 26) as u8, b'A' + (i / 26 % 26) as u8, b'A' + (i % 26) as u8];
    std::str::from_utf8(&letters).unwrap().parse().unwrap()
}

/// Up to 10 countries, 8 pillars, 5 indicators per pillar and 3 years, with
/// about 15% of cells missing. Whole indicator-years are occasionally blank.
pub fn random_case(rng: &mut impl Rng) -> RandomCase {
    let n_countries = rng.gen_range(2..=10);
    let n_pillars = rng.gen_range(1..=8);
    let n_years = rng.gen_range(1..=3);
    let years: Vec<Year> = (0..n_years).map(|y| 2020 + y).collect();

    let mut pillars = Vec::new();
    let mut indicators = Vec::new();
    for p in 0..n_pillars {
        let pid = format!("p{p}");
        pillars.push(PillarDefinition {
            id: pid.clone(),
            display_name: pid.clone(),
            default_weight: rng.gen_range(0..=10) as f64,
        });
        for i in 0..rng.gen_range(1..=5) {
            let id = format!("p{p}_i{i}");
            indicators.push(IndicatorDefinition {
                id: id.clone(),
                display_name: id,
                pillar_id: pid.clone(),
                default_weight: rng.gen_range(0..=10) as f64,
                scale_mode: if rng.gen_bool(0.5) { ScaleMode::Absolute } else { ScaleMode::Rate },
                sub_indices: BTreeSet::new(),
                source: "synthetic".into(),
                unit: None,
            });
        }
    }
    // keep the pillar total positive most of the time, but not always
    if pillars.iter().all(|p| p.default_weight == 0.0) && rng.gen_bool(0.8) {
        pillars[0].default_weight = 1.0;
    }

    let countries: Vec<CountryCode> = (0..n_countries).map(country).collect();
    let metadata = Metadata {
        pillars,
        indicators,
        sub_indices: Vec::new(),
        countries: countries
            .iter()
            .map(|c| CountryDefinition {
                code: c.clone(),
                display_name: c.to_string(),
            })
            .collect(),
        inclusion_overrides: BTreeSet::new(),
    };

    let mut observations = ObservationTable::with_countries(countries.iter().cloned());
    let mut population = PopulationTable::new();
    for &year in &years {
        observations.register_year(year);
        for c in &countries {
            population.insert(c.clone(), year, rng.gen_range(100_000..500_000_000)).unwrap();
        }
        for ind in &metadata.indicators {
            if rng.gen_bool(0.05) {
                continue;
            }
            // a few coarse-valued indicators so ties and degenerate slices occur
            let coarse = rng.gen_bool(0.2);
            for c in &countries {
                if rng.gen_bool(MISSING_SHARE) {
                    continue;
                }
                let value = if coarse {
                    rng.gen_range(0..3) as f64
                } else {
                    rng.gen_range(-50.0..1000.0)
                };
                observations.insert(c.clone(), year, ind.id.clone(), value).unwrap();
            }
        }
    }

    let weights = metadata.default_weights();
    RandomCase {
        metadata,
        observations,
        population,
        weights,
        years,
        per_capita: rng.gen_bool(0.3),
    }
}

/// Same cells inserted in a shuffled order.
pub fn reinserted(table: &ObservationTable, rng: &mut impl Rng) -> ObservationTable {
    let mut cells: Vec<(CountryCode, Year, String, f64)> =
        table.iter().map(|(c, y, i, v)| (c.clone(), y, i.to_owned(), v)).collect();
    cells.shuffle(rng);
    let mut countries: Vec<CountryCode> = table.countries().iter().cloned().collect();
    countries.shuffle(rng);
    let mut out = ObservationTable::with_countries(countries);
    for &y in table.years() {
        out.register_year(y);
    }
    for (c, y, i, v) in cells {
        out.insert(c, y, i, v).unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceYear {
    pub pillars: BTreeMap<CountryCode, BTreeMap<String, f64>>,
    pub index: BTreeMap<CountryCode, f64>,
}

/// Reference scores for one year; `None` when no weighted pillar survives.
pub fn reference(case: &RandomCase, year: Year) -> Option<ReferenceYear> {
    let countries: Vec<CountryCode> = case.observations.countries().iter().cloned().collect();

    // normalized[indicator][country], only for indicators with data this year
    let mut normalized: BTreeMap<String, BTreeMap<CountryCode, f64>> = BTreeMap::new();
    for ind in &case.metadata.indicators {
        let mut raw: BTreeMap<CountryCode, f64> = BTreeMap::new();
        for c in &countries {
            if let Some(mut v) = case.observations.get(c, year, &ind.id) {
                if case.per_capita && ind.scale_mode == ScaleMode::Absolute {
                    let persons = case.population.get(c, year).unwrap() as f64;
                    v /= persons / 1_000_000.0;
                }
                raw.insert(c.clone(), v);
            }
        }
        if raw.is_empty() {
            continue;
        }
        let mut sorted: Vec<f64> = raw.values().copied().collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
        };
        let mut filled = BTreeMap::new();
        for c in &countries {
            filled.insert(c.clone(), raw.get(c).copied().unwrap_or(median));
        }
        let lo = filled.values().copied().fold(f64::INFINITY, f64::min);
        let hi = filled.values().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut scores = BTreeMap::new();
        for (c, v) in filled {
            let s = if hi == lo { 50.0 } else { (v - lo) / (hi - lo) * 100.0 };
            scores.insert(c, s);
        }
        normalized.insert(ind.id.clone(), scores);
    }

    let mut pillar_out: BTreeMap<CountryCode, BTreeMap<String, f64>> = BTreeMap::new();
    let mut index_num: BTreeMap<CountryCode, f64> = BTreeMap::new();
    let mut index_den = 0.0;
    for pillar in &case.metadata.pillars {
        let members: Vec<&IndicatorDefinition> = case
            .metadata
            .indicators
            .iter()
            .filter(|i| i.pillar_id == pillar.id && normalized.contains_key(&i.id))
            .collect();
        let weight_sum: f64 = members.iter().map(|i| case.weights.indicator_weights[&i.id]).sum();
        if weight_sum == 0.0 {
            continue;
        }
        let pw = case.weights.pillar_weights[&pillar.id];
        index_den += pw;
        for c in &countries {
            let mut acc = 0.0;
            for i in &members {
                acc += case.weights.indicator_weights[&i.id] * normalized[&i.id][c];
            }
            let score = acc / weight_sum;
            pillar_out.entry(c.clone()).or_default().insert(pillar.id.clone(), score);
            *index_num.entry(c.clone()).or_default() += pw * score;
        }
    }
    if index_den == 0.0 {
        return None;
    }
    let index = countries
        .iter()
        .map(|c| (c.clone(), index_num.get(c).copied().unwrap_or(0.0) / index_den))
        .collect();
    for c in &countries {
        pillar_out.entry(c.clone()).or_default();
    }
    Some(ReferenceYear {
        pillars: pillar_out,
        index,
    })
}

/// One pillar of `indicators` equally weighted indicators over `countries`.
pub fn flat_metadata(countries: &[&str], indicators: &[&str]) -> Metadata {
    Metadata {
        pillars: vec![PillarDefinition {
            id: "p".into(),
            display_name: "p".into(),
            default_weight: 1.0,
        }],
        indicators: indicators
            .iter()
            .map(|id| IndicatorDefinition {
                id: (*id).into(),
                display_name: (*id).into(),
                pillar_id: "p".into(),
                default_weight: 1.0,
                scale_mode: ScaleMode::Rate,
                sub_indices: BTreeSet::new(),
                source: "fixture".into(),
                unit: None,
            })
            .collect(),
        sub_indices: Vec::new(),
        countries: countries
            .iter()
            .map(|c| CountryDefinition {
                code: c.parse().unwrap(),
                display_name: (*c).into(),
            })
            .collect(),
        inclusion_overrides: BTreeSet::new(),
    }
}

/// Three countries, four indicators, three years. Which cells are present:
///
/// ```text
///        i1     i2     i3    i4
/// 2021   A B C  A B    A     -
/// 2022   A B C  A B C  A B   A
/// 2023   A B    A      -     A B C
/// ```
pub fn coverage_fixture() -> (Metadata, ObservationTable) {
    let metadata = flat_metadata(&["AAA", "BBB", "CCC"], &["i1", "i2", "i3", "i4"]);
    let present: [(Year, &str, &str); 3 * 4] = [
        (2021, "i1", "ABC"),
        (2021, "i2", "AB"),
        (2021, "i3", "A"),
        (2021, "i4", ""),
        (2022, "i1", "ABC"),
        (2022, "i2", "ABC"),
        (2022, "i3", "AB"),
        (2022, "i4", "A"),
        (2023, "i1", "AB"),
        (2023, "i2", "A"),
        (2023, "i3", ""),
        (2023, "i4", "ABC"),
    ];
    let mut table = ObservationTable::with_countries(metadata.country_codes());
    for (year, id, who) in present {
        table.register_year(year);
        for letter in who.chars() {
            let code: CountryCode = letter.to_string().repeat(3).parse().unwrap();
            table.insert(code, year, id, 1.0).unwrap();
        }
    }
    (metadata, table)
}

/// Ten indicators over three years. ZZZ reports everything, XXX exactly 7 of
/// 10 each year, YYY 7, 7 and 6, WWW 5 each year.
pub fn threshold_fixture() -> (Metadata, ObservationTable) {
    let ids: Vec<String> = (0..10).map(|i| format!("i{i}")).collect();
    let id_refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    let metadata = flat_metadata(&["WWW", "XXX", "YYY", "ZZZ"], &id_refs);
    let mut table = ObservationTable::with_countries(metadata.country_codes());
    for (y, year) in [2021, 2022, 2023].into_iter().enumerate() {
        for (code, count) in [("ZZZ", 10), ("XXX", 7), ("YYY", if y == 2 { 6 } else { 7 }), ("WWW", 5)] {
            for id in ids.iter().take(count) {
                table.insert(code.parse().unwrap(), year, id.clone(), 1.0).unwrap();
            }
        }
    }
    (metadata, table)
}
