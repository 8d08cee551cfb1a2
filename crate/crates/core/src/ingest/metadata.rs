use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;

use super::{IngestError, FORMAT_VERSION};
use crate::model::{
    check_weight, CountryCode, CountryDefinition, IndicatorDefinition, Metadata, PillarDefinition, ScaleMode,
    SubIndexDefinition,
};

/// The default metadata: 8 pillars, 42 indicators, three sub-indices and 36 countries.
pub const BUNDLED_METADATA: &str = include_str!("../../data/metadata.toml");

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MetadataFile {
    format_version: u32,
    #[serde(default)]
    inclusion_overrides: Vec<String>,
    #[serde(default)]
    sub_indices: Vec<SubIndexEntry>,
    pillars: Vec<PillarEntry>,
    indicators: Vec<IndicatorEntry>,
    countries: Vec<CountryEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SubIndexEntry {
    id: String,
    name: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PillarEntry {
    id: String,
    name: String,
    default_weight: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IndicatorEntry {
    id: String,
    name: String,
    pillar: String,
    default_weight: i64,
    scale_mode: ScaleMode,
    #[serde(default)]
    sub_indices: Vec<String>,
    source: String,
    unit: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CountryEntry {
    code: String,
    name: String,
}

fn weight(id: &str, raw: i64) -> Result<f64, IngestError> {
    let value = raw as f64;
    check_weight(id, value)?;
    Ok(value)
}

fn country(raw: &str) -> Result<CountryCode, IngestError> {
    raw.parse().map_err(IngestError::Schema)
}

/// Parses a metadata document (TOML) and validates it.
pub fn load_metadata(text: &str) -> Result<Metadata, IngestError> {
    let file: MetadataFile = toml::from_str(text).map_err(|e| IngestError::Schema(e.message().to_owned()))?;
    if file.format_version != FORMAT_VERSION {
        return Err(IngestError::Schema(format!(
            "unsupported format_version {}",
            file.format_version
        )));
    }

    let pillars = file
        .pillars
        .iter()
        .map(|p| {
            Ok(PillarDefinition {
                id: p.id.clone(),
                display_name: p.name.clone(),
                default_weight: weight(&p.id, p.default_weight)?,
            })
        })
        .collect::<Result<Vec<_>, IngestError>>()?;
    let pillar_ids: BTreeSet<&str> = pillars.iter().map(|p| p.id.as_str()).collect();
    let declared: BTreeSet<&str> = file.sub_indices.iter().map(|s| s.id.as_str()).collect();

    let mut members: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut indicators = Vec::with_capacity(file.indicators.len());
    for entry in &file.indicators {
        if !pillar_ids.contains(entry.pillar.as_str()) {
            return Err(IngestError::UnknownPillar(entry.pillar.clone()));
        }
        for sub in &entry.sub_indices {
            let Some(&sub) = declared.get(sub.as_str()) else {
                return Err(IngestError::Schema(format!(
                    "indicator `{}` refers to undeclared sub-index `{sub}`",
                    entry.id
                )));
            };
            members.entry(sub).or_default().push(entry.id.clone());
        }
        indicators.push(IndicatorDefinition {
            id: entry.id.clone(),
            display_name: entry.name.clone(),
            pillar_id: entry.pillar.clone(),
            default_weight: weight(&entry.id, entry.default_weight)?,
            scale_mode: entry.scale_mode,
            sub_indices: entry.sub_indices.iter().cloned().collect(),
            source: entry.source.clone(),
            unit: entry.unit.clone(),
        });
    }

    let sub_indices = file
        .sub_indices
        .iter()
        .map(|s| SubIndexDefinition {
            id: s.id.clone(),
            display_name: s.name.clone(),
            indicator_ids: members.remove(s.id.as_str()).unwrap_or_default(),
        })
        .collect();
    let countries = file
        .countries
        .iter()
        .map(|c| {
            Ok(CountryDefinition {
                code: country(&c.code)?,
                display_name: c.name.clone(),
            })
        })
        .collect::<Result<Vec<_>, IngestError>>()?;
    let inclusion_overrides = file
        .inclusion_overrides
        .iter()
        .map(|c| country(c))
        .collect::<Result<BTreeSet<_>, _>>()?;

    let metadata = Metadata {
        pillars,
        indicators,
        sub_indices,
        countries,
        inclusion_overrides,
    };
    metadata.validate()?;
    Ok(metadata)
}

/// The bundled default metadata, parsed.
pub fn bundled_metadata() -> Metadata {
    load_metadata(BUNDLED_METADATA).expect("bundled metadata is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_defaults() {
        let meta = bundled_metadata();
        assert_eq!(meta.pillars.len(), 8);
        assert_eq!(meta.indicators.len(), 42);
        assert_eq!(meta.countries.len(), 36);
        let pillar_weights: Vec<(&str, f64)> = meta.pillars.iter().map(|p| (p.id.as_str(), p.default_weight)).collect();
        assert_eq!(
            pillar_weights,
            vec![
                ("research_development", 10.0),
                ("responsible_ai", 2.0),
                ("economy", 8.0),
                ("education", 2.0),
                ("diversity", 1.0),
                ("policy_governance", 4.0),
                ("public_opinion", 2.0),
                ("infrastructure", 6.0),
            ]
        );
        assert_eq!(meta.indicator("ai_job_postings_pct").unwrap().default_weight, 0.0);
        let sizes: Vec<usize> = meta.sub_indices.iter().map(|s| s.indicator_ids.len()).collect();
        assert_eq!(sizes, vec![15, 9, 6]);
        let overrides: Vec<&str> = meta.inclusion_overrides.iter().map(|c| c.as_str()).collect();
        assert_eq!(overrides, vec!["EST", "MEX", "MYS", "RUS", "SAU", "TUR"]);
    }

    #[test]
    fn weight_out_of_range() {
        let text = BUNDLED_METADATA.replacen("default_weight = 10", "default_weight = 11", 1);
        assert!(matches!(
            load_metadata(&text),
            Err(IngestError::WeightOutOfRange { value, .. }) if value == 11.0
        ));
    }

    #[test]
    fn unknown_pillar_and_schema_errors() {
        let text = BUNDLED_METADATA.replacen("pillar = \"economy\"", "pillar = \"nowhere\"", 1);
        assert!(matches!(load_metadata(&text), Err(IngestError::UnknownPillar(p)) if p == "nowhere"));

        let text = BUNDLED_METADATA.replacen("format_version = 1", "format_version = 2", 1);
        assert!(matches!(load_metadata(&text), Err(IngestError::Schema(_))));

        let text = BUNDLED_METADATA.replacen("scale_mode = \"rate\"", "scale_mode = \"log\"", 1);
        assert!(matches!(load_metadata(&text), Err(IngestError::Schema(_))));

        let text = BUNDLED_METADATA.replacen("sub_indices = [\"innovation\"]", "sub_indices = [\"nope\"]", 1);
        assert!(matches!(load_metadata(&text), Err(IngestError::Schema(_))));

        let text = BUNDLED_METADATA.replacen("default_weight = 8", "default_weight = 7.5", 1);
        assert!(matches!(load_metadata(&text), Err(IngestError::Schema(_))));
    }
}
