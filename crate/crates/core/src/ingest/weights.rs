use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{IngestError, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::model::{Metadata, WeightConfig, WeightOverrides};
use crate::num::ser_map_f64;

/// Weights expressed as percentages of their level's total.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightShares {
    /// pillar weight / sum of pillar weights
    #[serde(serialize_with = "ser_map_f64")]
    pub pillars: BTreeMap<String, f64>,
    /// indicator weight / sum of the weights in its pillar
    #[serde(serialize_with = "ser_map_f64")]
    pub indicators: BTreeMap<String, f64>,
}

pub fn weight_shares(weights: &WeightConfig, metadata: &Metadata) -> Result<WeightShares> {
    let pillar_total: f64 = metadata.pillars.iter().map(|p| weights.pillar(&p.id)).sum();
    if pillar_total <= 0.0 {
        return Err(Error::ZeroWeightSum {
            scope: "pillar weights".into(),
        });
    }
    let mut pillars = BTreeMap::new();
    let mut indicators = BTreeMap::new();
    for pillar in &metadata.pillars {
        pillars.insert(pillar.id.clone(), weights.pillar(&pillar.id) / pillar_total * 100.0);
        let members: Vec<_> = metadata.indicators_of(&pillar.id).collect();
        if members.is_empty() {
            continue;
        }
        let total: f64 = members.iter().map(|i| weights.indicator(&i.id)).sum();
        if total <= 0.0 {
            return Err(Error::ZeroWeightSum {
                scope: format!("pillar `{}`", pillar.id),
            });
        }
        for indicator in members {
            indicators.insert(indicator.id.clone(), weights.indicator(&indicator.id) / total * 100.0);
        }
    }
    Ok(WeightShares { pillars, indicators })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OverrideFile {
    format_version: Option<u32>,
    #[serde(default)]
    indicator_weights: BTreeMap<String, f64>,
    #[serde(default)]
    pillar_weights: BTreeMap<String, f64>,
}

/// Parses a TOML weights file with optional `[pillar_weights]` and
/// `[indicator_weights]` tables.
pub fn load_weight_overrides(text: &str) -> Result<WeightOverrides, IngestError> {
    let file: OverrideFile = toml::from_str(text).map_err(|e| IngestError::Schema(e.message().to_owned()))?;
    if let Some(version) = file.format_version.filter(|v| *v != FORMAT_VERSION) {
        return Err(IngestError::Schema(format!("unsupported format_version {version}")));
    }
    Ok(WeightOverrides {
        indicator_weights: file.indicator_weights,
        pillar_weights: file.pillar_weights,
    })
}
