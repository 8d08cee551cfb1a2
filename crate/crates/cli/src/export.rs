//! Downloadable results. CSV files keep full precision so exported
//! normalized scores reproduce pillar scores exactly.

use std::fs;
use std::path::Path;

use serde::Serialize;
use vibrancy_core::ingest::{compute_coverage, CoverageReport, FORMAT_COMMENT};
use vibrancy_core::{DatasetBundle, RankingTable, WeightConfig, Year};
use vibrancy_service::query;

use crate::render::{coverage_rows, csv_text};
use crate::{emit, io_failure, to_json, Failure, Format};

pub const NORMALIZED_FILE: &str = "normalized.csv";
pub const PILLARS_FILE: &str = "pillars.csv";
pub const INDEX_FILE: &str = "index.csv";
pub const COVERAGE_FILE: &str = "coverage.csv";

#[derive(Serialize)]
struct ExportDocument<'a> {
    from: Year,
    to: Year,
    per_capita: bool,
    weight_fingerprint: String,
    weights: &'a WeightConfig,
    rankings: Vec<RankingTable>,
    coverage: CoverageReport,
}

fn full(x: f64) -> String {
    format!("{x}")
}

fn with_version(body: String) -> String {
    format!("{FORMAT_COMMENT}\n{body}")
}

pub fn run(
    bundle: &DatasetBundle,
    weights: &WeightConfig,
    from: Year,
    to: Year,
    per_capita: bool,
    format: Format,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let tables = (from..=to)
        .filter(|y| bundle.observations.has_year(*y))
        .map(|y| query::rankings(bundle, weights, y, per_capita, None))
        .collect::<Result<Vec<_>, _>>()?;
    let coverage = compute_coverage(&bundle.observations, &bundle.metadata);

    match format {
        Format::Json => {
            let doc = ExportDocument {
                from,
                to,
                per_capita,
                weight_fingerprint: weights.fingerprint(),
                weights,
                rankings: tables,
                coverage,
            };
            emit(output, &to_json(&doc))
        }
        Format::Table => Err(Failure::Usage("export writes csv or json, not table".into())),
        Format::Csv => {
            let dir = output.ok_or_else(|| Failure::Usage("export --format csv needs --output <DIR>".into()))?;
            fs::create_dir_all(dir).map_err(|e| io_failure(Some(dir), e))?;

            let mut normalized = vec![vec!["country".into(), "year".into(), "indicator".into(), "value".into(), "imputed".into()]];
            let mut pillars = vec![vec!["country".into(), "year".into(), "pillar".into(), "score".into()]];
            let mut index = vec![vec!["year".into(), "rank".into(), "country".into(), "score".into()]];
            for table in &tables {
                let year = table.year.to_string();
                for row in &table.rows {
                    let country = row.country.to_string();
                    for (id, score) in &row.indicator_scores {
                        normalized.push(vec![
                            country.clone(),
                            year.clone(),
                            id.clone(),
                            full(score.normalized),
                            score.imputed.to_string(),
                        ]);
                    }
                    for (id, score) in &row.pillar_scores {
                        pillars.push(vec![country.clone(), year.clone(), id.clone(), full(*score)]);
                    }
                    index.push(vec![year.clone(), row.rank.to_string(), country, full(row.index_value)]);
                }
            }

            let files = [
                (NORMALIZED_FILE, csv_text(normalized)),
                (PILLARS_FILE, csv_text(pillars)),
                (INDEX_FILE, csv_text(index)),
                (COVERAGE_FILE, csv_text(coverage_rows(&coverage, full))),
            ];
            for (name, body) in files {
                let path = dir.join(name);
                fs::write(&path, with_version(body)).map_err(|e| io_failure(Some(&path), e))?;
            }
            Ok(())
        }
    }
}
