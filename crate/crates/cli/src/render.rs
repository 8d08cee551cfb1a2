//! Text and CSV renderings. Numbers use the same six-decimal rounding as
//! the JSON payloads so every format carries identical values.

use std::fmt::Write as _;

use vibrancy_core::ingest::CoverageReport;
use vibrancy_core::num::fmt6;
use vibrancy_core::{Metadata, RankTrajectory, RankingTable, Year};

use crate::{to_json, Format};

pub fn ranking(table: &RankingTable, metadata: &Metadata, format: Format) -> String {
    match format {
        Format::Json => to_json(table),
        Format::Csv => ranking_csv(table, metadata),
        Format::Table => ranking_text(table, metadata),
    }
}

pub fn csv_text(rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

fn pillar_cells(row: &vibrancy_core::RankingRow, metadata: &Metadata) -> Vec<String> {
    metadata
        .pillars
        .iter()
        .map(|p| row.pillar_scores.get(&p.id).map(|v| fmt6(*v)).unwrap_or_default())
        .collect()
}

/// `rank,country,score,<pillar ids>`
pub fn ranking_csv(table: &RankingTable, metadata: &Metadata) -> String {
    let mut header = vec!["rank".to_owned(), "country".to_owned(), "score".to_owned()];
    header.extend(metadata.pillars.iter().map(|p| p.id.clone()));
    let rows = table.rows.iter().map(|row| {
        let mut cells = vec![row.rank.to_string(), row.country.to_string(), fmt6(row.index_value)];
        cells.extend(pillar_cells(row, metadata));
        cells
    });
    csv_text(std::iter::once(header).chain(rows))
}

/// `year,rank,country,score,<pillar ids>` over several years.
pub fn score_csv(tables: &[RankingTable], metadata: &Metadata) -> String {
    let mut header = vec!["year".to_owned(), "rank".to_owned(), "country".to_owned(), "score".to_owned()];
    header.extend(metadata.pillars.iter().map(|p| p.id.clone()));
    let rows = tables.iter().flat_map(|t| {
        t.rows.iter().map(move |row| {
            let mut cells = vec![t.year.to_string(), row.rank.to_string(), row.country.to_string(), fmt6(row.index_value)];
            cells.extend(pillar_cells(row, metadata));
            cells
        })
    });
    csv_text(std::iter::once(header).chain(rows))
}

fn pad_table(rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..rows.first().map_or(0, Vec::len))
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| if c == 1 { format!("{cell:<w$}", w = widths[c]) } else { format!("{cell:>w$}", w = widths[c]) })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn ranking_text(table: &RankingTable, metadata: &Metadata) -> String {
    let mut title = format!("{}", table.year);
    if let Some(sub) = &table.sub_index {
        let _ = write!(title, " {sub}");
    }
    if table.per_capita {
        title.push_str(" per capita");
    }
    let _ = write!(title, " (weights {})", table.weight_fingerprint);

    let mut header = vec!["rank".to_owned(), "country".to_owned(), "score".to_owned()];
    // pillars absent from every row were dropped for this query
    let pillars: Vec<&str> = metadata
        .pillars
        .iter()
        .map(|p| p.id.as_str())
        .filter(|id| table.rows.iter().any(|r| r.pillar_scores.contains_key(*id)))
        .collect();
    header.extend(pillars.iter().map(|id| (*id).to_owned()));
    let mut rows = vec![header];
    for row in &table.rows {
        let mut cells = vec![row.rank.to_string(), row.country.to_string(), format!("{:.2}", row.index_value)];
        cells.extend(
            pillars
                .iter()
                .map(|id| row.pillar_scores.get(*id).map(|v| format!("{v:.2}")).unwrap_or_default()),
        );
        rows.push(cells);
    }
    format!("{title}\n{}", pad_table(&rows))
}

pub fn trajectory_csv(trajectories: &[RankTrajectory], from: Year, to: Year) -> String {
    let mut header = vec!["country".to_owned()];
    header.extend((from..=to).map(|y| y.to_string()));
    let rows = trajectories.iter().map(|t| {
        let mut cells = vec![t.country.to_string()];
        cells.extend((from..=to).map(|y| t.points.get(&y).map(u32::to_string).unwrap_or_default()));
        cells
    });
    csv_text(std::iter::once(header).chain(rows))
}

pub fn trajectory_text(trajectories: &[RankTrajectory], from: Year, to: Year) -> String {
    let mut sorted: Vec<&RankTrajectory> = trajectories.iter().collect();
    sorted.sort_by_key(|t| (t.points.get(&to).copied().unwrap_or(u32::MAX), t.country.clone()));
    let mut header = vec!["".to_owned(), "country".to_owned()];
    header.extend((from..=to).map(|y| y.to_string()));
    let mut rows = vec![header];
    for (i, t) in sorted.iter().enumerate() {
        let mut cells = vec![format!("{}.", i + 1), t.country.to_string()];
        cells.extend((from..=to).map(|y| t.points.get(&y).map(u32::to_string).unwrap_or_default()));
        rows.push(cells);
    }
    pad_table(&rows)
}

/// `scope,id,year,coverage` with scope `country` or `indicator`; an empty
/// coverage cell means nobody reported the indicator that year.
pub fn coverage_rows(report: &CoverageReport, num: fn(f64) -> String) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["scope".into(), "id".into(), "year".into(), "coverage".into()]];
    for (country, per_year) in &report.by_country_year {
        for (year, v) in &per_year.0 {
            rows.push(vec!["country".into(), country.to_string(), year.to_string(), num(*v)]);
        }
    }
    for (indicator, per_year) in &report.by_indicator_year {
        for (year, v) in &per_year.0 {
            rows.push(vec!["indicator".into(), indicator.clone(), year.to_string(), v.map(num).unwrap_or_default()]);
        }
    }
    rows
}

pub fn coverage_csv(report: &CoverageReport) -> String {
    csv_text(coverage_rows(report, fmt6))
}

pub fn coverage_text(report: &CoverageReport) -> String {
    let mut header = vec!["".to_owned(), "country".to_owned()];
    header.extend(report.years.iter().map(|y| y.to_string()));
    let mut rows = vec![header];
    for (country, per_year) in &report.by_country_year {
        let mut cells = vec!["".to_owned(), country.to_string()];
        cells.extend(report.years.iter().map(|y| format!("{:.1}%", per_year.0.get(y).copied().unwrap_or(0.0) * 100.0)));
        rows.push(cells);
    }
    pad_table(&rows)
}
