use std::collections::BTreeSet;
use std::io::{Read, Write};

use csv::{ReaderBuilder, StringRecord, Trim};

use super::{IngestError, FORMAT_VERSION};
use crate::derived::{ModelProductionCounts, TalentConcentrationPair};
use crate::error::Error;
use crate::model::{CountryCode, Metadata, ObservationTable, PopulationTable, Year};

/// First line written to every CSV file.
pub const FORMAT_COMMENT: &str = "# format_version: 1";

const OBSERVATION_HEADER: [&str; 4] = ["country", "year", "indicator", "value"];
const POPULATION_HEADER: [&str; 3] = ["country", "year", "population"];
const MODEL_HEADER: [&str; 5] = ["country", "year", "academia_only", "industry_only", "total"];
const TALENT_HEADER: [&str; 4] = ["country", "year", "female", "male"];

/// Reads CSV text, checking an optional leading `# format_version: N`
/// comment and that the header starts with `expected`.
fn records(mut source: impl Read, expected: &[&str]) -> Result<Vec<(u64, StringRecord)>, IngestError> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| IngestError::Parse { line: 0, message: e.to_string() })?;
    if let Some(first) = text.lines().next().filter(|l| l.starts_with('#')) {
        if let Some(version) = first.trim_start_matches('#').trim().strip_prefix("format_version:") {
            let version: u32 = version
                .trim()
                .parse()
                .map_err(|_| IngestError::Schema(format!("bad format_version comment `{first}`")))?;
            if version != FORMAT_VERSION {
                return Err(IngestError::Schema(format!("unsupported format_version {version}")));
            }
        }
    }

    let mut reader = ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| IngestError::Parse { line: 1, message: e.to_string() })?;
    if header.len() < expected.len() || header.iter().zip(expected).any(|(got, want)| got != *want) {
        return Err(IngestError::Schema(format!(
            "expected header `{}`, found `{}`",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| IngestError::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        out.push((line, record));
    }
    Ok(out)
}

fn parse_country(raw: &str, line: u64, known: &BTreeSet<CountryCode>) -> Result<CountryCode, IngestError> {
    let code: CountryCode = raw.parse().map_err(|message| IngestError::Parse { line, message })?;
    if !known.contains(&code) {
        return Err(IngestError::UnknownCountry { line, code: raw.to_owned() });
    }
    Ok(code)
}

fn parse_year(raw: &str, line: u64) -> Result<Year, IngestError> {
    if raw.len() != 4 || !raw.bytes().all(|b| b.is_ascii_digit()) {
        return Err(IngestError::Parse {
            line,
            message: format!("year `{raw}` is not a 4-digit number"),
        });
    }
    Ok(raw.parse().expect("four ascii digits"))
}

fn parse_number<T: std::str::FromStr>(raw: &str, line: u64, what: &str) -> Result<T, IngestError> {
    raw.parse().map_err(|_| IngestError::Parse {
        line,
        message: format!("{what} `{raw}` is not a valid number"),
    })
}

/// Reads `country,year,indicator,value` rows. Empty values are missing
/// observations and produce no entry. Every metadata country is registered
/// in the table, observed or not.
pub fn load_observations(source: impl Read, metadata: &Metadata) -> Result<ObservationTable, IngestError> {
    let countries = metadata.country_codes();
    let indicators = metadata.indicator_ids();
    let mut table = ObservationTable::with_countries(countries.iter().cloned());
    for (line, record) in records(source, &OBSERVATION_HEADER)? {
        let country = parse_country(&record[0], line, &countries)?;
        let year = parse_year(&record[1], line)?;
        let indicator = &record[2];
        if !indicators.contains(indicator) {
            return Err(IngestError::UnknownIndicator { line, id: indicator.to_owned() });
        }
        let raw = &record[3];
        if raw.is_empty() {
            // the year still exists in the panel even if this cell is blank
            table.register_year(year);
            continue;
        }
        let value: f64 = parse_number(raw, line, "value")?;
        table.insert(country, year, indicator, value).map_err(|err| match err {
            Error::DuplicateKey { country, year, indicator } => IngestError::DuplicateKey {
                line,
                country: country.to_string(),
                year,
                indicator,
            },
            other => IngestError::Parse { line, message: other.to_string() },
        })?;
    }
    Ok(table)
}

/// Writes `table` in the format read by [`load_observations`].
pub fn write_observations(table: &ObservationTable, sink: impl Write) -> std::io::Result<()> {
    let mut sink = sink;
    writeln!(sink, "{FORMAT_COMMENT}")?;
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(OBSERVATION_HEADER)?;
    for (country, year, indicator, value) in table.iter() {
        writer.write_record([country.as_str(), &year.to_string(), indicator, &value.to_string()])?;
    }
    writer.flush()
}

pub fn load_population(source: impl Read, metadata: &Metadata) -> Result<PopulationTable, IngestError> {
    let countries = metadata.country_codes();
    let mut table = PopulationTable::new();
    for (line, record) in records(source, &POPULATION_HEADER)? {
        let country = parse_country(&record[0], line, &countries)?;
        let year = parse_year(&record[1], line)?;
        if record[2].is_empty() {
            continue;
        }
        let persons: u64 = parse_number(&record[2], line, "population")?;
        table.insert(country, year, persons).map_err(|err| match err {
            Error::DuplicateKey { country, year, indicator } => IngestError::DuplicateKey {
                line,
                country: country.to_string(),
                year,
                indicator,
            },
            other => IngestError::Parse { line, message: other.to_string() },
        })?;
    }
    Ok(table)
}

pub fn write_population(table: &PopulationTable, sink: impl Write) -> std::io::Result<()> {
    let mut sink = sink;
    writeln!(sink, "{FORMAT_COMMENT}")?;
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(POPULATION_HEADER)?;
    for (country, year, persons) in table.iter() {
        writer.write_record([country.as_str(), &year.to_string(), &persons.to_string()])?;
    }
    writer.flush()
}

/// Reads `country,year,academia_only,industry_only,total` rows.
pub fn load_model_production(source: impl Read, metadata: &Metadata) -> Result<Vec<ModelProductionCounts>, IngestError> {
    let countries = metadata.country_codes();
    let mut out = Vec::new();
    for (line, record) in records(source, &MODEL_HEADER)? {
        let counts = ModelProductionCounts {
            country: parse_country(&record[0], line, &countries)?,
            year: parse_year(&record[1], line)?,
            academia_only: parse_number(&record[2], line, "academia_only")?,
            industry_only: parse_number(&record[3], line, "industry_only")?,
            total: parse_number(&record[4], line, "total")?,
        };
        if counts.academia_only + counts.industry_only > counts.total {
            return Err(IngestError::Parse {
                line,
                message: "academia_only + industry_only exceeds total".into(),
            });
        }
        out.push(counts);
    }
    Ok(out)
}

/// Reads `country,year,female,male` talent concentration rows.
pub fn load_talent_gender(source: impl Read, metadata: &Metadata) -> Result<Vec<TalentConcentrationPair>, IngestError> {
    let countries = metadata.country_codes();
    let mut out = Vec::new();
    for (line, record) in records(source, &TALENT_HEADER)? {
        let pair = TalentConcentrationPair {
            country: parse_country(&record[0], line, &countries)?,
            year: parse_year(&record[1], line)?,
            female: parse_number(&record[2], line, "female")?,
            male: parse_number(&record[3], line, "male")?,
        };
        if !(pair.female.is_finite() && pair.female >= 0.0 && pair.male.is_finite() && pair.male >= 0.0) {
            return Err(IngestError::Parse {
                line,
                message: "talent concentrations must be non-negative".into(),
            });
        }
        out.push(pair);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::bundled_metadata;

    fn usa() -> CountryCode {
        "USA".parse().unwrap()
    }

    #[test]
    fn reads_a_row() {
        let meta = bundled_metadata();
        let csv = "country,year,indicator,value\nUSA,2023,ai_journal_publications,45123\n";
        let t = load_observations(csv.as_bytes(), &meta).unwrap();
        assert_eq!(t.get(&usa(), 2023, "ai_journal_publications"), Some(45123.0));
        assert_eq!(t.len(), 1);
        assert_eq!(t.countries().len(), 36);
    }

    #[test]
    fn empty_value_is_missing() {
        let meta = bundled_metadata();
        let csv = "country,year,indicator,value\nUSA,2023,ai_journal_publications,\n";
        let t = load_observations(csv.as_bytes(), &meta).unwrap();
        assert!(t.is_empty());
        assert!(t.has_year(2023));
    }

    #[test]
    fn duplicate_rows_are_named() {
        let meta = bundled_metadata();
        let csv = "country,year,indicator,value\nUSA,2023,ai_journal_publications,1\nUSA,2023,ai_journal_publications,2\n";
        match load_observations(csv.as_bytes(), &meta).unwrap_err() {
            IngestError::DuplicateKey {
                line,
                country,
                year,
                indicator,
            } => {
                assert_eq!((line, country.as_str(), year, indicator.as_str()), (3, "USA", 2023, "ai_journal_publications"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_rows() {
        let meta = bundled_metadata();
        let cases = [
            ("country,year,indicator,value\nUSA,2023,nope,1\n", "unknown indicator"),
            ("country,year,indicator,value\nXXX,2023,ai_journal_publications,1\n", "not listed"),
            ("country,year,indicator,value\nUSA,23,ai_journal_publications,1\n", "4-digit"),
            ("country,year,indicator,value\nUSA,2023,ai_journal_publications,abc\n", "not a valid number"),
            ("country,year,indicator,value\nUSA,2023,ai_journal_publications,NaN\n", "not a finite"),
            ("country,year,value\nUSA,2023,1\n", "expected header"),
            ("# format_version: 2\ncountry,year,indicator,value\n", "unsupported"),
        ];
        for (csv, needle) in cases {
            let err = load_observations(csv.as_bytes(), &meta).unwrap_err().to_string();
            assert!(err.contains(needle), "{csv:?} gave {err}");
        }
    }

    #[test]
    fn population_rows() {
        let meta = bundled_metadata();
        let csv = "# format_version: 1\ncountry,year,population\nUSA,2023,334914895\n";
        let p = load_population(csv.as_bytes(), &meta).unwrap();
        assert_eq!(p.get(&usa(), 2023), Some(334_914_895));
        let bad = "country,year,population\nUSA,2023,0\n";
        assert!(load_population(bad.as_bytes(), &meta).is_err());
    }

    #[test]
    fn derived_inputs() {
        let meta = bundled_metadata();
        let csv = "country,year,academia_only,industry_only,total\nUSA,2023,10,10,20\n";
        assert_eq!(load_model_production(csv.as_bytes(), &meta).unwrap()[0].total, 20);
        let csv = "country,year,academia_only,industry_only,total\nUSA,2023,15,10,20\n";
        assert!(load_model_production(csv.as_bytes(), &meta).is_err());
        let csv = "country,year,female,male\nUSA,2023,0.02,0.04\n";
        assert_eq!(load_talent_gender(csv.as_bytes(), &meta).unwrap()[0].male, 0.04);
    }
}
