//! Loading and validating datasets, plus coverage statistics.

mod coverage;
mod csv_io;
mod metadata;
mod weights;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::error::Error;
use crate::model::{Metadata, ObservationTable, PopulationTable, SubIndexDefinition, WeightConfig, Year};

pub use coverage::{compute_coverage, validate_inclusion, CoverageReport, InclusionNote, NoteKind, COVERAGE_THRESHOLD, COVERAGE_WINDOW};
pub use csv_io::{
    load_model_production, load_observations, load_population, load_talent_gender, write_observations,
    write_population, FORMAT_COMMENT,
};
pub use metadata::{bundled_metadata, load_metadata, BUNDLED_METADATA};
pub use weights::{load_weight_overrides, weight_shares, WeightShares};

pub const OBSERVATIONS_FILE: &str = "observations.csv";
pub const POPULATION_FILE: &str = "population.csv";
pub const METADATA_FILE: &str = "metadata.toml";
/// Optional inputs for the derived academia/industry concentration indicator.
pub const MODEL_PRODUCTION_FILE: &str = "model_production.csv";
/// Optional inputs for the derived gender equality indicator.
pub const TALENT_GENDER_FILE: &str = "talent_gender.csv";

/// Supported version of every file format.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: duplicate entry for ({country}, {year}, {indicator})")]
    DuplicateKey {
        line: u64,
        country: String,
        year: Year,
        indicator: String,
    },

    #[error("line {line}: unknown indicator `{id}`")]
    UnknownIndicator { line: u64, id: String },

    #[error("line {line}: country `{code}` is not listed in the metadata")]
    UnknownCountry { line: u64, code: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("unknown pillar `{0}`")]
    UnknownPillar(String),

    #[error("weight for `{id}` is {value}, expected a value in [0, 10]")]
    WeightOutOfRange { id: String, value: f64 },

    #[error(transparent)]
    Invalid(Error),

    #[error("{}: {source}", file.display())]
    InFile {
        file: PathBuf,
        #[source]
        source: Box<IngestError>,
    },
}

impl IngestError {
    pub(crate) fn in_file(self, file: &Path) -> Self {
        match self {
            err @ (IngestError::Io { .. } | IngestError::InFile { .. }) => err,
            other => IngestError::InFile {
                file: file.to_owned(),
                source: Box::new(other),
            },
        }
    }

    /// The error with any file context removed.
    pub fn root(&self) -> &IngestError {
        match self {
            IngestError::InFile { source, .. } => source.root(),
            other => other,
        }
    }
}

impl From<Error> for IngestError {
    fn from(err: Error) -> Self {
        match err {
            Error::UnknownPillar(id) => IngestError::UnknownPillar(id),
            Error::WeightOutOfRange { id, value } => IngestError::WeightOutOfRange { id, value },
            Error::InvalidMetadata(msg) => IngestError::Schema(msg),
            other => IngestError::Invalid(other),
        }
    }
}

/// Everything the engine needs, loaded once and read-only afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    pub observations: ObservationTable,
    pub metadata: Metadata,
    pub default_weights: WeightConfig,
    pub population: PopulationTable,
}

impl DatasetBundle {
    pub fn new(observations: ObservationTable, metadata: Metadata, population: PopulationTable) -> Result<Self, IngestError> {
        metadata.validate()?;
        let default_weights = metadata.default_weights();
        default_weights.validate(&metadata)?;
        let known = metadata.indicator_ids();
        if let Some((_, _, id, _)) = observations.iter().find(|(_, _, id, _)| !known.contains(*id)) {
            return Err(IngestError::UnknownIndicator { line: 0, id: id.to_owned() });
        }
        Ok(DatasetBundle {
            observations,
            metadata,
            default_weights,
            population,
        })
    }

    /// Reads `metadata.toml`, `observations.csv` and `population.csv` from
    /// `dir`, plus the optional derived-metric inputs when present.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, IngestError> {
        let dir = dir.as_ref();
        let read = |name: &str| {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(|source| IngestError::Io { path, source })
        };

        let metadata_path = dir.join(METADATA_FILE);
        let metadata = load_metadata(&read(METADATA_FILE)?).map_err(|e| e.in_file(&metadata_path))?;

        let obs_path = dir.join(OBSERVATIONS_FILE);
        let mut observations =
            load_observations(read(OBSERVATIONS_FILE)?.as_bytes(), &metadata).map_err(|e| e.in_file(&obs_path))?;

        let pop_path = dir.join(POPULATION_FILE);
        let population =
            load_population(read(POPULATION_FILE)?.as_bytes(), &metadata).map_err(|e| e.in_file(&pop_path))?;

        let counts_path = dir.join(MODEL_PRODUCTION_FILE);
        let counts = if counts_path.exists() {
            load_model_production(read(MODEL_PRODUCTION_FILE)?.as_bytes(), &metadata).map_err(|e| e.in_file(&counts_path))?
        } else {
            Vec::new()
        };
        let talent_path = dir.join(TALENT_GENDER_FILE);
        let pairs = if talent_path.exists() {
            load_talent_gender(read(TALENT_GENDER_FILE)?.as_bytes(), &metadata).map_err(|e| e.in_file(&talent_path))?
        } else {
            Vec::new()
        };
        crate::derived::insert_derived(&mut observations, &counts, &pairs).map_err(|e| {
            IngestError::Schema(format!("derived indicator clashes with {OBSERVATIONS_FILE}: {e}"))
        })?;

        DatasetBundle::new(observations, metadata, population)
    }

    pub fn sub_index(&self, id: &str) -> Result<&SubIndexDefinition, Error> {
        self.metadata
            .sub_index(id)
            .ok_or_else(|| Error::UnknownSubIndex(id.to_owned()))
    }

    pub fn first_year(&self) -> Option<Year> {
        self.observations.years().first().copied()
    }

    pub fn last_year(&self) -> Option<Year> {
        self.observations.years().last().copied()
    }
}
