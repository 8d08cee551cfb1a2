//! Composite AI vibrancy index engine.
//!
//! Raw country/year/indicator observations go through a fixed pipeline:
//! optional per-capita transform, median imputation, min-max normalization,
//! weighted pillar scores, a weighted index over pillars, and competition
//! ranking. Every stage is a pure function of its inputs.

pub mod aggregate;
pub mod derived;
pub mod error;
pub mod impute;
pub mod ingest;
pub mod model;
pub mod normalize;
pub mod num;
pub mod pipeline;
pub mod ranking;

pub use error::{Error, Result};
pub use ingest::{DatasetBundle, IngestError};
pub use model::{
    CountryCode, CountryDefinition, IndicatorDefinition, Metadata, ObservationTable, PillarDefinition, PopulationTable,
    ScaleMode, SubIndexDefinition, WeightConfig, WeightOverrides, Year,
};
pub use pipeline::{compute_scores, compute_sub_index, IndicatorScore, NormalizedTable, ScoreCard};
pub use ranking::{rank_by_score, rank_trajectories, rank_year, RankTrajectory, RankingRow, RankingTable};
