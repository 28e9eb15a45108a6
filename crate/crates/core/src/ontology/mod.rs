//! Registry of Sollukattus, Adavus and key postures.

use std::path::PathBuf;

mod bol;
mod performance;
mod posture;
mod registry;
pub mod vocab;

pub use bol::{parse_bol_group, BolToken};
pub use performance::{validate_performance, BolDeviation, PerformanceReport, PostureMismatch};
pub use posture::{mirror_posture, FormationPair, KeyPostureSpec, LegSupport, LegsPosition, Symmetry};
pub use registry::{expected_bol_sequence, AdavuDef, Registry, SollukattuDef, Taalam, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum OntologyError {
    #[error("unknown bol '{0}'")]
    UnknownBol(String),
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}:{column}: {message}")]
    Format {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("ontology validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
}
