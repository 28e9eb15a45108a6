//! Key-posture recognition from skeleton frames.
//!
//! Skeletons are normalized (hip centre at the origin, hip-to-shoulder-centre
//! distance 1, shoulder line turned to face the sensor) and classified by the
//! nearest class centroid.

mod csvio;
mod model;
mod skeleton;

pub use csvio::{read_skeleton_csv, write_skeleton_csv};
pub use model::{
    evaluate, label_frames, segment_key_postures, train, train_for_classes, CentroidModel, Evaluation,
    FramePrediction, PostureClassifier, Prediction,
};
pub use skeleton::{extract_features, FeatureVector, Joint, SkeletonFrame, FEATURE_LEN, JOINT_COUNT};

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum RecognizerError {
    #[error("degenerate skeleton at frame {frame}: {reason}")]
    Degenerate { frame: u64, reason: String },
    #[error("invalid skeleton at frame {frame}: {reason}")]
    InvalidSkeleton { frame: u64, reason: String },
    #[error("training failed: {0}")]
    Training(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
