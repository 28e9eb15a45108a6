//! Audio, video and sync event streams of a performance.

mod audio;
mod bars;
mod csvio;
mod sync;
mod tempo;
mod video;

pub use audio::{classify_onsets, classify_onsets_with, AudioEvent, AudioEventKind, Classification, Onset, DEFAULT_GRID_TOLERANCE};
pub use bars::{label_bar_structure, BarLabel, BarLabeling};
pub use csvio::{read_annotation_csv, read_onsets_csv, write_annotation_csv};
pub use sync::{detect_sync, LagStats, SyncEvent, SyncEventKind, SyncReport};
pub use tempo::{estimate_period, estimate_tempo, MeterEstimate, TempoEstimate, OUTLIER_FRACTION};
pub use video::{build_video_events, AnnotationRecord, VideoEvent, VideoEventKind};

use crate::FRAMES_PER_SECOND;

#[derive(Debug, thiserror::Error)]
pub enum EventError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("insufficient data: need at least {needed} events, got {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error("overlapping annotation records: {first} and {second}")]
    Overlap { first: String, second: String },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
}

/// Seconds from stream start of a video frame.
pub fn frame_to_time(frame: i64) -> Result<f64, EventError> {
    if frame < 0 {
        return Err(EventError::Domain(format!("negative frame number {frame}")));
    }
    Ok(frame as f64 / FRAMES_PER_SECOND)
}

/// Frame nearest to an instant; halfway cases round away from zero.
pub fn time_to_frame(t: f64) -> Result<u64, EventError> {
    if !t.is_finite() || t < 0.0 {
        return Err(EventError::Domain(format!("invalid time {t}")));
    }
    Ok((t * FRAMES_PER_SECOND).round() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_time_mapping() {
        assert_eq!(frame_to_time(0).unwrap(), 0.0);
        assert_eq!(frame_to_time(359).unwrap(), 359.0 / 30.0);
        assert!((frame_to_time(359).unwrap() - 11.9667).abs() < 1e-4);
        assert_eq!(time_to_frame(2.681).unwrap(), 80);
        assert_eq!(time_to_frame(0.05).unwrap(), 2);
        assert!(frame_to_time(-1).is_err());
        assert!(time_to_frame(-0.1).is_err());
        assert!(time_to_frame(f64::NAN).is_err());
    }
}
