//! Transcription toolchain for Bharatanatyam Adavu recordings.
//!
//! The crate turns annotated performances (beat events with bols, frame-ranged
//! key-posture annotations, optional skeleton streams) into Labanotation:
//!
//! - [`events`]: audio/video/sync event streams, tempo and bar analysis.
//! - [`ontology`]: Sollukattu, Adavu and key-posture registry.
//! - [`laban`]: numeric Laban descriptors and the posture mapping database.
//! - [`labanxml`]: LabanXML generator and parser.
//! - [`staff`]: SVG rendering of the Laban staff.
//! - [`recognizer`]: skeleton-feature posture classifier.

pub mod events;
pub mod laban;
pub mod labanxml;
pub mod ontology;
pub mod recognizer;
pub mod staff;

/// Video streams are captured at a fixed frame rate.
pub const FRAMES_PER_SECOND: f64 = 30.0;
