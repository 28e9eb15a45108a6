use serde::{Deserialize, Serialize};

use super::EventError;
use crate::FRAMES_PER_SECOND;

/// One row of a key-posture annotation: a posture held over a frame range
/// at a beat, with the bols spoken on that beat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub posture_name: String,
    pub start_frame: u64,
    pub end_frame: u64,
    pub beat_number: u32,
    #[serde(default)]
    pub bols: String,
}

impl AnnotationRecord {
    /// Name, frame range and beat, for error messages.
    pub fn describe(&self) -> String {
        format!(
            "{} (frames {}-{}, beat {})",
            self.posture_name, self.start_frame, self.end_frame, self.beat_number
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VideoEventKind {
    NoMotion,
    Transition,
    Trajectory,
}

/// A span of video frames: a held key posture or the motion between two.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoEvent {
    pub id: u32,
    pub kind: VideoEventKind,
    pub frame_start: u64,
    pub frame_end: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub posture_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory_label: Option<String>,
}

impl VideoEvent {
    pub fn start_s(&self) -> f64 {
        self.frame_start as f64 / FRAMES_PER_SECOND
    }

    pub fn end_s(&self) -> f64 {
        self.frame_end as f64 / FRAMES_PER_SECOND
    }

    pub fn midpoint_s(&self) -> f64 {
        (self.frame_start + self.frame_end) as f64 / 2.0 / FRAMES_PER_SECOND
    }
}

/// Converts annotation records into a video event stream: one NoMotion event
/// per record and a Transition event for each gap between records. When the
/// last frame of the stream is given, frames after the last record form a
/// final Transition event.
pub fn build_video_events(
    records: &[AnnotationRecord],
    stream_end_frame: Option<u64>,
) -> Result<Vec<VideoEvent>, EventError> {
    let mut out: Vec<VideoEvent> = Vec::with_capacity(records.len() * 2);
    let push = |out: &mut Vec<VideoEvent>, kind, start, end, posture: Option<&str>| {
        out.push(VideoEvent {
            id: out.len() as u32 + 1,
            kind,
            frame_start: start,
            frame_end: end,
            posture_id: posture.map(str::to_string),
            trajectory_label: None,
        });
    };
    for (i, rec) in records.iter().enumerate() {
        if rec.start_frame > rec.end_frame {
            return Err(EventError::Domain(format!(
                "record {} ends before it starts",
                rec.describe()
            )));
        }
        if i > 0 {
            let prev = &records[i - 1];
            if rec.start_frame <= prev.end_frame {
                return Err(EventError::Overlap {
                    first: prev.describe(),
                    second: rec.describe(),
                });
            }
            if rec.start_frame > prev.end_frame + 1 {
                push(&mut out, VideoEventKind::Transition, prev.end_frame + 1, rec.start_frame - 1, None);
            }
        }
        push(&mut out, VideoEventKind::NoMotion, rec.start_frame, rec.end_frame, Some(&rec.posture_name));
    }
    if let (Some(last), Some(end)) = (records.last(), stream_end_frame) {
        if end > last.end_frame {
            push(&mut out, VideoEventKind::Transition, last.end_frame + 1, end, None);
        }
    }
    Ok(out)
}
