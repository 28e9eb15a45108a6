use serde::{Deserialize, Serialize};

use super::audio::AudioEvent;
use super::video::{VideoEvent, VideoEventKind};
use super::EventError;
use crate::ontology::BolToken;
use crate::FRAMES_PER_SECOND;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SyncEventKind {
    PostureAtFullBeat,
    PostureAtHalfBeat,
    BolAtFullBeat,
    BolAtHalfBeat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncEvent {
    pub kind: SyncEventKind,
    pub audio_id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub video_id: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub posture_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bol: Option<BolToken>,
    /// Beat instant minus the midpoint of the matched posture interval.
    pub lag_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagStats {
    pub min_s: f64,
    pub median_s: f64,
    pub max_s: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SyncReport {
    pub events: Vec<SyncEvent>,
    /// Full and half beats checked against the video stream.
    pub beats_checked: usize,
    pub synced_beat_ids: Vec<u32>,
    pub unsynced_beat_ids: Vec<u32>,
    pub lag: Option<LagStats>,
    pub diagnostics: Vec<String>,
}

/// Time span covered by a NoMotion event. A frame stands for the instants
/// nearest to it, so the span reaches half a frame beyond the first and last
/// frame centres: an instant `t` is inside at zero tolerance exactly when
/// `round(t * 30)` is one of the event's frames.
fn covered_span(v: &VideoEvent, tolerance_s: f64) -> (f64, f64) {
    let start = (v.frame_start as f64 - 0.5) / FRAMES_PER_SECOND - tolerance_s;
    let end = (v.frame_end as f64 + 0.5) / FRAMES_PER_SECOND + tolerance_s;
    (start, end)
}

/// Pairs each full and half beat with the key-posture interval containing it.
///
/// A beat matches when its instant lies within a NoMotion span widened by
/// `tolerance_s` on both sides; if several spans qualify, the one with the
/// nearest midpoint wins. Every beat carrying a bol also yields a bol sync
/// event. Beats without a matching posture are listed in the diagnostics.
pub fn detect_sync(
    audio: &[AudioEvent],
    video: &[VideoEvent],
    tolerance_s: f64,
) -> Result<SyncReport, EventError> {
    if !(tolerance_s.is_finite() && tolerance_s >= 0.0) {
        return Err(EventError::Domain(format!(
            "tolerance must be non-negative, got {tolerance_s}"
        )));
    }
    let key_frames: Vec<&VideoEvent> = video.iter().filter(|v| v.kind == VideoEventKind::NoMotion).collect();
    let mut report = SyncReport::default();
    let mut lags = Vec::new();

    for beat in audio {
        let full = beat.kind.is_full_beat();
        if !full && !beat.kind.is_half_beat() {
            continue;
        }
        report.beats_checked += 1;
        let t = beat.time_s;
        let matched = key_frames
            .iter()
            .filter(|v| {
                let (a, b) = covered_span(v, tolerance_s);
                a <= t && t < b
            })
            .min_by(|a, b| {
                (t - a.midpoint_s())
                    .abs()
                    .total_cmp(&(t - b.midpoint_s()).abs())
                    .then(a.id.cmp(&b.id))
            });
        match matched {
            Some(v) => {
                let lag_s = t - v.midpoint_s();
                lags.push(lag_s);
                report.synced_beat_ids.push(beat.id);
                report.events.push(SyncEvent {
                    kind: if full {
                        SyncEventKind::PostureAtFullBeat
                    } else {
                        SyncEventKind::PostureAtHalfBeat
                    },
                    audio_id: beat.id,
                    video_id: Some(v.id),
                    posture_id: v.posture_id.clone(),
                    bol: None,
                    lag_s,
                });
            }
            None => {
                report.unsynced_beat_ids.push(beat.id);
                report.diagnostics.push(format!(
                    "{} beat {} at {:.3} s (frame {}) falls in no key-posture interval",
                    if full { "full" } else { "half" },
                    beat.id,
                    t,
                    (t * FRAMES_PER_SECOND).round()
                ));
            }
        }
        if let Some(bol) = beat.bol {
            report.events.push(SyncEvent {
                kind: if full {
                    SyncEventKind::BolAtFullBeat
                } else {
                    SyncEventKind::BolAtHalfBeat
                },
                audio_id: beat.id,
                video_id: None,
                posture_id: None,
                bol: Some(bol),
                lag_s: 0.0,
            });
        }
    }

    if !lags.is_empty() {
        lags.sort_by(f64::total_cmp);
        let n = lags.len();
        let median_s = if n % 2 == 1 {
            lags[n / 2]
        } else {
            (lags[n / 2 - 1] + lags[n / 2]) / 2.0
        };
        report.lag = Some(LagStats {
            min_s: lags[0],
            median_s,
            max_s: lags[n - 1],
        });
    }
    Ok(report)
}
