use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::bars::BarLabel;
use super::EventError;
use crate::ontology::BolToken;

/// Fraction of the period within which an onset snaps to a full or half beat.
pub const DEFAULT_GRID_TOLERANCE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AudioEventKind {
    FullBeatBol,
    HalfBeatBol,
    QuarterBeatBol,
    FullBeatNoBol,
    HalfBeatNoBol,
    BolOnly,
}

impl AudioEventKind {
    pub fn is_full_beat(self) -> bool {
        matches!(self, AudioEventKind::FullBeatBol | AudioEventKind::FullBeatNoBol)
    }

    pub fn is_half_beat(self) -> bool {
        matches!(self, AudioEventKind::HalfBeatBol | AudioEventKind::HalfBeatNoBol)
    }

    pub fn requires_bol(self) -> bool {
        !matches!(self, AudioEventKind::FullBeatNoBol | AudioEventKind::HalfBeatNoBol)
    }
}

/// One beat or bol occurrence in the audio stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioEvent {
    pub id: u32,
    pub kind: AudioEventKind,
    pub time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bol: Option<BolToken>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bar_label: Option<BarLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bar_index: Option<u32>,
    /// Position 1..=bar_length of a full beat within its bar.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beat_in_bar: Option<u32>,
}

impl AudioEvent {
    pub fn new(id: u32, kind: AudioEventKind, time_s: f64, bol: Option<BolToken>) -> Result<AudioEvent, EventError> {
        if !time_s.is_finite() || time_s < 0.0 {
            return Err(EventError::Domain(format!("event {id}: invalid time {time_s}")));
        }
        if kind.requires_bol() != bol.is_some() {
            return Err(EventError::Domain(format!(
                "event {id}: kind {kind:?} {} a bol",
                if kind.requires_bol() { "requires" } else { "must not carry" }
            )));
        }
        Ok(AudioEvent {
            id,
            kind,
            time_s,
            bol,
            bar_label: None,
            bar_index: None,
            beat_in_bar: None,
        })
    }
}

/// A detected audio onset, optionally carrying a bol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Onset {
    pub time_s: f64,
    pub bol: Option<BolToken>,
}

impl Onset {
    pub fn new(time_s: f64, bol: Option<BolToken>) -> Onset {
        Onset { time_s, bol }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Classification {
    pub events: Vec<AudioEvent>,
    pub diagnostics: Vec<String>,
}

/// Classifies onsets against a beat grid anchored at the first onset and
/// re-anchored at every full beat, with the default tolerance of a quarter
/// period.
pub fn classify_onsets(onsets: &[Onset], period_s: f64) -> Result<Classification, EventError> {
    classify_onsets_with(onsets, period_s, DEFAULT_GRID_TOLERANCE)
}

/// Classifies each onset as a full beat if within `tolerance * period_s` of a
/// grid point `k * T`, else as a half beat if within the same distance of
/// `k * T + T / 2`. Grid points are counted from the latest full beat, so
/// slow tempo drift over a long recording does not accumulate. Remaining onsets with a bol become quarter-beat bols; those
/// without are dropped with a diagnostic. A second onset on an occupied grid
/// slot is also dropped with a diagnostic.
pub fn classify_onsets_with(
    onsets: &[Onset],
    period_s: f64,
    tolerance: f64,
) -> Result<Classification, EventError> {
    if !(period_s.is_finite() && period_s > 0.0) {
        return Err(EventError::Domain(format!("period must be positive, got {period_s}")));
    }
    if !(tolerance.is_finite() && tolerance > 0.0 && tolerance <= 0.25) {
        return Err(EventError::Domain(format!(
            "grid tolerance must lie in (0, 0.25], got {tolerance}"
        )));
    }
    let mut out = Classification::default();
    let Some(first) = onsets.first() else {
        return Ok(out);
    };
    for w in onsets.windows(2) {
        if w[1].time_s.partial_cmp(&w[0].time_s) != Some(Ordering::Greater) {
            return Err(EventError::Domain(format!(
                "onsets must be strictly increasing in time ({} then {})",
                w[0].time_s, w[1].time_s
            )));
        }
    }
    if !(first.time_s.is_finite() && first.time_s >= 0.0) {
        return Err(EventError::Domain(format!("invalid onset time {}", first.time_s)));
    }

    // Latest full beat and its grid index in whole periods.
    let mut anchor = first.time_s;
    let mut anchor_index = 0.0;
    let mut occupied = BTreeSet::new();
    for onset in onsets {
        let x = (onset.time_s - anchor) / period_s;
        let whole = x.round();
        let half = x.floor() + 0.5;
        let (kind, slot) = if (x - whole).abs() <= tolerance {
            let kind = if onset.bol.is_some() {
                AudioEventKind::FullBeatBol
            } else {
                AudioEventKind::FullBeatNoBol
            };
            let index = anchor_index + whole;
            if whole > 0.0 {
                anchor = onset.time_s;
                anchor_index = index;
            }
            (kind, (index * 4.0) as i64)
        } else if (x - half).abs() <= tolerance {
            let kind = if onset.bol.is_some() {
                AudioEventKind::HalfBeatBol
            } else {
                AudioEventKind::HalfBeatNoBol
            };
            (kind, ((anchor_index + half) * 4.0) as i64)
        } else if onset.bol.is_some() {
            (AudioEventKind::QuarterBeatBol, ((anchor_index + x) * 4.0).round() as i64)
        } else {
            out.diagnostics.push(format!(
                "onset at {:.3} s is off the beat grid ({:.3} periods from the last full beat) and carries no bol; dropped",
                onset.time_s, x
            ));
            continue;
        };
        if !occupied.insert(slot) {
            out.diagnostics.push(format!(
                "onset at {:.3} s falls on an already occupied grid slot; dropped",
                onset.time_s
            ));
            continue;
        }
        let id = out.events.len() as u32 + 1;
        out.events.push(AudioEvent::new(id, kind, onset.time_s, onset.bol)?);
    }
    Ok(out)
}
