use serde::{Deserialize, Serialize};

use super::audio::AudioEvent;
use super::EventError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BarLabel {
    Downbeat,
    Upbeat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarLabeling {
    pub events: Vec<AudioEvent>,
    pub bar_length: usize,
    pub complete_bars: usize,
    pub bar_count: usize,
    pub diagnostics: Vec<String>,
}

/// Numbers full beats 1..=bar_length within consecutive bars and marks the
/// first and last beat of each complete bar as downbeat and upbeat. Other
/// events take the bar of the preceding full beat. A trailing incomplete bar
/// keeps its positions but gets no bar labels.
pub fn label_bar_structure(events: &[AudioEvent], bar_length: usize) -> Result<BarLabeling, EventError> {
    if bar_length <= 1 {
        return Err(EventError::Domain(format!(
            "bar length must be at least 2, got {bar_length}"
        )));
    }
    let full_count = events.iter().filter(|e| e.kind.is_full_beat()).count();
    let complete_bars = full_count / bar_length;
    let bar_count = full_count.div_ceil(bar_length);
    let mut diagnostics = Vec::new();
    let remainder = full_count % bar_length;
    if remainder != 0 {
        diagnostics.push(format!(
            "bar {bar_count} is incomplete: {remainder} of {bar_length} full beats"
        ));
    }

    let mut out = Vec::with_capacity(events.len());
    let mut ordinal = 0usize;
    let mut current_bar = None;
    for e in events {
        let mut e = e.clone();
        e.bar_label = None;
        e.beat_in_bar = None;
        if e.kind.is_full_beat() {
            let bar = ordinal / bar_length;
            let pos = ordinal % bar_length + 1;
            ordinal += 1;
            current_bar = Some(bar as u32 + 1);
            e.beat_in_bar = Some(pos as u32);
            if bar < complete_bars {
                if pos == 1 {
                    e.bar_label = Some(BarLabel::Downbeat);
                } else if pos == bar_length {
                    e.bar_label = Some(BarLabel::Upbeat);
                }
            }
        }
        e.bar_index = current_bar;
        out.push(e);
    }
    Ok(BarLabeling {
        events: out,
        bar_length,
        complete_bars,
        bar_count,
        diagnostics,
    })
}
