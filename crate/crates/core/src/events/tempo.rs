use serde::Serialize;

use super::audio::AudioEvent;
use super::EventError;

/// Intervals further than this fraction from the median are flagged.
pub const OUTLIER_FRACTION: f64 = 0.20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TempoEstimate {
    pub period_s: f64,
    pub bpm: f64,
    pub interval_count: usize,
    pub diagnostics: Vec<String>,
}

/// Tempo and bar summary of a labelled audio stream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeterEstimate {
    pub period_s: f64,
    pub bpm: f64,
    pub bar_length: usize,
    pub bar_count: usize,
    pub full_beat_ids: Vec<u32>,
    pub half_beat_ids: Vec<u32>,
}

impl MeterEstimate {
    pub fn new(tempo: &TempoEstimate, events: &[AudioEvent], bar_length: usize) -> MeterEstimate {
        let full_beat_ids: Vec<u32> = events.iter().filter(|e| e.kind.is_full_beat()).map(|e| e.id).collect();
        let half_beat_ids = events.iter().filter(|e| e.kind.is_half_beat()).map(|e| e.id).collect();
        let bar_count = if bar_length == 0 {
            0
        } else {
            full_beat_ids.len().div_ceil(bar_length)
        };
        MeterEstimate {
            period_s: tempo.period_s,
            bpm: tempo.bpm,
            bar_length,
            bar_count,
            full_beat_ids,
            half_beat_ids,
        }
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Period as the median of consecutive intervals between `times`.
pub fn estimate_period(times: &[f64]) -> Result<TempoEstimate, EventError> {
    if times.len() < 3 {
        return Err(EventError::InsufficientData {
            needed: 3,
            found: times.len(),
        });
    }
    let intervals: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    if let Some(i) = intervals.iter().position(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(EventError::Domain(format!(
            "beat times must be strictly increasing ({} then {})",
            times[i],
            times[i + 1]
        )));
    }
    let mut sorted = intervals.clone();
    sorted.sort_by(f64::total_cmp);
    let period_s = median(&sorted);
    let diagnostics = intervals
        .iter()
        .enumerate()
        .filter(|(_, d)| ((*d - period_s) / period_s).abs() > OUTLIER_FRACTION)
        .map(|(i, d)| {
            format!(
                "interval {} ({:.3} s to {:.3} s) is {:.3} s, more than {:.0}% from the median {:.3} s",
                i + 1,
                times[i],
                times[i + 1],
                d,
                OUTLIER_FRACTION * 100.0,
                period_s
            )
        })
        .collect();
    Ok(TempoEstimate {
        period_s,
        bpm: 60.0 / period_s,
        interval_count: intervals.len(),
        diagnostics,
    })
}

/// Tempo from a stream of full beats.
pub fn estimate_tempo(full_beats: &[AudioEvent]) -> Result<TempoEstimate, EventError> {
    let times: Vec<f64> = full_beats.iter().map(|e| e.time_s).collect();
    estimate_period(&times)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_periodicity() {
        let t = estimate_period(&[0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(t.period_s, 1.0);
        assert_eq!(t.bpm, 60.0);
        assert!(t.diagnostics.is_empty());
    }

    #[test]
    fn even_interval_count_takes_mean_of_middle() {
        let t = estimate_period(&[0.0, 1.0, 3.0, 4.1, 5.3]).unwrap();
        // intervals 1.0, 2.0, 1.1, 1.2 -> sorted middle pair 1.1, 1.2
        assert!((t.period_s - 1.15).abs() < 1e-12);
        assert_eq!(t.diagnostics.len(), 1);
    }

    #[test]
    fn too_few_beats() {
        assert!(matches!(
            estimate_period(&[0.0, 1.0]),
            Err(EventError::InsufficientData { needed: 3, found: 2 })
        ));
    }

    #[test]
    fn non_increasing() {
        assert!(estimate_period(&[0.0, 1.0, 1.0]).is_err());
    }
}
