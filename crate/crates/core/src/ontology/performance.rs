use serde::Serialize;

use super::bol::{parse_bol_group, BolToken};
use super::registry::{expected_bol_sequence, AdavuDef, Registry};
use super::OntologyError;
use crate::events::AnnotationRecord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PostureMismatch {
    pub beat: u32,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BolDeviation {
    pub beat: u32,
    pub expected: Vec<BolToken>,
    pub found: Vec<BolToken>,
}

/// Beat-by-beat comparison of an annotated performance with its Adavu definition.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PerformanceReport {
    pub adavu: String,
    pub beats_checked: usize,
    pub posture_mismatches: Vec<PostureMismatch>,
    /// Bols that differ from the Sollukattu. Vocal renditions vary between
    /// performers, so these are reported but not counted as mismatches.
    pub bol_deviations: Vec<BolDeviation>,
    pub notes: Vec<String>,
}

impl PerformanceReport {
    pub fn is_clean(&self) -> bool {
        self.posture_mismatches.is_empty()
    }
}

/// Checks annotated postures and bols against the Adavu's posture sequence and
/// its Sollukattu. Beat 0 is the preparatory posture before the first beat and
/// is compared against the Adavu's initial posture; beat `b >= 1` is compared
/// against bar position `(b - 1) mod bar_length`.
pub fn validate_performance(
    annotation: &[AnnotationRecord],
    adavu: &AdavuDef,
    registry: &Registry,
) -> Result<PerformanceReport, OntologyError> {
    let mut report = PerformanceReport {
        adavu: adavu.to_string(),
        ..Default::default()
    };
    let soll = registry.sollukattu(&adavu.sollukattu).ok_or_else(|| {
        OntologyError::Validation(vec![format!(
            "adavu {adavu}: unknown sollukattu '{}'",
            adavu.sollukattu
        )])
    })?;

    let mut problems = Vec::new();
    let mut resolved = Vec::with_capacity(annotation.len());
    for (i, rec) in annotation.iter().enumerate() {
        let posture = registry.canonical_posture_id(&rec.posture_name);
        let bols = parse_bol_group(&rec.bols);
        match (posture, bols) {
            (Some(p), Ok(b)) => resolved.push((rec.beat_number, p.to_string(), b)),
            (None, _) => problems.push(format!(
                "record {} (frames {}-{}, beat {}): unknown posture '{}'",
                i + 1,
                rec.start_frame,
                rec.end_frame,
                rec.beat_number,
                rec.posture_name
            )),
            (_, Err(e)) => problems.push(format!(
                "record {} (frames {}-{}, beat {}): {e}",
                i + 1,
                rec.start_frame,
                rec.end_frame,
                rec.beat_number
            )),
        }
    }
    if !problems.is_empty() {
        return Err(OntologyError::Validation(problems));
    }
    if resolved.is_empty() {
        report.notes.push("no beats checked".to_string());
        return Ok(report);
    }

    let bar = expected_bol_sequence(soll, 1);
    let sequence: Vec<&str> = adavu
        .posture_sequence
        .iter()
        .map(|id| registry.canonical_posture_id(id).unwrap_or(id))
        .collect();
    if sequence.is_empty() {
        report
            .notes
            .push(format!("adavu {adavu} has no catalogued posture sequence; postures not checked"));
    }

    for (beat, posture, bols) in resolved {
        report.beats_checked += 1;
        let (expected_posture, expected_bols) = if beat == 0 {
            let initial = adavu
                .initial_posture
                .as_deref()
                .map(|id| registry.canonical_posture_id(id).unwrap_or(id));
            (initial, Vec::new())
        } else {
            let pos = (beat as usize - 1) % soll.bar_length;
            let posture = (!sequence.is_empty()).then(|| sequence[(beat as usize - 1) % sequence.len()]);
            (posture, bar[pos].1.clone())
        };
        if let Some(expected) = expected_posture {
            if expected != posture {
                report.posture_mismatches.push(PostureMismatch {
                    beat,
                    expected: expected.to_string(),
                    found: posture,
                });
            }
        }
        if expected_bols != bols {
            report.bol_deviations.push(BolDeviation {
                beat,
                expected: expected_bols,
                found: bols,
            });
        }
    }
    Ok(report)
}
