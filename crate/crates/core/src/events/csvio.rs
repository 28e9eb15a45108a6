use std::io::{Read, Write};

use serde::Deserialize;

use super::audio::Onset;
use super::video::AnnotationRecord;
use super::EventError;
use crate::ontology::BolToken;

fn csv_error(e: csv::Error) -> EventError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    let message = match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
        _ => e.to_string(),
    };
    EventError::Csv { line, message }
}

fn check_headers<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<(), EventError> {
    let headers = reader.headers().map_err(csv_error)?;
    let found: Vec<&str> = headers.iter().map(str::trim).collect();
    if found != expected {
        return Err(EventError::Csv {
            line: 1,
            message: format!("expected header '{}', found '{}'", expected.join(","), found.join(",")),
        });
    }
    Ok(())
}

#[derive(Deserialize)]
struct OnsetRow {
    #[allow(dead_code)]
    id: u32,
    time_s: f64,
    #[serde(default)]
    bol: Option<String>,
}

/// Reads audio onsets from CSV with header `id,time_s,bol`. An empty bol or
/// `[B]` marks a beat without a bol.
pub fn read_onsets_csv<R: Read>(input: R) -> Result<Vec<Onset>, EventError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    check_headers(&mut reader, &["id", "time_s", "bol"])?;
    let mut out: Vec<Onset> = Vec::new();
    for row in reader.deserialize::<OnsetRow>() {
        let row = row.map_err(csv_error)?;
        // header is line 1, first record line 2
        let line = out.len() as u64 + 2;
        if !(row.time_s.is_finite() && row.time_s >= 0.0) {
            return Err(EventError::Csv {
                line,
                message: format!("invalid time {}", row.time_s),
            });
        }
        if let Some(prev) = out.last() {
            if row.time_s <= prev.time_s {
                return Err(EventError::Csv {
                    line,
                    message: format!("time {} does not increase after {}", row.time_s, prev.time_s),
                });
            }
        }
        let bol = match row.bol.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(text) => match text.parse::<BolToken>() {
                Ok(BolToken::StickBeat) => None,
                Ok(b) => Some(b),
                Err(e) => return Err(EventError::Csv { line, message: e.to_string() }),
            },
        };
        out.push(Onset::new(row.time_s, bol));
    }
    Ok(out)
}

pub const ANNOTATION_HEADER: [&str; 5] = ["posture_name", "start_frame", "end_frame", "beat_number", "bols"];

/// Reads a key-posture annotation with header
/// `posture_name,start_frame,end_frame,beat_number,bols`.
pub fn read_annotation_csv<R: Read>(input: R) -> Result<Vec<AnnotationRecord>, EventError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    check_headers(&mut reader, &ANNOTATION_HEADER)?;
    reader
        .deserialize::<AnnotationRecord>()
        .map(|r| r.map_err(csv_error))
        .collect()
}

pub fn write_annotation_csv<W: Write>(output: W, records: &[AnnotationRecord]) -> Result<(), EventError> {
    let mut writer = csv::Writer::from_writer(output);
    for r in records {
        writer.serialize(r).map_err(csv_error)?;
    }
    writer.flush().map_err(|e| EventError::Csv {
        line: 0,
        message: e.to_string(),
    })
}
