use std::io::{Read, Write};

use super::skeleton::{Joint, SkeletonFrame, JOINT_COUNT};
use super::RecognizerError;

fn header() -> Vec<String> {
    let mut h = vec!["frame".to_string()];
    for j in 1..=JOINT_COUNT {
        for axis in ["x", "y", "z"] {
            h.push(format!("j{j}_{axis}"));
        }
    }
    h
}

fn csv_error(e: csv::Error) -> RecognizerError {
    RecognizerError::Csv {
        line: e.position().map(|p| p.line()).unwrap_or(0),
        message: e.to_string(),
    }
}

/// Reads skeleton frames from CSV with header
/// `frame,j1_x,j1_y,j1_z,...,j20_x,j20_y,j20_z`, joints in [`Joint::ALL`] order.
pub fn read_skeleton_csv<R: Read>(input: R) -> Result<Vec<SkeletonFrame>, RecognizerError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let expected = header();
    let found: Vec<String> = reader.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
    if found != expected {
        return Err(RecognizerError::Csv {
            line: 1,
            message: format!("expected {} columns frame,j1_x,...,j20_z", expected.len()),
        });
    }
    let mut out: Vec<SkeletonFrame> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let bad = |message: String| RecognizerError::Csv { line, message };
        let frame: u64 = record[0]
            .parse()
            .map_err(|_| bad(format!("invalid frame number '{}'", &record[0])))?;
        let mut joints = [[0.0; 3]; JOINT_COUNT];
        for (k, field) in record.iter().skip(1).enumerate() {
            let v: f64 = field.parse().map_err(|_| bad(format!("invalid coordinate '{field}'")))?;
            if !v.is_finite() {
                return Err(bad(format!("non-finite coordinate '{field}'")));
            }
            joints[k / 3][k % 3] = v;
        }
        if let Some(prev) = out.last() {
            if frame <= prev.frame {
                return Err(bad(format!("frame {frame} does not follow frame {}", prev.frame)));
            }
        }
        out.push(SkeletonFrame { frame, joints });
    }
    Ok(out)
}

pub fn write_skeleton_csv<W: Write>(output: W, frames: &[SkeletonFrame]) -> Result<(), RecognizerError> {
    let mut writer = csv::Writer::from_writer(output);
    writer.write_record(header()).map_err(csv_error)?;
    for f in frames {
        let mut row = vec![f.frame.to_string()];
        for j in Joint::ALL {
            row.extend(f.joint(j).iter().map(|v| v.to_string()));
        }
        writer.write_record(row).map_err(csv_error)?;
    }
    writer.flush().map_err(|e| RecognizerError::Csv {
        line: 0,
        message: e.to_string(),
    })
}
