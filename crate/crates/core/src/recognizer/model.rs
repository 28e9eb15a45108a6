use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::skeleton::{extract_features, FeatureVector, SkeletonFrame, FEATURE_LEN};
use super::RecognizerError;
use crate::events::AnnotationRecord;

const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub posture_id: String,
    pub distance: f64,
}

mod sealed {
    pub trait Sealed {}
}

/// A posture classifier over skeleton frames.
pub trait PostureClassifier: sealed::Sealed {
    fn predict(&self, s: &SkeletonFrame) -> Result<Prediction, RecognizerError>;
    fn classes(&self) -> Vec<&str>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ClassCentroid {
    posture_id: String,
    count: usize,
    centroid: FeatureVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ModelFile {
    schema_version: u32,
    feature_len: usize,
    classes: Vec<ClassCentroid>,
}

/// Per-class mean feature vectors; prediction picks the nearest centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidModel {
    classes: BTreeMap<String, (FeatureVector, usize)>,
}

impl sealed::Sealed for CentroidModel {}

impl CentroidModel {
    pub fn centroid(&self, posture_id: &str) -> Option<&[f64]> {
        self.classes.get(posture_id).map(|(c, _)| c.as_slice())
    }

    pub fn training_count(&self, posture_id: &str) -> Option<usize> {
        self.classes.get(posture_id).map(|(_, n)| *n)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Nearest centroid to a feature vector. On equal distance the
    /// lexicographically smallest posture id wins.
    pub fn predict_features(&self, features: &[f64]) -> Prediction {
        let mut best: Option<(&str, f64)> = None;
        for (id, (centroid, _)) in &self.classes {
            let d2: f64 = centroid.iter().zip(features).map(|(a, b)| (a - b) * (a - b)).sum();
            if best.is_none_or(|(_, b)| d2 < b) {
                best = Some((id, d2));
            }
        }
        let (id, d2) = best.expect("model has at least one class");
        Prediction {
            posture_id: id.to_string(),
            distance: d2.sqrt(),
        }
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            schema_version: MODEL_SCHEMA_VERSION,
            feature_len: FEATURE_LEN,
            classes: self
                .classes
                .iter()
                .map(|(id, (c, n))| ClassCentroid {
                    posture_id: id.clone(),
                    count: *n,
                    centroid: c.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<CentroidModel, RecognizerError> {
        let file: ModelFile = serde_json::from_str(text)
            .map_err(|e| RecognizerError::Model(format!("line {}: {e}", e.line())))?;
        if file.schema_version != MODEL_SCHEMA_VERSION {
            return Err(RecognizerError::Model(format!(
                "unsupported schema_version {}",
                file.schema_version
            )));
        }
        if file.feature_len != FEATURE_LEN {
            return Err(RecognizerError::Model(format!(
                "feature_len {} (expected {FEATURE_LEN})",
                file.feature_len
            )));
        }
        if file.classes.is_empty() {
            return Err(RecognizerError::Model("model has no classes".into()));
        }
        let mut classes = BTreeMap::new();
        for c in file.classes {
            if c.centroid.len() != FEATURE_LEN || c.centroid.iter().any(|v| !v.is_finite()) {
                return Err(RecognizerError::Model(format!(
                    "class {}: centroid must hold {FEATURE_LEN} finite values",
                    c.posture_id
                )));
            }
            if c.count == 0 {
                return Err(RecognizerError::Model(format!("class {}: zero training count", c.posture_id)));
            }
            if classes.insert(c.posture_id.clone(), (c.centroid, c.count)).is_some() {
                return Err(RecognizerError::Model(format!("duplicate class {}", c.posture_id)));
            }
        }
        Ok(CentroidModel { classes })
    }

    pub fn save(&self, path: &Path) -> Result<(), RecognizerError> {
        std::fs::write(path, self.to_json()).map_err(|source| RecognizerError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<CentroidModel, RecognizerError> {
        let text = std::fs::read_to_string(path).map_err(|source| RecognizerError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        CentroidModel::from_json(&text)
    }
}

impl PostureClassifier for CentroidModel {
    fn predict(&self, s: &SkeletonFrame) -> Result<Prediction, RecognizerError> {
        Ok(self.predict_features(&extract_features(s)?))
    }

    fn classes(&self) -> Vec<&str> {
        self.classes.keys().map(String::as_str).collect()
    }
}

/// Centroid per posture id: the mean feature vector of its examples.
pub fn train(labeled: &[(SkeletonFrame, String)]) -> Result<CentroidModel, RecognizerError> {
    if labeled.is_empty() {
        return Err(RecognizerError::Training("no training examples".into()));
    }
    let mut sums: BTreeMap<String, (Vec<f64>, usize)> = BTreeMap::new();
    for (s, id) in labeled {
        let f = extract_features(s)?;
        let entry = sums.entry(id.clone()).or_insert_with(|| (vec![0.0; FEATURE_LEN], 0));
        for (acc, v) in entry.0.iter_mut().zip(&f) {
            *acc += v;
        }
        entry.1 += 1;
    }
    let classes = sums
        .into_iter()
        .map(|(id, (sum, n))| {
            let centroid = sum.into_iter().map(|v| v / n as f64).collect();
            (id, (centroid, n))
        })
        .collect();
    Ok(CentroidModel { classes })
}

/// Like [`train`], but fails when any of `classes` has no example.
pub fn train_for_classes(
    labeled: &[(SkeletonFrame, String)],
    classes: &[&str],
) -> Result<CentroidModel, RecognizerError> {
    let missing: Vec<&str> = classes
        .iter()
        .copied()
        .filter(|c| !labeled.iter().any(|(_, id)| id == c))
        .collect();
    if !missing.is_empty() {
        return Err(RecognizerError::Training(format!(
            "no examples for class(es) {}",
            missing.join(", ")
        )));
    }
    train(labeled)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// actual posture id → predicted posture id → count
    pub confusion: BTreeMap<String, BTreeMap<String, usize>>,
}

/// Accuracy and confusion matrix over labelled test frames.
pub fn evaluate<C: PostureClassifier>(
    model: &C,
    test: &[(SkeletonFrame, String)],
) -> Result<Evaluation, RecognizerError> {
    let mut confusion: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut correct = 0;
    for (s, actual) in test {
        let p = model.predict(s)?;
        if p.posture_id == *actual {
            correct += 1;
        }
        *confusion
            .entry(actual.clone())
            .or_default()
            .entry(p.posture_id)
            .or_default() += 1;
    }
    let total = test.len();
    Ok(Evaluation {
        total,
        correct,
        accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
        confusion,
    })
}

/// Pairs each skeleton frame inside an annotated key-posture range with
/// that range's posture name. Frames outside every range are skipped.
pub fn label_frames(skeletons: &[SkeletonFrame], annotation: &[AnnotationRecord]) -> Vec<(SkeletonFrame, String)> {
    skeletons
        .iter()
        .filter_map(|s| {
            annotation
                .iter()
                .find(|r| (r.start_frame..=r.end_frame).contains(&s.frame))
                .map(|r| (s.clone(), r.posture_name.clone()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FramePrediction {
    pub frame: u64,
    pub prediction: Prediction,
}

/// Groups consecutive frames predicted as the same posture into key-posture
/// records. Frames further than `max_distance` from their centroid count as
/// motion and break runs; runs shorter than `min_run` frames are dropped.
/// Records are numbered as beats 0, 1, 2, … in order.
pub fn segment_key_postures(
    predictions: &[FramePrediction],
    min_run: usize,
    max_distance: Option<f64>,
) -> Vec<AnnotationRecord> {
    let mut out: Vec<AnnotationRecord> = Vec::new();
    let mut run: Option<(String, u64, u64, usize)> = None;
    let flush = |run: Option<(String, u64, u64, usize)>, out: &mut Vec<AnnotationRecord>| {
        if let Some((id, start, end, len)) = run {
            if len >= min_run.max(1) {
                out.push(AnnotationRecord {
                    posture_name: id,
                    start_frame: start,
                    end_frame: end,
                    beat_number: out.len() as u32,
                    bols: String::new(),
                });
            }
        }
    };
    for p in predictions {
        let still = max_distance.is_none_or(|m| p.prediction.distance <= m);
        let extends = match (&run, still) {
            (Some((id, _, end, _)), true) => *id == p.prediction.posture_id && p.frame == end + 1,
            _ => false,
        };
        if extends {
            if let Some(r) = run.as_mut() {
                r.2 = p.frame;
                r.3 += 1;
            }
        } else {
            flush(run.take(), &mut out);
            if still {
                run = Some((p.prediction.posture_id.clone(), p.frame, p.frame, 1));
            }
        }
    }
    flush(run, &mut out);
    out
}
