use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{expand_arm_mirror, expand_leg_mirror, ArmLaban, LabanError, LabanFrame, LabanLimb, LabanScore, LegLaban, LegSide};

const SCHEMA_VERSION: u32 = 1;

/// Right-leg codes of a record whose legs are not mirror images.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RightLegRecord {
    pub support_direction: u8,
    pub support_level: u8,
    pub leg_direction: u8,
    pub leg_level: u8,
    pub leg_crossing: u32,
    pub hip_support: u8,
    pub knee_folding: u8,
    pub touch: u8,
}

/// Right-arm codes of a record whose arms are not mirror images.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RightArmRecord {
    pub arm_direction: u8,
    pub arm_level: u8,
    pub arm_crossing: u32,
    pub elbow_folding: u8,
    pub body_inclusion: u8,
}

/// One posture's Laban codes. The unprefixed leg and arm fields describe the
/// left side; with `leg_mirror`/`arm_mirror` = 1 the right side is its
/// lateral mirror, otherwise `right_leg`/`right_arm` give it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingRecord {
    pub posture_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub support_direction: u8,
    pub support_level: u8,
    pub leg_direction: u8,
    pub leg_level: u8,
    pub leg_crossing: u32,
    pub leg_mirror: u8,
    pub hip_support: u8,
    pub knee_folding: u8,
    pub touch: u8,
    pub arm_direction: u8,
    pub arm_level: u8,
    pub arm_crossing: u32,
    pub elbow_folding: u8,
    pub body_inclusion: u8,
    pub arm_mirror: u8,
    pub head_direction: u8,
    pub head_level: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_leg: Option<RightLegRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_arm: Option<RightArmRecord>,
}

impl RightLegRecord {
    fn side(&self) -> LegSide {
        LegSide {
            support: LabanLimb::new(self.support_direction, self.support_level),
            leg: LegLaban {
                limb: LabanLimb::new(self.leg_direction, self.leg_level),
                crossing: self.leg_crossing,
                mirror: false,
                hip_support: self.hip_support == 1,
                knee_folding: self.knee_folding,
                touch: self.touch,
            },
        }
    }
}

impl RightArmRecord {
    fn arm(&self) -> ArmLaban {
        ArmLaban {
            limb: LabanLimb::new(self.arm_direction, self.arm_level),
            crossing: self.arm_crossing,
            elbow_folding: self.elbow_folding,
            body_inclusion: self.body_inclusion == 1,
            mirror: false,
        }
    }
}

impl MappingRecord {
    fn left_leg_side(&self) -> LegSide {
        LegSide {
            support: LabanLimb::new(self.support_direction, self.support_level),
            leg: LegLaban {
                limb: LabanLimb::new(self.leg_direction, self.leg_level),
                crossing: self.leg_crossing,
                mirror: self.leg_mirror == 1,
                hip_support: self.hip_support == 1,
                knee_folding: self.knee_folding,
                touch: self.touch,
            },
        }
    }

    fn left_arm(&self) -> ArmLaban {
        ArmLaban {
            limb: LabanLimb::new(self.arm_direction, self.arm_level),
            crossing: self.arm_crossing,
            elbow_folding: self.elbow_folding,
            body_inclusion: self.body_inclusion == 1,
            mirror: self.arm_mirror == 1,
        }
    }

    /// The record expanded to a full two-sided frame at measure 0.
    pub fn to_frame(&self) -> LabanFrame {
        let (left, right) = expand_leg_mirror(self.left_leg_side(), self.right_leg.map(|r| r.side()));
        let (left_arm, right_arm) = expand_arm_mirror(self.left_arm(), self.right_arm.map(|r| r.arm()));
        LabanFrame {
            measure: 0,
            left_support: left.support,
            right_support: right.support,
            left_leg: left.leg,
            right_leg: right.leg,
            left_arm,
            right_arm,
            head: LabanLimb::new(self.head_direction, self.head_level),
            posture_id: Some(self.posture_id.clone()),
        }
    }

    fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        let flags = [
            ("leg_mirror", self.leg_mirror),
            ("hip_support", self.hip_support),
            ("body_inclusion", self.body_inclusion),
            ("arm_mirror", self.arm_mirror),
        ]
        .into_iter()
        .chain(self.right_leg.map(|r| ("right_leg.hip_support", r.hip_support)))
        .chain(self.right_arm.map(|r| ("right_arm.body_inclusion", r.body_inclusion)));
        for (name, v) in flags {
            if v > 1 {
                p.push(format!("{name} must be 0 or 1, found {v}"));
            }
        }
        match (self.leg_mirror, &self.right_leg) {
            (1, Some(_)) => p.push("leg_mirror is 1 but right_leg is given".into()),
            (0, None) => p.push("leg_mirror is 0 but right_leg is missing".into()),
            (0, Some(r)) if r.side() == self.left_leg_side().mirrored().with_mirror(false) => {
                p.push("right_leg equals the mirror of the left leg; use leg_mirror = 1".into())
            }
            _ => {}
        }
        match (self.arm_mirror, &self.right_arm) {
            (1, Some(_)) => p.push("arm_mirror is 1 but right_arm is given".into()),
            (0, None) => p.push("arm_mirror is 0 but right_arm is missing".into()),
            (0, Some(r)) if r.arm() == ArmLaban { mirror: false, ..self.left_arm().mirrored() } => {
                p.push("right_arm equals the mirror of the left arm; use arm_mirror = 1".into())
            }
            _ => {}
        }
        p.extend(self.to_frame().problems());
        p
    }
}

impl LegSide {
    fn with_mirror(mut self, mirror: bool) -> LegSide {
        self.leg.mirror = mirror;
        self
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MappingFile {
    schema_version: u32,
    name: String,
    #[serde(default)]
    aliases: BTreeMap<String, String>,
    records: Vec<MappingRecord>,
}

/// Posture id → Laban codes, immutable after loading.
#[derive(Debug, Clone)]
pub struct MappingDb {
    name: String,
    records: BTreeMap<String, MappingRecord>,
    aliases: HashMap<String, String>,
}

impl MappingDb {
    /// The Natta key-posture mapping bundled with this crate.
    pub fn shipped() -> Result<MappingDb, LabanError> {
        MappingDb::from_json(include_str!("../../data/mapping/natta_laban.json"))
    }

    pub fn load(path: &Path) -> Result<MappingDb, LabanError> {
        let text = std::fs::read_to_string(path).map_err(|source| LabanError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        MappingDb::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<MappingDb, LabanError> {
        let file: MappingFile = serde_json::from_str(text).map_err(|e| LabanError::Format {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut issues = Vec::new();
        if file.schema_version != SCHEMA_VERSION {
            issues.push(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            ));
        }
        let mut records = BTreeMap::new();
        for r in file.records {
            issues.extend(r.problems().into_iter().map(|p| format!("{}: {p}", r.posture_id)));
            if let Some(dup) = records.insert(r.posture_id.clone(), r) {
                issues.push(format!("duplicate record {}", dup.posture_id));
            }
        }
        for (alias, target) in &file.aliases {
            if !records.contains_key(target) {
                issues.push(format!("alias {alias} refers to unknown posture {target}"));
            }
            if records.contains_key(alias) {
                issues.push(format!("alias {alias} shadows a record"));
            }
        }
        if !issues.is_empty() {
            return Err(LabanError::Validation(issues));
        }
        Ok(MappingDb {
            name: file.name,
            records,
            aliases: file.aliases.into_iter().collect(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &MappingRecord> {
        self.records.values()
    }

    pub fn record(&self, posture_id: &str) -> Option<&MappingRecord> {
        let key = self.aliases.get(posture_id).map(String::as_str).unwrap_or(posture_id);
        self.records.get(key)
    }
}

/// Laban frame of a posture, both sides expanded, at measure 0.
pub fn encode_posture(posture_id: &str, db: &MappingDb) -> Result<LabanFrame, LabanError> {
    db.record(posture_id)
        .map(MappingRecord::to_frame)
        .ok_or_else(|| LabanError::UnknownPosture {
            id: posture_id.to_string(),
            position: None,
        })
}

/// Frames for a posture sequence with measures 0, 1, 2, … in input order.
pub fn build_score<S: AsRef<str>>(title: &str, posture_sequence: &[S], db: &MappingDb) -> Result<LabanScore, LabanError> {
    let frames = posture_sequence
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let mut frame = db.record(id.as_ref()).map(MappingRecord::to_frame).ok_or_else(|| {
                LabanError::UnknownPosture {
                    id: id.as_ref().to_string(),
                    position: Some(i),
                }
            })?;
            frame.measure = i as u32;
            Ok(frame)
        })
        .collect::<Result<Vec<_>, LabanError>>()?;
    Ok(LabanScore {
        title: title.to_string(),
        frames,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_db_covers_natta_classes() {
        let db = MappingDb::shipped().unwrap();
        assert_eq!(db.len(), 23);
        assert!(db.record("C02").is_some());
        assert_eq!(db.record("C01").unwrap().posture_id, "Natta1P1");
    }

    #[test]
    fn unknown_posture() {
        let db = MappingDb::shipped().unwrap();
        assert!(matches!(encode_posture("XYZ", &db), Err(LabanError::UnknownPosture { .. })));
        let err = build_score("t", &["Natta1P1", "XYZ"], &db).unwrap_err();
        assert!(matches!(err, LabanError::UnknownPosture { position: Some(1), .. }));
    }

    #[test]
    fn asymmetric_legs_differ() {
        let db = MappingDb::shipped().unwrap();
        let f = encode_posture("Natta1P2", &db).unwrap();
        assert_ne!(f.left_leg_side().mirrored().with_mirror(false), f.right_leg_side());
        assert!(!f.left_leg.mirror);
    }

    #[test]
    fn score_measures_follow_input() {
        let db = MappingDb::shipped().unwrap();
        let s = build_score("natta_1", &["Natta1P1", "Natta1P2", "Natta1P1"], &db).unwrap();
        assert_eq!(s.frames.iter().map(|f| f.measure).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(LabanFrame { measure: 0, ..s.frames[2].clone() }, s.frames[0]);
        assert!(build_score::<&str>("e", &[], &db).unwrap().frames.is_empty());
    }

    #[test]
    fn redundant_right_side_is_rejected() {
        let text = include_str!("../../data/mapping/natta_laban.json");
        let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
        let rec = &mut v["records"][0];
        rec["leg_mirror"] = 0.into();
        rec["right_leg"] = serde_json::json!({
            "support_direction": 1, "support_level": 3, "leg_direction": 0, "leg_level": 0,
            "leg_crossing": 0, "hip_support": 0, "knee_folding": 3, "touch": 3
        });
        let err = MappingDb::from_json(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("use leg_mirror = 1"), "{err}");
    }

    #[test]
    fn out_of_range_code_is_rejected() {
        let text = include_str!("../../data/mapping/natta_laban.json");
        let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
        v["records"][0]["touch"] = 11.into();
        assert!(matches!(MappingDb::from_json(&v.to_string()), Err(LabanError::Validation(_))));
        assert!(matches!(MappingDb::from_json("{"), Err(LabanError::Format { .. })));
    }
}
