//! Numeric Laban descriptors for key postures.
//!
//! Direction codes: 0 none (held in place under the body), 1 Place, 2 Left
//! Side, 3 Right Side, 4 Left Forward, 5 Right Forward, 6 Left Backward,
//! 7 Right Backward, 8 Left Forward Diagonal, 9 Right Forward Diagonal,
//! 10 Left Backward Diagonal, 11 Right Backward Diagonal.
//! Level codes: 0 none, 1 High, 2 Middle, 3 Low.
//! Folding: 0 no fold, 1..=5 fold degree, 6 full fold.
//! Touch: 0 no touch, 1 full heel, 2 half heel, 3 whole foot, 4 one-eighth
//! ball, 5 quarter ball, 6 half ball, 7 full ball, 8 pad of toe, 9 full toe,
//! 10 nail of toe.

mod mapping;

pub use mapping::{build_score, encode_posture, MappingDb, MappingRecord, RightArmRecord, RightLegRecord};

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

pub const MAX_DIRECTION: u8 = 11;
pub const MAX_LEVEL: u8 = 3;
pub const MAX_FOLDING: u8 = 6;
pub const MAX_TOUCH: u8 = 10;

pub const DIRECTION_NAMES: [&str; 12] = [
    "none",
    "place",
    "left side",
    "right side",
    "left forward",
    "right forward",
    "left backward",
    "right backward",
    "left forward diagonal",
    "right forward diagonal",
    "left backward diagonal",
    "right backward diagonal",
];

pub const LEVEL_NAMES: [&str; 4] = ["none", "high", "middle", "low"];

#[derive(Debug, thiserror::Error)]
pub enum LabanError {
    #[error("{0}")]
    Range(String),
    #[error("unknown posture '{id}'{}", position.map(|p| format!(" at sequence position {p}")).unwrap_or_default())]
    UnknownPosture { id: String, position: Option<usize> },
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("mapping database {line}:{column}: {message}")]
    Format { line: usize, column: usize, message: String },
    #[error("mapping database validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
}

/// Left/right mirror of a direction code. Place and none map to themselves.
pub fn lateral_swap(direction: u8) -> u8 {
    match direction {
        2..=11 if direction.is_multiple_of(2) => direction + 1,
        3..=11 => direction - 1,
        other => other,
    }
}

/// True for codes that point to the left of the body (2, 4, 6, 8, 10).
pub fn is_left_direction(direction: u8) -> bool {
    (2..=MAX_DIRECTION).contains(&direction) && direction.is_multiple_of(2)
}

/// True for codes that point to the right of the body (3, 5, 7, 9, 11).
pub fn is_right_direction(direction: u8) -> bool {
    (3..=MAX_DIRECTION).contains(&direction) && direction % 2 == 1
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabanLimb {
    pub direction: u8,
    pub level: u8,
}

impl LabanLimb {
    pub const NONE: LabanLimb = LabanLimb { direction: 0, level: 0 };

    pub fn new(direction: u8, level: u8) -> LabanLimb {
        LabanLimb { direction, level }
    }

    pub fn is_set(&self) -> bool {
        self.direction > 0
    }

    pub fn mirrored(&self) -> LabanLimb {
        LabanLimb {
            direction: lateral_swap(self.direction),
            level: self.level,
        }
    }

    fn check(&self, what: &str, problems: &mut Vec<String>) {
        if self.direction > MAX_DIRECTION {
            problems.push(format!("{what} direction {} exceeds {MAX_DIRECTION}", self.direction));
        }
        if self.level > MAX_LEVEL {
            problems.push(format!("{what} level {} exceeds {MAX_LEVEL}", self.level));
        }
        if self.direction > 0 && self.level == 0 {
            problems.push(format!("{what} has direction {} but no level", self.direction));
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LegLaban {
    pub limb: LabanLimb,
    pub crossing: u32,
    pub mirror: bool,
    pub hip_support: bool,
    pub knee_folding: u8,
    pub touch: u8,
}

impl LegLaban {
    pub fn mirrored(&self) -> LegLaban {
        LegLaban {
            limb: self.limb.mirrored(),
            ..*self
        }
    }

    fn check(&self, what: &str, problems: &mut Vec<String>) {
        self.limb.check(what, problems);
        if self.knee_folding > MAX_FOLDING {
            problems.push(format!("{what} knee folding {} exceeds {MAX_FOLDING}", self.knee_folding));
        }
        if self.touch > MAX_TOUCH {
            problems.push(format!("{what} touch {} exceeds {MAX_TOUCH}", self.touch));
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArmLaban {
    pub limb: LabanLimb,
    pub crossing: u32,
    pub elbow_folding: u8,
    pub body_inclusion: bool,
    pub mirror: bool,
}

impl ArmLaban {
    pub fn mirrored(&self) -> ArmLaban {
        ArmLaban {
            limb: self.limb.mirrored(),
            ..*self
        }
    }

    fn check(&self, what: &str, problems: &mut Vec<String>) {
        self.limb.check(what, problems);
        if self.elbow_folding > MAX_FOLDING {
            problems.push(format!("{what} elbow folding {} exceeds {MAX_FOLDING}", self.elbow_folding));
        }
    }
}

/// One side of the lower body: the support column and the leg gesture.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct LegSide {
    pub support: LabanLimb,
    pub leg: LegLaban,
}

impl LegSide {
    pub fn mirrored(&self) -> LegSide {
        LegSide {
            support: self.support.mirrored(),
            leg: self.leg.mirrored(),
        }
    }
}

/// Expands a left-side leg record: with the mirror flag set the right side
/// is the lateral mirror of the left, otherwise `explicit_right` is used.
pub fn expand_leg_mirror(left: LegSide, explicit_right: Option<LegSide>) -> (LegSide, LegSide) {
    let right = if left.leg.mirror {
        left.mirrored()
    } else {
        let mut r = explicit_right.unwrap_or_default();
        r.leg.mirror = false;
        r
    };
    (left, right)
}

/// Arm counterpart of [`expand_leg_mirror`].
pub fn expand_arm_mirror(left: ArmLaban, explicit_right: Option<ArmLaban>) -> (ArmLaban, ArmLaban) {
    let right = if left.mirror {
        left.mirrored()
    } else {
        let mut r = explicit_right.unwrap_or_default();
        r.mirror = false;
        r
    };
    (left, right)
}

/// Laban descriptors of one posture at one measure of the staff.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabanFrame {
    pub measure: u32,
    pub left_support: LabanLimb,
    pub right_support: LabanLimb,
    pub left_leg: LegLaban,
    pub right_leg: LegLaban,
    pub left_arm: ArmLaban,
    pub right_arm: ArmLaban,
    pub head: LabanLimb,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub posture_id: Option<String>,
}

impl LabanFrame {
    pub fn left_leg_side(&self) -> LegSide {
        LegSide {
            support: self.left_support,
            leg: self.left_leg,
        }
    }

    pub fn right_leg_side(&self) -> LegSide {
        LegSide {
            support: self.right_support,
            leg: self.right_leg,
        }
    }

    /// Whether the right leg side equals the lateral mirror of the left.
    pub fn legs_mirror_symmetric(&self) -> bool {
        let l = self.left_leg_side().mirrored();
        let r = self.right_leg_side();
        l.support == r.support
            && l.leg.limb == r.leg.limb
            && l.leg.crossing == r.leg.crossing
            && l.leg.hip_support == r.leg.hip_support
            && l.leg.knee_folding == r.leg.knee_folding
            && l.leg.touch == r.leg.touch
    }

    /// Whether the right arm equals the lateral mirror of the left.
    pub fn arms_mirror_symmetric(&self) -> bool {
        let l = self.left_arm.mirrored();
        let r = self.right_arm;
        l.limb == r.limb
            && l.crossing == r.crossing
            && l.elbow_folding == r.elbow_folding
            && l.body_inclusion == r.body_inclusion
    }

    /// Sets the mirror flags from the actual left/right codes.
    pub fn with_inferred_mirror_flags(mut self) -> LabanFrame {
        let legs = self.legs_mirror_symmetric();
        let arms = self.arms_mirror_symmetric();
        self.left_leg.mirror = legs;
        self.right_leg.mirror = legs;
        self.left_arm.mirror = arms;
        self.right_arm.mirror = arms;
        self
    }

    /// The left/right mirror image of the frame.
    pub fn mirrored(&self) -> LabanFrame {
        let left = self.right_leg_side().mirrored();
        let right = self.left_leg_side().mirrored();
        LabanFrame {
            measure: self.measure,
            left_support: left.support,
            right_support: right.support,
            left_leg: left.leg,
            right_leg: right.leg,
            left_arm: self.right_arm.mirrored(),
            right_arm: self.left_arm.mirrored(),
            head: self.head.mirrored(),
            posture_id: self.posture_id.clone(),
        }
    }

    /// Range and consistency problems of the frame, empty when valid.
    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        self.left_support.check("left support", &mut p);
        self.right_support.check("right support", &mut p);
        self.left_leg.check("left leg", &mut p);
        self.right_leg.check("right leg", &mut p);
        self.left_arm.check("left arm", &mut p);
        self.right_arm.check("right arm", &mut p);
        self.head.check("head", &mut p);
        let supported = self.left_support.is_set()
            || self.right_support.is_set()
            || self.left_leg.hip_support
            || self.right_leg.hip_support;
        if !supported {
            p.push("no support: neither support column has a direction and no hip support".to_string());
        }
        p
    }

    pub fn validate(&self) -> Result<(), LabanError> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(LabanError::Range(format!("measure {}: {}", self.measure, p.join("; "))))
        }
    }
}

/// An ordered sequence of frames on one staff.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabanScore {
    pub title: String,
    pub frames: Vec<LabanFrame>,
}

impl LabanScore {
    /// Checks every frame and that measures increase strictly from 0.
    pub fn validate(&self) -> Result<(), LabanError> {
        let mut problems = Vec::new();
        for (i, f) in self.frames.iter().enumerate() {
            if i == 0 && f.measure != 0 {
                problems.push(format!("first measure is {}, expected 0", f.measure));
            }
            if i > 0 && f.measure <= self.frames[i - 1].measure {
                problems.push(format!(
                    "measure {} does not follow measure {}",
                    f.measure,
                    self.frames[i - 1].measure
                ));
            }
            problems.extend(f.problems().into_iter().map(|p| format!("measure {}: {p}", f.measure)));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(LabanError::Validation(problems))
        }
    }
}
