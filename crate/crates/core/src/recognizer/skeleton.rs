use serde::{Deserialize, Serialize};

use super::RecognizerError;

pub const JOINT_COUNT: usize = 20;
pub const FEATURE_LEN: usize = JOINT_COUNT * 3;

/// Skeleton joints in the order of the 20-joint sensor skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Joint {
    HipCenter,
    Spine,
    ShoulderCenter,
    Head,
    ShoulderLeft,
    ElbowLeft,
    WristLeft,
    HandLeft,
    ShoulderRight,
    ElbowRight,
    WristRight,
    HandRight,
    HipLeft,
    KneeLeft,
    AnkleLeft,
    FootLeft,
    HipRight,
    KneeRight,
    AnkleRight,
    FootRight,
}

impl Joint {
    pub const ALL: [Joint; JOINT_COUNT] = [
        Joint::HipCenter,
        Joint::Spine,
        Joint::ShoulderCenter,
        Joint::Head,
        Joint::ShoulderLeft,
        Joint::ElbowLeft,
        Joint::WristLeft,
        Joint::HandLeft,
        Joint::ShoulderRight,
        Joint::ElbowRight,
        Joint::WristRight,
        Joint::HandRight,
        Joint::HipLeft,
        Joint::KneeLeft,
        Joint::AnkleLeft,
        Joint::FootLeft,
        Joint::HipRight,
        Joint::KneeRight,
        Joint::AnkleRight,
        Joint::FootRight,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// One skeleton sample: 20 joint positions (x, y, z) in metres, y up.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonFrame {
    pub frame: u64,
    pub joints: [[f64; 3]; JOINT_COUNT],
}

impl SkeletonFrame {
    pub fn joint(&self, j: Joint) -> [f64; 3] {
        self.joints[j.index()]
    }

    pub fn validate(&self) -> Result<(), RecognizerError> {
        for (i, p) in self.joints.iter().enumerate() {
            if p.iter().any(|c| !c.is_finite()) {
                return Err(RecognizerError::InvalidSkeleton {
                    frame: self.frame,
                    reason: format!("joint {:?} has a non-finite coordinate", Joint::ALL[i]),
                });
            }
        }
        Ok(())
    }
}

/// Normalized joint coordinates, flattened joint by joint as x, y, z.
pub type FeatureVector = Vec<f64>;

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

const EPS: f64 = 1e-9;

/// Translates the hip centre to the origin, scales the hip-to-shoulder-centre
/// distance to 1 and rotates about the vertical axis so the left-to-right
/// shoulder vector has no depth component and points along +x.
pub fn extract_features(s: &SkeletonFrame) -> Result<FeatureVector, RecognizerError> {
    s.validate()?;
    let origin = s.joint(Joint::HipCenter);
    let torso = norm(sub(s.joint(Joint::ShoulderCenter), origin));
    if torso < EPS {
        return Err(RecognizerError::Degenerate {
            frame: s.frame,
            reason: "hip centre and shoulder centre coincide".into(),
        });
    }
    let shoulders = sub(s.joint(Joint::ShoulderRight), s.joint(Joint::ShoulderLeft));
    let horizontal = (shoulders[0] * shoulders[0] + shoulders[2] * shoulders[2]).sqrt();
    if horizontal < EPS * torso {
        return Err(RecognizerError::Degenerate {
            frame: s.frame,
            reason: "shoulder line has no horizontal extent".into(),
        });
    }
    let (c, sn) = (shoulders[0] / horizontal, shoulders[2] / horizontal);
    let mut out = Vec::with_capacity(FEATURE_LEN);
    for p in &s.joints {
        let [x, y, z] = sub(*p, origin);
        out.push((c * x + sn * z) / torso);
        out.push(y / torso);
        out.push((-sn * x + c * z) / torso);
    }
    Ok(out)
}
