//! Synthetic skeleton generator shared by the recognizer tests and the
//! acceptance suite.
#![allow(dead_code)]

use adavu_core::recognizer::{Joint, SkeletonFrame, JOINT_COUNT};
use rand::Rng;
use rand_distr::{Distribution, Normal};

pub const CLASS_COUNT: usize = 23;

/// Hip centre to shoulder centre, metres.
pub const TORSO: f64 = 0.5;

const UPPER_ARM: f64 = 0.3;
const FOREARM: f64 = 0.25;
const HAND: f64 = 0.08;

/// (upper arm, forearm) unit directions for the left arm; x is mirrored for the right.
const ARM_POSES: [([f64; 3], [f64; 3]); 4] = [
    ([0.0, -1.0, 0.0], [0.0, -1.0, 0.0]),
    ([-1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]),
    ([-1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
    ([0.0, 0.0, 1.0], [0.0, 0.0, 1.0]),
];

/// (knee, ankle, foot) of the left leg relative to the left hip; x mirrored for the right.
const STANCES: [([f64; 3], [f64; 3], [f64; 3]); 2] = [
    ([0.0, -0.45, 0.0], [0.0, -0.87, 0.0], [0.0, -0.93, 0.1]),
    ([-0.3, -0.3, 0.05], [-0.3, -0.72, 0.0], [-0.38, -0.78, 0.05]),
];

fn add(a: [f64; 3], b: [f64; 3], k: f64) -> [f64; 3] {
    [a[0] + k * b[0], a[1] + k * b[1], a[2] + k * b[2]]
}

fn flip(v: [f64; 3]) -> [f64; 3] {
    [-v[0], v[1], v[2]]
}

pub fn class_id(k: usize) -> String {
    format!("C{:02}", k + 1)
}

/// Noise-free template of class `k` (0-based): left arm pose k % 4,
/// right arm pose (k / 4) % 3, stance k / 12.
pub fn template(k: usize) -> SkeletonFrame {
    assert!(k < CLASS_COUNT);
    let mut j = [[0.0; 3]; JOINT_COUNT];
    let mut set = |joint: Joint, p: [f64; 3]| j[joint.index()] = p;
    let hip = [0.0, 1.0, 0.0];
    set(Joint::HipCenter, hip);
    set(Joint::Spine, [0.0, 1.0 + TORSO / 2.0, 0.0]);
    set(Joint::ShoulderCenter, [0.0, 1.0 + TORSO, 0.0]);
    set(Joint::Head, [0.0, 1.0 + TORSO + 0.2, 0.0]);

    let arms = [
        (Joint::ShoulderLeft, Joint::ElbowLeft, Joint::WristLeft, Joint::HandLeft, ARM_POSES[k % 4], false),
        (Joint::ShoulderRight, Joint::ElbowRight, Joint::WristRight, Joint::HandRight, ARM_POSES[(k / 4) % 3], true),
    ];
    for (sh, el, wr, ha, (upper, fore), right) in arms {
        let (upper, fore) = if right { (flip(upper), flip(fore)) } else { (upper, fore) };
        let s = [if right { 0.2 } else { -0.2 }, 1.0 + TORSO - 0.05, 0.0];
        let e = add(s, upper, UPPER_ARM);
        let w = add(e, fore, FOREARM);
        set(sh, s);
        set(el, e);
        set(wr, w);
        set(ha, add(w, fore, HAND));
    }

    let (knee, ankle, foot) = STANCES[k / 12];
    let legs = [
        (Joint::HipLeft, Joint::KneeLeft, Joint::AnkleLeft, Joint::FootLeft, false),
        (Joint::HipRight, Joint::KneeRight, Joint::AnkleRight, Joint::FootRight, true),
    ];
    for (hj, kj, aj, fj, right) in legs {
        let m = |v: [f64; 3]| if right { flip(v) } else { v };
        let h = [if right { 0.1 } else { -0.1 }, 0.95, 0.0];
        set(hj, h);
        set(kj, add(h, m(knee), 1.0));
        set(aj, add(h, m(ankle), 1.0));
        set(fj, add(h, m(foot), 1.0));
    }
    SkeletonFrame { frame: k as u64, joints: j }
}

pub fn templates() -> Vec<(SkeletonFrame, String)> {
    (0..CLASS_COUNT).map(|k| (template(k), class_id(k))).collect()
}

/// Adds independent Gaussian noise of standard deviation `sigma` metres to every coordinate.
pub fn perturb<R: Rng>(s: &SkeletonFrame, sigma: f64, rng: &mut R) -> SkeletonFrame {
    let normal = Normal::new(0.0, sigma).expect("valid sigma");
    let mut out = s.clone();
    for p in out.joints.iter_mut() {
        for v in p.iter_mut() {
            *v += normal.sample(rng);
        }
    }
    out
}

/// Rotation about the vertical axis by `yaw` radians, then uniform scale, then translation.
pub fn transform(s: &SkeletonFrame, translate: [f64; 3], scale: f64, yaw: f64) -> SkeletonFrame {
    let (c, sn) = (yaw.cos(), yaw.sin());
    let mut out = s.clone();
    for p in out.joints.iter_mut() {
        let [x, y, z] = *p;
        let (rx, rz) = (c * x + sn * z, -sn * x + c * z);
        *p = [rx * scale + translate[0], y * scale + translate[1], rz * scale + translate[2]];
    }
    out
}
