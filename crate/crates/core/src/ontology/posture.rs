use serde::{Deserialize, Serialize};

use super::vocab::{mirror_head, mirror_leg_position};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LegSupport {
    Samapadam,
    Araimandi,
    Muzhumandi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symmetry {
    Symmetric,
    Asymmetric,
    MirrorOfAsymmetric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegsPosition {
    pub position: String,
    pub left: String,
    pub right: String,
}

/// Left and right formations of a paired body part (arms, hands).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormationPair {
    pub left: String,
    pub right: String,
}

impl FormationPair {
    pub fn swapped(&self) -> FormationPair {
        FormationPair {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }
}

/// Composition of a named key posture from limb formations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyPostureSpec {
    pub posture_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_id: Option<String>,
    pub legs: LegsPosition,
    pub arms: FormationPair,
    pub head: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hands: Option<FormationPair>,
    pub leg_support: LegSupport,
    pub spinal_bend: bool,
    pub symmetry: Symmetry,
    /// For [`Symmetry::MirrorOfAsymmetric`], the posture this one mirrors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirror_of: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

const MIRROR_ID_SUFFIX: &str = "[M]";

/// Mirror image of an asymmetric posture: left/right formations swapped for
/// legs, arms and hands, lateral head formations flipped, symmetry toggled.
///
/// A symmetric posture is its own mirror and is returned unchanged.
/// The result of mirroring a base posture is identified as `<id>[M]`; mirroring
/// a mirror returns the identity of its base, so the operation is an involution.
pub fn mirror_posture(p: &KeyPostureSpec) -> KeyPostureSpec {
    let mut out = p.clone();
    let (symmetry, posture_id, mirror_of) = match p.symmetry {
        Symmetry::Symmetric => {
            log::warn!("posture {} is symmetric; its mirror is itself", p.posture_id);
            return out;
        }
        Symmetry::Asymmetric => (
            Symmetry::MirrorOfAsymmetric,
            format!("{}{MIRROR_ID_SUFFIX}", p.posture_id),
            Some(p.posture_id.clone()),
        ),
        Symmetry::MirrorOfAsymmetric => {
            let base = p.mirror_of.clone().unwrap_or_else(|| {
                p.posture_id
                    .strip_suffix(MIRROR_ID_SUFFIX)
                    .unwrap_or(&p.posture_id)
                    .to_string()
            });
            (Symmetry::Asymmetric, base, None)
        }
    };
    out.symmetry = symmetry;
    out.posture_id = posture_id;
    out.mirror_of = mirror_of;
    out.class_id = None;
    out.legs = LegsPosition {
        position: mirror_leg_position(&p.legs.position),
        left: p.legs.right.clone(),
        right: p.legs.left.clone(),
    };
    out.arms = p.arms.swapped();
    out.hands = p.hands.as_ref().map(FormationPair::swapped);
    out.head = mirror_head(&p.head);
    out
}

impl KeyPostureSpec {
    /// True when both postures have the same limb formations, support and bend.
    pub fn same_formations(&self, other: &KeyPostureSpec) -> bool {
        self.legs == other.legs
            && self.arms == other.arms
            && self.head == other.head
            && self.hands == other.hands
            && self.leg_support == other.leg_support
            && self.spinal_bend == other.spinal_bend
    }
}
