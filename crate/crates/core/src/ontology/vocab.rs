//! Named formations and positions of legs, arms, head and hands.

/// Leg formations. Symmetric positions reuse the position name as formation.
pub const LEG_FORMATIONS: &[&str] = &[
    "Aayata",
    "Agratala Sanchara",
    "Anchita",
    "Back Chankramanang",
    "Back Swastikam",
    "Bend On Knee",
    "Bisamasuchi",
    "Chankramanang",
    "Diagonal Anchita",
    "Forward / Side Low",
    "Front Anchita",
    "Front Swastikam",
    "Kunchita",
    "Kuttana",
    "Motita Mandal",
    "Muzmandi",
    "Parsasuchi",
    "Parswa Aayata",
    "Prerita",
    "Samapadam",
    "Side Chankramanang",
    "Side Middle / Low",
    "Slip With Left Knee",
    "Slip With Right Knee",
    "Support",
];

/// Asymmetric leg positions as (left formation, right formation, position).
/// Each has a mirror named `<position> [M]` with the formations swapped,
/// except Aaleeda whose mirror is listed under its own name.
pub const ASYMMETRIC_LEG_POSITIONS: &[(&str, &str, &str)] = &[
    ("Anchita", "Samapadam", "Ardha Prenkhanam"),
    ("Aayata", "Back Swastikam", "Back Swastikam"),
    ("Agratala Sanchara", "Samapadam", "Chalan Chari"),
    ("Aayata", "Diagonal Anchita", "Diagonal Prenkhanam"),
    ("Bend On Knee", "Support", "Ekapadam"),
    ("Aayata", "Front Anchita", "Front Prenkhanam"),
    ("Aayata", "Front Swastikam", "Front Swastikam"),
    ("Aayata", "Prerita", "Prerita"),
    ("Parsasuchi", "Bisamasuchi", "Garudamandalam"),
    ("Aayata", "Forward / Side Low", "Lolita Chari"),
    ("Aayata", "Anchita", "Prenkhanam"),
    ("Aayata", "Side Middle / Low", "Prenkhanam Above Floor"),
    ("Aayata", "Kunchita", "Aaleeda"),
    ("Kunchita", "Aayata", "Pratyaaleeda"),
];

/// Leg positions with their own mirror name instead of the `[M]` suffix.
pub const NAMED_MIRROR_PAIRS: &[(&str, &str)] = &[("Aaleeda", "Pratyaaleeda")];

/// Symmetric leg positions: both legs take the formation of the same name.
pub const SYMMETRIC_LEG_POSITIONS: &[&str] = &[
    "Aayata",
    "Anchita",
    "Back Chankramanang",
    "Chankramanang",
    "Kuttana",
    "Motita Mandal",
    "Muzmandi",
    "Parswa Aayata",
    "Samapadam",
    "Side Chankramanang",
    "Slip With Left Knee",
    "Slip With Right Knee",
];

/// Positions catalogued as symmetric although their two formations differ.
/// They are accepted as asymmetric, with a warning.
pub const LISTED_SYMMETRIC_BUT_TWO_FORMATIONS: &[(&str, &str, &str)] =
    &[("Aayata", "Anchita", "Ekapadam Bhramari")];

pub const ARM_FORMATIONS: &[&str] = &[
    "Above Head Natyarambhe",
    "Above Head Natyarambhe (Joined)",
    "Anchita",
    "Anchita Above Left Ear",
    "Anchita Above Right Ear",
    "Ardha Vithi",
    "Backward High",
    "Backward Low",
    "Backward Middle",
    "Cross Kunchita",
    "Diagonal High",
    "Diagonal Middle",
    "Elbow Down Anchita",
    "Forward High",
    "Forward High Above Head",
    "Forward Low",
    "Forward Middle",
    "Front Natyarambhe",
    "Katyang Behind Waist",
    "Kunchita",
    "Kunchita Above Shoulder",
    "Kunchita Natyarambhe",
    "Left Diagonal High",
    "Natyarambhe",
    "Right Diagonal High",
    "Right Diagonal Middle",
    "Side High",
    "Side High Natyarambhe",
    "Side Low",
    "Side Middle",
    "Utsanga",
];

pub const HEAD_FORMATIONS: &[&str] = &[
    "Adhomukham",
    "Ardha Aalolitam",
    "Back Paravrittam",
    "Left Adhomukham",
    "Left Ardha Paravrittam",
    "Left Paravrittam",
    "Left Utshiptam",
    "Right Adhomukham",
    "Right Ardha Paravrittam",
    "Right Paravrittam",
    "Right Utshiptam",
    "Samam",
    "Udvahitam",
];

pub const HAND_FORMATIONS: &[&str] = &[
    "Alapadma",
    "Avahitya",
    "Dola",
    "Kartarimukha",
    "Katakamukha",
    "Mrigashirsha",
    "Mushti",
    "Pataka",
    "Shikhara",
    "Suchi",
    "Tripataka",
];

const MIRROR_SUFFIX: &str = " [M]";

/// The mirror name of a leg position: `X` ↔ `X [M]`, Aaleeda ↔ Pratyaaleeda.
/// Symmetric positions are their own mirror.
pub fn mirror_leg_position(position: &str) -> String {
    for (a, b) in NAMED_MIRROR_PAIRS {
        if position == *a {
            return (*b).to_string();
        }
        if position == *b {
            return (*a).to_string();
        }
    }
    if SYMMETRIC_LEG_POSITIONS.contains(&position) {
        return position.to_string();
    }
    match position.strip_suffix(MIRROR_SUFFIX) {
        Some(base) => base.to_string(),
        None => format!("{position}{MIRROR_SUFFIX}"),
    }
}

/// Flips the lateral prefix of a head formation (`Left X` ↔ `Right X`).
pub fn mirror_head(head: &str) -> String {
    if let Some(rest) = head.strip_prefix("Left ") {
        format!("Right {rest}")
    } else if let Some(rest) = head.strip_prefix("Right ") {
        format!("Left {rest}")
    } else {
        head.to_string()
    }
}

/// Expected (left, right) formations for a leg position name, if catalogued.
pub fn leg_position_formations(position: &str) -> Option<(&'static str, &'static str)> {
    if let Some(&s) = SYMMETRIC_LEG_POSITIONS.iter().find(|s| **s == position) {
        return Some((s, s));
    }
    let lookup = |name: &str| {
        ASYMMETRIC_LEG_POSITIONS
            .iter()
            .chain(LISTED_SYMMETRIC_BUT_TWO_FORMATIONS)
            .find(|(_, _, p)| *p == name)
            .map(|(l, r, _)| (*l, *r))
    };
    if let Some(pair) = lookup(position) {
        return Some(pair);
    }
    position
        .strip_suffix(MIRROR_SUFFIX)
        .and_then(lookup)
        .map(|(l, r)| (r, l))
}
