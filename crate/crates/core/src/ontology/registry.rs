use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bol::BolToken;
use super::posture::{mirror_posture, KeyPostureSpec, Symmetry};
use super::vocab;
use super::OntologyError;

pub const SCHEMA_VERSION: u32 = 1;

pub const SOLLUKATTUS_FILE: &str = "sollukattus.json";
pub const ADAVUS_FILE: &str = "adavus.json";
pub const POSTURES_FILE: &str = "postures.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Taalam {
    Adi,
    Roopakam,
}

impl Taalam {
    /// Beats in one cycle of the taalam.
    pub fn beats(self) -> usize {
        match self {
            Taalam::Adi => 8,
            Taalam::Roopakam => 6,
        }
    }
}

impl fmt::Display for Taalam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Taalam::Adi => f.write_str("Adi"),
            Taalam::Roopakam => f.write_str("Roopakam"),
        }
    }
}

/// A Sollukattu: one bar of beats, each slot holding the bols spoken on it.
/// A slot of `[StickBeat]` is a beat without bols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SollukattuDef {
    pub name: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    pub taalam: Taalam,
    pub bar_length: usize,
    pub slots: Vec<Vec<BolToken>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdavuDef {
    pub name: String,
    pub variant: u32,
    /// Canonical name of the accompanying Sollukattu.
    pub sollukattu: String,
    /// Posture held before the first beat, if defined.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_posture: Option<String>,
    /// One posture per beat of a bar; empty when not catalogued.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub posture_sequence: Vec<String>,
}

impl AdavuDef {
    /// Identifier such as `natta_1`.
    pub fn slug(&self) -> String {
        format!("{}_{}", normalize(&self.name).replace(' ', "_"), self.variant)
    }
}

impl fmt::Display for AdavuDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.name, self.variant)
    }
}

/// Bol groups per beat over `bars` repetitions of the bar. Beat ordinals start
/// at 1 and run across bars; stick-beat slots yield an empty group.
pub fn expected_bol_sequence(s: &SollukattuDef, bars: usize) -> Vec<(usize, Vec<BolToken>)> {
    (0..bars)
        .flat_map(|_| s.slots.iter())
        .enumerate()
        .map(|(i, slot)| {
            let bols = slot.iter().copied().filter(|b| !b.is_stick_beat()).collect();
            (i + 1, bols)
        })
        .collect()
}

/// Lowercase, with `_`/`-` treated as spaces and whitespace collapsed.
pub(crate) fn normalize(name: &str) -> String {
    name.replace(['_', '-'], " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSollukattu {
    name: String,
    #[serde(default)]
    aliases: Vec<String>,
    taalam: Taalam,
    bar_length: usize,
    slots: Vec<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SollukattuFile {
    schema_version: u32,
    sollukattus: Vec<RawSollukattu>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AdavuFile {
    schema_version: u32,
    adavus: Vec<AdavuDef>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PostureFile {
    schema_version: u32,
    #[serde(default)]
    #[allow(dead_code)]
    adavu_family: Option<String>,
    postures: Vec<KeyPostureSpec>,
}

/// Immutable, cross-referenced store of Sollukattus, Adavus and key postures.
#[derive(Debug, Clone)]
pub struct Registry {
    sollukattus: Vec<SollukattuDef>,
    adavus: Vec<AdavuDef>,
    postures: BTreeMap<String, KeyPostureSpec>,
    sollukattu_index: HashMap<String, usize>,
    posture_aliases: HashMap<String, String>,
    warnings: Vec<String>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(file: &str, text: &str) -> Result<T, OntologyError> {
    serde_json::from_str(text).map_err(|e| OntologyError::Format {
        file: file.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn check_version(file: &str, version: u32, issues: &mut Vec<String>) {
    if version != SCHEMA_VERSION {
        issues.push(format!(
            "{file}: unsupported schema_version {version} (expected {SCHEMA_VERSION})"
        ));
    }
}

impl Registry {
    /// The ontology bundled with this crate.
    pub fn shipped() -> Result<Registry, OntologyError> {
        Registry::from_json(
            include_str!("../../data/ontology/sollukattus.json"),
            include_str!("../../data/ontology/adavus.json"),
            include_str!("../../data/ontology/postures.json"),
        )
    }

    /// Loads `sollukattus.json`, `adavus.json` and `postures.json` from `dir`.
    pub fn load_dir(dir: &Path) -> Result<Registry, OntologyError> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| OntologyError::Io { path, source })
        };
        let s = read(SOLLUKATTUS_FILE)?;
        let a = read(ADAVUS_FILE)?;
        let p = read(POSTURES_FILE)?;
        Registry::from_json(&s, &a, &p)
    }

    /// Parses and cross-validates the three ontology documents. All validation
    /// problems are collected into a single [`OntologyError::Validation`].
    pub fn from_json(sollukattus: &str, adavus: &str, postures: &str) -> Result<Registry, OntologyError> {
        let sf: SollukattuFile = parse_json(SOLLUKATTUS_FILE, sollukattus)?;
        let af: AdavuFile = parse_json(ADAVUS_FILE, adavus)?;
        let pf: PostureFile = parse_json(POSTURES_FILE, postures)?;

        let mut issues = Vec::new();
        let mut warnings = Vec::new();
        check_version(SOLLUKATTUS_FILE, sf.schema_version, &mut issues);
        check_version(ADAVUS_FILE, af.schema_version, &mut issues);
        check_version(POSTURES_FILE, pf.schema_version, &mut issues);

        let mut solls = Vec::with_capacity(sf.sollukattus.len());
        let mut sollukattu_index = HashMap::new();
        for raw in sf.sollukattus {
            let def = resolve_sollukattu(raw, &mut issues);
            let index = solls.len();
            for key in std::iter::once(&def.name).chain(&def.aliases) {
                match sollukattu_index.insert(normalize(key), index) {
                    Some(prev) if prev != index => {
                        let prev: &SollukattuDef = &solls[prev];
                        issues.push(format!(
                            "sollukattu name or alias '{key}' used by both {} and {}",
                            prev.name, def.name
                        ));
                    }
                    _ => {}
                }
            }
            solls.push(def);
        }

        let mut postures = BTreeMap::new();
        let mut posture_aliases = HashMap::new();
        for p in pf.postures {
            if let Some(class) = p.class_id.as_ref().filter(|c| **c != p.posture_id) {
                posture_aliases.insert(class.clone(), p.posture_id.clone());
            }
            if postures.contains_key(&p.posture_id) {
                issues.push(format!("duplicate posture_id {}", p.posture_id));
            }
            postures.insert(p.posture_id.clone(), p);
        }
        for alias in posture_aliases.keys() {
            if postures.contains_key(alias) {
                issues.push(format!("class id {alias} collides with a posture_id"));
            }
        }

        let mut registry = Registry {
            sollukattus: solls,
            adavus: Vec::new(),
            postures,
            sollukattu_index,
            posture_aliases,
            warnings: Vec::new(),
        };

        for p in registry.postures.values() {
            validate_posture(p, &registry, &mut issues, &mut warnings);
        }

        let mut seen = HashMap::new();
        for mut adavu in af.adavus {
            match registry.sollukattu(&adavu.sollukattu) {
                Some(s) => {
                    let bar_length = s.bar_length;
                    adavu.sollukattu = s.name.clone();
                    if !adavu.posture_sequence.is_empty() && adavu.posture_sequence.len() != bar_length {
                        issues.push(format!(
                            "adavu {adavu}: posture_sequence has {} entries, sollukattu {} has bar length {bar_length}",
                            adavu.posture_sequence.len(),
                            adavu.sollukattu
                        ));
                    }
                }
                None => issues.push(format!(
                    "adavu {adavu}: unknown sollukattu '{}'",
                    adavu.sollukattu
                )),
            }
            for id in adavu.initial_posture.iter().chain(&adavu.posture_sequence) {
                if registry.posture(id).is_none() {
                    issues.push(format!("adavu {adavu}: unknown posture '{id}'"));
                }
            }
            if seen.insert(adavu.slug(), ()).is_some() {
                issues.push(format!("duplicate adavu {adavu}"));
            }
            registry.adavus.push(adavu);
        }

        if !issues.is_empty() {
            return Err(OntologyError::Validation(issues));
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        registry.warnings = warnings;
        Ok(registry)
    }

    pub fn sollukattus(&self) -> &[SollukattuDef] {
        &self.sollukattus
    }

    pub fn adavus(&self) -> &[AdavuDef] {
        &self.adavus
    }

    pub fn postures(&self) -> impl Iterator<Item = &KeyPostureSpec> {
        self.postures.values()
    }

    /// Non-fatal findings from loading, such as catalogue inconsistencies.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Looks up a Sollukattu by name or alias, ignoring case and `_` vs space.
    pub fn sollukattu(&self, name: &str) -> Option<&SollukattuDef> {
        self.sollukattu_index
            .get(&normalize(name))
            .map(|&i| &self.sollukattus[i])
    }

    /// Looks up an Adavu by family name and variant.
    pub fn adavu(&self, name: &str, variant: u32) -> Option<&AdavuDef> {
        let key = normalize(name);
        self.adavus
            .iter()
            .find(|a| a.variant == variant && normalize(&a.name) == key)
    }

    /// Looks up an Adavu by a combined identifier like `natta_1` or `Natta 1`.
    pub fn find_adavu(&self, id: &str) -> Option<&AdavuDef> {
        let key = normalize(id);
        let (name, variant) = key.rsplit_once(' ')?;
        self.adavu(name, variant.parse().ok()?)
    }

    /// Canonical posture id for an id or class alias.
    pub fn canonical_posture_id<'a>(&'a self, id: &'a str) -> Option<&'a str> {
        if let Some((k, _)) = self.postures.get_key_value(id) {
            return Some(k.as_str());
        }
        self.posture_aliases.get(id).map(String::as_str)
    }

    pub fn posture(&self, id: &str) -> Option<&KeyPostureSpec> {
        self.canonical_posture_id(id).and_then(|k| self.postures.get(k))
    }

    /// The catalogued mirror counterpart of an asymmetric posture.
    pub fn mirror_counterpart(&self, id: &str) -> Option<&KeyPostureSpec> {
        let p = self.posture(id)?;
        match p.symmetry {
            Symmetry::Symmetric => Some(p),
            Symmetry::MirrorOfAsymmetric => self.posture(p.mirror_of.as_deref()?),
            Symmetry::Asymmetric => self
                .postures
                .values()
                .find(|q| q.mirror_of.as_deref() == Some(p.posture_id.as_str())),
        }
    }
}

fn resolve_sollukattu(raw: RawSollukattu, issues: &mut Vec<String>) -> SollukattuDef {
    let mut slots = Vec::with_capacity(raw.slots.len());
    for (i, group) in raw.slots.iter().enumerate() {
        if group.is_empty() || group.len() > 4 {
            issues.push(format!(
                "sollukattu {}: slot {} holds {} bols (expected 1 to 4)",
                raw.name,
                i + 1,
                group.len()
            ));
        }
        let mut tokens = Vec::with_capacity(group.len());
        for text in group {
            match text.parse::<BolToken>() {
                Ok(b) => tokens.push(b),
                Err(_) => issues.push(format!(
                    "sollukattu {}: slot {}: unknown bol '{text}'",
                    raw.name,
                    i + 1
                )),
            }
        }
        slots.push(tokens);
    }
    if slots.len() != raw.bar_length {
        issues.push(format!(
            "sollukattu {}: {} slots but bar_length {}",
            raw.name,
            slots.len(),
            raw.bar_length
        ));
    }
    if raw.bar_length == 0 || !raw.bar_length.is_multiple_of(raw.taalam.beats()) {
        issues.push(format!(
            "sollukattu {}: bar_length {} is not a whole number of {} cycles",
            raw.name, raw.bar_length, raw.taalam
        ));
    }
    SollukattuDef {
        name: raw.name,
        aliases: raw.aliases,
        taalam: raw.taalam,
        bar_length: raw.bar_length,
        slots,
    }
}

fn check_vocab(id: &str, what: &str, value: &str, vocab: &[&str], issues: &mut Vec<String>) {
    if !vocab.contains(&value) {
        issues.push(format!("posture {id}: unknown {what} formation '{value}'"));
    }
}

fn validate_posture(
    p: &KeyPostureSpec,
    registry: &Registry,
    issues: &mut Vec<String>,
    warnings: &mut Vec<String>,
) {
    let id = p.posture_id.as_str();
    check_vocab(id, "left leg", &p.legs.left, vocab::LEG_FORMATIONS, issues);
    check_vocab(id, "right leg", &p.legs.right, vocab::LEG_FORMATIONS, issues);
    check_vocab(id, "left arm", &p.arms.left, vocab::ARM_FORMATIONS, issues);
    check_vocab(id, "right arm", &p.arms.right, vocab::ARM_FORMATIONS, issues);
    check_vocab(id, "head", &p.head, vocab::HEAD_FORMATIONS, issues);
    if let Some(h) = &p.hands {
        check_vocab(id, "left hand", &h.left, vocab::HAND_FORMATIONS, issues);
        check_vocab(id, "right hand", &h.right, vocab::HAND_FORMATIONS, issues);
    }

    match vocab::leg_position_formations(&p.legs.position) {
        None => issues.push(format!(
            "posture {id}: unknown leg position '{}'",
            p.legs.position
        )),
        Some((l, r)) if l != p.legs.left || r != p.legs.right => issues.push(format!(
            "posture {id}: leg position {} expects formations {l}/{r}, found {}/{}",
            p.legs.position, p.legs.left, p.legs.right
        )),
        Some(_) => {}
    }
    if let Some((_, _, name)) = vocab::LISTED_SYMMETRIC_BUT_TWO_FORMATIONS
        .iter()
        .find(|(_, _, name)| *name == p.legs.position)
    {
        warnings.push(format!(
            "posture {id}: leg position {name} is catalogued as symmetric but has two distinct formations; treated as asymmetric"
        ));
    }

    match p.symmetry {
        Symmetry::Symmetric => {
            let hands_equal = p.hands.as_ref().is_none_or(|h| h.left == h.right);
            if p.legs.left != p.legs.right || p.arms.left != p.arms.right || !hands_equal {
                issues.push(format!(
                    "posture {id}: marked symmetric but left and right formations differ"
                ));
            }
        }
        Symmetry::Asymmetric => {
            if p.mirror_of.is_some() {
                issues.push(format!("posture {id}: asymmetric posture must not set mirror_of"));
            }
        }
        Symmetry::MirrorOfAsymmetric => match p.mirror_of.as_deref().map(|b| (b, registry.posture(b))) {
            None => issues.push(format!("posture {id}: mirror posture without mirror_of")),
            Some((base, None)) => {
                issues.push(format!("posture {id}: mirror_of refers to unknown posture '{base}'"))
            }
            Some((base, Some(b))) => {
                if b.symmetry != Symmetry::Asymmetric {
                    issues.push(format!("posture {id}: mirror_of {base} is not an asymmetric posture"));
                } else if !mirror_posture(b).same_formations(p) {
                    issues.push(format!(
                        "posture {id}: formations are not the mirror of {base}"
                    ));
                }
            }
        },
    }
}
