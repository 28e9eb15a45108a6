use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::OntologyError;

macro_rules! bols {
    ($($variant:ident => $text:literal),* $(,)?) => {
        /// A mnemonic syllable of the bol vocabulary, or the stick-beat pseudo-bol.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum BolToken {
            $($variant,)*
            /// Beat marked by the stick only, written `[B]`.
            StickBeat,
        }

        impl BolToken {
            /// The 31 vocalized syllables, in vocabulary order.
            pub const VOCABULARY: [BolToken; 31] = [$(BolToken::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(BolToken::$variant => $text,)*
                    BolToken::StickBeat => "[B]",
                }
            }
        }

        impl FromStr for BolToken {
            type Err = OntologyError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.trim() {
                    $($text => Ok(BolToken::$variant),)*
                    "[B]" | "B" | "StickBeat" => Ok(BolToken::StickBeat),
                    other => Err(OntologyError::UnknownBol(other.to_string())),
                }
            }
        }
    };
}

bols! {
    A => "a", Da => "da", Dha => "dha", Dhat => "dhat", Dhi => "dhi", Dhin => "dhin",
    Dhit => "dhit", Ding => "ding", E => "e", Gadu => "gadu", Gin => "gin", Ha => "ha",
    Hat => "hat", Hi => "hi", Jag => "jag", Jham => "jham", Ka => "ka", Ki => "ki",
    Ku => "ku", Na => "na", Ri => "ri", Ta => "ta", Tak => "tak", Tam => "tam",
    Tan => "tan", Tat => "tat", Tei => "tei", Tom => "tom", Tta => "tta", Ya => "ya",
    Yum => "yum",
}

impl BolToken {
    pub fn is_stick_beat(self) -> bool {
        self == BolToken::StickBeat
    }
}

impl fmt::Display for BolToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for BolToken {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for BolToken {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a whitespace-separated bol group such as `tei yum`.
///
/// `No Bol`, `-` and the empty string denote a beat without bols. A lone `[B]`
/// is a stick beat and also yields an empty group.
pub fn parse_bol_group(text: &str) -> Result<Vec<BolToken>, OntologyError> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "-" || trimmed.eq_ignore_ascii_case("no bol") {
        return Ok(Vec::new());
    }
    let tokens = trimmed
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<Vec<BolToken>, _>>()?;
    if tokens.iter().all(|t| t.is_stick_beat()) {
        return Ok(Vec::new());
    }
    Ok(tokens)
}
