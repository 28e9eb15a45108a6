//! LabanXML generation and parsing.
//!
//! Canonical layout of one measure (three-space indentation, no XML
//! declaration):
//!
//! ```text
//! <measure num="0" posture="Natta1P1">
//!    <left>
//!       <arm duration="1"> direction, level [, crossing] [, inclusion] </arm>
//!       <elbow duration="1"> Degree </elbow>
//!       <foot> touch </foot>
//!       <knee duration="1"> Degree </knee>
//!       [<leg duration="1"> direction, level [, crossing] [, hip] </leg>]
//!    </left>
//!    <right> same as left </right>
//!    <support side="left"> direction, level </support>
//!    <support side="right"> direction, level </support>
//!    <head> direction, level </head>
//! </measure>
//! ```
//!
//! `<leg>` is written only when the leg gesture carries a non-zero code.
//! Mirror flags are not stored; the parser infers them from the left and
//! right codes.

use std::fmt::Write as _;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

pub use crate::laban::LabanScore;
use crate::laban::{ArmLaban, LabanFrame, LabanLimb, LegLaban};

#[derive(Debug, thiserror::Error)]
pub enum LabanXmlError {
    #[error("malformed XML at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{}", match .measure { Some(m) => format!("measure {m}: {message}"), None => message.clone() })]
    Validation { measure: Option<u32>, message: String },
}

fn validation(measure: Option<u32>, message: impl Into<String>) -> LabanXmlError {
    LabanXmlError::Validation {
        measure,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedScore {
    pub score: LabanScore,
    /// Unknown elements and other tolerated irregularities.
    pub warnings: Vec<String>,
}

const INDENT: &str = "   ";

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

struct Writer {
    out: String,
    depth: usize,
}

impl Writer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.depth {
            self.out.push_str(INDENT);
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn open(&mut self, tag: &str) {
        self.line(&format!("<{tag}>"));
        self.depth += 1;
    }

    fn close(&mut self, name: &str) {
        self.depth -= 1;
        self.line(&format!("</{name}>"));
    }

    fn value(&mut self, name: &str, v: impl std::fmt::Display) {
        self.line(&format!("<{name}>{v}</{name}>"));
    }

    fn limb(&mut self, l: LabanLimb) {
        self.value("direction", l.direction);
        self.value("level", l.level);
    }
}

fn write_side(w: &mut Writer, name: &str, arm: &ArmLaban, leg: &LegLaban) {
    w.open(name);
    w.open("arm duration=\"1\"");
    w.limb(arm.limb);
    if arm.crossing > 0 {
        w.value("crossing", arm.crossing);
    }
    if arm.body_inclusion {
        w.value("inclusion", 1);
    }
    w.close("arm");
    w.open("elbow duration=\"1\"");
    w.value("Degree", arm.elbow_folding);
    w.close("elbow");
    w.open("foot");
    w.value("touch", leg.touch);
    w.close("foot");
    w.open("knee duration=\"1\"");
    w.value("Degree", leg.knee_folding);
    w.close("knee");
    if leg.limb != LabanLimb::NONE || leg.crossing > 0 || leg.hip_support {
        w.open("leg duration=\"1\"");
        w.limb(leg.limb);
        if leg.crossing > 0 {
            w.value("crossing", leg.crossing);
        }
        if leg.hip_support {
            w.value("hip", 1);
        }
        w.close("leg");
    }
    w.close(name);
}

/// Canonical LabanXML text of a score. Identical scores give identical bytes.
pub fn generate_xml(score: &LabanScore) -> String {
    let mut w = Writer {
        out: String::new(),
        depth: 0,
    };
    w.open("laban");
    w.open("attribute");
    w.value("title", escape(&score.title));
    w.close("attribute");
    w.open("notation");
    for f in &score.frames {
        let mut tag = format!("measure num=\"{}\"", f.measure);
        if let Some(p) = &f.posture_id {
            let _ = write!(tag, " posture=\"{}\"", escape(p));
        }
        w.open(&tag);
        write_side(&mut w, "left", &f.left_arm, &f.left_leg);
        write_side(&mut w, "right", &f.right_arm, &f.right_leg);
        w.open("support side=\"left\"");
        w.limb(f.left_support);
        w.close("support");
        w.open("support side=\"right\"");
        w.limb(f.right_support);
        w.close("support");
        w.open("head");
        w.limb(f.head);
        w.close("head");
        w.close("measure");
    }
    w.close("notation");
    w.close("laban");
    w.out
}

/// Minimal element tree used by the parser and by structural comparisons.
/// `text` keeps whitespace exactly as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XmlNode {
    pub name: String,
    pub attributes: Vec<(String, String)>,
    pub text: String,
    pub children: Vec<XmlNode>,
    pub line: usize,
}

impl XmlNode {
    pub fn attribute(&self, key: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn child(&self, name: &str) -> Option<&XmlNode> {
        self.children.iter().find(|c| c.name == name)
    }
}

fn line_of(text: &str, pos: u64) -> usize {
    let end = (pos as usize).min(text.len());
    text.as_bytes()[..end].iter().filter(|&&b| b == b'\n').count() + 1
}

fn start_node(e: &BytesStart<'_>, text: &str, pos: u64) -> Result<XmlNode, LabanXmlError> {
    let line = line_of(text, pos);
    let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
    let mut attributes = Vec::new();
    for a in e.attributes() {
        let a = a.map_err(|err| LabanXmlError::Parse {
            line,
            message: err.to_string(),
        })?;
        let key = String::from_utf8_lossy(a.key.as_ref()).into_owned();
        let value = a
            .unescape_value()
            .map_err(|err| LabanXmlError::Parse {
                line,
                message: err.to_string(),
            })?
            .into_owned();
        attributes.push((key, value));
    }
    Ok(XmlNode {
        name,
        attributes,
        text: String::new(),
        children: Vec::new(),
        line,
    })
}

/// Parses well-formed XML into an element tree.
pub fn parse_tree(text: &str) -> Result<XmlNode, LabanXmlError> {
    let mut reader = Reader::from_str(text);
    let mut stack: Vec<XmlNode> = Vec::new();
    let mut root = None;
    loop {
        let pos = reader.buffer_position();
        let event = reader.read_event().map_err(|e| LabanXmlError::Parse {
            line: line_of(text, reader.error_position()),
            message: e.to_string(),
        })?;
        let perr = |message: String| LabanXmlError::Parse {
            line: line_of(text, pos),
            message,
        };
        match event {
            Event::Start(e) => stack.push(start_node(&e, text, pos)?),
            Event::Empty(e) => {
                let node = start_node(&e, text, pos)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(node),
                    None if root.is_none() => root = Some(node),
                    None => return Err(perr("content after the root element".into())),
                }
            }
            Event::End(_) => {
                let node = stack.pop().ok_or_else(|| perr("unexpected closing tag".into()))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(node),
                    None => root = Some(node),
                }
            }
            Event::Text(t) => {
                let value = t.unescape().map_err(|e| perr(e.to_string()))?;
                match stack.last_mut() {
                    Some(node) => node.text.push_str(&value),
                    None if value.trim().is_empty() => {}
                    None => return Err(perr("text outside the root element".into())),
                }
            }
            Event::CData(t) => {
                if let Some(node) = stack.last_mut() {
                    node.text.push_str(&String::from_utf8_lossy(&t));
                }
            }
            Event::Eof => break,
            _ => {}
        }
        if root.is_some() && !stack.is_empty() {
            return Err(perr("more than one root element".into()));
        }
    }
    if let Some(open) = stack.last() {
        return Err(LabanXmlError::Parse {
            line: line_of(text, text.len() as u64),
            message: format!("element <{}> opened at line {} is not closed", open.name, open.line),
        });
    }
    root.ok_or_else(|| LabanXmlError::Parse {
        line: 1,
        message: "document has no root element".into(),
    })
}

struct MeasureParser<'a> {
    measure: u32,
    warnings: &'a mut Vec<String>,
}

impl MeasureParser<'_> {
    fn err(&self, message: impl Into<String>) -> LabanXmlError {
        validation(Some(self.measure), message)
    }

    fn int(&self, node: &XmlNode) -> Result<u32, LabanXmlError> {
        node.text.trim().parse::<u32>().map_err(|_| {
            self.err(format!(
                "<{}> at line {} holds '{}', expected a non-negative integer",
                node.name, node.line, node.text
            ))
        })
    }

    fn code(&self, node: &XmlNode) -> Result<u8, LabanXmlError> {
        let v = self.int(node)?;
        u8::try_from(v).map_err(|_| self.err(format!("<{}> value {v} out of range", node.name)))
    }

    fn check_duration(&mut self, node: &XmlNode) {
        if let Some(d) = node.attribute("duration") {
            if d != "1" {
                self.warnings.push(format!(
                    "measure {}: <{}> duration '{d}' treated as 1",
                    self.measure, node.name
                ));
            }
        }
    }

    fn unknown(&mut self, parent: &str, node: &XmlNode) {
        self.warnings.push(format!(
            "measure {}: unknown element <{}> in <{parent}> at line {} ignored",
            self.measure, node.name, node.line
        ));
    }

    fn limb(&mut self, node: &XmlNode, extra: &mut dyn FnMut(&mut Self, &XmlNode) -> Result<bool, LabanXmlError>) -> Result<LabanLimb, LabanXmlError> {
        let mut limb = LabanLimb::NONE;
        for c in &node.children {
            match c.name.as_str() {
                "direction" => limb.direction = self.code(c)?,
                "level" => limb.level = self.code(c)?,
                _ => {
                    if !extra(self, c)? {
                        self.unknown(&node.name, c);
                    }
                }
            }
        }
        Ok(limb)
    }

    fn degree(&mut self, node: &XmlNode) -> Result<u8, LabanXmlError> {
        let mut degree = 0;
        for c in &node.children {
            if c.name.eq_ignore_ascii_case("degree") {
                degree = self.code(c)?;
            } else {
                self.unknown(&node.name, c);
            }
        }
        Ok(degree)
    }

    fn side(&mut self, node: &XmlNode) -> Result<(ArmLaban, LegLaban), LabanXmlError> {
        let mut arm = ArmLaban::default();
        let mut leg = LegLaban::default();
        for c in &node.children {
            match c.name.as_str() {
                "arm" => {
                    self.check_duration(c);
                    let mut crossing = 0;
                    let mut inclusion = false;
                    arm.limb = self.limb(c, &mut |p, n| match n.name.as_str() {
                        "crossing" => {
                            crossing = p.int(n)?;
                            Ok(true)
                        }
                        "inclusion" => {
                            inclusion = p.flag(n)?;
                            Ok(true)
                        }
                        _ => Ok(false),
                    })?;
                    arm.crossing = crossing;
                    arm.body_inclusion = inclusion;
                }
                "elbow" => {
                    self.check_duration(c);
                    arm.elbow_folding = self.degree(c)?;
                }
                "knee" => {
                    self.check_duration(c);
                    leg.knee_folding = self.degree(c)?;
                }
                "foot" => {
                    for t in &c.children {
                        if t.name == "touch" {
                            leg.touch = self.code(t)?;
                        } else {
                            self.unknown("foot", t);
                        }
                    }
                }
                "leg" => {
                    self.check_duration(c);
                    let mut crossing = 0;
                    let mut hip = false;
                    let mut touch = None;
                    leg.limb = self.limb(c, &mut |p, n| match n.name.as_str() {
                        "crossing" => {
                            crossing = p.int(n)?;
                            Ok(true)
                        }
                        "hip" => {
                            hip = p.flag(n)?;
                            Ok(true)
                        }
                        "touch" => {
                            touch = Some(p.code(n)?);
                            Ok(true)
                        }
                        _ => Ok(false),
                    })?;
                    leg.crossing = crossing;
                    leg.hip_support = hip;
                    if let Some(t) = touch {
                        leg.touch = t;
                    }
                }
                _ => self.unknown(&node.name, c),
            }
        }
        Ok((arm, leg))
    }

    fn flag(&self, node: &XmlNode) -> Result<bool, LabanXmlError> {
        match self.int(node)? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(self.err(format!("<{}> must be 0 or 1, found {v}", node.name))),
        }
    }
}

fn parse_measure(node: &XmlNode, warnings: &mut Vec<String>) -> Result<LabanFrame, LabanXmlError> {
    let num = node
        .attribute("num")
        .ok_or_else(|| validation(None, format!("<measure> at line {} has no num attribute", node.line)))?;
    let measure = num.trim().parse::<u32>().map_err(|_| {
        validation(
            None,
            format!("<measure> at line {} has invalid num '{num}'", node.line),
        )
    })?;
    let mut p = MeasureParser { measure, warnings };
    let mut frame = LabanFrame {
        measure,
        posture_id: node.attribute("posture").map(str::to_string),
        ..Default::default()
    };
    let (mut left_support, mut right_support, mut head) = (None, None, None);
    let (mut left, mut right) = (None, None);
    for c in &node.children {
        match c.name.as_str() {
            "left" => left = Some(p.side(c)?),
            "right" => right = Some(p.side(c)?),
            "support" => {
                let mut touch = None;
                let limb = p.limb(c, &mut |p, n| {
                    if n.name == "touch" {
                        touch = Some(p.code(n)?);
                        Ok(true)
                    } else {
                        Ok(false)
                    }
                })?;
                let slot = match c.attribute("side") {
                    Some("left") => &mut left_support,
                    Some("right") => &mut right_support,
                    other => {
                        return Err(p.err(format!(
                            "<support> at line {} has side {:?}, expected \"left\" or \"right\"",
                            c.line, other
                        )))
                    }
                };
                if slot.is_some() {
                    return Err(p.err(format!("duplicate <support> at line {}", c.line)));
                }
                *slot = Some((limb, touch));
            }
            "head" => head = Some(p.limb(c, &mut |_, _| Ok(false))?),
            _ => p.unknown("measure", c),
        }
    }
    let (Some((ls, lt)), Some((rs, rt))) = (left_support, right_support) else {
        return Err(p.err("missing <support side=\"left\"> or <support side=\"right\">"));
    };
    frame.head = head.ok_or_else(|| p.err("missing <head>"))?;
    frame.left_support = ls;
    frame.right_support = rs;
    if let Some((arm, leg)) = left {
        frame.left_arm = arm;
        frame.left_leg = leg;
    }
    if let Some((arm, leg)) = right {
        frame.right_arm = arm;
        frame.right_leg = leg;
    }
    if let Some(t) = lt {
        frame.left_leg.touch = t;
    }
    if let Some(t) = rt {
        frame.right_leg.touch = t;
    }
    let problems = frame.problems();
    if !problems.is_empty() {
        return Err(validation(Some(measure), problems.join("; ")));
    }
    Ok(frame.with_inferred_mirror_flags())
}

/// Parses a LabanXML document. Inverse of [`generate_xml`] on its output.
pub fn parse_xml(text: &str) -> Result<ParsedScore, LabanXmlError> {
    let root = parse_tree(text)?;
    if root.name != "laban" {
        return Err(validation(None, format!("root element is <{}>, expected <laban>", root.name)));
    }
    let mut warnings = Vec::new();
    let mut title = None;
    let mut frames = Vec::new();
    for c in &root.children {
        match c.name.as_str() {
            "attribute" => {
                for a in &c.children {
                    if a.name == "title" {
                        title = Some(a.text.clone());
                    } else {
                        warnings.push(format!("unknown element <{}> in <attribute> ignored", a.name));
                    }
                }
            }
            "notation" => {
                for m in &c.children {
                    if m.name == "measure" {
                        frames.push(parse_measure(m, &mut warnings)?);
                    } else {
                        warnings.push(format!("unknown element <{}> in <notation> ignored", m.name));
                    }
                }
            }
            other => warnings.push(format!("unknown element <{other}> in <laban> ignored")),
        }
    }
    if title.is_none() {
        warnings.push("document has no <title>".into());
    }
    for (i, f) in frames.iter().enumerate() {
        let ok = if i == 0 {
            f.measure == 0
        } else {
            f.measure > frames[i - 1].measure
        };
        if !ok {
            return Err(validation(
                Some(f.measure),
                "measures must start at 0 and increase strictly",
            ));
        }
    }
    Ok(ParsedScore {
        score: LabanScore {
            title: title.unwrap_or_default(),
            frames,
        },
        warnings,
    })
}
