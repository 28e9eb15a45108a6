//! SVG rendering of a Laban staff.
//!
//! Time runs bottom to top: measure 0 occupies the lowest cell. Columns are
//! placed symmetrically about the centre line, from the inside out: support,
//! leg gesture, body, arm. The single head column sits right of the right arm
//! column.
//!
//! Every direction symbol is a `<g class="direction-glyph">` carrying
//! `data-measure`, `data-column` and `data-code` (the direction code) plus
//! `data-level`. Folding marks (`class="folding-mark"`) and touch marks
//! (`class="touch-mark"`) carry the same attributes with their own codes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::laban::{LabanFrame, LabanLimb, LabanScore, MAX_DIRECTION, MAX_FOLDING, MAX_LEVEL, MAX_TOUCH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Column {
    Support,
    Leg,
    Body,
    Arm,
    Head,
}

impl Column {
    /// Distance of the column centre from the centre line, in column widths.
    fn offset(self) -> f64 {
        match self {
            Column::Support => 0.5,
            Column::Leg => 1.5,
            Column::Body => 2.5,
            Column::Arm => 3.5,
            Column::Head => 4.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Geometry of the staff. All values are in SVG user units (pixels).
#[derive(Debug, Clone, PartialEq)]
pub struct StaffLayout {
    pub column_width: f64,
    pub cell_height: f64,
    pub glyph_width: f64,
    pub glyph_height: f64,
    pub margin: f64,
    pub title_height: f64,
}

impl Default for StaffLayout {
    fn default() -> Self {
        StaffLayout {
            column_width: 24.0,
            cell_height: 60.0,
            glyph_width: 16.0,
            glyph_height: 40.0,
            margin: 20.0,
            title_height: 24.0,
        }
    }
}

impl StaffLayout {
    /// Number of column widths from the centre line to the outer edge.
    const HALF_COLUMNS: f64 = 5.0;

    pub fn width(&self) -> f64 {
        2.0 * (self.margin + Self::HALF_COLUMNS * self.column_width)
    }

    pub fn centre_x(&self) -> f64 {
        self.width() / 2.0
    }

    /// Centre x of a column on one side.
    pub fn column_x(&self, column: Column, side: Side) -> f64 {
        let d = column.offset() * self.column_width;
        match (column, side) {
            (Column::Head, _) | (_, Side::Right) => self.centre_x() + d,
            (_, Side::Left) => self.centre_x() - d,
        }
    }

    pub fn height(&self, measures: usize) -> f64 {
        2.0 * self.margin + self.title_height + measures.max(1) as f64 * self.cell_height
    }

    /// Top edge of the cell of the `m`-th of `n` measures.
    pub fn cell_top(&self, m: usize, n: usize) -> f64 {
        self.margin + self.title_height + (n.max(1) - 1 - m) as f64 * self.cell_height
    }

    fn check(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.glyph_width > self.column_width {
            w.push("glyph width exceeds column width; glyphs will overlap".into());
        }
        if self.glyph_height > self.cell_height {
            w.push("glyph height exceeds cell height; glyphs will overlap".into());
        }
        w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenderOutput {
    pub svg: String,
    pub warnings: Vec<String>,
}

/// Outline of a left-side or central direction symbol in a unit box
/// centred on the origin, y pointing down. Right-side codes use the
/// x-mirror of their left counterpart.
fn unit_outline(direction: u8) -> Option<Vec<(f64, f64)>> {
    let left = |d: u8| -> Vec<(f64, f64)> {
        match d {
            // place
            1 => vec![(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)],
            // side: pointed towards the side
            2 => vec![(0.5, -0.5), (0.5, 0.5), (-0.5, 0.0)],
            // forward: rectangle with a raised tip on the outer top corner
            4 => vec![(-0.5, -0.5), (0.0, -0.3), (0.5, -0.3), (0.5, 0.5), (-0.5, 0.5)],
            // backward: rectangle with a lowered tip on the outer bottom corner
            6 => vec![(-0.5, -0.5), (0.5, -0.5), (0.5, 0.3), (0.0, 0.3), (-0.5, 0.5)],
            // forward diagonal
            8 => vec![(-0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)],
            // backward diagonal
            10 => vec![(-0.5, -0.5), (0.5, -0.5), (-0.5, 0.5)],
            _ => unreachable!(),
        }
    };
    match direction {
        1 | 2 | 4 | 6 | 8 | 10 => Some(left(direction)),
        3 | 5 | 7 | 9 | 11 => Some(left(direction - 1).into_iter().map(|(x, y)| (-x, y)).collect()),
        _ => None,
    }
}

fn fmt_num(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

struct Renderer<'a> {
    layout: &'a StaffLayout,
    out: String,
    warnings: Vec<String>,
}

impl Renderer<'_> {
    fn direction_glyph(&mut self, measure: u32, column: &str, limb: LabanLimb, cx: f64, cy: f64) {
        let l = self.layout;
        let (w, h) = (l.glyph_width, l.glyph_height);
        let outline = unit_outline(limb.direction);
        let level_ok = (1..=MAX_LEVEL).contains(&limb.level);
        let _ = writeln!(
            self.out,
            "    <g class=\"direction-glyph\" data-measure=\"{measure}\" data-column=\"{column}\" data-code=\"{}\" data-level=\"{}\">",
            limb.direction, limb.level
        );
        match outline {
            Some(points) if level_ok && limb.direction <= MAX_DIRECTION => {
                let fill = match limb.level {
                    1 => "url(#level-high)",
                    2 => "#ffffff",
                    _ => "#000000",
                };
                let pts: Vec<String> = points
                    .iter()
                    .map(|(x, y)| format!("{},{}", fmt_num(cx + x * w), fmt_num(cy + y * h)))
                    .collect();
                let _ = writeln!(
                    self.out,
                    "      <polygon points=\"{}\" fill=\"{fill}\" stroke=\"#000000\" stroke-width=\"1.5\"/>",
                    pts.join(" ")
                );
                if limb.level == 2 {
                    let _ = writeln!(
                        self.out,
                        "      <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#000000\"/>",
                        fmt_num(cx),
                        fmt_num(cy),
                        fmt_num(w / 8.0)
                    );
                }
            }
            _ => {
                self.warnings.push(format!(
                    "measure {measure}: {column} has unrenderable direction {} / level {}; drawn as placeholder",
                    limb.direction, limb.level
                ));
                let _ = writeln!(
                    self.out,
                    "      <rect class=\"fallback\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#cc0000\" stroke-dasharray=\"3,2\"/>",
                    fmt_num(cx - w / 2.0),
                    fmt_num(cy - h / 2.0),
                    fmt_num(w),
                    fmt_num(h)
                );
                let _ = writeln!(
                    self.out,
                    "      <text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\" fill=\"#cc0000\">?</text>",
                    fmt_num(cx),
                    fmt_num(cy + 3.0)
                );
            }
        }
        self.out.push_str("    </g>\n");
    }

    /// Folding degree as an arc over the glyph position with the degree beside it.
    fn folding_mark(&mut self, measure: u32, column: &str, degree: u8, cx: f64, top: f64, side: Side) {
        if degree == 0 {
            return;
        }
        if degree > MAX_FOLDING {
            self.warnings.push(format!(
                "measure {measure}: {column} folding {degree} out of range; not drawn"
            ));
            return;
        }
        let r = self.layout.glyph_width / 3.0;
        let y = top + (self.layout.cell_height - self.layout.glyph_height) / 4.0;
        let tx = match side {
            Side::Left => cx - r - 4.0,
            Side::Right => cx + r + 4.0,
        };
        let anchor = match side {
            Side::Left => "end",
            Side::Right => "start",
        };
        let _ = write!(
            self.out,
            "    <g class=\"folding-mark\" data-measure=\"{measure}\" data-column=\"{column}\" data-code=\"{degree}\">\n      <path d=\"M {} {} A {} {} 0 0 1 {} {}\" fill=\"none\" stroke=\"#000000\"/>\n      <text x=\"{}\" y=\"{}\" font-size=\"8\" text-anchor=\"{anchor}\">{degree}</text>\n    </g>\n",
            fmt_num(cx - r),
            fmt_num(y),
            fmt_num(r),
            fmt_num(r),
            fmt_num(cx + r),
            fmt_num(y),
            fmt_num(tx),
            fmt_num(y + 3.0)
        );
    }

    /// Touch as a hook under the support symbol; its depth grows with the code.
    fn touch_mark(&mut self, measure: u32, column: &str, touch: u8, cx: f64, bottom: f64, side: Side) {
        if touch == 0 {
            return;
        }
        if touch > MAX_TOUCH {
            self.warnings.push(format!(
                "measure {measure}: {column} touch {touch} out of range; not drawn"
            ));
            return;
        }
        let hw = self.layout.glyph_width / 3.0;
        let depth = 2.0 + f64::from(touch) * 0.6;
        let dir = match side {
            Side::Left => -1.0,
            Side::Right => 1.0,
        };
        let y = bottom + 2.0;
        let _ = write!(
            self.out,
            "    <g class=\"touch-mark\" data-measure=\"{measure}\" data-column=\"{column}\" data-code=\"{touch}\">\n      <path d=\"M {} {} L {} {} L {} {}\" fill=\"none\" stroke=\"#000000\"/>\n    </g>\n",
            fmt_num(cx - dir * hw),
            fmt_num(y),
            fmt_num(cx + dir * hw),
            fmt_num(y),
            fmt_num(cx + dir * hw),
            fmt_num(y + depth)
        );
    }

    fn frame(&mut self, f: &LabanFrame, index: usize, n: usize) {
        let l = self.layout;
        let top = l.cell_top(index, n);
        let cy = top + l.cell_height / 2.0;
        let m = f.measure;
        let _ = writeln!(
            self.out,
            "  <g class=\"cell\" data-measure=\"{m}\" data-y=\"{}\">",
            fmt_num(top)
        );
        let sides = [
            (Side::Left, "left", f.left_support, f.left_leg, f.left_arm),
            (Side::Right, "right", f.right_support, f.right_leg, f.right_arm),
        ];
        for (side, name, support, leg, arm) in sides {
            if support.is_set() {
                let x = l.column_x(Column::Support, side);
                self.direction_glyph(m, &format!("{name}-support"), support, x, cy);
            }
            if leg.limb.is_set() {
                let x = l.column_x(Column::Leg, side);
                self.direction_glyph(m, &format!("{name}-leg"), leg.limb, x, cy);
            }
            if arm.limb.is_set() {
                let x = l.column_x(Column::Arm, side);
                self.direction_glyph(m, &format!("{name}-arm"), arm.limb, x, cy);
            }
        }
        if f.head.is_set() {
            self.direction_glyph(m, "head", f.head, l.column_x(Column::Head, Side::Right), cy);
        }
        for (side, name, _, leg, arm) in sides {
            self.folding_mark(m, &format!("{name}-knee"), leg.knee_folding, l.column_x(Column::Leg, side), top, side);
            self.folding_mark(m, &format!("{name}-elbow"), arm.elbow_folding, l.column_x(Column::Arm, side), top, side);
            let bottom = cy + l.glyph_height / 2.0;
            self.touch_mark(m, &format!("{name}-touch"), leg.touch, l.column_x(Column::Support, side), bottom, side);
        }
        self.out.push_str("  </g>\n");
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders a score as an SVG 1.1 document.
pub fn render_svg(score: &LabanScore, layout: &StaffLayout) -> RenderOutput {
    let n = score.frames.len();
    let (w, h) = (layout.width(), layout.height(n));
    let mut r = Renderer {
        layout,
        out: String::new(),
        warnings: layout.check(),
    };
    let _ = writeln!(
        r.out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">",
        fmt_num(w),
        fmt_num(h)
    );
    r.out.push_str(
        "  <defs>\n    <pattern id=\"level-high\" patternUnits=\"userSpaceOnUse\" width=\"4\" height=\"4\">\n      <path d=\"M 0 4 L 4 0\" stroke=\"#000000\" stroke-width=\"1\"/>\n    </pattern>\n  </defs>\n",
    );
    let _ = writeln!(
        r.out,
        "  <title>{}</title>\n  <text class=\"staff-title\" x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        escape(&score.title),
        fmt_num(layout.centre_x()),
        fmt_num(layout.margin + layout.title_height / 2.0),
        escape(&score.title)
    );

    let top = layout.margin + layout.title_height;
    let bottom = top + n.max(1) as f64 * layout.cell_height;
    let cx = layout.centre_x();
    let outer = 3.0 * layout.column_width;
    r.out.push_str("  <g class=\"staff\">\n");
    for (class, x) in [("staff-line", cx - outer), ("centre-line", cx), ("staff-line", cx + outer)] {
        let _ = writeln!(
            r.out,
            "    <line class=\"{class}\" x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000000\"/>",
            fmt_num(x),
            fmt_num(top),
            fmt_num(bottom)
        );
    }
    for i in 0..=n {
        let y = bottom - i as f64 * layout.cell_height;
        let _ = writeln!(
            r.out,
            "    <line class=\"measure-line\" x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#000000\" stroke-width=\"{3}\"/>",
            fmt_num(cx - outer),
            fmt_num(y),
            fmt_num(cx + outer),
            if i == 0 { "2" } else { "0.5" }
        );
    }
    r.out.push_str("  </g>\n");

    for (i, f) in score.frames.iter().enumerate() {
        r.frame(f, i, n);
    }
    r.out.push_str("</svg>\n");
    RenderOutput {
        svg: r.out,
        warnings: r.warnings,
    }
}
