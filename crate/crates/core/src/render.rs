//! SVG output for chains, piece sets and the `(r, N)` regime plot.
//!
//! Exact coordinates are rounded to six decimals when written; nothing read
//! back from a document feeds further computation.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::Chain;
use crate::geometry::{PieceSet, Point};
use crate::params::{classify_regime, ClassTag, ParamPoint, Regime};
use crate::qfield::QuadExt;
use crate::rat::Rat;

const COORD_DIGITS: usize = 6;
const FIGURE_PX: f64 = 800.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Style {
    pub stroke: String,
    pub fill: String,
    pub stroke_width: f64,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            stroke: "#1f3a5f".into(),
            fill: "#cfe0f3".into(),
            stroke_width: 1.0,
        }
    }
}

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

/// Maps exact points into SVG user space: translated so the padded bounding
/// box starts at the origin, with y flipped.
struct Frame {
    min_x: QuadExt,
    max_y: QuadExt,
    margin: QuadExt,
    width: QuadExt,
    height: QuadExt,
}

impl Frame {
    fn fit<'a>(points: impl Iterator<Item = &'a Point>) -> Frame {
        let mut it = points;
        let first = it.next().expect("non-empty point list");
        let (mut lx, mut hx, mut ly, mut hy) = (&first.x, &first.x, &first.y, &first.y);
        for p in it {
            lx = lx.min(&p.x);
            hx = hx.max(&p.x);
            ly = ly.min(&p.y);
            hy = hy.max(&p.y);
        }
        let w = hx - lx;
        let h = hy - ly;
        let margin = w.clone().max(h.clone()).scale(&Rat::new(1, 20));
        let two = Rat::from_integer(2);
        Frame {
            width: &w + &margin.scale(&two),
            height: &h + &margin.scale(&two),
            min_x: lx.clone(),
            max_y: hy.clone(),
            margin,
        }
    }

    fn coord(&self, p: &Point) -> String {
        let x = &(&p.x - &self.min_x) + &self.margin;
        let y = &(&self.max_y - &p.y) + &self.margin;
        format!(
            "{},{}",
            x.to_decimal(COORD_DIGITS),
            y.to_decimal(COORD_DIGITS)
        )
    }

    fn open(&self, out: &mut String) {
        let (w, h) = (self.width.to_f64(), self.height.to_f64());
        let (pw, ph) = if w >= h {
            (FIGURE_PX, FIGURE_PX * h / w)
        } else {
            (FIGURE_PX * w / h, FIGURE_PX)
        };
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{pw:.3}" height="{ph:.3}" viewBox="0 0 {} {}">"#,
            self.width.to_decimal(COORD_DIGITS),
            self.height.to_decimal(COORD_DIGITS)
        );
    }
}

fn line_width(frame: &Frame, style: &Style) -> String {
    // Stroke width is given in output pixels.
    let span = frame.width.to_f64().max(frame.height.to_f64());
    format!("{:.6}", style.stroke_width * span / FIGURE_PX)
}

/// One closed path through every chain point.
pub fn render_chain(chain: &Chain, style: &Style) -> Result<String> {
    if chain.points().is_empty() {
        return Err(Error::InvalidParameter(
            "cannot render an empty chain".into(),
        ));
    }
    let frame = Frame::fit(chain.points().iter());
    let mut out = String::new();
    frame.open(&mut out);
    let mut d = String::new();
    for (i, p) in chain.points().iter().enumerate() {
        d.push_str(if i == 0 { "M" } else { " L" });
        d.push_str(&frame.coord(p));
    }
    d.push_str(" Z");
    let _ = writeln!(
        out,
        r#"<path d="{d}" fill="{}" stroke="{}" stroke-width="{}" stroke-linejoin="round"/>"#,
        escape(&style.fill),
        escape(&style.stroke),
        line_width(&frame, style)
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// One filled polygon per piece.
pub fn render_pieces(ps: &PieceSet, style: &Style) -> String {
    let outline = ps.shape().vertices();
    let frame = Frame::fit(outline.iter());
    let mut out = String::new();
    frame.open(&mut out);
    let _ = writeln!(
        out,
        r#"<g fill="{}" stroke="{}" stroke-width="{}">"#,
        escape(&style.fill),
        escape(&style.stroke),
        line_width(&frame, style)
    );
    for t in ps.transforms() {
        let pts: Vec<String> = ps
            .piece_vertices(t)
            .iter()
            .map(|p| frame.coord(p))
            .collect();
        let _ = writeln!(out, r#"<polygon points="{}"/>"#, pts.join(" "));
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// A labelled `(r, N)` point on the regime plot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegimeMark {
    label: String,
    r: Rat,
    n: u64,
}

impl RegimeMark {
    pub fn new(label: impl Into<String>, r: Rat, n: u64) -> Result<Self> {
        ParamPoint::new(n, r.clone(), ClassTag::Additive)?;
        Ok(RegimeMark {
            label: label.into(),
            r,
            n,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn r(&self) -> &Rat {
        &self.r
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn regime(&self) -> Regime {
        classify_regime(
            &ParamPoint::new(self.n, self.r.clone(), ClassTag::Additive).expect("checked in new"),
        )
    }
}

/// The four examples worked through in detail.
pub fn default_marks() -> Vec<RegimeMark> {
    [
        ("Sierpinski triangle", 2, 3),
        ("Sierpinski carpet", 3, 8),
        ("Koch snowflake", 3, 4),
        ("Koch square", 3, 5),
    ]
    .into_iter()
    .map(|(label, r, n)| RegimeMark::new(label, Rat::from_integer(r), n).expect("valid mark"))
    .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotStyle {
    pub subcritical: String,
    pub intermediate: String,
    pub supercritical: String,
    pub boundary: String,
    pub mark: String,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle {
            subcritical: "#e0e0e0".into(),
            intermediate: "#fff6c2".into(),
            supercritical: "#f9cccc".into(),
            boundary: "#222222".into(),
            mark: "#000000".into(),
        }
    }
}

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 480.0;
const PAD_L: f64 = 60.0;
const PAD_R: f64 = 20.0;
const PAD_T: f64 = 20.0;
const PAD_B: f64 = 50.0;
const CURVE_STEPS: usize = 400;

/// Shaded regime regions, the boundaries `N = r` (solid) and `N = r²`
/// (dashed), axes, and the given marks.
pub fn render_regime_plot(
    marks: &[RegimeMark],
    r_range: (f64, f64),
    n_range: (f64, f64),
    style: &PlotStyle,
) -> Result<String> {
    let (r_lo, r_hi) = r_range;
    let (n_lo, n_hi) = n_range;
    if !(r_lo < r_hi && n_lo < n_hi) || ![r_lo, r_hi, n_lo, n_hi].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter(
            "plot ranges must be non-empty".into(),
        ));
    }
    let pw = PLOT_W - PAD_L - PAD_R;
    let ph = PLOT_H - PAD_T - PAD_B;
    let px = |r: f64| PAD_L + (r - r_lo) / (r_hi - r_lo) * pw;
    let py = |n: f64| PAD_T + (n_hi - n) / (n_hi - n_lo) * ph;
    let clamp = |n: f64| n.clamp(n_lo, n_hi);
    let xy = |r: f64, n: f64| format!("{:.3},{:.3}", px(r), py(n));
    let rs: Vec<f64> = (0..=CURVE_STEPS)
        .map(|i| r_lo + (r_hi - r_lo) * i as f64 / CURVE_STEPS as f64)
        .collect();
    let curve = |f: &dyn Fn(f64) -> f64, rev: bool| -> Vec<String> {
        let mut pts: Vec<String> = rs.iter().map(|&r| xy(r, clamp(f(r)))).collect();
        if rev {
            pts.reverse();
        }
        pts
    };
    let linear = |r: f64| r;
    let square = |r: f64| r * r;

    let mut sub = curve(&linear, false);
    sub.push(xy(r_hi, n_lo));
    sub.push(xy(r_lo, n_lo));
    let mut mid = curve(&square, false);
    mid.extend(curve(&linear, true));
    let mut sup = vec![xy(r_lo, n_hi), xy(r_hi, n_hi)];
    sup.extend(curve(&square, true));

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{PLOT_W}" height="{PLOT_H}" viewBox="0 0 {PLOT_W} {PLOT_H}" font-family="sans-serif" font-size="12">"#
    );
    for (name, fill, pts) in [
        ("subcritical", &style.subcritical, &sub),
        ("intermediate", &style.intermediate, &mid),
        ("supercritical", &style.supercritical, &sup),
    ] {
        let _ = writeln!(
            out,
            r#"<polygon class="region" data-region="{name}" fill="{}" stroke="none" points="{}"/>"#,
            escape(fill),
            pts.join(" ")
        );
    }
    let _ = writeln!(
        out,
        r#"<polyline class="boundary" data-boundary="N=r" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
        escape(&style.boundary),
        curve(&linear, false).join(" ")
    );
    let _ = writeln!(
        out,
        r#"<polyline class="boundary" data-boundary="N=r^2" fill="none" stroke="{}" stroke-width="1.5" stroke-dasharray="6,4" points="{}"/>"#,
        escape(&style.boundary),
        curve(&square, false).join(" ")
    );

    // Axes with integer ticks.
    let (x0, y0) = (px(r_lo), py(n_lo));
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{x0:.3}" y1="{y0:.3}" x2="{:.3}" y2="{y0:.3}" stroke="black"/>"#,
        px(r_hi)
    );
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{x0:.3}" y1="{y0:.3}" x2="{x0:.3}" y2="{:.3}" stroke="black"/>"#,
        py(n_hi)
    );
    for t in (r_lo.ceil() as i64)..=(r_hi.floor() as i64) {
        let x = px(t as f64);
        let _ = writeln!(
            out,
            r#"<text class="tick" x="{x:.3}" y="{:.3}" text-anchor="middle">{t}</text>"#,
            y0 + 16.0
        );
    }
    let n_step = ((n_hi - n_lo) / 10.0).ceil().max(1.0) as i64;
    let mut t = (n_lo.ceil() as i64).div_euclid(n_step) * n_step;
    while (t as f64) <= n_hi {
        if (t as f64) >= n_lo {
            let _ = writeln!(
                out,
                r#"<text class="tick" x="{:.3}" y="{:.3}" text-anchor="end">{t}</text>"#,
                x0 - 6.0,
                py(t as f64) + 4.0
            );
        }
        t += n_step;
    }
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="{:.3}" y="{:.3}" text-anchor="middle">r</text>"#,
        PAD_L + pw / 2.0,
        PLOT_H - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="16" y="{:.3}" text-anchor="middle">N</text>"#,
        PAD_T + ph / 2.0
    );

    for m in marks {
        let (x, y) = (px(m.r.to_f64()), py(m.n as f64));
        let _ = writeln!(
            out,
            r#"<g class="mark" data-regime="{}" data-r="{}" data-n="{}"><circle cx="{x:.3}" cy="{y:.3}" r="4" fill="{}"/><text x="{:.3}" y="{:.3}">{}</text></g>"#,
            m.regime(),
            m.r,
            m.n,
            escape(&style.mark),
            x + 6.0,
            y - 6.0,
            escape(&m.label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub const DEFAULT_R_RANGE: (f64, f64) = (1.0, 5.0);
pub const DEFAULT_N_RANGE: (f64, f64) = (0.0, 26.0);
