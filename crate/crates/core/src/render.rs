//! Deterministic SVG figures. Coordinates are printed with fixed precision so
//! identical inputs give byte-identical documents.

use std::fmt::Write;

use crate::cantor::{level_intervals, OffsetTree, Square};
use crate::kernel::LineFamily;
use crate::params::{region_boundary_b, Params};
use crate::typespace::TypeSpace;
use crate::{Error, Result};

const W: f64 = 600.0;
const H: f64 = 600.0;
const PAD: f64 = 40.0;

struct Svg {
    body: String,
}

impl Svg {
    fn new() -> Self {
        let mut body = String::new();
        writeln!(
            body,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        )
        .unwrap();
        writeln!(
            body,
            r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#
        )
        .unwrap();
        Self { body }
    }

    fn raw(&mut self, s: &str) {
        self.body.push_str(s);
        self.body.push('\n');
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

/// Affine map from a data window to the padded canvas (y axis up).
#[derive(Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }

    fn point(&self, x: f64, y: f64) -> String {
        format!("{:.3},{:.3}", self.px(x), self.py(y))
    }

    fn rect(&self, svg: &mut Svg, x: f64, y: f64, w: f64, h: f64, attrs: &str) {
        svg.raw(&format!(
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" {attrs}/>"#,
            self.px(x),
            self.py(y + h),
            self.px(x + w) - self.px(x),
            self.py(y) - self.py(y + h),
        ));
    }

    fn polygon(&self, svg: &mut Svg, pts: &[(f64, f64)], attrs: &str) {
        let pts: Vec<String> = pts.iter().map(|&(x, y)| self.point(x, y)).collect();
        svg.raw(&format!(r#"<polygon points="{}" {attrs}/>"#, pts.join(" ")));
    }

    fn line(&self, svg: &mut Svg, (xa, ya): (f64, f64), (xb, yb): (f64, f64), attrs: &str) {
        svg.raw(&format!(
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" {attrs}/>"#,
            self.px(xa),
            self.py(ya),
            self.px(xb),
            self.py(yb)
        ));
    }

    fn text(&self, svg: &mut Svg, x: f64, y: f64, s: &str) {
        svg.raw(&format!(
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="12">{s}</text>"#,
            self.px(x),
            self.py(y)
        ));
    }

    fn frame(&self, svg: &mut Svg) {
        self.rect(
            svg,
            self.x0,
            self.y0,
            self.x1 - self.x0,
            self.y1 - self.y0,
            r#"fill="none" stroke="black""#,
        );
    }
}

/// The admissible `(a, b)` triangle split by the region boundary curve, with
/// optional marked points.
pub fn region_map(marks: &[(f64, f64)]) -> String {
    let f = Frame {
        x0: 0.24,
        x1: 1.0 / 3.0 + 0.01,
        y0: 0.0,
        y1: 0.13,
    };
    let mut svg = Svg::new();
    f.frame(&mut svg);
    let steps = 200;
    let a_lo = 0.25;
    let a_hi = 1.0 / 3.0;
    let edge = |a: f64| (1.0 - 3.0 * a) / 2.0;
    let mut tri = vec![(a_lo, 0.0)];
    tri.push((a_hi, 0.0));
    tri.push((a_lo, edge(a_lo)));
    f.polygon(
        &mut svg,
        &tri,
        r##"class="general" fill="#f4c7a1" stroke="none""##,
    );
    let mut simple = vec![(a_lo, 0.0)];
    simple.extend((0..=steps).map(|i| {
        let a = a_lo + (a_hi - a_lo) * i as f64 / steps as f64;
        (a, region_boundary_b(a).clamp(0.0, edge(a)))
    }));
    f.polygon(
        &mut svg,
        &simple,
        r##"class="simple" fill="#a9cbe8" stroke="none""##,
    );
    let curve: Vec<String> = (0..=steps)
        .map(|i| {
            let a = a_lo + (a_hi - a_lo) * i as f64 / steps as f64;
            f.point(a, region_boundary_b(a).max(0.0))
        })
        .collect();
    svg.raw(&format!(
        r#"<polyline class="boundary" points="{}" fill="none" stroke="black"/>"#,
        curve.join(" ")
    ));
    f.line(
        &mut svg,
        (a_lo, 0.0),
        (a_lo, edge(a_lo)),
        r#"stroke="black" stroke-dasharray="4 3""#,
    );
    f.line(
        &mut svg,
        (a_lo, edge(a_lo)),
        (a_hi, 0.0),
        r#"stroke="black""#,
    );
    for &(a, b) in marks {
        svg.raw(&format!(
            r#"<circle class="mark" cx="{:.3}" cy="{:.3}" r="4" fill="black"/>"#,
            f.px(a),
            f.py(b)
        ));
    }
    f.text(&mut svg, 0.255, 0.005, "simple");
    f.text(&mut svg, 0.3, 0.03, "general");
    f.text(&mut svg, a_lo - 0.003, -0.006, "1/4");
    f.text(&mut svg, a_hi - 0.003, -0.006, "1/3");
    f.text(&mut svg, 0.3365, -0.006, "a");
    f.text(&mut svg, 0.236, 0.126, "b");
    svg.finish()
}

/// Levels `0..=depth` of one Cantor set as stacked rows of intervals.
pub fn cantor_levels(tree: &OffsetTree, p: &Params, depth: usize) -> Result<String> {
    let f = Frame {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: (depth + 1) as f64,
    };
    let mut svg = Svg::new();
    for n in 0..=depth {
        let row = (depth - n) as f64;
        let set = if n == 0 {
            crate::IntervalSet::single(0.0, 1.0)
        } else {
            level_intervals(tree, p, n)?
        };
        for iv in &set {
            f.rect(
                &mut svg,
                iv.lo,
                row + 0.3,
                iv.length(),
                0.4,
                &format!(r#"class="level-{n}" fill="black""#),
            );
        }
    }
    Ok(svg.finish())
}

/// Squares and the line `e(x) = {(s, s + x)}`. The deepest level is filled
/// (highlighted where the line meets it), coarser levels are outlined and
/// level-1 squares carry their labels.
pub fn squares_with_line(squares: &[Square], x: f64) -> Result<String> {
    if squares.is_empty() {
        return Err(Error::MissingData("no squares to draw".into()));
    }
    let f = Frame {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };
    let mut svg = Svg::new();
    f.frame(&mut svg);
    let deepest = squares.iter().map(|q| q.level).max().unwrap_or(0);
    for q in squares {
        if q.level < deepest {
            f.rect(
                &mut svg,
                q.u,
                q.v,
                q.side,
                q.side,
                r#"class="outline" fill="none" stroke="black""#,
            );
        } else {
            let fill = if q.phi(x).is_some() {
                "#e8a33d"
            } else {
                "#9aa7b5"
            };
            f.rect(
                &mut svg,
                q.u,
                q.v,
                q.side,
                q.side,
                &format!(r#"class="square" fill="{fill}" stroke="none""#),
            );
        }
    }
    for q in squares.iter().filter(|q| q.level == 1) {
        let label = format!("Q{}", q.labels()[0]);
        f.text(&mut svg, q.u, q.v + q.side + 0.012, &label);
    }
    let (s0, s1) = ((-x).max(0.0), (1.0 - x).min(1.0));
    if s0 < s1 {
        f.line(
            &mut svg,
            (s0, s0 + x),
            (s1, s1 + x),
            r#"class="line" stroke="crimson" stroke-width="1.5""#,
        );
    }
    Ok(svg.finish())
}

/// The three stripes between `l_{2k}` and `l_{2k-1}` over `[-1, 1]^2`, with
/// `T x T` shaded.
pub fn kernel_stripes(p: &Params, ts: &TypeSpace) -> String {
    let f = Frame {
        x0: -1.0,
        x1: 1.0,
        y0: -1.0,
        y1: 1.0,
    };
    let mut svg = Svg::new();
    for cx in ts.components() {
        for cy in ts.components() {
            f.rect(
                &mut svg,
                cx.lo,
                cy.lo,
                cx.length(),
                cy.length(),
                r##"class="t-square" fill="#dde8f3" stroke="none""##,
            );
        }
    }
    let lines = LineFamily::new(p);
    let a = p.a();
    for k in 1..=3 {
        let lo = lines.intercepts[2 * k - 1];
        let hi = lines.intercepts[2 * k - 2];
        // bands are clipped to the frame by the viewport clip path below
        let pts = [
            (-1.0, -1.0 / a + lo),
            (1.0, 1.0 / a + lo),
            (1.0, 1.0 / a + hi),
            (-1.0, -1.0 / a + hi),
        ];
        let clipped: Vec<(f64, f64)> = clip_to_box(&pts);
        if clipped.len() >= 3 {
            f.polygon(&mut svg, &clipped, &format!(r##"class="stripe stripe-{k}" fill="#c0392b" fill-opacity="0.45" stroke="none""##));
        }
    }
    f.line(&mut svg, (-1.0, 0.0), (1.0, 0.0), r##"stroke="#777""##);
    f.line(&mut svg, (0.0, -1.0), (0.0, 1.0), r##"stroke="#777""##);
    f.frame(&mut svg);
    svg.finish()
}

/// Sutherland-Hodgman clip of a convex polygon to `[-1, 1]^2`.
fn clip_to_box(poly: &[(f64, f64)]) -> Vec<(f64, f64)> {
    type Edge = (
        fn((f64, f64)) -> bool,
        fn((f64, f64), (f64, f64)) -> (f64, f64),
    );
    fn cut(p: (f64, f64), q: (f64, f64), t: f64) -> (f64, f64) {
        (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1))
    }
    let edges: [Edge; 4] = [
        (
            |p| p.0 >= -1.0,
            |p, q| cut(p, q, (-1.0 - p.0) / (q.0 - p.0)),
        ),
        (|p| p.0 <= 1.0, |p, q| cut(p, q, (1.0 - p.0) / (q.0 - p.0))),
        (
            |p| p.1 >= -1.0,
            |p, q| cut(p, q, (-1.0 - p.1) / (q.1 - p.1)),
        ),
        (|p| p.1 <= 1.0, |p, q| cut(p, q, (1.0 - p.1) / (q.1 - p.1))),
    ];
    let mut out = poly.to_vec();
    for (inside, meet) in edges {
        let input = std::mem::take(&mut out);
        for (i, &cur) in input.iter().enumerate() {
            let prev = input[(i + input.len() - 1) % input.len()];
            match (inside(prev), inside(cur)) {
                (true, true) => out.push(cur),
                (true, false) => out.push(meet(prev, cur)),
                (false, true) => {
                    out.push(meet(prev, cur));
                    out.push(cur);
                }
                (false, false) => {}
            }
        }
        if out.is_empty() {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::{product_squares, sample_offset_tree};
    use crate::typespace;

    #[test]
    fn renders_are_deterministic() {
        let p = Params::new(0.28, 0.05).unwrap();
        let ts = typespace::build(&p, 0.015).unwrap();
        assert_eq!(kernel_stripes(&p, &ts), kernel_stripes(&p, &ts));
        assert_eq!(region_map(&[(0.26, 0.01)]), region_map(&[(0.26, 0.01)]));
    }

    #[test]
    fn cantor_render_marks_every_interval() {
        let p = Params::new(0.26, 0.01).unwrap();
        let tree = sample_offset_tree(&p, 4, 1, 0);
        let svg = cantor_levels(&tree, &p, 4).unwrap();
        assert_eq!(svg.matches(r#"class="level-4""#).count(), 16);
        assert_eq!(svg.matches(r#"class="level-0""#).count(), 1);
    }

    #[test]
    fn stripes_are_three_bands() {
        let p = Params::new(0.28, 0.05).unwrap();
        let ts = typespace::build(&p, 0.015).unwrap();
        let svg = kernel_stripes(&p, &ts);
        for k in 1..=3 {
            assert_eq!(svg.matches(&format!("stripe-{k}\"")).count(), 1);
        }
        assert_eq!(svg.matches("t-square").count(), 9);
    }

    #[test]
    fn square_render_labels_level_one() {
        let p = Params::new(0.26, 0.01).unwrap();
        let t1 = sample_offset_tree(&p, 1, 1, 0);
        let t2 = sample_offset_tree(&p, 1, 1, 1);
        let qs = product_squares(&t1, &t2, &p, 1).unwrap();
        let svg = squares_with_line(&qs, 0.0).unwrap();
        for k in 1..=4 {
            assert!(svg.contains(&format!(">Q{k}<")));
        }
        assert!(matches!(
            squares_with_line(&[], 0.0),
            Err(Error::MissingData(_))
        ));
    }
}
