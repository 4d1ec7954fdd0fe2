//! Scatter plot of image points over the target, written as plain SVG.
//!
//! Included faces are solid, deleted faces dashed, deleted vertices drawn as
//! open circles.

use std::fmt::Write as _;

use polyfold::geometry::{BasicPolygonalSet, Point2, Region};
use polyfold::rational;
use polyfold::verify::Window;

const WIDTH: f64 = 600.0;

struct View {
    x0: f64,
    y1: f64,
    scale: f64,
}

impl View {
    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.x0) * self.scale, (self.y1 - y) * self.scale)
    }
}

fn xy(p: &Point2) -> (f64, f64) {
    (rational::to_f64(&p.x), rational::to_f64(&p.y))
}

/// Segment `(from, to, included)`.
type Piece = ((f64, f64), (f64, f64), bool);

/// Boundary pieces of a set, rays cut at `reach`.
fn pieces(s: &BasicPolygonalSet, reach: f64) -> Vec<Piece> {
    let o = &s.outline;
    let far = |p: &Point2, d: &Point2| {
        let (px, py) = xy(p);
        let (dx, dy) = xy(d);
        let n = dx.hypot(dy);
        (px + reach * dx / n, py + reach * dy / n)
    };
    let v = &o.vertices;
    if o.is_halfplane() {
        return vec![(far(&v[0], &o.dir_in), far(&v[0], &o.dir_out), s.edge_included[0])];
    }
    let mut out = vec![(far(&v[0], &o.dir_in), xy(&v[0]), s.edge_included[0])];
    for (i, w) in v.windows(2).enumerate() {
        out.push((xy(&w[0]), xy(&w[1]), s.edge_included[i + 1]));
    }
    out.push((xy(&v[v.len() - 1]), far(&v[v.len() - 1], &o.dir_out), s.edge_included[v.len()]));
    out
}

/// SVG with a fixed view box derived from `window`.
pub fn render_svg(window: &Window, target: &Region, points: &[[f64; 2]]) -> String {
    let [x0, x1, y0, y1] = [&window.x0, &window.x1, &window.y0, &window.y1].map(rational::to_f64);
    let view = View { x0, y1, scale: WIDTH / (x1 - x0) };
    let height = (y1 - y0) * view.scale;
    let reach = 4.0 * (x1 - x0).hypot(y1 - y0) + x0.abs().max(x1.abs()) + y0.abs().max(y1.abs());
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {height}" width="{WIDTH}" height="{height}">"#
    )
    .expect("string write");
    writeln!(s, r##"<rect x="0" y="0" width="{WIDTH}" height="{height}" fill="#ffffff"/>"##).expect("string write");
    writeln!(s, r##"<g fill="#1f5fa8" fill-opacity="0.6">"##).expect("string write");
    for [x, y] in points {
        let (px, py) = view.px(*x, *y);
        writeln!(s, r#"<circle cx="{px:.3}" cy="{py:.3}" r="1.2"/>"#).expect("string write");
    }
    writeln!(s, "</g>").expect("string write");
    writeln!(s, r##"<g stroke="#000000" stroke-width="1.5" fill="none">"##).expect("string write");
    for part in target.parts() {
        for ((ax, ay), (bx, by), included) in pieces(part, reach) {
            let (pa, pb) = (view.px(ax, ay), view.px(bx, by));
            let dash = if included { "" } else { r#" stroke-dasharray="6 4""# };
            writeln!(s, r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"{dash}/>"#, pa.0, pa.1, pb.0, pb.1)
                .expect("string write");
        }
        for (v, included) in part.outline.vertices.iter().zip(&part.vertex_included) {
            let (px, py) = view.px(xy(v).0, xy(v).1);
            let fill = if *included { "#000000" } else { "#ffffff" };
            writeln!(s, r#"<circle cx="{px:.3}" cy="{py:.3}" r="3.5" fill="{fill}"/>"#).expect("string write");
        }
    }
    writeln!(s, "</g>\n</svg>").expect("string write");
    s
}
