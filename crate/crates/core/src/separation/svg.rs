//! SVG rendering of a separating curve.

use super::{MarkedNet, SeparationCurve};
use std::fmt::Write;

/// Draws the strip, the squares Q_x, the curve, and the net with Y in blue
/// and the rest in red.
pub fn separation_svg(sep: &SeparationCurve, net: &MarkedNet) -> String {
    let (t0, t1) = sep.curve.window();
    let w = sep.cfg.w;
    let pad = 0.05 * (t1 - t0).max(w);
    let (x0, x1) = (t0 - pad, t1 + pad);
    let (y0, y1) = (-pad, w + pad);
    let scale = 1000.0 / (x1 - x0);
    let (width, height) = (1000.0, (y1 - y0) * scale);
    let px = |x: f64| (x - x0) * scale;
    let py = |y: f64| (y1 - y) * scale;
    let stroke = (0.002 * (w / (x1 - x0)).min(1.0) * width).max(0.2);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{height:.1}" viewBox="0 0 {width:.1} {height:.1}">"#
    );
    let _ = writeln!(
        out,
        r##"<rect x="0" y="{:.3}" width="{width:.1}" height="{:.3}" fill="#f4f4f4"/>"##,
        py(w),
        w * scale
    );
    for a in &sep.anchors {
        let _ = writeln!(
            out,
            r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="#999" stroke-width="{:.3}"/>"##,
            px(a.square_lo.x),
            py(a.square_hi.y),
            (a.square_hi.x - a.square_lo.x) * scale,
            (a.square_hi.y - a.square_lo.y) * scale,
            stroke * 0.5
        );
    }
    let mut path = String::new();
    let first = sep.curve.vertices[0];
    let last = *sep.curve.vertices.last().unwrap();
    let _ = write!(path, "M {:.3} {:.3}", px(x0), py(first.y));
    for v in &sep.curve.vertices {
        let _ = write!(path, " L {:.3} {:.3}", px(v.x), py(v.y));
    }
    let _ = write!(path, " L {:.3} {:.3}", px(x1), py(last.y));
    let _ = writeln!(
        out,
        r##"<path d="{path}" fill="none" stroke="#222" stroke-width="{stroke:.3}"/>"##
    );
    let rad = (sep.cfg.s / 4.0 * scale).max(1.0);
    for (p, &m) in net.points.iter().zip(&net.y_mask) {
        let colour = if m { "#1f5fd0" } else { "#d03a1f" };
        let _ = writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="{rad:.3}" fill="{colour}"/>"#,
            px(p.x),
            py(p.y)
        );
    }
    out.push_str("</svg>\n");
    out
}
