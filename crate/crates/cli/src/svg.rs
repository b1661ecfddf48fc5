//! Minimal SVG scenes: polylines as paths, nets as circles, boxes as rects.

use bilip_core::geom::Point;
use xmlwriter::{Options, XmlWriter};

pub const Y_COLOUR: &str = "#1f5fd0";
pub const REST_COLOUR: &str = "#d03a1f";
pub const CURVE_COLOUR: &str = "#222222";
pub const FAINT_COLOUR: &str = "#aaaaaa";

enum Item {
    Path { pts: Vec<Point>, colour: String, width: f64 },
    Circle { at: Point, r: f64, colour: String },
    Rect { lo: Point, hi: Point, colour: String, fill: Option<String> },
}

/// A drawing in world coordinates with a fixed view box; y points up.
pub struct Scene {
    lo: Point,
    hi: Point,
    items: Vec<Item>,
}

/// Three decimals keep files small and byte-stable.
fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

impl Scene {
    pub fn new(lo: Point, hi: Point) -> Self {
        let (lo, hi) = if hi.x > lo.x && hi.y > lo.y {
            (lo, hi)
        } else {
            (lo - Point::new(1.0, 1.0), lo + Point::new(1.0, 1.0))
        };
        Scene { lo, hi, items: Vec::new() }
    }

    /// The box of `pts` widened by a margin of 5%.
    pub fn around(pts: impl IntoIterator<Item = Point>) -> Self {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts.into_iter().filter(|p| p.is_finite()) {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if !lo.is_finite() {
            return Scene::new(Point::new(-1.0, -1.0), Point::new(1.0, 1.0));
        }
        let pad = 0.05 * (hi.x - lo.x).max(hi.y - lo.y).max(1e-3);
        Scene::new(lo - Point::new(pad, pad), hi + Point::new(pad, pad))
    }

    pub fn size(&self) -> f64 {
        (self.hi.x - self.lo.x).max(self.hi.y - self.lo.y)
    }

    pub fn path(&mut self, pts: Vec<Point>, colour: &str, width: f64) {
        if pts.len() >= 2 {
            self.items.push(Item::Path { pts, colour: colour.into(), width });
        }
    }

    pub fn circle(&mut self, at: Point, r: f64, colour: &str) {
        self.items.push(Item::Circle { at, r, colour: colour.into() });
    }

    pub fn rect(&mut self, lo: Point, hi: Point, colour: &str, fill: Option<&str>) {
        self.items.push(Item::Rect { lo, hi, colour: colour.into(), fill: fill.map(Into::into) });
    }

    /// Writes the scene translated by `dx` in view units, for side-by-side
    /// panels.
    fn emit(&self, w: &mut XmlWriter, scale: f64, dx: f64) {
        let px = |p: Point| ((p.x - self.lo.x) * scale + dx, (self.hi.y - p.y) * scale);
        let stroke = 0.002 * self.size() * scale;
        for item in &self.items {
            match item {
                Item::Path { pts, colour, width } => {
                    let mut d = String::new();
                    for (k, p) in pts.iter().filter(|p| p.is_finite()).enumerate() {
                        let (x, y) = px(*p);
                        d.push_str(if k == 0 { "M" } else { " L" });
                        d.push_str(&format!("{},{}", num(x), num(y)));
                    }
                    w.start_element("path");
                    w.write_attribute("d", &d);
                    w.write_attribute("fill", "none");
                    w.write_attribute("stroke", colour);
                    w.write_attribute("stroke-width", &num(stroke * width));
                    w.end_element();
                }
                Item::Circle { at, r, colour } => {
                    let (x, y) = px(*at);
                    w.start_element("circle");
                    w.write_attribute("cx", &num(x));
                    w.write_attribute("cy", &num(y));
                    w.write_attribute("r", &num(r * scale));
                    w.write_attribute("fill", colour);
                    w.end_element();
                }
                Item::Rect { lo, hi, colour, fill } => {
                    let (x0, y1) = px(*lo);
                    let (x1, y0) = px(*hi);
                    w.start_element("rect");
                    w.write_attribute("x", &num(x0));
                    w.write_attribute("y", &num(y0));
                    w.write_attribute("width", &num(x1 - x0));
                    w.write_attribute("height", &num(y1 - y0));
                    w.write_attribute("fill", fill.as_deref().unwrap_or("none"));
                    w.write_attribute("stroke", colour);
                    w.write_attribute("stroke-width", &num(stroke * 0.5));
                    w.end_element();
                }
            }
        }
    }
}

/// Renders scenes left to right, each scaled to a width of 1000 units.
pub fn render(panels: &[Scene]) -> String {
    const PANEL: f64 = 1000.0;
    const GAP: f64 = 40.0;
    let scales: Vec<f64> = panels.iter().map(|s| PANEL / (s.hi.x - s.lo.x)).collect();
    let height = panels
        .iter()
        .zip(&scales)
        .map(|(s, k)| (s.hi.y - s.lo.y) * k)
        .fold(1.0, f64::max);
    let width = panels.len() as f64 * PANEL + (panels.len().saturating_sub(1)) as f64 * GAP;
    let mut w = XmlWriter::new(Options::default());
    w.start_element("svg");
    w.write_attribute("xmlns", "http://www.w3.org/2000/svg");
    w.write_attribute("viewBox", &format!("0 0 {} {}", num(width), num(height)));
    w.write_attribute("width", &num(width));
    w.write_attribute("height", &num(height));
    for (k, (scene, scale)) in panels.iter().zip(&scales).enumerate() {
        w.start_element("g");
        w.write_attribute("id", &format!("panel{k}"));
        scene.emit(&mut w, *scale, k as f64 * (PANEL + GAP));
        w.end_element();
    }
    let mut out = w.end_document();
    out.push('\n');
    out
}
