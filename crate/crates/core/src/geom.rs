//! Small planar geometry helpers shared by the mesh, basis and quadrature code.

use nalgebra::Vector2;

pub type Vec2 = Vector2<f64>;

#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Signed shoelace area; positive for counter-clockwise vertex order.
pub fn signed_area(poly: &[Vec2]) -> f64 {
    let m = poly.len();
    let mut twice = 0.0;
    for i in 0..m {
        twice += cross(&poly[i], &poly[(i + 1) % m]);
    }
    0.5 * twice
}

/// Area-weighted centroid together with the signed area.
///
/// Coordinates are taken relative to the first vertex so that translated
/// copies of a polygon give bitwise-consistent relative results.
pub fn area_centroid(poly: &[Vec2]) -> (f64, Vec2) {
    let m = poly.len();
    let o = poly[0];
    let mut twice = 0.0;
    let mut c = Vec2::zeros();
    for i in 0..m {
        let p = poly[i] - o;
        let q = poly[(i + 1) % m] - o;
        let w = cross(&p, &q);
        twice += w;
        c += (p + q) * w;
    }
    let area = 0.5 * twice;
    if area == 0.0 {
        return (0.0, o);
    }
    (area, o + c / (6.0 * area))
}

/// Largest distance between any two vertices.
pub fn diameter(poly: &[Vec2]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in poly.iter().enumerate() {
        for b in &poly[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

/// Outward unit normal of the edge `a -> b` of a counter-clockwise polygon.
#[inline]
pub fn outward_normal(a: &Vec2, b: &Vec2) -> Vec2 {
    let e = b - a;
    Vec2::new(e.y, -e.x) / e.norm()
}

/// Distance from `p` to the segment `[a, b]` and the clamped parameter of the
/// closest point.
pub fn segment_distance(p: &Vec2, a: &Vec2, b: &Vec2) -> (f64, f64) {
    let e = b - a;
    let len2 = e.norm_squared();
    if len2 == 0.0 {
        return ((p - a).norm(), 0.0);
    }
    let t = ((p - a).dot(&e) / len2).clamp(0.0, 1.0);
    ((a + e * t - p).norm(), t)
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// True when the interiors overlap (shared boundaries do not count).
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x0 < other.x1 && other.x0 < self.x1 && self.y0 < other.y1 && other.y0 < self.y1
    }

    pub fn contains(&self, p: &Vec2) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    /// Counter-clockwise corner list starting at `(x0, y0)`.
    pub fn corners(&self) -> Vec<Vec2> {
        vec![
            Vec2::new(self.x0, self.y0),
            Vec2::new(self.x1, self.y0),
            Vec2::new(self.x1, self.y1),
            Vec2::new(self.x0, self.y1),
        ]
    }
}
