//! Planar domains and their exact measure data.

mod measure;
mod polygon;
mod record;

pub use measure::{
    check_convex_bounds, inner_parallel_set, shell_volume, shell_volume_monte_carlo, theta,
    theta_grid, theta_monte_carlo, BoundCheck, ConvexBoundsReport, Side, ThetaMethod, ThetaReport,
    THETA_BAR_DECADES, THETA_BAR_POINTS_PER_DECADE,
};
pub(crate) use measure::{padded_box, sample_box};
pub use polygon::{ConvexPolygon, CHEBYSHEV_EXACT_EDGES};
pub use record::{format_domain, parse_domain, parse_domain_at, parse_domain_records};

use crate::error::{validation, Result};

pub type Point = nalgebra::Vector2<f64>;

/// Spatial dimension of every concrete domain.
pub const DIM: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// `[x0, x0 + a] x [y0, y0 + b]`.
    Rectangle { a: f64, b: f64, origin: Point },
    ConvexPolygon(ConvexPolygon),
    Disk { radius: f64, center: Point },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometrySummary {
    pub area: f64,
    pub perimeter: f64,
    pub inradius: f64,
    pub dimension: usize,
}

impl Domain {
    pub fn rectangle(a: f64, b: f64) -> Result<Self> {
        Self::rectangle_at(a, b, Point::zeros())
    }

    pub fn rectangle_at(a: f64, b: f64, origin: Point) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(validation(format!("rectangle sides must be positive, got {a} x {b}")));
        }
        Ok(Self::Rectangle { a, b, origin })
    }

    pub fn unit_square() -> Self {
        Self::Rectangle {
            a: 1.0,
            b: 1.0,
            origin: Point::zeros(),
        }
    }

    pub fn disk(radius: f64) -> Result<Self> {
        Self::disk_at(radius, Point::zeros())
    }

    pub fn disk_at(radius: f64, center: Point) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(validation(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Self::Disk { radius, center })
    }

    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        Ok(Self::ConvexPolygon(ConvexPolygon::new(vertices)?))
    }

    /// Equilateral triangle with side `s`, base on the x axis starting at the origin.
    pub fn equilateral_triangle(s: f64) -> Result<Self> {
        Self::polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(s, 0.0),
            Point::new(0.5 * s, 0.5 * 3f64.sqrt() * s),
        ])
    }

    pub fn is_convex(&self) -> bool {
        true
    }

    /// Polygonal view of rectangles and polygons; `None` for disks.
    pub fn as_polygon(&self) -> Option<ConvexPolygon> {
        match self {
            Domain::Rectangle { a, b, origin } => Some(
                ConvexPolygon::new(vec![
                    *origin,
                    origin + Point::new(*a, 0.0),
                    origin + Point::new(*a, *b),
                    origin + Point::new(0.0, *b),
                ])
                .expect("rectangle is a valid polygon"),
            ),
            Domain::ConvexPolygon(p) => Some(p.clone()),
            Domain::Disk { .. } => None,
        }
    }

    pub fn contains(&self, x: Point) -> bool {
        self.signed_distance(x) > 0.0
    }

    /// `dist(x, complement) - dist(x, domain)`.
    pub fn signed_distance(&self, x: Point) -> f64 {
        match self {
            Domain::Rectangle { a, b, origin } => {
                let p = x - origin;
                let dx = (p.x).min(a - p.x);
                let dy = (p.y).min(b - p.y);
                if dx >= 0.0 && dy >= 0.0 {
                    dx.min(dy)
                } else {
                    let ox = (-p.x).max(p.x - a).max(0.0);
                    let oy = (-p.y).max(p.y - b).max(0.0);
                    -(ox * ox + oy * oy).sqrt()
                }
            }
            Domain::ConvexPolygon(p) => p.signed_distance(x),
            Domain::Disk { radius, center } => radius - (x - center).norm(),
        }
    }

    pub fn distance_to_boundary(&self, x: Point) -> f64 {
        self.signed_distance(x).abs()
    }

    /// Gradient of the signed distance with a flag for points where it is not
    /// differentiable (medial axis, disk center).
    pub fn signed_distance_gradient(&self, x: Point) -> (Point, bool) {
        match self {
            Domain::Disk { center, .. } => {
                let v = x - center;
                let r = v.norm();
                if r <= 1e-300 {
                    (Point::new(0.0, 0.0), true)
                } else {
                    (-v / r, false)
                }
            }
            _ => self
                .as_polygon()
                .expect("polygonal domain")
                .signed_distance_gradient(x),
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Domain::Rectangle { a, b, .. } => a * b,
            Domain::ConvexPolygon(p) => p.area(),
            Domain::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            Domain::Rectangle { a, b, .. } => 2.0 * (a + b),
            Domain::ConvexPolygon(p) => p.perimeter(),
            Domain::Disk { radius, .. } => std::f64::consts::TAU * radius,
        }
    }

    pub fn inradius(&self) -> f64 {
        match self {
            Domain::Rectangle { a, b, .. } => 0.5 * a.min(*b),
            Domain::ConvexPolygon(p) => p.chebyshev_center().0,
            Domain::Disk { radius, .. } => *radius,
        }
    }

    pub fn summary(&self) -> GeometrySummary {
        GeometrySummary {
            area: self.area(),
            perimeter: self.perimeter(),
            inradius: self.inradius(),
            dimension: DIM,
        }
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            Domain::Rectangle { a, b, origin } => (*origin, origin + Point::new(*a, *b)),
            Domain::ConvexPolygon(p) => {
                let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for v in p.vertices() {
                    lo = lo.inf(v);
                    hi = hi.sup(v);
                }
                (lo, hi)
            }
            Domain::Disk { radius, center } => (
                center - Point::new(*radius, *radius),
                center + Point::new(*radius, *radius),
            ),
        }
    }

    /// The dilation `x -> s x` (about the origin).
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(validation("scale factor must be positive"));
        }
        match self {
            Domain::Rectangle { a, b, origin } => Self::rectangle_at(a * s, b * s, origin * s),
            Domain::ConvexPolygon(p) => {
                Self::polygon(p.vertices().iter().map(|v| v * s).collect())
            }
            Domain::Disk { radius, center } => Self::disk_at(radius * s, center * s),
        }
    }

    pub fn label(&self) -> String {
        format_domain(self)
    }
}

impl GeometrySummary {
    /// Checks `area/perimeter <= inradius <= d * area/perimeter`.
    pub fn inradius_sandwich(&self, tol: f64) -> bool {
        let ratio = self.area / self.perimeter;
        ratio <= self.inradius * (1.0 + tol) + tol
            && self.inradius <= self.dimension as f64 * ratio * (1.0 + tol) + tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn signed_distance_examples() {
        let sq = Domain::unit_square();
        assert_relative_eq!(sq.signed_distance(Point::new(0.5, 0.5)), 0.5);
        let disk = Domain::disk(1.0).unwrap();
        assert_relative_eq!(disk.signed_distance(Point::new(2.0, 0.0)), -1.0);
        let tri = Domain::equilateral_triangle(1.0).unwrap();
        let centroid = Point::new(0.5, 3f64.sqrt() / 6.0);
        assert_relative_eq!(tri.signed_distance(centroid), 1.0 / (2.0 * 3f64.sqrt()), epsilon = 1e-14);
        // corner region outside the square
        assert_relative_eq!(sq.signed_distance(Point::new(-0.3, -0.4)), -0.5, epsilon = 1e-14);
        assert_eq!(sq.signed_distance(Point::new(1.0, 0.3)), 0.0);
    }

    #[test]
    fn polygon_and_rectangle_distances_agree() {
        let sq = Domain::rectangle_at(2.0, 1.0, Point::new(-0.5, 0.25)).unwrap();
        let poly = Domain::ConvexPolygon(sq.as_polygon().unwrap());
        for &(x, y) in &[(0.0, 0.0), (1.7, 1.3), (-2.0, 3.0), (0.4, 0.5), (1.5, -1.0)] {
            let p = Point::new(x, y);
            assert_relative_eq!(sq.signed_distance(p), poly.signed_distance(p), epsilon = 1e-14);
        }
    }

    #[test]
    fn summaries() {
        let s = Domain::unit_square().summary();
        assert_eq!((s.area, s.perimeter, s.inradius), (1.0, 4.0, 0.5));
        let d = Domain::disk(2.0).unwrap().summary();
        assert_relative_eq!(d.area, 4.0 * std::f64::consts::PI);
        assert_relative_eq!(d.perimeter, 4.0 * std::f64::consts::PI);
        assert_eq!(d.inradius, 2.0);
        let t = Domain::equilateral_triangle(1.0).unwrap().summary();
        assert_relative_eq!(t.area, 3f64.sqrt() / 4.0, epsilon = 1e-15);
        assert_relative_eq!(t.perimeter, 3.0);
        assert_relative_eq!(t.inradius, 1.0 / (2.0 * 3f64.sqrt()), epsilon = 1e-14);
    }

    #[test]
    fn rejects_invalid_domains() {
        assert!(Domain::rectangle(0.0, 1.0).is_err());
        assert!(Domain::disk(-1.0).is_err());
        // clockwise
        assert!(Domain::polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 0.0)
        ])
        .is_err());
        // collinear
        assert!(Domain::polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(1.0, 1.0)
        ])
        .is_err());
        // repeated vertex
        assert!(Domain::polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0)
        ])
        .is_err());
        // degenerate sliver
        assert!(Domain::polygon(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 1e-14)
        ])
        .is_err());
    }

    #[test]
    fn chebyshev_center_of_rectangle_polygon() {
        let p = Domain::rectangle(3.0, 1.0).unwrap().as_polygon().unwrap();
        let (r, c) = p.chebyshev_center();
        assert_relative_eq!(r, 0.5, epsilon = 1e-14);
        assert_relative_eq!(c.y, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn bisection_inradius_matches_exact_enumeration() {
        // 80-gon approximating the unit disk: exact path is skipped above 64 edges
        let n = 80;
        let verts: Vec<Point> = (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                Point::new(a.cos(), a.sin())
            })
            .collect();
        let p = ConvexPolygon::new(verts).unwrap();
        let (r, _) = p.chebyshev_center();
        assert_relative_eq!(r, (std::f64::consts::PI / n as f64).cos(), epsilon = 1e-10);
    }
}
