use nalgebra::{Matrix3, Vector3};
use rand::Rng;

use super::Point;
use crate::error::{validation, Error, Result};
use crate::sampling::block_rng;

/// Largest edge count for which the Chebyshev center is found by exact
/// enumeration of the linear program's vertices.
pub const CHEBYSHEV_EXACT_EDGES: usize = 64;

/// Strictly convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

#[inline]
pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(validation(format!(
                "convex polygon needs at least 3 vertices, got {n}"
            )));
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(validation("polygon vertex is not finite"));
        }
        let scale = vertices
            .iter()
            .map(|v| v.x.abs().max(v.y.abs()))
            .fold(0.0_f64, f64::max)
            .max(1e-300);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            if (b - a).norm() <= 1e-14 * scale {
                return Err(validation(format!("repeated polygon vertex at index {i}")));
            }
        }
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if cross(b - a, c - b) <= 0.0 {
                return Err(validation(format!(
                    "polygon is not strictly convex and counterclockwise at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        let poly = Self { vertices };
        // a star-shaped winding that is locally convex everywhere can still wrap twice
        let turning: f64 = (0..n)
            .map(|i| {
                let e0 = poly.edge_vector(i);
                let e1 = poly.edge_vector((i + 1) % n);
                cross(e0, e1).atan2(e0.dot(&e1))
            })
            .sum();
        if (turning - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(validation("polygon winds more than once"));
        }
        if poly.area() <= 1e-12 * scale * scale {
            return Err(validation("polygon area is numerically zero"));
        }
        Ok(poly)
    }

    /// Convex hull of a point set (monotone chain), collinear points dropped.
    pub fn hull(points: &[Point]) -> Result<Self> {
        let mut pts: Vec<Point> = points.to_vec();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        pts.dedup();
        if pts.len() < 3 {
            return Err(validation("hull needs at least 3 distinct points"));
        }
        let mut lower: Vec<Point> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2
                && cross(lower[lower.len() - 1] - lower[lower.len() - 2], p - lower[lower.len() - 1])
                    <= 0.0
            {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Point> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2
                && cross(upper[upper.len() - 1] - upper[upper.len() - 2], p - upper[upper.len() - 1])
                    <= 0.0
            {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Self::new(lower)
    }

    /// Convex hull of `points` uniform samples from the unit square.
    pub fn random_hull(points: usize, seed: u64) -> Result<Self> {
        if points < 3 {
            return Err(validation("random hull needs at least 3 points"));
        }
        for attempt in 0..64u64 {
            let mut rng = block_rng(seed, attempt);
            let pts: Vec<Point> = (0..points)
                .map(|_| Point::new(rng.random::<f64>(), rng.random::<f64>()))
                .collect();
            if let Ok(p) = Self::hull(&pts) {
                return Ok(p);
            }
        }
        Err(validation("could not draw a non-degenerate random hull"))
    }

    /// Polygon inscribed in the circle of radius 1/2 about (1/2, 1/2) with
    /// `k` vertices at random angles (minimum angular gap enforced).
    pub fn random_inscribed(k: usize, seed: u64) -> Result<Self> {
        if k < 3 {
            return Err(validation("inscribed polygon needs at least 3 vertices"));
        }
        let tau = std::f64::consts::TAU;
        let min_gap = 0.25 * tau / k as f64;
        for attempt in 0..256u64 {
            let mut rng = block_rng(seed, attempt);
            let mut angles: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * tau).collect();
            angles.sort_by(f64::total_cmp);
            let ok = (0..k).all(|i| {
                let next = if i + 1 < k { angles[i + 1] } else { angles[0] + tau };
                let gap = next - angles[i];
                gap > min_gap && gap < 0.5 * tau
            });
            if !ok {
                continue;
            }
            let verts = angles
                .iter()
                .map(|a| Point::new(0.5 + 0.5 * a.cos(), 0.5 + 0.5 * a.sin()))
                .collect();
            if let Ok(p) = Self::new(verts) {
                return Ok(p);
            }
        }
        Err(validation("could not draw a random inscribed polygon"))
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i % self.vertices.len()]
    }

    pub fn edge_vector(&self, i: usize) -> Point {
        self.vertex(i + 1) - self.vertex(i)
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        self.edge_vector(i).norm()
    }

    pub fn tangent(&self, i: usize) -> Point {
        self.edge_vector(i).normalize()
    }

    /// Inward unit normal of edge `i` (left of the counterclockwise edge).
    pub fn inner_normal(&self, i: usize) -> Point {
        let t = self.tangent(i);
        Point::new(-t.y, t.x)
    }

    /// Signed distance of `x` to the supporting line of edge `i`, positive on the inner side.
    pub fn line_distance(&self, i: usize, x: Point) -> f64 {
        self.inner_normal(i).dot(&(x - self.vertex(i)))
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let v0 = self.vertices[0];
        0.5 * (1..n - 1)
            .map(|i| cross(self.vertices[i] - v0, self.vertices[i + 1] - v0))
            .sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.len()).map(|i| self.edge_length(i)).sum()
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len();
        let v0 = self.vertices[0];
        let mut acc = Point::zeros();
        let mut area = 0.0;
        for i in 1..n - 1 {
            let a = cross(self.vertices[i] - v0, self.vertices[i + 1] - v0);
            acc += a * (v0 + self.vertices[i] + self.vertices[i + 1]) / 3.0;
            area += a;
        }
        acc / area
    }

    pub fn contains(&self, x: Point) -> bool {
        (0..self.len()).all(|i| self.line_distance(i, x) > 0.0)
    }

    /// Nearest point on edge `i` (segment) to `x` and its arclength parameter.
    pub fn project_onto_edge(&self, i: usize, x: Point) -> (Point, f64) {
        let a = self.vertex(i);
        let e = self.edge_vector(i);
        let len2 = e.norm_squared();
        let s = ((x - a).dot(&e) / len2).clamp(0.0, 1.0);
        (a + s * e, s * len2.sqrt())
    }

    pub fn signed_distance(&self, x: Point) -> f64 {
        let inner = (0..self.len())
            .map(|i| self.line_distance(i, x))
            .fold(f64::INFINITY, f64::min);
        if inner >= 0.0 {
            inner
        } else {
            -(0..self.len())
                .map(|i| (x - self.project_onto_edge(i, x).0).norm())
                .fold(f64::INFINITY, f64::min)
        }
    }

    /// Gradient of the signed distance; the flag is set where the nearest
    /// boundary feature is not unique (medial axis).
    pub fn signed_distance_gradient(&self, x: Point) -> (Point, bool) {
        let n = self.len();
        let dists: Vec<f64> = (0..n).map(|i| self.line_distance(i, x)).collect();
        let inner = dists.iter().copied().fold(f64::INFINITY, f64::min);
        if inner >= 0.0 {
            let best = (0..n)
                .min_by(|&a, &b| dists[a].total_cmp(&dists[b]))
                .unwrap_or(0);
            let ties = dists.iter().filter(|&&d| d - inner <= 1e-12).count();
            (self.inner_normal(best), ties > 1)
        } else {
            let mut best = (f64::INFINITY, Point::zeros());
            let mut second = f64::INFINITY;
            for i in 0..n {
                let q = self.project_onto_edge(i, x).0;
                let d = (x - q).norm();
                if d < best.0 {
                    second = best.0;
                    best = (d, q);
                } else if d < second {
                    second = d;
                }
            }
            let grad = -(x - best.1) / best.0;
            // the two edges of a vertex share the nearest point; only distinct points count
            let ambiguous = (second - best.0).abs() <= 1e-12 && {
                let qs: Vec<Point> = (0..n)
                    .map(|i| self.project_onto_edge(i, x).0)
                    .filter(|q| ((x - q).norm() - best.0).abs() <= 1e-12)
                    .collect();
                qs.iter().any(|q| (q - best.1).norm() > 1e-12)
            };
            (grad, ambiguous)
        }
    }

    /// Inradius and Chebyshev center.
    pub fn chebyshev_center(&self) -> (f64, Point) {
        if self.len() <= CHEBYSHEV_EXACT_EDGES {
            self.chebyshev_exact()
        } else {
            self.chebyshev_bisection()
        }
    }

    // Optimal vertex of max r s.t. n_i.x - c_i >= r: three constraints are active.
    fn chebyshev_exact(&self) -> (f64, Point) {
        let n = self.len();
        let normals: Vec<Point> = (0..n).map(|i| self.inner_normal(i)).collect();
        let offsets: Vec<f64> = (0..n).map(|i| normals[i].dot(&self.vertex(i))).collect();
        let scale = self.perimeter();
        let mut best = (f64::NEG_INFINITY, self.centroid());
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let m = Matrix3::new(
                        normals[i].x, normals[i].y, -1.0,
                        normals[j].x, normals[j].y, -1.0,
                        normals[k].x, normals[k].y, -1.0,
                    );
                    let rhs = Vector3::new(offsets[i], offsets[j], offsets[k]);
                    let Some(sol) = m.lu().solve(&rhs) else { continue };
                    let (x, r) = (Point::new(sol[0], sol[1]), sol[2]);
                    if r <= best.0 {
                        continue;
                    }
                    let feasible = (0..n)
                        .all(|m| normals[m].dot(&x) - offsets[m] >= r - 1e-12 * scale);
                    if feasible {
                        best = (r, x);
                    }
                }
            }
        }
        best
    }

    fn chebyshev_bisection(&self) -> (f64, Point) {
        let (mut lo, mut hi) = (0.0, self.area() / self.perimeter() * 2.0 + 1e-12);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.clip_inward(mid).is_some() {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        let center = self
            .clip_inward(lo * (1.0 - 1e-9))
            .map(|p| p.centroid())
            .unwrap_or_else(|| self.centroid());
        (lo, center)
    }

    /// Intersection of the inward-offset half-planes, `None` if (numerically) empty.
    pub(crate) fn clip_inward(&self, t: f64) -> Option<ConvexPolygon> {
        let mut poly: Vec<Point> = self.vertices.clone();
        let scale = self.perimeter();
        for i in 0..self.len() {
            let nrm = self.inner_normal(i);
            let c = nrm.dot(&self.vertex(i)) + t;
            poly = clip_halfplane(&poly, nrm, c);
            if poly.len() < 3 {
                return None;
            }
        }
        let cleaned = clean_ring(poly, 1e-13 * scale);
        if cleaned.len() < 3 {
            return None;
        }
        ConvexPolygon::new(cleaned).ok()
    }
}

// Keeps {x : n.x >= c} of a convex ring.
fn clip_halfplane(ring: &[Point], n: Point, c: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(ring.len() + 1);
    let m = ring.len();
    for i in 0..m {
        let a = ring[i];
        let b = ring[(i + 1) % m];
        let fa = n.dot(&a) - c;
        let fb = n.dot(&b) - c;
        if fa >= 0.0 {
            out.push(a);
        }
        if (fa >= 0.0) != (fb >= 0.0) {
            let s = fa / (fa - fb);
            out.push(a + s * (b - a));
        }
    }
    out
}

// Drops near-duplicate and collinear vertices.
fn clean_ring(mut ring: Vec<Point>, tol: f64) -> Vec<Point> {
    loop {
        let m = ring.len();
        if m < 3 {
            return ring;
        }
        let mut removed = false;
        for i in 0..m {
            let a = ring[(i + m - 1) % m];
            let b = ring[i];
            let c = ring[(i + 1) % m];
            let degenerate = (b - a).norm() <= tol || cross(b - a, c - b) <= tol * (c - a).norm();
            if degenerate {
                ring.remove(i);
                removed = true;
                break;
            }
        }
        if !removed {
            return ring;
        }
    }
}

impl TryFrom<Vec<Point>> for ConvexPolygon {
    type Error = Error;

    fn try_from(v: Vec<Point>) -> Result<Self> {
        Self::new(v)
    }
}
