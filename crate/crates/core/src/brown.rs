//! Good boundary points, truncated two-sided cones and the good region.
//!
//! A boundary point `p` is `(eps, r)`-good when every boundary point `x` with
//! `0 < |x - p| < r` satisfies `|(x - p).nu(p)| < eps |x - p|`. The cone
//! `Gamma(p)` is `{|(x - p).nu| > sqrt(1 - eps^2)|x - p|}` cut off at radius
//! `r/2`, and the good region is the union of these cones over good points.

use rand::Rng;

use crate::error::{validation, Error, Result};
use crate::geometry::{shell_volume, theta, ConvexPolygon, Domain, Point, Side};
use crate::sampling::{mc_means, Estimate, SampleRng};

/// Good intervals are resolved to this fraction of the perimeter.
pub const BISECTION_TOL: f64 = 1e-12;
/// Predicate samples per edge before bisection.
const EDGE_SAMPLES: usize = 128;
/// Sweep density of the brute-force good-region search, per unit perimeter.
pub const SWEEP_DENSITY: f64 = 2048.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeParams {
    pub epsilon: f64,
    pub r: f64,
}

impl ConeParams {
    pub fn new(epsilon: f64, r: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(validation(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(validation(format!("cone radius must be positive, got {r}")));
        }
        Ok(Self { epsilon, r })
    }

    fn cos_aperture(&self) -> f64 {
        (1.0 - self.epsilon * self.epsilon).max(0.0).sqrt()
    }

    /// Membership of `u` in `Gamma(p)` for a point with inner normal `normal`.
    pub fn in_cone(&self, p: Point, normal: Point, u: Point) -> bool {
        let w = u - p;
        let n = w.norm();
        n > 0.0 && n < 0.5 * self.r && w.dot(&normal).abs() > self.cos_aperture() * n
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryLocation {
    /// Arclength from the start vertex of the edge.
    Edge { index: usize, arclength: f64 },
    /// Polar angle about the disk center.
    Angle(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub position: Point,
    pub normal: Point,
    pub location: BoundaryLocation,
}

enum Shape {
    Polygon(ConvexPolygon),
    Disk { radius: f64, center: Point },
}

fn shape(domain: &Domain) -> Shape {
    match domain {
        Domain::Disk { radius, center } => Shape::Disk {
            radius: *radius,
            center: *center,
        },
        _ => Shape::Polygon(domain.as_polygon().expect("polygonal domain")),
    }
}

/// Boundary point at a location, with its inner normal.
pub fn boundary_point(domain: &Domain, location: BoundaryLocation) -> Result<BoundaryPoint> {
    match (shape(domain), location) {
        (Shape::Polygon(p), BoundaryLocation::Edge { index, arclength }) => {
            if index >= p.len() {
                return Err(validation(format!("edge index {index} out of range")));
            }
            let len = p.edge_length(index);
            if !(arclength > 0.0 && arclength < len) {
                return Err(Error::UndefinedNormal(format!(
                    "edge {index} at arclength {arclength} (edge length {len})"
                )));
            }
            Ok(BoundaryPoint {
                position: p.vertex(index) + arclength * p.tangent(index),
                normal: p.inner_normal(index),
                location,
            })
        }
        (Shape::Disk { radius, center }, BoundaryLocation::Angle(a)) => {
            let dir = Point::new(a.cos(), a.sin());
            Ok(BoundaryPoint {
                position: center + radius * dir,
                normal: -dir,
                location,
            })
        }
        _ => Err(validation("boundary location does not match the domain kind")),
    }
}

/// Boundary point at arclength `s` along the whole boundary, counterclockwise
/// from the first vertex (or from angle 0 for disks).
pub fn boundary_point_at(domain: &Domain, s: f64) -> Result<BoundaryPoint> {
    let s = s.rem_euclid(domain.perimeter());
    match shape(domain) {
        Shape::Polygon(p) => {
            let mut rest = s;
            for i in 0..p.len() {
                let len = p.edge_length(i);
                if rest < len {
                    return boundary_point(
                        domain,
                        BoundaryLocation::Edge {
                            index: i,
                            arclength: rest,
                        },
                    );
                }
                rest -= len;
            }
            Err(Error::UndefinedNormal("vertex at the end of the boundary".into()))
        }
        Shape::Disk { radius, .. } => boundary_point(domain, BoundaryLocation::Angle(s / radius)),
    }
}

// Interval of lambda in [0, 1] where g0 + g1 * lambda >= 0, intersected with (lo, hi).
fn clip_linear(lo: f64, hi: f64, g0: f64, g1: f64) -> (f64, f64) {
    if g1 == 0.0 {
        if g0 >= 0.0 {
            (lo, hi)
        } else {
            (1.0, 0.0)
        }
    } else if g1 > 0.0 {
        (lo.max(-g0 / g1), hi)
    } else {
        (lo, hi.min(-g0 / g1))
    }
}

fn polygon_point_is_good(poly: &ConvexPolygon, edge: usize, p: Point, cone: &ConeParams) -> bool {
    let tau = poly.tangent(edge);
    let nu = poly.inner_normal(edge);
    let c = cone.cos_aperture();
    let eps = cone.epsilon;
    let r2 = cone.r * cone.r;
    for j in 0..poly.len() {
        if j == edge {
            continue;
        }
        let a0 = poly.vertex(j) - p;
        let dv = poly.edge_vector(j);
        // w(lambda) = a0 + lambda dv in the (tau, nu) frame
        let (ta0, ta1) = (a0.dot(&tau), dv.dot(&tau));
        let (nb0, nb1) = (a0.dot(&nu), dv.dot(&nu));
        // open ball: |w|^2 < r^2
        let qa = dv.norm_squared();
        let qb = 2.0 * a0.dot(&dv);
        let qc = a0.norm_squared() - r2;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc <= 0.0 {
            continue;
        }
        let sq = disc.sqrt();
        let (l1, l2) = ((-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa));
        if l2 <= 0.0 || l1 >= 1.0 {
            continue;
        }
        // the closed forbidden cone is two half-cones; sign s picks the side of the normal
        for s in [1.0, -1.0] {
            let (mut lo, mut hi) = (0.0, 1.0);
            (lo, hi) = clip_linear(lo, hi, s * nb0, s * nb1);
            (lo, hi) = clip_linear(lo, hi, s * c * nb0 - eps * ta0, s * c * nb1 - eps * ta1);
            (lo, hi) = clip_linear(lo, hi, s * c * nb0 + eps * ta0, s * c * nb1 + eps * ta1);
            if lo <= hi && lo < l2 && hi > l1 {
                return false;
            }
        }
    }
    true
}

/// Exact goodness predicate; vertices have no normal.
pub fn is_good_point(domain: &Domain, p: &BoundaryPoint, cone: &ConeParams) -> Result<bool> {
    match (shape(domain), p.location) {
        (Shape::Polygon(poly), BoundaryLocation::Edge { index, arclength }) => {
            let q = boundary_point(domain, BoundaryLocation::Edge { index, arclength })?;
            Ok(polygon_point_is_good(&poly, index, q.position, cone))
        }
        (Shape::Disk { radius, .. }, BoundaryLocation::Angle(_)) => Ok(disk_is_good(radius, cone)),
        _ => Err(validation("boundary location does not match the domain kind")),
    }
}

// A chord of length rho leaves the tangent line by rho^2/(2R), so the cone is
// met exactly from rho = 2 eps R on.
fn disk_is_good(radius: f64, cone: &ConeParams) -> bool {
    cone.r <= 2.0 * cone.epsilon * radius
}

/// Per-boundary goodness data for fixed cone parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GoodPointField {
    pub domain: Domain,
    pub cone: ConeParams,
    /// Good arclength intervals per edge (empty for disks).
    pub good_intervals: Vec<Vec<(f64, f64)>>,
    /// Whether every disk boundary point is good (unused for polygons).
    pub disk_good: bool,
    pub mu: f64,
}

impl GoodPointField {
    pub fn new(domain: &Domain, cone: ConeParams) -> Self {
        match shape(domain) {
            Shape::Disk { radius, .. } => {
                let good = disk_is_good(radius, &cone);
                Self {
                    domain: domain.clone(),
                    cone,
                    good_intervals: Vec::new(),
                    disk_good: good,
                    mu: if good { 0.0 } else { 1.0 },
                }
            }
            Shape::Polygon(poly) => {
                let tol = BISECTION_TOL * poly.perimeter();
                let intervals: Vec<Vec<(f64, f64)>> = (0..poly.len())
                    .map(|i| edge_good_intervals(&poly, i, &cone, tol))
                    .collect();
                let good: f64 = intervals.iter().flatten().map(|(a, b)| b - a).sum();
                Self {
                    domain: domain.clone(),
                    cone,
                    good_intervals: intervals,
                    disk_good: false,
                    mu: (1.0 - good / poly.perimeter()).clamp(0.0, 1.0),
                }
            }
        }
    }

    /// Total length of the good set.
    pub fn good_length(&self) -> f64 {
        (1.0 - self.mu) * self.domain.perimeter()
    }

    /// Uniform sample of a good boundary point, `None` if there are none.
    pub fn sample_good_point(&self, rng: &mut SampleRng) -> Option<BoundaryPoint> {
        if self.mu >= 1.0 {
            return None;
        }
        match shape(&self.domain) {
            Shape::Disk { .. } => {
                let a = std::f64::consts::TAU * rng.random::<f64>();
                boundary_point(&self.domain, BoundaryLocation::Angle(a)).ok()
            }
            Shape::Polygon(_) => {
                let total: f64 = self.good_intervals.iter().flatten().map(|(a, b)| b - a).sum();
                let mut x = total * rng.random::<f64>();
                for (i, ivs) in self.good_intervals.iter().enumerate() {
                    for &(a, b) in ivs {
                        if x < b - a {
                            let arclength = (a + x).clamp(a, b);
                            return boundary_point(
                                &self.domain,
                                BoundaryLocation::Edge { index: i, arclength },
                            )
                            .ok();
                        }
                        x -= b - a;
                    }
                }
                None
            }
        }
    }

    /// A good point whose cone contains `u`, found exactly.
    pub fn witness(&self, u: Point) -> Option<BoundaryPoint> {
        let cone = &self.cone;
        match shape(&self.domain) {
            Shape::Disk { center, .. } => {
                if !self.disk_good {
                    return None;
                }
                let v = u - center;
                // the radial point is both the nearest one and perfectly aligned
                let angle = if v.norm() == 0.0 { 0.0 } else { v.y.atan2(v.x) };
                let p = boundary_point(&self.domain, BoundaryLocation::Angle(angle)).ok()?;
                cone.in_cone(p.position, p.normal, u).then_some(p)
            }
            Shape::Polygon(poly) => {
                let half = 0.5 * cone.r;
                let c = cone.cos_aperture();
                for (i, ivs) in self.good_intervals.iter().enumerate() {
                    let b = poly.line_distance(i, u);
                    if b == 0.0 || b.abs() >= half {
                        continue;
                    }
                    let su = (u - poly.vertex(i)).dot(&poly.tangent(i));
                    let by_aperture = if c > 0.0 { cone.epsilon / c * b.abs() } else { f64::INFINITY };
                    let m = by_aperture.min((half * half - b * b).sqrt());
                    for &(lo, hi) in ivs {
                        let s = su.clamp(lo, hi);
                        if (s - su).abs() < m {
                            let p = boundary_point(
                                &self.domain,
                                BoundaryLocation::Edge { index: i, arclength: s },
                            )
                            .ok()?;
                            if cone.in_cone(p.position, p.normal, u) {
                                return Some(p);
                            }
                        }
                    }
                }
                None
            }
        }
    }
}

// Good sub-intervals of one edge: sampled predicate, then bisection at every sign change.
fn edge_good_intervals(poly: &ConvexPolygon, edge: usize, cone: &ConeParams, tol: f64) -> Vec<(f64, f64)> {
    let len = poly.edge_length(edge);
    let a = poly.vertex(edge);
    let tau = poly.tangent(edge);
    let good = |s: f64| s > 0.0 && s < len && polygon_point_is_good(poly, edge, a + s * tau, cone);
    let samples: Vec<(f64, bool)> = (0..=EDGE_SAMPLES)
        .map(|k| {
            let s = len * k as f64 / EDGE_SAMPLES as f64;
            (s, good(s))
        })
        .collect();
    let boundary = |mut lo: f64, mut hi: f64, lo_good: bool| {
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if good(mid) == lo_good {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut out = Vec::new();
    let mut start = None;
    for w in samples.windows(2) {
        let ((s0, g0), (s1, g1)) = (w[0], w[1]);
        if g0 != g1 {
            let x = boundary(s0, s1, g0);
            if g1 {
                start = Some(x);
            } else if let Some(st) = start.take() {
                out.push((st, x));
            }
        }
    }
    if let Some(st) = start {
        out.push((st, len));
    }
    out
}

pub fn mu(domain: &Domain, cone: ConeParams) -> f64 {
    GoodPointField::new(domain, cone).mu
}

/// Whether `u` lies in the good region, with a witness good point.
pub fn in_good_region(domain: &Domain, u: Point, cone: ConeParams) -> Option<BoundaryPoint> {
    GoodPointField::new(domain, cone).witness(u)
}

/// Brute-force good-region search over boundary samples at `density` points
/// per unit perimeter; `strict` doubles the density until two consecutive
/// refinements agree.
pub fn in_good_region_sweep(
    domain: &Domain,
    u: Point,
    cone: ConeParams,
    density: f64,
    strict: bool,
) -> Option<BoundaryPoint> {
    let sweep = |density: f64| {
        let n = (density * domain.perimeter()).ceil().max(16.0) as usize;
        (0..n).find_map(|k| {
            let s = domain.perimeter() * (k as f64 + 0.5) / n as f64;
            let p = boundary_point_at(domain, s).ok()?;
            (is_good_point(domain, &p, &cone).ok()? && cone.in_cone(p.position, p.normal, u)).then_some(p)
        })
    };
    if !strict {
        return sweep(density);
    }
    let mut d = density;
    let mut prev = sweep(d).is_some();
    let mut stable = 0;
    while stable < 2 && d < density * 64.0 {
        d *= 2.0;
        let now = sweep(d).is_some();
        stable = if now == prev { stable + 1 } else { 0 };
        prev = now;
    }
    sweep(d)
}

/// Monte Carlo collar volumes split by membership in the good region.
#[derive(Debug, Clone, PartialEq)]
pub struct BadShellReport {
    pub s: f64,
    pub cone: ConeParams,
    pub mu: f64,
    pub theta_bar: f64,
    /// Exact volume of `{dist(u, boundary) < s}`.
    pub collar_volume: f64,
    pub bad_volume: Estimate,
    pub good_volume: Estimate,
    /// `2 s (mu + theta_bar(s) + eps^2) P`.
    pub bound_shell: f64,
    /// `P s r / (eps r_in)`, to be multiplied by a fitted constant.
    pub explicit_shape: f64,
    /// Whether `r < eps r_in` and `s <= r/2`, where the explicit convex bound applies.
    pub explicit_applies: bool,
}

impl BadShellReport {
    /// Estimate within the shell bound up to `k` standard errors.
    pub fn within_shell_bound(&self, k: f64) -> bool {
        self.bad_volume.value <= self.bound_shell + k * self.bad_volume.stderr
    }

    /// Estimate within `c * explicit_shape` up to `k` standard errors.
    pub fn within_explicit_bound(&self, c: f64, k: f64) -> bool {
        self.bad_volume.value <= c * self.explicit_shape + k * self.bad_volume.stderr
    }

    pub fn fitted_constant(&self) -> f64 {
        self.bad_volume.value / self.explicit_shape
    }
}

/// Rejection-samples `samples` points of the collar `{dist(u, boundary) < s}`
/// and estimates the part outside the good region.
/// Collar width, as a fraction of `r`, at which the explicit constant is
/// fitted. The bad volume is concave in `s`, so `bad / shape` is largest as
/// `s -> 0` and a constant fitted this far down covers every coarser width.
pub const EXPLICIT_FIT_FRACTION: f64 = 1.0 / 200.0;

pub fn bad_shell_volume(
    domain: &Domain,
    s: f64,
    cone: ConeParams,
    samples: u64,
    seed: u64,
) -> Result<BadShellReport> {
    if !(s > 0.0) {
        return Err(validation(format!("collar width must be positive, got {s}")));
    }
    if samples < 2 {
        return Err(validation("Monte Carlo needs at least 2 samples"));
    }
    let summary = domain.summary();
    let field = GoodPointField::new(domain, cone);
    let collar_volume = shell_volume(domain, s, Side::Inner) + shell_volume(domain, s, Side::Outer);
    let (lo, hi) = crate::geometry::padded_box(domain, s);
    let [bad, good] = mc_means(seed, samples, |rng| loop {
        let u = crate::geometry::sample_box(rng, lo, hi);
        if domain.distance_to_boundary(u) < s {
            let b = field.witness(u).is_none() as u8 as f64;
            break [b, 1.0 - b];
        }
    });
    let theta_bar = theta(domain, s.min(summary.inradius))?.theta_bar;
    Ok(BadShellReport {
        s,
        cone,
        mu: field.mu,
        theta_bar,
        collar_volume,
        bad_volume: bad.scaled(collar_volume),
        good_volume: good.scaled(collar_volume),
        bound_shell: 2.0 * s * (field.mu + theta_bar + cone.epsilon * cone.epsilon) * summary.perimeter,
        explicit_shape: summary.perimeter * s * cone.r / (cone.epsilon * summary.inradius),
        explicit_applies: cone.r < cone.epsilon * summary.inradius && s <= 0.5 * cone.r,
    })
}

/// Outcome of sampling cones of good points and comparing `|u - p|` with
/// `dist(u, boundary)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexProximityReport {
    pub samples: u64,
    /// Violations of `|u - p| <= 2 dist(u, boundary)`.
    pub violations: u64,
    /// Violations of `(1 - 2 eps^2)|u - p| <= dist(u, boundary)`.
    pub sharp_violations: u64,
    /// Largest observed `|u - p| / dist(u, boundary)`.
    pub worst_ratio: f64,
    pub counterexample: Option<(Point, Point)>,
}

impl VertexProximityReport {
    pub fn pass(&self) -> bool {
        self.violations == 0 && self.sharp_violations == 0
    }
}

/// Samples `u` uniformly in `Gamma(p)` for uniformly sampled good `p`.
pub fn check_vertex_proximity(
    domain: &Domain,
    cone: ConeParams,
    samples: u64,
    seed: u64,
) -> Result<VertexProximityReport> {
    if cone.epsilon > 0.5 {
        return Err(validation(format!(
            "vertex proximity needs epsilon <= 1/2, got {}",
            cone.epsilon
        )));
    }
    let field = GoodPointField::new(domain, cone);
    if field.mu >= 1.0 {
        return Err(validation("no good boundary points for these cone parameters"));
    }
    let half_angle = cone.epsilon.asin();
    let sharp = 1.0 - 2.0 * cone.epsilon * cone.epsilon;
    let draws: Vec<(Point, Point, f64)> = crate::sampling::mc_collect(seed, samples, |rng| {
        let p = field.sample_good_point(rng).expect("good set is nonempty");
        let rho = 0.5 * cone.r * rng.random::<f64>().sqrt();
        let phi = half_angle * (2.0 * rng.random::<f64>() - 1.0);
        let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let axis = side * p.normal;
        let perp = Point::new(-axis.y, axis.x);
        let u = p.position + rho * (phi.cos() * axis + phi.sin() * perp);
        (u, p.position, domain.distance_to_boundary(u))
    });
    let mut rep = VertexProximityReport {
        samples,
        violations: 0,
        sharp_violations: 0,
        worst_ratio: 0.0,
        counterexample: None,
    };
    for (u, p, dist) in draws {
        let d = (u - p).norm();
        if d == 0.0 {
            continue;
        }
        rep.worst_ratio = rep.worst_ratio.max(d / dist);
        let bad = d > 2.0 * dist * (1.0 + 1e-12);
        let bad_sharp = sharp * d > dist * (1.0 + 1e-12);
        rep.violations += bad as u64;
        rep.sharp_violations += bad_sharp as u64;
        if (bad || bad_sharp) && rep.counterexample.is_none() {
            rep.counterexample = Some((u, p));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sq() -> Domain {
        Domain::unit_square()
    }

    fn edge0(s: f64) -> BoundaryPoint {
        boundary_point(&sq(), BoundaryLocation::Edge { index: 0, arclength: s }).unwrap()
    }

    #[test]
    fn good_point_examples() {
        let c = ConeParams::new(0.3, 0.4).unwrap();
        assert!(is_good_point(&sq(), &edge0(0.5), &c).unwrap());
        assert!(!is_good_point(&sq(), &edge0(0.05), &c).unwrap());
        let disk = Domain::disk(1.0).unwrap();
        let p = boundary_point(&disk, BoundaryLocation::Angle(1.0)).unwrap();
        assert!(is_good_point(&disk, &p, &ConeParams::new(0.3, 0.5).unwrap()).unwrap());
        assert!(matches!(
            boundary_point(&sq(), BoundaryLocation::Edge { index: 0, arclength: 0.0 }),
            Err(Error::UndefinedNormal(_))
        ));
    }

    #[test]
    fn corner_threshold_is_r_sqrt_one_minus_eps_squared() {
        let c = ConeParams::new(0.6, 0.2).unwrap();
        let edge = 0.2 * 0.8;
        assert!(!is_good_point(&sq(), &edge0(edge - 1e-9), &c).unwrap());
        assert!(is_good_point(&sq(), &edge0(edge + 1e-9), &c).unwrap());
    }

    #[test]
    fn mu_examples() {
        assert_relative_eq!(mu(&sq(), ConeParams::new(0.6, 0.2).unwrap()), 0.32, epsilon = 1e-10);
        let disk = Domain::disk(1.0).unwrap();
        assert_eq!(mu(&disk, ConeParams::new(0.3, 0.5).unwrap()), 0.0);
        assert_eq!(mu(&disk, ConeParams::new(0.2, 0.5).unwrap()), 1.0);
    }

    #[test]
    fn good_region_examples() {
        let w = in_good_region(&sq(), Point::new(0.5, 0.02), ConeParams::new(0.5, 0.2).unwrap()).unwrap();
        assert_relative_eq!(w.position, Point::new(0.5, 0.0), epsilon = 1e-15);
        assert!(in_good_region(&sq(), Point::new(0.5, 0.5), ConeParams::new(0.5, 0.2).unwrap()).is_none());
        let c = ConeParams::new(0.6, 0.4).unwrap();
        assert!(in_good_region(&sq(), Point::new(0.01, 0.01), c).is_none());
        assert!(in_good_region_sweep(&sq(), Point::new(0.01, 0.01), c, SWEEP_DENSITY, true).is_none());
    }

    #[test]
    fn disk_collar_is_all_good() {
        let disk = Domain::disk(1.0).unwrap();
        let rep = bad_shell_volume(&disk, 0.01, ConeParams::new(0.3, 0.5).unwrap(), 20_000, 1).unwrap();
        assert_eq!(rep.bad_volume.value, 0.0);
    }

    #[test]
    fn square_bad_shell_below_shell_bound() {
        let c = ConeParams::new(0.6, 0.2).unwrap();
        let rep = bad_shell_volume(&sq(), 0.01, c, 20_000, 4).unwrap();
        assert_relative_eq!(rep.mu, 0.32, epsilon = 1e-10);
        assert!(rep.within_shell_bound(4.0), "{rep:?}");
        assert!(rep.explicit_applies);
    }

    #[test]
    fn vertex_proximity_on_square() {
        let rep = check_vertex_proximity(&sq(), ConeParams::new(0.5, 0.2).unwrap(), 20_000, 9).unwrap();
        assert!(rep.pass(), "{rep:?}");
        assert!(rep.worst_ratio <= 2.0);
        assert!(check_vertex_proximity(&sq(), ConeParams::new(0.6, 0.2).unwrap(), 10, 0).is_err());
    }
}
