use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use super::{Domain, Point, DIM};
use crate::error::{validation, Error, Result};
use crate::sampling::{block_rng, Estimate, BLOCK};

pub const THETA_BAR_POINTS_PER_DECADE: u32 = 64;
/// The smallest grid point for `theta_bar(t)` is `t * 10^-THETA_BAR_DECADES`.
pub const THETA_BAR_DECADES: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `{u in domain : dist(u, boundary) < t}`
    Inner,
    /// `{u outside : dist(u, domain) < t}`
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaMethod {
    Exact,
    MonteCarlo { seed: u64, samples: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaReport {
    pub t: f64,
    pub theta_inner: f64,
    pub theta_outer: f64,
    pub theta_bar: f64,
    pub method: ThetaMethod,
}

/// `Omega_t = {u : dist(u, complement) > t}`.
pub fn inner_parallel_set(domain: &Domain, t: f64) -> Result<Domain> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(validation(format!("offset distance must be nonnegative, got {t}")));
    }
    let inradius = domain.inradius();
    if t >= inradius {
        return Err(Error::EmptySet { t, inradius });
    }
    if t == 0.0 {
        return Ok(domain.clone());
    }
    match domain {
        Domain::Rectangle { a, b, origin } => {
            Domain::rectangle_at(a - 2.0 * t, b - 2.0 * t, origin + Point::new(t, t))
        }
        Domain::ConvexPolygon(p) => p
            .clip_inward(t)
            .map(Domain::ConvexPolygon)
            .ok_or(Error::EmptySet { t, inradius }),
        Domain::Disk { radius, center } => Domain::disk_at(radius - t, *center),
    }
}

/// Perimeter of the inner parallel set, zero once it is empty.
pub(crate) fn parallel_set_perimeter(domain: &Domain, t: f64) -> f64 {
    match inner_parallel_set(domain, t) {
        Ok(d) => d.perimeter(),
        Err(_) => 0.0,
    }
}

/// Exact collar area.
pub fn shell_volume(domain: &Domain, t: f64, side: Side) -> f64 {
    let t = t.max(0.0);
    match side {
        // Steiner formula for convex sets in the plane
        Side::Outer => domain.perimeter() * t + PI * t * t,
        Side::Inner => {
            let area = domain.area();
            match domain {
                Domain::Rectangle { a, b, .. } => {
                    if 2.0 * t >= a.min(*b) {
                        area
                    } else {
                        area - (a - 2.0 * t) * (b - 2.0 * t)
                    }
                }
                Domain::Disk { radius, .. } => {
                    let r = (radius - t).max(0.0);
                    PI * (radius * radius - r * r)
                }
                Domain::ConvexPolygon(_) => match inner_parallel_set(domain, t) {
                    Ok(inner) => area - inner.area(),
                    Err(_) => area,
                },
            }
        }
    }
}

fn in_shell(delta: f64, t: f64, side: Side) -> bool {
    match side {
        Side::Inner => delta > 0.0 && delta < t,
        Side::Outer => delta <= 0.0 && delta > -t,
    }
}

/// Uniform sampling box containing both collars of width `t`.
pub(crate) fn padded_box(domain: &Domain, t: f64) -> (Point, Point) {
    let (lo, hi) = domain.bounding_box();
    (lo - Point::new(t, t), hi + Point::new(t, t))
}

pub(crate) fn sample_box(rng: &mut impl Rng, lo: Point, hi: Point) -> Point {
    Point::new(
        lo.x + (hi.x - lo.x) * rng.random::<f64>(),
        lo.y + (hi.y - lo.y) * rng.random::<f64>(),
    )
}

/// Monte Carlo collar area by uniform sampling of the padded bounding box.
pub fn shell_volume_monte_carlo(
    domain: &Domain,
    t: f64,
    side: Side,
    samples: u64,
    seed: u64,
) -> Result<Estimate> {
    if samples < 2 {
        return Err(validation("Monte Carlo needs at least 2 samples"));
    }
    let (lo, hi) = padded_box(domain, t.max(0.0));
    let box_area = (hi.x - lo.x) * (hi.y - lo.y);
    let [est] = crate::sampling::mc_means(seed, samples, |rng| {
        let x = sample_box(rng, lo, hi);
        [in_shell(domain.signed_distance(x), t, side) as u8 as f64]
    });
    Ok(est.scaled(box_area))
}

/// Grid used for the supremum in `theta_bar(t)`: the points `10^(k/64)` in
/// `[t * 1e-6, t]`, plus `t` itself.
pub fn theta_grid(t: f64) -> Vec<f64> {
    if !(t > 0.0) {
        return Vec::new();
    }
    let per = THETA_BAR_POINTS_PER_DECADE as f64;
    let lo = t * 10f64.powi(-(THETA_BAR_DECADES as i32));
    let k_lo = (lo.log10() * per).ceil() as i64;
    let k_hi = (t.log10() * per).floor() as i64;
    let mut grid: Vec<f64> = (k_lo..=k_hi)
        .map(|k| 10f64.powf(k as f64 / per))
        .filter(|&s| s >= lo && s <= t)
        .collect();
    if grid.last().is_none_or(|&s| s < t) {
        grid.push(t);
    }
    grid
}

fn theta_pair(domain: &Domain, s: f64) -> (f64, f64) {
    let tp = s * domain.perimeter();
    (
        shell_volume(domain, s, Side::Inner) / tp - 1.0,
        shell_volume(domain, s, Side::Outer) / tp - 1.0,
    )
}

fn check_theta_range(domain: &Domain, t: f64) -> Result<()> {
    let inradius = domain.inradius();
    if !(t >= 0.0) || t > inradius * (1.0 + 1e-12) {
        return Err(validation(format!(
            "theta needs 0 <= t <= inradius = {inradius}, got {t}"
        )));
    }
    Ok(())
}

/// Minkowski deficits at `t` from exact shell volumes.
pub fn theta(domain: &Domain, t: f64) -> Result<ThetaReport> {
    check_theta_range(domain, t)?;
    if t == 0.0 {
        return Ok(ThetaReport {
            t,
            theta_inner: 0.0,
            theta_outer: 0.0,
            theta_bar: 0.0,
            method: ThetaMethod::Exact,
        });
    }
    let (theta_inner, theta_outer) = theta_pair(domain, t);
    let (mut sup_in, mut sup_out) = (0.0_f64, 0.0_f64);
    for s in theta_grid(t) {
        let (i, o) = theta_pair(domain, s);
        sup_in = sup_in.max(i.abs());
        sup_out = sup_out.max(o.abs());
    }
    Ok(ThetaReport {
        t,
        theta_inner,
        theta_outer,
        theta_bar: 0.5 * (sup_in + sup_out),
        method: ThetaMethod::Exact,
    })
}

/// Minkowski deficits from one Monte Carlo sample of the `t`-collar; every grid
/// point of the supremum reuses the same samples.
pub fn theta_monte_carlo(domain: &Domain, t: f64, samples: u64, seed: u64) -> Result<ThetaReport> {
    check_theta_range(domain, t)?;
    let method = ThetaMethod::MonteCarlo { seed, samples };
    if t == 0.0 {
        return Ok(ThetaReport {
            t,
            theta_inner: 0.0,
            theta_outer: 0.0,
            theta_bar: 0.0,
            method,
        });
    }
    if samples < 2 {
        return Err(validation("Monte Carlo needs at least 2 samples"));
    }
    let (lo, hi) = padded_box(domain, t);
    let box_area = (hi.x - lo.x) * (hi.y - lo.y);
    let blocks = samples.div_ceil(BLOCK);
    let per_block: Vec<(Vec<f64>, Vec<f64>)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let (mut inner, mut outer) = (Vec::new(), Vec::new());
            for _ in 0..BLOCK.min(samples - b * BLOCK) {
                let d = domain.signed_distance(sample_box(&mut rng, lo, hi));
                if in_shell(d, t, Side::Inner) {
                    inner.push(d);
                } else if in_shell(d, t, Side::Outer) {
                    outer.push(-d);
                }
            }
            (inner, outer)
        })
        .collect();
    let mut inner: Vec<f64> = per_block.iter().flat_map(|p| p.0.iter().copied()).collect();
    let mut outer: Vec<f64> = per_block.iter().flat_map(|p| p.1.iter().copied()).collect();
    inner.sort_by(f64::total_cmp);
    outer.sort_by(f64::total_cmp);
    let per_sample = box_area / samples as f64;
    let p = domain.perimeter();
    let theta_at = |s: f64| {
        let vi = inner.partition_point(|&d| d < s) as f64 * per_sample;
        // outer shell membership is -d < s with d <= 0
        let vo = outer.partition_point(|&d| d < s) as f64 * per_sample;
        (vi / (s * p) - 1.0, vo / (s * p) - 1.0)
    };
    let (theta_inner, theta_outer) = theta_at(t);
    let (mut sup_in, mut sup_out) = (0.0_f64, 0.0_f64);
    for s in theta_grid(t) {
        let (i, o) = theta_at(s);
        sup_in = sup_in.max(i.abs());
        sup_out = sup_out.max(o.abs());
    }
    Ok(ThetaReport {
        t,
        theta_inner,
        theta_outer,
        theta_bar: 0.5 * (sup_in + sup_out),
        method,
    })
}

/// One inequality `lower <= value <= upper` of the convex-geometry checker.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub t: Option<f64>,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    pub pass: bool,
}

impl BoundCheck {
    fn new(name: &'static str, t: Option<f64>, lower: f64, value: f64, upper: f64, tol: f64) -> Self {
        let slack = tol * lower.abs().max(upper.abs()).max(1.0);
        Self {
            name,
            t,
            lower,
            value,
            upper,
            pass: value >= lower - slack && value <= upper + slack,
        }
    }

    /// Distance to the nearest bound, negative when violated.
    pub fn margin(&self) -> f64 {
        (self.value - self.lower).min(self.upper - self.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBoundsReport {
    pub checks: Vec<BoundCheck>,
}

impl ConvexBoundsReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Smallest margin per check name.
    pub fn worst_margin(&self, name: &str) -> Option<f64> {
        self.checks
            .iter()
            .filter(|c| c.name == name)
            .map(BoundCheck::margin)
            .min_by(f64::total_cmp)
    }
}

/// Checks the deficit bounds, the parallel-set perimeter sandwich and the
/// two-sided inradius bound at tolerance `tol`.
pub fn check_convex_bounds(domain: &Domain, t_grid: &[f64], tol: f64) -> Result<ConvexBoundsReport> {
    let s = domain.summary();
    let d = DIM as f64;
    let r_in = s.inradius;
    if let Some(&bad) = t_grid.iter().find(|&&t| !(t > 0.0) || t > r_in * (1.0 + 1e-12)) {
        return Err(validation(format!("t = {bad} outside (0, inradius = {r_in}]")));
    }
    let mut checks = vec![BoundCheck::new(
        "inradius",
        None,
        s.area / s.perimeter,
        r_in,
        d * s.area / s.perimeter,
        tol,
    )];
    let outer_const = (2f64.powi(DIM as i32) - d - 1.0) / d;
    for &t in t_grid {
        let (ti, to) = theta_pair(domain, t);
        checks.push(BoundCheck::new(
            "theta_inner",
            Some(t),
            -(d - 1.0) * t / (2.0 * r_in),
            ti,
            0.0,
            tol,
        ));
        checks.push(BoundCheck::new(
            "theta_outer",
            Some(t),
            0.0,
            to,
            outer_const * t / r_in,
            tol,
        ));
        checks.push(BoundCheck::new(
            "parallel_perimeter",
            Some(t),
            s.perimeter * (1.0 - t / r_in).max(0.0).powi(DIM as i32 - 1),
            parallel_set_perimeter(domain, t),
            s.perimeter,
            tol,
        ));
    }
    Ok(ConvexBoundsReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn shell_volume_examples() {
        let sq = Domain::unit_square();
        assert_relative_eq!(shell_volume(&sq, 0.1, Side::Inner), 0.36, epsilon = 1e-15);
        assert_relative_eq!(shell_volume(&sq, 0.1, Side::Outer), 0.4 + PI * 0.01, epsilon = 1e-15);
        let disk = Domain::disk(1.0).unwrap();
        assert_relative_eq!(shell_volume(&disk, 0.1, Side::Inner), PI * (1.0 - 0.81), epsilon = 1e-15);
    }

    #[test]
    fn polygon_inner_shell_matches_rectangle() {
        let rect = Domain::rectangle(2.0, 1.0).unwrap();
        let poly = Domain::ConvexPolygon(rect.as_polygon().unwrap());
        for t in [0.01, 0.2, 0.45] {
            assert_relative_eq!(
                shell_volume(&rect, t, Side::Inner),
                shell_volume(&poly, t, Side::Inner),
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn inner_parallel_sets() {
        let sq = Domain::unit_square();
        let inner = inner_parallel_set(&sq, 0.2).unwrap();
        assert_eq!(inner.area(), 0.6 * 0.6);
        assert_eq!(inner.bounding_box().0, Point::new(0.2, 0.2));
        assert_eq!(inner_parallel_set(&sq, 0.0).unwrap(), sq);
        assert!(matches!(inner_parallel_set(&sq, 0.5), Err(Error::EmptySet { .. })));

        // offset triangle is similar with ratio 1 - t/r_in about the incenter
        let tri = Domain::equilateral_triangle(1.0).unwrap();
        let r = tri.inradius();
        let t = 0.1;
        let off = inner_parallel_set(&tri, t).unwrap();
        let k = 1.0 - t / r;
        assert_relative_eq!(off.perimeter(), 3.0 * k, epsilon = 1e-13);
        assert_relative_eq!(off.area(), tri.area() * k * k, epsilon = 1e-13);
    }

    #[test]
    fn theta_examples() {
        let sq = Domain::unit_square();
        let th = theta(&sq, 0.1).unwrap();
        assert_relative_eq!(th.theta_inner, -0.1, epsilon = 1e-14);
        assert_relative_eq!(th.theta_outer, PI * 0.1 / 4.0, epsilon = 1e-14);
        assert_relative_eq!(th.theta_bar, 0.5 * (0.1 + PI * 0.1 / 4.0), epsilon = 1e-14);
        let disk = Domain::disk(1.0).unwrap();
        let th = theta(&disk, 0.1).unwrap();
        assert_relative_eq!(th.theta_inner, -0.05, epsilon = 1e-14);
        assert_relative_eq!(th.theta_outer, 0.05, epsilon = 1e-14);
        let zero = theta(&sq, 0.0).unwrap();
        assert_eq!((zero.theta_inner, zero.theta_outer, zero.theta_bar), (0.0, 0.0, 0.0));
        assert!(theta(&sq, 0.6).is_err());
    }

    #[test]
    fn theta_grid_density() {
        let g = theta_grid(0.1);
        assert_eq!(*g.last().unwrap(), 0.1);
        assert!(g[0] >= 0.1e-6);
        assert!(g.len() as u32 >= THETA_BAR_POINTS_PER_DECADE * THETA_BAR_DECADES);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn monte_carlo_theta_tracks_exact() {
        let sq = Domain::unit_square();
        let mc = theta_monte_carlo(&sq, 0.1, 400_000, 3).unwrap();
        let ex = theta(&sq, 0.1).unwrap();
        assert!((mc.theta_inner - ex.theta_inner).abs() < 0.03);
        assert!((mc.theta_outer - ex.theta_outer).abs() < 0.03);
        assert!(mc.theta_bar >= 0.5 * mc.theta_inner.abs().max(mc.theta_outer.abs()));
    }

    #[test]
    fn convex_bound_saturation() {
        let sq = Domain::unit_square();
        let rep = check_convex_bounds(&sq, &[0.01, 0.1, 0.3, 0.5], 1e-10).unwrap();
        assert!(rep.pass(), "{:?}", rep.failures().collect::<Vec<_>>());
        // square saturates the lower theta_inner bound and the upper inradius bound
        assert!(rep.worst_margin("theta_inner").unwrap().abs() < 1e-14);
        assert!(rep.worst_margin("inradius").unwrap().abs() < 1e-14);
        let disk = Domain::disk(1.0).unwrap();
        let rep = check_convex_bounds(&disk, &[0.1, 0.5, 0.9], 1e-10).unwrap();
        assert!(rep.pass());
        for c in rep.checks.iter().filter(|c| c.name == "theta_inner") {
            assert!(c.value > -c.t.unwrap());
        }
    }
}
