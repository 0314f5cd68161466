//! Localization functions adapted to the distance to the boundary, the
//! induced region decomposition and the localization defect.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::brown::{ConeParams, GoodPointField};
use crate::error::{validation, Error, Result};
use crate::geometry::{padded_box, sample_box, shell_volume, theta, Domain, Point, Side};
use crate::quadrature::{adaptive, GaussRule, Integral};
use crate::sampling::{mc_means, Estimate};
use crate::spectral::{discretize, eigen_below, localized_trace, neumaier_sum, SolveMode, MIN_H_OVER_GRID};

/// `1 / ||exp(-1/(1-|x|^2))||_{L^2(R^2)}`.
pub const BUMP_NORMALIZATION: f64 = 2.912_132_452_513_20;

/// Radial mollifier `c exp(-1/(1-|x|^2))` on the unit disk, unit `L^2` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpProfile {
    pub normalization: f64,
}

impl Default for BumpProfile {
    fn default() -> Self {
        Self {
            normalization: BUMP_NORMALIZATION,
        }
    }
}

impl BumpProfile {
    /// Profile with the constant recomputed by radial quadrature.
    pub fn computed() -> Self {
        let raw = Self { normalization: 1.0 };
        Self {
            normalization: 1.0 / raw.norm_squared().value.sqrt(),
        }
    }

    pub fn radial(&self, r: f64) -> f64 {
        let s = r * r;
        if s >= 1.0 {
            0.0
        } else {
            self.normalization * (-1.0 / (1.0 - s)).exp()
        }
    }

    pub fn value(&self, y: Point) -> f64 {
        self.radial(y.norm())
    }

    pub fn gradient(&self, y: Point) -> Point {
        let s = y.norm_squared();
        if s >= 1.0 {
            return Point::zeros();
        }
        let q = 1.0 - s;
        -self.value(y) * 2.0 / (q * q) * y
    }

    /// `max |phi|`, attained at the origin.
    pub fn sup(&self) -> f64 {
        self.normalization * (-1.0f64).exp()
    }

    /// `int phi^2` by adaptive radial quadrature.
    pub fn norm_squared(&self) -> Integral {
        let mut i = adaptive(0.0, 1.0, 1e-14, |r| 2.0 * PI * r * self.radial(r).powi(2));
        i.error += 1e-15;
        i
    }
}

/// `l(u) = max(dist(u, complement), 2 l0) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthScale {
    pub domain: Domain,
    pub l0: f64,
}

impl LengthScale {
    pub fn new(domain: Domain, l0: f64) -> Result<Self> {
        if !(l0 > 0.0 && l0.is_finite()) {
            return Err(validation(format!("l0 must be positive, got {l0}")));
        }
        Ok(Self { domain, l0 })
    }

    fn depth(&self, u: Point) -> f64 {
        self.domain.signed_distance(u).max(0.0)
    }

    pub fn value(&self, u: Point) -> f64 {
        0.5 * self.depth(u).max(2.0 * self.l0)
    }

    /// Gradient of `l`, flagged where it does not exist (medial axis and the
    /// switching curve `dist = 2 l0`); there a one-sided value is returned.
    pub fn gradient(&self, u: Point) -> (Point, bool) {
        let d = self.depth(u);
        if d < 2.0 * self.l0 {
            return (Point::zeros(), false);
        }
        let (g, ambiguous) = self.domain.signed_distance_gradient(u);
        (0.5 * g, ambiguous || d == 2.0 * self.l0)
    }
}

/// `phi_u(x) = phi((x-u)/l(u)) sqrt(1 + grad l(u) . (x-u)/l(u))`.
pub fn bump_value(profile: &BumpProfile, ls: &LengthScale, u: Point, x: Point) -> f64 {
    let l = ls.value(u);
    bump_value_with(profile, l, ls.gradient(u).0, u, x)
}

fn bump_value_with(profile: &BumpProfile, l: f64, grad: Point, u: Point, x: Point) -> f64 {
    let y = (x - u) / l;
    let p = profile.value(y);
    if p == 0.0 {
        return 0.0;
    }
    p * (1.0 + grad.dot(&y)).sqrt()
}

/// Localization function of one centre, with `l` and its gradient cached.
#[derive(Debug, Clone, Copy)]
pub struct LocalBump {
    pub center: Point,
    pub l: f64,
    pub grad: Point,
    pub flagged: bool,
}

impl LocalBump {
    pub fn new(ls: &LengthScale, u: Point) -> Self {
        let (grad, flagged) = ls.gradient(u);
        Self {
            center: u,
            l: ls.value(u),
            grad,
            flagged,
        }
    }

    pub fn value(&self, profile: &BumpProfile, x: Point) -> f64 {
        bump_value_with(profile, self.l, self.grad, self.center, x)
    }
}

/// Resolution of the partition-identity quadrature: Gauss–Legendre cells per
/// ray piece, four times as many in angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionQuadrature {
    pub cells: usize,
}

impl Default for PartitionQuadrature {
    fn default() -> Self {
        Self { cells: 8 }
    }
}

impl PartitionQuadrature {
    pub fn refined(self, factor: usize) -> Self {
        Self {
            cells: self.cells * factor,
        }
    }
}

const PARTITION_ORDER: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionResidual {
    pub x: Point,
    pub integral: f64,
    pub residual: f64,
}

/// Scan points per ray when locating jumps of `grad l`.
const RAY_SCAN: usize = 256;

/// Points on `[0, radius]` where `grad l(x + rho e)` jumps (switching curve,
/// medial axis), located by scanning and bisection. Adaptive rules only see
/// their nodes, so a jump between a panel end and its first node would
/// otherwise go unnoticed.
fn ray_breaks(ls: &LengthScale, x: Point, e: Point, radius: f64) -> Vec<f64> {
    let g = |rho: f64| ls.gradient(x + rho * e).0;
    let mut breaks = vec![0.0];
    let mut a = 0.0;
    let mut ga = g(0.0);
    for k in 1..=RAY_SCAN {
        let b = radius * k as f64 / RAY_SCAN as f64;
        let gb = g(b);
        if (gb - ga).norm() > 0.1 {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                if (g(m) - ga).norm() > 0.1 {
                    hi = m;
                } else {
                    lo = m;
                }
            }
            breaks.push(0.5 * (lo + hi));
        }
        a = b;
        ga = gb;
    }
    breaks.push(radius);
    breaks
}

/// `|int phi_u(x)^2 l(u)^{-2} du - 1|`. The integrand vanishes unless
/// `|x - u| < max(dist(x, complement), l0)`; that disk is integrated in polar
/// coordinates around `x`, each ray split where `grad l` jumps so every piece
/// is smooth.
pub fn partition_residual(
    profile: &BumpProfile,
    ls: &LengthScale,
    x: Point,
    quad: PartitionQuadrature,
) -> PartitionResidual {
    let radius = ls.depth(x).max(ls.l0);
    let rule = GaussRule::new(PARTITION_ORDER);
    let cells = quad.cells.max(1);
    let ray = |a: f64| {
        let e = Point::new(a.cos(), a.sin());
        let breaks = ray_breaks(ls, x, e, radius);
        let pieces = breaks.windows(2).map(|w| {
            rule.composite(w[0], w[1], cells, |rho| {
                let u = x + rho * e;
                let l = ls.value(u);
                let phi = bump_value(profile, ls, u, x);
                rho * phi * phi / (l * l)
            })
        });
        neumaier_sum(pieces)
    };
    let nodes = rule.composite_nodes(0.0, 2.0 * PI, 4 * cells);
    let integral = neumaier_sum(nodes.iter().map(|&(a, w)| w * ray(a)));
    PartitionResidual {
        x,
        integral,
        residual: (integral - 1.0).abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionLabel {
    Bulk,
    Good,
    Bad,
    Exterior,
}

impl RegionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::Bulk => "bulk",
            RegionLabel::Good => "good",
            RegionLabel::Bad => "bad",
            RegionLabel::Exterior => "exterior",
        }
    }
}

impl std::fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Labels centres by how the support of their localization function meets
/// the boundary. Reuses the good-point field across queries.
#[derive(Debug, Clone)]
pub struct Classifier {
    pub ls: LengthScale,
    field: GoodPointField,
}

impl Classifier {
    pub fn new(domain: &Domain, cone: ConeParams, l0: f64) -> Result<Self> {
        Ok(Self {
            ls: LengthScale::new(domain.clone(), l0)?,
            field: GoodPointField::new(domain, cone),
        })
    }

    pub fn classify(&self, u: Point) -> RegionLabel {
        let sd = self.ls.domain.signed_distance(u);
        let l = self.ls.value(u);
        if sd >= l {
            RegionLabel::Bulk
        } else if sd.abs() < l {
            if self.field.witness(u).is_some() {
                RegionLabel::Good
            } else {
                RegionLabel::Bad
            }
        } else {
            RegionLabel::Exterior
        }
    }

    /// Whether `u` lies in the closed `l0`-collar of the boundary.
    pub fn in_collar(&self, u: Point) -> bool {
        self.ls.domain.distance_to_boundary(u) < self.ls.l0
    }
}

pub fn classify(domain: &Domain, u: Point, cone: ConeParams, l0: f64) -> Result<RegionLabel> {
    Ok(Classifier::new(domain, cone, l0)?.classify(u))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionVolumes {
    pub l0: f64,
    pub bulk: Estimate,
    pub good: Estimate,
    pub bad: Estimate,
    /// `good + bad` with its own standard error.
    pub collar: Estimate,
    /// Exact area of `{dist(u, boundary) < l0}`.
    pub collar_exact: f64,
    /// `2 l0 P (1 + theta_bar(l0))`.
    pub collar_bound: f64,
    pub within_bound: bool,
    pub matches_collar: bool,
}

/// Standard errors allowed in the volume checks.
pub const VOLUME_CHECK_SE: f64 = 4.0;

pub fn region_volumes(domain: &Domain, cone: ConeParams, l0: f64, samples: u64, seed: u64) -> Result<RegionVolumes> {
    let summary = domain.summary();
    if !(l0 > 0.0 && l0 <= 0.5 * summary.inradius) {
        return Err(validation(format!(
            "l0 = {l0} must lie in (0, r_in/2 = {}]",
            0.5 * summary.inradius
        )));
    }
    if samples < 2 {
        return Err(validation("Monte Carlo needs at least 2 samples"));
    }
    let c = Classifier::new(domain, cone, l0)?;
    let (lo, hi) = padded_box(domain, l0);
    let area = (hi.x - lo.x) * (hi.y - lo.y);
    let [bulk, good, bad, collar] = mc_means(seed, samples, |rng| {
        let u = sample_box(rng, lo, hi);
        let mut v = [0.0; 4];
        match c.classify(u) {
            RegionLabel::Bulk => v[0] = 1.0,
            RegionLabel::Good => v[1] = 1.0,
            RegionLabel::Bad => v[2] = 1.0,
            RegionLabel::Exterior => {}
        }
        v[3] = v[1] + v[2];
        v
    });
    let [bulk, good, bad, collar] = [bulk, good, bad, collar].map(|e| e.scaled(area));
    let collar_exact = shell_volume(domain, l0, Side::Inner) + shell_volume(domain, l0, Side::Outer);
    let collar_bound = 2.0 * l0 * summary.perimeter * (1.0 + theta(domain, l0)?.theta_bar);
    Ok(RegionVolumes {
        l0,
        within_bound: collar.value <= collar_bound + VOLUME_CHECK_SE * collar.stderr,
        matches_collar: collar.agrees_with(collar_exact, VOLUME_CHECK_SE),
        bulk,
        good,
        bad,
        collar,
        collar_exact,
        collar_bound,
    })
}

/// Per-axis Gauss–Legendre order of the centre quadrature in each strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectQuadrature {
    pub order: usize,
}

impl Default for DefectQuadrature {
    fn default() -> Self {
        Self { order: 6 }
    }
}

/// Largest number of centres (eigensolves) per defect evaluation.
pub const MAX_DEFECT_NODES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct DefectNode {
    pub u: Point,
    pub l: f64,
    pub weight: f64,
    pub trace: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    pub h: f64,
    pub eps0: f64,
    pub l0: f64,
    pub resolution: usize,
    /// `Tr(H)_-` from the discrete spectrum.
    pub total: f64,
    /// `int Tr(phi_u H phi_u)_- l(u)^{-2} du`.
    pub localized: f64,
    pub defect: f64,
    /// `h^{-d+2} int l(u)^{-2} du` over the centres whose support meets the domain.
    pub reference: f64,
    pub nodes: Vec<DefectNode>,
    pub incomplete: bool,
}

impl DefectReport {
    pub fn ratio(&self) -> f64 {
        self.defect / self.reference
    }
}

/// Quadrature over the centres of a square or disk using its dihedral
/// symmetry (the grid shares it): one eighth of the plane around the centre,
/// split where `l` changes regime.
fn symmetric_centres(domain: &Domain, l0: f64, order: usize) -> Result<Vec<(Point, f64)>> {
    let rule = GaussRule::new(order);
    let mut nodes = Vec::new();
    match domain {
        Domain::Rectangle { a, b, origin } if (a - b).abs() <= 1e-12 * a => {
            let c = origin + Point::new(0.5 * a, 0.5 * a);
            let half = 0.5 * a;
            let mut cuts = vec![0.0, half - 2.0 * l0, half, half + l0];
            cuts.retain(|&t| t >= 0.0);
            for w in cuts.windows(2) {
                for (vx, wx) in rule.on(w[0], w[1]) {
                    for (s, ws) in rule.on(0.0, 1.0) {
                        nodes.push((c + Point::new(vx, s * vx), 8.0 * wx * ws * vx));
                    }
                }
            }
        }
        Domain::Disk { radius, center } => {
            let mut cuts = vec![0.0, radius - 2.0 * l0, *radius, radius + l0];
            cuts.retain(|&t| t >= 0.0);
            for w in cuts.windows(2) {
                for (rho, wr) in rule.on(w[0], w[1]) {
                    for (a, wa) in rule.on(0.0, PI / 4.0) {
                        nodes.push((center + rho * Point::new(a.cos(), a.sin()), 8.0 * wr * wa * rho));
                    }
                }
            }
        }
        _ => return Err(validation("the defect experiment supports squares and disks")),
    }
    Ok(nodes)
}

/// Compares `Tr(H)_-` on the discretized domain with the integral of the
/// localized traces over all centres.
pub fn localization_defect(
    domain: &Domain,
    h: f64,
    eps0: f64,
    n: usize,
    quad: DefectQuadrature,
) -> Result<DefectReport> {
    if !(h > 0.0 && eps0 > 0.0 && eps0 <= 1.0) {
        return Err(validation("need h > 0 and eps0 in (0, 1]"));
    }
    let l0 = h / eps0;
    let op = discretize(domain, n)?;
    if h < MIN_H_OVER_GRID * op.h_grid * (1.0 - 1e-12) {
        return Err(validation(format!(
            "h = {h} is below {MIN_H_OVER_GRID} grid spacings ({})",
            op.h_grid
        )));
    }
    let centres = symmetric_centres(domain, l0, quad.order)?;
    if centres.len() > MAX_DEFECT_NODES {
        return Err(Error::Resource(format!(
            "{} quadrature centres exceed the limit of {MAX_DEFECT_NODES}",
            centres.len()
        )));
    }
    let spec = eigen_below(&op, 1.0 / (h * h), SolveMode::Auto)?;
    let total = h * h * spec.riesz_mean(1.0 / (h * h), 1.0)?;
    let ls = LengthScale::new(domain.clone(), l0)?;
    let profile = BumpProfile::default();
    let results: Vec<Result<DefectNode>> = centres
        .par_iter()
        .map(|&(u, weight)| {
            let bump = LocalBump::new(&ls, u);
            let w = op.sample(|x| bump.value(&profile, x));
            let trace = localized_trace(&op, &w, h, SolveMode::Auto)?.value;
            Ok(DefectNode {
                u,
                l: bump.l,
                weight,
                trace,
            })
        })
        .collect();
    let mut nodes = Vec::with_capacity(results.len());
    let mut incomplete = false;
    for r in results {
        match r {
            Ok(node) => nodes.push(node),
            Err(Error::Resource(_)) | Err(Error::Solver(_)) => incomplete = true,
            Err(e) => return Err(e),
        }
    }
    let localized = neumaier_sum(nodes.iter().map(|n| n.weight * n.trace / (n.l * n.l)));
    let reference = neumaier_sum(centres.iter().map(|&(u, w)| {
        let l = ls.value(u);
        if domain.signed_distance(u) > -l {
            w / (l * l)
        } else {
            0.0
        }
    }));
    Ok(DefectReport {
        h,
        eps0,
        l0,
        resolution: n,
        total,
        localized,
        defect: (total - localized).abs(),
        reference,
        nodes,
        incomplete,
    })
}

/// Residual of the IMS localization identity
/// `(f, phi^2 (-Delta) f)/2 + (f, (-Delta)(phi^2 f))/2 = (f, phi (-Delta)(phi f)) - (f, f |grad phi|^2)`
/// for real `f` and `phi` supported in the square of half-width `half`
/// around `center`, with derivatives from fourth-order central differences.
pub fn ims_residual(
    f: impl Fn(Point) -> f64 + Sync,
    phi: impl Fn(Point) -> f64 + Sync,
    center: Point,
    half: f64,
) -> f64 {
    let step = 1e-3 * half;
    let lap = |g: &dyn Fn(Point) -> f64, x: Point| {
        let mut s = -10.0 * g(x);
        for e in [Point::new(1.0, 0.0), Point::new(0.0, 1.0)] {
            s += (-g(x + 2.0 * step * e) + 16.0 * g(x + step * e) + 16.0 * g(x - step * e) - g(x - 2.0 * step * e)) / 6.0;
        }
        // sum of two 1-D fourth-order stencils, each (-g2 + 16 g1 - 30 g0 + 16 g-1 - g-2) / 12
        s / (2.0 * step * step)
    };
    let grad = |g: &dyn Fn(Point) -> f64, x: Point| {
        let d = |e: Point| (-g(x + 2.0 * step * e) + 8.0 * g(x + step * e) - 8.0 * g(x - step * e) + g(x - 2.0 * step * e)) / (12.0 * step);
        Point::new(d(Point::new(1.0, 0.0)), d(Point::new(0.0, 1.0)))
    };
    let rule = GaussRule::new(12);
    let pts = rule.composite_nodes(-half, half, 16);
    let terms: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|&(a, wa)| {
            let mut lhs = 0.0;
            let mut rhs = 0.0;
            for &(b, wb) in &pts {
                let x = center + Point::new(a, b);
                let w = wa * wb;
                let fx = f(x);
                let p = phi(x);
                let phi2f = |y: Point| phi(y).powi(2) * f(y);
                let phif = |y: Point| phi(y) * f(y);
                lhs += w * fx * (0.5 * p * p * -lap(&f, x) + 0.5 * -lap(&phi2f, x));
                rhs += w * fx * (p * -lap(&phif, x) - fx * grad(&phi, x).norm_squared());
            }
            (lhs, rhs)
        })
        .collect();
    let lhs = neumaier_sum(terms.iter().map(|t| t.0));
    let rhs = neumaier_sum(terms.iter().map(|t| t.1));
    (lhs - rhs).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bump_normalization_matches_quadrature() {
        let p = BumpProfile::default();
        assert!((p.norm_squared().value - 1.0).abs() < 1e-8);
        assert_relative_eq!(BumpProfile::computed().normalization, BUMP_NORMALIZATION, max_relative = 1e-12);
    }

    #[test]
    fn length_scale_examples() {
        let sq = LengthScale::new(Domain::unit_square(), 0.05).unwrap();
        assert_relative_eq!(sq.value(Point::new(0.4, 0.5)), 0.2, epsilon = 1e-15);
        assert_relative_eq!(sq.value(Point::new(0.06, 0.5)), 0.05, epsilon = 1e-15);
        assert_relative_eq!(sq.value(Point::new(-0.3, 0.5)), 0.05, epsilon = 1e-15);
    }

    #[test]
    fn bump_examples() {
        let p = BumpProfile::default();
        let ls = LengthScale::new(Domain::unit_square(), 0.05).unwrap();
        let u = Point::new(0.03, 0.5);
        assert_eq!(bump_value(&p, &ls, u, u), p.sup());
        let x = u + Point::new(0.02, 0.01);
        assert_relative_eq!(bump_value(&p, &ls, u, x), p.value((x - u) / 0.05), epsilon = 1e-15);
        assert_eq!(bump_value(&p, &ls, u, u + Point::new(0.05, 0.0)), 0.0);
        let deep = Point::new(0.4, 0.5);
        let x = deep + Point::new(-0.1, 0.05);
        let expect = p.value((x - deep) / 0.2) * (1.0 + 0.5 * (x - deep).x / 0.2).sqrt();
        assert_relative_eq!(bump_value(&p, &ls, deep, x), expect, epsilon = 1e-15);
    }

    #[test]
    fn partition_examples() {
        let p = BumpProfile::default();
        let ls = LengthScale::new(Domain::unit_square(), 0.05).unwrap();
        let q = PartitionQuadrature::default();
        assert!(partition_residual(&p, &ls, Point::new(-0.5, 0.3), q).residual < 1e-6);
        assert!(partition_residual(&p, &ls, Point::new(0.5, 0.45), q).residual < 1e-3);
        assert!(partition_residual(&p, &ls, Point::new(0.0, 0.3), q).residual < 1e-3);
    }

    #[test]
    fn classify_examples() {
        let sq = Domain::unit_square();
        let c = ConeParams::new(0.5, 0.2).unwrap();
        assert_eq!(classify(&sq, Point::new(0.5, 0.5), c, 0.05).unwrap(), RegionLabel::Bulk);
        assert_eq!(classify(&sq, Point::new(0.5, 0.02), c, 0.05).unwrap(), RegionLabel::Good);
        let c = ConeParams::new(0.6, 0.4).unwrap();
        assert_eq!(classify(&sq, Point::new(0.01, 0.01), c, 0.05).unwrap(), RegionLabel::Bad);
        assert_eq!(classify(&sq, Point::new(1.5, 0.5), c, 0.05).unwrap(), RegionLabel::Exterior);
    }

    #[test]
    fn region_volume_examples() {
        let c = ConeParams::new(0.5, 0.2).unwrap();
        let v = region_volumes(&Domain::unit_square(), c, 0.02, 40_000, 3).unwrap();
        assert_relative_eq!(v.collar_exact, 8.0 * 0.02 - 4.0 * 0.0004 + PI * 0.0004, epsilon = 1e-12);
        assert!(v.matches_collar && v.within_bound);
        let d = region_volumes(&Domain::disk(1.0).unwrap(), ConeParams::new(0.3, 0.5).unwrap(), 0.05, 20_000, 3).unwrap();
        assert_eq!(d.bad.value, 0.0);
        assert!(region_volumes(&Domain::unit_square(), c, 0.3, 100, 3).is_err());
    }

    #[test]
    fn ims_identity_on_gaussians() {
        let f = |x: Point| (-(x - Point::new(0.1, -0.2)).norm_squared()).exp() * (1.0 + x.x);
        let p = BumpProfile::default();
        let r = ims_residual(f, |x| p.value(x / 0.8), Point::zeros(), 0.8);
        assert!(r < 1e-6, "{r}");
    }
}
