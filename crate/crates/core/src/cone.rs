//! Localized traces on the planar model cone `{x: x_2 < eps |x|}` and its
//! complement, against the two-term prediction.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{validation, Error, Result};
use crate::geometry::Point;
use crate::localization::BumpProfile;
use crate::quadrature::adaptive;
use crate::spectral::{localized_trace, DiscreteOperator, SolveMode, MIN_H_OVER_GRID};
use crate::weyl::constants;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeDomain {
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConeSide {
    Cone,
    Complement,
}

impl ConeSide {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConeSide::Cone => "cone",
            ConeSide::Complement => "complement",
        }
    }
}

impl ConeDomain {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&epsilon) {
            return Err(validation(format!("cone epsilon must lie in [0, 1/2], got {epsilon}")));
        }
        Ok(Self { epsilon })
    }

    /// `x_2 < eps |x|`.
    pub fn contains(&self, x: Point) -> bool {
        x.y < self.epsilon * x.norm()
    }

    /// Interior of the chosen side.
    pub fn side_contains(&self, side: ConeSide, x: Point) -> bool {
        match side {
            ConeSide::Cone => self.contains(x),
            ConeSide::Complement => x.y > self.epsilon * x.norm(),
        }
    }

    /// Polar angles of the two boundary rays.
    pub fn boundary_angles(&self) -> [f64; 2] {
        let a = self.epsilon.asin();
        [a, PI - a]
    }

    /// Angular range `[start, end]` of the chosen side around the vertex.
    fn angles(&self, side: ConeSide) -> (f64, f64) {
        let [a, b] = self.boundary_angles();
        match side {
            ConeSide::Cone => (b, 2.0 * PI + a),
            ConeSide::Complement => (a, b),
        }
    }
}

pub fn cone_membership(cd: &ConeDomain, x: Point) -> bool {
    cd.contains(x)
}

/// Bump of radius `l` centred at `center`, `phi((x - center)/l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeWeight {
    pub center: Point,
    pub l: f64,
    pub profile: BumpProfile,
}

impl ConeWeight {
    pub fn new(center: Point, l: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(validation(format!("weight radius must be positive, got {l}")));
        }
        Ok(Self {
            center,
            l,
            profile: BumpProfile::default(),
        })
    }

    pub fn value(&self, x: Point) -> f64 {
        self.profile.value((x - self.center) / self.l)
    }

    /// Parameter interval where the ray `t e`, `t >= 0`, meets the support.
    fn ray_interval(&self, e: Point) -> Option<(f64, f64)> {
        let b = e.dot(&self.center);
        let disc = b * b - (self.center.norm_squared() - self.l * self.l);
        if disc <= 0.0 {
            return None;
        }
        let s = disc.sqrt();
        let (lo, hi) = ((b - s).max(0.0), b + s);
        (hi > lo).then_some((lo, hi))
    }
}

/// Relative tolerance of the prediction integrals.
const PREDICTION_TOL: f64 = 1e-10;

/// `(int_side phi^2, int_boundary phi^2)` by adaptive quadrature in polar
/// coordinates around the vertex.
pub fn cone_weight_integrals(cd: &ConeDomain, side: ConeSide, w: &ConeWeight) -> Result<(f64, f64)> {
    let scale = w.l * w.l;
    let along = |e: Point, power: i32, tol: f64| match w.ray_interval(e) {
        Some((lo, hi)) => adaptive(lo, hi, tol, |t| t.powi(power) * w.value(t * e).powi(2)),
        None => crate::quadrature::Integral {
            value: 0.0,
            error: 0.0,
            converged: true,
        },
    };
    let ok = std::cell::Cell::new(true);
    let (a, b) = cd.angles(side);
    let volume = adaptive(a, b, PREDICTION_TOL * scale, |t| {
        let i = along(Point::new(t.cos(), t.sin()), 1, 1e-2 * PREDICTION_TOL * scale);
        ok.set(ok.get() && i.converged);
        i.value
    });
    let mut boundary = 0.0;
    for t in cd.boundary_angles() {
        let i = along(Point::new(t.cos(), t.sin()), 0, PREDICTION_TOL * w.l);
        ok.set(ok.get() && i.converged);
        boundary += i.value;
    }
    if !(volume.converged && ok.get()) {
        return Err(Error::Solver("cone prediction quadrature did not converge".into()));
    }
    Ok((volume.value, boundary))
}

/// `L_2 h^-2 int_side phi^2 - (L_1/4) h^-1 int_boundary phi^2`.
pub fn cone_two_term_prediction(cd: &ConeDomain, side: ConeSide, w: &ConeWeight, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(validation("h must be positive"));
    }
    let (volume, boundary) = cone_weight_integrals(cd, side, w)?;
    Ok(constants(2)?.l_d * volume / (h * h) - constants(1)?.l_d / 4.0 * boundary / h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeExperiment {
    pub cone: ConeDomain,
    pub side: ConeSide,
    pub weight: ConeWeight,
    pub hs: Vec<f64>,
    /// `h / h_grid` on the coarse grid.
    pub grid_ratio: f64,
    /// Spacing ratio between the coarse and the fine grid.
    pub refinement: f64,
}

impl ConeExperiment {
    pub fn new(epsilon: f64, side: ConeSide, center: Point, l: f64, hs: Vec<f64>) -> Result<Self> {
        Ok(Self {
            cone: ConeDomain::new(epsilon)?,
            side,
            weight: ConeWeight::new(center, l)?,
            hs,
            grid_ratio: MIN_H_OVER_GRID,
            refinement: 1.5,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.hs.is_empty() || self.hs.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(validation("h ladder must be nonempty and positive"));
        }
        if self.grid_ratio < MIN_H_OVER_GRID {
            return Err(validation(format!("grid ratio must be at least {MIN_H_OVER_GRID}")));
        }
        if !(self.refinement > 1.0) {
            return Err(validation("refinement ratio must exceed 1"));
        }
        Ok(())
    }

    /// Masked grid of spacing `h_grid` with the vertex at a node, covering
    /// the support with a margin of two spacings.
    pub fn grid(&self, h_grid: f64) -> Result<DiscreteOperator> {
        let c = self.weight.center;
        let reach = self.weight.l + 2.0 * h_grid;
        let range = |x: f64| ((x - reach) / h_grid).floor() as i32..=((x + reach) / h_grid).ceil() as i32;
        DiscreteOperator::from_predicate(Point::zeros(), h_grid, range(c.x), range(c.y), |x| {
            (x - c).norm() < self.weight.l && self.cone.side_contains(self.side, x)
        })
    }

    /// Localized trace on a grid of spacing `h_grid`.
    pub fn measure(&self, h: f64, h_grid: f64) -> Result<f64> {
        let op = self.grid(h_grid)?;
        let w = op.sample(|x| self.weight.value(x));
        Ok(localized_trace(&op, &w, h, SolveMode::Auto)?.value)
    }
}

/// Contamination above this fraction of the remainder flags a row.
pub const CONTAMINATION_LIMIT: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeRow {
    pub epsilon: f64,
    pub side: ConeSide,
    pub l: f64,
    pub h: f64,
    /// Fine-grid spacing.
    pub h_grid: f64,
    /// Fine-grid localized trace.
    pub measured: f64,
    pub coarse: f64,
    pub predicted: f64,
    pub remainder: f64,
    /// `remainder / (l/h)^{2/3}`.
    pub normalized: f64,
    /// Richardson estimate of the fine-grid discretization error.
    pub contamination: f64,
    pub contaminated: bool,
}

impl ConeRow {
    pub fn contamination_ratio(&self) -> f64 {
        self.contamination / self.remainder.abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeTable {
    pub rows: Vec<ConeRow>,
}

impl ConeTable {
    /// Max over min of `|normalized|` across the ladder.
    pub fn normalized_spread(&self) -> f64 {
        let v: Vec<f64> = self.rows.iter().map(|r| r.normalized.abs()).collect();
        let max = v.iter().copied().fold(0.0, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn any_contaminated(&self) -> bool {
        self.rows.iter().any(|r| r.contaminated)
    }
}

/// Runs the h ladder on two grids per `h`. Staircase boundaries are first
/// order in the spacing and aligned ones second order; the Richardson
/// estimate uses the matching order.
pub fn cone_trace_experiment(exp: &ConeExperiment) -> Result<ConeTable> {
    exp.validate()?;
    let aligned = exp.cone.epsilon == 0.0;
    let order = if aligned { 2 } else { 1 };
    let jobs: Vec<(usize, f64, f64)> = exp
        .hs
        .iter()
        .enumerate()
        .flat_map(|(k, &h)| {
            let coarse = h / exp.grid_ratio;
            [(k, h, coarse), (k, h, coarse / exp.refinement)]
        })
        .collect();
    let traces: Vec<Result<f64>> = jobs.par_iter().map(|&(_, h, hg)| exp.measure(h, hg)).collect();
    let traces: Vec<f64> = traces.into_iter().collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(exp.hs.len());
    for (k, &h) in exp.hs.iter().enumerate() {
        let (coarse, fine) = (traces[2 * k], traces[2 * k + 1]);
        let predicted = cone_two_term_prediction(&exp.cone, exp.side, &exp.weight, h)?;
        let remainder = fine - predicted;
        let contamination = (fine - coarse).abs() / (exp.refinement.powi(order) - 1.0);
        rows.push(ConeRow {
            epsilon: exp.cone.epsilon,
            side: exp.side,
            l: exp.weight.l,
            h,
            h_grid: jobs[2 * k + 1].2,
            measured: fine,
            coarse,
            predicted,
            remainder,
            normalized: remainder / (exp.weight.l / h).powf(2.0 / 3.0),
            contamination,
            contaminated: contamination > CONTAMINATION_LIMIT * remainder.abs(),
        });
    }
    Ok(ConeTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn membership_examples() {
        let half = ConeDomain::new(0.0).unwrap();
        assert!(half.contains(Point::new(1.0, -0.1)));
        let c = ConeDomain::new(0.5).unwrap();
        assert!(c.contains(Point::new(1.0, 0.4)));
        assert!(!c.contains(Point::zeros()));
        assert!(ConeDomain::new(0.6).is_err());
    }

    #[test]
    fn half_plane_integrals() {
        let half = ConeDomain::new(0.0).unwrap();
        let w = ConeWeight::new(Point::zeros(), 1.0).unwrap();
        let (v, b) = cone_weight_integrals(&half, ConeSide::Cone, &w).unwrap();
        assert_relative_eq!(v, 0.5, max_relative = 1e-9);
        // independent 1-D rule on the axis
        let axis = crate::quadrature::GaussRule::new(20).composite(-1.0, 1.0, 200, |t| w.value(Point::new(t, 0.0)).powi(2));
        assert_relative_eq!(b, axis, max_relative = 1e-9);
    }

    #[test]
    fn prediction_scales_with_h() {
        let c = ConeDomain::new(0.3).unwrap();
        let w = ConeWeight::new(Point::new(0.1, -0.2), 0.7).unwrap();
        let (v, b) = cone_weight_integrals(&c, ConeSide::Cone, &w).unwrap();
        let p1 = cone_two_term_prediction(&c, ConeSide::Cone, &w, 0.05).unwrap();
        let p2 = cone_two_term_prediction(&c, ConeSide::Cone, &w, 0.1).unwrap();
        let (l2, l1) = (constants(2).unwrap().l_d, constants(1).unwrap().l_d);
        assert_relative_eq!(p1, l2 * v / 0.0025 - l1 / 4.0 * b / 0.05, max_relative = 1e-14);
        assert_relative_eq!(p2, l2 * v / 0.0025 / 4.0 - l1 / 4.0 * b / 0.05 / 2.0, max_relative = 1e-12);
        let (vc, _) = cone_weight_integrals(&c, ConeSide::Complement, &w).unwrap();
        assert_relative_eq!(v + vc, 0.49, max_relative = 1e-9);
    }
}
