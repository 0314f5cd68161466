//! Dirichlet-Laplacian spectra: exact oracles, finite differences, counting
//! functions, Riesz means and localized traces.

mod bessel;
mod fd;
mod lanczos;
mod ldl;
mod oracle;
mod sparse;

pub use bessel::{bessel_j, bessel_j_all, bessel_zeros, BesselZeros};
pub use fd::{
    discretize, eigen_below, localized_trace, DiscreteOperator, LocalizedTrace, SemiclassicalOperator,
    SolveMode, DENSE_AUTO_NODES, DENSE_MAX_NODES, MIN_H_OVER_GRID,
};
pub use lanczos::{slice_eigenvalues, SliceOptions, SliceResult};
pub use ldl::{Factorization, Inertia};
pub use oracle::{exact_disk_spectrum, exact_rectangle_spectrum, exact_spectrum, MAX_ORACLE_ENTRIES};
pub use sparse::{nested_dissection, SymmetricCsr};

use crate::error::{validation, Error, Result};
use crate::weyl::constants;

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSource {
    ExactRectangle { a: f64, b: f64 },
    ExactDisk { radius: f64 },
    Discrete { n: usize },
}

/// Sorted eigenvalues, complete below `cutoff`, repeated by multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub cutoff: f64,
    pub source: SpectrumSource,
}

/// Compensated (Neumaier) sum.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<f64>, cutoff: f64, source: SpectrumSource) -> Result<Self> {
        eigenvalues.sort_by(f64::total_cmp);
        if eigenvalues.iter().any(|&e| !(e > 0.0) || e >= cutoff) {
            return Err(validation("eigenvalues must lie in (0, cutoff)"));
        }
        Ok(Self {
            eigenvalues,
            cutoff,
            source,
        })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn first(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    fn check_lambda(&self, lambda: f64) -> Result<()> {
        if lambda > self.cutoff {
            Err(Error::Completeness {
                lambda,
                cutoff: self.cutoff,
            })
        } else {
            Ok(())
        }
    }

    /// `#{lambda_k < lambda}`.
    pub fn counting(&self, lambda: f64) -> Result<usize> {
        self.check_lambda(lambda)?;
        Ok(self.eigenvalues.partition_point(|&e| e < lambda))
    }

    /// Whether `lambda` coincides with an eigenvalue to relative `tol`, where
    /// the counting function jumps.
    pub fn is_tie(&self, lambda: f64, tol: f64) -> bool {
        let i = self.eigenvalues.partition_point(|&e| e < lambda * (1.0 - tol));
        self.eigenvalues
            .get(i)
            .is_some_and(|&e| e <= lambda * (1.0 + tol))
    }

    /// `sum (lambda - lambda_k)_+^gamma`; `gamma = 0` is the counting function.
    pub fn riesz_mean(&self, lambda: f64, gamma: f64) -> Result<f64> {
        self.check_lambda(lambda)?;
        if !(gamma >= 0.0) {
            return Err(validation(format!("Riesz order must be nonnegative, got {gamma}")));
        }
        let below = &self.eigenvalues[..self.eigenvalues.partition_point(|&e| e < lambda)];
        Ok(if gamma == 0.0 {
            below.len() as f64
        } else if gamma == 1.0 {
            neumaier_sum(below.iter().map(|&e| lambda - e))
        } else {
            neumaier_sum(below.iter().map(|&e| (lambda - e).powf(gamma)))
        })
    }

    /// Eigenvalues scaled by `1/s^2`, the spectrum of the dilated domain.
    pub fn dilated(&self, s: f64) -> Self {
        let f = 1.0 / (s * s);
        Self {
            eigenvalues: self.eigenvalues.iter().map(|e| e * f).collect(),
            cutoff: self.cutoff * f,
            source: match self.source {
                SpectrumSource::ExactRectangle { a, b } => SpectrumSource::ExactRectangle { a: a * s, b: b * s },
                SpectrumSource::ExactDisk { radius } => SpectrumSource::ExactDisk { radius: radius * s },
                SpectrumSource::Discrete { n } => SpectrumSource::Discrete { n },
            },
        }
    }
}

/// Both sides of a Berezin–Li–Yau comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerezinCheck {
    pub trace: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Relative slack allowed for discretized operators.
pub const DISCRETE_BEREZIN_SLACK: f64 = 0.02;
/// Relative slack for exact spectra.
pub const EXACT_BEREZIN_SLACK: f64 = 1e-10;

impl BerezinCheck {
    pub fn new(trace: f64, bound: f64, slack: f64) -> Self {
        Self {
            trace,
            bound,
            slack,
            pass: trace <= bound * (1.0 + slack) + slack * f64::MIN_POSITIVE,
        }
    }

    pub fn margin(&self) -> f64 {
        self.bound - self.trace
    }
}

/// Classical bound `sum (lambda - lambda_k)_+ <= L_2 |Omega| lambda^2`.
pub fn check_berezin(spec: &Spectrum, area: f64, lambda: f64) -> Result<BerezinCheck> {
    let slack = match spec.source {
        SpectrumSource::Discrete { .. } => DISCRETE_BEREZIN_SLACK,
        _ => EXACT_BEREZIN_SLACK,
    };
    let trace = spec.riesz_mean(lambda, 1.0)?;
    let bound = constants(2)?.l_d * area * lambda * lambda;
    Ok(BerezinCheck::new(trace, bound, slack))
}

/// Localized bound `Tr(phi H phi)_- <= L_2 h^-2 int phi^2`.
pub fn check_berezin_localized(trace: &LocalizedTrace, h: f64, phi_l2_squared: f64) -> Result<BerezinCheck> {
    let bound = constants(2)?.l_d * phi_l2_squared / (h * h);
    Ok(BerezinCheck::new(trace.value, bound, DISCRETE_BEREZIN_SLACK))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn counting_and_riesz_on_unit_square() {
        let s = exact_rectangle_spectrum(1.0, 1.0, 200.0).unwrap();
        assert_eq!(s.counting(100.0).unwrap(), 6);
        assert_relative_eq!(s.riesz_mean(100.0, 1.0).unwrap(), 600.0 - 40.0 * PI * PI, epsilon = 1e-10);
        assert_eq!(s.riesz_mean(100.0, 0.0).unwrap(), 6.0);
        assert_eq!(s.riesz_mean(10.0, 2.0).unwrap(), 0.0);
        assert!(matches!(s.counting(201.0), Err(Error::Completeness { .. })));
        assert!(s.is_tie(5.0 * PI * PI, 1e-12));
        assert_eq!(s.counting(5.0 * PI * PI).unwrap(), 1);
    }

    #[test]
    fn berezin_examples() {
        let s = exact_rectangle_spectrum(1.0, 1.0, 200.0).unwrap();
        let c = check_berezin(&s, 1.0, 100.0).unwrap();
        assert!(c.pass);
        assert_relative_eq!(c.bound, 1e4 / (8.0 * PI), epsilon = 1e-9);
        let d = exact_disk_spectrum(1.0, 60.0).unwrap();
        let c = check_berezin(&d, PI, 50.0).unwrap();
        assert!(c.pass);
        assert_relative_eq!(c.bound, PI * 2500.0 / (8.0 * PI), epsilon = 1e-9);
    }
}
