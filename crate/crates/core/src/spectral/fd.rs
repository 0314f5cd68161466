//! Five-point finite differences on masked grids.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::SymmetricEigen;

use super::lanczos::{slice_eigenvalues, SliceOptions};
use super::ldl::{Factorization, Symbolic};
use super::sparse::{nested_dissection, SymmetricCsr};
use super::{neumaier_sum, Spectrum, SpectrumSource};
use crate::error::{validation, Error, Result};
use crate::geometry::{Domain, Point};

/// Largest operator handed to the dense eigensolver.
pub const DENSE_MAX_NODES: usize = 4000;
/// Below this size `SolveMode::Auto` uses the dense solver.
pub const DENSE_AUTO_NODES: usize = 600;
/// Semiclassical experiments need `h >= MIN_H_OVER_GRID * h_grid`.
pub const MIN_H_OVER_GRID: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    Dense,
    Iterative,
    Auto,
}

/// `-Delta` on the grid nodes `origin + h_grid (i, j)` listed in `coords`,
/// Dirichlet outside them.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub h_grid: f64,
    pub origin: Point,
    pub coords: Vec<(i32, i32)>,
    pub matrix: SymmetricCsr,
    /// Grid resolution the operator was built with (0 if built from a predicate).
    pub resolution: usize,
}

impl DiscreteOperator {
    /// Five-point operator on the given nodes.
    pub fn from_nodes(origin: Point, h_grid: f64, coords: Vec<(i32, i32)>) -> Result<Self> {
        if coords.is_empty() {
            return Err(validation("grid has no interior nodes"));
        }
        let index: HashMap<(i32, i32), u32> = coords.iter().enumerate().map(|(k, &c)| (c, k as u32)).collect();
        let inv = 1.0 / (h_grid * h_grid);
        let mut t = Vec::with_capacity(coords.len() * 5);
        for (k, &(i, j)) in coords.iter().enumerate() {
            let k = k as u32;
            t.push((k, k, 4.0 * inv));
            for nb in [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)] {
                if let Some(&m) = index.get(&nb) {
                    t.push((k, m, -inv));
                }
            }
        }
        Ok(Self {
            h_grid,
            origin,
            matrix: SymmetricCsr::from_triplets(coords.len(), t),
            coords,
            resolution: 0,
        })
    }

    /// Nodes `origin + h_grid (i, j)` in the index box where `keep` holds.
    pub fn from_predicate(
        origin: Point,
        h_grid: f64,
        i_range: std::ops::RangeInclusive<i32>,
        j_range: std::ops::RangeInclusive<i32>,
        keep: impl Fn(Point) -> bool,
    ) -> Result<Self> {
        let mut coords = Vec::new();
        for i in i_range {
            for j in j_range.clone() {
                if keep(origin + h_grid * Point::new(i as f64, j as f64)) {
                    coords.push((i, j));
                }
            }
        }
        Self::from_nodes(origin, h_grid, coords)
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn node(&self, k: usize) -> Point {
        let (i, j) = self.coords[k];
        self.origin + self.h_grid * Point::new(i as f64, j as f64)
    }

    /// Grid function sampled at the nodes.
    pub fn sample(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        (0..self.len()).map(|k| f(self.node(k))).collect()
    }

    pub fn symbolic(&self) -> Arc<Symbolic> {
        Arc::new(Symbolic::analyze(&self.matrix, nested_dissection(&self.coords)))
    }

    pub fn to_matrix_market(&self) -> String {
        self.matrix.to_matrix_market()
    }
}

/// `H = -h^2 Delta - 1` on a discrete operator.
#[derive(Debug, Clone)]
pub struct SemiclassicalOperator<'a> {
    pub h: f64,
    pub op: &'a DiscreteOperator,
}

impl<'a> SemiclassicalOperator<'a> {
    pub fn new(op: &'a DiscreteOperator, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(validation("semiclassical parameter must be positive"));
        }
        if h < MIN_H_OVER_GRID * op.h_grid * (1.0 - 1e-12) {
            return Err(validation(format!(
                "h = {h} is below {MIN_H_OVER_GRID} grid spacings ({})",
                op.h_grid
            )));
        }
        Ok(Self { h, op })
    }

    pub fn matrix(&self) -> SymmetricCsr {
        let mut m = self.op.matrix.clone();
        let h2 = self.h * self.h;
        for i in 0..m.n {
            for p in m.indptr[i]..m.indptr[i + 1] {
                m.values[p] *= h2;
                if m.indices[p] as usize == i {
                    m.values[p] -= 1.0;
                }
            }
        }
        m
    }
}

/// Masked grid over the bounding box with spacing `(longest side)/(n + 1)`;
/// a node is kept when it lies inside the domain.
pub fn discretize(domain: &Domain, n: usize) -> Result<DiscreteOperator> {
    if n < 8 {
        return Err(validation(format!("resolution must be at least 8, got {n}")));
    }
    let (lo, hi) = domain.bounding_box();
    let h_grid = (hi.x - lo.x).max(hi.y - lo.y) / (n + 1) as f64;
    let ni = ((hi.x - lo.x) / h_grid).ceil() as i32;
    let nj = ((hi.y - lo.y) / h_grid).ceil() as i32;
    let mut op = DiscreteOperator::from_predicate(lo, h_grid, 1..=ni, 1..=nj, |x| domain.signed_distance(x) > 0.0)
        .map_err(|_| validation("discretization has no interior nodes"))?;
    op.resolution = n;
    Ok(op)
}

fn inertia_at(a: &SymmetricCsr, sym: &Arc<Symbolic>, shift: f64) -> Result<usize> {
    Ok(Factorization::new_perturbed(a, sym.clone(), shift)?.inertia().negative)
}

/// Every discrete eigenvalue below `cutoff`, with the count certified by the
/// inertia of `A - cutoff I`.
pub fn eigen_below(op: &DiscreteOperator, cutoff: f64, mode: SolveMode) -> Result<Spectrum> {
    let n = op.len();
    let dense = match mode {
        SolveMode::Dense => true,
        SolveMode::Iterative => false,
        SolveMode::Auto => n <= DENSE_AUTO_NODES,
    };
    let sym = op.symbolic();
    let expected = inertia_at(&op.matrix, &sym, cutoff)?;
    let eigenvalues = if dense {
        if n > DENSE_MAX_NODES {
            return Err(Error::Resource(format!(
                "dense solve limited to {DENSE_MAX_NODES} nodes, operator has {n}"
            )));
        }
        let e = SymmetricEigen::new(op.matrix.to_dense());
        let mut v: Vec<f64> = e.eigenvalues.iter().copied().filter(|&x| x < cutoff).collect();
        v.sort_by(f64::total_cmp);
        v
    } else {
        slice_eigenvalues(&op.matrix, sym, 0.0, cutoff, SliceOptions::default())?
            .eigenvalues
            .into_iter()
            .filter(|&x| x < cutoff)
            .collect()
    };
    if eigenvalues.len() != expected {
        return Err(Error::Solver(format!(
            "{} eigenvalues below {cutoff}, inertia count {expected}",
            eigenvalues.len()
        )));
    }
    Spectrum::new(eigenvalues, cutoff, SpectrumSource::Discrete { n: op.resolution })
}

/// `Tr(phi H phi)_-` with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizedTrace {
    pub value: f64,
    /// Negative eigenvalues of the sandwiched operator.
    pub negative_count: usize,
    /// Eigenvalues in `[-window, 0)` are not resolved; they add at most
    /// `count * window` and are estimated as half of that.
    pub window: f64,
    pub window_count: usize,
    /// Bound on the error from the unresolved window.
    pub error: f64,
    pub support_nodes: usize,
}

/// Window below zero left unresolved by the localized trace, relative to the
/// largest squared weight.
pub const TRACE_WINDOW: f64 = 1e-7;

/// Sum of the absolute negative eigenvalues of `phi (h^2 A - 1) phi`
/// restricted to nodes where the weight is nonzero.
pub fn localized_trace(op: &DiscreteOperator, weight: &[f64], h: f64, mode: SolveMode) -> Result<LocalizedTrace> {
    if weight.len() != op.len() {
        return Err(validation("weight length does not match the grid"));
    }
    let semi = SemiclassicalOperator::new(op, h)?;
    let support: Vec<usize> = (0..op.len()).filter(|&k| weight[k] != 0.0).collect();
    if support.is_empty() {
        return Ok(LocalizedTrace {
            value: 0.0,
            negative_count: 0,
            window: 0.0,
            window_count: 0,
            error: 0.0,
            support_nodes: 0,
        });
    }
    let k_ss = semi.matrix().submatrix(&support);
    let phi: Vec<f64> = support.iter().map(|&k| weight[k]).collect();
    let m = k_ss.scaled_symmetric(&phi);
    let coords: Vec<(i32, i32)> = support.iter().map(|&k| op.coords[k]).collect();
    let n = support.len();
    let dense = match mode {
        SolveMode::Dense => true,
        SolveMode::Iterative => false,
        SolveMode::Auto => n <= DENSE_AUTO_NODES,
    };
    if dense {
        if n > DENSE_MAX_NODES {
            return Err(Error::Resource(format!(
                "dense solve limited to {DENSE_MAX_NODES} nodes, support has {n}"
            )));
        }
        let e = SymmetricEigen::new(m.to_dense());
        let neg: Vec<f64> = e.eigenvalues.iter().copied().filter(|&x| x < 0.0).collect();
        return Ok(LocalizedTrace {
            value: -neumaier_sum(neg.iter().copied()),
            negative_count: neg.len(),
            window: 0.0,
            window_count: 0,
            error: 0.0,
            support_nodes: n,
        });
    }
    let sym = Arc::new(Symbolic::analyze(&m, nested_dissection(&coords)));
    // the weight is invertible on the support, so Sylvester's law gives the count from K_SS
    let k_sym = Arc::new(Symbolic::analyze(&k_ss, nested_dissection(&coords)));
    let negative_count = inertia_at(&k_ss, &k_sym, 0.0)?;
    let (glo, _) = m.gershgorin();
    let peak = phi.iter().fold(0.0_f64, |a, p| a.max(p * p));
    let res = slice_eigenvalues(&m, sym, glo - 1.0, -TRACE_WINDOW * peak, SliceOptions::default())?;
    let window = -res.hi;
    let window_count = negative_count.saturating_sub(res.eigenvalues.len());
    Ok(LocalizedTrace {
        value: -neumaier_sum(res.eigenvalues.iter().copied()) + 0.5 * window * window_count as f64,
        negative_count,
        window,
        window_count,
        error: 0.5 * window * window_count as f64,
        support_nodes: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn fd_square(h: f64, m: usize, k: usize) -> f64 {
        4.0 / (h * h) * ((m as f64 * PI * h / 2.0).sin().powi(2) + (k as f64 * PI * h / 2.0).sin().powi(2))
    }

    #[test]
    fn square_grid_matches_closed_form() {
        let op = discretize(&Domain::unit_square(), 31).unwrap();
        assert_eq!(op.len(), 31 * 31);
        let s = eigen_below(&op, 100.0, SolveMode::Iterative).unwrap();
        let h = 1.0 / 32.0;
        let mut exact: Vec<f64> = (1..6)
            .flat_map(|m| (1..6).map(move |k| fd_square(h, m, k)))
            .filter(|&e| e < 100.0)
            .collect();
        exact.sort_by(f64::total_cmp);
        assert_eq!(s.len(), 6);
        for (a, b) in s.eigenvalues.iter().zip(&exact) {
            assert_relative_eq!(a, b, max_relative = 1e-10);
        }
        assert!(eigen_below(&op, 10.0, SolveMode::Auto).unwrap().is_empty());
    }

    #[test]
    fn dense_and_iterative_agree() {
        let op = discretize(&Domain::unit_square(), 20).unwrap();
        let d = eigen_below(&op, 800.0, SolveMode::Dense).unwrap();
        let i = eigen_below(&op, 800.0, SolveMode::Iterative).unwrap();
        assert_eq!(d.len(), i.len());
        for (a, b) in d.eigenvalues.iter().zip(&i.eigenvalues) {
            assert_relative_eq!(a, b, max_relative = 1e-8);
        }
    }

    #[test]
    fn full_weight_reproduces_spectral_riesz_mean() {
        let op = discretize(&Domain::unit_square(), 23).unwrap();
        let h = 8.0 / 24.0 * 1.05;
        let s = eigen_below(&op, 1.0 / (h * h), SolveMode::Dense).unwrap();
        let ones = vec![1.0; op.len()];
        let expect = h * h * s.riesz_mean(1.0 / (h * h), 1.0).unwrap();
        let dense = localized_trace(&op, &ones, h, SolveMode::Dense).unwrap();
        let iter = localized_trace(&op, &ones, h, SolveMode::Iterative).unwrap();
        assert_relative_eq!(dense.value, expect, max_relative = 1e-8);
        assert_relative_eq!(iter.value, expect, max_relative = 1e-8);
        assert_eq!(iter.negative_count, s.len());
        let zeros = vec![0.0; op.len()];
        assert_eq!(localized_trace(&op, &zeros, h, SolveMode::Auto).unwrap().value, 0.0);
        assert!(localized_trace(&op, &ones, 0.1, SolveMode::Auto).is_err());
    }
}
