//! Gauss–Legendre rules: fixed composite and adaptive bisection.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize) -> Self {
        let gl = GaussLegendre::new(NonZeroUsize::new(order.max(1)).unwrap());
        let (nodes, weights) = gl.iter().map(|&(x, w)| (x, w)).unzip();
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// `cells` equal panels on `[a, b]`.
    pub fn composite(&self, a: f64, b: f64, cells: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
        let dx = (b - a) / cells as f64;
        (0..cells)
            .map(|c| {
                let lo = a + c as f64 * dx;
                self.integrate(lo, lo + dx, &mut f)
            })
            .sum()
    }

    /// All nodes and weights of the composite rule.
    pub fn composite_nodes(&self, a: f64, b: f64, cells: usize) -> Vec<(f64, f64)> {
        let dx = (b - a) / cells as f64;
        (0..cells)
            .flat_map(|c| {
                let lo = a + c as f64 * dx;
                self.on(lo, lo + dx).collect::<Vec<_>>()
            })
            .collect()
    }
}

/// Result of adaptive integration with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

const ADAPTIVE_ORDER: usize = 10;
const MAX_PANELS: usize = 4000;

/// Globally adaptive integration: the panel with the largest error estimate
/// (one panel against its two halves) is split until the summed estimate is
/// below `tol`.
pub fn adaptive(a: f64, b: f64, tol: f64, f: impl Fn(f64) -> f64) -> Integral {
    let rule = GaussRule::new(ADAPTIVE_ORDER);
    let panel = |lo: f64, hi: f64| {
        let whole = rule.integrate(lo, hi, &f);
        let m = 0.5 * (lo + hi);
        let halves = rule.integrate(lo, m, &f) + rule.integrate(m, hi, &f);
        (lo, hi, halves, (halves - whole).abs())
    };
    let mut panels = vec![panel(a, b)];
    loop {
        let error: f64 = panels.iter().map(|p| p.3).sum();
        if error <= tol || panels.len() >= MAX_PANELS {
            return Integral {
                value: panels.iter().map(|p| p.2).sum(),
                error,
                converged: error <= tol,
            };
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| panels[i].3.total_cmp(&panels[j].3))
            .unwrap();
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let m = 0.5 * (lo + hi);
        panels.push(panel(lo, m));
        panels.push(panel(m, hi));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_rule_is_exact_for_polynomials() {
        let r = GaussRule::new(4);
        assert_relative_eq!(r.integrate(0.0, 2.0, |x| x.powi(7)), 32.0, epsilon = 1e-12);
        assert_relative_eq!(r.composite(0.0, 1.0, 3, |x| x * x), 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(r.composite_nodes(0.0, 1.0, 3).len(), 12);
    }

    #[test]
    fn adaptive_handles_kinks() {
        let i = adaptive(-1.0, 2.0, 1e-12, |x: f64| x.abs().sqrt());
        assert!(i.converged);
        assert_relative_eq!(i.value, (2.0 + 2.0 * 2f64.powf(1.5)) / 3.0, epsilon = 1e-10);
    }
}
