//! Semiclassical constants, two-term predictions and remainder analysis.

use std::f64::consts::PI;

use statrs::function::beta::beta;
use statrs::function::gamma::gamma;

use crate::error::{validation, Result};
use crate::geometry::GeometrySummary;
use crate::spectral::{neumaier_sum, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylConstants {
    pub d: usize,
    /// Volume of the unit ball.
    pub omega_d: f64,
    /// `(2/(2+d)) omega_d / (2 pi)^d`.
    pub l_d: f64,
}

impl WeylConstants {
    /// `Gamma(gamma+1) / ((4 pi)^{d/2} Gamma(gamma+1+d/2))`.
    pub fn l_gamma_d(&self, g: f64) -> f64 {
        let h = self.d as f64 / 2.0;
        gamma(g + 1.0) / ((4.0 * PI).powf(h) * gamma(g + 1.0 + h))
    }

    /// `omega_d / (2 pi)^d`, the leading counting coefficient.
    pub fn counting_coefficient(&self) -> f64 {
        self.omega_d / (2.0 * PI).powi(self.d as i32)
    }
}

pub fn constants(d: usize) -> Result<WeylConstants> {
    if !(1..=16).contains(&d) {
        return Err(validation(format!("dimension must be in 1..=16, got {d}")));
    }
    let h = d as f64 / 2.0;
    let omega_d = PI.powf(h) / gamma(1.0 + h);
    Ok(WeylConstants {
        d,
        omega_d,
        l_d: 2.0 / (2.0 + d as f64) * omega_d / (2.0 * PI).powi(d as i32),
    })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(validation(format!("lambda must be finite and nonnegative, got {lambda}")));
    }
    Ok(())
}

/// `L_d |Omega| lambda^{1+d/2}`.
pub fn one_term_riesz(summary: &GeometrySummary, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let d = summary.dimension;
    Ok(constants(d)?.l_d * summary.area * lambda.powf(1.0 + d as f64 / 2.0))
}

/// `L_d |Omega| lambda^{1+d/2} - (L_{d-1}/4) P lambda^{1+(d-1)/2}`.
pub fn two_term_riesz(summary: &GeometrySummary, lambda: f64) -> Result<f64> {
    let d = summary.dimension;
    let boundary = if d >= 2 { constants(d - 1)?.l_d / 4.0 } else { 0.0 };
    Ok(one_term_riesz(summary, lambda)? - boundary * summary.perimeter * lambda.powf(1.0 + (d as f64 - 1.0) / 2.0))
}

/// Two-term counting prediction, the derivative of [`two_term_riesz`] in lambda.
pub fn two_term_counting(summary: &GeometrySummary, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let d = summary.dimension;
    let bulk = constants(d)?.counting_coefficient() * summary.area * lambda.powf(d as f64 / 2.0);
    let edge = if d >= 2 {
        0.25 * constants(d - 1)?.counting_coefficient() * summary.perimeter * lambda.powf((d as f64 - 1.0) / 2.0)
    } else {
        0.0
    };
    Ok(bulk - edge)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prediction {
    OneTerm,
    TwoTerm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemainderSeries {
    pub lambdas: Vec<f64>,
    pub riesz: Vec<f64>,
    pub predicted: Vec<f64>,
    pub remainders: Vec<f64>,
    /// `R / lambda^{1+(d-1)/2}`.
    pub normalized: Vec<f64>,
    /// Least-squares slope of `log |R|` against `log lambda` over the top two decades.
    pub slope: f64,
    pub prediction: Prediction,
}

impl RemainderSeries {
    /// Median of `|normalized|` over grid points in `[lo, hi)`.
    pub fn decade_median(&self, lo: f64, hi: f64) -> Option<f64> {
        let mut v: Vec<f64> = self
            .lambdas
            .iter()
            .zip(&self.normalized)
            .filter(|(l, _)| **l >= lo && **l < hi)
            .map(|(_, r)| r.abs())
            .collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let m = v.len() / 2;
        Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
    }
}

/// Log-spaced points in `[lo, hi]`, each moved to the midpoint of the
/// eigenvalue gap containing it (duplicates dropped).
pub fn midpoint_grid(spec: &Spectrum, lo: f64, hi: f64, per_decade: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || per_decade == 0 {
        return Err(validation("grid needs 0 < lo < hi and a positive density"));
    }
    if hi > spec.cutoff {
        spec.counting(hi)?;
    }
    let ev = &spec.eigenvalues;
    let steps = ((hi / lo).log10() * per_decade as f64).ceil() as usize;
    let mut out: Vec<f64> = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = (lo.ln() + (hi / lo).ln() * k as f64 / steps as f64).exp();
        let i = ev.partition_point(|&e| e <= t);
        let below = if i == 0 { 0.0 } else { ev[i - 1] };
        let above = ev.get(i).copied().unwrap_or(spec.cutoff);
        let m = 0.5 * (below + above);
        if m >= lo && m <= hi && out.last().is_none_or(|&p| m > p) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(validation("no eigenvalue gap midpoints in the requested range"));
    }
    Ok(out)
}

fn slope_top_two_decades(lambdas: &[f64], rem: &[f64]) -> f64 {
    let top = lambdas.last().copied().unwrap_or(0.0);
    let pts: Vec<(f64, f64)> = lambdas
        .iter()
        .zip(rem)
        .filter(|(l, r)| **l >= top / 100.0 && r.abs() > 0.0)
        .map(|(l, r)| (l.ln(), r.abs().ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn remainder_series(spec: &Spectrum, summary: &GeometrySummary, grid: &[f64]) -> Result<RemainderSeries> {
    remainder_series_with(spec, summary, grid, Prediction::TwoTerm)
}

/// Remainder against a one- or two-term prediction.
pub fn remainder_series_with(
    spec: &Spectrum,
    summary: &GeometrySummary,
    grid: &[f64],
    prediction: Prediction,
) -> Result<RemainderSeries> {
    if grid.is_empty() {
        return Err(validation("lambda grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(validation("lambda grid must be strictly increasing"));
    }
    let d = summary.dimension as f64;
    let mut riesz = Vec::with_capacity(grid.len());
    let mut predicted = Vec::with_capacity(grid.len());
    for &l in grid {
        riesz.push(spec.riesz_mean(l, 1.0)?);
        predicted.push(match prediction {
            Prediction::OneTerm => one_term_riesz(summary, l)?,
            Prediction::TwoTerm => two_term_riesz(summary, l)?,
        });
    }
    let remainders: Vec<f64> = riesz.iter().zip(&predicted).map(|(a, b)| a - b).collect();
    let normalized = grid
        .iter()
        .zip(&remainders)
        .map(|(l, r)| r / l.powf(1.0 + (d - 1.0) / 2.0))
        .collect();
    Ok(RemainderSeries {
        slope: slope_top_two_decades(grid, &remainders),
        lambdas: grid.to_vec(),
        riesz,
        predicted,
        remainders,
        normalized,
        prediction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AizenmanLieb {
    pub lambda: f64,
    pub lower_order: u32,
    pub upper_order: u32,
    /// `sum (lambda - lambda_k)_+^{upper}`.
    pub direct: f64,
    /// Beta-weighted integral of the lower-order mean.
    pub integral: f64,
    pub residual: f64,
}

impl AizenmanLieb {
    pub fn relative_residual(&self) -> f64 {
        if self.direct == 0.0 {
            self.residual
        } else {
            self.residual / self.direct.abs()
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Compares `sum (lambda - lambda_k)_+^{g2}` with
/// `B(g1+1, g2-g1)^{-1} int_0^lambda tau^{g2-g1-1} sum (lambda - tau - lambda_k)_+^{g1} dtau`.
/// The lower-order mean is a polynomial between consecutive eigenvalues, so
/// the integral is evaluated exactly piece by piece with Gauss–Legendre rules.
pub fn check_aizenman_lieb(spec: &Spectrum, lambda: f64, lower: u32, upper: u32) -> Result<AizenmanLieb> {
    if upper <= lower || upper > 4 {
        return Err(validation("orders must satisfy lower < upper <= 4"));
    }
    check_lambda(lambda)?;
    let direct = spec.riesz_mean(lambda, upper as f64)?;
    let ev = &spec.eigenvalues[..spec.eigenvalues.partition_point(|&e| e < lambda)];
    let w = 1.0 / beta(lower as f64 + 1.0, (upper - lower) as f64);
    let rule = crate::quadrature::GaussRule::new(upper as usize + 1);
    // power sums p_m = sum lambda_k^m of the eigenvalues already passed
    let mut power = vec![0.0; lower as usize + 1];
    let mut comp = vec![0.0; lower as usize + 1];
    let mut pieces = Vec::with_capacity(ev.len());
    for (j, &e) in ev.iter().enumerate() {
        for m in 0..=lower as usize {
            let v = e.powi(m as i32);
            let t = power[m] + v;
            comp[m] += if power[m].abs() >= v.abs() { (power[m] - t) + v } else { (v - t) + power[m] };
            power[m] = t;
        }
        let sums: Vec<f64> = power.iter().zip(&comp).map(|(p, c)| p + c).collect();
        let next = ev.get(j + 1).copied().unwrap_or(lambda);
        // s = lambda - tau runs over [e, next); mean of order `lower` there is
        // sum_m C(lower, m) s^{lower-m} (-1)^m p_m
        let mean = |s: f64| {
            (0..=lower)
                .map(|m| binomial(lower, m) * s.powi((lower - m) as i32) * if m % 2 == 0 { 1.0 } else { -1.0 } * sums[m as usize])
                .sum::<f64>()
        };
        let k = (upper - lower - 1) as i32;
        pieces.push(rule.integrate(e, next, |s| (lambda - s).powi(k) * mean(s)));
    }
    let integral = w * neumaier_sum(pieces);
    Ok(AizenmanLieb {
        lambda,
        lower_order: lower,
        upper_order: upper,
        direct,
        integral,
        residual: (direct - integral).abs(),
    })
}

/// Exponent of the inradius factor in the universal convex bound.
pub const CONVEX_EXPONENT: f64 = 1.0 / 11.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBoundReport {
    pub lambdas: Vec<f64>,
    pub remainders: Vec<f64>,
    /// `|R| / (P lambda^{3/2} (r_in sqrt(lambda))^{-1/11})`.
    pub q: Vec<f64>,
    /// `(decade start, max Q)` for each decade of `[1e2, cutoff]` with grid points.
    pub decade_max: Vec<(f64, f64)>,
    /// Largest later decade maximum over the first decade maximum.
    pub decade_ratio: f64,
    /// Fitted constant: sup Q over `lambda >= 1e2`.
    pub fitted_c: f64,
}

impl ConvexBoundReport {
    pub fn bounded(&self, ratio: f64) -> bool {
        self.decade_ratio <= ratio
    }
}

/// Lower end of the range where the convex bound is assessed.
pub const CONVEX_BOUND_START: f64 = 1e2;

pub fn convex_bound_envelope(summary: &GeometrySummary, lambda: f64) -> f64 {
    let d = summary.dimension as f64;
    summary.perimeter * lambda.powf(1.0 + (d - 1.0) / 2.0) * (summary.inradius * lambda.sqrt()).powf(-CONVEX_EXPONENT)
}

pub fn check_universal_convex_bound(
    spec: &Spectrum,
    summary: &GeometrySummary,
    grid: &[f64],
    convex: bool,
) -> Result<ConvexBoundReport> {
    if !convex {
        return Err(validation("the universal bound applies to convex domains only"));
    }
    let series = remainder_series(spec, summary, grid)?;
    let q: Vec<f64> = grid
        .iter()
        .zip(&series.remainders)
        .map(|(&l, r)| r.abs() / convex_bound_envelope(summary, l))
        .collect();
    let mut decade_max: Vec<(f64, f64)> = Vec::new();
    for (&l, &qv) in grid.iter().zip(&q) {
        if l < CONVEX_BOUND_START {
            continue;
        }
        let start = 10f64.powi(l.log10().floor() as i32);
        match decade_max.last_mut() {
            Some((s, m)) if *s == start => *m = m.max(qv),
            _ => decade_max.push((start, qv)),
        }
    }
    let first = decade_max.first().map_or(f64::NAN, |p| p.1);
    let later = decade_max.iter().skip(1).map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let decade_ratio = if decade_max.len() < 2 { 1.0 } else { later / first };
    let fitted_c = decade_max.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(ConvexBoundReport {
        lambdas: grid.to_vec(),
        remainders: series.remainders,
        q,
        decade_max,
        decade_ratio,
        fitted_c,
    })
}

/// `lambda_1 >= pi^2 / (4 r_in^2)` for convex planar domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HerschProtter {
    pub lambda_1: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn check_hersch_protter(spec: &Spectrum, summary: &GeometrySummary) -> Result<HerschProtter> {
    let bound = PI * PI / (4.0 * summary.inradius * summary.inradius);
    let lambda_1 = match spec.first() {
        Some(l) => l,
        None if spec.cutoff >= bound => spec.cutoff,
        None => return Err(validation("spectrum is empty below a cutoff under the bound")),
    };
    Ok(HerschProtter {
        lambda_1,
        bound,
        pass: lambda_1 >= bound * (1.0 - 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use crate::spectral::exact_rectangle_spectrum;
    use approx::assert_relative_eq;

    #[test]
    fn constant_examples() {
        assert_relative_eq!(constants(2).unwrap().l_d, 1.0 / (8.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(constants(1).unwrap().l_d, 2.0 / (3.0 * PI), max_relative = 1e-14);
        let c = constants(2).unwrap();
        assert_relative_eq!(c.l_gamma_d(1.0), c.l_d, max_relative = 1e-14);
        assert!(constants(0).is_err() && constants(17).is_err());
    }

    #[test]
    fn two_term_example() {
        let s = Domain::unit_square().summary();
        let w = two_term_riesz(&s, 100.0).unwrap();
        assert_relative_eq!(w, 1e4 / (8.0 * PI) - 2e3 / (3.0 * PI), max_relative = 1e-13);
        assert!((w - 185.681).abs() < 1e-3);
        assert_eq!(two_term_riesz(&s, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn aizenman_lieb_examples() {
        let s = exact_rectangle_spectrum(1.0, 1.0, 200.0).unwrap();
        let a = check_aizenman_lieb(&s, 100.0, 0, 1).unwrap();
        assert!(a.relative_residual() < 1e-14);
        assert_relative_eq!(a.direct, 600.0 - 40.0 * PI * PI, max_relative = 1e-13);
        let b = check_aizenman_lieb(&s, 150.0, 1, 2).unwrap();
        assert!(b.relative_residual() < 1e-12);
        let z = check_aizenman_lieb(&s, 10.0, 0, 1).unwrap();
        assert_eq!((z.direct, z.integral), (0.0, 0.0));
        assert!(check_aizenman_lieb(&s, 300.0, 0, 1).is_err());
    }

    #[test]
    fn remainder_needs_grid() {
        let s = exact_rectangle_spectrum(1.0, 1.0, 200.0).unwrap();
        assert!(remainder_series(&s, &Domain::unit_square().summary(), &[]).is_err());
    }
}
