//! Spectrum slicing: inertia counts at slice boundaries and shift-invert
//! Lanczos with full reorthogonalization inside each slice.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use super::ldl::{Factorization, Symbolic};
use super::sparse::SymmetricCsr;
use crate::error::{Error, Result};
use crate::sampling::block_rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceOptions {
    /// Slices holding more eigenvalues are bisected.
    pub max_per_slice: usize,
    /// Residual tolerance relative to the matrix scale.
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
    pub want_vectors: bool,
}

impl Default for SliceOptions {
    fn default() -> Self {
        Self {
            max_per_slice: 24,
            tol: 1e-10,
            max_restarts: 40,
            seed: 0x5eed,
            want_vectors: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SliceResult {
    /// Eigenvalues in `[lo, hi)`, ascending.
    pub eigenvalues: Vec<f64>,
    pub vectors: Option<Vec<Vec<f64>>>,
    /// Negative pivots at the lower and upper shifts.
    pub count_below_lo: usize,
    pub count_below_hi: usize,
    /// Actual boundary shifts after breakdown perturbation.
    pub lo: f64,
    pub hi: f64,
    pub factorizations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    // twice is enough
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            axpy(-c, b, v);
        }
    }
}

/// Negative slices spanning more than this ratio are split geometrically:
/// a cluster of eigenvalues just below zero is otherwise indistinguishable
/// from the wanted ones after shift-inversion.
const GEOMETRIC_RATIO: f64 = 4.0;

fn split_point(a: f64, b: f64) -> f64 {
    if b < 0.0 && a < GEOMETRIC_RATIO * b {
        -(a * b).sqrt()
    } else {
        0.5 * (a + b)
    }
}

/// All eigenvalues of `a` in `[lo, hi)`, certified against inertia counts.
pub fn slice_eigenvalues(
    a: &SymmetricCsr,
    symbolic: Arc<Symbolic>,
    lo: f64,
    hi: f64,
    opts: SliceOptions,
) -> Result<SliceResult> {
    let mut factorizations = 0;
    let mut factor = |s: f64| {
        factorizations += 1;
        Factorization::new_perturbed(a, symbolic.clone(), s)
    };
    let f_lo = factor(lo)?;
    let f_hi = factor(hi)?;
    let (lo, hi) = (f_lo.shift, f_hi.shift);
    let (n_lo, n_hi) = (f_lo.inertia().negative, f_hi.inertia().negative);
    drop((f_lo, f_hi));
    let mut pending = vec![(lo, n_lo, hi, n_hi)];
    let mut slices = Vec::new();
    while let Some((a0, c0, b0, c1)) = pending.pop() {
        if c1 < c0 {
            return Err(Error::Solver(format!("inertia decreased between {a0} and {b0}")));
        }
        if c1 == c0 {
            continue;
        }
        let wide = b0 < 0.0 && a0 < GEOMETRIC_RATIO * b0;
        if (c1 - c0 <= opts.max_per_slice && !wide) || b0 - a0 <= 1e-9 * b0.abs().max(1.0) {
            slices.push((a0, b0, c1 - c0));
            continue;
        }
        let f = factor(split_point(a0, b0))?;
        let (m, cm) = (f.shift, f.inertia().negative);
        pending.push((m, cm, b0, c1));
        pending.push((a0, c0, m, cm));
    }
    slices.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut eigenvalues = Vec::with_capacity(n_hi - n_lo);
    let mut vectors = opts.want_vectors.then(Vec::new);
    for (k, &(a0, b0, count)) in slices.iter().enumerate() {
        let f = factor(0.5 * (a0 + b0))?;
        let pairs = solve_slice(a, &f, a0, b0, count, &opts, k as u64)?;
        for (lam, x) in pairs {
            eigenvalues.push(lam);
            if let Some(v) = vectors.as_mut() {
                v.push(x);
            }
        }
    }
    if eigenvalues.len() != n_hi - n_lo {
        return Err(Error::Solver(format!(
            "found {} eigenvalues in [{lo}, {hi}) but the inertia difference is {}",
            eigenvalues.len(),
            n_hi - n_lo
        )));
    }
    let mut idx: Vec<usize> = (0..eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| eigenvalues[i].total_cmp(&eigenvalues[j]));
    let eigenvalues: Vec<f64> = idx.iter().map(|&i| eigenvalues[i]).collect();
    let vectors = vectors.map(|mut v| idx.iter().map(|&i| std::mem::take(&mut v[i])).collect());
    Ok(SliceResult {
        eigenvalues,
        vectors,
        count_below_lo: n_lo,
        count_below_hi: n_hi,
        lo,
        hi,
        factorizations,
    })
}

fn solve_slice(
    a: &SymmetricCsr,
    f: &Factorization,
    lo: f64,
    hi: f64,
    count: usize,
    opts: &SliceOptions,
    stream: u64,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = a.n;
    let sigma = f.shift;
    let (glo, ghi) = a.gershgorin();
    let scale = glo.abs().max(ghi.abs());
    let mut rng = block_rng(opts.seed, stream);
    let mut locked: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut ax = vec![0.0; n];
    for _ in 0..opts.max_restarts {
        let free = n - locked.len();
        let m = (2 * count + 30).min(free);
        if m == 0 {
            break;
        }
        let locked_vecs: Vec<Vec<f64>> = locked.iter().map(|p| p.1.clone()).collect();
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        orthogonalize(&mut v, &locked_vecs);
        let nv = dot(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= nv);
        let mut basis: Vec<Vec<f64>> = vec![v];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        for j in 0..m {
            let mut w = basis[j].clone();
            f.solve(&mut w);
            let aj = dot(&w, &basis[j]);
            alpha.push(aj);
            orthogonalize(&mut w, &locked_vecs);
            orthogonalize(&mut w, &basis);
            let bj = dot(&w, &w).sqrt();
            if j + 1 == m || bj <= 1e-12 * aj.abs().max(1e-300) {
                break;
            }
            beta.push(bj);
            w.iter_mut().for_each(|x| *x /= bj);
            basis.push(w);
        }
        let k = alpha.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut found = Vec::new();
        for c in 0..k {
            let theta = eig.eigenvalues[c];
            if theta == 0.0 {
                continue;
            }
            let mu = sigma + 1.0 / theta;
            if !(mu >= lo - 1e-8 * (hi - lo) && mu < hi + 1e-8 * (hi - lo)) {
                continue;
            }
            let s = eig.eigenvectors.column(c);
            let mut x = vec![0.0; n];
            for (i, b) in basis.iter().enumerate().take(k) {
                axpy(s[i], b, &mut x);
            }
            let nx = dot(&x, &x).sqrt();
            x.iter_mut().for_each(|xi| *xi /= nx);
            a.matvec(&x, &mut ax);
            let rho = dot(&x, &ax);
            let res = ax
                .iter()
                .zip(&x)
                .map(|(p, q)| (p - rho * q).powi(2))
                .sum::<f64>()
                .sqrt();
            if res <= opts.tol * scale && rho >= lo && rho < hi {
                found.push((rho, x));
            }
        }
        for (rho, mut x) in found {
            // Ritz vectors of one run are orthogonal already; guard against drift
            let lv: Vec<Vec<f64>> = locked.iter().map(|p| p.1.clone()).collect();
            orthogonalize(&mut x, &lv);
            let nx = dot(&x, &x).sqrt();
            if nx < 0.5 {
                continue;
            }
            x.iter_mut().for_each(|xi| *xi /= nx);
            locked.push((rho, x));
        }
        if locked.len() >= count {
            break;
        }
    }
    if locked.len() != count {
        return Err(Error::Solver(format!(
            "slice [{lo}, {hi}) holds {count} eigenvalues, Lanczos converged to {}",
            locked.len()
        )));
    }
    Ok(locked)
}

#[cfg(test)]
mod tests {
    use super::super::sparse::nested_dissection;
    use super::*;

    #[test]
    fn finds_multiple_eigenvalues_of_grid_laplacian() {
        let m = 20usize;
        let idx = |i: usize, j: usize| (i * m + j) as u32;
        let mut t = Vec::new();
        let mut coords = Vec::new();
        for i in 0..m {
            for j in 0..m {
                coords.push((i as i32, j as i32));
                t.push((idx(i, j), idx(i, j), 4.0));
                if i + 1 < m {
                    t.push((idx(i, j), idx(i + 1, j), -1.0));
                    t.push((idx(i + 1, j), idx(i, j), -1.0));
                }
                if j + 1 < m {
                    t.push((idx(i, j), idx(i, j + 1), -1.0));
                    t.push((idx(i, j + 1), idx(i, j), -1.0));
                }
            }
        }
        let a = SymmetricCsr::from_triplets(m * m, t);
        let sym = Arc::new(Symbolic::analyze(&a, nested_dissection(&coords)));
        let opts = SliceOptions {
            max_per_slice: 8,
            ..Default::default()
        };
        let res = slice_eigenvalues(&a, sym, 0.0, 1.0, opts).unwrap();
        let k = std::f64::consts::PI / (m + 1) as f64;
        let mut exact: Vec<f64> = (1..=m)
            .flat_map(|p| (1..=m).map(move |q| 4.0 - 2.0 * (k * p as f64).cos() - 2.0 * (k * q as f64).cos()))
            .filter(|&e| e < 1.0)
            .collect();
        exact.sort_by(f64::total_cmp);
        assert_eq!(res.eigenvalues.len(), exact.len());
        for (x, y) in res.eigenvalues.iter().zip(&exact) {
            assert!((x - y).abs() < 1e-10 * y, "{x} vs {y}");
        }
    }
}
